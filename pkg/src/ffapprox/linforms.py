"""Valuation-inequality systems over F_p[T] and the approximation results built on them.

A system asks for polynomials x_1..x_m, deg x_j <= d_j, not all zero, with
v(sum_j A[i][j] x_j) >= r[i] for every row i.  Writing x_j = sum_k x_jk T^k,
each row is an F_p-linear condition on the coefficients x_jk, one equation
per exponent e < r[i], so a solution is a kernel vector of an F_p matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import permutations
from typing import Sequence

import numpy as np

from .errors import DomainError, PrecisionError
from .laurent import INF, LaurentSeries, QExponent, frac_norm, valuation
from .ring import FieldConfig, Poly, format_poly


@dataclass(frozen=True)
class IntegralPoint:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, j):
        return self.coords[j]

    def __iter__(self):
        return iter(self.coords)

    @property
    def is_zero(self) -> bool:
        return all(not c for c in self.coords)

    def height(self) -> QExponent:
        """max_j |x_j| as a q-exponent."""
        return max((QExponent.of_poly(c) for c in self.coords), default=QExponent.zero())

    def max_degree(self):
        return max(c.degree for c in self.coords)

    def to_json(self) -> list[str]:
        return [format_poly(c) for c in self.coords]

    def __str__(self):
        return "(" + ", ".join(format_poly(c) for c in self.coords) + ")"


@dataclass
class GammaInstance:
    """Rows A[i] (series coefficients), targets r[i], degree bounds d[j].

    d[j] = -1 pins x_j to zero.
    """

    A: list
    r: list
    deg_bounds: list
    labels: list = dc_field(default_factory=list)

    def __post_init__(self):
        self.A = [list(row) for row in self.A]
        self.r = [int(v) for v in self.r]
        self.deg_bounds = [int(d) for d in self.deg_bounds]
        if len(self.A) != len(self.r):
            raise DomainError(f"{len(self.A)} rows but {len(self.r)} targets")
        m = len(self.deg_bounds)
        for i, row in enumerate(self.A):
            if len(row) != m:
                raise DomainError(f"row {i} has {len(row)} entries, expected {m}")
        if any(d < -1 for d in self.deg_bounds):
            raise DomainError("degree bounds must be >= -1")

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def m(self) -> int:
        return len(self.deg_bounds)

    @property
    def field(self) -> FieldConfig:
        return self.A[0][0].field

    def num_unknowns(self) -> int:
        return sum(d + 1 for d in self.deg_bounds if d >= 0)

    def check_precision(self):
        for i, row in enumerate(self.A):
            for j, a in enumerate(row):
                d = self.deg_bounds[j]
                if d < 0 or a.prec == INF:
                    continue
                need = self.r[i] + d
                if a.prec < need:
                    raise PrecisionError(
                        f"entry ({i},{j}) is certified to {a.prec} but the system needs {need} "
                        f"(target {self.r[i]} + degree bound {d}); deficit {need - a.prec}"
                    )


# ---------------------------------------------------------------- F_p linear algebra

def rref_mod_p(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p; pivots chosen column by column, first nonzero row."""
    M = np.array(M, dtype=np.int64) % p
    rows, cols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            M[[r, k]] = M[[k, r]]
        M[r] = M[r] * pow(int(M[r, c]), -1, p) % p
        col = M[:, c].copy()
        col[r] = 0
        if col.any():
            M = (M - np.outer(col, M[r])) % p
        pivots.append(c)
        r += 1
    return M, pivots


def first_kernel_vector(M: np.ndarray, p: int) -> np.ndarray | None:
    """Kernel vector with the first free variable 1 and the other free variables 0."""
    cols = M.shape[1]
    if M.shape[0] == 0:
        if cols == 0:
            return None
        x = np.zeros(cols, dtype=np.int64)
        x[0] = 1
        return x
    R, pivots = rref_mod_p(M, p)
    pivset = set(pivots)
    free = [c for c in range(cols) if c not in pivset]
    if not free:
        return None
    f = free[0]
    x = np.zeros(cols, dtype=np.int64)
    x[f] = 1
    for row, c in enumerate(pivots):
        x[c] = -R[row, f] % p
    return x


def _columns(inst: GammaInstance) -> list[tuple[int, int]]:
    return [(j, k) for j, d in enumerate(inst.deg_bounds) for k in range(d + 1)]


def system_matrix(inst: GammaInstance) -> np.ndarray:
    """Rows: (i, e) for e from min_j(v(A_ij) - d_j) to r_i - 1; columns: (j, k)."""
    cols = _columns(inst)
    blocks = []
    for i, row in enumerate(inst.A):
        lows = [
            row[j].lead_exp - d
            for j, d in enumerate(inst.deg_bounds)
            if d >= 0 and not row[j].is_zero
        ]
        if not lows:
            continue
        lo = min(lows)
        hi = inst.r[i]
        if lo >= hi:
            continue
        blk = np.zeros((hi - lo, len(cols)), dtype=np.int64)
        for c, (j, k) in enumerate(cols):
            a = row[j]
            if a.is_zero:
                continue
            for e in range(lo, hi):
                blk[e - lo, c] = a.coeff(e + k)
        blocks.append(blk)
    if not blocks:
        return np.zeros((0, len(cols)), dtype=np.int64)
    return np.vstack(blocks)


def _unpack(inst: GammaInstance, vec: np.ndarray) -> IntegralPoint:
    F = inst.field
    coords = []
    pos = 0
    for d in inst.deg_bounds:
        if d < 0:
            coords.append(F.poly())
        else:
            coords.append(F.poly([int(v) for v in vec[pos:pos + d + 1]]))
            pos += d + 1
    return IntegralPoint(coords)


def solve_gamma(inst: GammaInstance) -> IntegralPoint | None:
    """A nonzero point of the system within the degree bounds, or None if there is none."""
    inst.check_precision()
    M = system_matrix(inst)
    vec = first_kernel_vector(M, inst.field.p)
    if vec is None:
        return None
    return _unpack(inst, vec)


def linear_form(row: Sequence[LaurentSeries], x: Sequence[Poly]) -> LaurentSeries:
    """sum_j row[j] * x[j] by series arithmetic."""
    acc = LaurentSeries.exact(x[0].field.poly())
    for a, c in zip(row, x):
        if c:
            acc = acc + a * c
    return acc


def form_valuations(A, x: Sequence[Poly]) -> list[QExponent]:
    return [valuation(linear_form(row, x)) for row in A]


def check_point(inst: GammaInstance, x: IntegralPoint) -> bool:
    """Independent re-check of a solution with series arithmetic."""
    if x.is_zero:
        return False
    for j, c in enumerate(x):
        if c and c.degree > inst.deg_bounds[j]:
            return False
    for v, r in zip(form_valuations(inst.A, list(x)), inst.r):
        if v.is_zero:
            continue
        # a zero-to-precision value counts: its certified bound is what we compare
        if v.exp < r:
            return False
    return True


# ---------------------------------------------------------------- square systems

def det(A) -> LaurentSeries:
    """Leibniz expansion; fine for the small n used here."""
    n = len(A)
    F = A[0][0].field
    total = LaurentSeries.exact(F.poly())
    for perm in permutations(range(n)):
        inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = LaurentSeries.exact(F.const(1))
        for i in range(n):
            term = term * A[i][perm[i]]
        total = total - term if inversions % 2 else total + term
    return total


def _minor(A, i, j):
    return [[A[a][b] for b in range(len(A)) if b != j] for a in range(len(A)) if a != i]


def inverse(A):
    """Cofactor inverse; raises if det A vanishes to precision."""
    n = len(A)
    d = det(A)
    if d.is_zero:
        raise PrecisionError("determinant vanishes to the available precision")
    if n == 1:
        return [[1 / A[0][0]]]
    dinv = 1 / d
    B = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            c = det(_minor(A, i, j)) * dinv
            B[j][i] = -c if (i + j) % 2 else c
    return B


def square_degree_bounds(A, r: Sequence[int]) -> list[int]:
    """Degree bounds forced on any solution of the square system: x = A^{-1} L(x).

    d_j = max_i(-v(B_ji) - r_i), where B = A^{-1}; -1 means x_j must vanish.
    """
    B = inverse(A)
    n = len(A)
    out = []
    for j in range(n):
        best = -1
        for i in range(n):
            if B[j][i].is_zero:
                continue
            best = max(best, -B[j][i].lead_exp - r[i])
        out.append(max(best, -1))
    return out


# ---------------------------------------------------------------- constructors

def _aux_bound(row: Sequence[LaurentSeries], degs: Sequence[int]) -> int:
    """Degree allowance for y_i when y_i + sum_j theta_ij x_j must be small."""
    worst = 0
    for a, d in zip(row, degs):
        if d < 0 or a.is_zero:
            continue
        worst = max(worst, d - a.lead_exp)
    return worst


def _augment(Theta, r: Sequence[int], degs: Sequence[int]) -> GammaInstance:
    """Rows theta_i . x + y_i with x-degrees ``degs`` and one free y_i per row."""
    n = len(Theta)
    F = Theta[0][0].field
    one = LaurentSeries.exact(F.const(1))
    nil = LaurentSeries.exact(F.poly())
    A = []
    for i, row in enumerate(Theta):
        A.append(list(row) + [one if k == i else nil for k in range(n)])
    ydeg = [_aux_bound(row, degs) for row in Theta]
    return GammaInstance(A, list(r), list(degs) + ydeg)


def _solve_or_fail(inst: GammaInstance, what: str) -> IntegralPoint:
    sol = solve_gamma(inst)
    if sol is None:
        # the counting argument makes this impossible; reaching it is a bug
        from .errors import VerificationError
        raise VerificationError(f"{what}: the linear system unexpectedly has only the zero solution")
    return sol


def _as_series(theta) -> LaurentSeries:
    if isinstance(theta, LaurentSeries):
        return theta
    return LaurentSeries.exact(theta)


def dirichlet_single(theta: LaurentSeries, h: int) -> Poly:
    """x with ||x theta|| <= q^-h and 1 <= |x| < q^h.

    Rows: v(x theta + y) >= h and v(x) >= 1 - h.
    """
    if h < 1:
        raise DomainError("h must be >= 1")
    theta = _as_series(theta)
    F = theta.field
    one = LaurentSeries.exact(F.const(1))
    nil = LaurentSeries.exact(F.poly())
    dx = h - 1
    inst = GammaInstance([[theta, one], [one, nil]], [h, 1 - h], [dx, _aux_bound([theta], [dx])])
    sol = _solve_or_fail(inst, "dirichlet_single")
    return sol[0]


def dirichlet_simultaneous(thetas: Sequence[LaurentSeries], h: int) -> Poly:
    """x with every ||x theta_i|| <= q^-(floor(h/n)+1) and 1 <= |x| <= q^h."""
    if h < 0:
        raise DomainError("h must be >= 0")
    thetas = [_as_series(t) for t in thetas]
    n = len(thetas)
    R = h // n + 1
    inst = _augment([[t] for t in thetas], [R] * n, [h])
    return _solve_or_fail(inst, "dirichlet_simultaneous")[0]


def simultaneous_target(n: int, h: int) -> int:
    return h // n + 1


def transpose_form(thetas: Sequence[LaurentSeries], h: int) -> IntegralPoint:
    """(x_1..x_n) with ||sum x_i theta_i|| <= q^-(n(h+1)) and 1 <= max|x_i| <= q^h."""
    if h < 0:
        raise DomainError("h must be >= 0")
    thetas = [_as_series(t) for t in thetas]
    n = len(thetas)
    inst = _augment([thetas], [n * (h + 1)], [h] * n)
    sol = _solve_or_fail(inst, "transpose_form")
    return IntegralPoint(sol.coords[:n])


def transpose_target(n: int, h: int) -> int:
    return n * (h + 1)


def general_target(n: int, m: int, h: int) -> int:
    return (m * h + m - 1) // n + 1


def general_linear_forms(Theta, h: int) -> IntegralPoint:
    """x in K^m with every ||L_i(x)|| <= q^-(floor((mh+m-1)/n)+1) and 1 <= max|x_j| <= q^h.

    L_i(x) = sum_j Theta[i][j] x_j.
    """
    if h < 0:
        raise DomainError("h must be >= 0")
    Theta = [[_as_series(a) for a in row] for row in Theta]
    n, m = len(Theta), len(Theta[0])
    R = general_target(n, m, h)
    inst = _augment(Theta, [R] * n, [h] * m)
    sol = _solve_or_fail(inst, "general_linear_forms")
    return IntegralPoint(sol.coords[:m])


def general_promised_exponent(n: int, m: int, h: int) -> Fraction:
    """The fractional exponent m(h+1)/n that the integer target implies."""
    return Fraction(m * (h + 1), n)


def flexible_bounds(Theta, t: Sequence[int], delta: Sequence[int]) -> IntegralPoint:
    """x with ||L_i(x)|| <= q^-(t_i+1+delta_i) and |x_j| <= q^t_{n+j}.

    Needs sum_{i<=n} t_i = sum_j t_{n+j} and sum delta_i <= m - 1.
    """
    Theta = [[_as_series(a) for a in row] for row in Theta]
    n, m = len(Theta), len(Theta[0])
    t = [int(v) for v in t]
    delta = [int(v) for v in delta]
    if len(t) != n + m:
        raise DomainError(f"t must have n+m = {n + m} entries, got {len(t)}")
    if len(delta) != n:
        raise DomainError(f"delta must have n = {n} entries, got {len(delta)}")
    if any(v < 0 for v in t) or any(v < 0 for v in delta):
        raise DomainError("t and delta must be nonnegative")
    if sum(t[:n]) != sum(t[n:]):
        raise DomainError(f"balance condition fails: sum of first n t's = {sum(t[:n])}, last m = {sum(t[n:])}")
    if sum(delta) > m - 1:
        raise DomainError(f"sum(delta) = {sum(delta)} exceeds m - 1 = {m - 1}")
    r = [1 + t[i] + delta[i] for i in range(n)]
    inst = _augment(Theta, r, t[n:])
    sol = _solve_or_fail(inst, "flexible_bounds")
    return IntegralPoint(sol.coords[:m])


def frac_exponents(Theta, x: Sequence[Poly]) -> list[QExponent]:
    """||L_i(x)|| for each row, recomputed with series arithmetic."""
    return [frac_norm(linear_form(row, list(x))) for row in Theta]


def worst_exponent(norms: Sequence[QExponent]) -> QExponent:
    """max_i of the values, i.e. the smallest exponent."""
    return max(norms)
