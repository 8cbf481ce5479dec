"""Transfer of good integral points from linear forms L_i to the transposed forms M_j.

L_i(x) = sum_j theta_ij x_j (n forms in m unknowns), M_j(y) = sum_i theta_ij y_i.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DomainError, VerificationError
from .laurent import LaurentSeries, QExponent, frac_norm, integral_part, is_polynomial, valuation
from .linforms import GammaInstance, IntegralPoint, linear_form, solve_gamma, square_degree_bounds
from .ring import Poly


def _exact(a) -> LaurentSeries:
    return a if isinstance(a, LaurentSeries) else LaurentSeries.exact(a)


def bilinear_matrix(f_forms, g_forms) -> list[list[Poly]]:
    """P with sum_i f_i(z) g_i(w) = z^T P w, checked to be polynomial and rounded.

    The check is only as strong as the working precision of the inputs.
    """
    l = len(f_forms)
    P = []
    for a in range(l):
        row = []
        for b in range(l):
            s = LaurentSeries.exact(f_forms[0][0].field.poly())
            for i in range(l):
                s = s + f_forms[i][a] * g_forms[i][b]
            # frac_norm raises when fewer than one fractional digit is certified;
            # a fractional part that vanishes to precision is accepted
            if is_polynomial(s) is False:
                raise VerificationError(
                    f"bilinear coefficient ({a},{b}) is not a polynomial: fractional part {frac_norm(s)}"
                )
            row.append(integral_part(s))
        P.append(row)
    return P


def bilinear_target(d_val: int, l: int, lam_exp: int) -> int:
    """floor((v(d) + l + lambda_exp - 2)/(l - 1))."""
    return (d_val + l + lam_exp - 2) // (l - 1)


def transfer_step(f_forms, g_forms, d_val: int, z: Sequence[Poly], lam_exp: int,
                   deg_bounds: Sequence[int] | None = None) -> IntegralPoint:
    """Nonzero w with v(g_i(w)) >= floor((v(d)+l+lambda_exp-2)/(l-1)) for all i.

    ``f_forms``/``g_forms`` are l x l coefficient matrices; ``z`` must satisfy
    v(f_i(z)) >= lam_exp.  ``deg_bounds`` for w default to the bounds forced by
    the square system.
    """
    l = len(f_forms)
    if l < 2:
        raise DomainError("the transfer needs at least two forms")
    f_forms = [[_exact(a) for a in row] for row in f_forms]
    g_forms = [[_exact(a) for a in row] for row in g_forms]
    z = list(z)
    if all(not c for c in z):
        raise DomainError("z must be nonzero")
    fz = [valuation(linear_form(row, z)) for row in f_forms]
    for i, v in enumerate(fz):
        if not v.is_zero and v.exp < lam_exp:
            raise DomainError(f"f_{i}(z) has valuation {v.exp} < {lam_exp}")
    P = bilinear_matrix(f_forms, g_forms)
    F = z[0].field
    psi_row = []
    for b in range(l):
        acc = F.poly()
        for a in range(l):
            acc = acc + z[a] * P[a][b]
        psi_row.append(LaurentSeries.exact(acc))
    if all(c.is_zero for c in psi_row):
        raise VerificationError("psi(z, .) vanishes identically; forms are dependent")
    # drop the row whose f_i(z) is smallest in valuation
    i0 = min(range(l), key=lambda i: fz[i]._key())
    target = bilinear_target(d_val, l, lam_exp)
    A = [psi_row] + [g_forms[i] for i in range(l) if i != i0]
    r = [1] + [target] * (l - 1)
    if deg_bounds is None:
        deg_bounds = square_degree_bounds(A, r)
    inst = GammaInstance(A, r, list(deg_bounds))
    w = solve_gamma(inst)
    if w is None:
        raise VerificationError("transfer system has only the zero solution")
    # post-hoc: psi(z, w) = 0 and every g_i(w), including the dropped one, meets the target
    if not linear_form(psi_row, list(w)).is_zero:
        raise VerificationError("psi(z, w) is not zero")
    for i, row in enumerate(g_forms):
        v = valuation(linear_form(row, list(w)))
        if not v.is_zero and v.exp < target:
            raise VerificationError(f"g_{i}(w) has valuation {v.exp} < {target}")
    return w


@dataclass
class TransferCertificate:
    y: IntegralPoint
    u: IntegralPoint
    D_exp: int
    Y_exp: int
    promised_D_exp: Fraction
    promised_Y_exp: Fraction
    achieved_norms: list
    achieved_height: QExponent
    C_exp: int
    X_exp: int

    def to_json(self) -> dict:
        from .laurent import exp_to_json

        return {
            "y": self.y.to_json(),
            "u": self.u.to_json(),
            "C_exp": self.C_exp,
            "X_exp": self.X_exp,
            "D_exp": self.D_exp,
            "Y_exp": self.Y_exp,
            "promised_D_exp": exp_to_json(self.promised_D_exp),
            "promised_Y_exp": exp_to_json(self.promised_Y_exp),
            "achieved_norms": [v.to_json() for v in self.achieved_norms],
            "achieved_height": self.achieved_height.to_json(),
        }


def transposed(Theta):
    n, m = len(Theta), len(Theta[0])
    return [[Theta[i][j] for i in range(n)] for j in range(m)]


def transfer(Theta, x: Sequence[Poly], C_exp: int, X_exp: int) -> TransferCertificate:
    """From x with ||L_i(x)|| <= q^-C_exp and |x_j| <= q^X_exp, a nonzero y for the M_j.

    Returns y with ||M_j(y)|| <= q^-D_exp and |y_i| <= q^Y_exp where, for l = n+m,
    D_exp = floor((n C + (n-1) X + l - 2)/(l-1)) and Y_exp is the matching ceiling.
    """
    Theta = [[_exact(a) for a in row] for row in Theta]
    n, m = len(Theta), len(Theta[0])
    l = n + m
    x = list(x)
    if len(x) != m:
        raise DomainError(f"x has {len(x)} coordinates, expected {m}")
    if C_exp < 1:
        raise DomainError(f"C_exp must be >= 1 (|C| <= 1/q), got {C_exp}")
    if X_exp < 0:
        raise DomainError(f"X_exp must be >= 0 (|X| >= 1), got {X_exp}")
    if all(not c for c in x):
        raise DomainError("x must be nonzero")
    for j, c in enumerate(x):
        if c and c.degree > X_exp:
            raise DomainError(f"|x_{j}| = q^{c.degree} exceeds q^{X_exp}")
    Lx = [linear_form(row, x) for row in Theta]
    for i, s in enumerate(Lx):
        v = frac_norm(s)
        if not v.is_zero and v.exp < C_exp:
            raise DomainError(f"||L_{i}(x)|| = {v} exceeds q^-{C_exp}")
    F = x[0].field
    one = F.const(1)
    nil = LaurentSeries.exact(F.poly())
    Cinv = LaurentSeries.exact(F.monomial(C_exp))            # T^C_exp
    Cval = LaurentSeries.exact(F.monomial(0)) / Cinv          # (1/T)^C_exp
    Xval = LaurentSeries.exact(F.monomial(X_exp))
    Xinv = LaurentSeries.exact(one) / Xval
    # z = (x_1..x_m, w_1..w_n); w' = (y_1..y_n, u_1..u_m)
    f_forms = []
    for i in range(n):
        f_forms.append([Cinv * Theta[i][j] for j in range(m)] + [Cinv if k == i else nil for k in range(n)])
    for j in range(m):
        f_forms.append([Xinv if k == j else nil for k in range(m)] + [nil] * n)
    g_forms = []
    for i in range(n):
        g_forms.append([Cval if k == i else nil for k in range(n)] + [nil] * m)
    for j in range(m):
        g_forms.append([-(Xval * Theta[i][j]) for i in range(n)] + [Xval if k == j else nil for k in range(m)])
    w_int = [-integral_part(s) for s in Lx]
    z = x + w_int
    d_val = n * C_exp - m * X_exp
    target = bilinear_target(d_val, l, 0)
    y_deg = C_exp - target
    u_deg = []
    for j in range(m):
        lows = [Theta[i][j].lead_exp for i in range(n) if not Theta[i][j].is_zero]
        u_deg.append(max(0, y_deg - min(lows)) if lows else 0)
    sol = transfer_step(f_forms, g_forms, d_val, z, 0, [y_deg] * n + u_deg)
    y = IntegralPoint(sol.coords[:n])
    u = IntegralPoint(sol.coords[n:])
    D_exp = target + X_exp
    Y_exp = C_exp - target
    if D_exp < 1:
        raise VerificationError(f"degenerate transfer bound D_exp = {D_exp}")
    if y.is_zero:
        raise VerificationError("transfer produced y = 0")
    norms = [frac_norm(linear_form(row, list(y))) for row in transposed(Theta)]
    for j, v in enumerate(norms):
        if not v.is_zero and v.exp < D_exp:
            raise VerificationError(f"||M_{j}(y)|| = {v} misses q^-{D_exp}")
    height = y.height()
    if y.max_degree() > Y_exp:
        raise VerificationError(f"|y| = q^{y.max_degree()} exceeds q^{Y_exp}")
    promised_D = Fraction(n * C_exp + (n - 1) * X_exp + l - 2, l - 1)
    promised_Y = Fraction((m - 1) * C_exp + m * X_exp + 2 - l, l - 1)
    return TransferCertificate(y, u, D_exp, Y_exp, promised_D, promised_Y, norms, height, C_exp, X_exp)


@dataclass
class ProductBoundReport:
    n: int
    m: int
    search_deg: int
    x_exp: object      # max exponent of (max||L_i(x)||)^n (max|x_j|)^m, None for zero
    y_exp: object
    x_witness: list
    y_witness: list
    r_exp: int
    x_side_holds: bool
    implied_delta_exp: int
    y_side_holds: bool
    consistent: bool

    def to_json(self) -> dict:
        from .laurent import exp_to_json

        return {
            "n": self.n,
            "m": self.m,
            "search_deg": self.search_deg,
            "x_exp": exp_to_json(self.x_exp),
            "y_exp": exp_to_json(self.y_exp),
            "x_witness": self.x_witness,
            "y_witness": self.y_witness,
            "r_exp": self.r_exp,
            "x_side_holds": self.x_side_holds,
            "implied_delta_exp": self.implied_delta_exp,
            "y_side_holds": self.y_side_holds,
            "consistent": self.consistent,
        }


def check_product_bounds(Theta, r_exp: int, search_deg: int) -> ProductBoundReport:
    """Empirical look at the product lower bounds for L and for its transpose.

    x_exp is the largest exponent e with q^-e = (max||L_i(x)||)^n (max|x_j|)^m over the
    search; the bound with |r| = q^-r_exp holds at this scale iff x_exp <= r_exp.  The
    transpose side is tested with delta_exp = (l-1) r_exp - (l-2) l.  ``consistent``
    checks the two observed minima against each other with the same relation.
    """
    from .oracle import product_minimum

    Theta = [[_exact(a) for a in row] for row in Theta]
    n, m = len(Theta), len(Theta[0])
    l = n + m
    ex, wx = product_minimum(Theta, search_deg)
    ey, wy = product_minimum(transposed(Theta), search_deg)

    def le(a, b):
        # a <= b with None meaning +infinity (a zero value)
        if a is None:
            return b is None
        return b is None or a <= b

    def rel(e):
        return None if e is None else (l - 1) * e - (l - 2) * l

    delta_exp = (l - 1) * r_exp - (l - 2) * l
    consistent = le(ex, rel(ey)) and le(ey, rel(ex))
    return ProductBoundReport(
        n, m, search_deg, ex, ey, wx, wy, r_exp,
        le(ex, r_exp), delta_exp, le(ey, delta_exp), consistent,
    )
