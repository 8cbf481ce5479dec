"""Binary quadratic forms a x^2 + b xy + c y^2 over F_p[T].

Matrices act on row vectors: X S = (s11 x + s21 y, s12 x + s22 y) for
S = ((s11, s12), (s21, s22)).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebraic import QuadraticSurd, surd_to_series
from .cfrac import cf_surd, convergents, tau_of_surd
from .errors import DomainError, PrecisionError, VerificationError
from .laurent import LaurentSeries, QExponent, valuation
from .ring import Poly, ext_gcd, format_poly, is_square


@dataclass(frozen=True)
class BinaryQuadraticForm:
    a: Poly
    b: Poly
    c: Poly

    def __post_init__(self):
        F = self.a.field
        F.require_odd("binary quadratic forms")
        if not self.a:
            raise DomainError("leading coefficient a must be nonzero")
        if is_square(self.delta) is not None:
            raise DomainError(f"discriminant {format_poly(self.delta)} is a perfect square")

    @property
    def field(self):
        return self.a.field

    @property
    def delta(self) -> Poly:
        return self.b * self.b - (self.a * self.c).scale(4)

    def __call__(self, x: Poly, y: Poly) -> Poly:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def scaled(self, k: Poly) -> "BinaryQuadraticForm":
        return BinaryQuadraticForm(self.a * k, self.b * k, self.c * k)

    def substitute(self, S) -> "BinaryQuadraticForm":
        """f(X S)."""
        (s11, s12), (s21, s22) = S
        A = self(s11, s12)
        C = self(s21, s22)
        B = (self.a * s11 * s21).scale(2) + self.b * (s11 * s22 + s21 * s12) + (self.c * s12 * s22).scale(2)
        return BinaryQuadraticForm(A, B, C)

    def to_json(self) -> dict:
        return {
            "a": format_poly(self.a),
            "b": format_poly(self.b),
            "c": format_poly(self.c),
            "delta": format_poly(self.delta),
        }

    def __str__(self):
        return f"{format_poly(self.a)};{format_poly(self.b)};{format_poly(self.c)}"


def parse_form(text: str, field) -> BinaryQuadraticForm:
    """``<a>;<b>;<c>``."""
    from .errors import ParseError
    from .ring import parse_poly

    parts = text.split(";")
    if len(parts) != 3:
        raise ParseError("form must be '<a>;<b>;<c>'", text, 0)
    return BinaryQuadraticForm(*(parse_poly(t, field) for t in parts))


def half_deg_delta(f: BinaryQuadraticForm) -> int:
    d = f.delta.degree
    if d % 2:
        raise DomainError(f"deg delta = {d} is odd; the roots are not in k_inf")
    return d // 2


@dataclass(frozen=True)
class FormRoots:
    theta: QuadraticSurd
    phi: QuadraticSurd


def roots(f: BinaryQuadraticForm) -> FormRoots:
    """(-b +- sqrt(delta))/(2a); theta carries the canonical branch."""
    half_deg_delta(f)
    P = -f.b
    Q = f.a.scale(2)
    return FormRoots(QuadraticSurd(P, Q, f.delta, 1), QuadraticSurd(P, Q, f.delta, -1))


def form_of_surd(alpha: QuadraticSurd) -> BinaryQuadraticForm:
    """An integral form whose root theta is ``alpha``."""
    P, Q = alpha.folded()
    # alpha = (P + sqrt D)/Q is a root of Q x^2 - 2P x + (P^2 - D)/Q
    c, rem = divmod(P * P - alpha.D, Q)
    if rem:
        raise VerificationError("surd is not normalized")
    f = BinaryQuadraticForm(Q, -P.scale(2), c)
    th = roots(f).theta
    N = 8 + 2 * abs(Q.degree) + alpha.D.degree
    if (surd_to_series(th, N) - surd_to_series(alpha, N)).is_zero:
        return f
    g = BinaryQuadraticForm(-f.a, -f.b, -f.c)
    if not (surd_to_series(roots(g).theta, N) - surd_to_series(alpha, N)).is_zero:
        raise VerificationError("could not match the surd to a root of its form")
    return g


# ---------------------------------------------------------------- sigma by enumeration

def _conv_rows(X: np.ndarray, c: Poly, p: int, width: int) -> np.ndarray:
    """Each row of X (coefficients) times the fixed polynomial c, padded to ``width``."""
    out = np.zeros((X.shape[0], width), dtype=np.int64)
    for k, ck in enumerate(c.coeffs if c else ()):
        if ck:
            out[:, k:k + X.shape[1]] += ck * X
    return out % p


def _square_rows(X: np.ndarray, p: int) -> np.ndarray:
    n = X.shape[1]
    out = np.zeros((X.shape[0], 2 * n - 1), dtype=np.int64)
    for i in range(n):
        out[:, i:i + n] += X[:, i:i + 1] * X
    return out % p


def _degrees(V: np.ndarray) -> np.ndarray:
    nz = V != 0
    has = nz.any(axis=1)
    return np.where(has, V.shape[1] - 1 - np.argmax(nz[:, ::-1], axis=1), -1)


@dataclass
class SigmaSearch:
    exp: int                # sigma = q^-exp, i.e. exp = max v(f(x, y)) = -min deg f(x, y)
    witness: tuple
    deg_bound: int
    pairs: int


def sigma_bruteforce(f: BinaryQuadraticForm, deg_bound: int | None = None) -> SigmaSearch:
    """min |f(x, y)| over nonzero pairs with deg x, deg y <= deg_bound.

    Unit scaling multiplies f by a square unit, so y runs over monic
    polynomials (plus y = 0 with x = 1).
    """
    B = half_deg_delta(f) + 2 if deg_bound is None else deg_bound
    return _sigma_search(f, B)


@lru_cache(maxsize=256)
def _sigma_search(f: BinaryQuadraticForm, B: int) -> SigmaSearch:
    from .oracle import all_vectors, monic_vectors

    F = f.field
    p = F.p
    X = all_vectors(p, B + 1)
    width = 2 * B + 1 + max(f.a.degree, f.b.degree, f.c.degree, 0)
    aX2 = _conv_rows(_square_rows(X, p), f.a, p, width)
    best = f.a.degree
    wit = (F.const(1), F.poly())
    pairs = 1
    step = max(1, (1 << 18) // X.shape[0])
    # f(x, y) is a nonzero polynomial at every nonzero pair, so degree 0 is optimal
    for d in range(B + 1):
        if best == 0:
            break
        Ys = monic_vectors(p, d)
        for s0 in range(0, Ys.shape[0], step):
            if best == 0:
                break
            Yc = Ys[s0:s0 + step]
            ny = Yc.shape[0]
            bY = _conv_rows(Yc, f.b, p, width)
            cYY = _conv_rows(_square_rows(Yc, p), f.c, p, width)
            V = np.broadcast_to(aX2, (ny,) + aX2.shape) + cYY[:, None, :]
            V = np.array(V)
            lb = max(f.b.degree, 0) + d + 1
            for k in range(lb):
                col = bY[:, k]
                if not col.any():
                    continue
                V[:, :, k:k + B + 1] += col[:, None, None] * X[None, :, :]
            V %= p
            flat = V.reshape(-1, width)
            degs = _degrees(flat)
            if (degs < 0).any():
                raise VerificationError("f vanished at a nonzero pair; discriminant check failed")
            k = int(np.argmin(degs))
            pairs += flat.shape[0]
            if degs[k] < best:
                best = int(degs[k])
                iy, ix = divmod(k, X.shape[0])
                wit = (F.poly(X[ix].tolist()), F.poly(Yc[iy].tolist()))
    return SigmaSearch(-best, wit, B, pairs)


# ---------------------------------------------------------------- sigma / tau through the expansion

def tau_theta(f: BinaryQuadraticForm, check: bool = True) -> QExponent:
    """tau(theta) from the period of theta's expansion, checked against enumeration of sigma."""
    th = roots(f).theta
    tau = tau_of_surd(th)
    if check:
        s = sigma_bruteforce(f)
        if tau.exp != s.exp + half_deg_delta(f):
            raise VerificationError(
                f"tau exponent {tau.exp} from the expansion disagrees with sigma exponent {s.exp} "
                f"+ deg(delta)/2 = {half_deg_delta(f)} from enumeration (bound {s.deg_bound})"
            )
    return tau


def sigma(f: BinaryQuadraticForm, check: bool = True) -> QExponent:
    """sigma(f) = |delta|^(1/2) tau(theta), with the enumeration cross-check."""
    tau = tau_theta(f, check=check)
    return QExponent(tau.exp - half_deg_delta(f))


def largest_quotient_degree(f: BinaryQuadraticForm) -> dict:
    """D(theta) = max partial-quotient degree over the period, checked as deg(delta)/2 + t(f)."""
    th = roots(f).theta
    exp = cf_surd(th)
    D = max(a.degree for a in exp.period_quotients())
    s = sigma_bruteforce(f)
    h = half_deg_delta(f)
    if D != h + s.exp:
        raise VerificationError(f"D = {D} but deg(delta)/2 + t(f) = {h} + {s.exp}")
    return {"D": D, "half_deg_delta": h, "t": s.exp, "witness": [format_poly(s.witness[0]), format_poly(s.witness[1])]}


def tau_witnesses(f: BinaryQuadraticForm, max_deg: int, prec: int | None = None) -> list[Poly]:
    """Monic Q, deg Q <= max_deg, with |Q| ||Q theta|| = tau(theta)."""
    from .oracle import FormDigits, monic_vectors

    th = roots(f).theta
    t = tau_of_surd(th).exp
    N = prec or (2 * max_deg + t + 4)
    series = surd_to_series(th, N)
    out = []
    for d in range(max_deg + 1):
        X = monic_vectors(f.field.p, d)
        e, sure = FormDigits([series], [d], t + d + 1).exponents(X)
        for k in np.flatnonzero(sure & (e - d == t)):
            out.append(f.field.poly(X[k].tolist()))
    return out


@dataclass
class LowerBoundCheck:
    tested: int
    applicable: int
    exceptions: list
    tau_exp: int

    def to_json(self) -> dict:
        return {
            "tested": self.tested,
            "applicable": self.applicable,
            "exceptions": [format_poly(q) for q in self.exceptions],
            "tau_exp": self.tau_exp,
        }


def conditional_lower_bound(f: BinaryQuadraticForm, max_deg: int, sigma_exp: int | None = None) -> LowerBoundCheck:
    """For monic Q, deg Q <= max_deg: if ||Q theta|| < |theta - phi| |Q| then
    |Q| ||Q theta|| >= |delta|^(-1/2) sigma.  Returns every exception."""
    from .oracle import FormDigits, monic_vectors

    th = roots(f).theta
    h = half_deg_delta(f)
    if sigma_exp is None:
        sigma_exp = sigma_bruteforce(f).exp
    tau_exp = sigma_exp + h
    # exponent of |theta - phi| = |sqrt(delta)/a|
    gap = f.a.degree - h
    N = max_deg + max(tau_exp, gap + max_deg) + 4
    series = surd_to_series(th, N + max_deg + 2)
    tested = applicable = 0
    bad = []
    for d in range(max_deg + 1):
        X = monic_vectors(f.field.p, d)
        e, sure = FormDigits([series], [d]).exponents(X)
        tested += X.shape[0]
        # hypothesis: e > gap - d ; conclusion: e - d <= tau_exp
        need = max(gap - d + 1, tau_exp + d + 1)
        if not sure.all() and ((~sure) & (e <= need)).any():
            raise PrecisionError("fractional norms not resolved deep enough")
        hyp = e > gap - d
        applicable += int(hyp.sum())
        for k in np.flatnonzero(hyp & (e - d > tau_exp)):
            bad.append(f.field.poly(X[k].tolist()))
    return LowerBoundCheck(tested, applicable, bad, tau_exp)


# ---------------------------------------------------------------- reduction

def reduce_with_representation(f: BinaryQuadraticForm, a0: Poly, b0: Poly):
    """(g, S) with g = f(X S), S = ((a0, b0), (c1, d1)), a0 d1 - b0 c1 = 1 and deg b' < deg a'.

    g has leading coefficient f(a0, b0).
    """
    g_, u, v = ext_gcd(a0, b0)
    if g_.degree != 0:
        raise DomainError(f"gcd({format_poly(a0)}, {format_poly(b0)}) = {format_poly(g_)} is not 1")
    alpha = f(a0, b0)
    if not alpha:
        raise DomainError("f(a0, b0) = 0")
    F = f.field
    # u a0 + v b0 = 1  ->  d = u, c = -v
    c, d = -v, u
    S = ((a0, b0), (c, d))
    g = f.substitute(S)
    A = -(g.b // g.a)
    half = F.inv(2)
    c1 = c + (A * a0).scale(half)
    d1 = d + (A * b0).scale(half)
    S1 = ((a0, b0), (c1, d1))
    g1 = f.substitute(S1)
    if a0 * d1 - b0 * c1 != F.const(1):
        raise VerificationError("reduction matrix lost determinant 1")
    if g1.b and g1.b.degree >= g1.a.degree:
        raise VerificationError("reduction did not shrink the middle coefficient")
    if g1.delta != f.delta:
        raise VerificationError("reduction changed the discriminant")
    return g1, S1


# ---------------------------------------------------------------- automorphs

@dataclass
class Automorph:
    """X T = (a x + b y, c x + d y) with det 1, fixing f and scaling L = x - theta y by eta."""

    a: Poly
    b: Poly
    c: Poly
    d: Poly
    eta: LaurentSeries
    eta_exp: int

    @property
    def matrix(self):
        return ((self.a, self.c), (self.b, self.d))

    def apply(self, x: Poly, y: Poly, n: int = 1) -> tuple[Poly, Poly]:
        if n < 0:
            inv = Automorph(self.d, -self.b, -self.c, self.a, self.eta, -self.eta_exp)
            return inv.apply(x, y, -n)
        for _ in range(n):
            x, y = self.a * x + self.b * y, self.c * x + self.d * y
        return x, y

    def to_json(self) -> dict:
        return {
            "a": format_poly(self.a),
            "b": format_poly(self.b),
            "c": format_poly(self.c),
            "d": format_poly(self.d),
            "eta_exp": self.eta_exp,
        }


def _mat_mul(A, B):
    return (
        (A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
        (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]),
    )


def automorph(f: BinaryQuadraticForm, prec: int = 40) -> Automorph:
    """Automorph from the periodic expansion of theta.

    If theta = [a_0, ..., a_{k-1}, A_k] and A_k = A_{k+m}, then theta is fixed by the
    Moebius map M = C_{k+m-1} adj(C_{k-1}), C_n = ((P_n, P_{n-1}), (Q_n, Q_{n-1})).
    det M = (-1)^m, so an odd period is doubled.
    """
    F = f.field
    th = roots(f).theta
    exp = cf_surd(th)
    k, m = exp.preperiod, exp.period
    if m % 2:
        m *= 2
    conv = convergents(exp.take(k + m))
    one, nil = F.const(1), F.poly()

    def C(n):
        if n == -1:
            return ((one, nil), (nil, one))
        P1, Q1 = conv[n]
        P0, Q0 = conv[n - 1] if n >= 1 else (one, nil)
        return ((P1, P0), (Q1, Q0))

    Ck = C(k - 1)
    adj = ((Ck[1][1], -Ck[0][1]), (-Ck[1][0], Ck[0][0]))
    M = _mat_mul(C(k + m - 1), adj)
    (m11, m12), (m21, m22) = M
    if m11 * m22 - m12 * m21 != one:
        raise VerificationError("period matrix does not have determinant 1")
    a, b, c, d = m22, -m12, -m21, m11
    theta = surd_to_series(th, prec)
    eta = -(theta * c) + a
    v = valuation(eta)
    if v.at_least:
        raise PrecisionError("eta vanishes to working precision")
    if v.exp == 0:
        raise VerificationError("automorph multiplier has |eta| = 1")
    if v.exp < 0:
        a, b, c, d = d, -b, -c, a
        eta = -(theta * c) + a
        v = valuation(eta)
    T = Automorph(a, b, c, d, eta, v.exp)
    verify_automorph(f, T, theta)
    return T


def verify_automorph(f: BinaryQuadraticForm, T: Automorph, theta: LaurentSeries):
    F = f.field
    if T.a * T.d - T.b * T.c != F.const(1):
        raise VerificationError("automorph determinant is not 1")
    if f.substitute(T.matrix) != f:
        raise VerificationError("automorph does not fix the form")
    # L(XT) = (a - theta c) x + (b - theta d) y must equal eta (x - theta y)
    r1 = -(theta * T.c) + T.a - T.eta
    r2 = -(theta * T.d) + T.b + T.eta * theta
    for r in (r1, r2):
        if not r.is_zero:
            raise VerificationError(f"L(XT) != eta L(X): residual valuation {valuation(r)}")
    if T.eta_exp < 1:
        raise VerificationError(f"eta exponent {T.eta_exp} is not >= 1")


def linear_factor(theta: LaurentSeries, x: Poly, y: Poly) -> LaurentSeries:
    """L(x, y) = x - theta y."""
    return -(theta * y) + x
