"""Quadratic surds (P + s*sqrt(D))/Q and Newton lifting of simple roots."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, ParseError, PrecisionError
from .laurent import LaurentSeries, mul, sqrt
from .ring import FieldConfig, Poly, RationalFn, format_poly, is_square, parse_poly


@dataclass(frozen=True)
class QuadraticSurd:
    """alpha = (P + sign*sqrt(D)) / Q, sqrt(D) being the canonical branch.

    Construction checks that sqrt(D) lives in k_inf and is irrational, and
    rescales (P, Q, D) by Q so that Q divides D - P^2.
    """

    P: Poly
    Q: Poly
    D: Poly
    sign: int = 1

    def __post_init__(self):
        F = self.D.field
        F.require_odd("quadratic surds")
        if self.sign not in (1, -1):
            raise DomainError("sign must be +1 or -1")
        if not self.Q:
            raise DomainError("surd with Q = 0")
        D = self.D
        if not D or D.degree % 2:
            raise DomainError(f"sqrt({format_poly(D)}) is not in k_inf: odd degree")
        s0 = F.sqrt(D.lc)
        if s0 is None:
            raise DomainError(f"sqrt({format_poly(D)}) is not in k_inf: leading coefficient is a non-residue")
        if is_square(D) is not None:
            raise DomainError(f"{format_poly(D)} is a perfect square; the surd is rational")
        P, Q, sign = self.P, self.Q, self.sign
        if not Q.divides(D - P * P):
            # sqrt(D Q^2) = +-Q sqrt(D); keep the represented value unchanged
            if not F.canonical(Q.lc * s0):
                sign = -sign
            P, D, Q = P * Q, D * Q * Q, Q * Q
            object.__setattr__(self, "P", P)
            object.__setattr__(self, "Q", Q)
            object.__setattr__(self, "D", D)
            object.__setattr__(self, "sign", sign)

    @property
    def field(self) -> FieldConfig:
        return self.D.field

    def folded(self) -> tuple[Poly, Poly]:
        """(P', Q') with alpha = (P' + sqrt(D))/Q'."""
        if self.sign == 1:
            return self.P, self.Q
        return -self.P, -self.Q

    def __str__(self):
        return format_surd(self)


def surd_to_series(a: QuadraticSurd, prec: int) -> LaurentSeries:
    """Expansion of the surd certified to absolute precision ``prec``."""
    root = sqrt(LaurentSeries.exact(a.D), prec=prec - a.Q.degree)
    if a.sign < 0:
        root = -root
    return mul(root + a.P, LaurentSeries.exact(RationalFn(a.field.const(1), a.Q)))


def conjugate(a: QuadraticSurd) -> QuadraticSurd:
    return QuadraticSurd(a.P, a.Q, a.D, -a.sign)


def surd_trace(a: QuadraticSurd) -> RationalFn:
    """alpha + conj(alpha) = 2P/Q."""
    return RationalFn(a.P.scale(2), a.Q)


def surd_norm(a: QuadraticSurd) -> RationalFn:
    """alpha * conj(alpha) = (P^2 - D)/Q^2."""
    return RationalFn(a.P * a.P - a.D, a.Q * a.Q)


def example_surd(d: Poly) -> QuadraticSurd:
    """(sqrt(d^2 + 4) - d)/2 where sqrt(d^2+4) = d + 2/d - ... (root with leading term d)."""
    F = d.field
    sign = 1 if F.canonical(d.lc) else -1
    return QuadraticSurd(-d, F.const(2), d * d + 4, sign)


# ---------------------------------------------------------------- text I/O

_SURD = re.compile(
    r"^surd:\((?P<P>.*?)(?P<s>[+-])(?:s\*|1\*)?sqrt\((?P<D>[^()]*)\)\)(?:/(?P<Q>.+))?$"
)


def parse_surd(text: str, field: FieldConfig) -> QuadraticSurd:
    """``surd:(<P>+sqrt(<D>))/<Q>`` or ``surd:(<P>-sqrt(<D>))/<Q>``."""
    s = "".join(text.split())
    m = _SURD.match(s)
    if not m:
        raise ParseError("malformed surd spec (expected surd:(<P>+sqrt(<D>))/<Q>)", text, 0)
    P = parse_poly(m["P"], field) if m["P"] else field.poly()
    D = parse_poly(m["D"], field)
    Qt = m["Q"] or "1"
    if Qt.startswith("(") and Qt.endswith(")"):
        Qt = Qt[1:-1]
    Q = parse_poly(Qt, field)
    return QuadraticSurd(P, Q, D, 1 if m["s"] == "+" else -1)


def format_surd(a: QuadraticSurd) -> str:
    s = "+" if a.sign > 0 else "-"
    return f"surd:({format_poly(a.P)}{s}sqrt({format_poly(a.D)}))/({format_poly(a.Q)})"


def surd_to_json(a: QuadraticSurd) -> dict:
    return {
        "text": format_surd(a),
        "P": format_poly(a.P),
        "Q": format_poly(a.Q),
        "D": format_poly(a.D),
        "sign": a.sign,
        "p": a.field.p,
    }


# ---------------------------------------------------------------- Newton lifting

def _eval(f: Sequence[Poly], x: LaurentSeries) -> LaurentSeries:
    acc = LaurentSeries.exact(f[-1])
    for c in reversed(f[:-1]):
        acc = acc * x + c
    return acc


def _derivative(f: Sequence[Poly]) -> list[Poly]:
    return [c.scale(i) for i, c in enumerate(f)][1:]


def _finite_exact(x: LaurentSeries) -> LaurentSeries:
    """Treat the certified prefix of ``x`` as an exact finite Laurent sum."""
    if x.rational is not None:
        return x
    F = x.field
    if x.is_zero:
        return LaurentSeries.exact(F.poly())
    top = x.lead_exp + len(x.coeffs) - 1
    shift = max(0, top)
    # sum c_e T^{-e} = (sum c_e T^{shift - e}) / T^shift
    num = [0] * (shift - x.lead_exp + 1)
    for j, c in enumerate(x.coeffs):
        num[shift - (x.lead_exp + j)] = c
    return LaurentSeries.exact(RationalFn(F.poly(num), F.monomial(shift)))


def newton_condition(f: Sequence[Poly], x0: LaurentSeries) -> bool:
    x0 = _finite_exact(x0)
    fx = _eval(f, x0)
    dfx = _eval(_derivative(f), x0)
    if dfx.is_zero:
        return False
    return fx.is_zero or fx.lead_exp > 2 * dfx.lead_exp


def find_newton_start(f: Sequence[Poly], field: FieldConfig) -> LaurentSeries:
    """First x0 = c0 (1/T)^e + c1 (1/T)^(e+1), e in [-2, 2], meeting |f(x0)| < |f'(x0)|^2."""
    from .laurent import monomial

    candidates = [LaurentSeries.exact(field.poly())]
    for e in range(-2, 3):
        for c0 in range(1, field.p):
            for c1 in range(field.p):
                candidates.append(monomial(field, e, c0) + monomial(field, e + 1, c1))
    for x0 in candidates:
        if newton_condition(f, x0):
            return x0
    raise DomainError("no starting point satisfies the Newton condition in the search window")


def hensel_root(f: Sequence[Poly], x0: LaurentSeries | None, target_prec: int, max_iter: int = 64) -> LaurentSeries:
    """Newton iteration x <- x - f(x)/f'(x) until v(f(x)) >= target_prec.

    ``f`` lists the coefficients c_0, c_1, ... in K of f(x) = sum c_i x^i.
    The returned series is certified as an approximation of the true root:
    its precision is v(f(x*)) - v(f'(x*)).
    """
    f = list(f)
    while f and not f[-1]:
        f.pop()
    if len(f) < 2:
        raise DomainError("hensel_root needs a polynomial of degree >= 1")
    F = f[0].field
    if x0 is None:
        x0 = find_newton_start(f, F)
    x = _finite_exact(x0)
    df = _derivative(f)
    fx, dfx = _eval(f, x), _eval(df, x)
    if dfx.is_zero:
        raise DomainError("f'(x0) vanishes")
    if not (fx.is_zero or fx.lead_exp > 2 * dfx.lead_exp):
        raise DomainError(
            f"Newton condition fails at x0: v(f) = {fx.lead_exp}, 2 v(f') = {2 * dfx.lead_exp}"
        )
    for _ in range(max_iter):
        if fx.is_zero:
            return x
        if fx.lead_exp >= target_prec:
            return x.truncate(fx.lead_exp - dfx.lead_exp)
        err = fx.lead_exp - dfx.lead_exp
        work = 2 * err + 2 * abs(dfx.lead_exp) + 2
        work = min(work, target_prec - dfx.lead_exp + abs(dfx.lead_exp) + 2)
        step = (fx / dfx).truncate(max(work, err + 1))
        x = _finite_exact(x - step)
        fx, dfx = _eval(f, x), _eval(df, x)
        if dfx.is_zero:
            raise DomainError("f' vanished during Newton iteration")
    raise PrecisionError(f"Newton iteration did not reach v(f) >= {target_prec} in {max_iter} steps")
