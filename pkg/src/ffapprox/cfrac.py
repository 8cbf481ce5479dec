"""Continued fractions in F_p((1/T)): a certified engine on truncated series and an
exact periodic engine on quadratic surds."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .algebraic import QuadraticSurd
from .errors import DomainError, PrecisionError, VerificationError
from .laurent import LaurentSeries, QExponent, integral_part, inv, sqrt, valuation
from .ring import Poly, RationalFn, format_poly

COMPLETE = "complete-rational"
PERIODIC = "periodic"
EXHAUSTED = "precision-exhausted"
TRUNCATED = "max-terms"

MAX_SURD_STEPS = 100_000


def convergents(quotients: Sequence[Poly]) -> list[tuple[Poly, Poly]]:
    """(P_n, Q_n) with P_n = a_n P_{n-1} + P_{n-2}, Q_n = a_n Q_{n-1} + Q_{n-2}."""
    if not quotients:
        return []
    F = quotients[0].field
    P2, P1 = F.poly(), F.const(1)
    Q2, Q1 = F.const(1), F.poly()
    out = []
    for a in quotients:
        P2, P1 = P1, a * P1 + P2
        Q2, Q1 = Q1, a * Q1 + Q2
        out.append((P1, Q1))
    return out


@dataclass
class CFExpansion:
    quotients: list
    status: str
    preperiod: int = 0
    period: int = 0
    states: list = dc_field(default_factory=list, repr=False)

    @property
    def count(self) -> int:
        return len(self.quotients)

    def quotient(self, i: int) -> Poly:
        """a_i, continuing periodically past the stored quotients when periodic."""
        if i < len(self.quotients):
            return self.quotients[i]
        if self.status != PERIODIC:
            raise PrecisionError(f"quotient a_{i} not available (status {self.status}, {self.count} known)")
        k = self.preperiod + (i - self.preperiod) % self.period
        return self.quotients[k]

    def take(self, n: int) -> list[Poly]:
        return [self.quotient(i) for i in range(n)]

    def convergents(self, n: int | None = None) -> list[tuple[Poly, Poly]]:
        return convergents(self.take(self.count if n is None else n))

    def period_quotients(self) -> list[Poly]:
        return self.quotients[self.preperiod:self.preperiod + self.period]

    def to_json(self, n_convergents: int | None = None) -> dict:
        out = {
            "quotients": [format_poly(a) for a in self.quotients],
            "status": self.status,
            "count": self.count,
        }
        if self.status == PERIODIC:
            out["preperiod"] = self.preperiod
            out["period"] = self.period
        n = self.count if n_convergents is None else n_convergents
        out["convergents"] = [[format_poly(P), format_poly(Q)] for P, Q in self.convergents(n)]
        return out


def cf_series(alpha: LaurentSeries, max_terms: int = 50) -> CFExpansion:
    """Expand a series while every quotient is certified by its precision.

    A quotient [A] is emitted only if A has precision >= 1 and A - [A] is either
    exactly zero or has a certified leading coefficient.
    """
    A = alpha
    out: list[Poly] = []
    while len(out) < max_terms:
        if A.prec < 1:
            return CFExpansion(out, EXHAUSTED)
        a = integral_part(A)
        R = A - a
        if R.is_exact and R.is_zero:
            out.append(a)
            return CFExpansion(out, COMPLETE)
        if R.is_zero:
            return CFExpansion(out, EXHAUSTED)
        out.append(a)
        A = inv(R)
    return CFExpansion(out, TRUNCATED)


def _isqrt_part(D: Poly) -> Poly:
    """[sqrt(D)] on the canonical branch, exact."""
    return integral_part(sqrt(LaurentSeries.exact(D), prec=1))


def cf_surd(alpha: QuadraticSurd) -> CFExpansion:
    """Exact expansion of (P + sqrt(D))/Q by the state recurrence on (P, Q).

    a = (P + [sqrt D]) div Q, P' = a Q - P, Q' = (D - P'^2)/Q; the expansion is
    periodic from the first repeated state.
    """
    P, Q = alpha.folded()
    D = alpha.D
    s = _isqrt_part(D)
    seen: dict = {}
    quotients: list[Poly] = []
    states = []
    for step in range(MAX_SURD_STEPS):
        key = (P, Q)
        if key in seen:
            j = seen[key]
            return CFExpansion(quotients, PERIODIC, j, step - j, states)
        seen[key] = step
        states.append(key)
        a = (P + s) // Q
        if step >= 1 and a.degree < 1:
            raise VerificationError(f"partial quotient a_{step} = {format_poly(a)} has degree < 1")
        quotients.append(a)
        P = a * Q - P
        num = D - P * P
        Q, rem = divmod(num, Q)
        if rem:
            raise VerificationError("surd state lost the divisibility Q | D - P^2")
    raise PrecisionError(f"no period found within {MAX_SURD_STEPS} steps")


@dataclass
class QualityReport:
    n: int
    P: Poly
    Q: Poly
    observed_exp: int
    expected_exp: int
    equality: bool
    best_checked: bool = False
    best_ok: bool | None = None
    competitors: int = 0

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "P": format_poly(self.P),
            "Q": format_poly(self.Q),
            "observed_exp": self.observed_exp,
            "expected_exp": self.expected_exp,
            "equality": self.equality,
            "best_checked": self.best_checked,
            "best_ok": self.best_ok,
            "competitors": self.competitors,
        }


def convergent_quality(exp: CFExpansion, alpha: LaurentSeries, n: int, check_best: bool = False) -> QualityReport:
    """Check exponent |alpha - P_n/Q_n| = deg a_{n+1} + 2 deg Q_n.

    With ``check_best`` every Q with 0 <= deg Q < deg Q_n is tried (its best P
    is [Q alpha]) and must do strictly worse.
    """
    a_next = exp.quotient(n + 1)
    P, Q = exp.convergents(n + 1)[n]
    expected = a_next.degree + 2 * Q.degree
    if alpha.prec < expected + 1:
        raise PrecisionError(f"need precision {expected + 1} for convergent {n}, have {alpha.prec}")
    diff = alpha - RationalFn(P, Q)
    v = valuation(diff)
    if v.is_zero or v.at_least:
        raise PrecisionError(f"|alpha - P_{n}/Q_{n}| not resolved at precision {alpha.prec}")
    rep = QualityReport(n, P, Q, v.exp, expected, v.exp == expected)
    if check_best:
        from .oracle import FormDigits, monic_vectors

        ok = True
        count = 0
        for d in range(Q.degree):
            X = monic_vectors(alpha.field.p, d)
            # exponent of |alpha - P/Q| with P = [Q alpha] is exp||Q alpha|| + deg Q
            e, sure = FormDigits([alpha], [d]).exponents(X)
            count += X.shape[0]
            worse = sure & (e + d < expected)
            if not worse.all():
                ok = False
        rep.best_checked = True
        rep.best_ok = ok
        rep.competitors = count
    return rep


def tau_of_surd(alpha) -> QExponent:
    """tau = q^-D where D is the largest partial-quotient degree over one period; 0 for rationals."""
    if isinstance(alpha, (RationalFn, Poly)):
        return QExponent.zero()
    if isinstance(alpha, LaurentSeries):
        if alpha.is_exact:
            return QExponent.zero()
        raise DomainError("tau is only computed for quadratic surds or rationals")
    exp = cf_surd(alpha)
    return QExponent(max(a.degree for a in exp.period_quotients()))


def largest_period_degree(alpha: QuadraticSurd) -> int:
    exp = cf_surd(alpha)
    return max(a.degree for a in exp.period_quotients())


def evaluate(quotients: Sequence[Poly]) -> RationalFn:
    """Value of the finite continued fraction [a_0; a_1, ..., a_n]."""
    P, Q = convergents(quotients)[-1]
    return RationalFn(P, Q)
