"""Truncated Laurent series in 1/T over F_p with certified absolute precision.

A series stores ``lead_exp`` (the valuation), the coefficients of
(1/T)^lead_exp, (1/T)^(lead_exp+1), ... and ``prec``: every coefficient of
(1/T)^e with e < prec is certified.  Exact elements of k (rational
functions, hence also polynomials) are carried symbolically with
``prec = inf`` and expanded on demand, so that norms of rational values can
be decided exactly.

Precision rules, all conservative:

    add/sub   min(prec_a, prec_b)
    mul       min(prec_a + v(b), prec_b + v(a))
    inv       prec_a - 2 v(a)
    sqrt      prec_a - v(a)/2
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Sequence

from .errors import DomainError, ParseError, PrecisionError
from .ring import FieldConfig, GF, Poly, RationalFn, format_poly, parse_poly

INF = math.inf


@total_ordering
@dataclass(frozen=True)
class QExponent:
    """An absolute value q^(-exp), kept exact.

    ``exp is None`` encodes the value 0.  ``at_least`` marks a value only known
    to be <= q^(-exp) (a series that vanishes to the available precision).
    Ordering compares the represented values; an ``at_least`` value is ordered
    by its bound.
    """

    exp: int | Fraction | None
    at_least: bool = False

    @classmethod
    def zero(cls) -> "QExponent":
        return cls(None)

    @classmethod
    def of_poly(cls, x: Poly) -> "QExponent":
        return cls.zero() if not x else cls(-x.degree)

    @property
    def is_zero(self) -> bool:
        return self.exp is None

    @property
    def is_exact(self) -> bool:
        return not self.at_least

    def _key(self):
        return INF if self.exp is None else self.exp

    def __lt__(self, other: "QExponent"):
        return self._key() > other._key()

    def __mul__(self, other: "QExponent") -> "QExponent":
        if self.exp is None or other.exp is None:
            return QExponent.zero()
        e = self.exp + other.exp
        if isinstance(e, Fraction) and e.denominator == 1:
            e = int(e)
        return QExponent(e, self.at_least or other.at_least)

    def __pow__(self, k) -> "QExponent":
        if self.exp is None:
            return self
        e = self.exp * Fraction(k)
        if isinstance(e, Fraction) and e.denominator == 1:
            e = int(e)
        return QExponent(e, self.at_least)

    def shift(self, k) -> "QExponent":
        """Multiply the value by q^(-k)."""
        if self.exp is None:
            return self
        e = self.exp + k
        if isinstance(e, Fraction) and e.denominator == 1:
            e = int(e)
        return QExponent(e, self.at_least)

    def __str__(self):
        if self.exp is None:
            return "0"
        return f"{'<=' if self.at_least else ''}q^({-self.exp})"

    def to_json(self):
        if self.exp is None:
            return {"kind": "zero", "exp": None}
        return {"kind": "at_least" if self.at_least else "finite", "exp": exp_to_json(self.exp)}


def exp_to_json(e):
    if isinstance(e, Fraction):
        if e.denominator == 1:
            return int(e)
        return {"num": e.numerator, "den": e.denominator}
    return e


class LaurentSeries:
    __slots__ = ("field", "lead_exp", "coeffs", "prec", "rational", "_quot", "_tail", "_rem")

    def __init__(self, field: FieldConfig, lead_exp: int, coeffs: Sequence[int], prec: int):
        """Inexact series; ``coeffs[j]`` is the coefficient of (1/T)^(lead_exp+j).

        Coefficients at or beyond ``prec`` are dropped, leading zeros are stripped.
        """
        if prec == INF:
            raise ValueError("use LaurentSeries.exact for exact values")
        p = field.p
        c = [x % p for x in coeffs[: max(0, prec - lead_exp)]]
        k = 0
        while k < len(c) and c[k] == 0:
            k += 1
        self.field = field
        self.prec = prec
        self.rational = None
        if k == len(c):
            self.lead_exp = prec
            self.coeffs = ()
        else:
            self.lead_exp = lead_exp + k
            body = c[k:]
            body.extend([0] * (prec - self.lead_exp - len(body)))
            self.coeffs = tuple(body)

    @classmethod
    def exact(cls, value) -> "LaurentSeries":
        if isinstance(value, Poly):
            value = RationalFn(value)
        obj = cls.__new__(cls)
        obj.field = value.field
        obj.rational = value
        obj.prec = INF
        obj.coeffs = ()
        v = value.valuation()
        obj.lead_exp = INF if v is None else v
        obj._quot, rem = divmod(value.num, value.den)
        obj._tail = []
        obj._rem = rem
        return obj

    # ------------------------------------------------------------ inspection
    @property
    def is_exact(self) -> bool:
        return self.rational is not None

    @property
    def is_zero(self) -> bool:
        """Zero to the available precision (exactly zero when exact)."""
        return self.lead_exp >= self.prec or self.lead_exp == INF

    @property
    def v_low(self):
        """Certified lower bound for the valuation."""
        return self.lead_exp

    def coeff(self, e: int) -> int:
        if e < self.lead_exp:
            return 0
        if self.rational is None:
            if e >= self.prec:
                raise PrecisionError(f"coefficient of (1/T)^{e} requested, series certified only below {self.prec}")
            return self.coeffs[e - self.lead_exp]
        if e <= 0:
            return self._quot[-e]
        return self._frac_digit(e)

    def _frac_digit(self, e: int) -> int:
        tail = self._tail
        den = self.rational.den
        F = self.field
        while len(tail) < e:
            if not self._rem:
                tail.append(0)
                continue
            r = self._rem.shift(1)
            if r.degree == den.degree:
                c = r.lc * F.inv(den.lc) % F.p
                r = r - den.scale(c)
            else:
                c = 0
            self._rem = r
            tail.append(c)
        return tail[e - 1]

    def terms(self, upto: int) -> list[int]:
        """Coefficients from ``lead_exp`` up to exponent ``upto - 1``."""
        if self.is_zero:
            return []
        return [self.coeff(e) for e in range(self.lead_exp, upto)]

    def truncate(self, prec: int) -> "LaurentSeries":
        """Inexact copy certified to min(self.prec, prec)."""
        N = min(self.prec, prec)
        if self.is_zero and self.rational is not None:
            return LaurentSeries(self.field, N, (), N)
        lo = min(self.lead_exp, N)
        return LaurentSeries(self.field, lo, self.terms(N) if lo < N else (), N)

    def __repr__(self):
        if self.rational is not None:
            return f"LaurentSeries(exact {self.rational}, p={self.field.p})"
        if self.is_zero:
            return f"LaurentSeries(0 + O(T^-{self.prec}), p={self.field.p})"
        shown = ", ".join(str(c) for c in self.coeffs[:8])
        more = ", ..." if len(self.coeffs) > 8 else ""
        return f"LaurentSeries(lead={self.lead_exp}, [{shown}{more}], prec={self.prec}, p={self.field.p})"

    # ------------------------------------------------------------ operators
    def _lift(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            if other.field.p != self.field.p:
                raise DomainError("mixing series over different fields")
            return other
        if isinstance(other, int):
            return LaurentSeries.exact(self.field.const(other))
        if isinstance(other, (Poly, RationalFn)):
            return LaurentSeries.exact(other)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else add(self, o)

    __radd__ = __add__

    def __neg__(self):
        return neg(self)

    def __sub__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else add(self, neg(o))

    def __rsub__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else add(o, neg(self))

    def __mul__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else mul(self, inv(o))

    def __rtruediv__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else mul(o, inv(self))

    def __pow__(self, n: int):
        result = LaurentSeries.exact(self.field.const(1))
        for _ in range(n):
            result = result * self
        return result


# ---------------------------------------------------------------- operations

def from_rational(r: RationalFn | Poly, prec: int | None = None) -> LaurentSeries:
    """Laurent expansion of r; exact when ``prec`` is None, else certified to ``prec``."""
    s = LaurentSeries.exact(r)
    return s if prec is None else s.truncate(prec)


def zero(field: FieldConfig, prec: int | None = None) -> LaurentSeries:
    if prec is None:
        return LaurentSeries.exact(field.poly())
    return LaurentSeries(field, prec, (), prec)


def monomial(field: FieldConfig, e: int, c: int = 1) -> LaurentSeries:
    """Exact c * (1/T)^e."""
    if e <= 0:
        return LaurentSeries.exact(field.monomial(-e, c))
    return LaurentSeries.exact(RationalFn(field.const(c), field.monomial(e)))


def valuation(a: LaurentSeries) -> QExponent:
    """v(a) as the exponent of |a|; an ``at_least`` marker when zero to precision."""
    if a.rational is not None:
        return QExponent.zero() if a.is_zero else QExponent(a.lead_exp)
    if a.is_zero:
        return QExponent(a.prec, at_least=True)
    return QExponent(a.lead_exp)


def abs_value(a: LaurentSeries) -> QExponent:
    return valuation(a)


def add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    if a.rational is not None and b.rational is not None:
        return LaurentSeries.exact(a.rational + b.rational)
    N = min(a.prec, b.prec)
    lo = min(a.lead_exp, b.lead_exp, N)
    p = a.field.p
    coeffs = [(a.coeff(e) + b.coeff(e)) % p for e in range(lo, N)]
    return LaurentSeries(a.field, lo, coeffs, N)


def neg(a: LaurentSeries) -> LaurentSeries:
    if a.rational is not None:
        return LaurentSeries.exact(-a.rational)
    return LaurentSeries(a.field, a.lead_exp, [-c for c in a.coeffs], a.prec)


def sub(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    return add(a, neg(b))


def mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    if a.rational is not None and b.rational is not None:
        return LaurentSeries.exact(a.rational * b.rational)
    for x, y in ((a, b), (b, a)):
        if x.rational is not None and x.is_zero:
            return x
    va, vb = a.lead_exp, b.lead_exp
    N = min(a.prec + vb, b.prec + va)
    if a.is_zero or b.is_zero or va + vb >= N:
        return LaurentSeries(a.field, N, (), N)
    L = N - va - vb
    A = [a.coeff(va + k) for k in range(L)]
    B = [b.coeff(vb + k) for k in range(L)]
    out = [0] * L
    for i, x in enumerate(A):
        if x:
            for j in range(L - i):
                out[i + j] += x * B[j]
    return LaurentSeries(a.field, va + vb, out, N)


def inv(a: LaurentSeries) -> LaurentSeries:
    if a.rational is not None:
        if a.is_zero:
            raise ZeroDivisionError("inverse of exact zero")
        return LaurentSeries.exact(a.rational.inverse())
    if a.is_zero:
        raise PrecisionError(f"cannot invert a series that vanishes to precision {a.prec}")
    F = a.field
    p = F.p
    v = a.lead_exp
    L = a.prec - v
    u = a.coeffs
    inv0 = F.inv(u[0])
    b = [inv0]
    for k in range(1, L):
        acc = 0
        for i in range(1, k + 1):
            acc += u[i] * b[k - i]
        b.append(-acc * inv0 % p)
    return LaurentSeries(F, -v, b, a.prec - 2 * v)


def sqrt(a: LaurentSeries, prec: int | None = None) -> LaurentSeries:
    """Square root on the branch whose leading coefficient lies in [1, (p-1)/2].

    The coefficients of sqrt(1 + x) are solved term by term from s^2 = 1 + x,
    which reproduces the binomial series.  Exact inputs need ``prec``.
    """
    F = a.field
    F.require_odd("sqrt")
    if a.rational is not None and a.is_zero:
        return a
    if a.is_zero:
        raise PrecisionError(f"sqrt of a series that vanishes to precision {a.prec}")
    v = a.lead_exp
    if v % 2:
        raise DomainError(f"sqrt needs even valuation, got v = {v}")
    a0 = a.coeff(v)
    s0 = F.sqrt(a0)
    if s0 is None:
        raise DomainError(f"leading coefficient {a0} is not a square mod {F.p}")
    N = a.prec - v // 2
    if prec is not None:
        N = min(N, prec)
    if N == INF:
        raise ValueError("sqrt of an exact value needs an explicit precision")
    L = N - v // 2
    if L <= 0:
        return LaurentSeries(F, N, (), N)
    p = F.p
    ia0 = F.inv(a0)
    u = [a.coeff(v + k) * ia0 % p for k in range(L)]
    inv2 = F.inv(2)
    s = [1]
    for k in range(1, L):
        acc = u[k]
        for i in range(1, k):
            acc -= s[i] * s[k - i]
        s.append(acc * inv2 % p)
    return LaurentSeries(F, v // 2, [s0 * c for c in s], N)


def integral_part(a: LaurentSeries) -> Poly:
    """[a]: the unique polynomial A with v(a - A) >= 1."""
    F = a.field
    if a.rational is not None:
        return a.rational.num // a.rational.den
    if a.prec < 1:
        raise PrecisionError(f"integral part needs precision >= 1, have {a.prec}")
    if a.is_zero or a.lead_exp > 0:
        return F.poly()
    return F.poly([a.coeff(-k) for k in range(-a.lead_exp + 1)])


def frac_part(a: LaurentSeries) -> LaurentSeries:
    return a - integral_part(a)


def frac_norm(a: LaurentSeries) -> QExponent:
    """||a|| = |a - [a]|, exponent >= 1, or zero."""
    if a.rational is not None:
        r = a.rational.num % a.rational.den
        if not r:
            return QExponent.zero()
        return QExponent(a.rational.den.degree - r.degree)
    if a.prec < 1:
        raise PrecisionError(f"fractional norm needs precision >= 1, have {a.prec}")
    for e in range(max(1, a.lead_exp), a.prec):
        if a.coeff(e):
            return QExponent(e)
    return QExponent(a.prec, at_least=True)


def is_polynomial(a: LaurentSeries) -> bool | None:
    """Three-valued: True / False / None (undecided at this precision)."""
    n = frac_norm(a)
    if n.is_zero:
        return True
    return None if n.at_least else False


# ---------------------------------------------------------------- text I/O

_SER = re.compile(r"^ser:(-?\d+):([\d,\s]*)@(-?\d+)$")
_RAT = re.compile(r"^rat:(.+?)(?:@(-?\d+))?$")


def parse_series(text: str, field: FieldConfig) -> LaurentSeries:
    """``rat:<num>/<den>[@<prec>]``, ``ser:<exp0>:<c0>,<c1>,...@<prec>`` or a bare polynomial."""
    s = text.strip()
    if s.startswith("ser:"):
        m = _SER.match("".join(s.split()))
        if not m:
            raise ParseError("malformed ser: spec (expected ser:<exp0>:<c0>,...@<prec>)", text, 0)
        e0, body, prec = m.groups()
        coeffs = [int(c) for c in body.split(",") if c != ""]
        return LaurentSeries(field, int(e0), coeffs, int(prec))
    if s.startswith("rat:"):
        m = _RAT.match(s)
        if not m:
            raise ParseError("malformed rat: spec", text, 0)
        body, prec = m.groups()
        depth = 0
        split = None
        for i, ch in enumerate(body):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "/" and depth == 0:
                split = i
                break
        num_txt, den_txt = (body, "1") if split is None else (body[:split], body[split + 1:])
        num = parse_poly(_strip_parens(num_txt), field)
        den = parse_poly(_strip_parens(den_txt), field)
        if not den:
            raise ParseError("zero denominator", text, 4 + (split or 0))
        return from_rational(RationalFn(num, den), None if prec is None else int(prec))
    return LaurentSeries.exact(parse_poly(s, field))


def _strip_parens(t: str) -> str:
    t = t.strip()
    while t.startswith("(") and t.endswith(")"):
        t = t[1:-1].strip()
    return t


def format_series(a: LaurentSeries) -> str:
    """Inverse of :func:`parse_series`."""
    if a.rational is not None:
        r = a.rational
        return f"rat:({format_poly(r.num)})/({format_poly(r.den)})"
    body = ",".join(str(c) for c in a.coeffs)
    return f"ser:{a.lead_exp}:{body}@{a.prec}"


def series_to_json(a: LaurentSeries, display_prec: int | None = None) -> dict:
    out = {"p": a.field.p, "text": format_series(a)}
    if a.rational is not None:
        N = display_prec if display_prec is not None else max(1, 0 if a.is_zero else a.lead_exp + 8)
        view = a.truncate(N)
        out.update(exact=True, lead_exp=view.lead_exp, coeffs=list(view.coeffs), prec=None)
    else:
        out.update(exact=False, lead_exp=a.lead_exp, coeffs=list(a.coeffs), prec=a.prec)
    return out


def field_of(p: int) -> FieldConfig:
    return GF(p)
