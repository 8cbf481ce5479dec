"""Arithmetic in F_p, K = F_p[T] and k = F_p(T).

Polynomials are immutable coefficient tuples, index i holding the
coefficient of T^i.  The zero polynomial is the empty tuple and its degree
is ``NEG_INF`` (``-math.inf``), so degree sums and maxima behave without
special cases.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import DomainError, ParseError

NEG_INF = -math.inf


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldConfig:
    """The ground field F_p.  ``q`` is kept separate from ``p`` in every signature."""

    p: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise DomainError(f"p = {self.p} is not prime")

    @property
    def q(self) -> int:
        return self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(a, -1, self.p)

    def canonical(self, a: int) -> bool:
        """True when the representative of ``a`` lies in [1, (p-1)/2] (p = 2: a = 1)."""
        a %= self.p
        return 1 <= a <= max(1, (self.p - 1) // 2)

    def sqrt(self, a: int) -> int | None:
        """Square root in F_p on the canonical branch, or None for non-residues."""
        return _sqrt_table(self.p).get(a % self.p)

    def require_odd(self, what: str):
        if self.p == 2:
            raise DomainError(f"{what} requires p > 2")

    # constructors
    def poly(self, coeffs: Sequence[int] = ()) -> "Poly":
        return Poly(self, coeffs)

    def const(self, c: int) -> "Poly":
        return Poly(self, (c,))

    @property
    def T(self) -> "Poly":
        return Poly(self, (0, 1))

    def monomial(self, k: int, c: int = 1) -> "Poly":
        return Poly(self, (0,) * k + (c,))

    def parse(self, text: str) -> "Poly":
        return parse_poly(text, self)


@lru_cache(maxsize=None)
def GF(p: int) -> FieldConfig:
    return FieldConfig(p)


@lru_cache(maxsize=None)
def _sqrt_table(p: int) -> dict[int, int]:
    table = {0: 0}
    for s in range(1, p):
        r = s * s % p
        if p == 2 or s <= (p - 1) // 2:
            table[r] = s
    return table


class Poly:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldConfig, coeffs: Sequence[int] = ()):
        p = field.p
        c = [x % p for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.field = field
        self.coeffs = tuple(c)

    @classmethod
    def _raw(cls, field, coeffs):
        # coeffs already reduced and stripped
        obj = cls.__new__(cls)
        obj.field = field
        obj.coeffs = coeffs
        return obj

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly(self.field, (other,))
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field.p == other.field.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.p, self.coeffs))

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, p={self.field.p})"

    def __str__(self):
        return format_poly(self)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.field.p != self.field.p:
                raise DomainError(f"mixing F_{self.field.p} and F_{other.field.p}")
            return other
        if isinstance(other, int):
            return Poly(self.field, (other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        p = self.field.p
        out = list(a)
        for i, x in enumerate(b):
            out[i] = (out[i] + x) % p
        return Poly(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return Poly._raw(self.field, tuple((-x) % p for x in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw(self.field, ())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return Poly(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly(self.field, (1,))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: int) -> "Poly":
        return Poly(self.field, [c * x for x in self.coeffs])

    def shift(self, k: int) -> "Poly":
        """Multiply by T^k (k >= 0)."""
        if not self.coeffs:
            return self
        return Poly._raw(self.field, (0,) * k + self.coeffs)

    def __divmod__(self, other):
        other = self._coerce(other)
        if not other.coeffs:
            raise ZeroDivisionError("division by the zero polynomial")
        p = self.field.p
        rem = list(self.coeffs)
        db = len(other.coeffs) - 1
        inv_lc = self.field.inv(other.lc)
        if len(rem) - 1 < db:
            return Poly._raw(self.field, ()), self
        quot = [0] * (len(rem) - db)
        b = other.coeffs
        for k in range(len(rem) - 1 - db, -1, -1):
            c = rem[k + db] * inv_lc % p
            quot[k] = c
            if c:
                for j in range(db + 1):
                    rem[k + j] = (rem[k + j] - c * b[j]) % p
        return Poly(self.field, quot), Poly(self.field, rem[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        return self.scale(self.field.inv(self.lc))

    def divides(self, other: "Poly") -> bool:
        return not (other % self).coeffs

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.field.p
        return acc

    def derivative(self) -> "Poly":
        return Poly(self.field, [i * c for i, c in enumerate(self.coeffs)][1:])


def ext_gcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Return (g, u, v) with u*a + v*b = g, g monic (or zero when a = b = 0)."""
    F = a.field
    r0, r1 = a, b
    s0, s1 = F.const(1), F.poly()
    t0, t1 = F.poly(), F.const(1)
    while r1:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if not r0:
        return r0, s0, t0
    k = F.inv(r0.lc)
    return r0.scale(k), s0.scale(k), t0.scale(k)


def gcd(a: Poly, b: Poly) -> Poly:
    return ext_gcd(a, b)[0]


def is_square(a: Poly) -> Poly | None:
    """Square root of ``a`` in K on the canonical branch, or None if ``a`` is not a square."""
    F = a.field
    F.require_odd("is_square")
    if not a:
        return a
    d = a.degree
    if d % 2:
        return None
    s0 = F.sqrt(a.lc)
    if s0 is None:
        return None
    # Square root of the reversed polynomial as a power series in T, read back reversed.
    p = F.p
    rev = a.coeffs[::-1]
    half = d // 2
    s = [s0]
    inv2s0 = F.inv(2 * s0)
    for k in range(1, half + 1):
        acc = rev[k] - sum(s[i] * s[k - i] for i in range(1, k))
        s.append(acc * inv2s0 % p)
    root = Poly(F, s[::-1])
    return root if root * root == a else None


def enumerate_polys(field: FieldConfig, max_deg: int) -> Iterator[Poly]:
    """Every polynomial of degree <= max_deg, constant term varying fastest."""
    if max_deg < 0:
        raise ValueError("max_deg must be >= 0")
    for t in itertools.product(range(field.p), repeat=max_deg + 1):
        yield Poly(field, t[::-1])


def enumerate_monic(field: FieldConfig, deg: int) -> Iterator[Poly]:
    """Monic polynomials of degree exactly ``deg``."""
    for t in itertools.product(range(field.p), repeat=deg):
        yield Poly._raw(field, tuple(t[::-1]) + (1,))


class RationalFn:
    """num/den in lowest terms with den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        F = num.field
        if den is None:
            den = F.const(1)
        if not den:
            raise ZeroDivisionError("zero denominator")
        g = gcd(num, den) if num else den.monic()
        if g.degree > 0:
            num, den = num // g, den // g
        k = F.inv(den.lc)
        self.num = num.scale(k)
        self.den = den.scale(k)

    @property
    def field(self) -> FieldConfig:
        return self.num.field

    def __eq__(self, other):
        if isinstance(other, Poly):
            other = RationalFn(other)
        if not isinstance(other, RationalFn):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalFn({format_poly(self.num)!r}, {format_poly(self.den)!r}, p={self.field.p})"

    def __str__(self):
        if self.den.degree == 0:
            return format_poly(self.num)
        return f"({format_poly(self.num)})/({format_poly(self.den)})"

    def _c(self, other):
        if isinstance(other, RationalFn):
            return other
        if isinstance(other, Poly):
            return RationalFn(other)
        if isinstance(other, int):
            return RationalFn(self.field.const(other))
        return NotImplemented

    def __add__(self, other):
        o = self._c(other)
        return RationalFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._c(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._c(other)
        return RationalFn(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFn":
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return RationalFn(self.den, self.num)

    def __truediv__(self, other):
        return self * self._c(other).inverse()

    def is_poly(self) -> bool:
        return self.den.degree == 0

    def valuation(self):
        """v(num/den) = deg den - deg num; None for zero."""
        if not self.num:
            return None
        return self.den.degree - self.num.degree


# ---------------------------------------------------------------- text grammar

_TERM = re.compile(r"(\d+)?(\*)?(T)?(?:\^(\d+))?")


def parse_poly(text: str, field: FieldConfig) -> Poly:
    """Parse ``c``, ``T``, ``T^k``, ``c*T^k`` terms joined by ``+``/``-``."""
    s = "".join(text.split())
    # map stripped positions back to the original text for error messages
    orig = [i for i, ch in enumerate(text) if not ch.isspace()]

    def fail(msg, i):
        raise ParseError(msg, text, orig[i] if i < len(orig) else len(text))

    if not s:
        raise ParseError("empty polynomial", text, 0)
    i = 0
    result = [0]
    first = True
    while i < len(s):
        sign = 1
        if s[i] in "+-":
            sign = -1 if s[i] == "-" else 1
            i += 1
        elif not first:
            fail("expected '+' or '-'", i)
        m = _TERM.match(s, i)
        coef, star, var, power = m.groups()
        if m.end() == i:
            fail("expected a term", i)
        if var is None and (star or power):
            fail("malformed term", i)
        if star and coef is None:
            fail("'*' without a coefficient", i)
        c = int(coef) if coef is not None else 1
        k = (int(power) if power is not None else 1) if var else 0
        if len(result) <= k:
            result.extend([0] * (k + 1 - len(result)))
        result[k] += sign * c
        i = m.end()
        first = False
    return Poly(field, result)


def format_poly(a: Poly) -> str:
    if not a.coeffs:
        return "0"
    terms = []
    for k in range(len(a.coeffs) - 1, -1, -1):
        c = a.coeffs[k]
        if not c:
            continue
        if k == 0:
            t = str(c)
        elif k == 1:
            t = "T" if c == 1 else f"{c}*T"
        else:
            t = f"T^{k}" if c == 1 else f"{c}*T^{k}"
        terms.append(t)
    return "+".join(terms)
