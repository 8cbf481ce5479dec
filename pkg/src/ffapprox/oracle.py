"""Exhaustive searches over bounded-degree polynomials.

The fractional part of sum_j theta_j x_j has coefficient
sum_{j,k} coeff_{e+k}(theta_j) x_jk at (1/T)^e, so for a batch of coefficient
vectors the digits come from one integer matrix product mod p.  Only monic x
are enumerated where a single unknown is involved, since ||c a|| = ||a|| for
units c.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DomainError, PrecisionError, VerificationError
from .laurent import LaurentSeries, QExponent, exp_to_json
from .ring import FieldConfig, GF, Poly, format_poly, gcd

ZERO = 1 << 40          # exponent sentinel for an exact zero
CHUNK = 1 << 15


def _lcm(a: Poly, b: Poly) -> Poly:
    return (a * b) // gcd(a, b)


def all_vectors(p: int, length: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows = every vector in F_p^length, first coordinate varying fastest."""
    total = p ** length
    stop = total if stop is None else min(stop, total)
    idx = np.arange(start, stop, dtype=np.int64)
    if length == 0:
        return np.zeros((len(idx), 0), dtype=np.int64)
    powers = p ** np.arange(length, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % p


def monic_vectors(p: int, deg: int) -> np.ndarray:
    """Coefficient rows (length deg+1) of all monic polynomials of degree ``deg``."""
    body = all_vectors(p, deg)
    return np.hstack([body, np.ones((body.shape[0], 1), dtype=np.int64)])


def _digit_block(theta: LaurentSeries, lo: int, hi: int, deg: int) -> np.ndarray:
    """H[e - lo, k] = coeff_{e+k}(theta) for lo <= e < hi, 0 <= k <= deg."""
    rows = hi - lo
    if rows <= 0 or deg < 0:
        return np.zeros((max(rows, 0), max(deg + 1, 0)), dtype=np.int64)
    if theta.is_zero:
        return np.zeros((rows, deg + 1), dtype=np.int64)
    c = np.array([theta.coeff(e) for e in range(lo, hi + deg)], dtype=np.int64)
    return np.lib.stride_tricks.sliding_window_view(c, deg + 1).copy()


class FormDigits:
    """Fractional digits of sum_j theta_j x_j at exponents 1..E for deg x_j <= degs[j].

    E defaults to the deepest level the precision supports; when every theta_j
    is an exact rational, E is at least the degree of their common denominator,
    which makes an all-zero digit window an exact zero.
    """

    def __init__(self, thetas: Sequence[LaurentSeries], degs: Sequence[int], E: int | None = None):
        self.thetas = list(thetas)
        self.degs = list(degs)
        self.p = self.thetas[0].field.p
        inexact = [(t, d) for t, d in zip(self.thetas, self.degs) if not t.is_exact and d >= 0]
        limit = min((t.prec - 1 - d for t, d in inexact), default=None)
        self.exact = not inexact
        if self.exact:
            den = reduce(_lcm, (t.rational.den for t in self.thetas), self.thetas[0].field.const(1))
            need = max(1, den.degree)
            E = need if E is None else max(E, need)
        else:
            if limit is None or limit < 1:
                raise PrecisionError(
                    f"series precision supports no fractional digit at degree bounds {self.degs}"
                )
            E = limit if E is None else min(E, limit)
        self.E = E
        blocks = [_digit_block(t, 1, E + 1, d) for t, d in zip(self.thetas, self.degs) if d >= 0]
        self.H = np.hstack(blocks) if blocks else np.zeros((E, 0), dtype=np.int64)

    def exponents(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(exp, certain) per row of X: first nonzero digit exponent; ZERO for exact zero.

        Rows with no nonzero digit and inexact input get exp = E + 1, certain = False.
        """
        X = np.asarray(X, dtype=np.int64)
        out = np.empty(X.shape[0], dtype=np.int64)
        sure = np.ones(X.shape[0], dtype=bool)
        for s in range(0, X.shape[0], CHUNK):
            V = (X[s:s + CHUNK] @ self.H.T) % self.p
            nz = V != 0
            has = nz.any(axis=1)
            first = np.argmax(nz, axis=1) + 1
            if self.exact:
                out[s:s + CHUNK] = np.where(has, first, ZERO)
            else:
                out[s:s + CHUNK] = np.where(has, first, self.E + 1)
                sure[s:s + CHUNK] = has
        return out, sure


def _qexp(e: int, certain: bool) -> QExponent:
    if e >= ZERO:
        return QExponent.zero()
    return QExponent(int(e), at_least=not certain)


def _poly_rows(field: FieldConfig, X: np.ndarray) -> list[Poly]:
    return [field.poly([int(v) for v in row]) for row in X]


def _pmap(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        futs = [ex.submit(fn, *it) for it in items]
        return [f.result() for f in futs]


# ---------------------------------------------------------------- simultaneous approximation

@dataclass
class DegreeRow:
    deg: int
    best: QExponent                  # smallest achievable max_i ||x theta_i|| among deg x = deg
    witnesses: list = dc_field(default_factory=list)
    count: int = 0

    def product_exp(self):
        """Exponent of |x| * max_i ||x theta_i|| at the best x, None for zero."""
        return None if self.best.is_zero else self.best.exp - self.deg

    def to_json(self) -> dict:
        return {
            "deg": self.deg,
            "best": self.best.to_json(),
            "product_exp": exp_to_json(self.product_exp()),
            "witnesses": [format_poly(w) for w in self.witnesses],
            "count": self.count,
        }


def _min_exponents(thetas, deg, E):
    """For monic x of degree ``deg``: per-x min_i exponent and whether it is certain."""
    F = thetas[0].field
    X = monic_vectors(F.p, deg)
    mins = None
    sure = None
    for t in thetas:
        e, s = FormDigits([t], [deg], E).exponents(X)
        if mins is None:
            mins, sure = e, s
        else:
            take = e < mins
            both = e == mins
            sure = np.where(take, s, np.where(both, sure & s, sure))
            mins = np.minimum(mins, e)
    return X, mins, sure


def _best_row(thetas, deg, E):
    F = thetas[0].field
    X, mins, sure = _min_exponents(thetas, deg, E)
    best = int(mins.max())
    hit = np.flatnonzero(mins == best)
    certain = bool(sure[hit].all())
    return DegreeRow(deg, _qexp(best, certain), _poly_rows(F, X[hit]), int(X.shape[0]))


def best_simultaneous(thetas: Sequence[LaurentSeries], max_deg: int, resolution: int | None = None,
                      jobs: int = 1) -> list[DegreeRow]:
    """For each degree d <= max_deg, the best max_i ||x theta_i|| over x of degree exactly d."""
    thetas = list(thetas)
    if max_deg < 0:
        raise DomainError("max_deg must be >= 0")
    return _pmap(_best_row, [(thetas, d, resolution) for d in range(max_deg + 1)], jobs)


def enumeration_count(p: int, deg: int) -> int:
    """Number of polynomials of degree exactly ``deg`` (all leading coefficients)."""
    return (p - 1) * p ** deg


# ---------------------------------------------------------------- lower-bound shadow

@dataclass
class LowerBoundReport:
    n: int
    per_degree: list          # Fraction exponents (None = zero), one per degree
    gamma_exp: object         # max over all degrees; q^-gamma_exp is the empirical constant
    first: object
    last: object
    stable: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "per_degree": [exp_to_json(e) for e in self.per_degree],
            "gamma_exp": exp_to_json(self.gamma_exp),
            "first": exp_to_json(self.first),
            "last": exp_to_json(self.last),
            "stable": self.stable,
        }


def verify_lower_bound(thetas: Sequence[LaurentSeries], max_deg: int, jobs: int = 1) -> LowerBoundReport:
    """Per degree d: the largest exponent of (max_i ||x theta_i||) |x|^(1/n) over deg x = d.

    The empirical constant is q^-gamma_exp with gamma_exp the largest over all
    degrees.  ``stable`` records that the last degree's exponent is at most twice
    the first degree's, i.e. no visible decay of the constant.
    """
    thetas = list(thetas)
    n = len(thetas)
    rows = best_simultaneous(thetas, max_deg, jobs=jobs)
    per = []
    for row in rows:
        if row.best.is_zero:
            per.append(None)
        else:
            if row.best.at_least:
                raise PrecisionError(f"degree {row.deg}: best norm not resolved at this precision")
            per.append(Fraction(row.best.exp) - Fraction(row.deg, n))
    finite = [e for e in per if e is not None]
    gamma = None if len(finite) < len(per) else max(finite)
    first, last = per[0], per[-1]
    stable = first is not None and last is not None and last <= 2 * first
    return LowerBoundReport(n, per, gamma, first, last, stable)


# ---------------------------------------------------------------- product estimator

@dataclass
class BEstimate:
    lam: Fraction
    windows: list     # (d, exponent or None for zero): min over d <= deg x <= max_deg
    exact_zero: bool
    note: str

    def value(self):
        return self.windows[-1][1] if self.windows else None

    def to_json(self) -> dict:
        return {
            "lambda": exp_to_json(self.lam),
            "windows": [{"from_deg": d, "exp": exp_to_json(e)} for d, e in self.windows],
            "exact_zero": self.exact_zero,
            "note": self.note,
            "estimate": True,
        }


def estimate_B(thetas: Sequence[LaurentSeries], lam, max_deg: int) -> BEstimate:
    """Finite-horizon look at inf |x|^lam prod_j ||x theta_j|| over large x.

    windows[d] is the largest exponent of |x|^lam prod_j ||x theta_j|| over
    d <= deg x <= max_deg (the smallest value).  A rational theta_j makes the
    quantity vanish for every multiple of its denominator, so the estimate is
    exactly zero in every window.
    """
    thetas = list(thetas)
    lam = Fraction(lam)
    if any(t.is_exact for t in thetas):
        return BEstimate(lam, [(d, None) for d in range(max_deg + 1)], True,
                         "rational component: multiples of its denominator have zero norm")
    F = thetas[0].field
    per_deg = []
    for d in range(max_deg + 1):
        X = monic_vectors(F.p, d)
        total = np.zeros(X.shape[0], dtype=np.int64)
        for t in thetas:
            e, s = FormDigits([t], [d]).exponents(X)
            if not s.all():
                raise PrecisionError(f"degree {d}: some ||x theta|| not resolved at this precision")
            total += e
        per_deg.append(Fraction(int(total.max())) - lam * d)
    windows = []
    for d in range(max_deg + 1):
        windows.append((d, max(per_deg[d:])))
    return BEstimate(lam, windows, False, "finite-horizon estimate")


# ---------------------------------------------------------------- product minimum for several forms

def product_minimum(Theta, search_deg: int):
    """max over nonzero x in K^m, deg x_j <= search_deg, of n*min_i exp||L_i(x)|| - m*max_j deg x_j.

    Returns (exponent, witness) with exponent None when some x makes every
    ||L_i(x)|| exactly zero.
    """
    n, m = len(Theta), len(Theta[0])
    F = Theta[0][0].field
    p = F.p
    L = m * (search_deg + 1)
    if p ** L > 10 ** 7:
        raise DomainError(f"search space p^{L} too large")
    digits = [FormDigits(row, [search_deg] * m) for row in Theta]
    best = None
    witness = None
    for start in range(1, p ** L, CHUNK):
        X = all_vectors(p, L, start, start + CHUNK)
        mins = None
        for fd in digits:
            e, s = fd.exponents(X)
            if not s.all():
                raise PrecisionError("fractional norm not resolved at this precision")
            mins = e if mins is None else np.minimum(mins, e)
        blocks = X.reshape(X.shape[0], m, search_deg + 1)
        nz = blocks != 0
        degs = np.where(nz.any(axis=2), search_deg - np.argmax(nz[:, :, ::-1], axis=2), -1)
        height = degs.max(axis=1)
        zero = mins >= ZERO
        if zero.any():
            k = int(np.flatnonzero(zero)[0])
            return None, [format_poly(F.poly(blocks[k, j].tolist())) for j in range(m)]
        val = n * mins - m * height
        k = int(np.argmax(val))
        if best is None or val[k] > best:
            best = int(val[k])
            witness = [format_poly(F.poly(blocks[k, j].tolist())) for j in range(m)]
    return best, witness


# ---------------------------------------------------------------- Mahler's series

def mahler_alpha(p: int, prec: int) -> LaurentSeries:
    """sum_{h >= 0} T^(-p^h), certified below exponent ``prec``."""
    F = GF(p)
    c = [0] * max(prec - 1, 0)
    e = 1
    while e < prec:
        c[e - 1] = 1
        e *= p
    return LaurentSeries(F, 1, c, prec)


@dataclass
class MahlerWitnesses:
    p: int
    max_deg: int
    prec: int
    witnesses: list      # (Q, exponent)

    def degrees(self) -> list[int]:
        return sorted({q.degree for q, _ in self.witnesses})

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "max_deg": self.max_deg,
            "prec": self.prec,
            "witnesses": [{"Q": format_poly(q), "exp": e} for q, e in self.witnesses],
            "degrees": self.degrees(),
        }


def mahler_extremal_check(p: int, max_deg: int, prec: int) -> MahlerWitnesses:
    """Monic Q, deg Q <= max_deg, with exponent(||Q alpha||) = (p-1) deg Q exactly."""
    if prec < p * max_deg + 2:
        raise PrecisionError(f"precision {prec} below p*max_deg + 2 = {p * max_deg + 2}")
    alpha = mahler_alpha(p, prec)
    F = alpha.field
    found = []
    for d in range(max_deg + 1):
        X = monic_vectors(p, d)
        e, s = FormDigits([alpha], [d]).exponents(X)
        hit = np.flatnonzero(s & (e == (p - 1) * d))
        for k in hit:
            found.append((F.poly(X[k].tolist()), (p - 1) * d))
    if not found:
        raise VerificationError("no extremal witness found")
    return MahlerWitnesses(p, max_deg, prec, found)


# ---------------------------------------------------------------- valuation systems

def gamma_brute_force(inst, limit: int = 10 ** 6, first_only: bool = True):
    """Every (or the first) nonzero point of a valuation system, by enumeration."""
    F = inst.field
    p = F.p
    cols = inst.num_unknowns()
    if p ** cols > limit:
        raise DomainError(f"instance has p^{cols} points, above the limit {limit}")
    inst.check_precision()
    blocks = []
    for i, row in enumerate(inst.A):
        lows = [a.lead_exp - d for a, d in zip(row, inst.deg_bounds) if d >= 0 and not a.is_zero]
        if not lows:
            continue
        lo, hi = min(lows), inst.r[i]
        if lo >= hi:
            continue
        blocks.append(np.hstack([_digit_block(a, lo, hi, d) for a, d in zip(row, inst.deg_bounds) if d >= 0]))
    out = []
    for start in range(1, p ** cols, CHUNK):
        X = all_vectors(p, cols, start, start + CHUNK)
        ok = np.ones(X.shape[0], dtype=bool)
        for H in blocks:
            ok &= ~((X @ H.T) % p).any(axis=1)
        for k in np.flatnonzero(ok):
            out.append(X[k].copy())
            if first_only:
                return _to_point(inst, out[0])
    if first_only:
        return None
    return [_to_point(inst, v) for v in out]


def _to_point(inst, vec):
    from .linforms import IntegralPoint

    coords = []
    pos = 0
    for d in inst.deg_bounds:
        if d < 0:
            coords.append(inst.field.poly())
        else:
            coords.append(inst.field.poly([int(v) for v in vec[pos:pos + d + 1]]))
            pos += d + 1
    return IntegralPoint(coords)
