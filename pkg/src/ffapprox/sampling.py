"""Seeded random instances shared by the verification suites and the tests."""
from __future__ import annotations

import random

from .algebraic import QuadraticSurd, surd_to_series
from .errors import DomainError
from .laurent import LaurentSeries
from .linforms import det
from .ring import FieldConfig, Poly, RationalFn, is_square


def rand_poly(F: FieldConfig, deg: int, rng: random.Random, monic: bool = False) -> Poly:
    if deg < 0:
        return F.poly()
    c = [rng.randrange(F.p) for _ in range(deg + 1)]
    c[-1] = 1 if monic else rng.randrange(1, F.p)
    return F.poly(c)


def rand_nonzero(F: FieldConfig, max_deg: int, rng: random.Random) -> Poly:
    return rand_poly(F, rng.randint(0, max_deg), rng)


def random_surd(F: FieldConfig, rng: random.Random, d_degs=(2, 4), pq_deg: int = 2) -> QuadraticSurd:
    """(P + sqrt D)/Q with D of even degree, residue leading coefficient, not a square."""
    while True:
        dd = rng.choice(d_degs)
        D = rand_poly(F, dd, rng)
        if F.sqrt(D.lc) is None or is_square(D) is not None:
            continue
        P = rand_poly(F, rng.randint(-1, pq_deg), rng)
        Q = rand_nonzero(F, pq_deg, rng)
        return QuadraticSurd(P, Q, D, rng.choice((1, -1)))


def random_rational(F: FieldConfig, rng: random.Random, max_deg: int = 3) -> RationalFn:
    while True:
        den = rand_poly(F, rng.randint(1, max_deg), rng, monic=True)
        num = rand_nonzero(F, max_deg, rng)
        r = RationalFn(num, den)
        if not r.is_poly():
            return r


def random_series(F: FieldConfig, rng: random.Random, prec: int, lead_range=(-2, 2)) -> LaurentSeries:
    lead = rng.randint(*lead_range)
    n = prec - lead
    c = [rng.randrange(F.p) for _ in range(n)]
    c[0] = rng.randrange(1, F.p)
    return LaurentSeries(F, lead, c, prec)


def random_theta(F: FieldConfig, rng: random.Random, prec: int, kind: str | None = None) -> LaurentSeries:
    """A surd expansion, an exact rational or a random truncated series."""
    kind = kind or rng.choice(("surd", "rational", "series"))
    if kind == "surd" and F.p > 2:
        return surd_to_series(random_surd(F, rng), prec)
    if kind == "rational":
        return LaurentSeries.exact(random_rational(F, rng))
    return random_series(F, rng, prec)


def random_form(F: FieldConfig, rng: random.Random, delta_degs=(2, 4), coeff_deg: int = 2):
    from .quadform import BinaryQuadraticForm

    while True:
        a = rand_poly(F, rng.randint(0, coeff_deg), rng)
        b = rand_poly(F, rng.randint(-1, coeff_deg), rng)
        c = rand_poly(F, rng.randint(-1, coeff_deg), rng)
        delta = b * b - (a * c).scale(4)
        if not delta or delta.degree not in delta_degs:
            continue
        if F.sqrt(delta.lc) is None or is_square(delta) is not None:
            continue
        return BinaryQuadraticForm(a, b, c)


def random_square_matrix(F: FieldConfig, rng: random.Random, n: int, prec: int = 30):
    """n x n matrix of exact rationals and truncated series with nonvanishing determinant."""
    while True:
        A = []
        for _ in range(n):
            row = []
            for _ in range(n):
                k = rng.random()
                if k < 0.4:
                    row.append(LaurentSeries.exact(rand_poly(F, rng.randint(-1, 2), rng)))
                elif k < 0.7:
                    row.append(LaurentSeries.exact(random_rational(F, rng, 2)))
                else:
                    row.append(random_series(F, rng, prec, (-1, 2)))
            A.append(row)
        try:
            d = det(A)
        except DomainError:
            continue
        if not d.is_zero:
            return A, d


def random_square_instance(F: FieldConfig, rng: random.Random, n: int, excess: int, prec: int = 30):
    """Square valuation system with sum(r) = v(det A) + n + excess.

    excess < 0 puts the instance under the counting threshold, where a nonzero
    solution is guaranteed.  Degree bounds are the ones forced by A^{-1}.
    """
    from .linforms import GammaInstance, square_degree_bounds

    A, d = random_square_matrix(F, rng, n, prec)
    total = d.lead_exp + n + excess
    r = [0] * n
    for _ in range(abs(total)):
        r[rng.randrange(n)] += 1 if total > 0 else -1
    # spread a little more without changing the sum
    for _ in range(n):
        i, j = rng.randrange(n), rng.randrange(n)
        r[i] += 1
        r[j] -= 1
    degs = square_degree_bounds(A, r)
    return GammaInstance(A, r, degs)
