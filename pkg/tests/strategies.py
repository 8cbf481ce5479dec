"""Hypothesis strategies for field elements."""
from hypothesis import strategies as st

from ffapprox.laurent import LaurentSeries
from ffapprox.ring import GF

PRIMES = [3, 5, 7]


def polys(p: int, max_deg: int = 4, nonzero: bool = False):
    F = GF(p)
    coeffs = st.lists(st.integers(0, p - 1), min_size=1 if nonzero else 0, max_size=max_deg + 1)
    s = coeffs.map(F.poly)
    return s.filter(bool) if nonzero else s


def series(p: int, prec: int = 12, lead=(-3, 3)):
    F = GF(p)

    @st.composite
    def build(draw):
        e0 = draw(st.integers(*lead))
        n = prec - e0
        c = draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n))
        c[0] = draw(st.integers(1, p - 1))
        return LaurentSeries(F, e0, c, prec)

    return build()
