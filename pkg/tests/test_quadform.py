import random

import pytest

from ffapprox.algebraic import example_surd, surd_norm, surd_to_series, surd_trace
from ffapprox.cfrac import cf_surd
from ffapprox.errors import DomainError, ParseError
from ffapprox.laurent import valuation
from ffapprox.quadform import (BinaryQuadraticForm, automorph, conditional_lower_bound, form_of_surd,
                               half_deg_delta, largest_quotient_degree, linear_factor, parse_form,
                               reduce_with_representation, roots, sigma, sigma_bruteforce, tau_theta, tau_witnesses,
                               verify_automorph)
from ffapprox.ring import GF, RationalFn
from ffapprox.sampling import rand_poly, random_form, random_surd

F3, F5, F7 = GF(3), GF(5), GF(7)


def example_form(F, d: str):
    """x^2 + d xy - y^2."""
    return BinaryQuadraticForm(F.const(1), F.parse(d), F.const(-1))


# ---------------------------------------------------------------- roots

def test_roots_example():
    f = example_form(F5, "T")
    assert f.delta == F5.parse("T^2+4")
    assert roots(f).theta == example_surd(F5.T)


def test_vieta():
    rng = random.Random(0)
    for F in (F3, F5):
        for _ in range(10):
            f = random_form(F, rng)
            r = roots(f)
            assert surd_trace(r.theta) == RationalFn(-f.b, f.a)
            assert surd_norm(r.theta) == RationalFn(f.c, f.a)


def test_root_gap_is_half_discriminant():
    rng = random.Random(1)
    for _ in range(10):
        f = random_form(F5, rng)
        r = roots(f)
        gap = (surd_to_series(r.theta, 30) - surd_to_series(r.phi, 30)) * f.a
        assert valuation(gap).exp == -half_deg_delta(f)


def test_odd_discriminant_rejected():
    f = BinaryQuadraticForm(F3.const(1), F3.poly(), F3.parse("2*T^3"))   # delta = T^3
    assert f.delta == F3.parse("T^3")
    with pytest.raises(DomainError):
        roots(f)


def test_form_domain_errors():
    with pytest.raises(DomainError):
        BinaryQuadraticForm(F3.poly(), F3.T, F3.const(1))
    with pytest.raises(DomainError):
        BinaryQuadraticForm(F5.const(1), F5.parse("2*T"), F5.parse("T^2"))     # delta = 0 is a square
    with pytest.raises(ParseError):
        parse_form("1;T", F3)


def test_form_of_surd_roundtrip():
    rng = random.Random(2)
    for _ in range(10):
        a = random_surd(F5, rng)
        f = form_of_surd(a)
        th = surd_to_series(roots(f).theta, 30)
        assert (th - surd_to_series(a, 30)).is_zero


# ---------------------------------------------------------------- sigma and tau

@pytest.mark.parametrize("d", ["T", "T^2+1", "2*T^3+T"])
def test_example_family_sigma(d):
    f = example_form(F3, d)
    s = sigma_bruteforce(f)
    assert s.exp == 0
    assert abs(f(*s.witness).degree) == 0
    assert sigma(f).exp == 0


@pytest.mark.parametrize("d", ["T", "T^2+1", "2*T^3+T"])
def test_example_family_tau(d):
    f = example_form(F3, d)
    assert tau_theta(f).exp == F3.parse(d).degree


def test_sigma_scaling():
    rng = random.Random(3)
    for _ in range(8):
        f = random_form(F3, rng)
        c = rand_poly(F3, rng.randint(0, 2), rng)
        s0 = sigma_bruteforce(f).exp
        s1 = sigma_bruteforce(f.scaled(c), half_deg_delta(f) + 2).exp
        assert s1 == s0 - c.degree


def test_sigma_two_routes_random():
    rng = random.Random(4)
    for F in (F3, F5):
        for _ in range(8):
            f = random_form(F, rng, delta_degs=(4,))
            assert tau_theta(f).exp == sigma_bruteforce(f).exp + half_deg_delta(f)


def test_tau_range_and_witnesses():
    rng = random.Random(5)
    for _ in range(5):
        f = random_form(F3, rng)
        t = tau_theta(f)
        assert t.exp >= 1
        # convergent denominators Q_n followed by a quotient of top degree are witnesses
        e = cf_surd(roots(f).theta)
        conv = e.convergents(40)
        hits = [conv[n][1].degree for n in range(1, 39) if e.quotient(n + 1).degree == t.exp]
        need = hits[2]
        w = tau_witnesses(f, need)
        assert len(set(w)) >= 3
        assert {conv[n][1].monic() for n in range(1, 39)
                if e.quotient(n + 1).degree == t.exp and conv[n][1].degree <= need} <= set(w)


# ---------------------------------------------------------------- D identity

def test_largest_quotient_degree_example():
    out = largest_quotient_degree(example_form(F3, "T^2+1"))
    assert (out["D"], out["half_deg_delta"], out["t"]) == (2, 2, 0)


def test_largest_quotient_degree_random():
    rng = random.Random(6)
    for F in (F3, F5):
        for _ in range(8):
            f = random_form(F, rng)
            out = largest_quotient_degree(f)
            assert out["D"] == out["half_deg_delta"] + out["t"]


def test_content_shifts_D():
    g = example_form(F3, "T")
    for c in ("T", "T^2+1"):
        f = g.scaled(F3.parse(c))
        out = largest_quotient_degree(f)
        assert out["t"] == -F3.parse(c).degree
        assert out["D"] == largest_quotient_degree(g)["D"]


# ---------------------------------------------------------------- conditional lower bound

def test_conditional_lower_bound_small():
    rng = random.Random(7)
    for _ in range(3):
        f = form_of_surd(random_surd(F3, rng))
        rep = conditional_lower_bound(f, 5)
        assert not rep.exceptions and rep.applicable > 0


# ---------------------------------------------------------------- reduction

def test_reduce_trivial_representation():
    f = BinaryQuadraticForm(F3.parse("T^2+1"), F3.parse("T^3+T"), F3.parse("2*T"))
    g, S = reduce_with_representation(f, F3.const(1), F3.poly())
    assert g.a == f.a
    assert not g.b or g.b.degree <= f.a.degree - 1


def test_reduce_random_invariants():
    rng = random.Random(8)
    for _ in range(20):
        f = random_form(F5, rng)
        a0 = rand_poly(F5, rng.randint(0, 2), rng)
        b0 = rand_poly(F5, rng.randint(0, 2), rng)
        try:
            g, S = reduce_with_representation(f, a0, b0)
        except DomainError:
            continue
        assert g.delta == f.delta
        assert g.a == f(a0, b0)
        assert f.substitute(S) == g


def test_reduce_rejects_non_coprime():
    f = example_form(F3, "T")
    with pytest.raises(DomainError):
        reduce_with_representation(f, F3.T, F3.parse("T^2"))


# ---------------------------------------------------------------- automorphs

def test_automorph_example():
    f = example_form(F3, "T")
    T = automorph(f)
    assert T.a * T.d - T.b * T.c == F3.const(1)
    assert f.substitute(T.matrix) == f
    assert T.eta_exp >= 1


def test_automorph_square_doubles_eta():
    f = example_form(F3, "T")
    T = automorph(f)
    theta = surd_to_series(roots(f).theta, 40)
    x, y = F3.const(1), F3.poly()
    x2, y2 = T.apply(x, y, 2)
    lhs = valuation(linear_factor(theta, x2, y2))
    assert lhs.exp == 2 * T.eta_exp + valuation(linear_factor(theta, x, y)).exp
    xb, yb = T.apply(x2, y2, -2)
    assert (xb, yb) == (x, y)


def test_automorph_random():
    rng = random.Random(9)
    for F in (F3, F5, F7):
        for _ in range(5):
            f = random_form(F, rng, delta_degs=(2,))
            T = automorph(f)
            verify_automorph(f, T, surd_to_series(roots(f).theta, 60))
