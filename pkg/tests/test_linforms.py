import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ffapprox.algebraic import parse_surd, surd_to_series
from ffapprox.errors import DomainError, PrecisionError
from ffapprox.laurent import LaurentSeries, QExponent, frac_norm, from_rational, valuation
from ffapprox.linforms import (GammaInstance, check_point, dirichlet_simultaneous, dirichlet_single,
                               first_kernel_vector, flexible_bounds, frac_exponents, general_linear_forms,
                               general_target, inverse, linear_form, rref_mod_p, simultaneous_target,
                               solve_gamma, transpose_form, transpose_target,
                               worst_exponent)
from ffapprox.oracle import best_simultaneous, gamma_brute_force
from ffapprox.ring import GF, RationalFn
from ffapprox.sampling import random_square_instance, random_square_matrix, random_surd

F3, F5 = GF(3), GF(5)


def ex(a):
    return LaurentSeries.exact(a)


def surd(text, F, prec=20):
    return surd_to_series(parse_surd(text, F), prec)


def best_exp_upto(thetas, max_deg):
    """Best max_i ||x theta_i|| exponent over all nonzero x with deg x <= max_deg."""
    rows = best_simultaneous(thetas, max_deg)
    return max(r.best._key() for r in rows)


# ---------------------------------------------------------------- linear algebra

@pytest.mark.parametrize("p", [2, 3, 5, 7])
@given(data=st.data())
def test_kernel_vector_is_in_kernel(p, data):
    rows = data.draw(st.integers(0, 6))
    cols = data.draw(st.integers(1, 7))
    M = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=rows * cols, max_size=rows * cols)),
                 dtype=np.int64).reshape(rows, cols)
    v = first_kernel_vector(M, p)
    if v is None:
        # full column rank
        assert len(rref_mod_p(M, p)[1]) == cols
    else:
        assert v.any() and not ((M @ v) % p).any()


def test_rref_is_deterministic():
    M = np.array([[0, 2, 1], [1, 1, 0], [2, 0, 1]])
    R1, p1 = rref_mod_p(M, 3)
    R2, p2 = rref_mod_p(M.copy(), 3)
    assert p1 == p2 and (R1 == R2).all()


# ---------------------------------------------------------------- solve_gamma examples

def test_identity_system_has_no_point():
    one, nil = ex(F3.const(1)), ex(F3.poly())
    inst = GammaInstance([[one, nil], [nil, one]], [1, 1], [2, 2])
    assert solve_gamma(inst) is None
    assert gamma_brute_force(inst) is None


def test_small_system_against_enumeration():
    alpha = surd("surd:(0+sqrt(T^2+1))/1", F3, 10)
    one = ex(F3.const(1))
    # r = 3 is one past what this surd admits at these degrees: both methods find nothing
    inst = GammaInstance([[one, -alpha]], [3], [2, 2])
    assert solve_gamma(inst) is None
    assert gamma_brute_force(inst) is None
    inst = GammaInstance([[one, -alpha]], [2], [2, 2])
    y, x = solve_gamma(inst)
    assert valuation(-(alpha * x) + y).exp >= 2
    everything = gamma_brute_force(inst, first_only=False)
    assert everything and all(check_point(inst, pt) for pt in everything)


def test_precision_deficit_is_named():
    a = LaurentSeries(F3, 0, [1, 1, 1], 3)
    inst = GammaInstance([[a, ex(F3.const(1))]], [4], [2, 2])
    with pytest.raises(PrecisionError, match="deficit 3"):
        solve_gamma(inst)


def test_pinned_variable_stays_zero():
    a = surd("surd:(0+sqrt(T^2+1))/1", F3, 10)
    inst = GammaInstance([[a, ex(F3.const(1))]], [3], [-1, 4])
    x = solve_gamma(inst)
    assert x is None or not x[0]


def test_solver_equals_enumeration_random():
    rng = random.Random(5)
    for _ in range(40):
        F = GF(rng.choice([2, 3]))
        m = rng.randint(1, 3)
        n = rng.randint(1, 2)
        A = [[ex(F.poly([rng.randrange(F.p) for _ in range(rng.randint(0, 2))]))
              if rng.random() < 0.5 else LaurentSeries(F, rng.randint(-1, 1), [1] + [rng.randrange(F.p) for _ in range(12)], 12)
              for _ in range(m)] for _ in range(n)]
        degs = [rng.randint(-1, 2) for _ in range(m)]
        r = [rng.randint(-2, 3) for _ in range(n)]
        inst = GammaInstance(A, r, degs)
        if F.p ** inst.num_unknowns() > 20000:
            continue
        x = solve_gamma(inst)
        bf = gamma_brute_force(inst)
        assert (x is None) == (bf is None)
        if x is not None:
            assert check_point(inst, x)


# ---------------------------------------------------------------- square systems

def test_inverse_of_random_matrix():
    rng = random.Random(1)
    for n in (1, 2, 3):
        A, d = random_square_matrix(F5, rng, n)
        B = inverse(A)
        for i in range(n):
            for j in range(n):
                s = ex(F5.poly())
                for k in range(n):
                    s = s + A[i][k] * B[k][j]
                target = 1 if i == j else 0
                assert (s - target).is_zero


def test_threshold_guarantee_small_batch():
    rng = random.Random(2)
    for _ in range(30):
        F = GF(rng.choice([3, 5]))
        inst = random_square_instance(F, rng, rng.randint(1, 3), -rng.randint(1, 3))
        x = solve_gamma(inst)
        assert x is not None and check_point(inst, x)


def test_forced_degree_bounds_are_complete():
    """Without any degree bound, every solution of a square system already obeys the forced ones."""
    rng = random.Random(3)
    for _ in range(15):
        inst = random_square_instance(F3, rng, 2, -1)
        wide = GammaInstance(inst.A, inst.r, [max(d, 0) + 1 for d in inst.deg_bounds])
        if 3 ** wide.num_unknowns() > 50000:
            continue
        for pt in gamma_brute_force(wide, first_only=False):
            for c, d in zip(pt, inst.deg_bounds):
                assert not c or c.degree <= d


# ---------------------------------------------------------------- single and simultaneous approximation

def test_single_tightness_example():
    theta = from_rational(RationalFn(F3.const(1), F3.parse("T^2")), 10)
    x = dirichlet_single(theta, 2)
    assert x == F3.const(1)
    assert frac_norm(theta * x) == QExponent(2)
    # nothing with |x| < q^2 does better
    assert best_exp_upto([theta], 1) == 2


def test_single_polynomial_theta():
    theta = ex(F3.parse("T^2+1"))
    x = dirichlet_single(theta, 3)
    assert frac_norm(theta * x).is_zero


def test_single_surd_against_search():
    theta = surd("surd:(0+sqrt(T^2+1))/1", F3, 10)
    x = dirichlet_single(theta, 3)
    v = frac_norm(theta * x)
    assert x and x.degree <= 2 and v.exp >= 3
    assert best_exp_upto([theta], 2) >= 3


def test_simultaneous_surd_pair():
    thetas = [surd("surd:(0+sqrt(T^2+1))/1", F5), surd("surd:(0+sqrt(T^2+2))/1", F5)]
    x = dirichlet_simultaneous(thetas, 2)
    norms = frac_exponents([[t] for t in thetas], [x])
    assert x.degree <= 2 and all(v.exp >= 2 for v in norms)
    assert best_exp_upto(thetas, 2) >= worst_exponent(norms).exp


def test_simultaneous_rational_thetas():
    thetas = [ex(F3.T), ex(F3.parse("T^2+2"))]
    x = dirichlet_simultaneous(thetas, 2)
    assert all(v.is_zero for v in frac_exponents([[t] for t in thetas], [x]))
    assert all(v.is_zero for v in frac_exponents([[t] for t in thetas], [F3.const(1)]))


def test_single_vs_simultaneous_for_one_theta():
    theta = surd("surd:(T+sqrt(T^2+2))/T", F5)
    for h in range(1, 5):
        xs = dirichlet_single(theta, h)
        xm = dirichlet_simultaneous([theta], h)
        assert xs.degree < h and frac_norm(theta * xs).exp >= h
        assert xm.degree <= h and frac_norm(theta * xm).exp >= h + 1
        assert simultaneous_target(1, h) == h + 1


# ---------------------------------------------------------------- one form, several unknowns

def test_transpose_example():
    thetas = [surd("surd:(0+sqrt(T^2+1))/1", F3), from_rational(RationalFn(F3.const(1), F3.parse("T^3+T+1")))]
    x = transpose_form(thetas, 1)
    v = frac_norm(linear_form(thetas, list(x)))
    assert x.max_degree() <= 1 and (v.is_zero or v.exp >= 4)
    assert transpose_target(2, 1) == 4


def test_transpose_common_denominator():
    d = F3.parse("T^2+1")
    thetas = [ex(RationalFn(F3.const(1), d)), ex(RationalFn(F3.T, d))]
    x = transpose_form(thetas, 2)
    v = frac_norm(linear_form(thetas, list(x)))
    assert v.is_zero or v.exp >= transpose_target(2, 2)
    assert frac_norm(linear_form(thetas, [d, F3.poly()])).is_zero


def test_general_specialisations():
    rng = random.Random(4)
    for _ in range(5):
        col = [[surd_to_series(random_surd(F3, rng), 30)] for _ in range(2)]
        for h in range(0, 3):
            assert general_linear_forms(col, h)[0] == dirichlet_simultaneous([r[0] for r in col], h)
            row = [[c[0] for c in col]]
            assert general_linear_forms(row, h) == transpose_form(row[0], h)
            assert general_target(2, 1, h) == simultaneous_target(2, h)
            assert general_target(1, 2, h) == transpose_target(2, h)


def test_general_two_by_two_surds():
    rng = random.Random(6)
    Theta = [[surd_to_series(random_surd(F3, rng), 30) for _ in range(2)] for _ in range(2)]
    x = general_linear_forms(Theta, 2)
    R = general_target(2, 2, 2)
    norms = frac_exponents(Theta, list(x))
    assert x.max_degree() <= 2 and all(v.is_zero or v.exp >= R for v in norms)


def test_general_zero_matrix():
    Theta = [[ex(F3.poly()), ex(F3.poly())]]
    x = general_linear_forms(Theta, 1)
    assert not x.is_zero
    assert all(v.is_zero for v in frac_exponents(Theta, [F3.const(1), F3.poly()]))


# ---------------------------------------------------------------- flexible targets

def test_flexible_trivial_case():
    theta = surd("surd:(-T+sqrt(T^2+4))/2", F5)
    x = flexible_bounds([[theta]], [0, 0], [0])
    assert x[0].degree == 0
    assert frac_norm(theta * x[0]).exp >= 1


def test_flexible_extra_factor():
    rng = random.Random(7)
    Theta = [[surd_to_series(random_surd(F5, rng), 30), surd_to_series(random_surd(F5, rng), 30)]]
    t = [2, 1, 1]
    x0 = flexible_bounds(Theta, t, [0])
    x1 = flexible_bounds(Theta, t, [1])
    assert frac_exponents(Theta, list(x0))[0].exp >= 3
    assert frac_exponents(Theta, list(x1))[0].exp >= 4
    assert x1.max_degree() <= 1


def test_flexible_rejects_unbalanced():
    Theta = [[ex(F3.T), ex(F3.T)]]
    with pytest.raises(DomainError, match="balance"):
        flexible_bounds(Theta, [2, 1, 0], [0])
    with pytest.raises(DomainError):
        flexible_bounds(Theta, [1, 1, 0], [2])
