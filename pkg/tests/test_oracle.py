import random

import numpy as np
import pytest

from ffapprox.algebraic import example_surd, surd_to_series
from ffapprox.errors import DomainError, PrecisionError
from ffapprox.laurent import LaurentSeries, from_rational, frac_norm
from ffapprox.linforms import GammaInstance
from ffapprox.oracle import (FormDigits, all_vectors, best_simultaneous, enumeration_count, estimate_B,
                             gamma_brute_force, mahler_alpha, mahler_extremal_check, monic_vectors,
                             product_minimum, verify_lower_bound)
from ffapprox.ring import GF, RationalFn
from ffapprox.sampling import random_series, random_surd
from ffapprox.suites import check_surd_constant, cubic_pair

F3, F5 = GF(3), GF(5)


# ---------------------------------------------------------------- enumeration

@pytest.mark.parametrize("p,length", [(2, 5), (3, 4), (5, 3)])
def test_all_vectors_cover_space(p, length):
    X = all_vectors(p, length)
    assert X.shape == (p ** length, length)
    assert len({tuple(r) for r in X}) == p ** length
    # chunked enumeration is the same sequence
    parts = np.vstack([all_vectors(p, length, s, s + 7) for s in range(0, p ** length, 7)])
    assert (parts == X).all()


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_degree_exact_counts(p):
    for d in range(4):
        M = monic_vectors(p, d)
        assert M.shape[0] * (p - 1) == enumeration_count(p, d) == (p - 1) * p ** d
        assert (M[:, -1] == 1).all()


# ---------------------------------------------------------------- table cells against series arithmetic

def test_form_digits_match_series():
    rng = random.Random(0)
    for F in (F3, F5):
        for _ in range(5):
            thetas = [random_series(F, rng, 25) for _ in range(2)]
            degs = [3, 2]
            X = all_vectors(F.p, 7)[rng.sample(range(1, F.p ** 7), 40)]
            e, sure = FormDigits(thetas, degs).exponents(X)
            for row, ek, sk in zip(X, e, sure):
                x = [F.poly(row[:4].tolist()), F.poly(row[4:].tolist())]
                v = frac_norm(thetas[0] * x[0] + thetas[1] * x[1])
                if sk:
                    assert v.exp == ek
                else:
                    assert v.at_least or v.exp >= ek


def test_table_cells_recompute():
    theta = surd_to_series(random_surd(F3, random.Random(1)), 30)
    for row in best_simultaneous([theta], 5):
        for w in row.witnesses:
            assert frac_norm(theta * w) == row.best
        assert row.count == 3 ** row.deg


# ---------------------------------------------------------------- best simultaneous approximation

def test_best_table_alpha_1_0():
    alpha = example_surd(F5.T)
    theta = surd_to_series(alpha, 30)
    rows = best_simultaneous([theta], 6)
    for row in rows:
        assert row.product_exp() >= 1
    # every degree carries a convergent denominator here, so equality holds throughout
    assert all(row.product_exp() == 1 for row in rows)


def test_best_table_rational_hits_zero():
    theta = from_rational(RationalFn(F3.const(1), F3.parse("T^2+T+2")))
    rows = best_simultaneous([theta], 3)
    assert not rows[1].best.is_zero
    assert rows[2].best.is_zero
    assert F3.parse("T^2+T+2") in rows[2].witnesses


def test_best_table_pair_meets_dirichlet():
    rng = random.Random(2)
    thetas = [surd_to_series(random_surd(F3, rng), 30) for _ in range(2)]
    rows = best_simultaneous(thetas, 4)
    for h in range(5):
        best = max(r.best._key() for r in rows[:h + 1])
        assert best >= h // 2 + 1


def test_parallel_matches_serial():
    rng = random.Random(3)
    thetas = [surd_to_series(random_surd(F3, rng), 30) for _ in range(2)]
    a = [r.to_json() for r in best_simultaneous(thetas, 5, jobs=1)]
    b = [r.to_json() for r in best_simultaneous(thetas, 5, jobs=2)]
    assert a == b


# ---------------------------------------------------------------- lower bound shadow

def test_lower_bound_surd_constant():
    rng = random.Random(4)
    for _ in range(3):
        ok, detail = check_surd_constant(random_surd(F3, rng), 6)
        assert ok, detail


def test_lower_bound_cubic_pair():
    rep = verify_lower_bound(cubic_pair(5), 6)
    assert rep.gamma_exp is not None and rep.stable


def test_lower_bound_rational_component():
    theta = LaurentSeries.exact(RationalFn(F3.const(1), F3.parse("T+1")))
    rep = verify_lower_bound([theta], 3)
    assert rep.gamma_exp is None and not rep.stable


def test_lower_bound_needs_precision():
    theta = surd_to_series(random_surd(F3, random.Random(5)), 6)
    with pytest.raises(PrecisionError):
        verify_lower_bound([theta], 6)


# ---------------------------------------------------------------- product estimator

def test_B_rational_component_exact_zero():
    rng = random.Random(6)
    thetas = [from_rational(RationalFn(F3.const(1), F3.T)), surd_to_series(random_surd(F3, rng), 30)]
    est = estimate_B(thetas, 1, 4)
    assert est.exact_zero and est.value() is None
    assert all(e is None for _, e in est.windows)


def test_B_surd_pair_lambda_one():
    rng = random.Random(7)
    for _ in range(3):
        thetas = [surd_to_series(random_surd(F3, rng), 40) for _ in range(2)]
        est = estimate_B(thetas, 1, 4)
        assert all(e >= 1 for _, e in est.windows)


def test_B_lambda_zero_monotone():
    rng = random.Random(8)
    thetas = [surd_to_series(random_surd(F3, rng), 40) for _ in range(2)]
    full = [estimate_B(thetas, 0, d).windows[0][1] for d in range(5)]
    assert all(a <= b for a, b in zip(full, full[1:]))


# ---------------------------------------------------------------- Mahler's example

def test_mahler_series_shift():
    a = mahler_alpha(3, 30)
    assert [a.coeff(e) for e in range(1, 11)] == [1, 0, 1, 0, 0, 0, 0, 0, 1, 0]


def test_mahler_witnesses_p3():
    w = mahler_extremal_check(3, 4, 40)
    assert any(q == F3.T for q, _ in w.witnesses)
    assert len(w.degrees()) >= 2
    for q, e in w.witnesses:
        assert frac_norm(mahler_alpha(3, 40) * q).exp == 2 * q.degree == e


def test_mahler_witness_p5():
    w = mahler_extremal_check(5, 2, 40)
    assert any(q == F5.T for q, _ in w.witnesses)


def test_mahler_precision_guard():
    with pytest.raises(PrecisionError):
        mahler_extremal_check(3, 4, 10)


# ---------------------------------------------------------------- misc guards

def test_gamma_brute_force_limit():
    one = LaurentSeries.exact(F3.const(1))
    inst = GammaInstance([[one] * 3], [1], [5, 5, 5])
    with pytest.raises(DomainError):
        gamma_brute_force(inst, limit=1000)


def test_product_minimum_rational():
    theta = LaurentSeries.exact(RationalFn(F3.const(1), F3.T))
    val, wit = product_minimum([[theta]], 2)
    assert val is None and wit == ["T"]
