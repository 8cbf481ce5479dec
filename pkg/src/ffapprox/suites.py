"""Randomized verification suites: every proven bound checked against exact recomputation
or exhaustive search.  Each suite returns a list of named pass/fail checks."""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from .algebraic import hensel_root, surd_to_series
from .cfrac import cf_surd, convergents
from .errors import FFApproxError
from .laurent import LaurentSeries, exp_to_json
from .linforms import (dirichlet_simultaneous, dirichlet_single, frac_exponents, general_linear_forms,
                       general_target, simultaneous_target, worst_exponent)
from .oracle import best_simultaneous, mahler_extremal_check, verify_lower_bound
from .ring import GF, format_poly
from .sampling import random_form, random_surd, random_theta
from .transference import transfer

SUITES = ("dirichlet", "lower", "quadform", "mahler", "transfer")


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class SuiteReport:
    suite: str
    p: int
    max_deg: int
    seed: int
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "p": self.p,
            "max_deg": self.max_deg,
            "seed": self.seed,
            "passed": self.passed,
            "total": len(self.checks),
            "failed": len(self.failures),
            "checks": [c.to_json() for c in self.checks],
        }


def _guard(name: str, fn) -> Check:
    """Run one check; library errors count as failures with the message recorded."""
    try:
        ok, detail = fn()
        return Check(name, bool(ok), detail)
    except FFApproxError as e:
        return Check(name, False, {"error": type(e).__name__, "message": str(e)})


# ---------------------------------------------------------------- simultaneous approximation

def dirichlet_instance(p: int, rng: random.Random, max_h: int):
    n = rng.randint(1, 3)
    h = rng.randint(1, max_h)
    F = GF(p)
    prec = simultaneous_target(n, h) + h + 2
    thetas = [random_theta(F, rng, prec) for _ in range(n)]
    return thetas, h


def check_dirichlet(thetas, h: int, oracle: bool = False) -> tuple[bool, dict]:
    n = len(thetas)
    x = dirichlet_simultaneous(thetas, h)
    R = simultaneous_target(n, h)
    norms = frac_exponents([[t] for t in thetas], [x])
    worst = worst_exponent(norms)
    ok = bool(x) and x.degree <= h and (worst.is_zero or worst.exp >= R)
    detail = {"n": n, "h": h, "x": format_poly(x), "target": R, "norms": [v.to_json() for v in norms]}
    if oracle and ok:
        # the exhaustive optimum over the same degree is never worse than the solver
        row = best_simultaneous(thetas, x.degree)[-1]
        detail["oracle_best"] = row.best.to_json()
        ok = row.best._key() >= worst._key()
    return ok, detail


def check_dirichlet_single(theta: LaurentSeries, h: int) -> tuple[bool, dict]:
    x = dirichlet_single(theta, h)
    v = frac_exponents([[theta]], [x])[0]
    ok = bool(x) and x.degree < h and (v.is_zero or v.exp >= h)
    return ok, {"h": h, "x": format_poly(x), "norm": v.to_json()}


def suite_dirichlet(p: int, max_deg: int, seed: int = 0, count: int = 40) -> list[Check]:
    rng = random.Random(seed)
    checks = []
    for k in range(count):
        thetas, h = dirichlet_instance(p, rng, max(1, max_deg))
        checks.append(_guard(f"simultaneous[{k}] n={len(thetas)} h={h}",
                             lambda: check_dirichlet(thetas, h, oracle=(p ** h <= 3000))))
    F = GF(p)
    for k in range(count // 4):
        h = rng.randint(1, max(1, max_deg))
        theta = random_theta(F, rng, 2 * h + 2)
        checks.append(_guard(f"single[{k}] h={h}", lambda: check_dirichlet_single(theta, h)))
    return checks


# ---------------------------------------------------------------- lower-bound shadow

def cubic_pair(p: int, prec: int = 60):
    """(alpha, alpha^2) for the root alpha ~ -1/T of x^3 - T x - 1."""
    F = GF(p)
    f = [F.const(-1), -F.T, F.poly(), F.const(1)]
    a = hensel_root(f, None, prec)
    return [a, a * a]


def check_surd_constant(alpha, max_deg: int) -> tuple[bool, dict]:
    """For n = 1 the per-degree optimum over deg x <= max_deg is governed by the
    partial quotients: its largest exponent is max deg a_k over the convergents reached."""
    exp = cf_surd(alpha)
    k = 0
    while True:
        quots = exp.take(k + 2)
        conv = convergents(quots)
        if conv[k + 1][1].degree > max_deg:
            break
        k += 1
    expected = max(exp.quotient(i).degree for i in range(1, k + 2))
    theta = surd_to_series(alpha, 3 * max_deg + expected + 6)
    rep = verify_lower_bound([theta], max_deg)
    ok = rep.gamma_exp == expected
    return ok, {"surd": str(alpha), "gamma_exp": exp_to_json(rep.gamma_exp), "expected": expected}


def suite_lower(p: int, max_deg: int, seed: int = 0, count: int = 6, jobs: int = 1) -> list[Check]:
    rng = random.Random(seed)
    checks = []

    def cubic():
        rep = verify_lower_bound(cubic_pair(p), max_deg, jobs=jobs)
        return rep.stable and rep.gamma_exp is not None, rep.to_json()

    checks.append(_guard("cubic pair stable", cubic))
    if p > 2:
        F = GF(p)
        for k in range(count):
            alpha = random_surd(F, rng)
            checks.append(_guard(f"surd[{k}] constant", lambda: check_surd_constant(alpha, max_deg)))

    def rational():
        F = GF(p)
        theta = LaurentSeries.exact(F.const(1)) / LaurentSeries.exact(F.poly([1, 1]))
        rep = verify_lower_bound([theta], max(1, max_deg))
        # multiples of the denominator have zero norm: no positive constant exists
        return rep.gamma_exp is None and rep.per_degree[1] is None, rep.to_json()

    checks.append(_guard("rational theta has no constant", rational))
    return checks


# ---------------------------------------------------------------- quadratic forms

def check_form(f, max_deg: int) -> tuple[bool, dict]:
    from .quadform import conditional_lower_bound, half_deg_delta, largest_quotient_degree, sigma_bruteforce, tau_theta

    s = sigma_bruteforce(f)
    tau = tau_theta(f, check=False)
    h = half_deg_delta(f)
    D = largest_quotient_degree(f)
    lb = conditional_lower_bound(f, max_deg, s.exp)
    ok = tau.exp == s.exp + h and D["D"] == h + s.exp and not lb.exceptions
    return ok, {
        "form": str(f), "tau_exp": tau.exp, "sigma_exp": s.exp, "half_deg_delta": h,
        "D": D["D"], "applicable": lb.applicable, "exceptions": len(lb.exceptions),
    }


def check_automorph(f) -> tuple[bool, dict]:
    from .quadform import automorph

    T = automorph(f)
    return True, T.to_json()


def suite_quadform(p: int, max_deg: int, seed: int = 0, count: int = 10) -> list[Check]:
    rng = random.Random(seed)
    F = GF(p)
    checks = []
    for k in range(count):
        f = random_form(F, rng, delta_degs=(2,) if p >= 7 else (2, 4))
        checks.append(_guard(f"form[{k}] {f}", lambda: check_form(f, max_deg)))
        checks.append(_guard(f"automorph[{k}] {f}", lambda: check_automorph(f)))
    return checks


# ---------------------------------------------------------------- Mahler's example

def suite_mahler(p: int, max_deg: int, seed: int = 0) -> list[Check]:
    prec = max(40, p * max_deg + 2)

    def run():
        w = mahler_extremal_check(p, max_deg, prec)
        T = GF(p).T
        ok = bool(w.witnesses) and (max_deg < 1 or any(q == T for q, _ in w.witnesses))
        return ok, w.to_json()

    return [_guard(f"mahler p={p} deg<={max_deg}", run)]


# ---------------------------------------------------------------- transference

def transfer_instance(p: int, rng: random.Random, max_h: int, shape=None):
    F = GF(p)
    if shape is None:
        shape = rng.choice([(1, 2), (2, 1), (2, 2), (1, 3), (3, 1)])
    n, m = shape
    h = rng.randint(0, max_h)
    prec = 4 * (h + 3) + 12
    Theta = [[random_theta(F, rng, prec, rng.choice(("rational", "series"))) for _ in range(m)] for _ in range(n)]
    return Theta, h


def check_transfer(Theta, h: int) -> tuple[bool, dict]:
    n, m = len(Theta), len(Theta[0])
    x = general_linear_forms(Theta, h)
    C = general_target(n, m, h)
    cert = transfer(Theta, list(x), C, h)
    l = n + m
    D_expected = (n * C + (n - 1) * h + l - 2) // (l - 1)
    ok = cert.D_exp == D_expected and cert.D_exp >= cert.promised_D_exp - 1 and cert.Y_exp >= cert.promised_Y_exp
    ok = ok and all(v.is_zero or v.exp >= cert.D_exp for v in cert.achieved_norms)
    ok = ok and cert.y.max_degree() <= cert.Y_exp
    return ok, {"n": n, "m": m, "h": h, "x": x.to_json(), "certificate": cert.to_json()}


def check_transfer_degenerate(theta, C: int, X: int) -> tuple[bool, dict]:
    """n = m = 1: the transferred bounds are exactly (C, X)."""
    from .linforms import dirichlet_single

    x = dirichlet_single(theta, C)
    cert = transfer([[theta]], [x], C, X)
    ok = cert.D_exp == C and cert.Y_exp == X
    return ok, cert.to_json()


def suite_transfer(p: int, max_deg: int, seed: int = 0, count: int = 10) -> list[Check]:
    rng = random.Random(seed)
    checks = []
    for k in range(count):
        Theta, h = transfer_instance(p, rng, max(0, max_deg))
        checks.append(_guard(f"transfer[{k}] {len(Theta)}x{len(Theta[0])} h={h}", lambda: check_transfer(Theta, h)))
    F = GF(p)
    C = rng.randint(1, max(1, max_deg))
    theta = random_theta(F, rng, 4 * C + 10, "series")
    checks.append(_guard(f"degenerate l=2 C={C}", lambda: check_transfer_degenerate(theta, C, C - 1)))
    return checks


def run_suite(name: str, p: int, max_deg: int, seed: int = 0, jobs: int = 1) -> SuiteReport:
    fn = {
        "dirichlet": suite_dirichlet,
        "lower": suite_lower,
        "quadform": suite_quadform,
        "mahler": suite_mahler,
        "transfer": suite_transfer,
    }[name]
    checks = fn(p, max_deg, seed, jobs=jobs) if name == "lower" else fn(p, max_deg, seed)
    return SuiteReport(name, p, max_deg, seed, checks)
