"""Command-line front end.  Every subcommand prints one JSON document (``--json``) or a
readable rendering of the same document, and exits with the code of the error class."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .algebraic import format_surd, parse_surd, surd_to_json, surd_to_series
from .errors import FFApproxError, NoSolutionError, ParseError, VerificationError
from .laurent import LaurentSeries, exp_to_json, format_series, parse_series
from .ring import GF, format_poly, parse_poly

SCHEMA = 1


# ---------------------------------------------------------------- input helpers

def parse_element(text: str, F, prec: int) -> LaurentSeries:
    """A series spec, a rat: spec, a bare polynomial, or a surd expanded to ``prec``."""
    s = text.strip()
    if s.startswith("surd:"):
        return surd_to_series(parse_surd(s, F), prec)
    return parse_series(s, F)


def parse_row(text: str, F, prec: int) -> list[LaurentSeries]:
    return [parse_element(t, F, prec) for t in text.split(";")]


def parse_int_list(text: str, what: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip() != ""]
    except ValueError:
        raise ParseError(f"{what} must be a comma-separated list of integers", text, 0) from None


def read_json(source: str) -> dict:
    try:
        if source == "-":
            raw = sys.stdin.read()
        else:
            with open(source) as fh:
                raw = fh.read()
    except OSError as e:
        raise ParseError(f"cannot read {source}: {e.strerror}") from None
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg} (line {e.lineno}, column {e.colno})", source, e.pos) from None
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object", source, 0)
    return data


def field_from(args, data: dict | None = None):
    p = args.p
    if p is None and data is not None and "p" in data:
        p = data["p"]
    if p is None:
        p = 3
    try:
        return GF(int(p))
    except (TypeError, ValueError) as e:
        raise ParseError(f"bad prime p={p!r}: {e}") from None


def _require(data: dict, key: str):
    if key not in data:
        raise ParseError(f"input JSON lacks the key {key!r}")
    return data[key]


def parse_matrix(rows, F, prec: int) -> list[list[LaurentSeries]]:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) and r for r in rows):
        raise ParseError("matrix must be a non-empty list of non-empty lists of series specs")
    return [[parse_element(str(a), F, prec) for a in row] for row in rows]


def _norms_json(norms) -> list:
    return [v.to_json() for v in norms]


# ---------------------------------------------------------------- subcommands

def cmd_cf(args) -> dict:
    from .cfrac import PERIODIC, cf_series, cf_surd, convergent_quality, tau_of_surd

    F = field_from(args)
    text = args.input.strip()
    out: dict = {"input": text}
    if text.startswith("surd:"):
        alpha = parse_surd(text, F)
        exp = cf_surd(alpha)
        out["kind"] = "surd"
        out["surd"] = surd_to_json(alpha)
        out.update(exp.to_json())
        out["tau_exp"] = tau_of_surd(alpha).to_json()
        series = None
        if args.verify_quality:
            n = args.verify_quality
            need = max(exp.quotient(k + 1).degree + 2 * exp.convergents(k + 1)[k][1].degree for k in range(n))
            series = surd_to_series(alpha, max(args.prec, need + 2))
    else:
        series = parse_series(text, F)
        exp = cf_series(series, args.max_terms)
        out["kind"] = "series"
        out.update(exp.to_json())
        out["tau_exp"] = tau_of_surd(series).to_json() if series.is_exact else None
    if args.verify_quality:
        reports = [convergent_quality(exp, series, k, check_best=True).to_json() for k in range(args.verify_quality)]
        out["quality"] = reports
        if not all(r["equality"] and r["best_ok"] for r in reports):
            _fail(out, "convergent quality check failed")
    if exp.status == PERIODIC:
        out["period_quotients"] = [format_poly(a) for a in exp.period_quotients()]
    return out


class _Failed(Exception):
    def __init__(self, payload: dict, message: str):
        super().__init__(message)
        self.payload = payload


def _fail(payload: dict, message: str):
    """Return the payload but exit with the verification-failure code."""
    raise _Failed(payload, message)


def _thetas(args, F) -> list[LaurentSeries]:
    if not args.theta:
        raise ParseError("at least one --theta is required")
    return [parse_element(t, F, args.prec) for t in args.theta]


def cmd_approx(args) -> dict:
    from .linforms import dirichlet_simultaneous, dirichlet_single, frac_exponents, simultaneous_target, worst_exponent

    F = field_from(args)
    thetas = _thetas(args, F)
    n = len(thetas)
    mode = args.mode
    if mode == "auto":
        mode = "single" if n == 1 else "simultaneous"
    if mode == "single":
        if n != 1:
            raise ParseError("--mode single takes exactly one --theta")
        x = dirichlet_single(thetas[0], args.h)
        target, deg_limit = args.h, args.h - 1
    else:
        x = dirichlet_simultaneous(thetas, args.h)
        target, deg_limit = simultaneous_target(n, args.h), args.h
    norms = frac_exponents([[t] for t in thetas], [x])
    worst = worst_exponent(norms)
    ok = worst.is_zero or worst.exp >= target
    out = {
        "mode": mode,
        "h": args.h,
        "thetas": [format_series(t) for t in thetas],
        "x": format_poly(x),
        "deg_x": x.degree,
        "deg_limit": deg_limit,
        "target_exp": target,
        "norms": _norms_json(norms),
        "worst": worst.to_json(),
        "tight": (not worst.is_zero and not worst.at_least and worst.exp == target),
        "verified": ok and x.degree <= deg_limit,
    }
    if not out["verified"]:
        _fail(out, "solution misses its bound")
    return out


def cmd_approx_transpose(args) -> dict:
    from .linforms import linear_form, transpose_form, transpose_target
    from .laurent import frac_norm

    F = field_from(args)
    thetas = _thetas(args, F)
    x = transpose_form(thetas, args.h)
    v = frac_norm(linear_form(thetas, list(x)))
    target = transpose_target(len(thetas), args.h)
    out = {
        "h": args.h,
        "thetas": [format_series(t) for t in thetas],
        "x": x.to_json(),
        "max_deg": x.max_degree(),
        "target_exp": target,
        "norm": v.to_json(),
        "verified": (v.is_zero or v.exp >= target) and x.max_degree() <= args.h,
    }
    if not out["verified"]:
        _fail(out, "solution misses its bound")
    return out


def cmd_approx_general(args) -> dict:
    from .linforms import (flexible_bounds, frac_exponents, general_linear_forms, general_promised_exponent,
                           general_target, worst_exponent)

    data = read_json(args.input) if args.input else {}
    F = field_from(args, data)
    prec = int(data.get("prec", args.prec))
    if args.row:
        Theta = [parse_row(r, F, prec) for r in args.row]
    else:
        Theta = parse_matrix(_require(data, "theta"), F, prec)
    m = len(Theta[0])
    if any(len(r) != m for r in Theta):
        raise ParseError("all rows of theta must have the same length")
    n = len(Theta)
    h = args.h if args.h is not None else data.get("h")
    t = parse_int_list(args.t, "--t") if args.t else data.get("t")
    out: dict = {"p": F.p, "theta": [[format_series(a) for a in row] for row in Theta]}
    if t is not None:
        delta = parse_int_list(args.delta, "--delta") if args.delta else data.get("delta", [0] * n)
        x = flexible_bounds(Theta, t, delta)
        targets = [1 + t[i] + delta[i] for i in range(n)]
        limits = list(t[n:])
        out.update(t=list(t), delta=list(delta))
        C_exp, X_exp = min(targets), max(limits)
    else:
        if h is None:
            raise ParseError("approx-general needs --h (or t/delta)")
        h = int(h)
        x = general_linear_forms(Theta, h)
        R = general_target(n, m, h)
        targets, limits = [R] * n, [h] * m
        out.update(h=h, promised_exp=exp_to_json(general_promised_exponent(n, m, h)))
        C_exp, X_exp = R, h
    norms = frac_exponents(Theta, list(x))
    ok = all(v.is_zero or v.exp >= r for v, r in zip(norms, targets))
    ok = ok and all(not c or c.degree <= L for c, L in zip(x.coords, limits))
    out.update(
        x=x.to_json(),
        targets=targets,
        deg_limits=limits,
        norms=_norms_json(norms),
        worst=worst_exponent(norms).to_json(),
        C_exp=C_exp,
        X_exp=X_exp,
        verified=ok,
    )
    if not ok:
        _fail(out, "solution misses its bound")
    return out


def cmd_solve_gamma(args) -> dict:
    from .linforms import GammaInstance, check_point, form_valuations, solve_gamma

    data = read_json(args.input)
    F = field_from(args, data)
    prec = int(data.get("prec", args.prec))
    A = parse_matrix(_require(data, "A"), F, prec)
    r = [int(v) for v in _require(data, "r")]
    degs = [int(v) for v in _require(data, "deg_bounds")]
    inst = GammaInstance(A, r, degs)
    x = solve_gamma(inst)
    if x is None:
        raise NoSolutionError("the valuation system has only the zero solution")
    vals = form_valuations(inst.A, list(x))
    out = {
        "p": F.p,
        "r": r,
        "deg_bounds": degs,
        "x": x.to_json(),
        "valuations": _norms_json(vals),
        "verified": check_point(inst, x),
    }
    if not out["verified"]:
        _fail(out, "solver output fails the system")
    return out


def cmd_transfer(args) -> dict:
    from .transference import transfer

    data = read_json(args.input)
    F = field_from(args, data)
    prec = int(data.get("prec", args.prec))
    Theta = parse_matrix(_require(data, "theta"), F, prec)
    x = [parse_poly(str(c), F) for c in _require(data, "x")]
    C_exp = args.c_exp if args.c_exp is not None else int(_require(data, "C_exp"))
    X_exp = args.x_exp if args.x_exp is not None else int(_require(data, "X_exp"))
    cert = transfer(Theta, x, C_exp, X_exp)
    out = {"p": F.p, "theta": data["theta"], "x": [format_poly(c) for c in x]}
    out.update(cert.to_json())
    return out


def cmd_form(args) -> dict:
    from .quadform import (automorph, half_deg_delta, largest_quotient_degree, parse_form, roots,
                           sigma, sigma_bruteforce, tau_theta)

    F = field_from(args)
    f = parse_form(args.f, F)
    out: dict = {"form": f.to_json(), "op": args.op, "half_deg_delta": half_deg_delta(f)}
    th = roots(f).theta
    out["theta"] = format_surd(th)
    if args.op == "sigma":
        s = sigma_bruteforce(f)
        out["sigma_exp"] = sigma(f).exp
        out["witness"] = [format_poly(s.witness[0]), format_poly(s.witness[1])]
        out["deg_bound"] = s.deg_bound
    elif args.op == "tau":
        out["tau_exp"] = tau_theta(f).exp
    elif args.op == "D":
        out.update(largest_quotient_degree(f))
    else:
        T = automorph(f, prec=args.prec)
        out["automorph"] = T.to_json()
    return out


def cmd_verify(args) -> dict:
    from .suites import run_suite

    rep = run_suite(args.suite, args.p if args.p is not None else 3, args.max_deg, args.seed, jobs=args.jobs)
    out = rep.to_json()
    if not rep.passed:
        _fail(out, f"{len(rep.failures)} of {len(rep.checks)} checks failed")
    return out


def cmd_estimate_b(args) -> dict:
    from .oracle import estimate_B

    F = field_from(args)
    thetas = _thetas(args, F)
    try:
        lam = Fraction(args.lam)
    except (ValueError, ZeroDivisionError):
        raise ParseError("lambda must be a rational like 1 or 3/2", args.lam, 0) from None
    est = estimate_B(thetas, lam, args.max_deg)
    out = {"thetas": [format_series(t) for t in thetas]}
    out.update(est.to_json())
    out["value"] = exp_to_json(est.value())
    return out


COMMANDS = {
    "cf": cmd_cf,
    "approx": cmd_approx,
    "approx-transpose": cmd_approx_transpose,
    "approx-general": cmd_approx_general,
    "solve-gamma": cmd_solve_gamma,
    "transfer": cmd_transfer,
    "form": cmd_form,
    "verify": cmd_verify,
    "estimate-b": cmd_estimate_b,
}


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=None, help="field characteristic (prime, default 3)")
    common.add_argument("--prec", type=int, default=40, help="working precision for surd inputs")
    common.add_argument("--json", action="store_true", help="print machine-readable JSON")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for exhaustive searches")

    ap = argparse.ArgumentParser(prog="ffapprox", description="Diophantine approximation over F_p((1/T)).")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cf", parents=[common], help="continued fraction of a surd or series")
    p.add_argument("--input", required=True, help="surd:... , rat:... or ser:... spec")
    p.add_argument("--max-terms", type=int, default=50)
    p.add_argument("--verify-quality", type=int, default=0, metavar="N",
                   help="check the first N convergents exactly and against all smaller denominators")

    p = sub.add_parser("approx", parents=[common], help="simultaneous approximation of theta_1..theta_n")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--theta", action="append", default=[])
    p.add_argument("--mode", choices=("auto", "single", "simultaneous"), default="auto",
                   help="single: |x| < q^h, ||x theta|| <= q^-h; simultaneous: |x| <= q^h")

    p = sub.add_parser("approx-transpose", parents=[common], help="one small linear form in n unknowns")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--theta", action="append", default=[])

    p = sub.add_parser("approx-general", parents=[common], help="n linear forms in m unknowns")
    p.add_argument("--input", help="JSON with theta (rows of specs), h or t/delta")
    p.add_argument("--row", action="append", default=[], help="one row of specs separated by ';'")
    p.add_argument("--h", type=int)
    p.add_argument("--t", help="comma-separated t_1..t_{n+m}")
    p.add_argument("--delta", help="comma-separated delta_1..delta_n")

    p = sub.add_parser("solve-gamma", parents=[common], help="solve a valuation system from JSON")
    p.add_argument("--input", required=True, help="instance JSON file, or - for stdin")

    p = sub.add_parser("transfer", parents=[common], help="transposed solution from an approx-general result")
    p.add_argument("--input", required=True, help="approx-general JSON output, or - for stdin")
    p.add_argument("--c-exp", type=int, help="override C_exp (||L_i(x)|| <= q^-C_exp)")
    p.add_argument("--x-exp", type=int, help="override X_exp (|x_j| <= q^X_exp)")

    p = sub.add_parser("form", parents=[common], help="constants of a binary quadratic form")
    p.add_argument("--f", required=True, help="'<a>;<b>;<c>' for a x^2 + b x y + c y^2")
    p.add_argument("--op", choices=("sigma", "tau", "automorph", "D"), required=True)

    p = sub.add_parser("verify", parents=[common], help="run a randomized verification suite")
    p.add_argument("--suite", choices=("dirichlet", "lower", "quadform", "mahler", "transfer"), required=True)
    p.add_argument("--max-deg", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("estimate-b", parents=[common], help="finite-horizon product estimate")
    p.add_argument("--theta", action="append", default=[])
    p.add_argument("--lam", default="1", help="exponent lambda, rational")
    p.add_argument("--max-deg", type=int, default=4)
    return ap


def _render(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_render(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                lines.extend(_render(v, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(pad + _inline(obj))
    return lines


def _flat(v) -> bool:
    if isinstance(v, dict):
        return len(v) <= 3 and all(not isinstance(x, (dict, list)) for x in v.values())
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) for x in v)
    return True


def _inline(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    if v is None:
        return "-"
    return str(v)


def emit(payload: dict, as_json: bool, stream=None):
    stream = stream or sys.stdout
    if as_json:
        stream.write(json.dumps(payload, indent=2) + "\n")
    else:
        stream.write("\n".join(_render(payload)) + "\n")


def run(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    head = {"schema": SCHEMA, "command": args.command}
    try:
        body = COMMANDS[args.command](args)
        emit({**head, "ok": True, **body}, args.json)
        return 0
    except _Failed as e:
        emit({**head, "ok": False, "error": {"kind": "VerificationError", "message": str(e)}, **e.payload}, args.json)
        print(f"ffapprox: verification failed: {e}", file=sys.stderr)
        return VerificationError.exit_code
    except FFApproxError as e:
        code = e.exit_code
        emit({**head, "ok": False, "error": {"kind": type(e).__name__, "message": str(e), "exit_code": code}}, args.json)
        print(f"ffapprox: {type(e).__name__}: {e}", file=sys.stderr)
        return code
    except ZeroDivisionError as e:
        # e.g. a zero constant coefficient in a form or a vanishing denominator
        emit({**head, "ok": False, "error": {"kind": "DomainError", "message": str(e), "exit_code": 2}}, args.json)
        print(f"ffapprox: DomainError: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
