"""Command line entry point: ``realginibre {exact,mc,verify,asymptotics}``.

Exit codes: 0 success, 1 a verification check failed, 2 usage error.
Reports are JSON ``{config, results, provenance}``; ``provenance.timestamp`` is
the only field that changes between identical invocations.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .appendix_linalg import build_cyclic, det_cyclic, gaussian_moment, invert_cyclic
from .asymptotics import (
    cumulant_scaling,
    mean_convergence,
    sigma2_limit,
    spq_convergence,
)
from .cumulant_engine import (
    EvenPolynomial,
    covariance_monomials,
    cumulant,
    variance_nr_exact,
)
from .monte_carlo import clt_test, normalized_fluctuations, run_ensemble, write_samples_csv
from .skew_basis import a_inner_quadrature, b_inner_quadrature, f_entry, skew_norm_constant

WORKERS_ENV = "REALGINIBRE_WORKERS"


class CheckFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# argument types
# ---------------------------------------------------------------------------

def _stat(text):
    try:
        return EvenPolynomial.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _default_workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_exact(args) -> list:
    n = args.n
    results = []
    for P in args.stat:
        kappas = {}
        for l in range(1, args.lmax + 1):
            rep = cumulant(P, l, n)
            kappas[l] = rep.value
            results.append(rep.to_dict())
        if args.lmax >= 2:
            results.append({"quantity": "kappa2_over_kappa1", "n": n, "statistic": str(P),
                            "value": kappas[2] / kappas[1], "method": "exact"})
    results.append({"quantity": "var_N_R", "n": n, "N": 2 * n, "value": variance_nr_exact(n),
                    "method": "exact"})
    for p in args.cov_grid:
        for q in args.cov_grid:
            if q < p:
                continue
            results.append({
                "quantity": "C_pq", "p": p, "q": q, "n": n,
                "value": covariance_monomials(p, q, n),
                "method": "exact",
                "scaling": "lambda/sqrt(2n)",
                "note": f"lambda/sqrt(n) scaling multiplies this by 2^{(p + q) // 2}",
            })
    return results


def cmd_mc(args) -> list:
    summary = run_ensemble(args.N, args.trials, args.stat, seed=args.seed,
                           workers=args.workers, retain_samples=bool(args.clt or args.samples) or None)
    res = summary.to_dict()
    if args.clt:
        res["clt"] = []
        for P in args.stat:
            z = normalized_fluctuations(summary, str(P))
            s2 = sigma2_limit(P)
            ks = clt_test(z, s2)
            res["clt"].append({"statistic": str(P), "sigma2_limit": s2,
                               "sample_variance": float(np.var(z, ddof=1)),
                               "ks_statistic": ks.statistic, "ks_pvalue": ks.pvalue,
                               "method": "mc"})
    if args.samples:
        write_samples_csv(args.samples, summary)
    return [res]


def _check(name, observed, threshold, **extra):
    return {"check": name, "observed": float(observed), "threshold": float(threshold),
            "passed": bool(observed <= threshold), "method": "oracle", **extra}


def verify_skew(quick=False) -> list:
    out = []
    ks = (1, 2) if quick else (1, 2, 3, 4)
    worst = 0.0
    for r in (0, 2, 4):
        for s in (0, 2, 4):
            for k1 in ks:
                for k2 in ks:
                    exact = float(f_entry(r, s, k1, k2).value)
                    quad = a_inner_quadrature(lambda x, y, r=r, s=s: x ** r * y ** s,
                                              2 * k1 - 2, 2 * k2 - 1)
                    worst = max(worst, abs(exact - quad) / abs(exact))
    out.append(_check("f_entry_vs_quadrature", worst, 1e-6))
    one = lambda x, y: 1.0  # noqa: E731
    unit = lambda z: 1.0  # noqa: E731
    jmax = 2 if quick else 3
    worst = 0.0
    for j in range(1, jmax + 1):
        for k in range(1, jmax + 1):
            scale = max(skew_norm_constant(j), skew_norm_constant(k))
            for a, b in ((2 * j - 2, 2 * k - 1), (2 * j - 2, 2 * k - 2), (2 * j - 1, 2 * k - 1)):
                val = a_inner_quadrature(one, a, b) + b_inner_quadrature(unit, a, b)
                target = skew_norm_constant(j) if (a, b) == (2 * j - 2, 2 * j - 1) else 0.0
                worst = max(worst, abs(val - target) / scale)
    out.append(_check("skew_orthogonality", worst, 1e-5))
    return out


def verify_appendix(seed=0, cases=200) -> list:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        m = int(rng.integers(3, 13))
        alpha = rng.choice([-1, 1], size=m - 1)
        z = float(rng.uniform(-0.9, 0.9))
        A = build_cyclic(m, alpha, z)
        inv = invert_cyclic(A)
        worst = max(worst, float(np.abs(A.toarray() @ inv - np.eye(m)).max()))
    out = [_check("cyclic_inverse_residual", worst, 1e-12)]
    spread = 0.0
    ratios = {}
    for m in range(3, 13):
        alpha = rng.choice([-1, 1], size=m - 1)
        r = [det_cyclic(build_cyclic(m, alpha, z)).ratio for z in (-0.7, -0.2, 0.3, 0.8)]
        ratios[m] = r[0]
        spread = max(spread, (max(r) - min(r)) / abs(r[0]))
    out.append(_check("det_closed_form_ratio_constant_in_z", spread, 1e-10,
                      ratios={str(k): v for k, v in ratios.items()}))
    A = build_cyclic(3, (1, -1), 0.4).toarray()
    w = gaussian_moment((2, 0, 0), A)
    lam = np.linalg.eigvalsh(A)
    ref = 0.5 * np.linalg.inv(A)[0, 0] * math.pi ** 1.5 / math.sqrt(np.prod(lam))
    out.append(_check("wick_second_moment", abs(w - ref) / abs(ref), 1e-12))
    return out


def verify_cross() -> list:
    worst = 0.0
    for n in (1, 2, 5, 10, 20):
        for p in (0, 2, 4):
            for q in (0, 2, 4):
                Pp, Pq = EvenPolynomial.monomial(p), EvenPolynomial.monomial(q)
                polar = 0.5 * (cumulant(Pp + Pq, 2, n).value
                               - cumulant(Pp, 2, n).value - cumulant(Pq, 2, n).value)
                direct = covariance_monomials(p, q, n)
                worst = max(worst, abs(polar - direct) / abs(direct))
        v1 = cumulant(EvenPolynomial.monomial(0), 2, n).value
        worst = max(worst, abs(v1 - variance_nr_exact(n)) / variance_nr_exact(n))
    return [_check("kappa2_two_path", worst, 1e-10)]


def cmd_verify(args) -> list:
    suites = ["skew", "appendix", "cross"] if args.suite == "all" else [args.suite]
    results = []
    for s in suites:
        if s == "skew":
            checks = verify_skew(quick=args.quick)
        elif s == "appendix":
            checks = verify_appendix(seed=args.seed)
        else:
            checks = verify_cross()
        for c in checks:
            c["suite"] = s
        results.extend(checks)
    return results


def cmd_asymptotics(args) -> list:
    if args.spq is not None:
        check = spq_convergence(args.spq[0], args.spq[1], args.grid)
    elif args.cumulant is not None:
        if args.stat is None:
            raise CheckFailure("--cumulant needs --stat")
        check = cumulant_scaling(args.stat, args.cumulant, args.grid)
    else:
        check = mean_convergence(args.grid)
    return [check.to_dict()]


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="realginibre", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--output", "-o", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("exact", help="exact cumulants, Var(N_R) and monomial covariances")
    p.add_argument("--n", type=int, required=True, help="half matrix size (N = 2n)")
    p.add_argument("--stat", type=_stat, action="append", help="even polynomial, e.g. x2+0.5x4")
    p.add_argument("--lmax", type=int, default=2, choices=(1, 2, 3, 4))
    p.add_argument("--cov-grid", type=_int_list, default=[0, 2])
    common(p)

    p = sub.add_parser("mc", help="Monte Carlo ensemble")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stat", type=_stat, action="append")
    p.add_argument("--clt", action="store_true", help="KS test of normalised fluctuations")
    p.add_argument("--samples", help="CSV file for per-trial values")
    p.add_argument("--workers", type=int, default=_default_workers())
    common(p)

    p = sub.add_parser("verify", help="closed forms against independent oracles")
    p.add_argument("--suite", choices=("skew", "appendix", "cross", "all"), default="all")
    p.add_argument("--quick", action="store_true", help="smaller quadrature grid")
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("asymptotics", help="finite-n convergence tables")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--spq", type=int, nargs=2, metavar=("P", "Q"))
    g.add_argument("--cumulant", type=int, metavar="L")
    g.add_argument("--mean", action="store_true")
    p.add_argument("--stat", type=_stat)
    p.add_argument("--grid", type=_int_list, required=True)
    common(p)
    return parser


def _config(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if isinstance(v, EvenPolynomial):
            v = str(v)
        elif isinstance(v, list):
            v = [str(x) if isinstance(x, EvenPolynomial) else x for x in v]
        out[k] = v
    return out


def _flatten(results) -> list:
    rows = []
    for r in results:
        if "rows" in r:
            for row in r["rows"]:
                rows.append({"quantity": r["quantity"], **row,
                             "metric": r["metric"], "metric_value": r["metric_value"]})
        elif "statistics" in r:
            for st in r["statistics"]:
                rows.append({"N": r["N"], "trials": r["trials"], "seed": r["seed"],
                             "method": r["method"], **st})
        else:
            rows.append({k: v for k, v in r.items() if not isinstance(v, (dict, list))})
    return rows


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    rows = _flatten(report["results"])
    keys = []
    for row in rows:
        keys.extend(k for k in row if k not in keys)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "exact":
        if args.n < 1:
            parser.error("--n must be positive")
        if args.stat is None:
            args.stat = [EvenPolynomial.monomial(0)]
    if args.command == "mc":
        if args.N < 2 or args.N % 2:
            parser.error("--N must be a positive even integer")
        if args.trials < 100:
            parser.error("--trials must be at least 100")
        args.stat = args.stat or []
    if args.command == "asymptotics" and any(n < 1 for n in args.grid):
        parser.error("grid values must be positive")

    handler = {"exact": cmd_exact, "mc": cmd_mc, "verify": cmd_verify,
               "asymptotics": cmd_asymptotics}[args.command]
    try:
        results = handler(args)
    except CheckFailure as exc:
        parser.error(str(exc))
    report = {
        "config": _config(args),
        "results": results,
        "provenance": {
            "seed": getattr(args, "seed", None),
            "version": __version__,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        },
    }
    text = render(report, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if args.command == "verify":
        failed = [r["check"] for r in results if not r["passed"]]
        if failed:
            print("failed checks: " + ", ".join(failed), file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
