"""Command-line entry point.

Every command prints one JSON object
``{"command", "parameters", "payload", "version", "timing"}``.  Rationals
are canonical ``p/q`` strings, so outputs can be compared byte for byte
(pass ``--no-timing`` to drop the only nondeterministic field).

Exit codes: 0 success, 1 verification mismatch, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

import mpmath

from . import __version__, asymptotics, bst, cumulants, dst, dst_enum, montecarlo, reference
from .rational import PGF, format_rational

SEARCHES = ("unsuccessful", "successful", "pathlength")
KEY_MODELS = ("infinite", "finite")
EXACT_COVARIANCE_MAX_N = 256


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _grid(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("grid is empty")
    return vals


def _pgf_payload(p: PGF) -> dict:
    return {
        "pgf": p.to_list(),
        "mean": format_rational(p.mean()),
        "variance": format_rational(p.variance()),
    }


# -- bst -------------------------------------------------------------------

_BST_PGF = {
    "unsuccessful": bst.bst_unsuccessful_pgf,
    "successful": bst.bst_successful_pgf,
    "pathlength": bst.bst_path_length_pgf,
}
_BST_MOMENTS = {
    "unsuccessful": bst.bst_unsuccessful_moments,
    "successful": bst.bst_successful_moments,
    "pathlength": bst.bst_path_length_moments,
}


def cmd_bst(args) -> dict:
    if args.action == "pgf":
        return {"search": args.search, "n": args.n, **_pgf_payload(_BST_PGF[args.search](args.n))}
    if args.order is not None:
        if args.search != "pathlength":
            raise UsageError("--order is only available for --search pathlength")
        fm = bst.bst_path_length_factorial_moments(args.n, args.order)
        return {
            "search": args.search,
            "n": args.n,
            "factorial_moments": [format_rational(m) for m in fm.m],
        }
    return {"search": args.search, **_BST_MOMENTS[args.search](args.n).as_dict()}


# -- dst -------------------------------------------------------------------


def _dst_pgf(search: str, keys: str, n: int, source: str) -> tuple[PGF, str]:
    if source == "auto":
        if keys == "infinite":
            source = "recursion"
        elif 2 <= n <= 5:
            source = "golden"
        else:
            source = "enumerate"
    if source == "recursion":
        if keys != "infinite":
            raise UsageError("no recursion is known for finite keys; use --source golden or enumerate")
        fn = {
            "unsuccessful": dst.dst_unsuccessful_pgf_infinite,
            "successful": dst.dst_successful_pgf_infinite,
            "pathlength": dst.dst_path_length_pgf,
        }[search]
        return fn(n), source
    if source == "golden":
        family = f"{search}-{keys}"
        if family not in dst.FAMILIES:
            raise UsageError(f"no golden table for {family}; tables exist for {', '.join(dst.FAMILIES)}")
        return dst.golden_table(family, n), source
    if search == "pathlength":
        return dst_enum.enumerate_path_length(n, keys).pgf, source
    return dst_enum.enumerate_search(n, search, keys).pgf, source


def cmd_dst(args) -> dict:
    if args.action == "pgf":
        p, source = _dst_pgf(args.search, args.keys, args.n, args.source)
        return {"search": args.search, "keys": args.keys, "n": args.n, "source": source, **_pgf_payload(p)}
    if args.action == "moments":
        return {"search": "pathlength", "keys": "infinite", **dst.dst_path_length_moments(args.n).as_dict()}
    # enumerate
    width = args.width
    if args.search == "pathlength":
        res = dst_enum.enumerate_path_length(args.n, args.keys, width=width, jobs=args.jobs, symmetry=args.symmetry)
    else:
        res = dst_enum.enumerate_search(
            args.n, args.search, args.keys, width=width, jobs=args.jobs, symmetry=args.symmetry
        )
    out = res.as_dict()
    out["expected_total"] = str(dst_enum.expected_total(args.n, args.search, args.keys))
    if args.check_width:
        if args.keys != "infinite":
            raise UsageError("--check-width applies to infinite keys")
        out["width_stable"] = dst_enum.width_stability_check(args.n, args.search)
    return out


# -- cumulants, constants, asymptotics -------------------------------------


def cmd_cumulants(args) -> dict:
    table = cumulants.cumulant_table(args.max_order, args.precision)
    return {"max_order": args.max_order, "precision": args.precision, "rows": table.rows()}


def cmd_constants(args) -> dict:
    p = args.precision
    return {
        "alpha": asymptotics.constant_alpha(p).as_dict(),
        "beta": asymptotics.constant_beta(p).as_dict(),
        "Q": asymptotics.constant_Q(p).as_dict(),
        "C": asymptotics.constant_C(p).as_dict(),
        "D": asymptotics.constant_D(p).as_dict(),
    }


def cmd_asymptotics(args) -> dict:
    if min(args.grid) < 2:
        raise UsageError("grid values must be >= 2")
    return asymptotics.convergence_report(args.family, args.grid, args.precision).as_dict()


# -- simulate --------------------------------------------------------------


def cmd_simulate(args) -> dict:
    if args.target == "covariance":
        est = montecarlo.simulate_dst_cost_covariance(args.n, args.trials, args.seed, args.jobs)
        exact = dst.dst_pair_covariance(args.n) if args.n <= EXACT_COVARIANCE_MAX_N else None
        return est.as_dict(D=float(asymptotics.constant_D(12)), exact=exact)
    keys = getattr(args, "keys", "infinite")
    cfg = montecarlo.SimConfig(args.n, args.trials, args.seed, args.search, keys, args.jobs)
    summary = montecarlo.simulate_bst(cfg) if args.target == "bst" else montecarlo.simulate_dst(cfg)
    out = {"n": args.n, "search": args.search, "seed": args.seed}
    if args.target == "dst":
        out["keys"] = keys
    out.update(summary.as_dict())
    return out


# -- verify ----------------------------------------------------------------


def _check(results: list, name: str, ok: bool, **detail) -> None:
    results.append({"check": name, "ok": bool(ok), **detail})


def _enum_pgf(search: str, keys: str, n: int) -> PGF:
    # symmetry halves the work and is exact for both key models
    if search == "pathlength":
        return dst_enum.enumerate_path_length(n, keys, symmetry=True).pgf
    return dst_enum.enumerate_search(n, search, keys, symmetry=True).pgf


def run_verify(tier: str) -> list[dict]:
    """Cross-check recursions, golden tables, enumeration and published values."""
    out: list[dict] = []
    ref = reference

    for n, (g, h, v) in ref.BST_UNSUCCESSFUL.items():
        m = bst.bst_unsuccessful_moments(n)
        _check(out, f"bst unsuccessful moments n={n}", (m.g, m.h, m.variance) == (g, h, v))
    for n, (g, h, v) in ref.BST_SUCCESSFUL.items():
        m = bst.bst_successful_moments(n)
        _check(out, f"bst successful moments n={n}", (m.g, m.h, m.variance) == (g, h, v))
    _check(out, "bst path-length means n=0..4", bst.bst_path_length_means(4) == ref.BST_PATH_MEANS)
    for n in (3, 4):
        m = bst.bst_path_length_moments(n)
        _check(out, f"bst path-length moments n={n}", (m.h, m.variance) == (ref.BST_PATH_SECOND[n], ref.BST_PATH_VARIANCE[n]))

    means = dst.dst_path_length_means(4)
    _check(out, "dst path-length means n=2..4", all(means[n] == g for n, g in ref.DST_PATH_MEANS.items()))
    for n in (3, 4):
        m = dst.dst_path_length_moments(n)
        _check(out, f"dst path-length moments n={n}", (m.h, m.variance) == (ref.DST_PATH_SECOND[n], ref.DST_PATH_VARIANCE[n]))

    for n in range(2, 6):
        _check(
            out,
            f"dst unsuccessful recursion vs table n={n}",
            dst.dst_unsuccessful_pgf_infinite(n) == dst.golden_table("unsuccessful-infinite", n),
        )
        _check(
            out,
            f"dst successful recursion vs table n={n}",
            dst.dst_successful_pgf_infinite(n) == dst.golden_table("successful-infinite", n),
        )

    top = 4 if tier == "fast" else 5
    for n in range(2, top + 1):
        for search in SEARCHES:
            for keys in KEY_MODELS:
                if n == 5 and search == "unsuccessful" and keys == "finite" and tier != "full":
                    continue
                got = _enum_pgf(search, keys, n)
                if search == "pathlength" and keys == "infinite":
                    want, label = dst.dst_path_length_pgf(n), "recursion"
                else:
                    want, label = dst.golden_table(f"{search}-{keys}", n), "table"
                _check(out, f"dst {search}/{keys} enumeration vs {label} n={n}", got == want)

    for n, keys, cost, prob in ref.SPOT_PROBABILITIES:
        res = dst_enum.enumerate_search(n, "unsuccessful", keys)
        total = dst_enum.expected_total(n, "unsuccessful", keys)
        ok = res.total == total and Fraction(res.counts.get(cost, 0), res.total) == prob
        _check(out, f"P(cost={cost}) n={n} {keys} keys", ok, total=str(total))

    for s in range(2, 9):
        _check(out, f"c_{s}", cumulants.hennequin_c(s) == ref.C_SEQUENCE[s])
        _check(out, f"a_{s}", cumulants.hennequin_a(s) == ref.A_SEQUENCE[s])

    C = asymptotics.constant_C(12)
    D = asymptotics.constant_D(12)
    _check(out, "constant C", mpmath.nstr(C.value, 12).startswith(ref.CONSTANT_C), value=str(C))
    _check(out, "constant D", mpmath.nstr(D.value, 12).startswith(ref.CONSTANT_D), value=str(D))
    with mpmath.workdps(30):
        k2 = cumulants.kappa_leading_constant(2, 20)
        closed = 7 - 2 * mpmath.pi**2 / 3
        _check(out, "kappa_2 constant = 7 - 2 pi^2/3", abs(k2 - closed) < mpmath.mpf(10) ** -12)
    return out


def cmd_verify(args) -> dict:
    tier = "fast" if args.fast else "full" if args.full else "default"
    checks = run_verify(tier)
    failed = [c["check"] for c in checks if not c["ok"]]
    return {"tier": tier, "checks": checks, "passed": len(checks) - len(failed), "failed": failed}


# -- parser and driver -----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--no-timing", action="store_true", help="omit wall-clock timing from the output")

    parser = argparse.ArgumentParser(prog="treepgf", description="Exact search-cost distributions for BSTs and DSTs.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bst", parents=[common], help="binary search tree PGFs and moments")
    p.add_argument("action", choices=("pgf", "moments"))
    p.add_argument("--search", choices=SEARCHES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--order", type=_positive, help="factorial moments up to this order (path length only)")
    p.set_defaults(func=cmd_bst)

    p = sub.add_parser("dst", parents=[common], help="digital search tree PGFs, moments and enumeration")
    p.add_argument("action", choices=("pgf", "moments", "enumerate"))
    p.add_argument("--search", choices=SEARCHES, default="pathlength")
    p.add_argument("--keys", choices=KEY_MODELS, default="infinite")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--source", choices=("auto", "recursion", "golden", "enumerate"), default="auto")
    p.add_argument("--width", type=_positive, help="bits per key (infinite keys; default n)")
    p.add_argument("--check-width", action="store_true", help="confirm widths n and n+1 agree (n <= 4)")
    p.add_argument("--symmetry", action="store_true", help="visit half the matrices using bit complement")
    p.add_argument("--jobs", type=_positive, default=1)
    p.set_defaults(func=cmd_dst)

    p = sub.add_parser("cumulants", parents=[common], help="c_s, a_s and leading cumulant constants")
    p.add_argument("--max-order", type=int, default=8)
    p.add_argument("--precision", type=_positive, default=20)
    p.set_defaults(func=cmd_cumulants)

    p = sub.add_parser("constants", parents=[common], help="alpha, beta, Q, C and D")
    p.add_argument("--precision", type=_positive, default=12)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("asymptotics", parents=[common], help="exact values against asymptotic expansions")
    p.add_argument("--family", choices=asymptotics.FAMILIES, required=True)
    p.add_argument("--grid", type=_grid, required=True, help="comma-separated n values")
    p.add_argument("--precision", type=_positive, default=30)
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimates")
    targets = p.add_subparsers(dest="target", required=True)
    sim_common = argparse.ArgumentParser(add_help=False, parents=[common])
    sim_common.add_argument("--n", type=_positive, required=True)
    sim_common.add_argument("--trials", type=_positive, default=10**6)
    sim_common.add_argument("--seed", type=int, default=montecarlo.DEFAULT_SEED)
    sim_common.add_argument("--jobs", type=_positive, default=1)
    t = targets.add_parser("bst", parents=[sim_common])
    t.add_argument("--search", choices=SEARCHES, default="unsuccessful")
    t = targets.add_parser("dst", parents=[sim_common])
    t.add_argument("--search", choices=SEARCHES, default="unsuccessful")
    t.add_argument("--keys", choices=KEY_MODELS, default="infinite")
    targets.add_parser("covariance", parents=[sim_common])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", parents=[common], help="run the cross-oracle checks")
    tier = p.add_mutually_exclusive_group()
    tier.add_argument("--fast", action="store_true", help="enumerations up to n=4")
    tier.add_argument("--full", action="store_true", help="also the n=5 finite-key unsuccessful sweep")
    p.set_defaults(func=cmd_verify)
    return parser


def _parameters(args) -> dict:
    skip = {"func", "command", "format", "no_timing"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _scalar(v) -> bool:
    return isinstance(v, (str, int, float, bool)) or v is None


def _table(payload, indent: str = "") -> list[str]:
    lines = []
    if isinstance(payload, dict):
        for k, v in payload.items():
            if isinstance(v, dict) and all(map(_scalar, v.values())):
                lines.append(f"{indent}{k}: {', '.join(f'{a}={b}' for a, b in v.items())}")
            elif isinstance(v, list) and all(map(_scalar, v)):
                lines.append(f"{indent}{k}: {', '.join(map(str, v))}")
            elif isinstance(v, (dict, list)):
                lines.append(f"{indent}{k}:")
                lines.extend(_table(v, indent + "  "))
            else:
                lines.append(f"{indent}{k}: {v}")
    elif isinstance(payload, list):
        for item in payload:
            if isinstance(item, dict):
                lines.append(indent + "  ".join(f"{k}={v}" for k, v in item.items()))
            else:
                lines.append(f"{indent}{item}")
    return lines


def _execute(args) -> dict:
    t0 = time.perf_counter()
    payload = args.func(args)
    elapsed = time.perf_counter() - t0
    return {
        "command": args.command if args.command != "simulate" else f"simulate {args.target}",
        "parameters": _parameters(args),
        "payload": payload,
        "version": __version__,
        "timing": None if args.no_timing else {"seconds": round(elapsed, 3)},
    }


def run(argv: list[str]) -> dict:
    """Parse ``argv`` and return the CommandResult without printing it.

    Raises ``SystemExit`` on argument errors and ``UsageError`` or
    ``ValueError`` on out-of-range requests.
    """
    return _execute(build_parser().parse_args(argv))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = _execute(args)
    except dst_enum.WidthExhausted as exc:
        print(f"{parser.prog}: error: {exc}; increase --width", file=sys.stderr)
        return 2
    except (UsageError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"{parser.prog}: error: {msg}", file=sys.stderr)
        return 2
    if args.format == "table":
        print("\n".join(_table(result["payload"])))
    else:
        print(json.dumps(result, indent=2))
    if args.command == "verify" and result["payload"]["failed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
