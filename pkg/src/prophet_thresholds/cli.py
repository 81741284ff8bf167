"""Command-line front end.

Exit codes: 0 success, 1 a certification check failed, 2 bad configuration,
3 evaluation error.  Every float is printed at 12 significant digits and the
seed defaults to ``0x5EED``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import certify as cert
from . import io as pio
from .distributions import Distribution
from .errors import ProphetError
from .evaluator import approx_factor, expected_max
from .instances import InstanceSequence
from .largemarket import (
    block_distribution,
    build_partitioned,
    frequency,
    hardness_summary,
    partitioned_thresholds,
    random_order_experiment,
)
from .schedules import SCHEDULE_KINDS, build_schedule
from .simulator import DEFAULT_SEED, estimate_factor, run_policy, run_prophet

EXIT_OK, EXIT_CERT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer seed: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _n_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"n-list must be comma-separated integers: {text!r}") from None
    if not values or any(v < 1 for v in values) or any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError("n-list entries must be strictly increasing positive integers")
    return values


def _kinds(text: str) -> list[str]:
    kinds = [k.strip() for k in text.split(",") if k.strip()]
    bad = [k for k in kinds if k not in SCHEDULE_KINDS]
    if not kinds or bad:
        raise argparse.ArgumentTypeError(f"schedule kinds must be among {sorted(SCHEDULE_KINDS)}, got {text!r}")
    return kinds


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _load_instance(path) -> Distribution | InstanceSequence:
    try:
        return pio.load_instance(path)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"--instance: {exc}") from None


def _iid_distribution(inst, flag="--instance") -> Distribution:
    if isinstance(inst, InstanceSequence):
        types = inst.types()
        if len(types) != 1:
            raise ConfigError(f"{flag}: exact evaluation needs a single iid distribution")
        inst = next(iter(types.values()))
    if not inst.is_continuous:
        raise ConfigError(f"{flag}: exact evaluation needs a continuous distribution")
    return inst


def _schedule_for(args, inst, n: int | None):
    """Build a named schedule on the iid distribution of ``inst``, or read one from disk."""
    if args.schedule in SCHEDULE_KINDS:
        if n is None:
            raise ConfigError("--n is required for a built schedule")
        return build_schedule(args.schedule, _iid_distribution(inst, "--schedule"), n)
    if args.schedule == "file" or Path(args.schedule).suffix.lower() in (".csv", ".json"):
        path = args.schedule_file if args.schedule == "file" else args.schedule
        if not path:
            raise ConfigError("--schedule-file is required with --schedule file")
        try:
            return pio.load_schedule(path)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"--schedule: {exc}") from None
    raise ConfigError(f"--schedule must be one of {sorted(SCHEDULE_KINDS)}, 'file' or a CSV/JSON path")


def cmd_eval(args) -> int:
    d = _iid_distribution(_load_instance(args.instance))
    s = _schedule_for(args, d, args.n)
    report = approx_factor(d, s)
    if args.schedule_out:
        Path(args.schedule_out).write_text(pio.schedule_to_csv(s), encoding="utf-8", newline="\n")
    if args.format == "csv":
        text = pio.table_to_csv(pio.SWEEP_COLUMNS, [[s.n, s.kind, report.e_alg, report.e_opt, report.factor, report.quad_error]])
    else:
        text = pio.dumps(dict(n=s.n, kind=s.kind, **report.to_dict()))
    _emit(text, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    inst = _load_instance(args.instance)
    if isinstance(inst, InstanceSequence):
        s = _schedule_for(args, inst, args.n or len(inst))
        seq = inst
    else:
        s = _schedule_for(args, inst, args.n)
        seq = InstanceSequence.iid(inst, s.n)
    if len(s.thetas) != len(seq):
        raise ConfigError(f"--schedule has {s.n} thresholds for {len(seq)} items")
    est = estimate_factor(seq, s.thetas, args.trials, args.seed, workers=args.threads)
    out = {
        "trials": args.trials,
        "seed": args.seed,
        "n": len(seq),
        "alg": est.alg.to_dict(),
        "prophet": est.prophet.to_dict(),
        "factor": est.factor,
        "factor_stderr": est.stderr,
    }
    _emit(pio.dumps(out), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    d = _iid_distribution(_load_instance(args.instance))
    rows = []
    for n in args.n_list:
        for kind in args.kinds:
            r = approx_factor(d, build_schedule(kind, d, n))
            rows.append([n, kind, r.e_alg, r.e_opt, r.factor, r.quad_error])
    if args.format == "json":
        text = pio.dumps([dict(zip(pio.SWEEP_COLUMNS, row)) for row in rows])
    else:
        text = pio.table_to_csv(pio.SWEEP_COLUMNS, rows)
    _emit(text, args.out)
    return EXIT_OK


CERT_PROPERTIES = ("all", "threshold", "alpha-strong", "A", "auxiliary", "opt-upperbound")


def cmd_certify(args) -> int:
    prof = cert.PROFILES[args.h]()
    grid = args.grid
    tol = args.tol
    if not tol >= 0.0:
        raise ConfigError("--tol must be non-negative")
    reports = []
    if args.property in ("all", "threshold"):
        reports += cert.certify_threshold_function(prof, grid_size=grid, tolerance=tol)
    if args.property in ("all", "alpha-strong"):
        reports += cert.certify_alpha_strong(prof, alpha=args.alpha, grid_size=grid, tolerance=tol)
    cosine_suite = args.property == "all" and args.h == "cosine"
    if cosine_suite or args.property == "A":
        reports.append(cert.certify_A(grid, tolerance=tol)[0])
    if cosine_suite or args.property == "auxiliary":
        reports.append(cert.certify_auxiliary(tolerance=min(tol, 1e-12)))
    if cosine_suite or args.property == "opt-upperbound":
        reports += cert.certify_opt_upperbound(tolerance=min(tol, 1e-12))
    failed = [r.property for r in reports if not r.passed]
    out = {"h": args.h, "grid": grid, "verdict": "fail" if failed else "pass", "failed": failed, "reports": [r.to_dict() for r in reports]}
    _emit(pio.dumps(out), args.out)
    if failed:
        print(f"certification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CERT_FAIL
    return EXIT_OK


def cmd_largemarket(args) -> int:
    inst = _load_instance(args.instance)
    if not isinstance(inst, InstanceSequence):
        raise ConfigError("--instance must be an item list for largemarket")
    if args.mode == "random":
        delta = args.delta if args.delta is not None else 1.0 / 3.0
        if not 0.0 < delta < 1.0:
            raise ConfigError("--delta must lie in (0, 1)")
        rep = random_order_experiment(inst, args.s, delta, args.trials, args.seed)
        _emit(pio.dumps(dict(mode="random", **rep.to_dict())), args.out)
        return EXIT_OK
    if inst.partition is not None and args.s is None:
        seq, discarded = inst, 0
    else:
        if args.s is None:
            raise ConfigError("--s is required unless the instance carries a partition")
        seq, discarded = build_partitioned(inst, args.s)
    thetas = partitioned_thresholds(seq)
    est = estimate_factor(seq, thetas, args.trials, args.seed, workers=args.threads)
    k, m = seq.partition
    out = {
        "mode": "best",
        "k": k,
        "m": m,
        "frequency": frequency(inst),
        "discarded": discarded,
        "exact_opt_partitioned": expected_max(block_distribution(seq), m),
        "simulated_prophet": est.prophet.mean,
        "simulated_prophet_stderr": est.prophet.stderr,
        "simulated_alg": est.alg.mean,
        "simulated_alg_stderr": est.alg.stderr,
        "factor": est.factor,
        "factor_stderr": est.stderr,
        "trials": args.trials,
        "seed": args.seed,
    }
    _emit(pio.dumps(out), args.out)
    return EXIT_OK


def cmd_hardness(args) -> int:
    if not 0.0 < args.eps < 1.0:
        raise ConfigError("--eps must lie in (0, 1)")
    _emit(pio.dumps(hardness_summary(args.m, args.eps, args.trials, args.seed)), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prophet-thresholds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials=False):
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--threads", type=_positive_int, default=1, help="worker threads; results do not depend on it")
        if trials:
            p.add_argument("--trials", type=_positive_int, default=10**6)
            p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)

    p = sub.add_parser("eval", help="exact E[ALG], E[OPT] and factor of one schedule")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", default="cosine", help="cosine | dp | single | file | path to CSV/JSON")
    p.add_argument("--schedule-file")
    p.add_argument("--schedule-out", help="also write the schedule CSV here")
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="Monte Carlo run of a schedule")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", required=True, help="cosine | dp | single | file | path to CSV/JSON")
    p.add_argument("--schedule-file")
    p.add_argument("--n", type=_positive_int)
    common(p, trials=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="exact factors over n and schedule kinds")
    p.add_argument("--instance", required=True)
    p.add_argument("--n-list", type=_n_list, required=True)
    p.add_argument("--kinds", "--schedule", dest="kinds", type=_kinds, default=["cosine", "dp", "single"])
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("certify", help="grid certification of the analytic claims")
    p.add_argument("--property", choices=CERT_PROPERTIES, default="all")
    p.add_argument("--h", choices=sorted(cert.PROFILES), default="cosine")
    p.add_argument("--alpha", type=float)
    p.add_argument("--grid", type=_positive_int, default=cert.DEFAULT_GRID)
    p.add_argument("--tol", type=float, default=cert.TOLERANCE, help="verdict is pass when min margin >= -tol")
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("largemarket", help="block thresholds on repeated-distribution instances")
    p.add_argument("--instance", required=True)
    p.add_argument("--mode", choices=("best", "random"), default="best")
    p.add_argument("--s", type=_positive_int, help="number of blocks")
    p.add_argument("--delta", type=float)
    common(p, trials=True)
    p.set_defaults(func=cmd_largemarket)

    p = sub.add_parser("hardness", help="worst-order instance with prophet value 2 - eps")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--eps", type=float, required=True)
    common(p, trials=True)
    p.set_defaults(func=cmd_hardness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ProphetError, ValueError, ArithmeticError) as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
