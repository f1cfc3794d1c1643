"""Command-line surface: trace generation, replay, auditing, benchmarks.

Exit codes are stable: 0 pass, 1 check failure, 2 usage or format error.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import audit as audit_mod
from . import metrics, trace, workload
from .core import VariantConfig

_VARIANTS = ("lazy", "eager")


def _config_from_args(args) -> VariantConfig:
    cfg = VariantConfig(mode=args.variant)
    if getattr(args, "no_meld_cleanup", False):
        cfg.cleanup_on_meld = False
    periodic = getattr(args, "periodic", None)
    if periodic is not None:
        cfg.periodic_cleanup = True
        cfg.periodic_factor = periodic
    fraction = getattr(args, "direct_relink", None)
    if fraction is not None:
        cfg.direct_relink = True
        cfg.direct_relink_fraction = fraction
    return cfg


def _mix(text):
    parts = text.split(",")
    if len(parts) != 5:
        raise argparse.ArgumentTypeError(
            "mix needs five comma-separated probabilities "
            "(insert,decrease,deletemin,findmin,meld)")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text):
    try:
        return [int(p) for p in text.split(",") if p]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairheap",
        description="Pairing-heap workloads, replay, audit, and benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a deterministic trace file")
    gen.add_argument("--kind", required=True, choices=workload.KINDS)
    gen.add_argument("--n", required=True, type=int)
    gen.add_argument("--seed", required=True, type=int)
    gen.add_argument("--heaps", type=int, default=4)
    gen.add_argument("--mix", type=_mix, default=workload.DEFAULT_MIX)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    run = sub.add_parser("run", help="replay a trace on a heap variant")
    run.add_argument("--trace", required=True)
    run.add_argument("--variant", required=True, choices=_VARIANTS)
    run.add_argument("--no-meld-cleanup", action="store_true")
    run.add_argument("--periodic", type=float, default=None, metavar="C")
    run.add_argument("--direct-relink", type=float, default=None, metavar="F")
    run.add_argument("--check", action="store_true")
    run.add_argument("--metrics", default=None)
    run.set_defaults(func=cmd_run)

    aud = sub.add_parser("audit", help="replay a trace and audit potentials")
    aud.add_argument("--trace", required=True)
    aud.add_argument("--out", required=True)
    aud.add_argument("--snapshots", choices=("every", "final"), default=None)
    aud.set_defaults(func=cmd_audit)

    bench = sub.add_parser("bench", help="per-size, per-variant cost summary")
    bench.add_argument("--kind", required=True, choices=workload.KINDS)
    bench.add_argument("--sizes", required=True, type=_int_list)
    bench.add_argument("--reps", type=int, default=1)
    bench.add_argument("--variants", default="lazy,eager")
    bench.add_argument("--seed", type=int, default=1)
    bench.add_argument("--heaps", type=int, default=4)
    bench.add_argument("--out", default=None)
    bench.set_defaults(func=cmd_bench)

    return parser


def cmd_gen(args) -> int:
    spec = workload.WorkloadSpec(kind=args.kind, n=args.n, seed=args.seed,
                                 mix=args.mix, heaps=args.heaps)
    events = workload.generate(spec)
    trace.write_trace(events, args.out)
    return 0


def _load_trace(path):
    with open(path) as fh:
        return trace.parse_trace(fh)


def cmd_run(args) -> int:
    try:
        events = _load_trace(args.trace)
    except trace.TraceError as exc:
        print(f"trace error: {exc}", file=sys.stderr)
        return 2
    cfg = _config_from_args(args)
    collect = args.metrics is not None
    try:
        records, verdict = workload.run_trace(events, cfg, check=args.check,
                                              collect_records=collect)
    except workload.TraceReplayError as exc:
        print(f"trace error: {exc}", file=sys.stderr)
        return 2
    if collect:
        metrics.write_csv(records, args.metrics)
    print(verdict)
    return 0 if verdict.ok else 1


def cmd_audit(args) -> int:
    try:
        events = _load_trace(args.trace)
    except trace.TraceError as exc:
        print(f"trace error: {exc}", file=sys.stderr)
        return 2
    cadence = args.snapshots
    if cadence is None:
        # Snapshotting costs O(n) per event; back off on big traces.
        cadence = "every" if len(events) < 10_000 else "final"
    try:
        report = audit_mod.audit_trace(events, snapshots=cadence)
    except workload.TraceReplayError as exc:
        print(f"trace error: {exc}", file=sys.stderr)
        return 2
    with open(args.out, "w") as fh:
        _write_audit_report(report, fh)
    print(f"{'PASS' if report.passed else 'FAIL'}, "
          f"snapshots={len(report.snapshots)}")
    return 0 if report.passed else 1


def _write_audit_report(report, fh):
    flag = {True: "ok", False: "fail"}
    for s in report.snapshots:
        fh.write(
            f"snapshot={s.op_index} op={s.op_type} phi={s.phi:.9f} "
            f"identity={flag[s.identity_ok]} "
            f"spine_checked={len(s.spine)} "
            f"spine={flag[all(c.passed for c in s.spine)]} "
            f"lemma1_min_margin={s.lemma1.min_margin:.9f} "
            f"lemma1={flag[s.lemma1.passed]} "
            f"active_runs={s.active_runs} "
            f"active_parent_children={s.active_parent_children} "
            f"live={s.live} white={s.white_live}\n")
    p = report.proposition
    fh.write(f"proposition_max={p.max_value:.9f} proposition_arg={p.arg_max} "
             f"proposition_bound={p.bound:.9f} proposition={flag[p.passed]}\n")
    fh.write(f"result={'pass' if report.passed else 'fail'}\n")


def cmd_bench(args) -> int:
    names = [v for v in args.variants.split(",") if v]
    for v in names:
        if v not in _VARIANTS:
            print(f"unknown variant {v!r} (choose from {', '.join(_VARIANTS)})",
                  file=sys.stderr)
            return 2
    if args.reps < 1:
        print("reps must be at least 1", file=sys.stderr)
        return 2
    rows = [("size", "variant", "rep", "events", "total_comparisons",
             "cmp_per_insert", "cmp_per_decrease", "cmp_per_deletemin",
             "cmp_per_findmin", "cmp_per_meld", "wall_time_ns")]
    for size in args.sizes:
        spec = workload.WorkloadSpec(kind=args.kind, n=size, seed=args.seed,
                                     heaps=args.heaps)
        events = workload.generate(spec)
        for name in names:
            for rep in range(1, args.reps + 1):
                cfg = VariantConfig(mode=name)
                t0 = time.perf_counter_ns()
                records, verdict = workload.run_trace(events, cfg)
                wall = time.perf_counter_ns() - t0
                rows.append((size, name, rep, verdict.ops,
                             verdict.counters.comparisons)
                            + tuple(_per_class(records)) + (wall,))
    text = "\n".join(",".join(str(c) for c in row) for row in rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _per_class(records):
    for kind in (trace.INSERT, trace.DECREASE, trace.DELETEMIN,
                 trace.FINDMIN, trace.MELD):
        deltas = [r.delta.comparisons for r in records if r.op_type == kind]
        yield f"{sum(deltas) / len(deltas):.6f}" if deltas else "0"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
