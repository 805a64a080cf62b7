"""Command-line surface: run one simulation or the whole matrix.

``phylosim run`` executes a single task under one architecture and writes
traces.csv, windows.csv, weights.csv and verdict.json into the output
directory. ``phylosim matrix`` runs all 17 task-by-architecture cells and
writes matrix.csv plus a summary table; its exit status reports whether
the verdicts match the expected pattern on the first seed.

Exit codes: 0 clean run, 2 unknown task/architecture/flags, 3 unwritable
output location.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .analysis import JudgeThresholds, judge_inference, run_matrix, time_to_criterion
from .backend import default_backend
from .dynamics import SimParams, make_schedule, run
from .model import ArchConfig, TaskSpecError, build_network, parse_task_spec, task_spec_to_document
from .tasks import TASK_IDS, builtin_task

EXIT_OK = 0
EXIT_BAD_SELECTOR = 2
EXIT_BAD_OUTPUT = 3


class SelectorError(Exception):
    pass


def _sim_params(args) -> SimParams:
    return SimParams().with_overrides(
        iters_per_prop=args.iters_per_prop,
        noise=args.noise,
    )


def _resolve_task(args, arch: ArchConfig):
    sel = args.task
    if sel in TASK_IDS:
        return builtin_task(sel, arch, variant=args.variant)
    path = Path(sel)
    if not path.exists():
        raise SelectorError(f"unknown task {sel!r}: not a builtin id {TASK_IDS} and no such file")
    if args.variant:
        raise SelectorError("--variant only applies to builtin task ids")
    return parse_task_spec(path.read_text())


def _prepare_out(raw: str) -> Path:
    out = Path(raw)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise PermissionError(f"output directory {out} is not writable: {exc}") from exc
    return out


def cmd_run(args) -> int:
    try:
        arch = ArchConfig.from_kind(args.arch, mu_override=args.mu)
        task = _resolve_task(args, arch)
    except (TaskSpecError, SelectorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_SELECTOR
    try:
        out = _prepare_out(args.out)
    except PermissionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_OUTPUT

    params = _sim_params(args)
    net = build_network(task, arch)
    sched = make_schedule(net.task, arch, params)
    traces = run(
        net, sched, params, args.seed, backend=args.backend,
        record_weight_history=args.weights_every_window,
    )
    verdict = judge_inference(traces)
    ttc = time_to_criterion(traces)

    traces.export_traces_csv(out / "traces.csv", verbosity=args.trace)
    traces.export_windows_csv(out / "windows.csv")
    traces.export_weights_csv(out / "weights.csv")
    if args.weights_every_window:
        for i, snapshot in enumerate(traces.weight_history):
            window = traces.windows[i]
            snap_traces = traces.__class__(**{**traces.__dict__, "mapping": snapshot})
            snap_traces.export_weights_csv(out / f"weights.window{i:02d}.{window.label}.csv")
    record = {
        "task": task.name,
        "arch": arch.kind,
        "variant": args.variant,
        "seed": args.seed,
        "backend": args.backend or default_backend(),
        "verdict": verdict.outcome,
        "expectedVerdict": task.expected_verdict,
        "siAffordCritical": verdict.si_afford_critical,
        "siNoAffordCritical": verdict.si_noafford_critical,
        "siAffordNoncritical": verdict.si_afford_noncritical,
        "evaluationWindow": list(verdict.evaluation_window),
        "timeToCriterion": ttc,
        "config": {
            "mu": arch.mu,
            "relationsAllowed": arch.relations_allowed,
            "params": asdict(params),
            "trace": args.trace,
            "taskDocument": task_spec_to_document(task),
        },
    }
    (out / "verdict.json").write_text(json.dumps(record, indent=2) + "\n")
    print(f"{task.name} [{arch.kind}] seed={args.seed}: {verdict.outcome}"
          f" (siAC={verdict.si_afford_critical:.3f})")
    return EXIT_OK


def cmd_matrix(args) -> int:
    seeds = list(range(args.seeds)) if args.seeds else [args.seed]
    params = _sim_params(args)
    try:
        out = _prepare_out(args.out)
    except PermissionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_OUTPUT
    report = run_matrix(
        params=params,
        seeds=seeds,
        thresholds=JudgeThresholds(),
        backend=args.backend,
        mu_override=args.mu,
    )
    report.export_csv(out / "matrix.csv")
    print(report.summary())
    return EXIT_OK if report.all_match(seed=seeds[0]) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phylosim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--arch", choices=list(TASK_IDS), help="architecture kind")
        p.add_argument("--variant", choices=["cat", "balints"], default=None)
        p.add_argument("--seed", type=int, default=7)
        p.add_argument("--iters-per-prop", type=int, default=None)
        p.add_argument("--mu", type=float, default=None, help="override the mapping learning rate")
        p.add_argument("--noise", type=float, default=None)
        p.add_argument("--out", default="out")
        p.add_argument("--trace", choices=["probes", "all"], default="probes")
        p.add_argument("--backend", choices=["compiled", "python"], default=None)

    p_run = sub.add_parser("run", help="run one task under one architecture")
    p_run.add_argument("--task", required=True, help="builtin id (dbo|ro|mo|rm) or path to a task document")
    p_run.add_argument("--weights-every-window", action="store_true",
                       help="also dump the mapping weights after every firing window")
    common(p_run)
    p_run.set_defaults(func=cmd_run, arch_required=True)

    p_matrix = sub.add_parser("matrix", help="run the 17-cell task-by-architecture matrix")
    p_matrix.add_argument("--seeds", type=int, default=None, help="run seeds 0..N-1 instead of --seed")
    common(p_matrix)
    p_matrix.set_defaults(func=cmd_matrix)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run" and not args.arch:
        print("error: --arch is required for run", file=sys.stderr)
        return EXIT_BAD_SELECTOR
    try:
        return args.func(args)
    except TaskSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_SELECTOR


if __name__ == "__main__":
    sys.exit(main())
