"""Synchrony scoring, verdicts, and the full matrix run.

Two traces count as synchronous to the degree their activations rise and
fall together; we score that with an overlap ratio (sum of pointwise
minima over sum of pointwise maxima). An inference succeeds when the
affordance semantic is synchronous with the critical semantic, clearly
more so than the no-affordance semantic is, and more than the affordance
is with the noncritical semantic.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import Schedule, SimParams, TraceSet, make_schedule, run
from .model import ArchConfig, TaskSpec, build_network
from .tasks import MatrixCell, matrix_cells

TTC_WINDOW = 30  # sliding-window width for time-to-criterion, ~one SP cycle


@dataclass(frozen=True)
class JudgeThresholds:
    theta_success: float = 0.4
    margin: float = 0.1


@dataclass(frozen=True)
class Verdict:
    outcome: str  # "success" | "failure"
    si_afford_critical: float
    si_noafford_critical: float
    si_afford_noncritical: float
    evaluation_window: tuple[int, int]

    @property
    def success(self) -> bool:
        return self.outcome == "success"


def synchrony_index(a, b, window: tuple[int, int] | None = None) -> float:
    """Overlap ratio sum(min)/sum(max) over the window; 0 if nothing fires."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"series shapes differ: {a.shape} vs {b.shape}")
    if window is not None:
        lo, hi = window
        if lo < 0 or hi > a.shape[0] or lo >= hi:
            raise ValueError(f"window {window} out of bounds for length {a.shape[0]}")
        a = a[lo:hi]
        b = b[lo:hi]
    denom = float(np.maximum(a, b).sum())
    if denom == 0.0:
        return 0.0
    return float(np.minimum(a, b).sum()) / denom


def sliding_synchrony(a, b, width: int = TTC_WINDOW) -> np.ndarray:
    """SI over trailing windows; entry t scores the slice [t-width, t)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lo = np.concatenate([[0.0], np.cumsum(np.minimum(a, b))])
    hi = np.concatenate([[0.0], np.cumsum(np.maximum(a, b))])
    out = np.full(a.shape[0] + 1, np.nan)
    for t in range(width, a.shape[0] + 1):
        denom = hi[t] - hi[t - width]
        out[t] = (lo[t] - lo[t - width]) / denom if denom > 0 else 0.0
    return out


def time_to_criterion(traces: TraceSet, thresholds: JudgeThresholds | None = None, width: int = TTC_WINDOW):
    """First iteration whose trailing-window SI(affordance, critical)
    exceeds the success threshold; None if it never does."""
    th = thresholds or JudgeThresholds()
    si = sliding_synchrony(traces.probe("affordance"), traces.probe("critical"), width)
    hits = np.nonzero(si > th.theta_success)[0]
    return int(hits[0]) if hits.size else None


def _evaluation_window(traces: TraceSet, pass_index: int | None) -> tuple[int, int]:
    """The judged window: the chosen pass's firing window of the last
    critical-object proposition in the task's own proposition order (so a
    permuted firing schedule is judged on the same proposition); defaults
    to the pass's final window when no proposition binds the critical
    object."""
    pi = traces.last_pass_index() if pass_index is None else pass_index
    wins = traces.pass_windows(pi)
    if not wins:
        raise ValueError(f"no windows recorded for pass {pass_index}")
    critical = [w for w in wins if w.contains_critical]
    if not critical:
        return wins[-1].start, wins[-1].end
    chosen = max(critical, key=lambda w: (w.spec_index, w.start))
    return chosen.start, chosen.end


def judge_inference(
    traces: TraceSet,
    thresholds: JudgeThresholds | None = None,
    window: tuple[int, int] | None = None,
    pass_index: int | None = None,
) -> Verdict:
    th = thresholds or JudgeThresholds()
    win = window if window is not None else _evaluation_window(traces, pass_index)
    aff = traces.probe("affordance")
    crit = traces.probe("critical")
    noaff = traces.probe("noAffordance")
    noncrit = traces.probe("noncritical")
    si_ac = synchrony_index(aff, crit, win)
    si_nc = synchrony_index(noaff, crit, win)
    si_an = synchrony_index(aff, noncrit, win)
    ok = si_ac >= th.theta_success and (si_ac - si_nc) >= th.margin and si_ac > si_an
    return Verdict(
        outcome="success" if ok else "failure",
        si_afford_critical=si_ac,
        si_noafford_critical=si_nc,
        si_afford_noncritical=si_an,
        evaluation_window=win,
    )


# ---------------------------------------------------------------------------
# Matrix runs


@dataclass(frozen=True)
class CellResult:
    task_id: str
    arch_kind: str
    variant: str | None
    seed: int
    verdict: Verdict
    expected: str
    time_to_criterion: int | None

    @property
    def matches(self) -> bool:
        return self.verdict.outcome == self.expected

    @property
    def cell_id(self) -> str:
        v = f"-{self.variant}" if self.variant else ""
        return f"{self.task_id}/{self.arch_kind}{v}"


@dataclass
class MatrixReport:
    results: list[CellResult]
    thresholds: JudgeThresholds

    def by_cell(self) -> dict[str, list[CellResult]]:
        out: dict[str, list[CellResult]] = {}
        for r in self.results:
            out.setdefault(r.cell_id, []).append(r)
        return out

    def agreement(self) -> dict[str, float]:
        return {
            cid: sum(r.matches for r in rs) / len(rs)
            for cid, rs in self.by_cell().items()
        }

    def all_match(self, seed: int | None = None) -> bool:
        rs = self.results if seed is None else [r for r in self.results if r.seed == seed]
        return all(r.matches for r in rs)

    def summary(self) -> str:
        lines = []
        header = f"{'cell':<16}{'expected':<10}{'verdict':<10}{'agree':<8}{'siAC':>7}{'siNC':>7}{'siAN':>7}{'ttc':>6}"
        lines.append(header)
        lines.append("-" * len(header))
        agreement = self.agreement()
        for cid, rs in self.by_cell().items():
            r0 = rs[0]
            ttc = "-" if r0.time_to_criterion is None else str(r0.time_to_criterion)
            lines.append(
                f"{cid:<16}{r0.expected:<10}{r0.verdict.outcome:<10}"
                f"{agreement[cid]:<8.2f}"
                f"{r0.verdict.si_afford_critical:>7.3f}"
                f"{r0.verdict.si_noafford_critical:>7.3f}"
                f"{r0.verdict.si_afford_noncritical:>7.3f}"
                f"{ttc:>6}"
            )
        total = sum(r.matches for r in self.results)
        lines.append(f"{total}/{len(self.results)} runs match the expected verdicts")
        return "\n".join(lines)

    def export_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["task", "arch", "variant", "seed", "verdict", "expected", "siAC", "siNC", "siAN", "timeToCriterion"])
            for r in self.results:
                w.writerow(
                    [
                        r.task_id,
                        r.arch_kind,
                        r.variant or "",
                        r.seed,
                        r.verdict.outcome,
                        r.expected,
                        repr(r.verdict.si_afford_critical),
                        repr(r.verdict.si_noafford_critical),
                        repr(r.verdict.si_afford_noncritical),
                        "" if r.time_to_criterion is None else r.time_to_criterion,
                    ]
                )


def run_task(
    task: TaskSpec,
    arch: ArchConfig,
    params: SimParams | None = None,
    seed: int = 7,
    backend: str | None = None,
    schedule: Schedule | None = None,
) -> TraceSet:
    """Build and run one task under one architecture."""
    params = params or SimParams()
    net = build_network(task, arch)
    sched = schedule or make_schedule(net.task, arch, params)
    return run(net, sched, params, seed, backend=backend)


def run_cell(
    cell: MatrixCell,
    params: SimParams | None = None,
    seed: int = 7,
    thresholds: JudgeThresholds | None = None,
    backend: str | None = None,
    mu_override: float | None = None,
) -> tuple[CellResult, TraceSet]:
    arch = ArchConfig.from_kind(cell.arch_kind, mu_override=mu_override)
    traces = run_task(cell.fixture, arch, params=params, seed=seed, backend=backend)
    verdict = judge_inference(traces, thresholds)
    return (
        CellResult(
            task_id=cell.task_id,
            arch_kind=cell.arch_kind,
            variant=cell.variant,
            seed=seed,
            verdict=verdict,
            expected=cell.expected_verdict,
            time_to_criterion=time_to_criterion(traces, thresholds),
        ),
        traces,
    )


def _cell_job(args) -> CellResult:
    idx, seed, params, thresholds, backend, mu_override = args
    cell = matrix_cells()[idx]
    result, _ = run_cell(cell, params=params, seed=seed, thresholds=thresholds, backend=backend, mu_override=mu_override)
    return result


def max_workers() -> int:
    raw = os.environ.get("PHYLO_SIM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_matrix(
    params: SimParams | None = None,
    seeds: list[int] | None = None,
    thresholds: JudgeThresholds | None = None,
    backend: str | None = None,
    mu_override: float | None = None,
) -> MatrixReport:
    """Run all 17 cells for every seed; cell failures are reported, never raised."""
    params = params or SimParams()
    thresholds = thresholds or JudgeThresholds()
    seeds = seeds or [7]
    jobs = [
        (idx, seed, params, thresholds, backend, mu_override)
        for idx in range(len(matrix_cells()))
        for seed in seeds
    ]
    workers = max_workers()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell_job, jobs))
    else:
        results = [_cell_job(j) for j in jobs]
    return MatrixReport(results=results, thresholds=thresholds)
