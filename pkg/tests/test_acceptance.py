"""Acceptance suite: the seven headline criteria, one test per criterion.

Each test prints a single PASS/FAIL line (run with ``pytest -s`` or read the
captured output) and asserts at its stated tolerance. Everything runs at
default parameters and thresholds.
"""

import time

import numpy as np

from phylosim.analysis import judge_inference, run_matrix, synchrony_index, time_to_criterion
from phylosim.dynamics import run
from phylosim.model import ArchConfig, build_network, flatten_task
from phylosim.tasks import matrix_cells
from phylosim.analysis import run_cell

ALL_SEEDS = list(range(20))


def _report(name: str, ok: bool, detail: str = "") -> bool:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: {status}{suffix}")
    return ok


def test_criterion_1_golden_matrix():
    """17/17 verdicts match the published outcome pattern, under a minute."""
    t0 = time.time()
    report = run_matrix(seeds=[7])
    elapsed = time.time() - t0
    mismatches = [r.cell_id for r in report.results if not r.matches]
    ok = not mismatches and elapsed < 60.0
    assert _report(
        "1 golden-matrix",
        ok,
        f"{17 - len(mismatches)}/17 in {elapsed:.1f}s" + (f"; wrong: {mismatches}" if mismatches else ""),
    )


def test_criterion_2_seed_robustness(matrix_sweep):
    """Each cell matches its expected verdict in >= 95% of 20 seeded runs."""
    agreement = matrix_sweep.agreement()
    worst = min(agreement.values())
    bad = {k: v for k, v in agreement.items() if v < 0.95}
    assert _report("2 seed-robustness", not bad, f"min agreement {worst:.2f} over {len(ALL_SEEDS)} seeds")


def test_criterion_3_mapping_onset_timing(cell_traces):
    """Correspondence task under the mapping architectures: first pass fails,
    second succeeds, and the sliding criterion is first met during pass 2."""
    ok = True
    details = []
    for cell_id in ("mo/mo", "mo/rm"):
        _, traces = cell_traces(cell_id)
        p1 = judge_inference(traces, pass_index=0)
        p2 = judge_inference(traces, pass_index=1)
        ttc = time_to_criterion(traces)
        cell_ok = p1.outcome == "failure" and p2.outcome == "success" and ttc is not None and 271 <= ttc <= 540
        ok &= cell_ok
        details.append(f"{cell_id}: p1={p1.outcome} p2={p2.outcome} ttc={ttc}")
    assert _report("3 mapping-onset", ok, "; ".join(details))


def test_criterion_4_equal_speed(cell_traces):
    """All four architectures reach criterion on the basic task at the same pace."""
    ttcs = []
    for arch in ("dbo", "ro", "mo", "rm"):
        result, _ = cell_traces(f"dbo/{arch}")
        ttcs.append(result.time_to_criterion)
    ok = all(t is not None for t in ttcs) and max(ttcs) / min(ttcs) <= 1.25
    assert _report("4 equal-speed", ok, f"ttcs={ttcs}")


def test_criterion_5_ablation_nulls():
    """mu=0 zeroes every weight and flips mapping-dependent successes;
    flattening the relational fixtures flips the relation-task successes."""
    checks = []
    for cell_id in ("mo/mo", "mo/rm", "rm/rm"):
        cell = next(c for c in matrix_cells() if c.cell_id == cell_id)
        result, traces = run_cell(cell, seed=7, mu_override=0.0)
        checks.append(traces.mapping.max_abs_weight() == 0.0)
        checks.append(result.verdict.outcome == "failure")
    for arch_kind in ("ro", "rm"):
        cell = next(c for c in matrix_cells() if c.cell_id == f"ro/{arch_kind}")
        arch = ArchConfig.from_kind(arch_kind)
        net = build_network(flatten_task(cell.fixture), arch)
        verdict = judge_inference(run(net, seed=7))
        checks.append(verdict.outcome == "failure")
    ok = all(checks)
    assert _report("5 ablation-nulls", ok, f"{sum(checks)}/{len(checks)} checks")


def test_criterion_6_dynamics_invariants():
    """Bounds, anti-phase, oscillation count, determinism, the recursion
    convention, and the synchrony-index oracle."""
    problems = []

    # activation bounds across all 17 fixtures and 20 seeds
    for cell in matrix_cells():
        for seed in ALL_SEEDS:
            _, traces = run_cell(cell, seed=seed)
            for arr in (traces.sem, traces.drv, traces.rec):
                if arr.min() < 0.0 or arr.max() > 1.0:
                    problems.append(f"bounds {cell.cell_id} seed {seed}")
                    break

    # anti-phase and oscillation on the two-binding relational window
    cell = next(c for c in matrix_cells() if c.cell_id == "ro/ro")
    _, traces = run_cell(cell, seed=7)
    sp1 = traces.unit("driver", "p1.sp1")
    sp2 = traces.unit("driver", "p1.sp2")
    co = ((sp1 > 0.5) & (sp2 > 0.5))[20:90].mean()
    if co >= 0.05:
        problems.append(f"anti-phase co-activity {co:.3f}")
    for name, s in (("sp1", sp1), ("sp2", sp2)):
        ups = int(np.sum((s[1:90] > 0.5) & (s[:89] <= 0.5)))
        if ups < 2:
            problems.append(f"oscillation {name} {ups} crossings")

    # determinism: bit-identical repeat
    again = run_cell(cell, seed=7)[1]
    if not (
        np.array_equal(traces.sem, again.sem)
        and np.array_equal(traces.drv, again.drv)
        and np.array_equal(traces.rec, again.rec)
    ):
        problems.append("determinism")

    # recursion convention: child bindings of a proposition-valued filler stay quiet
    from phylosim.model import parse_task_spec

    doc = {
        "name": "recursion",
        "analogs": [
            {"name": "P", "role": "driver",
             "objects": [{"name": "Mary", "semantics": ["token", "critical*"]},
                         {"name": "Nucleus", "semantics": ["token", "n1"]},
                         {"name": "Electron", "semantics": ["token", "other*"]}],
             "propositions": [
                 {"label": "p", "predicate": "larger-than",
                  "roleSemantics": [["big1", "big2"], ["small1", "small2"]],
                  "args": ["Nucleus", "Electron"]},
                 {"label": "k", "predicate": "knows",
                  "roleSemantics": [["knower1", "knower2"], ["known1", "known2"]],
                  "args": ["Mary", "p"]}]},
            {"name": "M", "role": "recipient",
             "objects": [{"name": "Bill", "semantics": ["token", "b1"]}],
             "propositions": [{"label": "m", "predicate": "thinker",
                               "roleSemantics": [["knower1", "affordance*", "no-affordance*"]],
                               "args": ["Bill"]}]},
        ],
        "probes": {"affordance": "affordance*", "critical": "critical*",
                   "noAffordance": "no-affordance*", "noncritical": "other*"},
    }
    arch = ArchConfig.from_kind("rm")
    rec_traces = run(build_network(parse_task_spec(doc), arch), seed=7)
    k_win = next(w for w in rec_traces.windows if w.label == "k")
    for sp_name in ("p.sp1", "p.sp2"):
        peak = rec_traces.unit("driver", sp_name)[k_win.start:k_win.end].max()
        if peak >= 0.1:
            problems.append(f"recursion {sp_name} peak {peak:.3f}")

    # synchrony-index oracle on synthetic square waves
    t = np.arange(200)
    for phase in (0, 5, 10):
        a = ((t % 20) < 10).astype(float)
        b = (((t + phase) % 20) < 10).astype(float)
        brute = (np.count_nonzero(a.astype(bool) & b.astype(bool))
                 / np.count_nonzero(a.astype(bool) | b.astype(bool)))
        if abs(synchrony_index(a, b) - brute) > 1e-12:
            problems.append(f"si-oracle phase {phase}")

    assert _report("6 dynamics-invariants", not problems, "; ".join(problems) or "all hold")


def test_criterion_7_fixture_fidelity():
    """Fixture data matches the committed transcription and the overlap design."""
    from phylosim.fixture_io import fixture_document, packaged_fixture
    from phylosim.tasks import FIXTURE_DOCUMENTS, builtin_task

    problems = []
    for name in FIXTURE_DOCUMENTS:
        if packaged_fixture(name) != fixture_document(name):
            problems.append(f"document drift: {name}")

    task = builtin_task("dbo", ArchConfig.from_kind("dbo"))
    crit = next(o for o in task.driver.objects if o.name == "Critical")
    for obj in task.recipient.objects:
        shared = set(crit.semantics) & set(obj.semantics)
        if shared != {"token"}:
            problems.append(f"overlap design: Critical shares {shared} with {obj.name}")

    spot = {
        ("dbo", "affordance"): ["v1", "v2", "v3", "v4", "v7", "affordance*"],
        ("mo", "memory3"): ["v13", "v14", "v15", "v16", "v22", "affordance*"],
    }
    for (task_id, pred), want in spot.items():
        t = builtin_task(task_id, ArchConfig.from_kind("rm"))
        got = next(list(p.role_semantics[0]) for p in t.recipient.propositions if p.predicate == pred)
        if got != want:
            problems.append(f"spot check {task_id}/{pred}")

    assert _report("7 fixture-fidelity", not problems, "; ".join(problems) or "verbatim")
