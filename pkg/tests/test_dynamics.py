import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phylosim.dynamics import (
    Schedule,
    ScheduleEntry,
    SimParams,
    inhibitor_step,
    leaky_integrate,
    make_schedule,
    run,
)
from phylosim.model import ArchConfig, Inhibitor, build_network, parse_task_spec
from phylosim.tasks import builtin_task

PROBES = {
    "affordance": "affordance*",
    "critical": "critical*",
    "noAffordance": "no-affordance*",
    "noncritical": "other*",
}


def test_leaky_integrate_fixed_point():
    assert leaky_integrate(0.0, 0.0, 0.5, 0.1) == 0.0


def test_leaky_integrate_pure_decay():
    assert leaky_integrate(1.0, 0.0, 0.5, 0.1) == pytest.approx(0.9)


def test_leaky_integrate_growth():
    # 0.5 + 0.3*1*(1-0.5) - 0.1*0.5
    assert leaky_integrate(0.5, 1.0, 0.3, 0.1) == pytest.approx(0.6)


@settings(max_examples=200, deadline=None)
@given(
    a=st.floats(0, 1),
    net=st.floats(-50, 50),
    growth=st.floats(0, 2),
    decay=st.floats(0, 1),
)
def test_leaky_integrate_stays_bounded(a, net, growth, decay):
    out = leaky_integrate(a, net, growth, decay)
    assert 0.0 <= out <= 1.0


def test_inhibitor_idle():
    inh, suppressed = inhibitor_step(Inhibitor(), sp_active=False, params=SimParams())
    assert (inh.charge, inh.refractory_remaining, suppressed) == (0, 0, False)


def test_inhibitor_trips_at_window():
    p = SimParams()
    inh, suppressed = inhibitor_step(
        Inhibitor(charge=p.inhibitor_window - 1), sp_active=True, params=p
    )
    assert suppressed
    assert inh.refractory_remaining == p.refractory
    assert inh.charge == 0


def test_inhibitor_refractory_countdown():
    inh, suppressed = inhibitor_step(Inhibitor(refractory_remaining=1), sp_active=True, params=SimParams())
    assert suppressed
    assert inh.refractory_remaining == 0


def test_inhibitor_automaton_trace():
    # independent re-simulation of the stated automaton over a firing pattern
    p = SimParams()
    pattern = [True] * 12 + [False] * 3 + [True] * 25
    inh = Inhibitor()
    charge = refr = 0
    for active in pattern:
        inh, suppressed = inhibitor_step(inh, active, p)
        # oracle
        if refr > 0:
            refr -= 1
            charge = 0
            want = True
        elif active:
            charge += 1
            if charge >= p.inhibitor_window:
                refr = p.refractory
                charge = 0
                want = True
            else:
                want = False
        else:
            charge = 0
            want = False
        assert (inh.charge, inh.refractory_remaining, suppressed) == (charge, refr, want)


def test_make_schedule_single_pass():
    task = builtin_task("mo", ArchConfig.from_kind("dbo"))
    task = task.__class__(**{**task.__dict__, "schedule_mode": "single-pass"})
    sched = make_schedule(task)
    assert len(sched.entries) == 3
    assert sched.total_iters == 270


def test_make_schedule_double_pass_order():
    task = builtin_task("ro", ArchConfig.from_kind("mo"))  # cat fixture, double time
    sched = make_schedule(task)
    assert [e.label for e in sched.entries] == ["p1", "p2", "p1", "p2"]
    assert [e.pass_index for e in sched.entries] == [0, 0, 1, 1]


def test_make_schedule_one_prop():
    task = builtin_task("ro", ArchConfig.from_kind("ro"))
    sched = make_schedule(task)
    assert len(sched.entries) == 1


def test_make_schedule_requires_driver_props():
    doc = {
        "name": "empty",
        "analogs": [
            {"name": "P", "role": "driver",
             "objects": [{"name": "A", "semantics": ["token", "critical*", "other*"]}],
             "propositions": []},
            {"name": "M", "role": "recipient",
             "objects": [{"name": "B", "semantics": ["token"]}],
             "propositions": [{"label": "m1", "predicate": "q",
                               "roleSemantics": [["affordance*", "no-affordance*"]],
                               "args": ["B"]}]},
        ],
        "probes": PROBES,
    }
    task = parse_task_spec(doc)
    with pytest.raises(ValueError, match="driver proposition"):
        make_schedule(task)


# ---------------------------------------------------------------------------
# Full-run behavior


def _run(task_id, arch_kind, seed=7, **overrides):
    arch = ArchConfig.from_kind(arch_kind)
    task = builtin_task(task_id, arch)
    net = build_network(task, arch)
    params = SimParams().with_overrides(**overrides)
    return run(net, params=params, seed=seed)


def test_run_shapes_and_probes():
    traces = _run("dbo", "rm")
    assert traces.iterations == 180
    for role in ("affordance", "critical", "noAffordance", "noncritical"):
        assert traces.probe(role).shape == (180,)


def test_run_is_deterministic():
    a = _run("dbo", "rm")
    b = _run("dbo", "rm")
    assert np.array_equal(a.sem, b.sem)
    assert np.array_equal(a.drv, b.drv)
    assert np.array_equal(a.rec, b.rec)


def test_run_does_not_mutate_network():
    arch = ArchConfig.from_kind("mo")
    net = build_network(builtin_task("mo", arch), arch)
    run(net, seed=7)
    assert net.mapping.max_abs_weight() == 0.0
    assert all(t.activation == 0.0 for t in net.driver.tokens.values())


def test_mo_double_pass_weights_appear_at_first_boundary():
    arch = ArchConfig.from_kind("mo")
    net = build_network(builtin_task("mo", arch), arch)
    traces = run(net, seed=7, record_weight_history=True)
    assert traces.iterations == 540
    assert traces.weight_history[0].max_abs_weight() > 0.0


def test_inactive_proposition_stays_quiet():
    traces = _run("dbo", "dbo")
    # while p1 fires (window 1), p2's SP must stay below threshold
    sp2 = traces.unit("driver", "p2.sp1")[20:90]
    assert sp2.max() < 0.5


def test_driver_anti_phase_and_oscillation():
    traces = _run("ro", "ro")
    sp1 = traces.unit("driver", "p1.sp1")
    sp2 = traces.unit("driver", "p1.sp2")
    both = (sp1 > 0.5) & (sp2 > 0.5)
    assert both[20:90].mean() < 0.05
    for s in (sp1, sp2):
        crossings = np.sum((s[1:90] > 0.5) & (s[:89] <= 0.5))
        assert crossings >= 2


def test_semantics_rise_with_their_binding():
    # while the critical object's proposition fires, its predicate's
    # driver-only semantics and the object's own semantic move together
    # (v5 connects only to the driver predicate; v1 is shared with memory
    # and saturates)
    traces = _run("dbo", "dbo")
    crit = traces.semantic("critical*")
    v5 = traces.semantic("v5")
    window = slice(20, 90)
    corr = np.corrcoef(crit[window], v5[window])[0, 1]
    assert corr > 0.9


def test_activation_bounds_everywhere():
    for task_id, arch_kind in (("dbo", "dbo"), ("ro", "rm"), ("mo", "mo"), ("rm", "rm")):
        traces = _run(task_id, arch_kind)
        for arr in (traces.sem, traces.drv, traces.rec):
            assert arr.min() >= 0.0
            assert arr.max() <= 1.0


def test_noise_free_symmetry():
    doc = {
        "name": "sym",
        "analogs": [
            {"name": "P", "role": "driver",
             "objects": [{"name": "A", "semantics": ["token", "critical*"]},
                         {"name": "B", "semantics": ["token", "other*"]}],
             "propositions": [{"label": "p", "predicate": "twin",
                               "roleSemantics": [["s1", "s2"], ["s1", "s2"]],
                               "args": ["A", "B"]}]},
            {"name": "M", "role": "recipient",
             "objects": [{"name": "C", "semantics": ["token"]}],
             "propositions": [{"label": "m", "predicate": "one",
                               "roleSemantics": [["s1", "affordance*", "no-affordance*"]],
                               "args": ["C"]}]},
        ],
        "probes": PROBES,
    }
    arch = ArchConfig.from_kind("rm")
    net = build_network(parse_task_spec(doc), arch)
    traces = run(net, params=SimParams(noise=0.0), seed=3)
    a = traces.unit("driver", "p.sp1")
    b = traces.unit("driver", "p.sp2")
    assert np.array_equal(a, b)
    # and noise breaks the tie
    noisy = run(net, params=SimParams(), seed=3)
    assert not np.array_equal(noisy.unit("driver", "p.sp1"), noisy.unit("driver", "p.sp2"))


def test_recursion_convention():
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
        "probes": PROBES,
    }
    arch = ArchConfig.from_kind("rm")
    net = build_network(parse_task_spec(doc), arch)
    traces = run(net, seed=7)
    k_window = next(w for w in traces.windows if w.label == "k")
    span = slice(k_window.start, k_window.end)
    # the embedded proposition fires as a filler...
    assert traces.unit("driver", "p")[span].max() > 0.5
    # ...but its own role bindings stay inactive
    assert traces.unit("driver", "p.sp1")[span].max() < 0.1
    assert traces.unit("driver", "p.sp2")[span].max() < 0.1


def test_trace_csv_round_trip(tmp_path):
    import csv

    traces = _run("dbo", "dbo")
    out = tmp_path / "traces.csv"
    traces.export_traces_csv(out, verbosity="probes")
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == traces.iterations * 4
    got = float(rows[0]["activation"])
    assert got == traces.sem[0, traces.sem_names.index(rows[0]["unit"])]
    traces.export_windows_csv(tmp_path / "windows.csv")
    with open(tmp_path / "windows.csv") as fh:
        wrows = list(csv.DictReader(fh))
    assert [r["propositionLabel"] for r in wrows] == ["p1", "p2"]
    assert [int(r["endIter"]) for r in wrows] == [90, 180]


def test_sim_params_validation():
    with pytest.raises(ValueError):
        SimParams(fire_threshold=1.5)
    with pytest.raises(ValueError):
        SimParams(iters_per_prop=5)
    with pytest.raises(ValueError):
        SimParams(decay=-0.1)


def test_custom_schedule_is_respected():
    arch = ArchConfig.from_kind("dbo")
    net = build_network(builtin_task("dbo", arch), arch)
    sched = Schedule(
        entries=(ScheduleEntry("p2", 90, 0), ScheduleEntry("p1", 90, 0)),
        pass_count=1,
    )
    traces = run(net, sched, seed=7)
    assert [w.label for w in traces.windows] == ["p2", "p1"]
    assert [w.spec_index for w in traces.windows] == [1, 0]
