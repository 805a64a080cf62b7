import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phylosim.analysis import (
    JudgeThresholds,
    judge_inference,
    sliding_synchrony,
    synchrony_index,
    time_to_criterion,
)


def test_si_identity():
    a = np.array([0.2, 0.9, 0.4])
    assert synchrony_index(a, a) == pytest.approx(1.0)


def test_si_disjoint_support():
    a = np.array([1.0, 0.0, 1.0, 0.0])
    b = np.array([0.0, 1.0, 0.0, 1.0])
    assert synchrony_index(a, b) == 0.0


def test_si_worked_example():
    assert synchrony_index([1, 0, 1, 0], [1, 1, 0, 0]) == pytest.approx(1 / 3)


def test_si_empty_activity():
    assert synchrony_index([0.0, 0.0], [0.0, 0.0]) == 0.0


def test_si_rejects_mismatched_lengths():
    with pytest.raises(ValueError):
        synchrony_index([1, 0], [1, 0, 0])


def test_si_window_bounds_checked():
    with pytest.raises(ValueError):
        synchrony_index([1, 0, 1], [1, 0, 1], window=(0, 5))


series = st.lists(st.floats(0, 1), min_size=1, max_size=40)


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_si_symmetric_and_bounded(data):
    a = data.draw(series)
    b = data.draw(st.lists(st.floats(0, 1), min_size=len(a), max_size=len(a)))
    ab = synchrony_index(a, b)
    ba = synchrony_index(b, a)
    assert ab == pytest.approx(ba)
    assert 0.0 <= ab <= 1.0


def _square_wave(period, duty, length, phase=0):
    t = (np.arange(length) + phase) % period
    return (t < duty).astype(float)


def _brute_force_overlap(a, b):
    # for binary square waves the overlap ratio is a plain event count
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    either = np.count_nonzero(a | b)
    if either == 0:
        return 0.0
    return np.count_nonzero(a & b) / either


@pytest.mark.parametrize("phase", [0, 3, 7, 12])
def test_si_matches_brute_force_on_square_waves(phase):
    a = _square_wave(20, 10, 200)
    b = _square_wave(20, 10, 200, phase=phase)
    assert abs(synchrony_index(a, b) - _brute_force_overlap(a, b)) <= 1e-12


def test_sliding_synchrony_matches_direct_windows():
    rng = np.random.default_rng(0)
    a = rng.random(120)
    b = rng.random(120)
    sl = sliding_synchrony(a, b, width=30)
    for t in (30, 60, 113):
        assert sl[t] == pytest.approx(synchrony_index(a, b, (t - 30, t)))
    assert np.isnan(sl[29])


# ---------------------------------------------------------------------------
# Verdicts on real runs


def test_judge_basic_affordance_success(cell_traces):
    _, traces = cell_traces("dbo/dbo")
    v = judge_inference(traces)
    assert v.outcome == "success"
    assert v.evaluation_window == (0, 90)  # window of the critical proposition


def test_judge_double_time_mapping_arch_still_fails(cell_traces):
    _, traces = cell_traces("ro/mo")
    assert judge_inference(traces).outcome == "failure"


def test_judge_correspondence_pass_contrast(cell_traces):
    _, traces = cell_traces("mo/mo")
    assert judge_inference(traces, pass_index=0).outcome == "failure"
    assert judge_inference(traces, pass_index=1).outcome == "success"


def test_judge_is_pure(cell_traces):
    _, traces = cell_traces("rm/rm")
    a = judge_inference(traces)
    b = judge_inference(traces)
    assert a == b


def test_judge_custom_window(cell_traces):
    _, traces = cell_traces("dbo/dbo")
    v = judge_inference(traces, window=(90, 180))
    assert v.evaluation_window == (90, 180)
    # the critical object is silent in the second window
    assert v.outcome == "failure"


def test_time_to_criterion_on_failure_is_none(cell_traces):
    _, traces = cell_traces("mo/dbo")
    assert time_to_criterion(traces) is None


def test_custom_thresholds_change_verdict(cell_traces):
    _, traces = cell_traces("dbo/dbo")
    strict = judge_inference(traces, JudgeThresholds(theta_success=0.99, margin=0.1))
    assert strict.outcome == "failure"


def test_relation_task_overcomes_initial_semantic_bias(cell_traces):
    # the no-affordance candidate competes early (semantic overlap favours
    # it) but the shared proposition structure wins out within the window
    _, traces = cell_traces("ro/ro")
    rival = traces.unit("recipient", "no-afford1")
    winner = traces.unit("recipient", "affordance.r1")
    assert rival[:15].max() > 0.3  # genuinely in the race at first
    assert rival[60:90].mean() < 0.1
    assert winner[60:90].mean() > 0.5


def test_correspondence_task_mapping_overcomes_semantic_bias(cell_traces):
    # in the first pass the critical object fires with the no-affordance
    # semantic; the learned correspondences reverse that in the second
    _, traces = cell_traces("mo/mo")
    p1 = judge_inference(traces, pass_index=0)
    p2 = judge_inference(traces, pass_index=1)
    assert p1.si_noafford_critical > p1.si_afford_critical + 0.3
    assert p2.si_afford_critical > p2.si_noafford_critical + 0.3


# ---------------------------------------------------------------------------
# Matrix report plumbing


def test_matrix_report_shape(matrix_default):
    assert len(matrix_default.results) == 17
    assert matrix_default.all_match()
    assert set(matrix_default.agreement().values()) == {1.0}


def test_matrix_csv_export(matrix_default, tmp_path):
    import csv

    path = tmp_path / "matrix.csv"
    matrix_default.export_csv(path)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 17
    assert {r["verdict"] for r in rows} == {"success", "failure"}
    assert all(r["verdict"] == r["expected"] for r in rows)


def test_matrix_summary_mentions_all_cells(matrix_default):
    text = matrix_default.summary()
    assert "17/17" in text
    assert "mo/rm" in text and "ro/dbo-balints" in text
