import pytest

from phylosim import JudgeThresholds, SimParams, run_matrix
from phylosim.analysis import run_cell
from phylosim.tasks import matrix_cells

ALL_SEEDS = list(range(20))


@pytest.fixture(scope="session")
def default_params():
    return SimParams()


@pytest.fixture(scope="session")
def thresholds():
    return JudgeThresholds()


@pytest.fixture(scope="session")
def matrix_default():
    """The 17-cell matrix at the default seed."""
    return run_matrix(seeds=[7])


@pytest.fixture(scope="session")
def matrix_sweep():
    """The 17-cell matrix across 20 seeds (shared by robustness checks)."""
    return run_matrix(seeds=ALL_SEEDS)


@pytest.fixture(scope="session")
def cells_by_id():
    return {c.cell_id: c for c in matrix_cells()}


@pytest.fixture(scope="session")
def cell_traces(cells_by_id):
    """Lazily cached (cell_id, seed) -> (CellResult, TraceSet)."""
    cache = {}

    def get(cell_id, seed=7, **kw):
        key = (cell_id, seed, tuple(sorted(kw.items())))
        if key not in cache:
            params = SimParams().with_overrides(**kw) if kw else None
            cache[key] = run_cell(cells_by_id[cell_id], params=params, seed=seed)
        return cache[key]

    return get
