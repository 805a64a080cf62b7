import numpy as np
import pytest

from phylosim.backend import HAVE_COMPILED, available_backends, make_engine
from phylosim.dynamics import run
from phylosim.model import ArchConfig, build_network
from phylosim.tasks import builtin_task

needs_compiled = pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernel not built")


def _net(task_id, arch_kind):
    arch = ArchConfig.from_kind(arch_kind)
    return build_network(builtin_task(task_id, arch), arch)


def test_python_backend_always_available():
    assert "python" in available_backends()


def test_unknown_backend_rejected():
    with pytest.raises((ValueError, RuntimeError)):
        make_engine(None, None, None, None, None, None, None, None, backend="fortran")


@needs_compiled
@pytest.mark.parametrize(
    "task_id,arch_kind", [("dbo", "dbo"), ("ro", "ro"), ("ro", "mo"), ("mo", "mo"), ("rm", "rm")]
)
def test_backends_bit_identical(task_id, arch_kind):
    net = _net(task_id, arch_kind)
    py = run(net, seed=7, backend="python")
    cy = run(net, seed=7, backend="compiled")
    assert np.array_equal(py.sem, cy.sem)
    assert np.array_equal(py.drv, cy.drv)
    assert np.array_equal(py.rec, cy.rec)
    for kind in py.mapping.kinds:
        assert np.array_equal(py.mapping.kinds[kind].weights, cy.mapping.kinds[kind].weights)


@needs_compiled
def test_backends_bit_identical_across_seeds():
    net = _net("mo", "rm")
    for seed in (0, 3, 11):
        py = run(net, seed=seed, backend="python")
        cy = run(net, seed=seed, backend="compiled")
        assert np.array_equal(py.sem, cy.sem)


def test_env_var_selects_backend(monkeypatch):
    from phylosim import backend as b

    monkeypatch.setenv("PHYLOSIM_BACKEND", "python")
    assert b.default_backend() == "python"
    monkeypatch.delenv("PHYLOSIM_BACKEND")
    assert b.default_backend() in ("python", "compiled")
