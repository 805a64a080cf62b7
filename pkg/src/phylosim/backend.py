"""Backend selection: compiled kernel when available, pure Python otherwise.

Both engines implement the same update loop with the same operation order,
so results are bit-identical; the compiled one is just fast. Set
``PHYLOSIM_BACKEND=python`` (or pass ``backend=``) to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernel_py

try:
    from . import _kernel as _kernel_c

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on the build environment
    _kernel_c = None
    HAVE_COMPILED = False


def default_backend() -> str:
    env = os.environ.get("PHYLOSIM_BACKEND")
    if env in ("python", "compiled"):
        return env
    return "compiled" if HAVE_COMPILED else "python"


def available_backends() -> list[str]:
    return ["compiled", "python"] if HAVE_COMPILED else ["python"]


def make_engine(wiring, params, noise, sem_trace, drv_trace, rec_trace, h_mats, w_mats, backend: str | None = None):
    backend = backend or default_backend()
    if backend == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel unavailable; rebuild or use backend='python'")
        return _kernel_c.Engine(wiring, params, noise, sem_trace, drv_trace, rec_trace, h_mats, w_mats)
    if backend == "python":
        return _kernel_py.Engine(wiring, params, noise, sem_trace, drv_trace, rec_trace, h_mats, w_mats)
    raise ValueError(f"unknown backend {backend!r}")
