"""Fixture documents on disk.

The built-in task variants are also shipped as plain task documents under
``phylosim/fixtures/`` so they can be rerun or edited without touching the
code. ``write_fixture_documents`` regenerates them from the canonical
in-code definitions; a test pins the two representations together.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .model import parse_task_spec, task_spec_to_document
from .tasks import FIXTURE_DOCUMENTS

# scheduleMode each document ships with (its primary use in the matrix)
_CANONICAL_MODE = {
    "basic_affordance": "single-pass",
    "relation_cat": "single-pass",
    "relation_balints": "single-pass",
    "relation_relational": "single-pass",
    "correspondence": "double-pass",
    "combined_flat": "single-pass",
    "combined_relational": "single-pass",
}


def fixture_document(name: str) -> dict:
    doc = dict(FIXTURE_DOCUMENTS[name])
    doc["scheduleMode"] = _CANONICAL_MODE[name]
    # round-trip through the parser: validates and normalizes field order
    return task_spec_to_document(parse_task_spec(doc))


def write_fixture_documents(target: Path) -> list[Path]:
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(FIXTURE_DOCUMENTS):
        path = target / f"{name}.json"
        path.write_text(json.dumps(fixture_document(name), indent=2) + "\n")
        written.append(path)
    return written


def packaged_fixture(name: str) -> dict:
    data = resources.files("phylosim").joinpath(f"fixtures/{name}.json").read_text()
    return json.loads(data)


def packaged_fixture_path(name: str) -> Path:
    return Path(str(resources.files("phylosim").joinpath(f"fixtures/{name}.json")))
