"""Built-in task fixtures and the 17-cell task-by-architecture matrix.

Four task families probe increasingly demanding inference: basic
single-predicate affordance, multi-place relations, remembered
correspondences, and both combined. Architectures that cannot represent
relations get pre-flattened fixture variants where the source material
defines them (the "cat" and "balints" relation-task variants and the flat
combined-task variant); everything else is shared verbatim across
architectures. Success always means the affordance semantic firing in
synchrony with the critical object's semantic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ArchConfig, TaskSpec, TaskSpecError, parse_task_spec

TASK_IDS = ("dbo", "ro", "mo", "rm")

_PROBES = {
    "affordance": "affordance*",
    "critical": "critical*",
    "noAffordance": "no-affordance*",
    "noncritical": "other*",
}

_PERCEPTION_OBJECTS = [
    {"name": "Critical", "semantics": ["token", "critical*"]},
    {"name": "Other", "semantics": ["token", "other*"]},
]


def _analog(name, role, objects, props):
    return {
        "name": name,
        "role": role,
        "objects": objects,
        "propositions": [
            {"label": label, "predicate": pred, "roleSemantics": roles, "args": args}
            for label, pred, roles, args in props
        ],
    }


def _memory_objects(*names):
    return [{"name": n.capitalize(), "semantics": ["token", n]} for n in names]


# Basic affordance task: two objects in view, one of which matches a
# remembered predicate that carries the affordance feature. Objects share
# exactly one semantic (token) with everything in memory, so only the
# predicate overlap can disambiguate.
FIXTURE_BASIC_AFFORDANCE = {
    "name": "basic-affordance",
    "analogs": [
        _analog(
            "Perception",
            "driver",
            _PERCEPTION_OBJECTS,
            [
                ("p1", "vision1", [["v1", "v2", "v3", "v4", "v5", "v6"]], ["Critical"]),
                ("p2", "vision2", [["v7", "v8", "v9", "v10", "v11", "v12"]], ["Other"]),
            ],
        ),
        _analog(
            "Memory",
            "recipient",
            _memory_objects("target", "distractor"),
            [
                ("m1", "affordance", [["v1", "v2", "v3", "v4", "v7", "affordance*"]], ["Target"]),
                ("m2", "no-afford", [["v1", "v7", "v8", "v9", "no-affordance*"]], ["Distractor"]),
            ],
        ),
    ],
    "probes": _PROBES,
}

# Relation task, "cat" variant: no relations anywhere. The semantic overlap
# is rigged so each driver predicate matches a no-affordance memory
# predicate better than the affordance one.
FIXTURE_RELATION_CAT = {
    "name": "relation-cat",
    "analogs": [
        _analog(
            "Perception",
            "driver",
            _PERCEPTION_OBJECTS,
            [
                ("p1", "vision1", [["v1.1", "v2.1", "v3.1", "v4.1", "v5.1", "v6.1"]], ["Critical"]),
                ("p2", "vision2", [["v1.2", "v2.2", "v3.2", "v4.2", "v5.2", "v6.2"]], ["Other"]),
            ],
        ),
        _analog(
            "Memory",
            "recipient",
            _memory_objects("target", "distractor1", "distractor2", "distractor3"),
            [
                ("m1", "affordance", [["v1.1", "v2.1", "v3.1", "v8.1", "affordance*"]], ["Target"]),
                ("m2", "no-afford1", [["v1.2", "v2.2", "v3.2", "v7.2", "v8.2"]], ["Distractor1"]),
                ("m3", "no-afford2", [["v1.1", "v2.1", "v3.1", "v4.1", "v8.1", "no-affordance*"]], ["Distractor2"]),
                ("m4", "no-afford3", [["v1.2", "v2.2", "v3.2", "v4.2", "v7.2", "v8.2"]], ["Distractor3"]),
            ],
        ),
    ],
    "probes": _PROBES,
}

# Relation task, "balints" variant: the relation exists in memory but the
# driver still sees two separate one-place predicates.
FIXTURE_RELATION_BALINTS = {
    "name": "relation-balints",
    "analogs": [
        FIXTURE_RELATION_CAT["analogs"][0],
        _analog(
            "Memory",
            "recipient",
            _memory_objects("target", "distractor1", "distractor2", "distractor3"),
            [
                (
                    "m1",
                    "affordance",
                    [
                        ["v1.1", "v2.1", "v3.1", "affordance*"],
                        ["v1.2", "v2.2", "v3.2", "v7.2", "v8.2"],
                    ],
                    ["Target", "Distractor1"],
                ),
                ("m2", "no-afford1", [["v1.1", "v2.1", "v3.1", "v4.1", "no-affordance*"]], ["Distractor2"]),
                ("m3", "no-afford2", [["v1.2", "v2.2", "v3.2", "v4.2", "v7.2", "v8.2"]], ["Distractor3"]),
            ],
        ),
    ],
    "probes": _PROBES,
}

# Relation task, relational variant: one two-place driver proposition whose
# roles carry the same semantics as the cat variant's two predicates.
FIXTURE_RELATION_RELATIONAL = {
    "name": "relation-relational",
    "analogs": [
        _analog(
            "Perception",
            "driver",
            _PERCEPTION_OBJECTS,
            [
                (
                    "p1",
                    "visual-input",
                    [
                        ["v1.1", "v2.1", "v3.1", "v4.1", "v5.1", "v6.1"],
                        ["v1.2", "v2.2", "v3.2", "v4.2", "v5.2", "v6.2"],
                    ],
                    ["Critical", "Other"],
                ),
            ],
        ),
        FIXTURE_RELATION_BALINTS["analogs"][1],
    ],
    "probes": _PROBES,
}

# Correspondence task: the critical object matches the memory target on one
# predicate and the memory distractor on another; only an architecture that
# remembers the first mapping can resolve the second in the target's favor.
FIXTURE_CORRESPONDENCE = {
    "name": "correspondence",
    "analogs": [
        _analog(
            "Perception",
            "driver",
            _PERCEPTION_OBJECTS,
            [
                ("p1", "vision1", [["v1", "v2", "v3", "v4", "v5", "v6"]], ["Critical"]),
                ("p2", "vision2", [["v7", "v8", "v9", "v10", "v11", "v12"]], ["Critical"]),
                ("p3", "vision3", [["v13", "v14", "v15", "v16", "v17", "v18"]], ["Other"]),
            ],
        ),
        _analog(
            "Memory",
            "recipient",
            _memory_objects("target", "distractor"),
            [
                ("m1", "memory1", [["v1", "v2", "v3", "v4", "v19", "v20"]], ["Target"]),
                ("m2", "memory2", [["v7", "v8", "v9", "v10", "v21", "no-affordance*"]], ["Distractor"]),
                ("m3", "memory3", [["v13", "v14", "v15", "v16", "v22", "affordance*"]], ["Target"]),
            ],
        ),
    ],
    "probes": _PROBES,
}

# Combined task, flat variant (for the architectures without relations).
# Note: the first memory1.2 semantic is transcribed verbatim from the
# source table, which lists v2.1 where v1.2 looks intended.
FIXTURE_COMBINED_FLAT = {
    "name": "combined-flat",
    "analogs": [
        _analog(
            "Perception",
            "driver",
            _PERCEPTION_OBJECTS,
            [
                ("p1", "vision1.1", [["v1.1", "v2.1", "v3.1", "v4.1", "v5.1", "v6.1"]], ["Critical"]),
                ("p2", "vision1.2", [["v1.2", "v2.2", "v3.2", "v4.2", "v5.2", "v6.2"]], ["Other"]),
                ("p3", "vision2", [["v7", "v8", "v9", "v10", "v11", "v12"]], ["Critical"]),
                ("p4", "vision3", [["v13", "v14", "v15", "v16", "v17", "v18"]], ["Other"]),
            ],
        ),
        _analog(
            "Memory",
            "recipient",
            _memory_objects("target", "distractor1", "distractor2", "distractor3", "distractor4"),
            [
                ("m1", "memory1.1", [["v1.1", "v2.1", "v3.1", "v19", "v20", "v21"]], ["Target"]),
                ("m2", "memory1.2", [["v2.1", "v2.2", "v3.2", "v22", "v23", "v24"]], ["Distractor1"]),
                ("m3", "memory2", [["v1.1", "v2.1", "v3.1", "v4.1", "v25", "v26"]], ["Distractor2"]),
                ("m4", "memory3", [["v1.2", "v2.2", "v3.2", "v4.2", "v27", "v28"]], ["Distractor3"]),
                ("m5", "memory4", [["v7", "v8", "v9", "v17", "v18", "no-affordance*"]], ["Distractor4"]),
                ("m6", "memory5", [["v11", "v12", "v13", "v14", "v15", "affordance*"]], ["Target"]),
            ],
        ),
    ],
    "probes": _PROBES,
}

# Combined task, relational variant: the two location predicates on each
# side fold into one two-place relation; everything else matches the flat
# variant symbol for symbol.
FIXTURE_COMBINED_RELATIONAL = {
    "name": "combined-relational",
    "analogs": [
        _analog(
            "Perception",
            "driver",
            _PERCEPTION_OBJECTS,
            [
                (
                    "p1",
                    "vision1",
                    [
                        ["v1.1", "v2.1", "v3.1", "v4.1", "v5.1", "v6.1"],
                        ["v1.2", "v2.2", "v3.2", "v4.2", "v5.2", "v6.2"],
                    ],
                    ["Critical", "Other"],
                ),
                ("p2", "vision2", [["v7", "v8", "v9", "v10", "v11", "v12"]], ["Critical"]),
                ("p3", "vision3", [["v13", "v14", "v15", "v16", "v17", "v18"]], ["Other"]),
            ],
        ),
        _analog(
            "Memory",
            "recipient",
            _memory_objects("target", "distractor1", "distractor2", "distractor3", "distractor4"),
            [
                (
                    "m1",
                    "memory1",
                    [
                        ["v1.1", "v2.1", "v3.1", "v19", "v20", "v21"],
                        ["v2.1", "v2.2", "v3.2", "v22", "v23", "v24"],
                    ],
                    ["Target", "Distractor1"],
                ),
                ("m2", "memory2", [["v1.1", "v2.1", "v3.1", "v4.1", "v25", "v26"]], ["Distractor2"]),
                ("m3", "memory3", [["v1.2", "v2.2", "v3.2", "v4.2", "v27", "v28"]], ["Distractor3"]),
                ("m4", "memory4", [["v7", "v8", "v9", "v17", "v18", "no-affordance*"]], ["Distractor4"]),
                ("m5", "memory5", [["v11", "v12", "v13", "v14", "v15", "affordance*"]], ["Target"]),
            ],
        ),
    ],
    "probes": _PROBES,
}

FIXTURE_DOCUMENTS = {
    "basic_affordance": FIXTURE_BASIC_AFFORDANCE,
    "relation_cat": FIXTURE_RELATION_CAT,
    "relation_balints": FIXTURE_RELATION_BALINTS,
    "relation_relational": FIXTURE_RELATION_RELATIONAL,
    "correspondence": FIXTURE_CORRESPONDENCE,
    "combined_flat": FIXTURE_COMBINED_FLAT,
    "combined_relational": FIXTURE_COMBINED_RELATIONAL,
}


def _relational(arch: ArchConfig) -> bool:
    return arch.relations_allowed


def builtin_task(task_id: str, arch: ArchConfig, variant: str | None = None) -> TaskSpec:
    """Resolve (task, architecture) to the right fixture variant.

    Scheduling follows the source runs: the correspondence task fires its
    propositions twice for every architecture, and the mapping-only
    architecture also gets double time on the relation task.
    """
    task_id = task_id.lower()
    if task_id not in TASK_IDS:
        raise TaskSpecError(f"unknown task id {task_id!r}")
    if variant is not None:
        if task_id != "ro":
            raise TaskSpecError("variant only applies to the 'ro' task")
        if _relational(arch):
            raise TaskSpecError(f"variant {variant!r} requested for a relational architecture")
        if variant not in ("cat", "balints"):
            raise TaskSpecError(f"unknown variant {variant!r}")

    mapping_arch = arch.mu > 0.0
    if task_id == "dbo":
        doc, mode = FIXTURE_BASIC_AFFORDANCE, "single-pass"
        expected = "success"
    elif task_id == "ro":
        if _relational(arch):
            doc, mode = FIXTURE_RELATION_RELATIONAL, "single-pass"
            expected = "success"
        else:
            v = variant or "cat"
            if v == "balints":
                doc = FIXTURE_RELATION_BALINTS
            else:
                doc = FIXTURE_RELATION_CAT
            mode = "double-pass" if mapping_arch else "single-pass"
            expected = "failure"
    elif task_id == "mo":
        doc, mode = FIXTURE_CORRESPONDENCE, "double-pass"
        expected = "success" if mapping_arch else "failure"
    else:  # rm
        doc = FIXTURE_COMBINED_RELATIONAL if _relational(arch) else FIXTURE_COMBINED_FLAT
        mode = "single-pass"
        expected = "success" if arch.kind == "rm" else "failure"

    doc = dict(doc)
    doc["scheduleMode"] = mode
    doc["expectedVerdict"] = expected
    return parse_task_spec(doc)


@dataclass(frozen=True)
class MatrixCell:
    task_id: str
    arch_kind: str
    variant: str | None
    fixture: TaskSpec
    expected_verdict: str

    @property
    def cell_id(self) -> str:
        v = f"-{self.variant}" if self.variant else ""
        return f"{self.task_id}/{self.arch_kind}{v}"


def matrix_cells() -> list[MatrixCell]:
    """The 17 (task, architecture) runs with their expected outcomes."""
    layout: list[tuple[str, str, str | None]] = [
        ("dbo", "dbo", None),
        ("dbo", "ro", None),
        ("dbo", "mo", None),
        ("dbo", "rm", None),
        ("ro", "dbo", "cat"),
        ("ro", "dbo", "balints"),
        ("ro", "ro", None),
        ("ro", "mo", None),
        ("ro", "rm", None),
        ("mo", "dbo", None),
        ("mo", "ro", None),
        ("mo", "mo", None),
        ("mo", "rm", None),
        ("rm", "dbo", None),
        ("rm", "ro", None),
        ("rm", "mo", None),
        ("rm", "rm", None),
    ]
    cells = []
    for task_id, arch_kind, variant in layout:
        arch = ArchConfig.from_kind(arch_kind)
        fixture = builtin_task(task_id, arch, variant)
        cells.append(
            MatrixCell(
                task_id=task_id,
                arch_kind=arch_kind,
                variant=variant,
                fixture=fixture,
                expected_verdict=fixture.expected_verdict,
            )
        )
    assert len(cells) == 17
    return cells
