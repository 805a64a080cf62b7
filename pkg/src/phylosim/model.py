"""Symbolic-network data model: task specs, relation flattening, network building.

A task document declares two analogs (a Perception driver and a Memory
recipient), each holding objects and propositions over semantic features.
``build_network`` turns a validated spec into the unit/link graph the
simulation engine runs on: shared semantic units at the bottom, and
per-analog object, predicate-role, role-binding (SP) and proposition units
above them, wired with bidirectional excitatory links.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .mapping import MappingTable

KIND_OBJECT = "object"
KIND_PRED = "predicate-role"
KIND_SP = "sp"
KIND_PROP = "proposition"

ARCH_KINDS = ("dbo", "ro", "mo", "rm")

DRIVER = "driver"
RECIPIENT = "recipient"


class TaskSpecError(ValueError):
    """Raised for malformed or inconsistent task documents."""


class NetworkError(ValueError):
    """Raised when a network cannot be built from a spec."""


@dataclass(frozen=True)
class ObjectSpec:
    name: str
    semantics: tuple[str, ...]


@dataclass(frozen=True)
class PropositionSpec:
    """One proposition: a predicate applied to ``arity`` fillers.

    ``role_semantics[i]`` lists the semantic features of role i and
    ``args[i]`` names its filler (an object, or the label of another
    proposition for recursive structures).
    """

    label: str
    predicate: str
    role_semantics: tuple[tuple[str, ...], ...]
    args: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class AnalogSpec:
    name: str
    role: str  # "driver" | "recipient"
    objects: tuple[ObjectSpec, ...]
    propositions: tuple[PropositionSpec, ...]

    def object_names(self) -> set[str]:
        return {o.name for o in self.objects}

    def prop_labels(self) -> set[str]:
        return {p.label for p in self.propositions}

    def semantic_names(self) -> list[str]:
        """All semantic names, in first-appearance order."""
        seen: dict[str, None] = {}
        for obj in self.objects:
            for s in obj.semantics:
                seen.setdefault(s)
        for prop in self.propositions:
            for role in prop.role_semantics:
                for s in role:
                    seen.setdefault(s)
        return list(seen)


@dataclass(frozen=True)
class Probes:
    affordance: str
    critical: str
    no_affordance: str
    noncritical: str

    def as_dict(self) -> dict[str, str]:
        return {
            "affordance": self.affordance,
            "critical": self.critical,
            "noAffordance": self.no_affordance,
            "noncritical": self.noncritical,
        }


@dataclass(frozen=True)
class TaskSpec:
    name: str
    driver: AnalogSpec
    recipient: AnalogSpec
    probes: Probes
    schedule_mode: str = "single-pass"  # or "double-pass"
    expected_verdict: str | None = None  # "success" | "failure" | None

    def semantic_names(self) -> list[str]:
        seen: dict[str, None] = {}
        for s in self.driver.semantic_names():
            seen.setdefault(s)
        for s in self.recipient.semantic_names():
            seen.setdefault(s)
        return list(seen)


@dataclass(frozen=True)
class ArchConfig:
    """Architecture ablation: mapping learning rate and relation capacity."""

    kind: str
    mu: float
    relations_allowed: bool

    @staticmethod
    def from_kind(kind: str, mu_override: float | None = None) -> "ArchConfig":
        kind = kind.lower()
        table = {
            "dbo": (0.0, False),
            "ro": (0.0, True),
            "mo": (0.9, False),
            "rm": (0.9, True),
        }
        if kind not in table:
            raise TaskSpecError(f"unknown architecture kind: {kind!r}")
        mu, rel = table[kind]
        if mu_override is not None:
            mu = mu_override
        return ArchConfig(kind=kind, mu=mu, relations_allowed=rel)


# ---------------------------------------------------------------------------
# Parsing


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise TaskSpecError(msg)


def _parse_analog(raw: dict) -> AnalogSpec:
    _require(isinstance(raw, dict), "analog must be an object")
    name = raw.get("name")
    role = raw.get("role")
    _require(isinstance(name, str) and name != "", "analog needs a name")
    _require(role in (DRIVER, RECIPIENT), f"analog {name!r}: role must be 'driver' or 'recipient'")
    objects = []
    for o in raw.get("objects", []):
        _require(isinstance(o.get("name"), str), f"analog {name!r}: object needs a name")
        sems = o.get("semantics", [])
        _require(
            isinstance(sems, list) and all(isinstance(s, str) for s in sems),
            f"object {o.get('name')!r}: semantics must be a list of strings",
        )
        objects.append(ObjectSpec(name=o["name"], semantics=tuple(sems)))
    props = []
    for p in raw.get("propositions", []):
        _require(isinstance(p.get("label"), str), f"analog {name!r}: proposition needs a label")
        _require(isinstance(p.get("predicate"), str), f"proposition {p.get('label')!r}: needs a predicate")
        roles = p.get("roleSemantics", [])
        args = p.get("args", [])
        _require(
            isinstance(roles, list) and all(isinstance(r, list) for r in roles),
            f"proposition {p['label']!r}: roleSemantics must be a list of lists",
        )
        _require(isinstance(args, list), f"proposition {p['label']!r}: args must be a list")
        props.append(
            PropositionSpec(
                label=p["label"],
                predicate=p["predicate"],
                role_semantics=tuple(tuple(r) for r in roles),
                args=tuple(args),
            )
        )
    return AnalogSpec(name=name, role=role, objects=tuple(objects), propositions=tuple(props))


def _validate_analog(analog: AnalogSpec) -> None:
    names = [o.name for o in analog.objects]
    _require(len(names) == len(set(names)), f"analog {analog.name!r}: duplicate object names")
    labels = [p.label for p in analog.propositions]
    _require(len(labels) == len(set(labels)), f"analog {analog.name!r}: duplicate proposition labels")
    clash = set(names) & set(labels)
    _require(not clash, f"analog {analog.name!r}: names used as both object and proposition: {sorted(clash)}")

    fillers = set(names) | set(labels)
    pred_signatures: dict[str, tuple[tuple[str, ...], ...]] = {}
    for prop in analog.propositions:
        _require(
            len(prop.role_semantics) == len(prop.args),
            f"proposition {prop.label!r}: arity mismatch "
            f"({len(prop.role_semantics)} role-semantic lists vs {len(prop.args)} args)",
        )
        _require(prop.arity >= 1, f"proposition {prop.label!r}: needs at least one role")
        for a in prop.args:
            _require(a in fillers, f"proposition {prop.label!r}: unresolved filler {a!r}")
        sig = prop.role_semantics
        prev = pred_signatures.setdefault(prop.predicate, sig)
        _require(
            prev == sig,
            f"predicate {prop.predicate!r} reused with different role semantics in analog {analog.name!r}",
        )

    # Reject proposition reference cycles (includes self-reference).
    by_label = {p.label: p for p in analog.propositions}
    state: dict[str, int] = {}  # 0 visiting, 1 done

    def visit(label: str, trail: tuple[str, ...]) -> None:
        if state.get(label) == 1:
            return
        _require(state.get(label) != 0, f"proposition cycle: {' -> '.join(trail + (label,))}")
        state[label] = 0
        for a in by_label[label].args:
            if a in by_label:
                visit(a, trail + (label,))
        state[label] = 1

    for p in analog.propositions:
        visit(p.label, ())


def parse_task_spec(text: str | dict) -> TaskSpec:
    """Parse and validate a task document (JSON text or an equivalent dict)."""
    if isinstance(text, str):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TaskSpecError(f"malformed task document: {exc}") from exc
    else:
        raw = text
    _require(isinstance(raw, dict), "task document must be a JSON object")
    name = raw.get("name")
    _require(isinstance(name, str) and name != "", "task needs a name")

    analogs_raw = raw.get("analogs")
    _require(isinstance(analogs_raw, list) and len(analogs_raw) == 2, "exactly two analogs required")
    analogs = [_parse_analog(a) for a in analogs_raw]
    drivers = [a for a in analogs if a.role == DRIVER]
    recips = [a for a in analogs if a.role == RECIPIENT]
    _require(len(drivers) == 1 and len(recips) == 1, "need exactly one driver and one recipient analog")
    driver, recipient = drivers[0], recips[0]
    for analog in (driver, recipient):
        _validate_analog(analog)

    probes_raw = raw.get("probes")
    _require(isinstance(probes_raw, dict), "task needs a probes object")
    missing = [k for k in ("affordance", "critical", "noAffordance", "noncritical") if not probes_raw.get(k)]
    _require(not missing, f"probes missing: {missing}")
    probes = Probes(
        affordance=probes_raw["affordance"],
        critical=probes_raw["critical"],
        no_affordance=probes_raw["noAffordance"],
        noncritical=probes_raw["noncritical"],
    )

    schedule_mode = raw.get("scheduleMode", "single-pass")
    _require(schedule_mode in ("single-pass", "double-pass"), f"bad scheduleMode {schedule_mode!r}")
    expected = raw.get("expectedVerdict")
    _require(expected in (None, "success", "failure"), f"bad expectedVerdict {expected!r}")

    task = TaskSpec(
        name=name,
        driver=driver,
        recipient=recipient,
        probes=probes,
        schedule_mode=schedule_mode,
        expected_verdict=expected,
    )

    pool = set(task.semantic_names())
    for probe_name in (probes.affordance, probes.critical, probes.no_affordance, probes.noncritical):
        _require(probe_name in pool, f"probe semantic {probe_name!r} not found in task")
    # The affordance feature lives only on the memory side; it marks the
    # inference to be made, so it must be absent from the driver.
    _require(
        probes.affordance not in set(driver.semantic_names()),
        f"affordance probe {probes.affordance!r} must not appear in the driver analog",
    )
    return task


def task_spec_to_document(task: TaskSpec) -> dict:
    """Inverse of ``parse_task_spec``, used for fixture export."""

    def analog_doc(a: AnalogSpec) -> dict:
        return {
            "name": a.name,
            "role": a.role,
            "objects": [{"name": o.name, "semantics": list(o.semantics)} for o in a.objects],
            "propositions": [
                {
                    "label": p.label,
                    "predicate": p.predicate,
                    "roleSemantics": [list(r) for r in p.role_semantics],
                    "args": list(p.args),
                }
                for p in a.propositions
            ],
        }

    doc = {
        "name": task.name,
        "analogs": [analog_doc(task.driver), analog_doc(task.recipient)],
        "probes": task.probes.as_dict(),
        "scheduleMode": task.schedule_mode,
    }
    if task.expected_verdict is not None:
        doc["expectedVerdict"] = task.expected_verdict
    return doc


# ---------------------------------------------------------------------------
# Relation flattening (the multi-place-predicate ablation)


def flatten_relations(analog: AnalogSpec) -> AnalogSpec:
    """Replace every n-place proposition (n >= 2) with n one-place ones.

    Role i keeps its semantic list verbatim on a fresh predicate, and filler
    i becomes the sole argument, so the analog's semantic multiset is
    unchanged. One-place propositions pass through untouched, which makes
    the operation idempotent.
    """
    labels = analog.prop_labels()
    out: list[PropositionSpec] = []
    for prop in analog.propositions:
        if prop.arity == 1:
            out.append(prop)
            continue
        for i, (role, arg) in enumerate(zip(prop.role_semantics, prop.args), start=1):
            if arg in labels:
                raise TaskSpecError(
                    f"cannot flatten proposition-valued role: {prop.label!r} role {i} fills with {arg!r}"
                )
            out.append(
                PropositionSpec(
                    label=f"{prop.label}.{i}",
                    predicate=f"{prop.predicate}.{i}",
                    role_semantics=(role,),
                    args=(arg,),
                )
            )
    flat = replace(analog, propositions=tuple(out))
    _validate_analog(flat)
    return flat


def flatten_task(task: TaskSpec) -> TaskSpec:
    return replace(
        task,
        driver=flatten_relations(task.driver),
        recipient=flatten_relations(task.recipient),
    )


# ---------------------------------------------------------------------------
# Network construction


@dataclass
class Inhibitor:
    """Yoked inhibitor state for one SP: charge builds while the SP fires,
    then a refractory phase suppresses it."""

    charge: int = 0
    refractory_remaining: int = 0


@dataclass
class SemanticUnit:
    name: str
    activation: float = 0.0


@dataclass
class TokenUnit:
    name: str
    kind: str
    analog: str
    activation: float = 0.0
    # semantic link targets, for object/predicate-role units only
    semantics: tuple[str, ...] = ()
    # SP-only wiring
    role: str | None = None
    filler: str | None = None
    parent: str | None = None
    inhibitor: Inhibitor | None = None


@dataclass
class AnalogUnits:
    name: str
    role: str
    tokens: dict[str, TokenUnit] = field(default_factory=dict)
    order: list[str] = field(default_factory=list)  # deterministic token order

    def add(self, unit: TokenUnit) -> TokenUnit:
        if unit.name in self.tokens:
            raise NetworkError(f"duplicate token {unit.name!r} in analog {self.name!r}")
        self.tokens[unit.name] = unit
        self.order.append(unit.name)
        return unit

    def of_kind(self, kind: str) -> list[TokenUnit]:
        return [self.tokens[n] for n in self.order if self.tokens[n].kind == kind]


@dataclass
class Network:
    task: TaskSpec
    arch: ArchConfig
    semantics: dict[str, SemanticUnit]
    sem_order: list[str]
    driver: AnalogUnits
    recipient: AnalogUnits
    mapping: "MappingTable | None" = None  # set by the builder

    def analog(self, role: str) -> AnalogUnits:
        return self.driver if role == DRIVER else self.recipient


def _build_analog(spec: AnalogSpec) -> AnalogUnits:
    units = AnalogUnits(name=spec.name, role=spec.role)
    for obj in spec.objects:
        units.add(TokenUnit(name=obj.name, kind=KIND_OBJECT, analog=spec.name, semantics=obj.semantics))
    # Predicate-role units are shared across propositions that reuse the
    # same predicate; multi-place predicates get one unit per role.
    for prop in spec.propositions:
        for i, role_sems in enumerate(prop.role_semantics):
            pname = prop.predicate if prop.arity == 1 else f"{prop.predicate}.r{i + 1}"
            if pname not in units.tokens:
                units.add(TokenUnit(name=pname, kind=KIND_PRED, analog=spec.name, semantics=tuple(role_sems)))
    for prop in spec.propositions:
        units.add(TokenUnit(name=prop.label, kind=KIND_PROP, analog=spec.name))
    for prop in spec.propositions:
        for i, arg in enumerate(prop.args):
            pname = prop.predicate if prop.arity == 1 else f"{prop.predicate}.r{i + 1}"
            if arg not in units.tokens:
                raise NetworkError(f"unresolved filler {arg!r} in proposition {prop.label!r}")
            units.add(
                TokenUnit(
                    name=f"{prop.label}.sp{i + 1}",
                    kind=KIND_SP,
                    analog=spec.name,
                    role=pname,
                    filler=arg,
                    parent=prop.label,
                    inhibitor=Inhibitor(),
                )
            )
    return units


def build_network(task: TaskSpec, arch: ArchConfig) -> Network:
    """Instantiate the unit graph for a task under an architecture.

    Architectures without multi-place relations get both analogs flattened
    first. The mapping table is allocated over same-kind cross-analog pairs
    with all weights zero.
    """
    from .mapping import MappingTable  # local import to avoid a cycle

    if not arch.relations_allowed:
        task = flatten_task(task)

    sem_order: list[str] = []
    semantics: dict[str, SemanticUnit] = {}
    for s in task.semantic_names():
        semantics[s] = SemanticUnit(name=s)
        sem_order.append(s)

    driver = _build_analog(task.driver)
    recipient = _build_analog(task.recipient)
    net = Network(
        task=task,
        arch=arch,
        semantics=semantics,
        sem_order=sem_order,
        driver=driver,
        recipient=recipient,
    )
    net.mapping = MappingTable.for_network(net, mu=arch.mu)
    problems = validate(net)
    if problems:
        raise NetworkError("; ".join(problems))
    return net


def validate(net: Network) -> list[str]:
    """Structural diagnostics; an empty list means every invariant holds."""
    out: list[str] = []
    seen_sem = set()
    for s in net.sem_order:
        if s in seen_sem:
            out.append(f"duplicate semantic unit {s!r}")
        seen_sem.add(s)
        unit = net.semantics.get(s)
        if unit is None:
            out.append(f"semantic {s!r} listed but missing")
        elif not (0.0 <= unit.activation <= 1.0):
            out.append(f"semantic {s!r} activation out of [0,1]")

    for analog in (net.driver, net.recipient):
        for name in analog.order:
            tok = analog.tokens[name]
            if tok.analog != analog.name:
                out.append(f"token {name!r} claims analog {tok.analog!r}, lives in {analog.name!r}")
            if not (0.0 <= tok.activation <= 1.0):
                out.append(f"token {name!r} activation out of [0,1]")
            if tok.kind in (KIND_OBJECT, KIND_PRED):
                for s in tok.semantics:
                    if s not in net.semantics:
                        out.append(f"token {name!r} links to unknown semantic {s!r}")
            elif tok.semantics:
                out.append(f"{tok.kind} unit {name!r} must not link to semantic units")
            if tok.kind == KIND_SP:
                role = analog.tokens.get(tok.role or "")
                filler = analog.tokens.get(tok.filler or "")
                parent = analog.tokens.get(tok.parent or "")
                if role is None or role.kind != KIND_PRED:
                    out.append(f"SP {name!r}: role {tok.role!r} is not a predicate-role unit")
                if filler is None or filler.kind not in (KIND_OBJECT, KIND_PROP):
                    out.append(f"SP {name!r}: filler {tok.filler!r} must be an object or proposition unit")
                if parent is None or parent.kind != KIND_PROP:
                    out.append(f"SP {name!r}: parent {tok.parent!r} is not a proposition unit")

    probes = net.task.probes
    for probe in (probes.affordance, probes.critical, probes.no_affordance, probes.noncritical):
        if probe not in net.semantics:
            out.append(f"probe semantic {probe!r} missing from network")
    for name in net.driver.order:
        tok = net.driver.tokens[name]
        if probes.affordance in tok.semantics:
            out.append(f"affordance semantic {probes.affordance!r} linked into driver unit {name!r}")
    return out
