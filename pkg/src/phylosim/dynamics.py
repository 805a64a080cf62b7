"""Discrete-time oscillatory dynamics.

Each scheduled driver proposition gets a firing window. Within a window the
driver proposition unit is clamped on, its SPs compete through lateral
inhibition and yoked inhibitors (producing the out-of-phase role-binding
oscillation), active SPs light their predicate-role and object units, and
the resulting semantic pattern drives the recipient analog, whose units
follow the driver rhythm. Mapping hypotheses accumulate every iteration
and are committed at window boundaries.

The hot per-iteration loop lives in a backend kernel (compiled extension
with a pure-Python twin); this module owns everything around it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .mapping import MAP_KINDS, MappingTable, commit_mapping
from .model import (
    KIND_OBJECT,
    KIND_PRED,
    KIND_PROP,
    KIND_SP,
    Inhibitor,
    Network,
)

KIND_CODE = {KIND_OBJECT: 0, KIND_PRED: 1, KIND_SP: 2, KIND_PROP: 3}
CODE_KIND = {v: k for k, v in KIND_CODE.items()}


@dataclass(frozen=True)
class SimParams:
    """Time constants and gains for the oscillatory update rules.

    The first block is the primary contract; the second block holds the
    reconstruction constants for pieces the source architecture leaves
    unspecified. Everything is overridable.
    """

    iters_per_prop: int = 90
    growth: float = 0.5  # gamma
    decay: float = 0.1  # delta
    fire_threshold: float = 0.5
    inhibitor_window: int = 10  # iterations above threshold before the inhibitor trips
    refractory: int = 10
    noise: float = 0.05  # eta, uniform on [0, eta] into active-phase driver SPs
    lateral: float = 1.0  # beta
    top_down: float = 0.5
    map_gain: float = 1.0  # kappa

    suppression: float = 10.0  # inhibitor strike on a firing SP
    prop_decay: float = 0.03  # propositions integrate on a slower time scale
    recipient_lateral: float = 0.8  # scales beta for recipient cross-structure competition
    # units sharing a proposition (partner roles, sibling SPs, co-fillers)
    # alternate by phase rather than competing for existence; role and
    # filler partners press softly (the driver rhythm seeds the phases),
    # while sibling role-binding units press harder, which deepens the
    # anti-phase alternation of multi-place structures on the recipient
    sibling_lateral: float = 0.55
    sp_sibling_lateral: float = 0.7
    sp_feedback: float = 0.6  # recipient SP -> predicate/object support
    role_filler: float = 0.3  # recipient role/filler -> SP support
    prop_input: float = 1.5  # recipient SP -> proposition support
    gate_gain: float = 2.5  # how strongly a recipient proposition gates its SPs
    # the direct predicate-level mapping channel is disabled by default:
    # predicate correspondences are still learned and reported, but they
    # reach the dynamics through the proposition/SP/object structure; a
    # direct channel lets the predicate pairing learned while semantics
    # still dominate veto the structural correction on the second pass
    pred_map_scale: float = 0.0
    # scales the cross-structure pressure between recipient objects
    obj_lateral_scale: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.fire_threshold < 1.0):
            raise ValueError("fire_threshold must be in (0,1)")
        if self.iters_per_prop < self.inhibitor_window + self.refractory:
            raise ValueError("iters_per_prop must cover one inhibitor cycle")
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, (int, float)) and v < 0:
                raise ValueError(f"{f.name} must be >= 0")

    def with_overrides(self, **kw) -> "SimParams":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def leaky_integrate(a: float, net: float, growth: float, decay: float) -> float:
    """Shunting leaky-integrator update, clamped to [0,1].

    Excitation scales with headroom (1-a); inhibition scales with the
    current activation, so a silent unit cannot be driven negative.
    """
    if net >= 0.0:
        a = a + growth * net * (1.0 - a) - decay * a
    else:
        a = a + growth * net * a - decay * a
    if a < 0.0:
        return 0.0
    if a > 1.0:
        return 1.0
    return a


def inhibitor_step(inh: Inhibitor, sp_active: bool, params: SimParams) -> tuple[Inhibitor, bool]:
    """Advance one SP inhibitor by one iteration; returns (state, suppress).

    While refractory, the SP is suppressed and charge stays cleared.
    Otherwise continuous supra-threshold firing builds charge until the
    inhibitor trips and starts a refractory phase.
    """
    charge, refr = inh.charge, inh.refractory_remaining
    if refr > 0:
        return Inhibitor(charge=0, refractory_remaining=refr - 1), True
    if sp_active:
        charge += 1
        if charge >= params.inhibitor_window:
            return Inhibitor(charge=0, refractory_remaining=params.refractory), True
        return Inhibitor(charge=charge, refractory_remaining=0), False
    return Inhibitor(charge=0, refractory_remaining=0), False


# ---------------------------------------------------------------------------
# Schedule


@dataclass(frozen=True)
class ScheduleEntry:
    label: str  # driver proposition label
    duration: int
    pass_index: int  # 0-based


@dataclass(frozen=True)
class Schedule:
    entries: tuple[ScheduleEntry, ...]
    pass_count: int

    @property
    def total_iters(self) -> int:
        return sum(e.duration for e in self.entries)


def make_schedule(task, arch=None, params: SimParams | None = None) -> Schedule:
    """One window per driver proposition in spec order; double-pass repeats
    the whole sequence in order rather than interleaving."""
    params = params or SimParams()
    props = task.driver.propositions
    if not props:
        raise ValueError("schedule needs at least one driver proposition")
    passes = 2 if task.schedule_mode == "double-pass" else 1
    entries = []
    for pass_index in range(passes):
        for p in props:
            entries.append(ScheduleEntry(label=p.label, duration=params.iters_per_prop, pass_index=pass_index))
    return Schedule(entries=tuple(entries), pass_count=passes)


# ---------------------------------------------------------------------------
# Wiring: flatten the unit graph into arrays for the kernels


@dataclass
class SideWiring:
    names: list[str]
    kinds: np.ndarray  # int8 codes
    sem_ptr: np.ndarray  # int32, CSR over tokens -> semantic ids
    sem_idx: np.ndarray
    fan_in: np.ndarray  # float64, semantic fan-in per token (min 1)
    sp_ids: np.ndarray  # int32 token ids that are SPs, in order
    sp_role: np.ndarray
    sp_filler: np.ndarray
    sp_parent: np.ndarray
    att_ptr: np.ndarray  # token -> SP token ids attached (role-of or filler-of)
    att_idx: np.ndarray
    child_ptr: np.ndarray  # token -> its SP token ids (propositions only)
    child_idx: np.ndarray
    prop_ids: np.ndarray
    obj_pred_ids: np.ndarray
    map_slot: np.ndarray  # int32 position within the token's kind list
    kin_ptr: np.ndarray  # token -> same-kind rival token ids
    kin_idx: np.ndarray
    partner: np.ndarray  # int8 (n, n): 1 if the pair shares a proposition
    n: int = 0

    def index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}


@dataclass
class Wiring:
    sem_names: list[str]
    drv: SideWiring
    rec: SideWiring
    sem_drv_ptr: np.ndarray  # semantic -> driver object/pred token ids
    sem_drv_idx: np.ndarray
    sem_rec_ptr: np.ndarray
    sem_rec_idx: np.ndarray
    probe_idx: dict[str, int]  # role -> semantic index
    map_d_tokens: list[np.ndarray]  # per kind code: driver token ids
    map_r_tokens: list[np.ndarray]


def _csr(rows: list[list[int]]) -> tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(len(rows) + 1, dtype=np.int32)
    flat: list[int] = []
    for i, row in enumerate(rows):
        flat.extend(row)
        ptr[i + 1] = len(flat)
    return ptr, np.asarray(flat, dtype=np.int32)


def _compile_side(analog, sem_index: dict[str, int], mapping: MappingTable) -> SideWiring:
    names = list(analog.order)
    idx = {n: i for i, n in enumerate(names)}
    n = len(names)
    kinds = np.zeros(n, dtype=np.int8)
    sem_rows: list[list[int]] = [[] for _ in range(n)]
    att_rows: list[list[int]] = [[] for _ in range(n)]
    child_rows: list[list[int]] = [[] for _ in range(n)]
    sp_ids, sp_role, sp_filler, sp_parent = [], [], [], []
    for i, name in enumerate(names):
        tok = analog.tokens[name]
        kinds[i] = KIND_CODE[tok.kind]
        for s in tok.semantics:
            sem_rows[i].append(sem_index[s])
        if tok.kind == KIND_SP:
            sp_ids.append(i)
            sp_role.append(idx[tok.role])
            sp_filler.append(idx[tok.filler])
            sp_parent.append(idx[tok.parent])
    for i, r, f, p in zip(sp_ids, sp_role, sp_filler, sp_parent):
        att_rows[r].append(i)
        att_rows[f].append(i)
        child_rows[p].append(i)
    sem_ptr, sem_idx = _csr(sem_rows)
    att_ptr, att_idx = _csr(att_rows)
    child_ptr, child_idx = _csr(child_rows)
    fan_in = np.maximum(np.diff(sem_ptr), 1).astype(np.float64)

    # same-kind rivals, and which pairs share a proposition (partner roles,
    # sibling SPs, co-fillers alternate in phase instead of competing)
    kin_rows = [[j for j in range(n) if j != i and kinds[j] == kinds[i]] for i in range(n)]
    kin_ptr, kin_idx = _csr(kin_rows)
    partner = np.zeros((n, n), dtype=np.int8)
    by_prop: dict[int, dict[str, list[int]]] = {}
    for i, r, f, p in zip(sp_ids, sp_role, sp_filler, sp_parent):
        slot = by_prop.setdefault(p, {"sp": [], "role": [], "filler": []})
        slot["sp"].append(i)
        slot["role"].append(r)
        slot["filler"].append(f)
    for groups in by_prop.values():
        for members in groups.values():
            for a in members:
                for b in members:
                    if a != b and kinds[a] == kinds[b]:
                        partner[a, b] = 1

    map_slot = np.full(n, -1, dtype=np.int32)
    is_driver = analog.role == "driver"
    for kind in MAP_KINDS:
        units = mapping.kinds[kind].driver_units if is_driver else mapping.kinds[kind].recipient_units
        for slot, uname in enumerate(units):
            map_slot[idx[uname]] = slot

    return SideWiring(
        names=names,
        kinds=kinds,
        sem_ptr=sem_ptr,
        sem_idx=sem_idx,
        fan_in=fan_in,
        sp_ids=np.asarray(sp_ids, dtype=np.int32),
        sp_role=np.asarray(sp_role, dtype=np.int32),
        sp_filler=np.asarray(sp_filler, dtype=np.int32),
        sp_parent=np.asarray(sp_parent, dtype=np.int32),
        att_ptr=att_ptr,
        att_idx=att_idx,
        child_ptr=child_ptr,
        child_idx=child_idx,
        prop_ids=np.asarray([i for i in range(n) if kinds[i] == KIND_CODE[KIND_PROP]], dtype=np.int32),
        obj_pred_ids=np.asarray([i for i in range(n) if kinds[i] <= 1], dtype=np.int32),
        map_slot=map_slot,
        kin_ptr=kin_ptr,
        kin_idx=kin_idx,
        partner=partner,
        n=n,
    )


def compile_network(net: Network) -> Wiring:
    sem_index = {s: i for i, s in enumerate(net.sem_order)}
    drv = _compile_side(net.driver, sem_index, net.mapping)
    rec = _compile_side(net.recipient, sem_index, net.mapping)

    def reverse(side: SideWiring) -> tuple[np.ndarray, np.ndarray]:
        rows: list[list[int]] = [[] for _ in net.sem_order]
        for tok in range(side.n):
            if side.kinds[tok] <= 1:  # objects and predicate-role units
                for k in range(side.sem_ptr[tok], side.sem_ptr[tok + 1]):
                    rows[side.sem_idx[k]].append(tok)
        return _csr(rows)

    sem_drv_ptr, sem_drv_idx = reverse(drv)
    sem_rec_ptr, sem_rec_idx = reverse(rec)

    probes = net.task.probes
    probe_idx = {
        "affordance": sem_index[probes.affordance],
        "critical": sem_index[probes.critical],
        "noAffordance": sem_index[probes.no_affordance],
        "noncritical": sem_index[probes.noncritical],
    }
    didx, ridx = drv.index(), rec.index()
    map_d = [np.asarray([didx[u] for u in net.mapping.kinds[CODE_KIND[k]].driver_units], dtype=np.int32) for k in range(4)]
    map_r = [np.asarray([ridx[u] for u in net.mapping.kinds[CODE_KIND[k]].recipient_units], dtype=np.int32) for k in range(4)]
    return Wiring(
        sem_names=list(net.sem_order),
        drv=drv,
        rec=rec,
        sem_drv_ptr=sem_drv_ptr,
        sem_drv_idx=sem_drv_idx,
        sem_rec_ptr=sem_rec_ptr,
        sem_rec_idx=sem_rec_idx,
        probe_idx=probe_idx,
        map_d_tokens=map_d,
        map_r_tokens=map_r,
    )


# ---------------------------------------------------------------------------
# Traces


@dataclass(frozen=True)
class Window:
    label: str
    start: int
    end: int  # exclusive
    pass_index: int
    contains_critical: bool
    spec_index: int  # position of the proposition in the task spec's driver list


@dataclass
class TraceSet:
    task_name: str
    arch_kind: str
    seed: int
    params: SimParams
    sem_names: list[str]
    sem: np.ndarray  # (T, n_sem)
    drv_names: list[str]
    drv_kinds: np.ndarray
    drv: np.ndarray  # (T, n_drv)
    rec_names: list[str]
    rec_kinds: np.ndarray
    rec: np.ndarray
    probe_idx: dict[str, int]
    windows: list[Window]
    mapping: MappingTable  # final committed weights
    weight_history: list[MappingTable] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return self.sem.shape[0]

    def probe(self, role: str) -> np.ndarray:
        return self.sem[:, self.probe_idx[role]]

    def semantic(self, name: str) -> np.ndarray:
        return self.sem[:, self.sem_names.index(name)]

    def unit(self, analog: str, name: str) -> np.ndarray:
        if analog == "driver":
            return self.drv[:, self.drv_names.index(name)]
        return self.rec[:, self.rec_names.index(name)]

    def pass_windows(self, pass_index: int) -> list[Window]:
        return [w for w in self.windows if w.pass_index == pass_index]

    def last_pass_index(self) -> int:
        return max(w.pass_index for w in self.windows)

    # -- export ------------------------------------------------------------

    def export_traces_csv(self, path, verbosity: str = "probes") -> None:
        """Rows: iteration,unit,analog,kind,activation.

        ``probes`` limits output to the four probed semantic units;
        ``all`` dumps every unit every iteration.
        """
        probe_names = {self.sem_names[i] for i in self.probe_idx.values()}
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "unit", "analog", "kind", "activation"])
            for t in range(self.iterations):
                for i, name in enumerate(self.sem_names):
                    if verbosity != "all" and name not in probe_names:
                        continue
                    w.writerow([t, name, "shared", "semantic", repr(float(self.sem[t, i]))])
                if verbosity == "all":
                    for names, kinds, acts, analog in (
                        (self.drv_names, self.drv_kinds, self.drv, "driver"),
                        (self.rec_names, self.rec_kinds, self.rec, "recipient"),
                    ):
                        for i, name in enumerate(names):
                            w.writerow([t, name, analog, CODE_KIND[int(kinds[i])], repr(float(acts[t, i]))])

    def export_windows_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["propositionLabel", "startIter", "endIter", "passIndex"])
            for win in self.windows:
                w.writerow([win.label, win.start, win.end, win.pass_index])

    def export_weights_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kind", "driverUnit", "recipientUnit", "weight"])
            for kind, d, r, wt in self.mapping.rows():
                w.writerow([kind, d, r, repr(wt)])


# ---------------------------------------------------------------------------
# Run orchestration


def _critical_fillers(task) -> set[str]:
    """Labels of driver propositions whose fillers include the critical object."""
    critical = {
        obj.name for obj in task.driver.objects if task.probes.critical in obj.semantics
    }
    return {p.label for p in task.driver.propositions if set(p.args) & critical}


def run(
    net: Network,
    sched: Schedule | None = None,
    params: SimParams | None = None,
    seed: int = 7,
    backend: str | None = None,
    record_weight_history: bool = False,
) -> TraceSet:
    """Run the full schedule and record every unit's activation trace.

    Pure in its arguments: the network is not mutated (the mapping table is
    copied), and identical inputs produce bit-identical traces.
    """
    from .backend import make_engine

    params = params or SimParams()
    if sched is None:
        sched = make_schedule(net.task, net.arch, params)
    wiring = compile_network(net)
    mapping = net.mapping.copy()
    total = sched.total_iters

    rng = np.random.Generator(np.random.PCG64(seed))
    n_sp = len(wiring.drv.sp_ids)
    noise = rng.random((total, max(n_sp, 1))) * params.noise

    sem_trace = np.zeros((total, len(wiring.sem_names)))
    drv_trace = np.zeros((total, wiring.drv.n))
    rec_trace = np.zeros((total, wiring.rec.n))

    h_mats = [mapping.kinds[CODE_KIND[k]].hypotheses for k in range(4)]
    w_mats = [mapping.kinds[CODE_KIND[k]].weights for k in range(4)]
    engine = make_engine(wiring, params, noise, sem_trace, drv_trace, rec_trace, h_mats, w_mats, backend=backend)

    drv_index = wiring.drv.index()
    critical_labels = _critical_fillers(net.task)
    spec_order = {p.label: i for i, p in enumerate(net.task.driver.propositions)}
    windows: list[Window] = []
    history: list[MappingTable] = []
    t = 0
    for entry in sched.entries:
        engine.reset_phase()
        engine.run_window(drv_index[entry.label], t, t + entry.duration)
        commit_mapping(mapping)
        if record_weight_history:
            history.append(mapping.copy())
        windows.append(
            Window(
                label=entry.label,
                start=t,
                end=t + entry.duration,
                pass_index=entry.pass_index,
                contains_critical=entry.label in critical_labels,
                spec_index=spec_order[entry.label],
            )
        )
        t += entry.duration

    return TraceSet(
        task_name=net.task.name,
        arch_kind=net.arch.kind,
        seed=seed,
        params=params,
        sem_names=list(wiring.sem_names),
        sem=sem_trace,
        drv_names=list(wiring.drv.names),
        drv_kinds=wiring.drv.kinds.copy(),
        drv=drv_trace,
        rec_names=list(wiring.rec.names),
        rec_kinds=wiring.rec.kinds.copy(),
        rec=rec_trace,
        probe_idx=dict(wiring.probe_idx),
        windows=windows,
        mapping=mapping,
        weight_history=history,
    )
