"""Cross-analog correspondence learning.

Hypotheses accumulate Hebbian-style (co-activation products) between
same-kind driver and recipient token units. At each phase-set boundary the
hypotheses are max-normalized and folded into persistent weights with a
subtractive rival penalty, which enforces a one-to-one mapping: evidence
for a pair is discounted by the best competing pair in its row or column.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import KIND_OBJECT, KIND_PRED, KIND_PROP, KIND_SP

MAP_KINDS = (KIND_PROP, KIND_SP, KIND_PRED, KIND_OBJECT)


@dataclass
class KindTable:
    driver_units: list[str]
    recipient_units: list[str]
    hypotheses: np.ndarray  # (n_driver, n_recipient), >= 0
    weights: np.ndarray  # same shape, in [-1, 1]

    def copy(self) -> "KindTable":
        return KindTable(
            driver_units=list(self.driver_units),
            recipient_units=list(self.recipient_units),
            hypotheses=self.hypotheses.copy(),
            weights=self.weights.copy(),
        )


@dataclass
class MappingTable:
    mu: float
    kinds: dict[str, KindTable] = field(default_factory=dict)

    @staticmethod
    def for_network(net, mu: float) -> "MappingTable":
        table = MappingTable(mu=mu)
        for kind in MAP_KINDS:
            d = [t.name for t in net.driver.of_kind(kind)]
            r = [t.name for t in net.recipient.of_kind(kind)]
            table.kinds[kind] = KindTable(
                driver_units=d,
                recipient_units=r,
                hypotheses=np.zeros((len(d), len(r))),
                weights=np.zeros((len(d), len(r))),
            )
        return table

    def copy(self) -> "MappingTable":
        return MappingTable(mu=self.mu, kinds={k: v.copy() for k, v in self.kinds.items()})

    def weight(self, kind: str, driver_unit: str, recipient_unit: str) -> float:
        kt = self.kinds[kind]
        return float(kt.weights[kt.driver_units.index(driver_unit), kt.recipient_units.index(recipient_unit)])

    def max_abs_weight(self) -> float:
        vals = [np.abs(kt.weights).max() for kt in self.kinds.values() if kt.weights.size]
        return float(max(vals)) if vals else 0.0

    def rows(self):
        """Yield (kind, driver_unit, recipient_unit, weight) for export."""
        for kind in MAP_KINDS:
            kt = self.kinds[kind]
            for i, d in enumerate(kt.driver_units):
                for j, r in enumerate(kt.recipient_units):
                    yield kind, d, r, float(kt.weights[i, j])


def accumulate_hypotheses(
    table: MappingTable,
    driver_acts: dict[str, float],
    recipient_acts: dict[str, float],
) -> MappingTable:
    """Add one iteration of co-activation evidence: h(d,r) += a_d * a_r."""
    for kt in table.kinds.values():
        for i, d in enumerate(kt.driver_units):
            ad = driver_acts.get(d, 0.0)
            if ad == 0.0:
                continue
            for j, r in enumerate(kt.recipient_units):
                kt.hypotheses[i, j] += ad * recipient_acts.get(r, 0.0)
    return table


def _rival_matrix(hn: np.ndarray) -> np.ndarray:
    """rival[i,j] = max(best other entry in row i, best other entry in col j)."""
    n, m = hn.shape
    rival = np.zeros_like(hn)
    for i in range(n):
        for j in range(m):
            row = np.delete(hn[i, :], j)
            col = np.delete(hn[:, j], i)
            best = 0.0
            if row.size:
                best = max(best, float(row.max()))
            if col.size:
                best = max(best, float(col.max()))
            rival[i, j] = best
    return rival


def commit_mapping(table: MappingTable) -> MappingTable:
    """Fold accumulated hypotheses into weights at a phase-set boundary.

    Hypotheses are normalized per kind by the kind's maximum; each weight
    moves by mu * (own evidence - strongest rival evidence) and is clamped
    to [-1, 1]. Hypotheses reset afterwards so each phase set contributes
    an independent evidence batch.
    """
    for kt in table.kinds.values():
        if kt.hypotheses.size == 0:
            continue
        if table.mu != 0.0:
            peak = float(kt.hypotheses.max())
            hn = kt.hypotheses / peak if peak > 0.0 else kt.hypotheses
            np.clip(kt.weights + table.mu * (hn - _rival_matrix(hn)), -1.0, 1.0, out=kt.weights)
        kt.hypotheses[:] = 0.0
    return table


def mapping_input(table: MappingTable, kind: str, recipient_unit: str, driver_acts: dict[str, float]) -> float:
    """Signed mapping drive into one recipient unit: sum_d w(d,r) * a_d.

    Positive weights excite the mapped unit; negative weights (mapping
    losers) suppress it.
    """
    kt = table.kinds[kind]
    j = kt.recipient_units.index(recipient_unit)
    total = 0.0
    for i, d in enumerate(kt.driver_units):
        total += float(kt.weights[i, j]) * driver_acts.get(d, 0.0)
    return total
