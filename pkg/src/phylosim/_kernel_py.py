"""Pure-Python engine: the per-iteration update loop.

This is the fallback twin of the compiled kernel. Both backends perform the
same floating-point operations in the same order, so traces are
bit-identical across them; keep any change mirrored in ``_kernel.pyx``.

Update order within one iteration:
  1. driver propositions (scheduled one clamped, others integrate filler input)
  2. driver SP inhibitors, then SPs (top-down + noise - sibling inhibition)
  3. driver predicate-role/object units from their SPs
  4. semantic pattern contributed by the driver
  5. recipient predicate-role/object units (normalized semantic input +
     SP feedback + mapping input - same-kind competition)
  6. recipient SPs (role/filler drive gated by their proposition) and
     recipient propositions
  7. mapping hypothesis accumulation
  8. combined semantic activations recorded to the trace
"""

from __future__ import annotations

BACKEND_NAME = "python"


def _leaky(a, net, growth, decay):
    if net >= 0.0:
        a = a + growth * net * (1.0 - a) - decay * a
    else:
        a = a + growth * net * a - decay * a
    if a < 0.0:
        return 0.0
    if a > 1.0:
        return 1.0
    return a


class Engine:
    def __init__(self, wiring, params, noise, sem_trace, drv_trace, rec_trace, h_mats, w_mats):
        self.w = wiring
        self.p = params
        self.noise = noise
        self.sem_trace = sem_trace
        self.drv_trace = drv_trace
        self.rec_trace = rec_trace
        self.h = h_mats  # per kind code 0..3
        self.wm = w_mats
        self.act_d = [0.0] * wiring.drv.n
        self.act_r = [0.0] * wiring.rec.n
        nsp = len(wiring.drv.sp_ids)
        self.charge = [0] * nsp
        self.refr = [0] * nsp
        self.n_sem = len(wiring.sem_names)
        self._sem_drv = [0.0] * self.n_sem
        # plain-int copies of the wiring arrays: python loops over numpy
        # scalars are an order of magnitude slower
        self._d = _side_lists(wiring.drv)
        self._r = _side_lists(wiring.rec)
        self._sem_drv_ptr = wiring.sem_drv_ptr.tolist()
        self._sem_drv_idx = wiring.sem_drv_idx.tolist()
        self._sem_rec_ptr = wiring.sem_rec_ptr.tolist()
        self._sem_rec_idx = wiring.sem_rec_idx.tolist()
        self._map_d = [m.tolist() for m in wiring.map_d_tokens]
        self._map_r = [m.tolist() for m in wiring.map_r_tokens]

    def reset_phase(self):
        """Zero all token activations and inhibitors at a phase-set boundary."""
        for i in range(len(self.act_d)):
            self.act_d[i] = 0.0
        for i in range(len(self.act_r)):
            self.act_r[i] = 0.0
        for k in range(len(self.charge)):
            self.charge[k] = 0
            self.refr[k] = 0

    def run_window(self, sched_prop, t0, t1):
        p = self.p
        d = self._d
        r = self._r
        ad = self.act_d
        ar = self.act_r
        sem_drv = self._sem_drv
        noise = self.noise

        growth, decay = p.growth, p.decay
        theta = p.fire_threshold
        win, refract = p.inhibitor_window, p.refractory
        beta, td, kappa = p.lateral, p.top_down, p.map_gain
        supp = p.suppression
        pdec = p.prop_decay
        rlat = p.lateral * p.recipient_lateral
        slat = p.lateral * p.sibling_lateral
        slat_sp = p.lateral * p.sp_sibling_lateral
        fbk = p.sp_feedback
        rf = p.role_filler
        pin = p.prop_input
        gate = p.gate_gain
        kappa_pred = kappa * p.pred_map_scale
        obj_scale = p.obj_lateral_scale
        partner = r["partner"]

        def rec_lateral(tok, prev, sib):
            # strongest same-kind pressure; partners press with the
            # within-structure coefficient
            best = 0.0
            row = partner[tok]
            for q in range(r["kin_ptr"][tok], r["kin_ptr"][tok + 1]):
                j = r["kin_idx"][q]
                v = (sib if row[j] else rlat) * prev[j]
                if v > best:
                    best = v
            return best

        n_sp_d = len(d["sp_ids"])

        for t in range(t0, t1):
            # 1. driver propositions
            for pi in d["prop_ids"]:
                if pi == sched_prop:
                    ad[pi] = 1.0
                else:
                    net = 0.0
                    for k in range(d["att_ptr"][pi], d["att_ptr"][pi + 1]):
                        net += ad[d["att_idx"][k]]
                    ad[pi] = _leaky(ad[pi], net, growth, pdec)

            # 2. driver SPs (simultaneous update: laterals read previous acts)
            new_sp = [0.0] * n_sp_d
            for k in range(n_sp_d):
                sp = d["sp_ids"][k]
                prev = ad[sp]
                if self.refr[k] > 0:
                    self.refr[k] -= 1
                    self.charge[k] = 0
                    suppressed = True
                elif prev > theta:
                    self.charge[k] += 1
                    if self.charge[k] >= win:
                        self.refr[k] = refract
                        self.charge[k] = 0
                        suppressed = True
                    else:
                        suppressed = False
                else:
                    self.charge[k] = 0
                    suppressed = False
                par = d["sp_parent"][k]
                if par == sched_prop:
                    net = td * ad[par] + noise[t, k]
                else:
                    # only the attended proposition drives (and perturbs) its
                    # SPs; sub-proposition fillers stay quiet
                    net = 0.0
                sib = 0.0
                for j in range(d["child_ptr"][par], d["child_ptr"][par + 1]):
                    spj = d["child_idx"][j]
                    if spj != sp:
                        sib += ad[spj]
                net -= beta * sib
                if suppressed:
                    net -= supp
                new_sp[k] = _leaky(prev, net, growth, decay)
            for k in range(n_sp_d):
                ad[d["sp_ids"][k]] = new_sp[k]

            # 3. driver predicate-role / object units
            for tok in d["obj_pred_ids"]:
                net = 0.0
                for k in range(d["att_ptr"][tok], d["att_ptr"][tok + 1]):
                    net += ad[d["att_idx"][k]]
                ad[tok] = _leaky(ad[tok], net, growth, decay)

            # 4. driver-side semantic pattern
            for s in range(self.n_sem):
                tot = 0.0
                for k in range(self._sem_drv_ptr[s], self._sem_drv_ptr[s + 1]):
                    tot += ad[self._sem_drv_idx[k]]
                if tot > 1.0:
                    tot = 1.0
                sem_drv[s] = tot

            # recipient updates read the previous recipient state
            prev_r = ar[:]

            # 5. recipient predicate-role / object units
            for tok in r["obj_pred_ids"]:
                semin = 0.0
                for k in range(r["sem_ptr"][tok], r["sem_ptr"][tok + 1]):
                    semin += sem_drv[r["sem_idx"][k]]
                semin /= r["fan_in"][tok]
                fb = 0.0
                for k in range(r["att_ptr"][tok], r["att_ptr"][tok + 1]):
                    fb += prev_r[r["att_idx"][k]]
                kk = r["kinds"][tok]
                kmap = kappa_pred if kk == 1 else kappa
                net = semin + fbk * fb + kmap * self._map_in(kk, r["map_slot"][tok], ad)
                lat = rec_lateral(tok, prev_r, slat)
                if kk == 0:
                    lat *= obj_scale
                net -= lat
                ar[tok] = _leaky(prev_r[tok], net, growth, decay)

            # 6. recipient SPs, then propositions
            for k in range(len(r["sp_ids"])):
                sp = r["sp_ids"][k]
                drive = rf * (ar[r["sp_role"][k]] + ar[r["sp_filler"][k]])
                net = drive * (1.0 + gate * td * prev_r[r["sp_parent"][k]])
                net += kappa * self._map_in(2, r["map_slot"][sp], ad)
                net -= rec_lateral(sp, prev_r, slat_sp)
                ar[sp] = _leaky(prev_r[sp], net, growth, decay)
            for pi in r["prop_ids"]:
                net = 0.0
                for k in range(r["child_ptr"][pi], r["child_ptr"][pi + 1]):
                    net += ar[r["child_idx"][k]]
                net *= pin
                fil = 0.0
                for k in range(r["att_ptr"][pi], r["att_ptr"][pi + 1]):
                    fil += ar[r["att_idx"][k]]
                net += rf * fil
                net += kappa * self._map_in(3, r["map_slot"][pi], ad)
                net -= rec_lateral(pi, prev_r, slat)
                ar[pi] = _leaky(prev_r[pi], net, growth, pdec)

            # 7. mapping hypotheses: h(d, r) += a_d * a_r for same-kind pairs
            for kk in range(4):
                dtoks = self._map_d[kk]
                rtoks = self._map_r[kk]
                hk = self.h[kk]
                for i in range(len(dtoks)):
                    a = ad[dtoks[i]]
                    if a == 0.0:
                        continue
                    for j in range(len(rtoks)):
                        hk[i, j] += a * ar[rtoks[j]]

            # 8. combined semantic activations + trace row
            sem_row = self.sem_trace[t]
            for s in range(self.n_sem):
                tot = sem_drv[s]
                for k in range(self._sem_rec_ptr[s], self._sem_rec_ptr[s + 1]):
                    tot += ar[self._sem_rec_idx[k]]
                if tot > 1.0:
                    tot = 1.0
                sem_row[s] = tot
            self.drv_trace[t] = ad
            self.rec_trace[t] = ar

    def _map_in(self, kind_code, slot, ad):
        if slot < 0:
            return 0.0
        total = 0.0
        wk = self.wm[kind_code]
        dtoks = self._map_d[kind_code]
        for i in range(len(dtoks)):
            a = ad[dtoks[i]]
            if a != 0.0:
                total += wk[i, slot] * a
        return total


def _side_lists(side) -> dict:
    return {
        "n": side.n,
        "kinds": side.kinds.tolist(),
        "sem_ptr": side.sem_ptr.tolist(),
        "sem_idx": side.sem_idx.tolist(),
        "fan_in": side.fan_in.tolist(),
        "sp_ids": side.sp_ids.tolist(),
        "sp_role": side.sp_role.tolist(),
        "sp_filler": side.sp_filler.tolist(),
        "sp_parent": side.sp_parent.tolist(),
        "att_ptr": side.att_ptr.tolist(),
        "att_idx": side.att_idx.tolist(),
        "child_ptr": side.child_ptr.tolist(),
        "child_idx": side.child_idx.tolist(),
        "prop_ids": side.prop_ids.tolist(),
        "obj_pred_ids": side.obj_pred_ids.tolist(),
        "map_slot": side.map_slot.tolist(),
        "kin_ptr": side.kin_ptr.tolist(),
        "kin_idx": side.kin_idx.tolist(),
        "partner": side.partner.tolist(),
    }
