# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled engine: the per-iteration update loop.

Twin of ``_kernel_py.Engine``. Both backends perform the same
floating-point operations in the same order so traces are bit-identical;
keep any change mirrored there. See ``_kernel_py`` for the step-by-step
description of one iteration.
"""

import numpy as np

cimport numpy as cnp

BACKEND_NAME = "compiled"


cdef inline double _leaky(double a, double net, double growth, double decay) nogil:
    if net >= 0.0:
        a = a + growth * net * (1.0 - a) - decay * a
    else:
        a = a + growth * net * a - decay * a
    if a < 0.0:
        return 0.0
    if a > 1.0:
        return 1.0
    return a


cdef class _Side:
    cdef cnp.int8_t[::1] kinds
    cdef cnp.int32_t[::1] sem_ptr, sem_idx
    cdef double[::1] fan_in
    cdef cnp.int32_t[::1] sp_ids, sp_role, sp_filler, sp_parent
    cdef cnp.int32_t[::1] att_ptr, att_idx, child_ptr, child_idx
    cdef cnp.int32_t[::1] prop_ids, obj_pred_ids, map_slot
    cdef cnp.int32_t[::1] kin_ptr, kin_idx
    cdef cnp.int8_t[:, ::1] partner
    cdef int n

    def __init__(self, side):
        self.kinds = side.kinds
        self.sem_ptr = side.sem_ptr
        self.sem_idx = side.sem_idx
        self.fan_in = side.fan_in
        self.sp_ids = side.sp_ids
        self.sp_role = side.sp_role
        self.sp_filler = side.sp_filler
        self.sp_parent = side.sp_parent
        self.att_ptr = side.att_ptr
        self.att_idx = side.att_idx
        self.child_ptr = side.child_ptr
        self.child_idx = side.child_idx
        self.prop_ids = side.prop_ids
        self.obj_pred_ids = side.obj_pred_ids
        self.map_slot = side.map_slot
        self.kin_ptr = side.kin_ptr
        self.kin_idx = side.kin_idx
        self.partner = side.partner
        self.n = side.n


cdef class Engine:
    cdef _Side d, r
    cdef double[:, ::1] noise, sem_trace, drv_trace, rec_trace
    cdef double[:, :] h0, h1, h2, h3, w0, w1, w2, w3
    cdef cnp.int32_t[::1] md0, md1, md2, md3, mr0, mr1, mr2, mr3
    cdef cnp.int32_t[::1] sem_drv_ptr, sem_drv_idx, sem_rec_ptr, sem_rec_idx
    cdef double[::1] act_d, act_r, sem_drv, new_sp, prev_r
    cdef cnp.int32_t[::1] charge, refr
    cdef int n_sem, n_sp_d
    cdef double growth, decay, theta, beta, td, kappa, kappa_pred
    cdef double supp, pdec, rlat, slat, slat_sp, obj_scale, fbk, rf, pin, gate
    cdef int win, refract

    def __init__(self, wiring, params, noise, sem_trace, drv_trace, rec_trace, h_mats, w_mats):
        self.d = _Side(wiring.drv)
        self.r = _Side(wiring.rec)
        self.noise = noise
        self.sem_trace = sem_trace
        self.drv_trace = drv_trace
        self.rec_trace = rec_trace
        self.h0, self.h1, self.h2, self.h3 = h_mats
        self.w0, self.w1, self.w2, self.w3 = w_mats
        self.md0, self.md1, self.md2, self.md3 = wiring.map_d_tokens
        self.mr0, self.mr1, self.mr2, self.mr3 = wiring.map_r_tokens
        self.sem_drv_ptr = wiring.sem_drv_ptr
        self.sem_drv_idx = wiring.sem_drv_idx
        self.sem_rec_ptr = wiring.sem_rec_ptr
        self.sem_rec_idx = wiring.sem_rec_idx
        self.n_sem = len(wiring.sem_names)
        self.n_sp_d = wiring.drv.sp_ids.shape[0]
        self.act_d = np.zeros(wiring.drv.n)
        self.act_r = np.zeros(wiring.rec.n)
        self.sem_drv = np.zeros(self.n_sem)
        self.new_sp = np.zeros(max(self.n_sp_d, 1))
        self.prev_r = np.zeros(wiring.rec.n)
        self.charge = np.zeros(max(self.n_sp_d, 1), dtype=np.int32)
        self.refr = np.zeros(max(self.n_sp_d, 1), dtype=np.int32)

        self.growth = params.growth
        self.decay = params.decay
        self.theta = params.fire_threshold
        self.win = params.inhibitor_window
        self.refract = params.refractory
        self.beta = params.lateral
        self.td = params.top_down
        self.kappa = params.map_gain
        self.kappa_pred = params.map_gain * params.pred_map_scale
        self.supp = params.suppression
        self.pdec = params.prop_decay
        self.rlat = params.lateral * params.recipient_lateral
        self.slat = params.lateral * params.sibling_lateral
        self.slat_sp = params.lateral * params.sp_sibling_lateral
        self.obj_scale = params.obj_lateral_scale
        self.fbk = params.sp_feedback
        self.rf = params.role_filler
        self.pin = params.prop_input
        self.gate = params.gate_gain

    def reset_phase(self):
        cdef int i
        for i in range(self.act_d.shape[0]):
            self.act_d[i] = 0.0
        for i in range(self.act_r.shape[0]):
            self.act_r[i] = 0.0
        for i in range(self.n_sp_d):
            self.charge[i] = 0
            self.refr[i] = 0

    cdef double _rec_lateral(self, int tok, double[::1] prev, double sib):
        # strongest same-kind pressure; partners press with the
        # within-structure coefficient
        cdef double best = 0.0, v
        cdef int q, j
        for q in range(self.r.kin_ptr[tok], self.r.kin_ptr[tok + 1]):
            j = self.r.kin_idx[q]
            v = (sib if self.r.partner[tok, j] else self.rlat) * prev[j]
            if v > best:
                best = v
        return best

    cdef double _map_in(self, int kind, int slot, double[::1] ad):
        cdef double total = 0.0, a
        cdef int i
        cdef double[:, :] wk
        cdef cnp.int32_t[::1] dtoks
        if slot < 0:
            return 0.0
        if kind == 0:
            wk = self.w0; dtoks = self.md0
        elif kind == 1:
            wk = self.w1; dtoks = self.md1
        elif kind == 2:
            wk = self.w2; dtoks = self.md2
        else:
            wk = self.w3; dtoks = self.md3
        for i in range(dtoks.shape[0]):
            a = ad[dtoks[i]]
            if a != 0.0:
                total += wk[i, slot] * a
        return total

    def run_window(self, int sched_prop, int t0, int t1):
        cdef _Side d = self.d
        cdef _Side r = self.r
        cdef double[::1] ad = self.act_d
        cdef double[::1] ar = self.act_r
        cdef double[::1] sem_drv = self.sem_drv
        cdef double[::1] new_sp = self.new_sp
        cdef double[::1] prev_r = self.prev_r
        cdef int t, i, j, k, kk, tok, sp, spj, pi, par, slot
        cdef double prev, net, sib, tot, semin, fb, fil, drive, a, lat, kmap
        cdef bint suppressed
        cdef double[:, :] hk
        cdef cnp.int32_t[::1] dtoks, rtoks

        for t in range(t0, t1):
            # 1. driver propositions
            for i in range(d.prop_ids.shape[0]):
                pi = d.prop_ids[i]
                if pi == sched_prop:
                    ad[pi] = 1.0
                else:
                    net = 0.0
                    for k in range(d.att_ptr[pi], d.att_ptr[pi + 1]):
                        net += ad[d.att_idx[k]]
                    ad[pi] = _leaky(ad[pi], net, self.growth, self.pdec)

            # 2. driver SPs (laterals read previous activations)
            for k in range(self.n_sp_d):
                sp = d.sp_ids[k]
                prev = ad[sp]
                if self.refr[k] > 0:
                    self.refr[k] -= 1
                    self.charge[k] = 0
                    suppressed = True
                elif prev > self.theta:
                    self.charge[k] += 1
                    if self.charge[k] >= self.win:
                        self.refr[k] = self.refract
                        self.charge[k] = 0
                        suppressed = True
                    else:
                        suppressed = False
                else:
                    self.charge[k] = 0
                    suppressed = False
                par = d.sp_parent[k]
                if par == sched_prop:
                    net = self.td * ad[par] + self.noise[t, k]
                else:
                    net = 0.0
                sib = 0.0
                for j in range(d.child_ptr[par], d.child_ptr[par + 1]):
                    spj = d.child_idx[j]
                    if spj != sp:
                        sib += ad[spj]
                net -= self.beta * sib
                if suppressed:
                    net -= self.supp
                new_sp[k] = _leaky(prev, net, self.growth, self.decay)
            for k in range(self.n_sp_d):
                ad[d.sp_ids[k]] = new_sp[k]

            # 3. driver predicate-role / object units
            for i in range(d.obj_pred_ids.shape[0]):
                tok = d.obj_pred_ids[i]
                net = 0.0
                for k in range(d.att_ptr[tok], d.att_ptr[tok + 1]):
                    net += ad[d.att_idx[k]]
                ad[tok] = _leaky(ad[tok], net, self.growth, self.decay)

            # 4. driver-side semantic pattern
            for i in range(self.n_sem):
                tot = 0.0
                for k in range(self.sem_drv_ptr[i], self.sem_drv_ptr[i + 1]):
                    tot += ad[self.sem_drv_idx[k]]
                if tot > 1.0:
                    tot = 1.0
                sem_drv[i] = tot

            # recipient updates read the previous recipient state
            for i in range(r.n):
                prev_r[i] = ar[i]

            # 5. recipient predicate-role / object units
            for i in range(r.obj_pred_ids.shape[0]):
                tok = r.obj_pred_ids[i]
                semin = 0.0
                for k in range(r.sem_ptr[tok], r.sem_ptr[tok + 1]):
                    semin += sem_drv[r.sem_idx[k]]
                semin /= r.fan_in[tok]
                fb = 0.0
                for k in range(r.att_ptr[tok], r.att_ptr[tok + 1]):
                    fb += prev_r[r.att_idx[k]]
                kk = r.kinds[tok]
                kmap = self.kappa_pred if kk == 1 else self.kappa
                net = semin + self.fbk * fb + kmap * self._map_in(kk, r.map_slot[tok], ad)
                lat = self._rec_lateral(tok, prev_r, self.slat)
                if kk == 0:
                    lat *= self.obj_scale
                net -= lat
                ar[tok] = _leaky(prev_r[tok], net, self.growth, self.decay)

            # 6. recipient SPs, then propositions
            for k in range(r.sp_ids.shape[0]):
                sp = r.sp_ids[k]
                drive = self.rf * (ar[r.sp_role[k]] + ar[r.sp_filler[k]])
                net = drive * (1.0 + self.gate * self.td * prev_r[r.sp_parent[k]])
                net += self.kappa * self._map_in(2, r.map_slot[sp], ad)
                net -= self._rec_lateral(sp, prev_r, self.slat_sp)
                ar[sp] = _leaky(prev_r[sp], net, self.growth, self.decay)
            for i in range(r.prop_ids.shape[0]):
                pi = r.prop_ids[i]
                net = 0.0
                for k in range(r.child_ptr[pi], r.child_ptr[pi + 1]):
                    net += ar[r.child_idx[k]]
                net *= self.pin
                fil = 0.0
                for k in range(r.att_ptr[pi], r.att_ptr[pi + 1]):
                    fil += ar[r.att_idx[k]]
                net += self.rf * fil
                net += self.kappa * self._map_in(3, r.map_slot[pi], ad)
                net -= self._rec_lateral(pi, prev_r, self.slat)
                ar[pi] = _leaky(prev_r[pi], net, self.growth, self.pdec)

            # 7. mapping hypotheses: h(d, r) += a_d * a_r for same-kind pairs
            for kk in range(4):
                if kk == 0:
                    hk = self.h0; dtoks = self.md0; rtoks = self.mr0
                elif kk == 1:
                    hk = self.h1; dtoks = self.md1; rtoks = self.mr1
                elif kk == 2:
                    hk = self.h2; dtoks = self.md2; rtoks = self.mr2
                else:
                    hk = self.h3; dtoks = self.md3; rtoks = self.mr3
                for i in range(dtoks.shape[0]):
                    a = ad[dtoks[i]]
                    if a == 0.0:
                        continue
                    for j in range(rtoks.shape[0]):
                        hk[i, j] += a * ar[rtoks[j]]

            # 8. combined semantic activations + trace row
            for i in range(self.n_sem):
                tot = sem_drv[i]
                for k in range(self.sem_rec_ptr[i], self.sem_rec_ptr[i + 1]):
                    tot += ar[self.sem_rec_idx[k]]
                if tot > 1.0:
                    tot = 1.0
                self.sem_trace[t, i] = tot
            for i in range(d.n):
                self.drv_trace[t, i] = ad[i]
            for i in range(r.n):
                self.rec_trace[t, i] = ar[i]
