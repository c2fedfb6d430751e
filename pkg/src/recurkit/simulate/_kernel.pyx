# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernels.

Draw-for-draw mirror of ``_kernel_py``: both call the same NumPy C
distribution functions (standard uniform, ziggurat standard exponential,
Poisson) on the same Philox streams in the same order, so trajectories are
bit-identical across backends.
"""
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.stdlib cimport free, malloc, realloc

import numpy as np

cimport numpy as cnp
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (random_poisson,
                                           random_standard_exponential,
                                           random_standard_uniform)

from ._kernel_py import KernelError

cnp.import_array()

cdef double INF = float("inf")

cdef int W_Z0 = 0
cdef int W_MUT = 1
cdef int W_Z1 = 2

STOP_TOTAL = "total_extinction"
STOP_REBOUND = "rebound_detected"
STOP_HORIZON = "horizon_reached"
STOP_SENSITIVE = "sensitive_extinction"


cdef bitgen_t *_bitgen(object generator):
    capsule = generator.bit_generator.capsule
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef struct RecBuf:
    double *t
    cnp.int64_t *a
    cnp.int64_t *b
    Py_ssize_t n
    Py_ssize_t cap


cdef int _rec_push(RecBuf *r, double t, cnp.int64_t a, cnp.int64_t b) except -1:
    cdef Py_ssize_t newcap
    if r.n == r.cap:
        newcap = r.cap * 2 if r.cap > 0 else 1024
        r.t = <double *> realloc(r.t, newcap * sizeof(double))
        r.a = <cnp.int64_t *> realloc(r.a, newcap * sizeof(cnp.int64_t))
        r.b = <cnp.int64_t *> realloc(r.b, newcap * sizeof(cnp.int64_t))
        if r.t == NULL or r.a == NULL or r.b == NULL:
            raise MemoryError()
        r.cap = newcap
    r.t[r.n] = t
    r.a[r.n] = a
    r.b[r.n] = b
    r.n += 1
    return 0


cdef tuple _rec_export(RecBuf *r):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] t = np.empty(r.n, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] a = np.empty(r.n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] b = np.empty(r.n, dtype=np.int64)
    cdef Py_ssize_t i
    for i in range(r.n):
        t[i] = r.t[i]
        a[i] = r.a[i]
        b[i] = r.b[i]
    return t, a, b


def exact_kernel(x, r0, d0, r1, d1, mu_x,
                 horizon, rebound_multiplier, stop_on_sensitive,
                 resolve_extinction, z0_only,
                 g0, g1, g2,
                 record_mode="full", thin=1, probe_times=None):
    cdef bitgen_t *b0 = _bitgen(g0)
    cdef bitgen_t *b1 = _bitgen(g1)
    cdef bitgen_t *b2 = _bitgen(g2)

    cdef double c_r0 = r0, c_d0 = d0, c_r1 = r1, c_d1 = d1
    cdef double c_mux = 0.0 if z0_only else mu_x
    cdef double c_horizon = horizon
    cdef double tot0 = c_r0 + c_d0
    cdef double tot1 = c_r1 + c_d1
    cdef cnp.int64_t z0 = <cnp.int64_t> x
    cdef cnp.int64_t z1 = 0
    cdef double rebound_level = rebound_multiplier * z0
    cdef bint c_stop_sens = bool(stop_on_sensitive)
    cdef bint c_resolve = bool(resolve_extinction)

    cdef double t = 0.0
    cdef double next0 = INF
    if z0 > 0:
        next0 = random_standard_exponential(b0) / (tot0 * z0)
    cdef double e1 = -1.0
    cdef double e2 = -1.0

    cdef double tx = -1.0
    cdef double xi = -1.0
    cdef bint escaped = 0
    cdef cnp.int64_t min_total = z0
    cdef double tau_first = 0.0, tau_last = 0.0
    cdef cnp.int64_t n_mut = 0
    cdef cnp.int64_t n_events = 0
    stop = None

    cdef bint rec_full = record_mode == "full"
    cdef bint rec_z1 = record_mode == "z1_changes"
    cdef cnp.int64_t c_thin = <cnp.int64_t> thin

    cdef RecBuf rec
    rec.t = NULL; rec.a = NULL; rec.b = NULL; rec.n = 0; rec.cap = 0
    _rec_push(&rec, 0.0, z0, 0)

    cdef cnp.ndarray[cnp.float64_t, ndim=1] probes_arr
    cdef Py_ssize_t n_probes = 0, pk = 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pz0_arr, pz1_arr
    cdef double *pr = NULL
    cdef cnp.int64_t *pr0 = NULL
    cdef cnp.int64_t *pr1 = NULL
    if probe_times is not None:
        probes_arr = np.ascontiguousarray(probe_times, dtype=np.float64)
        n_probes = probes_arr.shape[0]
        pz0_arr = np.zeros(n_probes, dtype=np.int64)
        pz1_arr = np.zeros(n_probes, dtype=np.int64)
        if n_probes > 0:
            pr = &probes_arr[0]
            pr0 = &pz0_arr[0]
            pr1 = &pz1_arr[0]
    else:
        pz0_arr = np.zeros(0, dtype=np.int64)
        pz1_arr = np.zeros(0, dtype=np.int64)

    cdef double mut_rate, z1_rate, t_mut, t_z1, te, dt, u, cutoff
    cdef int which
    cdef cnp.int64_t total

    try:
        while True:
            if c_mux > 0.0 and z0 > 0 and e1 < 0.0:
                e1 = random_standard_exponential(b1)
            if z1 > 0 and e2 < 0.0:
                e2 = random_standard_exponential(b2)

            mut_rate = c_mux * z0
            z1_rate = tot1 * z1
            t_mut = t + e1 / mut_rate if (e1 >= 0.0 and mut_rate > 0.0) else INF
            t_z1 = t + e2 / z1_rate if (e2 >= 0.0 and z1_rate > 0.0) else INF

            if next0 <= t_mut and next0 <= t_z1:
                which = W_Z0; te = next0
            elif t_mut <= t_z1:
                which = W_MUT; te = t_mut
            else:
                which = W_Z1; te = t_z1

            cutoff = te if te < c_horizon else c_horizon
            while pk < n_probes and pr[pk] <= cutoff:
                pr0[pk] = z0
                pr1[pk] = z1
                pk += 1

            if te > c_horizon or te == INF:
                t = c_horizon if c_horizon < INF else t
                stop = STOP_HORIZON
                break

            dt = te - t
            if which != W_MUT and e1 >= 0.0:
                e1 -= mut_rate * dt
                if e1 < 0.0:  # float drift only; clock was about to fire
                    e1 = 0.0
            if which != W_Z1 and e2 >= 0.0:
                e2 -= z1_rate * dt
                if e2 < 0.0:
                    e2 = 0.0
            t = te

            if which == W_Z0:
                u = random_standard_uniform(b0)
                if u * tot0 < c_r0:
                    z0 += 1
                else:
                    z0 -= 1
                if z0 > 0:
                    next0 = t + random_standard_exponential(b0) / (tot0 * z0)
                else:
                    next0 = INF
                    if tx < 0.0:
                        tx = t
            elif which == W_MUT:
                z1 += 1
                n_mut += 1
                e1 = -1.0
            else:
                u = random_standard_uniform(b2)
                if u * tot1 < c_r1:
                    z1 += 1
                else:
                    z1 -= 1
                e2 = -1.0

            total = z0 + z1
            if xi < 0.0 and z1 >= z0:
                xi = t
                escaped = z1 >= 1
            if total < min_total:
                min_total = total
                tau_first = t
                tau_last = t
            elif total == min_total:
                tau_last = t

            n_events += 1
            if rec_full:
                if c_thin <= 1 or n_events % c_thin == 0:
                    _rec_push(&rec, t, z0, z1)
            elif rec_z1 and which != W_Z0:
                _rec_push(&rec, t, z0, z1)

            if total == 0:
                stop = STOP_TOTAL
                while pk < n_probes and pr[pk] <= c_horizon:
                    pr0[pk] = 0
                    pr1[pk] = 0
                    pk += 1
                break
            if c_stop_sens and z0 == 0:
                stop = STOP_SENSITIVE
                break
            if total >= rebound_level and z1 > z0:
                stop = STOP_REBOUND
                break

        final_time = t
        final_z0 = z0
        final_z1 = z1

        if tx < 0.0 and z0 > 0 and c_resolve and stop != STOP_HORIZON:
            while z0 > 0 and next0 <= c_horizon:
                t = next0
                u = random_standard_uniform(b0)
                if u * tot0 < c_r0:
                    z0 += 1
                else:
                    z0 -= 1
                if z0 > 0:
                    next0 = t + random_standard_exponential(b0) / (tot0 * z0)
                else:
                    tx = t

        times, rz0, rz1 = _rec_export(&rec)
    finally:
        free(rec.t); free(rec.a); free(rec.b)

    return {
        "times": times, "z0": rz0, "z1": rz1,
        "t_extinct_sensitive": None if tx < 0.0 else tx,
        "crossover": None if xi < 0.0 else xi,
        "crossover_escaped": bool(escaped),
        "tau_first": tau_first, "tau_last": tau_last, "min_total": min_total,
        "stop_reason": stop,
        "final_time": final_time, "final_z0": final_z0, "final_z1": final_z1,
        "probe_filled": pk, "probe_z0": pz0_arr, "probe_z1": pz1_arr,
        "n_mutations": n_mut,
    }


cdef cnp.int64_t _leap(bitgen_t *bg, cnp.int64_t z, double rb, double rd,
                     double h, int max_halvings) except? -1:
    cdef double remaining = h
    cdef double hh
    cdef cnp.int64_t b, d
    cdef int halved = 0
    while remaining > 0.0 and z > 0:
        hh = remaining
        while True:
            b = random_poisson(bg, rb * z * hh)
            d = random_poisson(bg, rd * z * hh)
            if z + b - d >= 0:
                z += b - d
                remaining -= hh
                break
            hh *= 0.5
            halved += 1
            if halved > max_halvings:
                raise KernelError("leap instability")
    return z


cdef struct CloneBuf:
    cnp.int64_t *size
    double *next
    Py_ssize_t n
    Py_ssize_t cap


cdef int _clone_push(CloneBuf *c, cnp.int64_t size, double next) except -1:
    cdef Py_ssize_t newcap
    if c.n == c.cap:
        newcap = c.cap * 2 if c.cap > 0 else 64
        c.size = <cnp.int64_t *> realloc(c.size, newcap * sizeof(cnp.int64_t))
        c.next = <double *> realloc(c.next, newcap * sizeof(double))
        if c.size == NULL or c.next == NULL:
            raise MemoryError()
        c.cap = newcap
    c.size[c.n] = size
    c.next[c.n] = next
    c.n += 1
    return 0


def hybrid_kernel(x, r0, d0, r1, d1, mu_x,
                  horizon, rebound_multiplier, stop_on_sensitive,
                  resolve_extinction, z0_only,
                  step_fraction, clone_cutoff, z0_exact_threshold, max_halvings,
                  g0, g1, g2,
                  record_mode="full", thin=1, probe_times=None):
    cdef bitgen_t *b0 = _bitgen(g0)
    cdef bitgen_t *b1 = _bitgen(g1)
    cdef bitgen_t *b2 = _bitgen(g2)

    cdef double c_r0 = r0, c_d0 = d0, c_r1 = r1, c_d1 = d1
    cdef double c_mux = 0.0 if z0_only else mu_x
    cdef double c_horizon = horizon
    cdef double tot0 = c_r0 + c_d0
    cdef double tot1 = c_r1 + c_d1
    cdef double c_cutoff = clone_cutoff
    cdef cnp.int64_t c_z0thresh = <cnp.int64_t> z0_exact_threshold
    cdef int c_maxhalve = <int> max_halvings
    cdef bint c_stop_sens = bool(stop_on_sensitive)
    cdef bint c_resolve = bool(resolve_extinction)

    cdef double h_base = step_fraction / (tot0 if tot0 > tot1 else tot1)
    cdef cnp.int64_t z0 = <cnp.int64_t> x
    cdef double rebound_level = rebound_multiplier * z0
    cdef bint z0_exact = z0 <= c_z0thresh
    cdef double next0 = -1.0
    cdef cnp.int64_t z1_agg = 0

    cdef CloneBuf clones
    clones.size = NULL; clones.next = NULL; clones.n = 0; clones.cap = 0

    cdef double t = 0.0
    cdef double tx = -1.0
    cdef double xi = -1.0
    cdef bint escaped = 0
    cdef cnp.int64_t min_total = z0
    cdef double tau_first = 0.0, tau_last = 0.0
    cdef cnp.int64_t n_mut = 0
    cdef cnp.int64_t n_steps = 0
    cdef cnp.int64_t prev_z1 = 0
    stop = None

    cdef bint rec_full = record_mode == "full"
    cdef bint rec_z1 = record_mode == "z1_changes"
    cdef cnp.int64_t c_thin = <cnp.int64_t> thin

    cdef RecBuf rec
    rec.t = NULL; rec.a = NULL; rec.b = NULL; rec.n = 0; rec.cap = 0
    _rec_push(&rec, 0.0, z0, 0)

    cdef cnp.ndarray[cnp.float64_t, ndim=1] probes_arr
    cdef Py_ssize_t n_probes = 0, pk = 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pz0_arr, pz1_arr
    cdef double *pr = NULL
    cdef cnp.int64_t *pr0 = NULL
    cdef cnp.int64_t *pr1 = NULL
    if probe_times is not None:
        probes_arr = np.ascontiguousarray(probe_times, dtype=np.float64)
        n_probes = probes_arr.shape[0]
        pz0_arr = np.zeros(n_probes, dtype=np.int64)
        pz1_arr = np.zeros(n_probes, dtype=np.int64)
        if n_probes > 0:
            pr = &probes_arr[0]
            pr0 = &pz0_arr[0]
            pr1 = &pz1_arr[0]
    else:
        pz0_arr = np.zeros(0, dtype=np.int64)
        pz1_arr = np.zeros(0, dtype=np.int64)

    cdef double step_end, h, ev_t, u, tb, lam
    cdef cnp.int64_t z0_start, z1_start, z1, total, size, m
    cdef double nxt
    cdef Py_ssize_t i, w, j
    cdef double tc
    cdef cnp.int64_t zc
    cdef bint exact_c
    cdef double next_c, se, hh

    try:
        while True:
            step_end = t + h_base
            if step_end > c_horizon:
                step_end = c_horizon
            h = step_end - t
            z0_start = z0
            z1_start = z1_agg
            for i in range(clones.n):
                z1_start += clones.size[i]

            while pk < n_probes and pr[pk] <= step_end:
                pr0[pk] = z0_start
                pr1[pk] = z1_start
                pk += 1

            if h <= 0.0:
                stop = STOP_HORIZON
                break

            # sensitive leg
            if z0 > 0:
                if not z0_exact:
                    z0 = _leap(b0, z0, c_r0, c_d0, h, c_maxhalve)
                    if z0 <= c_z0thresh:
                        z0_exact = 1
                        next0 = -1.0
                    if z0 == 0 and tx < 0.0:
                        tx = step_end
                else:
                    if next0 < 0.0:
                        next0 = t + random_standard_exponential(b0) / (tot0 * z0)
                    while z0 > 0 and next0 <= step_end:
                        ev_t = next0
                        u = random_standard_uniform(b0)
                        if u * tot0 < c_r0:
                            z0 += 1
                        else:
                            z0 -= 1
                        if z0 > 0:
                            next0 = ev_t + random_standard_exponential(b0) / (tot0 * z0)
                        else:
                            next0 = INF
                            if tx < 0.0:
                                tx = ev_t

            # mutation leg
            if c_mux > 0.0 and z0_start > 0:
                lam = c_mux * z0_start * h
                m = random_poisson(b1, lam)
                if m > 0:
                    births = np.empty(m, dtype=np.float64)
                    for j in range(m):
                        births[j] = t + h * random_standard_uniform(b1)
                    births.sort()
                    for j in range(m):
                        n_mut += 1
                        tb = births[j]
                        _clone_push(&clones, 1,
                                    tb + random_standard_exponential(b2) / tot1)

            # exact-clone leg
            if clones.n > 0:
                w = 0
                for i in range(clones.n):
                    size = clones.size[i]
                    nxt = clones.next[i]
                    while nxt <= step_end:
                        u = random_standard_uniform(b2)
                        if u * tot1 < c_r1:
                            size += 1
                        else:
                            size -= 1
                        if size == 0:
                            break
                        nxt += random_standard_exponential(b2) / (tot1 * size)
                    if size == 0:
                        continue
                    if size >= c_cutoff:
                        z1_agg += size
                    else:
                        clones.size[w] = size
                        clones.next[w] = nxt
                        w += 1
                clones.n = w

            # aggregate resistant leg
            if z1_agg > 0:
                z1_agg = _leap(b2, z1_agg, c_r1, c_d1, h, c_maxhalve)
                if 0 < z1_agg < c_cutoff:
                    _clone_push(&clones, z1_agg,
                                step_end + random_standard_exponential(b2) / (tot1 * z1_agg))
                    z1_agg = 0

            t = step_end
            z1 = z1_agg
            for i in range(clones.n):
                z1 += clones.size[i]
            total = z0 + z1

            if xi < 0.0 and z1 >= z0:
                xi = t
                escaped = z1 >= 1
            if total < min_total:
                min_total = total
                tau_first = t
                tau_last = t
            elif total == min_total:
                tau_last = t

            n_steps += 1
            if rec_full:
                if c_thin <= 1 or n_steps % c_thin == 0:
                    _rec_push(&rec, t, z0, z1)
            elif rec_z1 and z1 != prev_z1:
                _rec_push(&rec, t, z0, z1)
            prev_z1 = z1

            if total == 0:
                stop = STOP_TOTAL
                while pk < n_probes and pr[pk] <= c_horizon:
                    pr0[pk] = 0
                    pr1[pk] = 0
                    pk += 1
                break
            if c_stop_sens and z0 == 0:
                stop = STOP_SENSITIVE
                break
            if total >= rebound_level and z1 > z0:
                stop = STOP_REBOUND
                break

        final_time = t
        final_z0 = z0
        final_z1 = z1_agg
        for i in range(clones.n):
            final_z1 += clones.size[i]

        if tx < 0.0 and z0 > 0 and c_resolve and stop != STOP_HORIZON:
            tc = t
            zc = z0
            exact_c = z0_exact
            next_c = next0
            while zc > 0 and tc < c_horizon:
                se = tc + h_base
                if se > c_horizon:
                    se = c_horizon
                hh = se - tc
                if not exact_c:
                    zc = _leap(b0, zc, c_r0, c_d0, hh, c_maxhalve)
                    if zc <= c_z0thresh:
                        exact_c = 1
                        next_c = -1.0
                    if zc == 0 and tx < 0.0:
                        tx = se
                else:
                    if next_c < 0.0:
                        next_c = tc + random_standard_exponential(b0) / (tot0 * zc)
                    while zc > 0 and next_c <= se:
                        ev_t = next_c
                        u = random_standard_uniform(b0)
                        if u * tot0 < c_r0:
                            zc += 1
                        else:
                            zc -= 1
                        if zc > 0:
                            next_c = ev_t + random_standard_exponential(b0) / (tot0 * zc)
                        else:
                            tx = ev_t
                tc = se

        times, rz0, rz1 = _rec_export(&rec)
    finally:
        free(rec.t); free(rec.a); free(rec.b)
        free(clones.size); free(clones.next)

    return {
        "times": times, "z0": rz0, "z1": rz1,
        "t_extinct_sensitive": None if tx < 0.0 else tx,
        "crossover": None if xi < 0.0 else xi,
        "crossover_escaped": bool(escaped),
        "tau_first": tau_first, "tau_last": tau_last, "min_total": min_total,
        "stop_reason": stop,
        "final_time": final_time, "final_z0": final_z0, "final_z1": final_z1,
        "probe_filled": pk, "probe_z0": pz0_arr, "probe_z1": pz1_arr,
        "n_mutations": n_mut,
    }


def clone_kernel(r1, d1, size_cap, horizon, g2):
    cdef bitgen_t *b2 = _bitgen(g2)
    cdef double c_r1 = r1, c_d1 = d1
    cdef double tot1 = c_r1 + c_d1
    cdef double cap = size_cap
    cdef double c_horizon = horizon
    cdef cnp.int64_t size = 1
    cdef double t = random_standard_exponential(b2) / tot1
    cdef double u
    while t <= c_horizon:
        u = random_standard_uniform(b2)
        if u * tot1 < c_r1:
            size += 1
        else:
            size -= 1
        if size == 0:
            return 0, t, False
        if size >= cap:
            return size, t, True
        t += random_standard_exponential(b2) / (tot1 * size)
    return size, c_horizon, False
