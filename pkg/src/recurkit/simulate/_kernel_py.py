"""Pure-Python simulation kernels.

Reference implementation of the event-driven and leaping simulators.  The
compiled extension (``_kernel.pyx``) mirrors this module draw for draw:
both consume the same NumPy C distribution functions in the same order, so
either backend produces bit-identical trajectories for a given stream
triple.

Stream contract (the basis of the coupling guarantees):

* ``g0`` drives sensitive births/deaths only.  Per event: one uniform
  (event type) then, if the population survives, one standard exponential
  (next waiting time).  One exponential is drawn up front.
* ``g1`` drives mutation arrivals only: one standard exponential per
  arrival (unit-rate residual clock, decremented as other events elapse in
  exact mode; Poisson counts plus arrival uniforms in hybrid mode).
* ``g2`` drives all resistant dynamics.

The sensitive trajectory is therefore a function of ``g0`` alone and does
not change when the mutation rate, or anything downstream of it, changes.
"""
from __future__ import annotations

import math

INF = math.inf

STOP_TOTAL = "total_extinction"
STOP_REBOUND = "rebound_detected"
STOP_HORIZON = "horizon_reached"
STOP_SENSITIVE = "sensitive_extinction"


class KernelError(RuntimeError):
    pass


def exact_kernel(x, r0, d0, r1, d1, mu_x,
                 horizon, rebound_multiplier, stop_on_sensitive,
                 resolve_extinction, z0_only,
                 g0, g1, g2,
                 record_mode="full", thin=1, probe_times=None):
    """Exact event-driven simulation of (Z0, Z1).

    Aggregate event rates: sensitive birth ``r0*z0``, sensitive death
    ``d0*z0``, mutation ``mu_x*z0`` (increments z1, leaves z0 unchanged),
    resistant birth ``r1*z1``, resistant death ``d1*z1``.
    """
    if z0_only:
        mu_x = 0.0

    t = 0.0
    z0 = int(x)
    z1 = 0
    tot0 = r0 + d0
    tot1 = r1 + d1
    p0 = r0  # birth if u*tot0 < r0
    rebound_level = rebound_multiplier * x

    next0 = g0.standard_exponential() / (tot0 * z0) if z0 > 0 else INF
    e1 = -1.0  # mutation residual; < 0 means "not drawn"
    e2 = -1.0  # resistant residual

    tx = None
    xi = None
    escaped = False
    min_total = z0
    tau_first = 0.0
    tau_last = 0.0
    n_mut = 0
    stop = None

    rec_full = record_mode == "full"
    rec_z1 = record_mode == "z1_changes"
    times = [0.0]
    rz0 = [z0]
    rz1 = [0]
    n_events = 0

    probes = probe_times if probe_times is not None else ()
    n_probes = len(probes)
    pk = 0
    pz0 = [0] * n_probes
    pz1 = [0] * n_probes

    while True:
        if mu_x > 0.0 and z0 > 0 and e1 < 0.0:
            e1 = g1.standard_exponential()
        if z1 > 0 and e2 < 0.0:
            e2 = g2.standard_exponential()

        mut_rate = mu_x * z0
        z1_rate = tot1 * z1
        t_mut = t + e1 / mut_rate if (e1 >= 0.0 and mut_rate > 0.0) else INF
        t_z1 = t + e2 / z1_rate if (e2 >= 0.0 and z1_rate > 0.0) else INF

        if next0 <= t_mut and next0 <= t_z1:
            which, te = 0, next0
        elif t_mut <= t_z1:
            which, te = 1, t_mut
        else:
            which, te = 2, t_z1

        cutoff = te if te < horizon else horizon
        while pk < n_probes and probes[pk] <= cutoff:
            pz0[pk] = z0
            pz1[pk] = z1
            pk += 1

        if te > horizon:
            t = horizon
            stop = STOP_HORIZON
            break
        if te == INF:
            stop = STOP_HORIZON
            break

        dt = te - t
        if which != 1 and e1 >= 0.0:
            e1 -= mut_rate * dt
            if e1 < 0.0:  # float drift only; the clock was about to fire
                e1 = 0.0
        if which != 2 and e2 >= 0.0:
            e2 -= z1_rate * dt
            if e2 < 0.0:
                e2 = 0.0
        t = te

        if which == 0:
            u = g0.random()
            if u * tot0 < p0:
                z0 += 1
            else:
                z0 -= 1
            if z0 > 0:
                next0 = t + g0.standard_exponential() / (tot0 * z0)
            else:
                next0 = INF
                if tx is None:
                    tx = t
        elif which == 1:
            z1 += 1
            n_mut += 1
            e1 = -1.0
        else:
            u = g2.random()
            if u * tot1 < r1:
                z1 += 1
            else:
                z1 -= 1
            e2 = -1.0

        total = z0 + z1
        if xi is None and z1 >= z0:
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
            if thin <= 1 or n_events % thin == 0:
                times.append(t)
                rz0.append(z0)
                rz1.append(z1)
        elif rec_z1 and which != 0:
            times.append(t)
            rz0.append(z0)
            rz1.append(z1)

        if total == 0:
            stop = STOP_TOTAL
            while pk < n_probes and probes[pk] <= horizon:
                pz0[pk] = 0
                pz1[pk] = 0
                pk += 1
            break
        if stop_on_sensitive and z0 == 0:
            stop = STOP_SENSITIVE
            break
        if total >= rebound_level and z1 > z0:
            stop = STOP_REBOUND
            break

    final_time = t
    final_z0 = z0
    final_z1 = z1

    if tx is None and z0 > 0 and resolve_extinction and stop != STOP_HORIZON:
        tc, next_c, zc = t, next0, z0
        while zc > 0 and next_c <= horizon:
            tc = next_c
            u = g0.random()
            if u * tot0 < p0:
                zc += 1
            else:
                zc -= 1
            if zc > 0:
                next_c = tc + g0.standard_exponential() / (tot0 * zc)
            else:
                tx = tc

    return {
        "times": times, "z0": rz0, "z1": rz1,
        "t_extinct_sensitive": tx,
        "crossover": xi, "crossover_escaped": escaped,
        "tau_first": tau_first, "tau_last": tau_last, "min_total": min_total,
        "stop_reason": stop,
        "final_time": final_time, "final_z0": final_z0, "final_z1": final_z1,
        "probe_filled": pk, "probe_z0": pz0, "probe_z1": pz1,
        "n_mutations": n_mut,
    }


def _leap(g, z, rb, rd, h, max_halvings):
    """Poisson birth/death leap over total duration h, halving on negatives."""
    remaining = h
    halved = 0
    while remaining > 0.0 and z > 0:
        hh = remaining
        while True:
            b = int(g.poisson(rb * z * hh))
            d = int(g.poisson(rd * z * hh))
            if z + b - d >= 0:
                z += b - d
                remaining -= hh
                break
            hh *= 0.5
            halved += 1
            if halved > max_halvings:
                raise KernelError("leap instability")
    return z


def hybrid_kernel(x, r0, d0, r1, d1, mu_x,
                  horizon, rebound_multiplier, stop_on_sensitive,
                  resolve_extinction, z0_only,
                  step_fraction, clone_cutoff, z0_exact_threshold, max_halvings,
                  g0, g1, g2,
                  record_mode="full", thin=1, probe_times=None):
    """Leaping simulation for large populations.

    The sensitive population advances by Poisson birth/death leaps while
    above ``z0_exact_threshold`` and by exact events below it (so the
    extinction time is event-resolved).  Mutations arrive as a Poisson
    count per step with the step-start intensity.  Each resistant clone is
    simulated exactly while smaller than ``clone_cutoff``, then merged
    into an aggregate that advances by Poisson leaps.
    """
    if z0_only:
        mu_x = 0.0

    tot0 = r0 + d0
    tot1 = r1 + d1
    h_base = step_fraction / max(tot0, tot1)
    rebound_level = rebound_multiplier * x

    t = 0.0
    z0 = int(x)
    z0_exact = z0 <= z0_exact_threshold
    next0 = -1.0  # pending exact sensitive event time; < 0 means undrawn
    z1_agg = 0
    clone_size = []
    clone_next = []

    tx = None
    xi = None
    escaped = False
    min_total = z0
    tau_first = 0.0
    tau_last = 0.0
    n_mut = 0
    stop = None

    rec_full = record_mode == "full"
    rec_z1 = record_mode == "z1_changes"
    times = [0.0]
    rz0 = [z0]
    rz1 = [0]
    n_steps = 0
    prev_z1 = 0

    probes = probe_times if probe_times is not None else ()
    n_probes = len(probes)
    pk = 0
    pz0 = [0] * n_probes
    pz1 = [0] * n_probes

    while True:
        step_end = t + h_base
        if step_end > horizon:
            step_end = horizon
        h = step_end - t
        z0_start = z0
        z1_start = z1_agg + sum(clone_size)

        while pk < n_probes and probes[pk] <= step_end:
            pz0[pk] = z0_start
            pz1[pk] = z1_start
            pk += 1

        if h <= 0.0:
            stop = STOP_HORIZON
            break

        # sensitive leg
        if z0 > 0:
            if not z0_exact:
                z0 = _leap(g0, z0, r0, d0, h, max_halvings)
                if z0 <= z0_exact_threshold:
                    z0_exact = True
                    next0 = -1.0
                if z0 == 0 and tx is None:
                    tx = step_end  # grid-resolved; leap hit zero exactly
            else:
                if next0 < 0.0:
                    next0 = t + g0.standard_exponential() / (tot0 * z0)
                while z0 > 0 and next0 <= step_end:
                    ev_t = next0
                    u = g0.random()
                    if u * tot0 < r0:
                        z0 += 1
                    else:
                        z0 -= 1
                    if z0 > 0:
                        next0 = ev_t + g0.standard_exponential() / (tot0 * z0)
                    else:
                        next0 = INF
                        if tx is None:
                            tx = ev_t

        # mutation leg
        if mu_x > 0.0 and z0_start > 0:
            m = int(g1.poisson(mu_x * z0_start * h))
            if m > 0:
                births = sorted(t + h * g1.random() for _ in range(m))
                for tb in births:
                    n_mut += 1
                    clone_size.append(1)
                    clone_next.append(tb + g2.standard_exponential() / tot1)

        # exact-clone leg
        if clone_size:
            keep_size = []
            keep_next = []
            for size, nxt in zip(clone_size, clone_next):
                while nxt <= step_end:
                    u = g2.random()
                    if u * tot1 < r1:
                        size += 1
                    else:
                        size -= 1
                    if size == 0:
                        break
                    nxt += g2.standard_exponential() / (tot1 * size)
                if size == 0:
                    continue
                if size >= clone_cutoff:
                    z1_agg += size
                else:
                    keep_size.append(size)
                    keep_next.append(nxt)
            clone_size = keep_size
            clone_next = keep_next

        # aggregate resistant leg
        if z1_agg > 0:
            z1_agg = _leap(g2, z1_agg, r1, d1, h, max_halvings)
            if 0 < z1_agg < clone_cutoff:
                clone_size.append(z1_agg)
                clone_next.append(
                    step_end + g2.standard_exponential() / (tot1 * z1_agg))
                z1_agg = 0

        t = step_end
        z1 = z1_agg + sum(clone_size)
        total = z0 + z1

        if xi is None and z1 >= z0:
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
            if thin <= 1 or n_steps % thin == 0:
                times.append(t)
                rz0.append(z0)
                rz1.append(z1)
        elif rec_z1 and z1 != prev_z1:
            times.append(t)
            rz0.append(z0)
            rz1.append(z1)
        prev_z1 = z1

        if total == 0:
            stop = STOP_TOTAL
            while pk < n_probes and probes[pk] <= horizon:
                pz0[pk] = 0
                pz1[pk] = 0
                pk += 1
            break
        if stop_on_sensitive and z0 == 0:
            stop = STOP_SENSITIVE
            break
        if total >= rebound_level and z1 > z0:
            stop = STOP_REBOUND
            break

    final_time = t
    final_z0 = z0
    final_z1 = z1_agg + sum(clone_size)

    if tx is None and z0 > 0 and resolve_extinction and stop != STOP_HORIZON:
        tc, zc, exact_c, next_c = t, z0, z0_exact, next0
        while zc > 0 and tc < horizon:
            se = min(tc + h_base, horizon)
            hh = se - tc
            if not exact_c:
                zc = _leap(g0, zc, r0, d0, hh, max_halvings)
                if zc <= z0_exact_threshold:
                    exact_c = True
                    next_c = -1.0
                if zc == 0 and tx is None:
                    tx = se
            else:
                if next_c < 0.0:
                    next_c = tc + g0.standard_exponential() / (tot0 * zc)
                while zc > 0 and next_c <= se:
                    ev_t = next_c
                    u = g0.random()
                    if u * tot0 < r0:
                        zc += 1
                    else:
                        zc -= 1
                    if zc > 0:
                        next_c = ev_t + g0.standard_exponential() / (tot0 * zc)
                    else:
                        tx = ev_t
            tc = se

    return {
        "times": times, "z0": rz0, "z1": rz1,
        "t_extinct_sensitive": tx,
        "crossover": xi, "crossover_escaped": escaped,
        "tau_first": tau_first, "tau_last": tau_last, "min_total": min_total,
        "stop_reason": stop,
        "final_time": final_time, "final_z0": final_z0, "final_z1": final_z1,
        "probe_filled": pk, "probe_z0": pz0, "probe_z1": pz1,
        "n_mutations": n_mut,
    }


def clone_kernel(r1, d1, size_cap, horizon, g2):
    """One resistant lineage from a single cell until extinction, the size
    cap, or the horizon.  Returns (final_size, final_time, hit_cap)."""
    tot1 = r1 + d1
    size = 1
    t = g2.standard_exponential() / tot1
    while t <= horizon:
        u = g2.random()
        if u * tot1 < r1:
            size += 1
        else:
            size -= 1
        if size == 0:
            return 0, t, False
        if size >= size_cap:
            return size, t, True
        t += g2.standard_exponential() / (tot1 * size)
    return size, horizon, False
