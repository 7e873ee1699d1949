"""Compiled slot loops.

Same slot order as the reference engine: transmit draws, jam decision,
outcome, observation updates, end-of-slot rule. All state lives in arrays
owned by ``engine.Simulator``; the loops advance it in place and fill the
per-slot output columns.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV_2_53 = 1.0 / 9007199254740992.0

IDLE, SUCCESS, COLLISION, JAMMED = 0, 1, 2, 3
NO_JAM, BUSY_PROB, BUSY_DET, IDLE_DET = 0, 1, 2, 3


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def uniform_at(key, counter):
    z = _mix64(key + np.uint64(counter + 1) * _GOLDEN)
    return np.float64(z >> _S11) * _INV_2_53


@njit(cache=True, inline="always")
def _jam(strategy, active, ring, budget, cap, coin, one_minus_eps):
    # Jams in the window ending at this slot, once the oldest flag drops out.
    if budget[1] - ring[budget[0]] >= cap:
        return False
    if strategy == BUSY_DET:
        return active
    if strategy == IDLE_DET:
        return not active
    if strategy == BUSY_PROB:
        return active and coin < one_minus_eps
    return False


@njit(cache=True, inline="always")
def _slide(ring, budget, jam):
    # budget = [pos, jam_count]
    pos = budget[0]
    if ring[pos]:
        budget[1] -= 1
    ring[pos] = jam
    if jam:
        budget[1] += 1
    pos += 1
    if pos == ring.shape[0]:
        pos = 0
    budget[0] = pos


@njit(cache=True, inline="always")
def _classify(ntx, jam):
    if jam:
        return JAMMED
    if ntx == 0:
        return IDLE
    if ntx == 1:
        return SUCCESS
    return COLLISION


@njit(cache=True)
def antijam_steps(
    t0, steps, keys, adv_key,
    p, c, T, last_idle, tx, successes,
    ring, budget, cap, strategy, one_minus_eps,
    growth, p_hat, frozen,
    out_ntx, out_sender, out_jam, out_outcome, out_cum,
):
    n = p.shape[0]
    for i in range(steps):
        t = t0 + i
        cum = 0.0
        for v in range(n):
            cum += p[v]
        ntx = 0
        sender = -1
        for v in range(n):
            send = uniform_at(keys[v], t) < p[v]
            tx[v] = send
            if send:
                ntx += 1
                sender = v
        active = ntx > 0
        jam = _jam(strategy, active, ring, budget, cap, uniform_at(adv_key, t), one_minus_eps)
        _slide(ring, budget, jam)
        outcome = _classify(ntx, jam)
        if outcome != SUCCESS:
            sender = -1
        else:
            successes[sender] += 1

        out_ntx[i] = ntx
        out_sender[i] = sender
        out_jam[i] = jam
        out_outcome[i] = outcome
        out_cum[i] = cum
        if frozen:
            continue

        if outcome == SUCCESS:
            bp = p[sender]
            bc = c[sender]
            bT = T[sender]
        else:
            bp = 0.0
            bc = 0
            bT = 0
        for v in range(n):
            if not tx[v]:
                if outcome == IDLE:
                    p[v] = min(growth * p[v], p_hat)
                    T[v] = max(1, T[v] - 1)
                    last_idle[v] = t
                elif outcome == SUCCESS:
                    p[v] = bp / growth
                    c[v] = bc
                    T[v] = bT
            cv = c[v] + 1
            if cv <= T[v]:
                c[v] = cv
            else:
                c[v] = 1
                if not (last_idle[v] >= 0 and t - last_idle[v] < T[v]):
                    p[v] = p[v] / growth
                    T[v] = T[v] + 2


@njit(cache=True)
def dcf_steps(
    t0, steps, keys, adv_key,
    cw, backoff, draws, tx, successes,
    ring, budget, cap, strategy, one_minus_eps,
    cw_min, cw_max,
    out_ntx, out_sender, out_jam, out_outcome,
):
    n = cw.shape[0]
    for i in range(steps):
        t = t0 + i
        ntx = 0
        sender = -1
        for v in range(n):
            send = backoff[v] == 0
            tx[v] = send
            if send:
                ntx += 1
                sender = v
        active = ntx > 0
        jam = _jam(strategy, active, ring, budget, cap, uniform_at(adv_key, t), one_minus_eps)
        _slide(ring, budget, jam)
        outcome = _classify(ntx, jam)
        if outcome != SUCCESS:
            sender = -1
        else:
            successes[sender] += 1

        out_ntx[i] = ntx
        out_sender[i] = sender
        out_jam[i] = jam
        out_outcome[i] = outcome

        for v in range(n):
            if tx[v]:
                if outcome == SUCCESS:
                    w = cw_min
                else:
                    w = min(2 * cw[v] + 1, cw_max)
                cw[v] = w
                backoff[v] = np.int64(uniform_at(keys[v], draws[v]) * (w + 1))
                draws[v] += 1
            elif outcome == IDLE and backoff[v] > 0:
                backoff[v] -= 1


@njit(cache=True)
def uniform_block(key, start, count):
    out = np.empty(count, dtype=np.float64)
    for i in range(count):
        out[i] = uniform_at(key, start + i)
    return out
