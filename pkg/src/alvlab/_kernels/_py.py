"""Pure-Python kernels: the fallback backend when the compiled extension
is unavailable.

These are the hot loops of the package. `_cy.pyx` carries a line-for-line
C twin of each function; both lanes use the same expression order and the
same xoshiro256** stream, so, given identical inputs, they produce
identical outputs (see tests/test_backend.py).
"""

from __future__ import annotations

from math import ceil, exp, fabs

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV53 = 1.1102230246251565e-16  # 2^-53

STATUS_T_END = 0
STATUS_CONVERGED = 1
STATUS_CORRECTION_BREACH = 2


def _seed_state(seed):
    # splitmix64 expansion, identical to rng.Xoshiro256StarStar
    s = []
    x = seed & MASK64
    for _ in range(4):
        x = (x + _GOLDEN) & MASK64
        z = x
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        s.append(z ^ (z >> 31))
    if not any(s):
        s[0] = _GOLDEN
    return s


def _fermi(p_from, p_to, temp):
    x = (p_to - p_from) / temp
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


def _rhs(r0, r1, r2, m, temp):
    """ALV right-hand side with payoffs m @ rho and Fermi-rule couplings."""
    p0 = m[0] * r0 + m[1] * r1 + m[2] * r2
    p1 = m[3] * r0 + m[4] * r1 + m[5] * r2
    p2 = m[6] * r0 + m[7] * r1 + m[8] * r2
    g01 = _fermi(p1, p0, temp) - _fermi(p0, p1, temp)
    g02 = _fermi(p2, p0, temp) - _fermi(p0, p2, temp)
    g12 = _fermi(p2, p1, temp) - _fermi(p1, p2, temp)
    f0 = r0 * (g01 * r1 + g02 * r2)
    f1 = r1 * (g12 * r2 - g01 * r0)
    f2 = r2 * (-g02 * r0 - g12 * r1)
    return f0, f1, f2


def integrate_matrix(rho0, payoff_matrix, temp, t_end, dt, record_stride,
                     eq_tol, corr_limit):
    """Fixed-step RK4 for the mean-field ALV equation with payoffs M @ rho.

    Returns (t, rho, status, max_correction, min_density, max_sum_dev)
    where `rho` holds the state at t=0, every `record_stride`-th step and
    the final step. Stops early once the sup-norm of the RHS drops below
    `eq_tol` (status CONVERGED) or a simplex repair exceeds `corr_limit`
    (status CORRECTION_BREACH).
    """
    m = [float(v) for v in np.asarray(payoff_matrix, dtype=float).ravel()]
    r0, r1, r2 = (float(x) for x in rho0)

    n_full = int(t_end / dt + 1e-9)
    rem = t_end - n_full * dt
    has_partial = rem > 1e-12 * max(1.0, t_end)
    n_steps = n_full + (1 if has_partial else 0)

    n_rec_max = n_steps // record_stride + 3
    t_out = np.empty(n_rec_max)
    rho_out = np.empty((n_rec_max, 3))
    t_out[0] = 0.0
    rho_out[0, 0] = r0
    rho_out[0, 1] = r1
    rho_out[0, 2] = r2
    n_rec = 1

    status = STATUS_T_END
    max_corr = 0.0
    min_density = min(r0, r1, r2)
    max_sum_dev = 0.0
    t = 0.0

    for step in range(n_steps):
        a0, a1, a2 = _rhs(r0, r1, r2, m, temp)
        sup = max(fabs(a0), fabs(a1), fabs(a2))
        if sup < eq_tol:
            status = STATUS_CONVERGED
            break

        h = dt if step < n_full else rem
        hh = 0.5 * h
        b0, b1, b2 = _rhs(r0 + hh * a0, r1 + hh * a1, r2 + hh * a2, m, temp)
        c0, c1, c2 = _rhs(r0 + hh * b0, r1 + hh * b1, r2 + hh * b2, m, temp)
        d0, d1, d2 = _rhs(r0 + h * c0, r1 + h * c1, r2 + h * c2, m, temp)
        r0 = r0 + h * (a0 + 2.0 * (b0 + c0) + d0) / 6.0
        r1 = r1 + h * (a1 + 2.0 * (b1 + c1) + d1) / 6.0
        r2 = r2 + h * (a2 + 2.0 * (b2 + c2) + d2) / 6.0

        # simplex repair: clamp negatives, renormalize, track worst case
        mn = r0
        if r1 < mn:
            mn = r1
        if r2 < mn:
            mn = r2
        if mn < min_density:
            min_density = mn
        corr = 0.0
        if r0 < 0.0:
            corr = -r0
            r0 = 0.0
        if r1 < 0.0:
            if -r1 > corr:
                corr = -r1
            r1 = 0.0
        if r2 < 0.0:
            if -r2 > corr:
                corr = -r2
            r2 = 0.0
        s = r0 + r1 + r2
        dev = fabs(s - 1.0)
        if dev > max_sum_dev:
            max_sum_dev = dev
        if dev > corr:
            corr = dev
        if corr > max_corr:
            max_corr = corr
        if corr > corr_limit:
            status = STATUS_CORRECTION_BREACH
            t = (step + 1) * dt if step < n_full else t_end
            break
        r0 /= s
        r1 /= s
        r2 /= s

        t = (step + 1) * dt if step < n_full else t_end
        if (step + 1) % record_stride == 0:
            t_out[n_rec] = t
            rho_out[n_rec, 0] = r0
            rho_out[n_rec, 1] = r1
            rho_out[n_rec, 2] = r2
            n_rec += 1

    if n_rec == 0 or t_out[n_rec - 1] != t:
        t_out[n_rec] = t
        rho_out[n_rec, 0] = r0
        rho_out[n_rec, 1] = r1
        rho_out[n_rec, 2] = r2
        n_rec += 1

    return (t_out[:n_rec].copy(), rho_out[:n_rec].copy(), status,
            max_corr, min_density, max_sum_dev)


def run_sim(offsets, neighbors, payoff_matrix, temp, frac_c, frac_d,
            sweeps, seed, average_payoff):
    """Asynchronous Fermi-imitation Monte Carlo on a fixed graph.

    One sweep = N elementary events (draw focal node, draw one of its
    neighbors, focal adopts the neighbor's strategy with Fermi probability
    on their current accumulated payoffs). Strategies are initialized
    i.i.d. from (frac_c, frac_d, 1 - frac_c - frac_d).

    Returns (counts, strategies): counts is int64[(sweeps + 1), 3] with the
    per-strategy population after every sweep (row 0 = initial), and
    `strategies` the final int8 per-node labels.

    RNG stream order (fixed contract, mirrored by the compiled twin):
    one uniform double per node for initialization, then per event one
    bounded draw for the focal node, one bounded draw for the neighbor
    slot, and one uniform double for the adoption decision.
    """
    offsets = np.asarray(offsets, dtype=np.int64)
    neighbors = np.asarray(neighbors, dtype=np.int64)
    m = [float(v) for v in np.asarray(payoff_matrix, dtype=float).ravel()]
    n = len(offsets) - 1

    s0, s1, s2, s3 = _seed_state(seed)
    mask = MASK64

    def next_u64():
        nonlocal s0, s1, s2, s3
        x = (s1 * 5) & mask
        result = ((((x << 7) | (x >> 57)) & mask) * 9) & mask
        tt = (s1 << 17) & mask
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= tt
        s3 = ((s3 << 45) | (s3 >> 19)) & mask
        return result

    def next_below(bound):
        threshold = ((1 << 64) - bound) % bound
        while True:
            r = next_u64()
            if r >= threshold:
                return r % bound

    strat = np.empty(n, dtype=np.int8)
    t1 = frac_c
    t2 = frac_c + frac_d
    cnt = [0, 0, 0]
    for node in range(n):
        u = (next_u64() >> 11) * _INV53
        if u < t1:
            sv = 0
        elif u < t2:
            sv = 1
        else:
            sv = 2
        strat[node] = sv
        cnt[sv] += 1

    counts = np.empty((sweeps + 1, 3), dtype=np.int64)
    counts[0] = cnt

    strat_l = strat.tolist()
    off_l = offsets.tolist()
    nbr_l = neighbors.tolist()

    for sweep in range(sweeps):
        for _ in range(n):
            i = next_below(n)
            lo = off_l[i]
            deg_i = off_l[i + 1] - lo
            j = nbr_l[lo + next_below(deg_i)]
            u = (next_u64() >> 11) * _INV53
            si = strat_l[i]
            sj = strat_l[j]
            if si == sj:
                continue
            pi = 0.0
            base = si * 3
            for k in range(lo, off_l[i + 1]):
                pi += m[base + strat_l[nbr_l[k]]]
            pj = 0.0
            base = sj * 3
            lo_j = off_l[j]
            hi_j = off_l[j + 1]
            for k in range(lo_j, hi_j):
                pj += m[base + strat_l[nbr_l[k]]]
            if average_payoff:
                pi /= deg_i
                pj /= hi_j - lo_j
            if u < _fermi(pi, pj, temp):
                strat_l[i] = sj
                cnt[si] -= 1
                cnt[sj] += 1
        counts[sweep + 1] = cnt

    return counts, np.asarray(strat_l, dtype=np.int8)


def er_pair_sample(n, threshold, seed):
    """Bernoulli scan over all node pairs (i < j, lexicographic order).

    A pair becomes an edge when the next raw 64-bit draw is < `threshold`
    (integer comparison, so the sample is exactly reproducible). Returns
    (u, v) int64 arrays.
    """
    s0, s1, s2, s3 = _seed_state(seed)
    mask = MASK64
    us = []
    vs = []
    for i in range(n - 1):
        for j in range(i + 1, n):
            x = (s1 * 5) & mask
            r = ((((x << 7) | (x >> 57)) & mask) * 9) & mask
            tt = (s1 << 17) & mask
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= tt
            s3 = ((s3 << 45) | (s3 >> 19)) & mask
            if r < threshold:
                us.append(i)
                vs.append(j)
    return np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64)
