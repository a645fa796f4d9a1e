# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: C twins of the pure-Python functions in `_py`.

Same algorithms, same expression order, same xoshiro256** stream; the two
backends must produce identical output for identical inputs.
"""

from libc.math cimport exp, fabs
from libc.stdint cimport uint64_t, int64_t, int8_t

import numpy as np

STATUS_T_END = 0
STATUS_CONVERGED = 1
STATUS_CORRECTION_BREACH = 2

# C twins of the status codes, visible inside nogil blocks
cdef enum:
    _C_T_END = 0
    _C_CONVERGED = 1
    _C_BREACH = 2

cdef double _INV53 = 1.1102230246251565e-16

cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t _MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t _MIX2 = 0x94D049BB133111EBULL


cdef struct XoshiroState:
    uint64_t s0, s1, s2, s3


cdef inline uint64_t _rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef void _seed_state(XoshiroState* st, uint64_t seed) noexcept nogil:
    cdef uint64_t x = seed
    cdef uint64_t z
    cdef uint64_t words[4]
    cdef int i
    for i in range(4):
        x = x + _GOLDEN
        z = x
        z = (z ^ (z >> 30)) * _MIX1
        z = (z ^ (z >> 27)) * _MIX2
        words[i] = z ^ (z >> 31)
    if words[0] == 0 and words[1] == 0 and words[2] == 0 and words[3] == 0:
        words[0] = _GOLDEN
    st.s0 = words[0]
    st.s1 = words[1]
    st.s2 = words[2]
    st.s3 = words[3]


cdef inline uint64_t _next_u64(XoshiroState* st) noexcept nogil:
    cdef uint64_t result = _rotl(st.s1 * 5, 7) * 9
    cdef uint64_t t = st.s1 << 17
    st.s2 ^= st.s0
    st.s3 ^= st.s1
    st.s1 ^= st.s2
    st.s0 ^= st.s3
    st.s2 ^= t
    st.s3 = _rotl(st.s3, 45)
    return result


cdef inline double _next_double(XoshiroState* st) noexcept nogil:
    return <double>(_next_u64(st) >> 11) * _INV53


cdef inline uint64_t _next_below(XoshiroState* st, uint64_t bound) noexcept nogil:
    cdef uint64_t threshold = (<uint64_t>0 - bound) % bound
    cdef uint64_t r
    while True:
        r = _next_u64(st)
        if r >= threshold:
            return r % bound


cdef inline double _fermi(double p_from, double p_to, double temp) noexcept nogil:
    cdef double x = (p_to - p_from) / temp
    cdef double e
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


cdef inline void _rhs(double r0, double r1, double r2, double* m, double temp,
                      double* f) noexcept nogil:
    cdef double p0 = m[0] * r0 + m[1] * r1 + m[2] * r2
    cdef double p1 = m[3] * r0 + m[4] * r1 + m[5] * r2
    cdef double p2 = m[6] * r0 + m[7] * r1 + m[8] * r2
    cdef double g01 = _fermi(p1, p0, temp) - _fermi(p0, p1, temp)
    cdef double g02 = _fermi(p2, p0, temp) - _fermi(p0, p2, temp)
    cdef double g12 = _fermi(p2, p1, temp) - _fermi(p1, p2, temp)
    f[0] = r0 * (g01 * r1 + g02 * r2)
    f[1] = r1 * (g12 * r2 - g01 * r0)
    f[2] = r2 * (-g02 * r0 - g12 * r1)


def integrate_matrix(rho0, payoff_matrix, double temp, double t_end, double dt,
                     int record_stride, double eq_tol, double corr_limit):
    """See `_py.integrate_matrix`."""
    cdef double m[9]
    flat = np.asarray(payoff_matrix, dtype=np.float64).ravel()
    cdef int i
    for i in range(9):
        m[i] = flat[i]
    cdef double r0 = rho0[0]
    cdef double r1 = rho0[1]
    cdef double r2 = rho0[2]

    cdef long n_full = <long>(t_end / dt + 1e-9)
    cdef double rem = t_end - n_full * dt
    cdef bint has_partial = rem > 1e-12 * max(1.0, t_end)
    cdef long n_steps = n_full + (1 if has_partial else 0)

    cdef long n_rec_max = n_steps // record_stride + 3
    t_out_arr = np.empty(n_rec_max, dtype=np.float64)
    rho_out_arr = np.empty((n_rec_max, 3), dtype=np.float64)
    cdef double[:] t_out = t_out_arr
    cdef double[:, :] rho_out = rho_out_arr
    t_out[0] = 0.0
    rho_out[0, 0] = r0
    rho_out[0, 1] = r1
    rho_out[0, 2] = r2
    cdef long n_rec = 1

    cdef int status = _C_T_END
    cdef double max_corr = 0.0
    cdef double min_density = min(r0, min(r1, r2))
    cdef double max_sum_dev = 0.0
    cdef double t = 0.0

    cdef double a[3]
    cdef double b[3]
    cdef double c[3]
    cdef double d[3]
    cdef double h, hh, sup, mn, corr, s, dev
    cdef long step

    with nogil:
        for step in range(n_steps):
            _rhs(r0, r1, r2, m, temp, a)
            sup = fabs(a[0])
            if fabs(a[1]) > sup:
                sup = fabs(a[1])
            if fabs(a[2]) > sup:
                sup = fabs(a[2])
            if sup < eq_tol:
                status = _C_CONVERGED
                break

            h = dt if step < n_full else rem
            hh = 0.5 * h
            _rhs(r0 + hh * a[0], r1 + hh * a[1], r2 + hh * a[2], m, temp, b)
            _rhs(r0 + hh * b[0], r1 + hh * b[1], r2 + hh * b[2], m, temp, c)
            _rhs(r0 + h * c[0], r1 + h * c[1], r2 + h * c[2], m, temp, d)
            r0 = r0 + h * (a[0] + 2.0 * (b[0] + c[0]) + d[0]) / 6.0
            r1 = r1 + h * (a[1] + 2.0 * (b[1] + c[1]) + d[1]) / 6.0
            r2 = r2 + h * (a[2] + 2.0 * (b[2] + c[2]) + d[2]) / 6.0

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
                status = _C_BREACH
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

    if t_out[n_rec - 1] != t:
        t_out[n_rec] = t
        rho_out[n_rec, 0] = r0
        rho_out[n_rec, 1] = r1
        rho_out[n_rec, 2] = r2
        n_rec += 1

    return (t_out_arr[:n_rec].copy(), rho_out_arr[:n_rec].copy(), status,
            max_corr, min_density, max_sum_dev)


def run_sim(offsets, neighbors, payoff_matrix, double temp, double frac_c,
            double frac_d, long sweeps, object seed, bint average_payoff):
    """See `_py.run_sim`."""
    offsets_arr = np.ascontiguousarray(offsets, dtype=np.int64)
    neighbors_arr = np.ascontiguousarray(neighbors, dtype=np.int64)
    cdef int64_t[:] off = offsets_arr
    cdef int64_t[:] nbr = neighbors_arr
    cdef double m[9]
    flat = np.asarray(payoff_matrix, dtype=np.float64).ravel()
    cdef int k
    for k in range(9):
        m[k] = flat[k]
    cdef long n = off.shape[0] - 1

    cdef XoshiroState st
    _seed_state(&st, <uint64_t>(int(seed) & ((1 << 64) - 1)))

    strat_arr = np.empty(n, dtype=np.int8)
    cdef int8_t[:] strat = strat_arr
    counts_arr = np.empty((sweeps + 1, 3), dtype=np.int64)
    cdef int64_t[:, :] counts = counts_arr

    cdef double t1 = frac_c
    cdef double t2 = frac_c + frac_d
    cdef int64_t cnt[3]
    cnt[0] = 0
    cnt[1] = 0
    cnt[2] = 0
    cdef long node
    cdef double u
    cdef int sv
    cdef long sweep, ev, i, j, lo, hi, lo_j, hi_j, idx
    cdef long deg_i
    cdef int si, sj
    cdef double pi, pj

    with nogil:
        for node in range(n):
            u = _next_double(&st)
            if u < t1:
                sv = 0
            elif u < t2:
                sv = 1
            else:
                sv = 2
            strat[node] = sv
            cnt[sv] += 1
        counts[0, 0] = cnt[0]
        counts[0, 1] = cnt[1]
        counts[0, 2] = cnt[2]

        for sweep in range(sweeps):
            for ev in range(n):
                i = <long>_next_below(&st, <uint64_t>n)
                lo = off[i]
                hi = off[i + 1]
                deg_i = hi - lo
                j = nbr[lo + <long>_next_below(&st, <uint64_t>deg_i)]
                u = _next_double(&st)
                si = strat[i]
                sj = strat[j]
                if si == sj:
                    continue
                pi = 0.0
                for idx in range(lo, hi):
                    pi += m[si * 3 + strat[nbr[idx]]]
                pj = 0.0
                lo_j = off[j]
                hi_j = off[j + 1]
                for idx in range(lo_j, hi_j):
                    pj += m[sj * 3 + strat[nbr[idx]]]
                if average_payoff:
                    pi /= deg_i
                    pj /= hi_j - lo_j
                if u < _fermi(pi, pj, temp):
                    strat[i] = sj
                    cnt[si] -= 1
                    cnt[sj] += 1
            counts[sweep + 1, 0] = cnt[0]
            counts[sweep + 1, 1] = cnt[1]
            counts[sweep + 1, 2] = cnt[2]

    return counts_arr, strat_arr


def er_pair_sample(long n, object threshold, object seed):
    """See `_py.er_pair_sample`."""
    cdef XoshiroState st
    _seed_state(&st, <uint64_t>(int(seed) & ((1 << 64) - 1)))
    cdef uint64_t thr = <uint64_t>(int(threshold) & ((1 << 64) - 1))

    cdef long cap = 1024
    us_arr = np.empty(cap, dtype=np.int64)
    vs_arr = np.empty(cap, dtype=np.int64)
    cdef int64_t[:] us = us_arr
    cdef int64_t[:] vs = vs_arr
    cdef long count = 0
    cdef long i, j

    for i in range(n - 1):
        for j in range(i + 1, n):
            if _next_u64(&st) < thr:
                if count == cap:
                    cap *= 2
                    us_arr = np.resize(us_arr, cap)
                    vs_arr = np.resize(vs_arr, cap)
                    us = us_arr
                    vs = vs_arr
                us[count] = i
                vs[count] = j
                count += 1

    return us_arr[:count].copy(), vs_arr[:count].copy()
