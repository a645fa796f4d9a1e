"""Exact configurational master equation for small well-mixed populations.

The state space is every (n_C, n_D, n_Q) with fixed total N; the dynamics
is the linear ODE dQ/dt = L Q built from imitation rates. This is the
slow-but-exact oracle the mean-field integrator is checked against:
monomorphic states must be absorbing, probability must be conserved, and
the first-moment equation must hold to floating-point accuracy.

Time units carry the raw n_x*n_y combinatorial factor (no 1/N), so
trajectories run ~N times faster than mean-field ones; only which vertex
wins is compared across the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .dynamics import fermi_rate
from .phase import effective_payoff_matrix
from .quantum import PayoffTable, Strategy

N_MAX = 40
SUM_TOL = 1e-9
ENTRY_TOL = 1e-12

# Ordered (from, to) strategy pairs; one transition channel each.
_PAIRS = ((0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1))


class ProbabilityLeakError(RuntimeError):
    """Distribution left the probability simplex beyond tolerance."""


def _check_size(n_total: int) -> int:
    if not isinstance(n_total, (int, np.integer)) or isinstance(n_total, bool):
        raise ValueError(f"population size must be an integer, got {n_total!r}")
    if not 1 <= n_total <= N_MAX:
        raise ValueError(f"population size must be in [1, {N_MAX}], got {n_total}")
    return int(n_total)


@lru_cache(maxsize=None)
def config_array(n_total: int):
    """All configurations (n_C, n_D, n_Q) summing to n_total, lexicographic
    ascending; shape (M, 3) with M = (N+1)(N+2)/2."""
    n_total = _check_size(n_total)
    rows = [
        (nc, nd, n_total - nc - nd)
        for nc in range(n_total + 1)
        for nd in range(n_total - nc + 1)
    ]
    arr = np.array(rows, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def enumerate_configurations(n_total: int) -> list[tuple[int, int, int]]:
    return [tuple(row) for row in config_array(n_total)]


@lru_cache(maxsize=None)
def config_index(n_total: int) -> dict:
    return {tuple(row): i for i, row in enumerate(config_array(n_total))}


def configurational_rate(n, x, y, table: PayoffTable, gamma: float,
                         temp: float) -> float:
    """Total rate of x -> y conversions in configuration n: n_x * w * n_y,
    with the Fermi rate taken on payoffs at the configuration's own
    densities n/N. Zero whenever either count is zero."""
    x, y = int(x), int(y)
    if x == y:
        raise ValueError("source and target strategies must differ")
    n = np.asarray(n, dtype=np.int64)
    if n.shape != (3,) or np.any(n < 0):
        raise ValueError(f"configuration must be 3 nonnegative counts, got {n}")
    if n[x] == 0 or n[y] == 0:
        return 0.0
    n_total = int(n.sum())
    p = effective_payoff_matrix(table, gamma) @ (n / n_total)
    return float(n[x]) * fermi_rate(p[x], p[y], temp) * float(n[y])


def _rate_table(n_total: int, table: PayoffTable, gamma: float,
                temp: float) -> np.ndarray:
    """Per-configuration rates for the six ordered channels, shape (M, 6)."""
    configs = config_array(n_total)
    m = effective_payoff_matrix(table, gamma)
    payoffs = configs / n_total @ m.T  # (M, 3)
    rates = np.empty((len(configs), 6))
    for k, (x, y) in enumerate(_PAIRS):
        w = 1.0 / (1.0 + np.exp(-np.clip(
            (payoffs[:, y] - payoffs[:, x]) / temp, -700.0, 700.0)))
        rates[:, k] = configs[:, x] * w * configs[:, y]
    return rates


def build_generator(n_total: int, table: PayoffTable, gamma: float,
                    temp: float = 0.1) -> sp.csr_matrix:
    """Sparse generator L with dQ/dt = L Q. Columns sum to zero (the
    diagonal is the negated total outflow), so probability is conserved."""
    n_total = _check_size(n_total)
    configs = config_array(n_total)
    index = config_index(n_total)
    rates = _rate_table(n_total, table, gamma, temp)

    rows, cols, vals = [], [], []
    for i, n in enumerate(configs):
        total_out = 0.0
        for k, (x, y) in enumerate(_PAIRS):
            r = rates[i, k]
            if r == 0.0:
                continue
            target = list(n)
            target[x] -= 1
            target[y] += 1
            rows.append(index[tuple(target)])
            cols.append(i)
            vals.append(r)
            total_out += r
        if total_out != 0.0:
            rows.append(i)
            cols.append(i)
            vals.append(-total_out)
    m = len(configs)
    return sp.csr_matrix((vals, (rows, cols)), shape=(m, m))


def point_distribution(n_total: int, n0) -> np.ndarray:
    """All probability on one configuration."""
    n0 = tuple(int(v) for v in n0)
    idx = config_index(n_total)
    if n0 not in idx:
        raise ValueError(f"{n0} is not a size-{n_total} configuration")
    q = np.zeros(len(idx))
    q[idx[n0]] = 1.0
    return q


def uniform_distribution(n_total: int) -> np.ndarray:
    m = len(config_array(n_total))
    return np.full(m, 1.0 / m)


def mean_occupation(q, n_total: int) -> np.ndarray:
    """Expected strategy fractions <n>/N under the distribution."""
    q = np.asarray(q, dtype=float)
    configs = config_array(n_total)
    return (configs.T @ q) / n_total


@dataclass
class DistributionTrajectory:
    """Recorded master-equation evolution. `q` has one row per recorded
    time; `max_sum_deviation` and `min_entry` report the worst simplex
    breaches seen before clamping."""

    t: np.ndarray
    q: np.ndarray
    n_total: int
    max_sum_deviation: float
    min_entry: float

    def mean_trajectory(self) -> np.ndarray:
        configs = config_array(self.n_total)
        return (self.q @ configs) / self.n_total


def _validate_distribution(q0, n_total: int) -> np.ndarray:
    q = np.asarray(q0, dtype=float).copy()
    m = len(config_array(n_total))
    if q.shape != (m,):
        raise ValueError(f"distribution must have length {m}, got {q.shape}")
    if np.any(q < -ENTRY_TOL):
        raise ValueError(f"negative probability {q.min()} in initial distribution")
    if abs(q.sum() - 1.0) > SUM_TOL:
        raise ValueError(f"initial distribution sums to {q.sum()}, not 1")
    np.clip(q, 0.0, None, out=q)
    return q


def evolve_distribution(
    q0,
    n_total: int,
    table: PayoffTable,
    gamma: float,
    temp: float = 0.1,
    t_end: float = 5.0,
    dt: float | None = None,
    record_stride: int = 10,
) -> DistributionTrajectory:
    """RK4 integration of dQ/dt = L Q.

    With dt=None the step is set to 0.25/max_outflow, safely inside the
    RK4 stability region (|eigenvalue| <= 2*max_outflow by Gershgorin) and
    keeping every per-step outflow probability below 1.
    """
    n_total = _check_size(n_total)
    q = _validate_distribution(q0, n_total)
    if t_end <= 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if record_stride < 1:
        raise ValueError(f"record_stride must be >= 1, got {record_stride}")

    gen = build_generator(n_total, table, gamma, temp)
    max_outflow = float(-gen.diagonal().min()) if gen.nnz else 0.0
    if dt is None:
        dt = 0.25 / max_outflow if max_outflow > 0.0 else t_end
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if dt * max_outflow >= 1.0:
        raise ValueError(
            f"dt={dt} too large: per-step outflow {dt * max_outflow:.3f} >= 1")

    n_full = int(t_end / dt + 1e-9)
    times = [0.0]
    records = [q.copy()]
    max_dev = abs(q.sum() - 1.0)
    min_entry = float(q.min())

    t = 0.0
    step = 0
    while t < t_end - 1e-12 * max(1.0, t_end):
        h = min(dt, t_end - t) if step >= n_full else dt
        k1 = gen @ q
        k2 = gen @ (q + 0.5 * h * k1)
        k3 = gen @ (q + 0.5 * h * k2)
        k4 = gen @ (q + h * k3)
        q = q + h * (k1 + 2.0 * (k2 + k3) + k4) / 6.0
        t += h
        step += 1

        lo = float(q.min())
        if lo < min_entry:
            min_entry = lo
        if lo < -ENTRY_TOL:
            raise ProbabilityLeakError(
                f"entry {lo} below -{ENTRY_TOL} at t={t}")
        np.clip(q, 0.0, None, out=q)
        dev = abs(q.sum() - 1.0)
        if dev > max_dev:
            max_dev = dev
        if dev > SUM_TOL:
            raise ProbabilityLeakError(
                f"probability sum off by {dev} at t={t}")

        if step % record_stride == 0:
            times.append(t)
            records.append(q.copy())

    if times[-1] != t:
        times.append(t)
        records.append(q.copy())
    return DistributionTrajectory(
        t=np.array(times), q=np.array(records), n_total=n_total,
        max_sum_deviation=max_dev, min_entry=min_entry)


def microscopic_moment_rate(q, n_total: int, table: PayoffTable,
                            gamma: float, temp: float = 0.1) -> np.ndarray:
    """d<n_x>/dt assembled from expected channel rates: each x->y event
    moves one count from x to y, so the rate of change of <n_x> is the sum
    of expected inflow rates minus expected outflow rates."""
    q = np.asarray(q, dtype=float)
    rates = _rate_table(n_total, table, gamma, temp)
    expected = q @ rates  # one expectation per ordered channel
    out = np.zeros(3)
    for k, (x, y) in enumerate(_PAIRS):
        out[x] -= expected[k]
        out[y] += expected[k]
    return out


def numerical_moment_rate(q, n_total: int, table: PayoffTable, gamma: float,
                          temp: float = 0.1, h: float = 1e-4) -> np.ndarray:
    """d<n_x>/dt by a five-point central stencil on <n_x>(t), advancing the
    distribution by +-h and +-2h with exact-generator RK4 substeps."""
    q = np.asarray(q, dtype=float)
    gen = build_generator(n_total, table, gamma, temp)
    max_outflow = float(-gen.diagonal().min()) if gen.nnz else 1.0
    configs = config_array(n_total)

    def advance(offset: float) -> np.ndarray:
        # substeps keep |eigenvalue * step| small so flow error stays far
        # below the stencil's own truncation error
        n_sub = max(1, math.ceil(abs(offset) * max_outflow / 0.2))
        step = offset / n_sub
        v = q
        for _ in range(n_sub):
            k1 = gen @ v
            k2 = gen @ (v + 0.5 * step * k1)
            k3 = gen @ (v + 0.5 * step * k2)
            k4 = gen @ (v + step * k3)
            v = v + step * (k1 + 2.0 * (k2 + k3) + k4) / 6.0
        return (configs.T @ v).astype(float)

    f_m2, f_m1 = advance(-2.0 * h), advance(-h)
    f_p1, f_p2 = advance(h), advance(2.0 * h)
    return (f_m2 - 8.0 * f_m1 + 8.0 * f_p1 - f_p2) / (12.0 * h)


def write_occupation_csv(path, traj: DistributionTrajectory) -> None:
    """CSV columns t, mean_C, mean_D, mean_Q."""
    means = traj.mean_trajectory()
    with open(path, "w", newline="") as f:
        f.write("t,mean_C,mean_D,mean_Q\n")
        for i in range(len(traj.t)):
            f.write("%.16e,%.16e,%.16e,%.16e\n" % (
                traj.t[i], means[i, 0], means[i, 1], means[i, 2]))


def read_occupation_csv(path):
    """Inverse of `write_occupation_csv` -> (t, means)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1:4]
