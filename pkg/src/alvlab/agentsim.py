"""Agent-based Monte Carlo on explicit networks.

Each elementary event picks a focal node, one of its neighbors, and
applies a Fermi imitation of the neighbor's strategy; a step (sweep) is N
events. `mc_step` is the readable single-event reference; `run_experiment`
drives the batch kernel, which consumes the identical RNG stream so the
two routes produce bit-identical trajectories.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from ._kernels import impl
from .dynamics import fermi_rate
from .networks import Network
from .quantum import PayoffTable, payoff_matrix_from_circuit
from .rng import Xoshiro256StarStar, derive_seed

PAYOFF_MODES = ("sum", "average")

# domain tags keeping network-construction seeds and run seeds disjoint
_NET_STREAM = 1
_RUN_STREAM = 2


@dataclass(frozen=True)
class SimParams:
    table: PayoffTable
    gamma: float
    temp: float = 0.1
    steps: int = 10_000
    payoff_mode: str = "sum"
    measure_window: int = 1_000

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if not 1 <= self.measure_window <= self.steps:
            raise ValueError(
                f"measure_window must be in [1, steps], got {self.measure_window}")
        if self.payoff_mode not in PAYOFF_MODES:
            raise ValueError(
                f"payoff_mode must be one of {PAYOFF_MODES}, got {self.payoff_mode!r}")
        if self.temp <= 0:
            raise ValueError(f"temp must be positive, got {self.temp}")

    @cached_property
    def payoff_matrix(self) -> np.ndarray:
        """Pairwise payoffs from the game circuit, row = own strategy."""
        return payoff_matrix_from_circuit(self.gamma, self.table)


@dataclass
class SimState:
    strategies: np.ndarray  # int8 per node
    rng: Xoshiro256StarStar
    rng_seed: int
    step_count: int = 0  # elementary events so far


def _check_fractions(rho0_fractions) -> tuple[float, float]:
    rho0 = np.asarray(rho0_fractions, dtype=float)
    if rho0.shape != (3,) or np.any(rho0 < 0) or abs(rho0.sum() - 1.0) > 1e-9:
        raise ValueError(
            f"initial fractions must be 3 nonnegative values summing to 1, got {rho0_fractions}")
    return float(rho0[0]), float(rho0[1])


def init_state(net: Network, rho0_fractions, seed: int) -> SimState:
    """Strategies drawn i.i.d. from the given fractions, one uniform draw
    per node in node order (the batch kernel draws identically)."""
    frac_c, frac_d = _check_fractions(rho0_fractions)
    rng = Xoshiro256StarStar(seed)
    strategies = np.empty(net.num_nodes, dtype=np.int8)
    for i in range(net.num_nodes):
        u = rng.next_double()
        strategies[i] = 0 if u < frac_c else (1 if u < frac_c + frac_d else 2)
    return SimState(strategies=strategies, rng=rng, rng_seed=seed)


def node_payoff(net: Network, state: SimState, node: int,
                params: SimParams) -> float:
    """Accumulated game payoff of `node` against all its neighbors."""
    m = params.payoff_matrix
    s = state.strategies
    own = s[node]
    total = 0.0
    for nb in net.adjacency[node]:
        total += m[own, s[nb]]
    if params.payoff_mode == "average":
        total /= len(net.adjacency[node])
    return total


def mc_step(net: Network, state: SimState, params: SimParams) -> SimState:
    """One elementary event, mutating and returning `state`.

    Stream contract (shared with the batch kernel): bounded draw for the
    focal node, bounded draw for the neighbor slot, then one uniform for
    the adoption decision, drawn even when it cannot change anything.
    """
    rng = state.rng
    s = state.strategies
    i = rng.next_below(net.num_nodes)
    nbrs = net.adjacency[i]
    j = nbrs[rng.next_below(len(nbrs))]
    u = rng.next_double()
    if s[i] != s[j]:
        p_i = node_payoff(net, state, i, params)
        p_j = node_payoff(net, state, j, params)
        if u < fermi_rate(p_i, p_j, params.temp):
            s[i] = s[j]
    state.step_count += 1
    return state


@dataclass
class ExperimentResult:
    """Per-sweep strategy counts; row 0 is the initial condition."""

    counts: np.ndarray  # (steps+1, 3) int64
    num_nodes: int
    measure_window: int
    final_strategies: np.ndarray

    @property
    def freqs(self) -> np.ndarray:
        return self.counts / self.num_nodes

    @property
    def tail_freqs(self) -> np.ndarray:
        """Mean frequencies over the last measure_window sweeps."""
        return self.freqs[-self.measure_window:].mean(axis=0)


def run_experiment(net: Network, params: SimParams, rho0_fractions,
                   seed: int) -> ExperimentResult:
    """params.steps sweeps on the batch kernel; equivalent event-for-event
    to init_state followed by steps*N calls of mc_step."""
    frac_c, frac_d = _check_fractions(rho0_fractions)
    offsets, flat = net.csr()
    counts, strategies = impl.run_sim(
        offsets, flat, np.ascontiguousarray(params.payoff_matrix),
        params.temp, frac_c, frac_d, params.steps, seed,
        1 if params.payoff_mode == "average" else 0)
    return ExperimentResult(counts=counts, num_nodes=net.num_nodes,
                            measure_window=params.measure_window,
                            final_strategies=strategies)


def _scan_task(args):
    offsets, flat, matrix, temp, frac_c, frac_d, steps, avg, seed, window, n = args
    counts, _ = impl.run_sim(offsets, flat, matrix, temp, frac_c, frac_d,
                             steps, seed, avg)
    return (counts[-window:] / n).mean(axis=0)


@dataclass
class ScanResult:
    gamma_axis: np.ndarray
    tails: np.ndarray        # (n_gamma, replicates, 3) per-replicate tails
    replicates: int
    gamma_hat: float | None  # None means no crossing on the axis

    @property
    def mean(self) -> np.ndarray:
        return self.tails.mean(axis=1)

    @property
    def se(self) -> np.ndarray:
        """Standard error over replicates (zero for a single replicate)."""
        if self.replicates < 2:
            return np.zeros((len(self.gamma_axis), 3))
        return self.tails.std(axis=1, ddof=1) / np.sqrt(self.replicates)


def crossing_gamma(gamma_axis, delta) -> float | None:
    """First upward zero crossing of `delta` (= rho_Q - rho_D) on the axis,
    by linear interpolation; None when the sign never changes."""
    gamma_axis = np.asarray(gamma_axis, dtype=float)
    delta = np.asarray(delta, dtype=float)
    for k in range(len(delta) - 1):
        if delta[k] < 0.0 <= delta[k + 1]:
            g0, g1 = gamma_axis[k], gamma_axis[k + 1]
            return float(g0 - delta[k] * (g1 - g0) / (delta[k + 1] - delta[k]))
    return None


def bifurcation_scan(
    net_builder,
    params: SimParams,
    gamma_axis,
    replicates: int,
    seed: int,
    rho0_fractions=(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
    workers: int = 1,
) -> ScanResult:
    """Tail frequencies versus gamma, averaged over replicate runs.

    `net_builder(seed) -> Network` is called once per replicate (the same
    graph is reused across the whole gamma axis, so the axis sees a matched
    topology); run seeds are derived per (gamma index, replicate). Results
    land at pre-assigned indices, so worker count cannot change them.
    """
    gamma_axis = np.asarray(gamma_axis, dtype=float)
    if len(gamma_axis) < 1 or np.any(np.diff(gamma_axis) <= 0):
        raise ValueError("gamma_axis must be nonempty and strictly increasing")
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    frac_c, frac_d = _check_fractions(rho0_fractions)

    nets = [net_builder(derive_seed(seed, _NET_STREAM, rep))
            for rep in range(replicates)]
    csrs = [net.csr() for net in nets]
    avg = 1 if params.payoff_mode == "average" else 0

    tasks = []
    for gi, gamma in enumerate(gamma_axis):
        matrix = np.ascontiguousarray(
            replace(params, gamma=float(gamma)).payoff_matrix)
        for rep in range(replicates):
            offsets, flat = csrs[rep]
            tasks.append((offsets, flat, matrix, params.temp, frac_c, frac_d,
                          params.steps, avg, derive_seed(seed, _RUN_STREAM, gi, rep),
                          params.measure_window, nets[rep].num_nodes))
    if workers > 1:
        with multiprocessing.Pool(workers) as pool:
            results = pool.map(_scan_task, tasks)
    else:
        results = [_scan_task(t) for t in tasks]

    tails = np.array(results).reshape(len(gamma_axis), replicates, 3)
    mean = tails.mean(axis=1)
    gamma_hat = crossing_gamma(gamma_axis, mean[:, 2] - mean[:, 1])
    return ScanResult(gamma_axis=gamma_axis, tails=tails,
                      replicates=replicates, gamma_hat=gamma_hat)


def write_series_csv(path, result: ExperimentResult) -> None:
    """CSV columns sweep, rho_C, rho_D, rho_Q (row 0 = initial state)."""
    freqs = result.freqs
    with open(path, "w", newline="") as f:
        f.write("sweep,rho_C,rho_D,rho_Q\n")
        for i in range(len(freqs)):
            f.write("%d,%.16e,%.16e,%.16e\n" % (
                i, freqs[i, 0], freqs[i, 1], freqs[i, 2]))


def write_scan_csv(path, scan: ScanResult) -> None:
    """CSV columns gamma, mean_rho_C, mean_rho_D, mean_rho_Q, se_rho_Q,
    replicates."""
    mean, se = scan.mean, scan.se
    with open(path, "w", newline="") as f:
        f.write("gamma,mean_rho_C,mean_rho_D,mean_rho_Q,se_rho_Q,replicates\n")
        for i, g in enumerate(scan.gamma_axis):
            f.write("%.16e,%.16e,%.16e,%.16e,%.16e,%d\n" % (
                g, mean[i, 0], mean[i, 1], mean[i, 2], se[i, 2],
                scan.replicates))


def read_scan_csv(path):
    """-> (gamma_axis, mean (G,3), se_rho_Q (G,), replicates)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1:4], data[:, 4], int(data[0, 5])
