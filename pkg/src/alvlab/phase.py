"""Analytic mean-field layer: effective payoffs, critical entanglement
angles, the phase boundary, and the phase-diagram sweep.

The effective 3x3 payoff matrix (payoffs as a function of the population
mix) is the closed form of what the quantum circuit computes pair by pair;
`tests` and `cli payoffs` hold the two routes against each other.
"""

from __future__ import annotations

import json
import math
import multiprocessing
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import dynamics
from ._kernels import STATUS_CONVERGED, impl
from .quantum import PayoffTable

PI_4 = math.pi / 4


@dataclass(frozen=True)
class GameFamily:
    """One-parameter dilemma family T = 1 + r, R = 1, P = 0, S = -r.

    This family pins the two critical angles onto each other (T - P = R - S
    for every r), which is what makes the clean stability exchange between
    the D and Q vertices possible.
    """

    r: float

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError(f"r must be positive, got {self.r}")

    @property
    def table(self) -> PayoffTable:
        return PayoffTable(T=1.0 + self.r, R=1.0, P=0.0, S=-self.r)


def mixing_weight(gamma: float) -> float:
    """The entanglement mixing weight cos^2(gamma)."""
    return math.cos(gamma) ** 2


def effective_payoff_matrix(table: PayoffTable, gamma: float) -> np.ndarray:
    """Analytic payoff matrix in strategy order (C, D, Q).

    Entries against a Q opponent (and Q's own row) interpolate between the
    classical payoffs with weight cos^2(gamma); at gamma = 0 the Q strategy
    is payoff-identical to C.
    """
    lam = mixing_weight(gamma)
    t, r, p, s = table.T, table.R, table.P, table.S
    r_lam = r * lam + p * (1.0 - lam)
    t_lam = t * lam + s * (1.0 - lam)
    s_lam = s * lam + t * (1.0 - lam)
    return np.array([
        [r, s, r_lam],
        [t, p, t_lam],
        [r_lam, s_lam, r],
    ])


def meanfield_payoffs(rho, table: PayoffTable, gamma: float) -> np.ndarray:
    """Per-strategy payoffs (P_C, P_D, P_Q) in the well-mixed population."""
    return effective_payoff_matrix(table, gamma) @ np.asarray(rho, dtype=float)


def meanfield_dynamics(table: PayoffTable, gamma: float) -> dynamics.MatrixDynamics:
    """Payoff closure for the ALV integrator (kernel fast path applies)."""
    return dynamics.MatrixDynamics(effective_payoff_matrix(table, gamma))


class CriticalGammas(NamedTuple):
    gamma_star_1: float  # gamma above this stabilizes the all-Q vertex
    gamma_star_2: float  # gamma below this stabilizes the all-D vertex


def critical_gammas(table: PayoffTable) -> CriticalGammas:
    """The two critical entanglement angles, both in [0, pi/2].

    gamma_star_1 = arccos sqrt((R-S)/(T-S)),
    gamma_star_2 = arccos sqrt((T-P)/(T-S)).
    They coincide exactly when T - P = R - S.
    """
    span = table.T - table.S
    g1 = math.acos(math.sqrt((table.R - table.S) / span))
    g2 = math.acos(math.sqrt((table.T - table.P) / span))
    return CriticalGammas(g1, g2)


def critical_condition_gap(table: PayoffTable) -> float:
    """(T - P) - (R - S); zero iff the two critical angles coincide."""
    return (table.T - table.P) - (table.R - table.S)


def phase_boundary_r(gamma_star: float) -> float:
    """Family parameter r* whose critical angle is `gamma_star`:
    r* = (1 - cos^2 g) / (2 cos^2 g - 1). Defined only for gamma_star < pi/4
    (the boundary diverges there)."""
    c2 = math.cos(gamma_star) ** 2
    if gamma_star >= PI_4 or 2.0 * c2 - 1.0 <= 0.0:
        raise ValueError(
            f"phase boundary diverges at gamma = pi/4; got gamma_star = {gamma_star}"
        )
    return (1.0 - c2) / (2.0 * c2 - 1.0)


def boundary_samples(gamma_axis) -> list[dict]:
    """Boundary-curve samples for the in-domain part of a gamma axis.

    Out-of-domain angles (>= pi/4) are omitted; callers can detect the
    truncation by comparing lengths.
    """
    out = []
    for g in np.asarray(gamma_axis, dtype=float):
        if g < PI_4:
            out.append({"gamma": float(g), "r_star": phase_boundary_r(float(g))})
    return out


@dataclass
class PhaseGrid:
    """Equilibrium densities over a (gamma, r) grid of GameFamily games.

    `rho` has shape (len(r_axis), len(gamma_axis), 3); `converged` marks
    cells that reached the equilibrium tolerance before t_end (near-critical
    cells legitimately may not).
    """

    gamma_axis: np.ndarray
    r_axis: np.ndarray
    rho: np.ndarray
    converged: np.ndarray

    def row_crossings(self) -> np.ndarray:
        """Per-r gamma value where rho_Q first crosses 0.5 (linear
        interpolation between grid points; NaN when it never crosses)."""
        out = np.full(len(self.r_axis), np.nan)
        for i in range(len(self.r_axis)):
            q = self.rho[i, :, 2]
            for k in range(len(self.gamma_axis) - 1):
                a, b = q[k] - 0.5, q[k + 1] - 0.5
                if a == 0.0:
                    out[i] = self.gamma_axis[k]
                    break
                if a < 0.0 <= b or a > 0.0 >= b:
                    g0, g1 = self.gamma_axis[k], self.gamma_axis[k + 1]
                    out[i] = g0 + (0.0 - a) * (g1 - g0) / (b - a)
                    break
        return out


def _sweep_cell(args):
    gamma, r, rho0, temp, t_end, dt = args
    matrix = effective_payoff_matrix(GameFamily(r).table, gamma)
    stride = max(1, int(t_end / dt) + 1)  # record only endpoints
    _, rho, status, _, _, _ = impl.integrate_matrix(
        rho0, matrix, temp, t_end, dt, stride,
        dynamics.EQUILIBRIUM_TOL, dynamics.CORRECTION_LIMIT,
    )
    return rho[-1], status == STATUS_CONVERGED


def sweep_phase_diagram(
    gamma_axis,
    r_axis,
    rho0=(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
    temp: float = dynamics.DEFAULT_TEMP,
    t_end: float = dynamics.DEFAULT_T_END,
    dt: float = dynamics.DEFAULT_DT,
    workers: int = 1,
) -> PhaseGrid:
    """Integrate the mean-field dynamics for every (gamma, r) cell.

    Cells are independent; with workers > 1 they are farmed out to a
    process pool. Results are deterministic and independent of the worker
    count (each cell's result lands at its pre-assigned index).
    """
    gamma_axis = np.asarray(gamma_axis, dtype=float)
    r_axis = np.asarray(r_axis, dtype=float)
    if gamma_axis.size == 0 or r_axis.size == 0:
        raise ValueError("gamma_axis and r_axis must be nonempty")
    rho0 = dynamics._validate_simplex(rho0)
    if not np.all(rho0 > 0):
        raise ValueError("sweep initial state must be interior to the simplex")

    tasks = [
        (float(g), float(r), rho0, temp, t_end, dt)
        for r in r_axis
        for g in gamma_axis
    ]
    if workers > 1:
        with multiprocessing.Pool(workers) as pool:
            results = pool.map(_sweep_cell, tasks, chunksize=16)
    else:
        results = [_sweep_cell(t) for t in tasks]

    n_r, n_g = len(r_axis), len(gamma_axis)
    rho = np.empty((n_r, n_g, 3))
    converged = np.empty((n_r, n_g), dtype=bool)
    for idx, (state, ok) in enumerate(results):
        i, k = divmod(idx, n_g)
        rho[i, k] = state
        converged[i, k] = ok
    return PhaseGrid(gamma_axis, r_axis, rho, converged)


def write_phase_csv(path, grid: PhaseGrid) -> None:
    """CSV columns gamma, r, rho_C, rho_D, rho_Q, converged; row-major in
    r then gamma."""
    with open(path, "w", newline="") as f:
        f.write("gamma,r,rho_C,rho_D,rho_Q,converged\n")
        for i, r in enumerate(grid.r_axis):
            for k, g in enumerate(grid.gamma_axis):
                f.write("%.16e,%.16e,%.16e,%.16e,%.16e,%d\n" % (
                    g, r, grid.rho[i, k, 0], grid.rho[i, k, 1],
                    grid.rho[i, k, 2], int(grid.converged[i, k])))


def read_phase_csv(path) -> PhaseGrid:
    """Inverse of `write_phase_csv`."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    gamma_axis = np.unique(data[:, 0])
    r_axis = np.unique(data[:, 1])
    n_r, n_g = len(r_axis), len(gamma_axis)
    if len(data) != n_r * n_g:
        raise ValueError(f"{path}: grid is not complete ({len(data)} rows)")
    rho = data[:, 2:5].reshape(n_r, n_g, 3)
    converged = data[:, 5].reshape(n_r, n_g).astype(bool)
    return PhaseGrid(gamma_axis, r_axis, rho, converged)


def write_boundary_json(path, gamma_axis) -> int:
    """Write the analytic boundary samples for `gamma_axis`; returns the
    number of omitted (out-of-domain) angles."""
    samples = boundary_samples(gamma_axis)
    omitted = len(np.asarray(gamma_axis)) - len(samples)
    payload = {"boundary": samples, "omitted_out_of_domain": omitted}
    with open(path, "w", newline="") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")
    return omitted
