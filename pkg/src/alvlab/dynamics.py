"""Anti-symmetric Lotka-Volterra dynamics on the 3-species simplex.

The state is rho = (rho_C, rho_D, rho_Q). Each species i grows at rate
rho_i * sum_j G_ij rho_j where the growth coupling G_ij is the net Fermi
imitation flow from j-players to i-players:

    G_ij = w(j -> i) - w(i -> j) = tanh((P_i - P_j) / (2 temp))

so higher-payoff strategies grow. `net_rate_matrix` returns the opposite
orientation (A_XY > 0 when Y outperforms X, the bookkeeping convention of
the imitation rule); the two are transposes of each other and `alv_rhs`
takes the growth orientation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import STATUS_CONVERGED, STATUS_CORRECTION_BREACH, impl
from .quantum import Strategy

SIMPLEX_TOL = 1e-9
DEFAULT_TEMP = 0.1
DEFAULT_T_END = 1e3
DEFAULT_DT = 1e-2
EQUILIBRIUM_TOL = 1e-10
CORRECTION_LIMIT = 1e-6
DEGENERACY_TOL = 1e-12


class IntegrationError(RuntimeError):
    """Raised when per-step simplex repair exceeds the allowed correction."""


def fermi_rate(p_from: float, p_to: float, temp: float) -> float:
    """Probability that the focal player (payoff `p_from`) adopts the
    reference player's strategy (payoff `p_to`): 1/(1 + exp(-(p_to - p_from)/temp)).

    Overflow-safe for arbitrarily large payoff gaps.
    """
    if temp <= 0:
        raise ValueError(f"selection temperature must be positive, got {temp}")
    x = (p_to - p_from) / temp
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def net_rate_matrix(payoffs, temp: float) -> np.ndarray:
    """Antisymmetric net imitation rates A_XY = w(X->Y) - w(Y->X).

    A_XY > 0 when Y outperforms X; analytically A_XY = tanh((P_Y - P_X)/(2 temp)).
    """
    p = np.asarray(payoffs, dtype=float)
    a = np.zeros((3, 3))
    for x in range(3):
        for y in range(x + 1, 3):
            w_xy = fermi_rate(p[x], p[y], temp)
            w_yx = fermi_rate(p[y], p[x], temp)
            a[x, y] = w_xy - w_yx
            a[y, x] = -a[x, y]
    return a


def growth_matrix(payoffs, temp: float) -> np.ndarray:
    """Growth couplings G_ij = tanh((P_i - P_j)/(2 temp)); transpose of
    `net_rate_matrix` (exactly, by antisymmetry)."""
    return net_rate_matrix(payoffs, temp).T.copy()


def alv_rhs(rho, growth) -> np.ndarray:
    """d(rho)/dt with growth-coupling matrix G: component i is
    rho_i * sum_{j != i} G_ij rho_j. Sums to zero by antisymmetry."""
    r = np.asarray(rho, dtype=float)
    g = np.asarray(growth, dtype=float)
    return r * (g @ r)


@dataclass(frozen=True)
class MatrixDynamics:
    """State-dependent payoff closure P = M @ rho for a fixed 3x3 matrix.

    Trajectories driven by this closure take the compiled fast path in
    `integrate`. Constant payoffs are the special case of a matrix whose
    columns are all equal.
    """

    payoff_matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.payoff_matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"payoff matrix must be 3x3, got shape {m.shape}")
        object.__setattr__(self, "payoff_matrix", m)

    def __call__(self, rho) -> np.ndarray:
        return self.payoff_matrix @ np.asarray(rho, dtype=float)


def constant_payoff_dynamics(payoffs) -> MatrixDynamics:
    """Closure returning the same three payoffs for every state."""
    p = np.asarray(payoffs, dtype=float).reshape(3)
    return MatrixDynamics(np.tile(p[:, None], (1, 3)))


@dataclass
class TrajectoryResult:
    """Recorded trajectory plus the integrator's bookkeeping.

    `min_density` and `max_sum_deviation` are tracked before per-step
    simplex repair, over every step taken (not just recorded ones).
    """

    t: np.ndarray
    rho: np.ndarray
    converged: bool
    reason: str  # "equilibrium" or "t_end"
    max_correction: float
    min_density: float
    max_sum_deviation: float

    @property
    def final_state(self) -> np.ndarray:
        return self.rho[-1]


def _validate_simplex(rho0) -> np.ndarray:
    r = np.asarray(rho0, dtype=float).reshape(3)
    if np.any(r < -SIMPLEX_TOL) or abs(r.sum() - 1.0) > SIMPLEX_TOL:
        raise ValueError(f"initial state {r} is not on the simplex")
    r = np.clip(r, 0.0, None)
    return r / r.sum()


def integrate(
    rho0,
    dynamics,
    temp: float = DEFAULT_TEMP,
    t_end: float = DEFAULT_T_END,
    dt: float = DEFAULT_DT,
    record_stride: int = 1,
    eq_tol: float = EQUILIBRIUM_TOL,
) -> TrajectoryResult:
    """Fixed-step RK4 integration of the mean-field ALV equation.

    `dynamics` maps a state to the three strategy payoffs; the coupling
    matrix is recomputed from those payoffs at every RK4 stage. Each step
    is followed by a simplex repair (clamp tiny negatives, renormalize);
    the run aborts with IntegrationError when a repair exceeds 1e-6,
    the signature of a too-large step. Integration stops early once
    ||d(rho)/dt||_inf < `eq_tol`.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end < 0:
        raise ValueError(f"t_end must be nonnegative, got {t_end}")
    if record_stride < 1:
        raise ValueError(f"record_stride must be >= 1, got {record_stride}")
    if temp <= 0:
        raise ValueError(f"selection temperature must be positive, got {temp}")
    r = _validate_simplex(rho0)

    if isinstance(dynamics, np.ndarray):
        dynamics = MatrixDynamics(dynamics)

    if isinstance(dynamics, MatrixDynamics):
        t, rho, status, max_corr, min_density, max_sum_dev = impl.integrate_matrix(
            r, dynamics.payoff_matrix, temp, t_end, dt, record_stride,
            eq_tol, CORRECTION_LIMIT,
        )
    else:
        t, rho, status, max_corr, min_density, max_sum_dev = _integrate_generic(
            r, dynamics, temp, t_end, dt, record_stride, eq_tol, CORRECTION_LIMIT,
        )

    if status == STATUS_CORRECTION_BREACH:
        raise IntegrationError(
            f"simplex correction {max_corr:.3e} exceeded {CORRECTION_LIMIT:.0e} "
            f"at t={t[-1]:.6g}; reduce dt"
        )
    converged = status == STATUS_CONVERGED
    return TrajectoryResult(
        t=t, rho=rho, converged=converged,
        reason="equilibrium" if converged else "t_end",
        max_correction=max_corr, min_density=min_density,
        max_sum_deviation=max_sum_dev,
    )


def _integrate_generic(r, payoff_fn, temp, t_end, dt, record_stride, eq_tol,
                       corr_limit):
    """RK4 loop for arbitrary payoff closures (the fast path in `_kernels`
    covers the MatrixDynamics case)."""

    def rhs(state):
        p = np.asarray(payoff_fn(state), dtype=float)
        g01 = fermi_rate(p[1], p[0], temp) - fermi_rate(p[0], p[1], temp)
        g02 = fermi_rate(p[2], p[0], temp) - fermi_rate(p[0], p[2], temp)
        g12 = fermi_rate(p[2], p[1], temp) - fermi_rate(p[1], p[2], temp)
        return np.array([
            state[0] * (g01 * state[1] + g02 * state[2]),
            state[1] * (g12 * state[2] - g01 * state[0]),
            state[2] * (-g02 * state[0] - g12 * state[1]),
        ])

    n_full = int(t_end / dt + 1e-9)
    rem = t_end - n_full * dt
    has_partial = rem > 1e-12 * max(1.0, t_end)
    n_steps = n_full + (1 if has_partial else 0)

    t_rec = [0.0]
    rho_rec = [r.copy()]
    status = 0
    max_corr = 0.0
    min_density = float(r.min())
    max_sum_dev = 0.0
    t = 0.0

    for step in range(n_steps):
        k1 = rhs(r)
        if np.abs(k1).max() < eq_tol:
            status = STATUS_CONVERGED
            break
        h = dt if step < n_full else rem
        k2 = rhs(r + (0.5 * h) * k1)
        k3 = rhs(r + (0.5 * h) * k2)
        k4 = rhs(r + h * k3)
        r = r + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)

        mn = float(r.min())
        if mn < min_density:
            min_density = mn
        corr = max(0.0, -mn)
        r = np.clip(r, 0.0, None)
        s = r.sum()
        dev = abs(s - 1.0)
        max_sum_dev = max(max_sum_dev, dev)
        corr = max(corr, dev)
        max_corr = max(max_corr, corr)
        t = (step + 1) * dt if step < n_full else t_end
        if corr > corr_limit:
            status = STATUS_CORRECTION_BREACH
            break
        r = r / s

        if (step + 1) % record_stride == 0:
            t_rec.append(t)
            rho_rec.append(r.copy())

    if t_rec[-1] != t:
        t_rec.append(t)
        rho_rec.append(r.copy())

    return (np.asarray(t_rec), np.asarray(rho_rec), status, max_corr,
            min_density, max_sum_dev)


def vertex_jacobian_eigenvalues(growth, vertex: int) -> np.ndarray:
    """Eigenvalues {0, G_ji, G_ki} of the linearization at simplex vertex i.

    The zero eigenvalue reflects the conserved total density; the signs of
    the other two (growth rates of the absent species against the resident)
    decide stability.
    """
    g = np.asarray(growth, dtype=float)
    others = [m for m in range(3) if m != vertex]
    return np.array([0.0, g[others[0], vertex], g[others[1], vertex]])


@dataclass
class FixedPointReport:
    vertex: Strategy
    eigenvalues: np.ndarray = field(repr=False)
    classification: str  # stable | unstable | saddle | degenerate


def classify_fixed_points(payoff_fn, temp: float = DEFAULT_TEMP,
                          tol: float = DEGENERACY_TOL) -> list[FixedPointReport]:
    """Stability labels for the three vertex fixed points.

    Payoffs are evaluated with the population concentrated at each vertex;
    both nonzero eigenvalues negative -> stable, both positive -> unstable,
    mixed -> saddle. Ties within `tol` of zero are reported as degenerate
    rather than guessing an order.
    """
    reports = []
    for vertex in (Strategy.C, Strategy.D, Strategy.Q):
        rho = np.zeros(3)
        rho[vertex] = 1.0
        payoffs = np.asarray(payoff_fn(rho), dtype=float)
        g = growth_matrix(payoffs, temp)
        eigs = vertex_jacobian_eigenvalues(g, int(vertex))
        e1, e2 = eigs[1], eigs[2]
        if abs(e1) < tol or abs(e2) < tol:
            label = "degenerate"
        elif e1 < 0 and e2 < 0:
            label = "stable"
        elif e1 > 0 and e2 > 0:
            label = "unstable"
        else:
            label = "saddle"
        reports.append(FixedPointReport(vertex, eigs, label))
    return reports


def write_trajectory_csv(path, result: TrajectoryResult) -> None:
    """CSV columns t, rho_C, rho_D, rho_Q (17 significant digits, LF)."""
    with open(path, "w", newline="") as f:
        f.write("t,rho_C,rho_D,rho_Q\n")
        for i in range(len(result.t)):
            f.write("%.16e,%.16e,%.16e,%.16e\n" % (
                result.t[i], result.rho[i, 0], result.rho[i, 1], result.rho[i, 2]))


def read_trajectory_csv(path):
    """Inverse of `write_trajectory_csv`; returns (t, rho)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1:4]
