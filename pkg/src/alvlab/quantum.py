"""Entangled two-player game, computed from first principles.

The circuit is: prepare |00>, entangle with J = exp(i(gamma/2) sy x sy),
apply the players' single-qubit strategy unitaries, disentangle with J^dag,
and measure in the computational basis. Payoffs are expectation values of
the classical payoff table over the four outcomes. This module is the
ground truth that the analytic effective-payoff matrix in `phase` is
checked against.

Basis order everywhere: |00>, |01>, |10>, |11>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

GAMMA_MAX = math.pi / 2  # cos^2(gamma) is monotone on [0, pi/2]; see README


class Strategy(IntEnum):
    """The three admissible strategies, with their (theta, phi) angles."""

    C = 0
    D = 1
    Q = 2

    @property
    def angles(self) -> tuple[float, float]:
        return {
            Strategy.C: (0.0, 0.0),
            Strategy.D: (math.pi, 0.0),
            Strategy.Q: (0.0, math.pi / 2),
        }[self]


STRATEGIES = (Strategy.C, Strategy.D, Strategy.Q)


@dataclass(frozen=True)
class PayoffTable:
    """Classical payoffs with the dilemma ordering T > R > P > S."""

    T: float
    R: float
    P: float
    S: float

    def __post_init__(self):
        if not (self.T > self.R > self.P > self.S):
            order = f"T={self.T}, R={self.R}, P={self.P}, S={self.S}"
            raise ValueError(f"payoff ordering T > R > P > S violated: {order}")


def _check_gamma(gamma: float) -> None:
    if not (0.0 <= gamma <= GAMMA_MAX + 1e-12):
        raise ValueError(f"gamma must lie in [0, pi/2], got {gamma}")


# sigma_y tensor sigma_y in the basis order above (real symmetric, squares to I)
SIGMA_YY = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


def entangler(gamma: float) -> np.ndarray:
    """The 4x4 unitary J = exp(i (gamma/2) sy x sy).

    Computed as a genuine matrix exponential through the eigendecomposition
    of the Hermitian generator (eigenvalues are exactly +-1, so this is
    exact to machine precision). J|00> = cos(g/2)|00> - i sin(g/2)|11>.
    """
    _check_gamma(gamma)
    evals, evecs = np.linalg.eigh(SIGMA_YY)
    phases = np.exp(1j * (gamma / 2.0) * evals)
    return (evecs * phases) @ evecs.conj().T


def strategy_unitary(strategy: Strategy) -> np.ndarray:
    """Single-qubit move U(theta, phi) = [[c, s], [-s, c*]]."""
    theta, phi = Strategy(strategy).angles
    c = np.exp(1j * phi) * math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return np.array([[c, s], [-s, np.conj(c)]])


def final_state(gamma: float, strat_a: Strategy, strat_b: Strategy) -> np.ndarray:
    """Post-circuit state J^dag (U_A x U_B) J |00> as 4 amplitudes."""
    j = entangler(gamma)
    moves = np.kron(strategy_unitary(strat_a), strategy_unitary(strat_b))
    psi0 = np.zeros(4, dtype=complex)
    psi0[0] = 1.0
    return j.conj().T @ (moves @ (j @ psi0))


def outcome_probs(state: np.ndarray) -> np.ndarray:
    """Measurement probabilities |<ij|psi>|^2 over the four outcomes."""
    return np.abs(np.asarray(state)) ** 2


def pairwise_payoff(
    gamma: float, table: PayoffTable, strat_a: Strategy, strat_b: Strategy
) -> float:
    """Row player's (A's) expected payoff: R p00 + S p01 + T p10 + P p11.

    B's payoff is obtained by swapping the strategy arguments.
    """
    p = outcome_probs(final_state(gamma, strat_a, strat_b))
    return table.R * p[0] + table.S * p[1] + table.T * p[2] + table.P * p[3]


def payoff_matrix_from_circuit(gamma: float, table: PayoffTable) -> np.ndarray:
    """3x3 row-player payoffs over all strategy pairs, order (C, D, Q)."""
    m = np.empty((3, 3))
    for a in STRATEGIES:
        for b in STRATEGIES:
            m[a, b] = pairwise_payoff(gamma, table, a, b)
    return m
