"""Master-equation oracle tests: state-space enumeration, rate identities,
absorbing states, probability conservation, the exact first-moment
identity, and dominance agreement with the mean-field integrator."""

import numpy as np
import pytest

from alvlab import dynamics
from alvlab.master import (
    ProbabilityLeakError,
    build_generator,
    config_array,
    configurational_rate,
    enumerate_configurations,
    evolve_distribution,
    mean_occupation,
    microscopic_moment_rate,
    numerical_moment_rate,
    point_distribution,
    read_occupation_csv,
    uniform_distribution,
    write_occupation_csv,
)
from alvlab.phase import GameFamily, meanfield_dynamics
from alvlab.quantum import PayoffTable, Strategy
from alvlab.rng import Xoshiro256StarStar

TABLE = GameFamily(1.0).table


def test_enumeration_counts():
    assert len(enumerate_configurations(1)) == 3
    assert len(enumerate_configurations(2)) == 6
    assert len(enumerate_configurations(20)) == 231
    assert len(enumerate_configurations(40)) == 861


def test_enumeration_order_and_totals():
    configs = enumerate_configurations(3)
    assert configs == sorted(configs)  # lexicographic
    assert configs[0] == (0, 0, 3)
    assert configs[-1] == (3, 0, 0)
    assert all(sum(c) == 3 for c in configs)


def test_enumeration_rejects_bad_sizes():
    for n in (0, -1, 41, 2.5, True):
        with pytest.raises(ValueError):
            enumerate_configurations(n)


def test_rate_zero_when_count_zero():
    assert configurational_rate((0, 3, 2), 0, 1, TABLE, 0.5, 0.1) == 0.0
    assert configurational_rate((2, 3, 0), 0, 2, TABLE, 0.5, 0.1) == 0.0


def test_rate_equal_payoffs_half():
    # with gamma=0 the C and Q payoffs are identical, so the Fermi factor
    # between them is exactly 1/2
    n = (1, 0, 1)
    assert configurational_rate(n, 0, 2, TABLE, 0.0, 0.1) == pytest.approx(0.5)
    assert configurational_rate(n, 2, 0, TABLE, 0.0, 0.1) == pytest.approx(0.5)


def test_rate_complementarity():
    # rate(x->y) + rate(y->x) = n_x n_y by Fermi complementarity
    gen = Xoshiro256StarStar(808)
    for _ in range(100):
        n = [gen.next_below(8), gen.next_below(8), gen.next_below(8)]
        if sum(n) == 0 or sum(n) > 40:
            continue
        x, y = 0, 1 + gen.next_below(2)
        gamma = gen.next_double() * 1.5
        total = (configurational_rate(n, x, y, TABLE, gamma, 0.1)
                 + configurational_rate(n, y, x, TABLE, gamma, 0.1))
        assert total == pytest.approx(n[x] * n[y], abs=1e-12)


def test_rate_rejects_same_strategy():
    with pytest.raises(ValueError):
        configurational_rate((1, 1, 1), 1, 1, TABLE, 0.5, 0.1)


def test_generator_columns_sum_to_zero():
    gen = build_generator(8, TABLE, 0.5)
    np.testing.assert_allclose(np.asarray(gen.sum(axis=0)).ravel(), 0.0,
                               atol=1e-12)


def test_monomorphic_states_absorbing():
    n_total = 10
    gen = build_generator(n_total, TABLE, 0.7)
    configs = enumerate_configurations(n_total)
    for mono in ((n_total, 0, 0), (0, n_total, 0), (0, 0, n_total)):
        idx = configs.index(mono)
        assert gen[:, idx].nnz == 0  # zero outflow column
        q = point_distribution(n_total, mono)
        traj = evolve_distribution(q, n_total, TABLE, 0.7, t_end=2.0)
        np.testing.assert_array_equal(traj.q[-1], q)


def test_single_agent_population_stationary():
    q0 = uniform_distribution(1)
    traj = evolve_distribution(q0, 1, TABLE, 0.5, t_end=3.0)
    np.testing.assert_array_equal(traj.q[-1], q0)
    np.testing.assert_allclose(mean_occupation(traj.q[-1], 1),
                               [1 / 3, 1 / 3, 1 / 3], atol=1e-15)


def test_mean_occupation_examples():
    q = point_distribution(12, (12, 0, 0))
    np.testing.assert_allclose(mean_occupation(q, 12), [1, 0, 0], atol=1e-15)
    q0 = point_distribution(20, (7, 7, 6))
    traj = evolve_distribution(q0, 20, TABLE, 0.9, t_end=1e-3)
    np.testing.assert_allclose(traj.mean_trajectory()[0],
                               np.array([7, 7, 6]) / 20, atol=1e-15)


def test_probability_conserved():
    q0 = point_distribution(20, (7, 7, 6))
    for gamma in (0.3, 0.9):
        traj = evolve_distribution(q0, 20, TABLE, gamma, t_end=5.0)
        assert traj.max_sum_deviation <= 1e-9
        assert traj.min_entry >= -1e-12


@pytest.mark.parametrize("n_total,gamma", [(20, 0.3), (20, 0.9), (30, 0.9)])
def test_moment_identity(n_total, gamma):
    # d<n_x>/dt by finite differences must match the expected-rate balance
    counts = (n_total // 3 + (1 if n_total % 3 else 0),
              n_total // 3 + (1 if n_total % 3 > 1 else 0), n_total // 3)
    q0 = point_distribution(n_total, counts)
    traj = evolve_distribution(q0, n_total, TABLE, gamma, t_end=0.4,
                               record_stride=200)
    for idx in (0, len(traj.t) // 2, len(traj.t) - 1):
        q = traj.q[idx]
        micro = microscopic_moment_rate(q, n_total, TABLE, gamma)
        numeric = numerical_moment_rate(q, n_total, TABLE, gamma)
        assert np.max(np.abs(numeric - micro)) < 1e-8


def test_dominance_matches_meanfield():
    # well away from the critical angle the oracle and the ALV integrator
    # must crown the same vertex
    for n_total in (20, 30):
        counts = tuple(int(v) for v in np.array(
            [n_total // 3 + (1 if n_total % 3 else 0),
             n_total // 3 + (1 if n_total % 3 > 1 else 0), n_total // 3]))
        q0 = point_distribution(n_total, counts)
        for gamma in (0.3, 0.9):
            traj = evolve_distribution(q0, n_total, TABLE, gamma, t_end=5.0)
            oracle_winner = int(np.argmax(traj.mean_trajectory()[-1]))
            mf = dynamics.integrate((1 / 3, 1 / 3, 1 / 3),
                                    meanfield_dynamics(TABLE, gamma))
            assert oracle_winner == int(np.argmax(mf.final_state))


def test_dt_too_large_rejected():
    q0 = point_distribution(10, (4, 3, 3))
    with pytest.raises(ValueError):
        evolve_distribution(q0, 10, TABLE, 0.5, t_end=1.0, dt=1.0)


def test_invalid_distributions_rejected():
    with pytest.raises(ValueError):
        evolve_distribution(np.zeros(5), 20, TABLE, 0.5)
    bad = uniform_distribution(5) * 1.5
    with pytest.raises(ValueError):
        evolve_distribution(bad, 5, TABLE, 0.5)
    with pytest.raises(ValueError):
        point_distribution(5, (4, 2, 0))  # sums to 6


def test_occupation_csv_round_trip(tmp_path):
    q0 = point_distribution(12, (4, 4, 4))
    traj = evolve_distribution(q0, 12, TABLE, 0.9, t_end=1.0, record_stride=50)
    path = tmp_path / "occ.csv"
    write_occupation_csv(path, traj)
    t, means = read_occupation_csv(path)
    np.testing.assert_array_equal(t, traj.t)
    np.testing.assert_array_equal(means, traj.mean_trajectory())
    assert path.read_text().splitlines()[0] == "t,mean_C,mean_D,mean_Q"
