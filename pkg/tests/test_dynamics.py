import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from deep_ep import (
    DivergenceError,
    Hyperparams,
    Network,
    cost_gradient,
    free_equilibrium,
    hard_sigmoid,
    mse_cost,
    new_complete_network,
    relax,
    vector_field,
)
from deep_ep.analysis import random_certified_network

from conftest import make_network, random_free_network


def reference_relax(net, s, x, y, beta, steps, step_size):
    """Plain loop over vector_field and the clamp, independent of the compiled kernel."""
    p = net.n_input
    s = np.array(s, dtype=float)
    s[:p] = x
    states = [s.copy()]
    for _ in range(steps):
        v = vector_field(net, s, y, beta)
        nxt = s.copy()
        nxt[p:] = [min(1.0, max(0.0, a + step_size * b)) for a, b in zip(s[p:], v[p:])]
        s = nxt
        states.append(s.copy())
    return np.array(states)


@pytest.mark.parametrize("x, expected", [(-0.5, 0.0), (0.3, 0.3), (1.7, 1.0), (0.0, 0.0), (1.0, 1.0)])
def test_hard_sigmoid(x, expected):
    assert hard_sigmoid(x) == expected


def test_mse_cost_values():
    assert mse_cost([0.2, 0.7], [0.2, 0.7]) == 0.0
    assert mse_cost([1.0], [0.0]) == 0.5
    assert mse_cost([1.0, 0.0], [0.0, 1.0]) == 1.0
    with pytest.raises(ValueError):
        mse_cost([1.0, 2.0], [1.0])


def test_cost_gradient_values():
    assert np.array_equal(cost_gradient([0.4, 0.6], [0.4, 0.6]), [0.0, 0.0])
    assert cost_gradient([0.8], [1.0]) == pytest.approx([-0.2], abs=1e-15)
    with pytest.raises(ValueError):
        cost_gradient([1.0], [1.0, 0.0])


@settings(max_examples=100, deadline=None)
@given(arrays(float, 3, elements=st.floats(-2, 2)), arrays(float, 3, elements=st.floats(-2, 2)))
def test_cost_gradient_matches_finite_differences(y_hat, y):
    eps = 1e-6
    fd = np.array([(mse_cost(y_hat + eps * e, y) - mse_cost(y_hat - eps * e, y)) / (2 * eps)
                   for e in np.eye(3)])
    np.testing.assert_allclose(cost_gradient(y_hat, y), fd, rtol=1e-6, atol=1e-8)


def test_vector_field_zero_network():
    net = make_network(np.zeros((3, 3)), "IHO")
    assert np.array_equal(vector_field(net, [0.3, 0.2, 0.9]), np.zeros(3))


def test_vector_field_two_neuron_by_hand():
    net = make_network([[0.0, 1.0], [0.0, 0.0]], "HO")
    np.testing.assert_array_equal(vector_field(net, [1.0, 0.0]), [-1.0, 1.0])


def test_vector_field_nudge_only_touches_outputs():
    net = new_complete_network(5, 2, 1, 0.5, seed=1)
    s = np.array([1.0, 0.0, 0.3, 0.6, 0.8])
    diff = vector_field(net, s, [1.0], beta=0.5) - vector_field(net, s)
    np.testing.assert_allclose(diff, [0, 0, 0, 0, -0.5 * (0.8 - 1.0)], atol=1e-15)


def test_vector_field_conserves_total_rate(rng):
    for _ in range(200):
        net = random_free_network(rng, int(rng.integers(2, 9)))
        total = vector_field(net, rng.uniform(0, 1, net.n_total)).sum()
        assert abs(total) <= 1e-12 * np.abs(net.weights).sum()


def test_relax_matches_reference_loop(rng):
    hp = Hyperparams(step_size=0.1)
    for seed in range(20):
        net = new_complete_network(8, 2, 1, 1.0, seed=seed)
        x = rng.integers(0, 2, 2).astype(float)
        s = rng.uniform(0, 1, 8)
        for beta, y in [(0.0, None), (1.5, np.array([1.0]))]:
            traj = relax(net, s, x, y, beta, 50, hp)
            ref = reference_relax(net, s, x, y, beta, 50, 0.1)
            np.testing.assert_allclose(traj.states, ref, rtol=0, atol=1e-13)


def test_relax_contract(rng):
    net = new_complete_network(8, 2, 1, 2.0, seed=4)
    hp = Hyperparams()
    x = np.array([1.0, 0.0])
    traj = relax(net, rng.uniform(0, 1, 8), x, [1.0], 2.0, 37, hp)
    assert traj.states.shape == (38, 8)
    assert np.all((traj.states >= 0) & (traj.states <= 1))
    assert np.all(traj.states[:, :2] == x)
    assert traj.phase_beta == 2.0
    assert traj.converged_at is None


def test_relax_zero_network_is_constant():
    net = make_network(np.zeros((4, 4)), "IHHO")
    s = np.array([1.0, 0.2, 0.7, 0.4])
    traj = relax(net, s, [1.0], None, 0.0, 10, Hyperparams())
    assert np.all(traj.states == s)


def test_relax_early_stop_pads_trajectory():
    net, x = random_certified_network(5, 1, 1, np.random.default_rng(0))
    hp = Hyperparams(convergence_tol=1e-10)
    traj = relax(net, np.full(5, 0.5), x, None, 0.0, 20000, hp)
    assert traj.converged_at is not None and traj.converged_at < 20000
    assert traj.states.shape == (20001, 5)
    assert np.all(traj.states[traj.converged_at:] == traj.final)


def test_relax_rejects_bad_arguments():
    net = new_complete_network(4, 1, 1, 0.5, seed=0)
    with pytest.raises(ValueError):
        relax(net, np.zeros(4), [1.0], None, 0.0, 0, Hyperparams())
    with pytest.raises(ValueError):
        relax(net, np.zeros(4), [1.0, 0.0], None, 0.0, 5, Hyperparams())


def test_relax_reports_divergence():
    net = new_complete_network(3, 1, 1, 0.5, seed=0)
    # bypass validation to plant an overflow
    net.weights[1, 2] = 1e308
    net.weights[0, 2] = 1e308
    with pytest.raises(DivergenceError) as info:
        relax(net, np.full(3, 1.0), [1.0], None, 0.0, 5, Hyperparams(step_size=1e10))
    assert info.value.step >= 1


def test_free_equilibrium_zero_network():
    net = make_network(np.zeros((4, 4)), "IIHO")
    s0 = free_equilibrium(net, [1.0, 0.0], Hyperparams(state_init=0.5))
    np.testing.assert_array_equal(s0, [1.0, 0.0, 0.5, 0.5])


def test_free_equilibrium_is_deterministic():
    net = new_complete_network(8, 2, 1, 1.0, seed=9)
    hp = Hyperparams()
    assert np.array_equal(free_equilibrium(net, [1, 1], hp), free_equilibrium(net, [1, 1], hp))


def test_certified_equilibrium_is_attracting(rng):
    hp = Hyperparams(step_size=0.1)
    for _ in range(10):
        net, x = random_certified_network(6, 2, 1, rng)
        long = relax(net, np.full(6, 0.5), x, None, 0.0, 20000, hp).final
        s = long.copy()
        s[2:] += rng.uniform(-0.01, 0.01, 4)
        back = relax(net, s, x, None, 0.0, 20000, hp).final
        assert np.max(np.abs(back - long)) < 1e-6
