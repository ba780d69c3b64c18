import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deep_ep import Hyperparams, incoming_parameters, new_complete_network, prune_probabilities, prune_step

from conftest import make_network


def direct_probabilities(values, temperature):
    terms = [math.exp(-abs(v) / temperature) for v in values]
    return [t / sum(terms) for t in terms]


def test_equal_magnitudes_are_uniform():
    net = make_network([[0, 0, 0.2], [0, 0, -0.2], [0, 0, 0]], "IHO", bias=[0, 0, 0.2])
    np.testing.assert_allclose(prune_probabilities(net, 2, 0.1), [1 / 3] * 3, rtol=1e-15)


def test_two_weights_by_hand():
    t = 0.1
    net = make_network([[0, 0, 1e-300], [0, 0, t * math.log(2)], [0, 0, 0]], "IHO")
    np.testing.assert_allclose(prune_probabilities(net, 2, t), [2 / 3, 1 / 3], rtol=1e-12)


def test_high_temperature_approaches_uniform():
    net = new_complete_network(6, 2, 1, 0.5, seed=0)
    p = prune_probabilities(net, 5, 1e9)
    np.testing.assert_allclose(p, np.full(len(p), 1 / len(p)), rtol=1e-8)


def test_empty_incoming_set():
    net = make_network(np.zeros((3, 3)), "IHO")
    assert prune_probabilities(net, 2, 0.1).size == 0
    with pytest.raises(ValueError):
        prune_probabilities(net, 0, 0.1)


def test_incoming_parameters_order():
    net = new_complete_network(5, 2, 1, 0.5, seed=1)
    sources, values = incoming_parameters(net, 3)
    assert sources == [0, 1, 2, 4, None]
    assert values[-1] == net.bias[3]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 10.0))
def test_probabilities_normalized_and_monotone(seed, temperature):
    net = new_complete_network(8, 2, 1, 1.0, seed=seed)
    for j in range(2, 8):
        _, values = incoming_parameters(net, j)
        p = prune_probabilities(net, j, temperature)
        assert abs(p.sum() - 1.0) <= 1e-12
        np.testing.assert_allclose(p, direct_probabilities(values, temperature), rtol=1e-9, atol=1e-300)
        order = np.argsort(np.abs(values))
        mags = np.abs(values)[order]
        distinct = np.diff(mags) > 1e-9 * temperature
        assert np.all(np.diff(p[order])[distinct] < 0)


def test_nothing_below_threshold_is_a_no_op():
    net = new_complete_network(8, 2, 1, 0.5, seed=2)
    hp = Hyperparams(lambda_prune=1e-9)
    out, events = prune_step(net, hp, np.random.default_rng(0))
    assert out == net and events == []


def test_threshold_and_permanence():
    net = new_complete_network(8, 2, 1, 0.5, seed=3)
    hp = Hyperparams(lambda_prune=0.25, temperature=0.05)
    rng = np.random.default_rng(1)
    for epoch in range(30):
        new, events = prune_step(net, hp, rng, epoch=epoch)
        for ev in events:
            assert abs(ev.weight_value) < hp.lambda_prune
            assert 0 < ev.probability <= 1
        # removals only ever turn the mask off
        assert not np.any(new.mask & ~net.mask)
        assert not np.any(new.bias_mask & ~net.bias_mask)
        assert np.all(new.weights[new.mask] == net.weights[new.mask])
        net = new
    assert np.all(np.abs(net.weights[net.mask]) >= 0.25) or net.mask.sum() < 42


def test_last_remaining_parameter_has_probability_one():
    net = make_network([[0, 0, 0.01], [0, 0, 0], [0, 0, 0]], "IHO")
    out, events = prune_step(net, Hyperparams(lambda_prune=0.05), np.random.default_rng(0))
    assert not out.mask.any() and events[0].probability == 1.0


def test_empirical_removal_rates_match_probabilities():
    weights = np.array([
        [0.0, 0.02, -0.05, 0.01],
        [0.0, 0.0, 0.08, -0.03],
        [0.0, 0.04, 0.0, 0.06],
        [0.0, -0.07, 0.005, 0.0],
    ])
    net = make_network(weights, "IHHO", bias=[0.0, 0.03, -0.01, 0.09])
    hp = Hyperparams(lambda_prune=0.085, temperature=0.02)
    expected = {}
    for j in range(1, 4):
        sources, values = incoming_parameters(net, j)
        for src, v, p in zip(sources, values, direct_probabilities(values, hp.temperature)):
            expected[(src, j)] = p if abs(v) < hp.lambda_prune else 0.0
    counts = dict.fromkeys(expected, 0)
    rng = np.random.default_rng(2024)
    trials = 10_000
    for _ in range(trials):
        _, events = prune_step(net, hp, rng)
        for ev in events:
            counts[(ev.source, ev.target)] += 1
    for key, p in expected.items():
        freq = counts[key] / trials
        if p == 0.0:
            assert counts[key] == 0
        else:
            assert abs(freq - p) <= 3 * math.sqrt(p * (1 - p) / trials), (key, freq, p)
