"""Boltzmann pruning lottery over each neuron's incoming parameters."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Hyperparams, Network

__all__ = ["PruneEvent", "incoming_parameters", "prune_probabilities", "prune_step"]


@dataclass(frozen=True)
class PruneEvent:
    """One removed parameter. ``source is None`` denotes the bias."""

    target: int
    source: int | None
    weight_value: float
    probability: float
    epoch: int = 0
    example_index: int = 0


def incoming_parameters(net: Network, j: int) -> tuple[list[int | None], np.ndarray]:
    """Sources and values of the parameters still feeding neuron ``j``.

    Weights come first in source order, then the bias (source ``None``).
    """
    sources: list[int | None] = [int(i) for i in np.flatnonzero(net.mask[:, j])]
    values = [net.weights[i, j] for i in sources]
    if net.bias_mask[j]:
        sources.append(None)
        values.append(net.bias[j])
    return sources, np.asarray(values, dtype=float)


def _boltzmann(values: np.ndarray, temperature: float) -> np.ndarray:
    if values.size == 0:
        return values
    energy = np.abs(values) / temperature
    # shift by the minimum for overflow safety; the ratio is unchanged
    weights = np.exp(-(energy - energy.min()))
    return weights / weights.sum()


def prune_probabilities(net: Network, j: int, temperature: float) -> np.ndarray:
    """``exp(-|W_ij|/T)`` normalized over neuron ``j``'s present incoming parameters."""
    if j < net.n_input:
        raise ValueError(f"neuron {j} is an input neuron")
    if not temperature > 0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    _, values = incoming_parameters(net, j)
    return _boltzmann(values, temperature)


def prune_step(net: Network, hp: Hyperparams, rng: np.random.Generator,
               epoch: int = 0, example_index: int = 0) -> tuple[Network, list[PruneEvent]]:
    """Remove sub-threshold parameters at random.

    Every present parameter with ``|value| < hp.lambda_prune`` gets an
    independent uniform draw and is removed when the draw falls below its
    Boltzmann probability. All probabilities are taken from the network as
    it was before this call.
    """
    new = net.copy()
    events: list[PruneEvent] = []
    for j in range(net.n_input, net.n_total):
        sources, values = incoming_parameters(net, j)
        if values.size == 0:
            continue
        probs = _boltzmann(values, hp.temperature)
        for src, value, p in zip(sources, values, probs):
            if abs(value) >= hp.lambda_prune:
                continue
            if rng.random() < p:
                if src is None:
                    new.bias_mask[j] = False
                    new.bias[j] = 0.0
                else:
                    new.mask[src, j] = False
                    new.weights[src, j] = 0.0
                events.append(PruneEvent(j, src, float(value), float(p), epoch, example_index))
    return new, events
