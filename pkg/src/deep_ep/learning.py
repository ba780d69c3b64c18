"""Weight and bias updates: the trajectory-integrated DEEP rule and its one-step baseline."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import PhaseTrajectory
from .network import Hyperparams, Network

__all__ = ["ParameterUpdate", "deep_update", "asym_ep_update", "apply_update"]


@dataclass
class ParameterUpdate:
    d_weights: np.ndarray
    d_bias: np.ndarray


def _bias_slots(net: Network) -> np.ndarray:
    slots = net.bias_mask.copy()
    slots[: net.n_input] = False
    return slots


def deep_update(second_phase: PhaseTrajectory | np.ndarray, net: Network,
                difference: str = "backward") -> ParameterUpdate:
    """Average of ``s_i(m) * (s_j(m) - s_j(m-1))`` along the nudged phase.

    Row 0 of the trajectory is the free equilibrium. Biases use a presynaptic
    activity of one. ``difference="forward"`` pairs each increment with the
    presynaptic state at the start of the step, ``s_i(m-1)``, instead.
    """
    states = second_phase.states if isinstance(second_phase, PhaseTrajectory) else np.asarray(second_phase)
    if states.ndim != 2 or len(states) < 2:
        raise ValueError("need at least two recorded states to integrate the learning rule")
    m_beta = len(states) - 1
    increments = np.diff(states, axis=0)
    if difference == "backward":
        pre = states[1:]
    elif difference == "forward":
        pre = states[:-1]
    else:
        raise ValueError(f"difference must be 'backward' or 'forward', got {difference!r}")
    d_weights = pre.T @ increments / m_beta
    d_bias = increments.sum(axis=0) / m_beta
    return ParameterUpdate(np.where(net.mask, d_weights, 0.0), np.where(_bias_slots(net), d_bias, 0.0))


def asym_ep_update(s0, s_beta, net: Network) -> ParameterUpdate:
    """One-step rule ``s0_i * (s_beta_j - s0_j)`` of asymmetric EP."""
    s0 = np.asarray(s0, dtype=float)
    s_beta = np.asarray(s_beta, dtype=float)
    if s0.shape != s_beta.shape or s0.shape != (net.n_total,):
        raise ValueError(f"state shapes {s0.shape} and {s_beta.shape} do not match a {net.n_total}-neuron network")
    diff = s_beta - s0
    return ParameterUpdate(np.where(net.mask, np.outer(s0, diff), 0.0),
                           np.where(_bias_slots(net), diff, 0.0))


def apply_update(net: Network, upd: ParameterUpdate, hp: Hyperparams) -> Network:
    """Gradient-like step with l1 shrinkage, ``W += lr * dW - lr * l1 * sign(W)``.

    Absent parameters stay at zero.
    """
    lr, l1 = hp.learning_rate, hp.l1_coeff
    weights = net.weights + lr * upd.d_weights - lr * l1 * np.sign(net.weights)
    bias = net.bias + lr * upd.d_bias - lr * l1 * np.sign(net.bias)
    return Network(np.where(net.mask, weights, 0.0), np.where(net.bias_mask, bias, 0.0),
                   net.mask.copy(), net.bias_mask.copy(), net.roles)
