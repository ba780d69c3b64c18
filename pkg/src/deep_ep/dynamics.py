"""Neuronal vector field, cost, and clamped relaxation to equilibrium."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import relax_kernel
from .network import Hyperparams, Network

__all__ = [
    "DivergenceError",
    "PhaseTrajectory",
    "hard_sigmoid",
    "mse_cost",
    "cost_gradient",
    "vector_field",
    "initial_state",
    "relax",
    "free_equilibrium",
]


class DivergenceError(FloatingPointError):
    """The relaxation produced a non-finite state."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"non-finite state at relaxation step {step}")


@dataclass
class PhaseTrajectory:
    """States visited during one relaxation phase.

    ``states`` has shape ``(steps + 1, N)``; row 0 is the starting state.
    """

    states: np.ndarray
    phase_beta: float
    converged_at: int | None = None

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def steps(self) -> int:
        return len(self.states) - 1


def hard_sigmoid(x):
    return np.clip(x, 0.0, 1.0)


def _check_lengths(y_hat, y):
    y_hat = np.asarray(y_hat, dtype=float)
    y = np.asarray(y, dtype=float)
    if y_hat.shape != y.shape or y_hat.size == 0:
        raise ValueError(f"prediction and target shapes differ or are empty: {y_hat.shape} vs {y.shape}")
    return y_hat, y


def mse_cost(y_hat, y) -> float:
    """Half squared error, ``0.5 * sum((y_hat - y)**2)``."""
    y_hat, y = _check_lengths(y_hat, y)
    return 0.5 * float(np.sum((y_hat - y) ** 2))


def cost_gradient(y_hat, y) -> np.ndarray:
    y_hat, y = _check_lengths(y_hat, y)
    return y_hat - y


def vector_field(net: Network, s, y=None, beta: float = 0.0) -> np.ndarray:
    """Time derivative of every neuron's firing rate.

    Component ``j`` is ``sum_i W[i, j] s[i] + b[j] - s[j] sum_i W[j, i]``,
    minus ``beta`` times the cost gradient on output neurons. Input
    components are reported as computed even though relaxation pins them.
    """
    s = np.asarray(s, dtype=float)
    v = s @ net.weights + net.bias - s * net.weights.sum(axis=1)
    if beta != 0.0:
        out = net.output_index
        v[out] -= beta * cost_gradient(s[out], y)
    return v


def initial_state(net: Network, x, state_init: float = 0.5) -> np.ndarray:
    s = np.full(net.n_total, float(state_init))
    s[: net.n_input] = x
    return s


def relax(net: Network, s_init, x, y, beta: float, steps: int, hp: Hyperparams) -> PhaseTrajectory:
    """Clamped explicit-Euler relaxation with input neurons held at ``x``.

    Each step applies ``s <- clip(s + step_size * V(s), 0, 1)`` to the
    non-input coordinates. With ``hp.convergence_tol > 0`` the phase stops
    once the largest coordinate change falls below it, and the trajectory is
    padded with the final state so it always has ``steps + 1`` rows.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    p = net.n_input
    s = np.array(s_init, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.shape != (p,):
        raise ValueError(f"input pattern must have length {p}, got shape {x.shape}")
    s[:p] = x
    out = net.output_index
    if y is None or beta == 0.0:
        y = np.zeros(len(out))
    else:
        y = np.asarray(y, dtype=float)
        if y.shape != (len(out),):
            raise ValueError(f"target must have length {len(out)}, got shape {y.shape}")
    traj = np.empty((steps + 1, net.n_total))
    converged_at, diverged_at = relax_kernel(
        net.weights, net.bias, s, p, out, y, float(beta), int(steps),
        float(hp.step_size), float(hp.convergence_tol), traj)
    if diverged_at >= 0:
        raise DivergenceError(diverged_at)
    return PhaseTrajectory(traj, float(beta), None if converged_at < 0 else int(converged_at))


def free_equilibrium(net: Network, x, hp: Hyperparams) -> np.ndarray:
    """Free-phase state after ``hp.m0`` steps from the ``state_init`` reset."""
    s = initial_state(net, x, hp.state_init)
    return relax(net, s, x, None, 0.0, hp.m0, hp).final.copy()
