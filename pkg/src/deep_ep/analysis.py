"""Conservation residual, Jacobian, Gershgorin stability certificate and probes.

With input activities fixed, the free dynamics restricted to the non-input
neurons is affine, ``ds/dt = J s + c``, so its Jacobian does not depend on
the state. Every column ``i`` of ``J`` sums to ``-sum_k W[i, k]`` over input
targets ``k``. Networks without connections into inputs therefore have a
singular ``J`` and can never pass the certificate; the certificate needs
weights from non-input neurons into input neurons to act as extra leak.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import initial_state, relax, vector_field
from .network import Hyperparams, Network

__all__ = [
    "StabilityReport",
    "ProbeResult",
    "conservation_residual",
    "free_jacobian",
    "stability_certificate",
    "gershgorin_check",
    "empirical_stability_probe",
    "random_certified_network",
]


@dataclass
class StabilityReport:
    neurons: np.ndarray
    outgoing_sum: np.ndarray
    incoming_abs_sum: np.ndarray
    condition_met: np.ndarray

    @property
    def overall_certified(self) -> bool:
        return bool(np.all(self.condition_met))

    def verdict(self) -> str:
        if self.overall_certified:
            return "CERTIFIED: locally asymptotically stable (sufficient conditions met)"
        return "NOT CERTIFIED (conditions are sufficient, not necessary)"

    def table(self) -> str:
        lines = [f"{'neuron':>6}  {'outgoing_sum':>14}  {'incoming_abs_sum':>16}  condition_met"]
        for j, out, inc, ok in zip(self.neurons, self.outgoing_sum, self.incoming_abs_sum, self.condition_met):
            lines.append(f"{j:>6d}  {out:>14.6g}  {inc:>16.6g}  {bool(ok)}")
        return "\n".join(lines)


@dataclass
class ProbeResult:
    fraction: float
    equilibrium: np.ndarray
    n_trials: int
    boundary: bool = False
    warning: str | None = None


def _abs_row_sums(a):
    return np.abs(np.ascontiguousarray(a)).sum(axis=1)


def conservation_residual(net: Network, s) -> float:
    """Sum of the free vector field over all neurons.

    Zero for bias-free networks without input neurons; otherwise the biases
    and the drive from inputs survive the cancellation.
    """
    return float(np.sum(vector_field(net, s)))


def free_jacobian(net: Network) -> np.ndarray:
    """Jacobian of the unclamped free dynamics over the non-input neurons.

    Entry ``(a, b)`` is the derivative of neuron ``P + a``'s rate of change
    with respect to neuron ``P + b``'s activity.
    """
    p = net.n_input
    jac = net.weights[p:, p:].T.copy()
    jac[np.diag_indices_from(jac)] -= net.weights[p:].sum(axis=1)
    return jac


def stability_certificate(net: Network) -> StabilityReport:
    """Evaluate the sufficient stability conditions for every non-input neuron.

    Neuron ``j`` passes when its outgoing weight sum is positive and exceeds
    the summed magnitude of its incoming weights from non-input neurons.
    """
    p = net.n_input
    outgoing = net.weights[p:].sum(axis=1)
    incoming = _abs_row_sums(net.weights[p:, p:].T)
    met = (outgoing > 0) & (incoming < np.abs(outgoing))
    return StabilityReport(np.arange(p, net.n_total), outgoing, incoming, met)


def gershgorin_check(jac) -> bool:
    """Every Gershgorin disc lies strictly in the left half-plane (row radii)."""
    jac = np.asarray(jac, dtype=float)
    if jac.ndim != 2 or jac.shape[0] != jac.shape[1]:
        raise ValueError(f"Jacobian must be square, got shape {jac.shape}")
    diag = np.diag(jac)
    off = jac.copy()
    np.fill_diagonal(off, 0.0)
    radii = _abs_row_sums(off)
    return bool(np.all(diag < 0) and np.all(radii < np.abs(diag)))


def _settle(net, s, x, hp, steps):
    return relax(net, s, x, None, 0.0, steps, hp).final.copy()


def empirical_stability_probe(net: Network, x, hp: Hyperparams, n_trials: int, noise: float,
                              rng: np.random.Generator, steps: int | None = None,
                              tol: float = 1e-6) -> ProbeResult:
    """Fraction of small random perturbations of ``s0`` that relax back to it.

    ``s0`` is found by relaxing from the usual reset state. Perturbations are
    uniform with max-norm ``noise`` on the non-input coordinates and clipped
    to the unit interval. ``steps`` defaults to ``10 * hp.m0``.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1 for the return fraction to be defined")
    steps = 10 * hp.m0 if steps is None else steps
    p = net.n_input
    s0 = _settle(net, initial_state(net, x, hp.state_init), x, hp, steps)
    free = s0[p:]
    boundary = bool(np.any((free <= 0.0) | (free >= 1.0)))
    returned = 0
    for _ in range(n_trials):
        s = s0.copy()
        s[p:] = np.clip(free + rng.uniform(-noise, noise, size=free.shape), 0.0, 1.0)
        if np.max(np.abs(_settle(net, s, x, hp, steps) - s0)) <= tol:
            returned += 1
    warning = None
    if boundary:
        warning = "equilibrium touches the clamp boundary; the linearized certificate may not apply"
    return ProbeResult(returned / n_trials, s0, n_trials, boundary, warning)


def random_certified_network(n_total: int, n_input: int, n_output: int, rng: np.random.Generator,
                             margin: float = 0.1, scale: float = 1.0) -> tuple[Network, np.ndarray]:
    """Random network passing the certificate, with a known interior equilibrium.

    Weights among non-input neurons are uniform on ``[-scale, scale]``. Each
    non-input neuron then gets weights into the input neurons sized so its
    outgoing sum exceeds its incoming magnitude by at least ``margin``.
    Biases are chosen so that a random point of ``(0.2, 0.8)^(N-P)`` is the
    free equilibrium for inputs drawn from ``{0, 1}``. Returns the network
    and the input pattern.
    """
    if n_input < 1:
        raise ValueError("certifiable networks need at least one input neuron")
    p, n = n_input, n_total
    roles = "I" * p + "H" * (n - p - n_output) + "O" * n_output
    mask = ~np.eye(n, dtype=bool)
    weights = np.zeros((n, n))
    free = ~np.eye(n - p, dtype=bool)
    weights[p:, p:] = np.where(free, rng.uniform(-scale, scale, size=(n - p, n - p)), 0.0)
    incoming = np.abs(weights[p:, p:]).sum(axis=0)
    target = incoming + margin + rng.uniform(0.0, 1.0, size=n - p)
    weights[p:, :p] = ((target - weights[p:, p:].sum(axis=1)) / p)[:, None]
    weights[:p, p:] = rng.uniform(-scale, scale, size=(p, n - p))
    mask[:p, :p] = False
    x = rng.integers(0, 2, size=p).astype(float)
    s_star = np.concatenate([x, rng.uniform(0.2, 0.8, size=n - p)])
    drive = s_star @ weights - s_star * weights.sum(axis=1)
    bias = np.zeros(n)
    bias[p:] = -drive[p:]
    bias_mask = np.zeros(n, dtype=bool)
    bias_mask[p:] = True
    return Network(weights, bias, mask, bias_mask, roles), x
