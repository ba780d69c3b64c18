"""Network structure, parameterization and hyperparameters.

Neurons are indexed from 0. Inputs come first, outputs last, hidden
neurons in between, so the logic-gate architecture reads ``IIHHHHHO``.
``weights[i, j]`` is the weight of the directed connection ``i -> j``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "NeuronRole",
    "Network",
    "Hyperparams",
    "SPARSITY_L1_COEFF",
    "new_complete_network",
    "complete_mask",
    "trainable_parameter_count",
    "reference_parameter_count",
    "sparsity_fraction",
]


class NeuronRole(str, Enum):
    INPUT = "I"
    HIDDEN = "H"
    OUTPUT = "O"


@dataclass
class Network:
    """Weights, biases and structural masks of a DEEP network.

    ``mask[i, j] == False`` marks a connection that does not exist: its
    weight is held at exactly zero and it is never trained again.
    ``bias_mask`` plays the same role for the biases, which are read as the
    outgoing weights of a virtual neuron whose activity is always one.

    Connections *into* input neurons are excluded by
    :func:`new_complete_network` but are accepted here. Input activities are
    fixed, so such a weight only adds to the source neuron's leak term.
    """

    weights: np.ndarray
    bias: np.ndarray
    mask: np.ndarray
    bias_mask: np.ndarray
    roles: str

    def __post_init__(self):
        self.weights = np.array(self.weights, dtype=float)
        self.bias = np.array(self.bias, dtype=float)
        self.mask = np.array(self.mask, dtype=bool)
        self.bias_mask = np.array(self.bias_mask, dtype=bool)
        self.roles = "".join(NeuronRole(r).value for r in self.roles)
        n = len(self.roles)
        if self.weights.shape != (n, n) or self.mask.shape != (n, n):
            raise ValueError(f"weights and mask must be {n}x{n} to match roles {self.roles!r}")
        if self.bias.shape != (n,) or self.bias_mask.shape != (n,):
            raise ValueError(f"bias and bias_mask must have length {n}")
        p = self.n_input
        if "I" in self.roles[p:]:
            raise ValueError("input neurons must occupy the leading indices")
        if "O" not in self.roles:
            raise ValueError("network needs at least one output neuron")
        if np.any(np.diag(self.mask)):
            raise ValueError("self-connections are not allowed")
        if np.any(self.bias_mask[:p]):
            raise ValueError("input neurons cannot carry a bias")
        if not np.all(np.isfinite(self.weights)) or not np.all(np.isfinite(self.bias)):
            raise ValueError("parameters must be finite")
        if np.any(self.weights[~self.mask] != 0.0) or np.any(self.bias[~self.bias_mask] != 0.0):
            raise ValueError("structurally absent parameters must be exactly zero")

    @property
    def n_total(self) -> int:
        return len(self.roles)

    @property
    def n_input(self) -> int:
        return len(self.roles) - len(self.roles.lstrip("I"))

    @property
    def output_index(self) -> np.ndarray:
        return np.array([k for k, r in enumerate(self.roles) if r == "O"], dtype=np.intp)

    @property
    def n_output(self) -> int:
        return self.roles.count("O")

    def copy(self) -> Network:
        return Network(self.weights.copy(), self.bias.copy(), self.mask.copy(),
                       self.bias_mask.copy(), self.roles)

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (self.roles == other.roles
                and np.array_equal(self.weights, other.weights)
                and np.array_equal(self.bias, other.bias)
                and np.array_equal(self.mask, other.mask)
                and np.array_equal(self.bias_mask, other.bias_mask))


# l1 strength used by pruned runs when none is given; plain runs use 0
SPARSITY_L1_COEFF = 1e-5


@dataclass(frozen=True)
class Hyperparams:
    """Every knob of a training run.

    ``beta`` is the nudge strength of the second phase, ``m0``/``m_beta`` the
    number of integration steps of the free and nudged phases,
    ``lambda_prune`` and ``temperature`` the pruning threshold and Boltzmann
    temperature. ``convergence_tol = 0`` disables early stopping of a phase.
    """

    beta: float = 2.0
    step_size: float = 0.1
    m0: int = 100
    m_beta: int = 10
    learning_rate: float = 2.0
    l1_coeff: float = 0.0
    lambda_prune: float = 3e-4
    temperature: float = 0.1
    init_scale: float = 0.1
    seed: int = 0
    state_init: float = 0.5
    convergence_tol: float = 0.0
    mse_threshold: float = 1e-2

    def __post_init__(self):
        checks = [
            ("step_size", self.step_size > 0),
            ("m0", isinstance(self.m0, (int, np.integer)) and self.m0 >= 1),
            ("m_beta", isinstance(self.m_beta, (int, np.integer)) and self.m_beta >= 1),
            ("learning_rate", self.learning_rate >= 0),
            ("l1_coeff", self.l1_coeff >= 0),
            ("lambda_prune", self.lambda_prune > 0),
            ("temperature", self.temperature > 0),
            ("init_scale", self.init_scale > 0),
            ("state_init", 0.0 <= self.state_init <= 1.0),
            ("convergence_tol", self.convergence_tol >= 0),
            ("mse_threshold", self.mse_threshold > 0),
        ]
        bad = [name for name, ok in checks if not ok]
        if bad:
            raise ValueError(f"hyperparameters out of range: {', '.join(bad)}")

    def replace(self, **changes) -> Hyperparams:
        return dataclasses.replace(self, **changes)

    @classmethod
    def for_sparsity(cls, **changes) -> Hyperparams:
        """Defaults for pruned runs: as plain runs, plus l1 shrinkage."""
        return cls(**{"l1_coeff": SPARSITY_L1_COEFF, **changes})


def _roles(n_total: int, n_input: int, n_output: int) -> str:
    return "I" * n_input + "H" * (n_total - n_input - n_output) + "O" * n_output


def complete_mask(roles: str) -> tuple[np.ndarray, np.ndarray]:
    """Masks of the complete digraph: no self-loops, nothing into inputs."""
    n = len(roles)
    p = n - len(roles.lstrip("I"))
    mask = ~np.eye(n, dtype=bool)
    mask[:, :p] = False
    bias_mask = np.ones(n, dtype=bool)
    bias_mask[:p] = False
    return mask, bias_mask


def new_complete_network(n_total: int, n_input: int, n_output: int,
                         init_scale: float = 0.1, seed: int = 0) -> Network:
    """Random complete directed network with uniform(-scale, scale) parameters.

    >>> trainable_parameter_count(new_complete_network(8, 2, 1, 0.5, seed=7))
    48
    """
    if n_output < 1:
        raise ValueError(f"n_output must be >= 1, got {n_output}")
    if n_input < 0:
        raise ValueError(f"n_input must be >= 0, got {n_input}")
    if n_input + n_output > n_total:
        raise ValueError(f"n_input + n_output must be <= n_total ({n_input} + {n_output} > {n_total})")
    if not init_scale > 0:
        raise ValueError(f"init_scale must be > 0, got {init_scale}")

    roles = _roles(n_total, n_input, n_output)
    mask, bias_mask = complete_mask(roles)
    rng = np.random.default_rng(seed)
    weights = rng.uniform(-init_scale, init_scale, size=(n_total, n_total))
    bias = rng.uniform(-init_scale, init_scale, size=n_total)
    return Network(np.where(mask, weights, 0.0), np.where(bias_mask, bias, 0.0),
                   mask, bias_mask, roles)


def trainable_parameter_count(net: Network) -> int:
    return int(net.mask.sum() + net.bias_mask[net.n_input:].sum())


def reference_parameter_count(net: Network) -> int:
    """Parameter count of a freshly built complete network with ``net``'s roles."""
    n, p = net.n_total, net.n_input
    return (n - 1) * (n - p) + (n - p)


def sparsity_fraction(net: Network, reference: int | None = None) -> float:
    """Fraction of the original trainable parameters that have been removed.

    ``reference`` defaults to :func:`reference_parameter_count`, i.e. 48 for
    the 8-neuron, 2-input architecture.
    """
    if reference is None:
        reference = reference_parameter_count(net)
    if reference <= 0:
        raise ZeroDivisionError("sparsity is undefined for a network with no original parameters")
    return (reference - trainable_parameter_count(net)) / reference
