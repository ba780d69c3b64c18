#!/usr/bin/env python3
"""The diagonal-dominance certificate and what it can and cannot say."""
import numpy as np

from deep_ep import (
    Hyperparams,
    empirical_stability_probe,
    free_jacobian,
    gershgorin_check,
    new_complete_network,
    stability_certificate,
)
from deep_ep.analysis import random_certified_network

rng = np.random.default_rng(3)
hp = Hyperparams()

# Certified: every non-input neuron leaks more than it receives.
net, x = random_certified_network(7, 2, 1, rng)
report = stability_certificate(net)
print(report.table())
print(report.verdict())
print("same answer from the Jacobian discs:", gershgorin_check(free_jacobian(net)))
probe = empirical_stability_probe(net, x, hp, n_trials=20, noise=0.01, rng=rng, steps=5000)
print(f"perturbations that returned: {probe.fraction:.2f}")

# A complete network with no edges into its inputs has Jacobian columns
# summing to zero, so it can never be certified, however it is trained.
# Failing the certificate says nothing about actual stability.
plain = new_complete_network(8, 2, 1, seed=0)
print(stability_certificate(plain).verdict())
print("Jacobian column sums:", np.round(free_jacobian(plain).sum(axis=0), 12))
probe = empirical_stability_probe(plain, np.array([1.0, 0.0]), hp, 20, 0.01, rng)
print(f"perturbations that returned anyway: {probe.fraction:.2f}")
