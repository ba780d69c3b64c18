#!/usr/bin/env python3
"""Free relaxation of a small directed network and the conserved total activity."""
import numpy as np

from deep_ep import Hyperparams, conservation_residual, initial_state, new_complete_network, relax
from deep_ep.analysis import random_certified_network

# A 6-neuron network with no inputs and no biases. The sum of the free
# vector field over all neurons cancels, so total activity is constant as
# long as no neuron touches the clamp.
rng = np.random.default_rng(0)
net = new_complete_network(6, 0, 1, init_scale=0.1, seed=0)
net.bias[:] = 0.0
net.bias_mask[:] = False

hp = Hyperparams(step_size=0.05)
s0 = rng.uniform(0.3, 0.7, 6)
print("residual at start:", conservation_residual(net, s0))
for steps in (50, 100):
    states = relax(net, s0, np.zeros(0), None, 0.0, steps, hp).states
    touched = bool(np.any((states <= 0) | (states >= 1)))
    drift = states[-1].sum() - states[0].sum()
    print(f"{steps} steps: clamp touched {touched}, change in total activity {drift:.3g}")

# With inputs and biases the residual no longer vanishes. The complete
# logic-gate architecture (2 inputs, 5 hidden, 1 output) shows it.
gate = new_complete_network(8, 2, 1, seed=1)
s = initial_state(gate, np.array([1.0, 0.0]), 0.5)
print("logic-gate network residual:", conservation_residual(gate, s))

# A network with a known interior equilibrium settles onto it.
cert, x = random_certified_network(6, 2, 1, rng)
final = relax(cert, initial_state(cert, x, 0.5), x, None, 0.0, 3000, hp).final
print("equilibrium:", np.round(final, 4))
