#!/usr/bin/env python3
"""Training with l1 shrinkage and the Boltzmann pruning lottery, then DOT export."""
from pathlib import Path

import numpy as np

from deep_ep import Hyperparams, logic_dataset, new_complete_network, train
from deep_ep.fileio import network_to_dot, save_network
from deep_ep.training import prune_rng

hp = Hyperparams.for_sparsity()
seed = 0
net = new_complete_network(8, 2, 1, hp.init_scale, seed)
trained, record = train(net, logic_dataset("and"), hp, epochs=2000, prune=True, rng=prune_rng(seed), seed=seed)

print(f"final mse {record.mse[-1]:.2e}, sparsity {record.final_sparsity:.4f}")
print(f"{len(record.prune_events)} parameters removed; the first three:")
for ev in record.prune_events[:3]:
    src = "bias" if ev.source is None else ev.source
    print(f"  epoch {ev.epoch}: {src} -> {ev.target}, |w| = {abs(ev.weight_value):.2e}, p = {ev.probability:.3f}")

np.set_printoptions(precision=3, suppress=True)
print(np.where(trained.mask, trained.weights, np.nan))

out = Path("demo_output")
out.mkdir(exist_ok=True)
save_network(trained, out / "and_pruned.txt")
(out / "and_pruned.dot").write_text(network_to_dot(trained, "and_pruned"))
print("wrote", out / "and_pruned.txt", "and", out / "and_pruned.dot")
