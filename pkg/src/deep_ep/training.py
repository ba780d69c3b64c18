"""Logic-gate datasets, the two-phase training loop and multi-seed experiments."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .dynamics import DivergenceError, free_equilibrium, initial_state, relax
from .learning import apply_update, asym_ep_update, deep_update
from .network import Hyperparams, Network, new_complete_network, sparsity_fraction
from .sparsity import PruneEvent, prune_step

__all__ = [
    "TASKS",
    "RULES",
    "Dataset",
    "RunRecord",
    "BatchStats",
    "Comparison",
    "logic_dataset",
    "evaluate",
    "train",
    "run_batch",
    "batch_statistics",
    "compare_rules",
]

log = logging.getLogger(__name__)

TASKS = ("and", "or", "xor")
RULES = ("deep", "asym")

_TRUTH_TABLES = {
    "and": (0, 0, 0, 1),
    "or": (0, 1, 1, 1),
    "xor": (0, 1, 1, 0),
}


@dataclass
class Dataset:
    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        self.inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        self.targets = np.asarray(self.targets, dtype=float).reshape(len(self.inputs), -1)
        if len(self.inputs) == 0:
            raise ValueError("dataset is empty")

    def __len__(self):
        return len(self.inputs)

    def __iter__(self):
        return zip(self.inputs, self.targets)


@dataclass
class RunRecord:
    seed: int
    mse: list[float] = field(default_factory=list)
    sparsity: list[float] = field(default_factory=list)
    converged: bool = False
    epochs_to_threshold: int | None = None
    final_sparsity: float = 0.0
    prune_events: list[PruneEvent] = field(default_factory=list)
    error: str | None = None


def logic_dataset(op: str) -> Dataset:
    """Four Boolean input pairs with the truth-table output of ``op``."""
    key = op.lower()
    if key not in _TRUTH_TABLES:
        raise ValueError(f"unknown task {op!r}; valid tasks are {{{', '.join(TASKS)}}}")
    inputs = [(0, 0), (0, 1), (1, 0), (1, 1)]
    return Dataset(inputs, _TRUTH_TABLES[key])


def _check_dims(net: Network, ds: Dataset):
    if ds.inputs.shape[1] != net.n_input or ds.targets.shape[1] != net.n_output:
        raise ValueError(
            f"dataset has {ds.inputs.shape[1]} inputs / {ds.targets.shape[1]} outputs, "
            f"network has {net.n_input} / {net.n_output}")


def evaluate(net: Network, ds: Dataset, hp: Hyperparams) -> tuple[float, float]:
    """Mean squared output error and accuracy at the free equilibrium.

    An output counts as class 1 when it is at least 0.5.
    """
    _check_dims(net, ds)
    out = net.output_index
    errors, hits = [], []
    for x, y in ds:
        y_hat = free_equilibrium(net, x, hp)[out]
        errors.append(np.mean((y_hat - y) ** 2))
        hits.append(np.all((y_hat >= 0.5) == (y >= 0.5)))
    return float(np.mean(errors)), float(np.mean(hits))


def train(net: Network, ds: Dataset, hp: Hyperparams, epochs: int, rule: str = "deep",
          prune: bool = False, rng: np.random.Generator | None = None,
          seed: int = 0) -> tuple[Network, RunRecord]:
    """Online two-phase training in fixed dataset order.

    For each pattern: reset, relax freely for ``m0`` steps, relax with the
    nudge for ``m_beta`` steps from there, update, and optionally prune.
    The MSE and sparsity are recorded after every epoch.
    """
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}; valid rules are {{{', '.join(RULES)}}}")
    if prune and rng is None:
        raise ValueError("pruning needs a random generator")
    _check_dims(net, ds)
    record = RunRecord(seed)
    for epoch in range(1, epochs + 1):
        for k, (x, y) in enumerate(ds):
            try:
                first = relax(net, initial_state(net, x, hp.state_init), x, y, 0.0, hp.m0, hp)
                second = relax(net, first.final, x, y, hp.beta, hp.m_beta, hp)
            except DivergenceError as exc:
                raise DivergenceError(exc.step, f"{exc} (epoch {epoch}, pattern {k})") from exc
            if rule == "deep":
                upd = deep_update(second, net)
            else:
                upd = asym_ep_update(first.final, second.final, net)
            net = apply_update(net, upd, hp)
            if prune:
                net, events = prune_step(net, hp, rng, epoch, k)
                record.prune_events.extend(events)
        mse, _ = evaluate(net, ds, hp)
        record.mse.append(mse)
        record.sparsity.append(sparsity_fraction(net))
        if not record.converged and mse < hp.mse_threshold:
            record.converged = True
            record.epochs_to_threshold = epoch
    record.final_sparsity = record.sparsity[-1]
    return net, record


def prune_rng(seed: int) -> np.random.Generator:
    """Pruning stream of a run, independent of the initialization stream."""
    return np.random.default_rng([seed, 1])


def _single_run(task, hp, epochs, rule, prune, seed, architecture):
    n_total, n_input, n_output = architecture
    net = new_complete_network(n_total, n_input, n_output, hp.init_scale, seed)
    return train(net, logic_dataset(task), hp, epochs, rule, prune, prune_rng(seed), seed)


def run_batch(task: str, n_runs: int, hp: Hyperparams, rule: str = "deep", prune: bool = False,
              base_seed: int = 0, epochs: int = 2000,
              architecture: tuple[int, int, int] = (8, 2, 1)) -> tuple[list[RunRecord], list[Network | None]]:
    """Independent runs with seeds ``base_seed .. base_seed + n_runs - 1``.

    A run that diverges is kept as a record with ``error`` set and no
    network; the other runs are unaffected.
    """
    if n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {n_runs}")
    records, nets = [], []
    for seed in range(base_seed, base_seed + n_runs):
        try:
            net, rec = _single_run(task, hp, epochs, rule, prune, seed, architecture)
        except DivergenceError as exc:
            log.warning("run with seed %d diverged: %s", seed, exc)
            rec, net = RunRecord(seed, error=f"seed {seed}: {exc}"), None
        records.append(rec)
        nets.append(net)
    return records, nets


@dataclass
class BatchStats:
    """Per-epoch min, quartiles and max of the MSE across runs."""

    epoch: np.ndarray
    min: np.ndarray
    q25: np.ndarray
    median: np.ndarray
    q75: np.ndarray
    max: np.ndarray


def batch_statistics(records: list[RunRecord]) -> BatchStats:
    curves = np.array([r.mse for r in records if r.error is None])
    if curves.size == 0:
        raise ValueError("no completed runs to aggregate")
    q = np.quantile(curves, [0.0, 0.25, 0.5, 0.75, 1.0], axis=0)
    return BatchStats(np.arange(1, curves.shape[1] + 1), *q)


@dataclass
class Comparison:
    task: str
    records: dict[str, list[RunRecord]]

    def converged_count(self, rule: str) -> int:
        return sum(r.converged for r in self.records[rule])

    def median_epochs(self, rule: str) -> float | None:
        """Median epochs-to-threshold over the runs of ``rule`` that converged."""
        epochs = [r.epochs_to_threshold for r in self.records[rule] if r.converged]
        return float(np.median(epochs)) if epochs else None

    def censored_median_epochs(self, rule: str) -> float:
        """Median over all runs, counting a run that never converged as infinitely slow."""
        epochs = [r.epochs_to_threshold if r.converged else np.inf for r in self.records[rule]]
        return float(np.median(epochs))

    def summary(self) -> str:
        lines = [f"task={self.task}"]
        for rule in self.records:
            med = self.median_epochs(rule)
            lines.append(f"  {rule}: converged {self.converged_count(rule)}/{len(self.records[rule])}, "
                         f"median epochs to threshold {'-' if med is None else f'{med:g}'} (converged runs), "
                         f"{self.censored_median_epochs(rule):g} (all runs)")
        return "\n".join(lines)


def compare_rules(task: str, n_runs: int, hp: Hyperparams, base_seed: int = 0, epochs: int = 2000,
                  prune: bool = False, architecture: tuple[int, int, int] = (8, 2, 1)) -> Comparison:
    """Run both rules from identical seeds and hyperparameters."""
    records = {}
    for rule in RULES:
        records[rule], _ = run_batch(task, n_runs, hp, rule, prune, base_seed, epochs, architecture)
    return Comparison(task, records)
