"""Command-line front end: ``train``, ``analyze``, ``export-dot`` and ``eval``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import conservation_residual, empirical_stability_probe, stability_certificate
from .config import OUT_ENV, ConfigError, RunConfig, load_config
from .dynamics import free_equilibrium, initial_state
from .fileio import (
    NetworkFormatError,
    load_network,
    network_to_dot,
    save_network,
    write_aggregate_csv,
    write_metrics_csv,
    write_prune_log,
)
from .network import Hyperparams, Network
from .training import RULES, TASKS, batch_statistics, logic_dataset, run_batch

log = logging.getLogger("deep_ep")

# flag name -> config key
_FLAGS = {
    "task": "task", "rule": "rule", "runs": "runs", "epochs": "epochs", "seed": "seed",
    "beta": "beta", "step_size": "step_size", "m0": "m0", "mbeta": "m_beta", "lr": "learning_rate",
    "l1": "l1_coeff", "lambda_": "lambda_prune", "temperature": "temperature", "hidden": "n_hidden",
    "init_scale": "init_scale", "state_init": "state_init", "threshold": "mse_threshold", "out": "out",
}


def _add_hyper_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("hyperparameters")
    g.add_argument("--beta", type=float)
    g.add_argument("--step-size", type=float)
    g.add_argument("--m0", type=int, help="free-phase steps")
    g.add_argument("--mbeta", type=int, help="nudged-phase steps")
    g.add_argument("--lr", type=float)
    g.add_argument("--l1", type=float)
    g.add_argument("--lambda", dest="lambda_", type=float, help="pruning threshold")
    g.add_argument("--temperature", type=float)
    g.add_argument("--init-scale", type=float)
    g.add_argument("--state-init", type=float)
    g.add_argument("--threshold", type=float, help="MSE convergence threshold")
    g.add_argument("--config", help="JSON config or a run manifest")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deep-ep", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("train", help="train seeded runs on a logic gate")
    tr.add_argument("--task", help=f"one of {{{', '.join(TASKS)}}}")
    tr.add_argument("--rule", help=f"one of {{{', '.join(RULES)}}}")
    tr.add_argument("--compare", action="store_true", default=None, help="train both rules from the same seeds")
    tr.add_argument("--prune", action="store_true", default=None)
    tr.add_argument("--runs", type=int)
    tr.add_argument("--epochs", type=int)
    tr.add_argument("--seed", type=int, help="seed of the first run")
    tr.add_argument("--hidden", type=int, help="number of hidden neurons")
    tr.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./runs)")
    _add_hyper_flags(tr)

    an = sub.add_parser("analyze", help="stability certificate and conservation residual")
    an.add_argument("network")
    an.add_argument("--probe", type=int, default=0, metavar="N", help="also run N perturb-and-relax trials")
    an.add_argument("--noise", type=float, default=0.01)
    an.add_argument("--input", default=None, help="comma-separated input pattern (default all zeros)")
    _add_hyper_flags(an)

    ex = sub.add_parser("export-dot", help="write the network as a DOT digraph")
    ex.add_argument("network")
    ex.add_argument("out_file")

    ev = sub.add_parser("eval", help="MSE and accuracy of a saved network on a task")
    ev.add_argument("network")
    ev.add_argument("--task", required=True)
    _add_hyper_flags(ev)
    return parser


def _resolve(args) -> RunConfig:
    overrides = {key: getattr(args, flag) for flag, key in _FLAGS.items() if hasattr(args, flag)}
    for flag in ("prune", "compare"):
        if hasattr(args, flag):
            overrides[flag] = getattr(args, flag)
    return load_config(getattr(args, "config", None), overrides)


def _experiment_dir(cfg: RunConfig, rule: str) -> Path:
    name = f"{cfg.task}-{rule}{'-prune' if cfg.prune else ''}-seed{cfg.hyperparams.seed}"
    return Path(cfg.out) / name


def _write_batch(cfg: RunConfig, rule: str, manifest: dict) -> tuple[int, int]:
    hp = cfg.hyperparams
    records, nets = run_batch(cfg.task, cfg.runs, hp, rule, cfg.prune, hp.seed, cfg.epochs, cfg.architecture)
    root = _experiment_dir(cfg, rule)
    for rec, net in zip(records, nets):
        run_dir = root / f"run_{rec.seed}"
        run_dir.mkdir(parents=True, exist_ok=True)
        write_metrics_csv(run_dir / "metrics.csv", [rec])
        if cfg.prune:
            write_prune_log(run_dir / "prune_events.csv", [rec])
        if net is not None:
            save_network(net, run_dir / "network.txt")
        else:
            (run_dir / "error.txt").write_text(rec.error + "\n", encoding="utf-8")
    completed = [r for r in records if r.error is None]
    if completed:
        write_aggregate_csv(root / "aggregate.csv", batch_statistics(records))
    lines = []
    for rec in records:
        status = "diverged" if rec.error else (f"converged at epoch {rec.epochs_to_threshold}"
                                               if rec.converged else "not converged")
        lines.append(f"seed {rec.seed}: {status}, final mse {rec.mse[-1] if rec.mse else float('nan'):.6g}, "
                     f"final sparsity {rec.final_sparsity:.4f}")
    (root / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    manifest_rule = dict(manifest, config=dict(manifest["config"], rule=rule, compare=False))
    (root / "manifest.json").write_text(json.dumps(manifest_rule, indent=2) + "\n", encoding="utf-8")
    n_conv = sum(r.converged for r in records)
    print(f"{cfg.task}/{rule}: {n_conv}/{len(records)} runs reached mse < {hp.mse_threshold:g}"
          f" -> {root}")
    return len(completed), n_conv


def cmd_train(args) -> int:
    cfg = _resolve(args)
    manifest = {
        "package_version": __version__,
        "config": cfg.to_dict(),
        "seeds": list(range(cfg.hyperparams.seed, cfg.hyperparams.seed + cfg.runs)),
    }
    try:
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {cfg.out}: {exc.strerror}") from None
    rules = RULES if cfg.compare else (cfg.rule,)
    completed = 0
    for rule in rules:
        done, _ = _write_batch(cfg, rule, manifest)
        completed += done
    if completed == 0:
        print("error: every run diverged", file=sys.stderr)
        return 3
    return 0


def _hyper_only(args) -> Hyperparams:
    return _resolve(args).hyperparams


def _parse_input(text: str | None, net: Network) -> np.ndarray:
    if text is None:
        return np.zeros(net.n_input)
    try:
        x = np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise ConfigError(f"--input must be comma-separated numbers, got {text!r}") from None
    if x.shape != (net.n_input,):
        raise ConfigError(f"--input has {x.size} values, network has {net.n_input} inputs")
    return x


def cmd_analyze(args) -> int:
    net = load_network(args.network)
    hp = _hyper_only(args)
    report = stability_certificate(net)
    print(report.table())
    print(report.verdict())

    x = _parse_input(args.input, net)
    s = initial_state(net, x, hp.state_init)
    has_bias = bool(np.any(net.bias[net.bias_mask] != 0))
    print(f"conservation residual at the reset state: {conservation_residual(net, s):.6g}")
    if has_bias or net.n_input > 0:
        # the cancellation only covers the part without biases and input neurons
        p = net.n_input
        inner = Network(net.weights[p:, p:].copy(), np.zeros(net.n_total - p), net.mask[p:, p:].copy(),
                        np.zeros(net.n_total - p, dtype=bool), net.roles[p:])
        print(f"  network has {'biases' if has_bias else 'no biases'} and {p} input neuron(s); "
              f"residual without them: {conservation_residual(inner, s[p:]):.3g}")
    if args.probe:
        probe = empirical_stability_probe(net, x, hp, args.probe, args.noise, np.random.default_rng(hp.seed))
        print(f"probe: {probe.fraction:.3f} of {probe.n_trials} perturbations (noise {args.noise:g}) "
              f"returned to the equilibrium")
        if probe.warning:
            print(f"warning: {probe.warning}")
    return 0


def cmd_export_dot(args) -> int:
    net = load_network(args.network)
    name = Path(args.network).stem.replace("-", "_").replace(".", "_") or "deep"
    text = network_to_dot(net, name if name.isidentifier() else "deep")
    try:
        Path(args.out_file).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {args.out_file}: {exc.strerror}") from None
    return 0


def cmd_eval(args) -> int:
    net = load_network(args.network)
    cfg = _resolve(args)
    hp = cfg.hyperparams
    ds = logic_dataset(cfg.task)
    errors, hits = [], []
    for x, y in ds:
        y_hat = free_equilibrium(net, x, hp)[net.output_index]
        errors.append(float(np.mean((y_hat - y) ** 2)))
        hits.append(bool(np.all((y_hat >= 0.5) == (y >= 0.5))))
        print(f"x={x.astype(int).tolist()} target={y.tolist()} output={np.round(y_hat, 6).tolist()}")
    print(f"mse {np.mean(errors):.6g}  accuracy {np.mean(hits):.3f}")
    return 0


_COMMANDS = {"train": cmd_train, "analyze": cmd_analyze, "export-dot": cmd_export_dot, "eval": cmd_eval}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except NetworkFormatError as exc:
        print(f"error: {args.network}: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
