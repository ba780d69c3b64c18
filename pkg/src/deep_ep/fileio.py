"""Text formats: network files, CSV logs and DOT export."""
from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .network import Network, NeuronRole
from .training import BatchStats, RunRecord

__all__ = [
    "NetworkFormatError",
    "format_network",
    "parse_network",
    "save_network",
    "load_network",
    "write_metrics_csv",
    "write_aggregate_csv",
    "write_prune_log",
    "write_trajectory_csv",
    "network_to_dot",
]

ABSENT = "."
METRICS_COLUMNS = ("epoch", "run_seed", "mse", "sparsity")
AGGREGATE_COLUMNS = ("epoch", "min", "q25", "median", "q75", "max")
PRUNE_COLUMNS = ("epoch", "example_index", "source", "target", "weight_value", "probability")


class NetworkFormatError(ValueError):
    def __init__(self, message: str, line: int, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(f"{where}: {message}")


def _num(value: float) -> str:
    # 17 significant digits round-trip every double exactly
    return f"{value:.17g}"


def format_network(net: Network) -> str:
    lines = [f"DEEP v1 N={net.n_total} P={net.n_input} roles={net.roles}"]
    for i in range(net.n_total):
        lines.append(" ".join(_num(w) if m else ABSENT for w, m in zip(net.weights[i], net.mask[i])))
    lines.append(" ".join(_num(b) if m else ABSENT for b, m in zip(net.bias, net.bias_mask)))
    return "\n".join(lines) + "\n"


def _parse_header(line: str) -> tuple[int, int, str]:
    parts = line.split()
    if len(parts) != 5 or parts[:2] != ["DEEP", "v1"]:
        raise NetworkFormatError("expected header 'DEEP v1 N=<n> P=<p> roles=<IHO...>'", 1)
    fields = {}
    for col, part in enumerate(parts[2:], start=3):
        key, sep, value = part.partition("=")
        if not sep or key not in ("N", "P", "roles"):
            raise NetworkFormatError(f"bad header field {part!r}", 1, col)
        fields[key] = value
    try:
        n, p = int(fields["N"]), int(fields["P"])
    except (KeyError, ValueError):
        raise NetworkFormatError("N and P must be integers", 1) from None
    roles = fields.get("roles", "")
    if len(roles) != n or any(r not in {x.value for x in NeuronRole} for r in roles):
        raise NetworkFormatError(f"roles must be {n} characters from I/H/O", 1)
    if roles.count("I") != p:
        raise NetworkFormatError(f"P={p} does not match roles {roles!r}", 1)
    return n, p, roles


def _parse_row(line: str, lineno: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    tokens = line.split()
    if len(tokens) != n:
        raise NetworkFormatError(f"expected {n} values, found {len(tokens)}", lineno)
    values = np.zeros(n)
    present = np.zeros(n, dtype=bool)
    for col, tok in enumerate(tokens, start=1):
        if tok == ABSENT:
            continue
        try:
            values[col - 1] = float(tok)
        except ValueError:
            raise NetworkFormatError(f"cannot parse {tok!r} as a number", lineno, col) from None
        present[col - 1] = True
    return values, present


def parse_network(text: str) -> Network:
    lines = [ln for ln in text.splitlines()]
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise NetworkFormatError("empty file", 1)
    n, p, roles = _parse_header(lines[0])
    if len(lines) != n + 2:
        raise NetworkFormatError(f"expected {n + 2} lines, found {len(lines)}", min(len(lines), n + 2))
    weights = np.zeros((n, n))
    mask = np.zeros((n, n), dtype=bool)
    for i in range(n):
        weights[i], mask[i] = _parse_row(lines[i + 1], i + 2, n)
    bias, bias_mask = _parse_row(lines[n + 1], n + 2, n)
    try:
        return Network(weights, bias, mask, bias_mask, roles)
    except ValueError as exc:
        raise NetworkFormatError(str(exc), 2) from None


def save_network(net: Network, path) -> None:
    Path(path).write_text(format_network(net), encoding="utf-8")


def load_network(path) -> Network:
    return parse_network(Path(path).read_text(encoding="utf-8"))


def _write_rows(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_metrics_csv(path, records: list[RunRecord]) -> None:
    rows = []
    for rec in records:
        for epoch, (mse, sp) in enumerate(zip(rec.mse, rec.sparsity), start=1):
            rows.append((epoch, rec.seed, _num(mse), _num(sp)))
    _write_rows(path, METRICS_COLUMNS, rows)


def write_aggregate_csv(path, stats: BatchStats) -> None:
    rows = zip(stats.epoch, *(map(_num, col) for col in
                              (stats.min, stats.q25, stats.median, stats.q75, stats.max)))
    _write_rows(path, AGGREGATE_COLUMNS, rows)


def write_prune_log(path, records: list[RunRecord]) -> None:
    rows = []
    for rec in records:
        for ev in rec.prune_events:
            source = "bias" if ev.source is None else ev.source
            rows.append((ev.epoch, ev.example_index, source, ev.target,
                         _num(ev.weight_value), _num(ev.probability)))
    _write_rows(path, PRUNE_COLUMNS, rows)


def write_trajectory_csv(path, states: np.ndarray) -> None:
    states = np.asarray(states)
    header = ["step"] + [f"neuron_{k}" for k in range(states.shape[1])]
    _write_rows(path, header, ((m, *map(_num, row)) for m, row in enumerate(states)))


_SHAPES = {"I": "box", "H": "circle", "O": "doublecircle"}
_MIN_ALPHA = round(255 * 0.10)


def network_to_dot(net: Network, name: str = "deep") -> str:
    """Directed graph in DOT with edge opacity proportional to ``|W|``.

    Alpha is ``round(255 * |W| / max|W|)`` over weights and biases. Biases
    are drawn as edges from a node ``bias`` standing for the always-one
    neuron. A network whose present parameters are all zero gets 10% alpha.
    """
    present = np.concatenate([np.abs(net.weights[net.mask]), np.abs(net.bias[net.bias_mask])])
    top = present.max() if present.size else 0.0

    def color(value):
        alpha = _MIN_ALPHA if top == 0 else round(255 * abs(value) / top)
        base = "1f77b4" if value >= 0 else "d62728"
        return f"#{base}{alpha:02x}"

    out = io.StringIO()
    out.write(f"digraph {name} {{\n")
    for k, role in enumerate(net.roles):
        out.write(f'  {k} [label="{k}", shape={_SHAPES[role]}];\n')
    if net.bias_mask.any():
        out.write('  bias [label="1", shape=point];\n')
    for i, j in zip(*np.nonzero(net.mask)):
        w = net.weights[i, j]
        out.write(f'  {i} -> {j} [color="{color(w)}", tooltip="{_num(w)}"];\n')
    for j in np.flatnonzero(net.bias_mask):
        b = net.bias[j]
        out.write(f'  bias -> {j} [color="{color(b)}", style=dashed, tooltip="{_num(b)}"];\n')
    out.write("}\n")
    return out.getvalue()
