"""File formats: operator sets, graphs, channels, strategies, colorings, games.

Matrices are encoded as row-major lists of [re, im] pairs.  Graphs use a
plain text format ("n m" header, one "u v" line per edge, optional
"#part i: ..." clique-partition comments); DIMACS edge files are accepted on
input.  All JSON emission is deterministic (sorted keys).
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .channels import Channel, EaStrategy
from .coloring import QuantumColoring
from .errors import DimensionError, PreconditionError
from .games import NonlocalGame
from .graphs import Graph
from .ks import OperatorSet

__all__ = [
    "matrix_to_entries",
    "matrix_from_entries",
    "operator_set_to_dict",
    "operator_set_from_dict",
    "graph_to_text",
    "graph_from_text",
    "channel_to_dict",
    "channel_from_dict",
    "strategy_to_dict",
    "strategy_from_dict",
    "coloring_to_dict",
    "coloring_from_dict",
    "game_to_dict",
    "game_from_dict",
    "dump_json",
    "load_json",
    "file_digest",
]


def matrix_to_entries(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[float(z.real), float(z.imag)] for z in m.reshape(-1)]


def matrix_from_entries(entries, rows: int, cols: int) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in entries], dtype=np.complex128)
    if flat.size != rows * cols:
        raise DimensionError(f"expected {rows * cols} entries, got {flat.size}")
    return flat.reshape(rows, cols)


def _ket_to_entries(k) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(k, dtype=np.complex128)]


def operator_set_to_dict(s: OperatorSet) -> dict:
    ops = []
    if s.kind == "vectors" and s.kets is not None:
        for (label, _), ket in zip(s.elements, s.kets):
            ops.append({"label": label, "kind": "ket", "entries": _ket_to_entries(ket)})
    else:
        op_kind = "psd" if s.kind == "psd" else "projector"
        for label, mat in s.elements:
            ops.append({"label": label, "kind": op_kind, "entries": matrix_to_entries(mat)})
    return {"dim": s.dim, "operators": ops}


def operator_set_from_dict(data: dict) -> OperatorSet:
    dim = int(data["dim"])
    ops = data["operators"]
    if not ops:
        raise PreconditionError("operator file contains no operators")
    kinds = {op["kind"] for op in ops}
    if len(kinds) != 1:
        raise PreconditionError(f"mixed operator kinds {sorted(kinds)} are not supported")
    kind = kinds.pop()
    labels = [op.get("label", f"op{i}") for i, op in enumerate(ops)]
    if kind == "ket":
        kets = []
        for op in ops:
            amp = np.array([complex(re, im) for re, im in op["entries"]])
            if amp.size != dim:
                raise DimensionError(f"ket {op.get('label')!r} has {amp.size} amplitudes")
            kets.append(amp)
        return OperatorSet.from_kets(kets, labels=labels)
    mats = [matrix_from_entries(op["entries"], dim, dim) for op in ops]
    if kind == "projector":
        return OperatorSet.from_projectors(mats, labels=labels)
    if kind == "psd":
        return OperatorSet.from_psd(mats, labels=labels)
    raise PreconditionError(f"unknown operator kind {kind!r}")


def graph_to_text(g: Graph) -> str:
    lines = [f"{g.n_vertices} {g.edge_count}"]
    lines += [f"{u} {v}" for u, v in g.edges()]
    if g.clique_partition is not None:
        for i, part in enumerate(g.clique_partition):
            lines.append(f"#part {i}: " + " ".join(str(v) for v in part))
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Graph:
    """Parse the native edge-list format or a DIMACS edge file."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise PreconditionError("empty graph file")
    if any(ln.startswith("p ") for ln in lines):
        return _graph_from_dimacs(lines)
    parts: list[tuple] = []
    header = lines[0].split()
    if len(header) != 2:
        raise PreconditionError(f"expected 'n m' header, got {lines[0]!r}")
    n, m = int(header[0]), int(header[1])
    edges = []
    partition = []
    for ln in lines[1:]:
        if ln.startswith("#part"):
            _, _, rest = ln.partition(":")
            partition.append(tuple(int(tok) for tok in rest.split()))
            continue
        if ln.startswith("#"):
            continue
        u, v = ln.split()
        edges.append((int(u), int(v)))
    if len(edges) != m:
        raise PreconditionError(f"header promises {m} edges, file has {len(edges)}")
    return Graph.from_edges(n, edges, clique_partition=partition or None)


def _graph_from_dimacs(lines) -> Graph:
    n = None
    edges = []
    for ln in lines:
        tok = ln.split()
        if tok[0] == "c":
            continue
        if tok[0] == "p":
            n = int(tok[2])
        elif tok[0] == "e":
            edges.append((int(tok[1]) - 1, int(tok[2]) - 1))
    if n is None:
        raise PreconditionError("DIMACS file lacks a 'p' line")
    return Graph.from_edges(n, edges)


def channel_to_dict(channel: Channel) -> dict:
    return {
        "inputs": list(channel.inputs),
        "outputs": list(channel.outputs),
        "probs": [[float(p) for p in row] for row in channel.probs],
    }


def channel_from_dict(data: dict) -> Channel:
    inputs = [_label(t) for t in data["inputs"]]
    outputs = [_label(t) for t in data["outputs"]]
    return Channel.from_table(inputs, outputs, data["probs"])


def _label(token):
    # JSON has no tuples; lists coming back from label round trips become tuples
    if isinstance(token, list):
        return tuple(_label(t) for t in token)
    return token


def strategy_to_dict(strategy: EaStrategy) -> dict:
    meas = {}
    for m in range(strategy.n_messages):
        meas[str(m)] = [
            {"input": label, "entries": matrix_to_entries(mat)}
            for label, mat in strategy.effects(m)
        ]
    return {
        "n_messages": strategy.n_messages,
        "local_dim": strategy.local_dim,
        "projective": strategy.projective,
        "measurements": meas,
    }


def strategy_from_dict(data: dict) -> EaStrategy:
    d = int(data["local_dim"])
    measurements = {}
    for key, ops in data["measurements"].items():
        measurements[int(key)] = tuple(
            (_label(op["input"]), matrix_from_entries(op["entries"], d, d)) for op in ops
        )
    return EaStrategy(
        n_messages=int(data["n_messages"]),
        local_dim=d,
        measurements=measurements,
        projective=bool(data.get("projective", True)),
    )


def coloring_to_dict(qc: QuantumColoring) -> dict:
    projectors = {
        f"{v}:{a}": matrix_to_entries(mat) for (v, a), mat in sorted(qc.projectors.items())
    }
    return {"c": qc.n_colors, "r": qc.rank, "projectors": projectors}


def coloring_from_dict(data: dict) -> QuantumColoring:
    c, r = int(data["c"]), int(data["r"])
    dim = c * r
    projectors = {}
    for key, entries in data["projectors"].items():
        v, a = key.split(":")
        projectors[(int(v), int(a))] = matrix_from_entries(entries, dim, dim)
    return QuantumColoring(n_colors=c, rank=r, projectors=projectors)


def game_to_dict(game: NonlocalGame) -> dict:
    return {
        "X": list(game.x_labels),
        "Y": list(game.y_labels),
        "A": list(game.a_labels),
        "B": list(game.b_labels),
        "pi": [[float(p) for p in row] for row in game.pi],
        "V": game.v_table.astype(int).tolist(),
    }


def game_from_dict(data: dict) -> NonlocalGame:
    pi = np.array(data["pi"], dtype=np.float64)
    v = np.array(data["V"], dtype=np.int8)
    pi.setflags(write=False)
    v.setflags(write=False)
    return NonlocalGame(
        x_labels=tuple(_label(t) for t in data["X"]),
        y_labels=tuple(_label(t) for t in data["Y"]),
        a_labels=tuple(_label(t) for t in data["A"]),
        b_labels=tuple(_label(t) for t in data["B"]),
        pi=pi,
        v_table=v,
    )


def dump_json(data: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()
