"""Line-oriented text format for graphs.

    d <dim> n <scale> model <name> seed <u64> [embedding=int|float] [key=value ...]
    v <id> <coords...>
    e <id> <id>

``d 0`` means no embedding. Floats are written with ``repr`` so a dump and a
load reproduce the graph exactly.
"""

from __future__ import annotations

from typing import IO, Iterator

import numpy as np

from graphs.core import Graph, GraphError, Provenance


class GraphFormatError(GraphError):
    """Raised when a graph file cannot be parsed."""


def _lines(g: Graph) -> Iterator[str]:
    prov = g.provenance
    header = f"d {g.dim} n {prov.n} model {prov.model} seed {prov.seed}"
    if g.coords is not None:
        header += f" embedding={'int' if g.is_lattice else 'float'}"
    for key, value in prov.params:
        header += f" {key}={value}"
    yield header
    if g.coords is None:
        for v in range(g.num_vertices):
            yield f"v {v}"
    else:
        fmt = str if g.is_lattice else repr
        for v, row in enumerate(g.coords.tolist()):
            yield f"v {v} " + " ".join(fmt(x) for x in row)
    for u, w in g.edges.tolist():
        yield f"e {u} {w}"


def dumps_graph(g: Graph) -> str:
    return "\n".join(_lines(g)) + "\n"


def dump_graph(g: Graph, path: str) -> None:
    with open(path, "w") as f:
        for line in _lines(g):
            f.write(line)
            f.write("\n")


def loads_graph(text: str) -> Graph:
    """Parse a graph dump.

    Raises:
        GraphFormatError: on malformed headers or records.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphFormatError("empty graph file")
    tokens = lines[0].split()
    if len(tokens) < 8 or tokens[0::2][:4] != ["d", "n", "model", "seed"]:
        raise GraphFormatError(f"bad header: {lines[0]!r}")
    try:
        dim, scale, seed = int(tokens[1]), int(tokens[3]), int(tokens[7])
    except ValueError as e:
        raise GraphFormatError(f"bad header: {e}") from e
    model = tokens[5]
    embedding = "int"
    params: dict[str, str] = {}
    for tok in tokens[8:]:
        key, sep, value = tok.partition("=")
        if not sep:
            raise GraphFormatError(f"bad header token {tok!r}")
        if key == "embedding":
            embedding = value
        else:
            params[key] = value

    coords: list[list[str]] = []
    edges: list[tuple[int, int]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        try:
            if parts[0] == "v":
                if int(parts[1]) != len(coords):
                    raise GraphFormatError(f"line {lineno}: vertex ids must be dense and in order")
                if len(parts) - 2 != dim:
                    raise GraphFormatError(f"line {lineno}: expected {dim} coordinates")
                coords.append(parts[2:])
            elif parts[0] == "e":
                edges.append((int(parts[1]), int(parts[2])))
            else:
                raise GraphFormatError(f"line {lineno}: unknown record {parts[0]!r}")
        except (IndexError, ValueError) as e:
            raise GraphFormatError(f"line {lineno}: {e}") from e

    emb = None
    if dim > 0:
        conv, dtype = (int, np.int64) if embedding == "int" else (float, np.float64)
        try:
            values = [[conv(x) for x in row] for row in coords]
        except ValueError as e:
            raise GraphFormatError(f"bad coordinate: {e}") from e
        emb = np.array(values, dtype=dtype).reshape(len(coords), dim)
    prov = Provenance(model=model, seed=seed, n=scale, params=tuple(params.items()))
    try:
        return Graph(len(coords), edges, emb, prov)
    except GraphError as e:
        raise GraphFormatError(f"inconsistent graph: {e}") from e


def load_graph(path: str) -> Graph:
    with open(path) as f:
        return loads_graph(f.read())


def write_graph(g: Graph, stream: IO[str]) -> None:
    stream.write(dumps_graph(g))
