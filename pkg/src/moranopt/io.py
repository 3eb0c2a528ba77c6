"""Edge-list / fitness file ingestion and serialization.

Edge-list format (UTF-8 text):

* ``#`` starts a comment line;
* ``%directed true|false`` header directive (default false);
* data rows ``u<TAB>v<TAB>weight`` with the weight optional for undirected
  graphs (weights are uniform 1/degree there regardless).

Fitness files hold rows ``node<TAB>m<TAB>r``.

External node labels may be arbitrary strings; they are mapped to dense
integer ids at ingestion and kept in an id<->label table on the graph.
When every label is an integer and the set is exactly ``0..n-1`` the
identity mapping is used and no label table is stored.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Iterable

from .errors import ParseError
from .graphs import FitnessGraph, build_graph


def _open_lines(source: str | Path | IO[str]) -> list[str]:
    if hasattr(source, "read"):
        return source.read().splitlines()
    return Path(source).read_text(encoding="utf-8").splitlines()


def parse_edge_list(source: str | Path | IO[str]) -> tuple[list[tuple[str, str, float | None]], bool]:
    """Raw parse: returns ``(rows, directed)`` with labels still strings."""
    directed = False
    rows: list[tuple[str, str, float | None]] = []
    for lineno, raw in enumerate(_open_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("%"):
            parts = line[1:].split()
            if len(parts) != 2 or parts[0] != "directed":
                raise ParseError(f"unknown directive {line!r}", lineno)
            if parts[1] not in ("true", "false"):
                raise ParseError(f"directive value must be true|false, got {parts[1]!r}", lineno)
            directed = parts[1] == "true"
            continue
        fields = line.split("\t") if "\t" in line else line.split()
        if len(fields) not in (2, 3):
            raise ParseError(f"expected 'u v [weight]', got {line!r}", lineno)
        weight: float | None = None
        if len(fields) == 3:
            try:
                weight = float(fields[2])
            except ValueError:
                raise ParseError(f"bad weight {fields[2]!r}", lineno) from None
        rows.append((fields[0], fields[1], weight))
    if not rows:
        raise ParseError("edge list contains no data rows")
    return rows, directed


def _label_table(tokens: Iterable[str]) -> tuple[dict[str, int], tuple[str, ...] | None]:
    """Map labels to dense ids; identity for already-dense integer labels."""
    seen: dict[str, int] = {}
    order: list[str] = []
    for t in tokens:
        if t not in seen:
            seen[t] = len(order)
            order.append(t)
    try:
        ints = [int(t) for t in order]
    except ValueError:
        ints = None
    if ints is not None and sorted(ints) == list(range(len(ints))):
        return {t: int(t) for t in order}, None
    return seen, tuple(order)


def read_edge_list(
    source: str | Path | IO[str],
    m: Iterable[float] | None = None,
    r: Iterable[float] | None = None,
) -> FitnessGraph:
    """Strict ingestion: parse, map labels, validate via :func:`build_graph`.

    Fitness defaults to the neutral all-ones vectors; pass explicit vectors
    (indexed by dense id) or attach them later with
    :func:`moranopt.graphs.with_fitness` / :func:`read_fitness`.
    """
    rows, directed = parse_edge_list(source)
    tokens = [t for u, v, _ in rows for t in (u, v)]
    mapping, labels = _label_table(tokens)
    n = len(mapping)
    edges = [(mapping[u], mapping[v], w) for u, v, w in rows]
    m_vec = list(m) if m is not None else [1.0] * n
    r_vec = list(r) if r is not None else [1.0] * n
    return build_graph(edges, directed, m_vec, r_vec, labels=labels)


def read_fitness(source: str | Path | IO[str], g: FitnessGraph) -> FitnessGraph:
    """Attach per-node fitness from ``node<TAB>m<TAB>r`` rows (nodes by label)."""
    by_label = {g.label_of(u): u for u in range(g.n)}
    m = g.m.copy()
    r = g.r.copy()
    assigned = 0
    for lineno, raw in enumerate(_open_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t") if "\t" in line else line.split()
        if len(fields) != 3:
            raise ParseError(f"expected 'node m r', got {line!r}", lineno)
        if fields[0] not in by_label:
            raise ParseError(f"unknown node {fields[0]!r}", lineno)
        try:
            mu, ru = float(fields[1]), float(fields[2])
        except ValueError:
            raise ParseError(f"bad fitness value in {line!r}", lineno) from None
        u = by_label[fields[0]]
        m[u], r[u] = mu, ru
        assigned += 1
    if assigned == 0:
        raise ParseError("fitness file contains no data rows")
    from .graphs import with_fitness

    return with_fitness(g, m, r)


def write_edge_list(g: FitnessGraph, sink: str | Path | IO[str]) -> None:
    """Serialize so that :func:`read_edge_list` reproduces identical weights."""
    lines = [f"%directed {'true' if g.directed else 'false'}"]
    if g.directed:
        for u, v, w in g.edge_iter():
            lines.append(f"{g.label_of(u)}\t{g.label_of(v)}\t{float(w)!r}")
    else:
        for u, v, _ in g.edge_iter():
            if u < v:
                lines.append(f"{g.label_of(u)}\t{g.label_of(v)}")
    text = "\n".join(lines) + "\n"
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        Path(sink).write_text(text, encoding="utf-8")


def write_fitness(g: FitnessGraph, sink: str | Path | IO[str]) -> None:
    lines = [f"{g.label_of(u)}\t{float(g.m[u])!r}\t{float(g.r[u])!r}" for u in range(g.n)]
    text = "\n".join(lines) + "\n"
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        Path(sink).write_text(text, encoding="utf-8")


def load_set_cover(source: str | Path | IO[str]):
    """Set-cover instance JSON: ``{"sets": [[...], ...], "k": int}``.

    An optional ``"universe"`` array is validated against the union of the
    sets.  Returns a :class:`moranopt.hardness.SetCoverInstance`.
    """
    from .hardness import SetCoverInstance

    text = source.read() if hasattr(source, "read") else Path(source).read_text(encoding="utf-8")
    try:
        blob = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if "sets" not in blob or "k" not in blob:
        raise ParseError("instance JSON needs 'sets' and 'k' fields")
    sets = [frozenset(a) for a in blob["sets"]]
    universe = frozenset().union(*sets) if sets else frozenset()
    if "universe" in blob and frozenset(blob["universe"]) != universe:
        raise ParseError("'universe' does not equal the union of 'sets'")
    return SetCoverInstance(universe=universe, sets=tuple(sets), k=int(blob["k"]))
