"""Directed graphs, line digraphs and builders for the standard families.

Arcs are ordered (tail, head) pairs of vertex indices. Parallel arcs are
forbidden; an undirected edge is encoded as two opposite arcs. All arc
indexing is lexicographic by (tail, head) so that every matrix built on
the arc space is reproducible across runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "Digraph",
    "DegreeProfile",
    "build_digraph",
    "adjacency_matrix",
    "digraph_from_adjacency",
    "line_digraph",
    "degree_profile",
    "is_quantisable",
    "make_star",
    "make_complete",
    "make_lattice",
    "digraph_to_json",
    "digraph_from_json",
    "adjacency_to_csv",
    "adjacency_from_csv",
]


@dataclass(frozen=True)
class Digraph:
    """Finite digraph with lexicographically indexed arcs.

    ``arcs`` is sorted by (tail, head); ``arc_index`` maps an arc pair to
    its position in that order. Instances are immutable and safe to share.
    """

    n_vertices: int
    arcs: tuple[tuple[int, int], ...]

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    @cached_property
    def arc_index(self) -> dict[tuple[int, int], int]:
        return {arc: i for i, arc in enumerate(self.arcs)}

    @cached_property
    def arc_tails(self) -> np.ndarray:
        return np.array([t for t, _ in self.arcs], dtype=np.intp)

    @cached_property
    def arc_heads(self) -> np.ndarray:
        return np.array([h for _, h in self.arcs], dtype=np.intp)

    @cached_property
    def out_arcs(self) -> tuple[tuple[int, ...], ...]:
        """Arc indices leaving each vertex, sorted by head."""
        buckets: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for i, (t, _) in enumerate(self.arcs):
            buckets[t].append(i)
        return tuple(tuple(b) for b in buckets)

    @cached_property
    def in_arcs(self) -> tuple[tuple[int, ...], ...]:
        """Arc indices entering each vertex, sorted by tail."""
        buckets: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for i, (_, h) in enumerate(self.arcs):
            buckets[h].append(i)
        return tuple(tuple(b) for b in buckets)


@dataclass(frozen=True)
class DegreeProfile:
    """Per-vertex (in-degree, out-degree) counts."""

    in_degrees: tuple[int, ...]
    out_degrees: tuple[int, ...]

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.in_degrees, self.out_degrees))


def build_digraph(n: int, arcs) -> Digraph:
    """Build a digraph on ``n`` vertices from (tail, head) pairs.

    Raises ValueError on duplicate arcs or endpoints out of range.
    Self-loops are permitted.
    """
    if n < 1:
        raise ValueError(f"vertex count must be positive, got {n}")
    cleaned = []
    for arc in arcs:
        t, h = int(arc[0]), int(arc[1])
        if not (0 <= t < n and 0 <= h < n):
            raise ValueError(f"arc ({t}, {h}) has an endpoint outside 0..{n - 1}")
        cleaned.append((t, h))
    if len(set(cleaned)) != len(cleaned):
        seen, dup = set(), None
        for a in cleaned:
            if a in seen:
                dup = a
                break
            seen.add(a)
        raise ValueError(f"duplicate arc {dup}")
    return Digraph(n_vertices=n, arcs=tuple(sorted(cleaned)))


def adjacency_matrix(g: Digraph) -> np.ndarray:
    """0/1 matrix with A[i, j] = 1 exactly when (i, j) is an arc."""
    a = np.zeros((g.n_vertices, g.n_vertices), dtype=np.int64)
    for t, h in g.arcs:
        a[t, h] = 1
    return a


def digraph_from_adjacency(a: np.ndarray) -> Digraph:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"adjacency matrix must be square, got shape {a.shape}")
    if not np.isin(a, (0, 1)).all():
        raise ValueError("adjacency entries must be 0 or 1")
    ts, hs = np.nonzero(a)
    return build_digraph(a.shape[0], list(zip(ts.tolist(), hs.tolist())))


def line_digraph(g: Digraph) -> Digraph:
    """Digraph on the arcs of ``g``: arc a is joined to arc b iff head(a) = tail(b)."""
    pairs = []
    for a in range(g.n_arcs):
        head = g.arcs[a][1]
        for b in g.out_arcs[head]:
            pairs.append((a, b))
    if g.n_arcs == 0:
        raise ValueError("line digraph of an arcless digraph is empty")
    return build_digraph(g.n_arcs, pairs)


def degree_profile(g: Digraph) -> DegreeProfile:
    d_in = [0] * g.n_vertices
    d_out = [0] * g.n_vertices
    for t, h in g.arcs:
        d_out[t] += 1
        d_in[h] += 1
    return DegreeProfile(in_degrees=tuple(d_in), out_degrees=tuple(d_out))


def is_quantisable(g: Digraph) -> bool:
    """True iff every vertex has equal in- and out-degree."""
    prof = degree_profile(g)
    return prof.in_degrees == prof.out_degrees


def make_star(n_arcs: int) -> Digraph:
    """Star: one centre joined to n_arcs/2 leaves by opposite arc pairs.

    ``n_arcs`` counts directed arcs and must be even. Vertex 0 is the centre.
    """
    if n_arcs < 2 or n_arcs % 2 != 0:
        raise ValueError(f"arc count must be a positive even integer, got {n_arcs}")
    leaves = n_arcs // 2
    pairs = []
    for leaf in range(1, leaves + 1):
        pairs.append((0, leaf))
        pairs.append((leaf, 0))
    return build_digraph(leaves + 1, pairs)


def make_complete(n: int) -> Digraph:
    """Complete digraph with self-loops: all n^2 ordered pairs."""
    if n < 1:
        raise ValueError(f"vertex count must be positive, got {n}")
    return build_digraph(n, [(i, j) for i in range(n) for j in range(n)])


def make_lattice(d: int, length: int) -> Digraph:
    """Periodic lattice in ``d`` dimensions with ``length`` vertices per side.

    Each vertex is joined to its 2d periodic neighbours by opposite arc
    pairs, giving 2*d*length^d arcs for length >= 3. For length = 2 the
    +1 and -1 wraps coincide; the duplicate edge pair is merged, which
    halves the degree (use length >= 3 for regular-degree lattices).
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if length < 2:
        raise ValueError(f"side length must be >= 2, got {length}")
    n = length**d

    def index(coords):
        idx = 0
        for c in reversed(coords):
            idx = idx * length + c
        return idx

    pairs = set()
    for v in range(n):
        coords = []
        rem = v
        for _ in range(d):
            coords.append(rem % length)
            rem //= length
        for axis in range(d):
            for step in (1, -1):
                nb = list(coords)
                nb[axis] = (nb[axis] + step) % length
                pairs.add((v, index(nb)))
    return build_digraph(n, sorted(pairs))


def digraph_to_json(g: Digraph) -> str:
    return json.dumps({"n": g.n_vertices, "arcs": [list(a) for a in g.arcs]})


def digraph_from_json(text: str) -> Digraph:
    data = json.loads(text)
    if not isinstance(data, dict) or set(data) != {"n", "arcs"}:
        raise ValueError('graph JSON must be an object with exactly "n" and "arcs"')
    return build_digraph(int(data["n"]), [tuple(a) for a in data["arcs"]])


def adjacency_to_csv(g: Digraph, path) -> None:
    np.savetxt(path, adjacency_matrix(g), fmt="%d", delimiter=",")


def adjacency_from_csv(path) -> Digraph:
    a = np.loadtxt(path, delimiter=",", dtype=np.int64, ndmin=2)
    return digraph_from_adjacency(a)
