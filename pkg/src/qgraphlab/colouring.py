"""Edge-colourings: decompositions of an adjacency matrix into permutation matrices.

A colouring assigns one of d colours to every arc of a d-regular digraph so
that no vertex repeats a colour among its incoming or outgoing arcs. Colour c
is stored as a successor array ``perms[c]``: the colour-c arc leaving vertex v
points to ``perms[c][v]``, i.e. the permutation matrix rho_c has its row-v
entry in column perms[c][v] and the rho_c sum over colours reproduces the
adjacency matrix entrywise.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .graphs import Digraph, adjacency_matrix, build_digraph, make_complete

__all__ = [
    "EdgeColouring",
    "GroupSpec",
    "cyclic_group",
    "symmetric_group",
    "explicit_group",
    "colour_from_group",
    "random_latin_colouring",
    "verify_colouring",
    "line_graph_adjacency_from_colouring",
    "ring_colouring",
    "colouring_to_json",
    "colouring_from_json",
    "colouring_from_latin_csv",
]


@dataclass(frozen=True)
class EdgeColouring:
    """d permutation matrices (as successor arrays) summing to the host adjacency."""

    d: int
    perms: tuple[tuple[int, ...], ...]
    host: Digraph

    @property
    def n(self) -> int:
        return self.host.n_vertices

    def rho_matrix(self, c: int) -> np.ndarray:
        """Colour-c permutation matrix, rows indexed by arc tails."""
        m = np.zeros((self.n, self.n), dtype=np.int64)
        m[np.arange(self.n), np.asarray(self.perms[c])] = 1
        return m

    def arc_of(self, c: int, v: int) -> tuple[int, int]:
        """The colour-c arc leaving vertex v."""
        return (v, self.perms[c][v])


@dataclass(frozen=True)
class GroupSpec:
    """A finite group given by its Cayley table.

    ``table[a][b]`` is the index of the product of elements a and b; element 0
    must be the identity and the table must be a Latin square.
    """

    kind: str
    order: int
    table: tuple[tuple[int, ...], ...]


def _check_cayley(table) -> tuple[tuple[int, ...], ...]:
    n = len(table)
    rows = tuple(tuple(int(x) for x in row) for row in table)
    full = frozenset(range(n))
    for i, row in enumerate(rows):
        if frozenset(row) != full:
            raise ValueError(f"Cayley table row {i} is not a permutation of 0..{n - 1}")
    for j in range(n):
        if frozenset(row[j] for row in rows) != full:
            raise ValueError(f"Cayley table column {j} is not a permutation of 0..{n - 1}")
    if any(rows[0][j] != j for j in range(n)) or any(rows[i][0] != i for i in range(n)):
        raise ValueError("element 0 must act as the identity")
    return rows


def cyclic_group(n: int) -> GroupSpec:
    if n < 1:
        raise ValueError(f"group order must be positive, got {n}")
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    return GroupSpec(kind=f"cyclic({n})", order=n, table=table)


def symmetric_group(m: int) -> GroupSpec:
    """Symmetric group on m symbols; elements in lexicographic order (identity first)."""
    if m < 1:
        raise ValueError(f"symbol count must be positive, got {m}")
    elements = list(itertools.permutations(range(m)))
    index = {p: i for i, p in enumerate(elements)}
    table = tuple(
        tuple(index[tuple(p[q[x]] for x in range(m))] for q in elements) for p in elements
    )
    return GroupSpec(kind=f"symmetric({m})", order=len(elements), table=table)


def explicit_group(table) -> GroupSpec:
    rows = _check_cayley(table)
    return GroupSpec(kind=f"explicit({len(rows)})", order=len(rows), table=rows)


def colour_from_group(spec: GroupSpec) -> EdgeColouring:
    """Left-regular representation of a group as a colouring of the complete graph.

    Colour c is left multiplication by group element g_c, so rho_c has entry
    (k, l) = 1 iff g_k = g_c * g_l. For cyclic groups the colours are ordered
    g_1, ..., g_{n-1}, identity, which makes (rho_j)_{kl} = 1 iff
    k = (l + j) mod n for colour index j = 1..n.
    """
    table = _check_cayley(spec.table)
    n = spec.order
    if spec.kind.startswith("cyclic"):
        element_order = list(range(1, n)) + [0]
    else:
        element_order = list(range(n))
    perms = []
    for g in element_order:
        # successor array: row k = tail, column table[g][l] = head has the 1,
        # so succ(k) = l with table[g][l] = k, i.e. the inverse of l -> g*l.
        succ = [0] * n
        for l in range(n):
            succ[table[g][l]] = l
        perms.append(tuple(succ))
    return EdgeColouring(d=n, perms=tuple(perms), host=make_complete(n))


def _jm_move(cube: np.ndarray, improper, rng) -> tuple[int, int, int] | None:
    """One Jacobson-Matthews +/-1 move on the incidence cube; returns the
    new improper cell or None if the square is proper."""
    n = cube.shape[0]
    if improper is None:
        x = int(rng.integers(n))
        y = int(rng.integers(n))
        z1 = int(np.argmax(cube[x, y]))  # current symbol at (x, y)
        z = int(rng.integers(n - 1))
        if z >= z1:
            z += 1
        x1 = int(np.argmax(cube[:, y, z]))
        y1 = int(np.argmax(cube[x, :, z]))
    else:
        x, y, z = improper
        xs = np.flatnonzero(cube[:, y, z] == 1)
        ys = np.flatnonzero(cube[x, :, z] == 1)
        zs = np.flatnonzero(cube[x, y] == 1)
        x1 = int(xs[rng.integers(len(xs))])
        y1 = int(ys[rng.integers(len(ys))])
        z1 = int(zs[rng.integers(len(zs))])
    cube[x, y, z] += 1
    cube[x, y1, z1] += 1
    cube[x1, y, z1] += 1
    cube[x1, y1, z] += 1
    cube[x, y, z1] -= 1
    cube[x, y1, z] -= 1
    cube[x1, y, z] -= 1
    cube[x1, y1, z1] -= 1
    if cube[x1, y1, z1] < 0:
        return (x1, y1, z1)
    return None


def random_latin_colouring(n: int, seed: int) -> EdgeColouring:
    """Random decomposition of the all-ones matrix into n permutation matrices.

    A random Latin square of order n is sampled by Jacobson-Matthews moves
    started from the cyclic square with a burn-in of 10*n^3 moves (continuing
    past the burn-in until the square is proper). Symbol s gives colour s.
    Deterministic for a fixed seed.
    """
    if n < 1:
        raise ValueError(f"order must be positive, got {n}")
    rng = np.random.default_rng(seed)
    cube = np.zeros((n, n, n), dtype=np.int8)
    for r in range(n):
        for c in range(n):
            cube[r, c, (r + c) % n] = 1
    improper = None
    if n >= 2:
        for _ in range(10 * n**3):
            improper = _jm_move(cube, improper, rng)
        while improper is not None:
            improper = _jm_move(cube, improper, rng)
    square = np.argmax(cube, axis=2)
    perms = []
    for s in range(n):
        succ = [0] * n
        for r in range(n):
            succ[r] = int(np.flatnonzero(square[r] == s)[0])
        perms.append(tuple(succ))
    return EdgeColouring(d=n, perms=tuple(perms), host=make_complete(n))


def verify_colouring(c: EdgeColouring) -> bool:
    """True iff the perms are permutations with disjoint supports summing to
    the host adjacency matrix."""
    n = c.n
    if c.d != len(c.perms):
        return False
    total = np.zeros((n, n), dtype=np.int64)
    for perm in c.perms:
        if len(perm) != n or frozenset(perm) != frozenset(range(n)):
            return False
        total[np.arange(n), np.asarray(perm)] += 1
    if total.max() > 1:  # two colours share an arc slot
        return False
    return bool(np.array_equal(total, adjacency_matrix(c.host)))


def line_graph_adjacency_from_colouring(c: EdgeColouring) -> np.ndarray:
    """Adjacency of the host's line digraph in the colour-major arc labelling.

    Index (colour c, vertex v) refers to the colour-c arc leaving v; the
    result is the block matrix whose (i, j) block is rho_i for every j.
    """
    if not verify_colouring(c):
        raise ValueError("invalid colouring")
    n, d = c.n, c.d
    out = np.zeros((n * d, n * d), dtype=np.int64)
    for i in range(d):
        out[i * n : (i + 1) * n] = np.tile(c.rho_matrix(i), (1, d))
    return out


def ring_colouring(n: int) -> EdgeColouring:
    """Two-colouring of the n-cycle matching the up/down walk shifts.

    Colour 0 is the permutation matrix transporting amplitude from v to v+1
    (support on arcs (v+1, v)), colour 1 the inverse, so a block propagator
    built on this colouring moves spin-0 components up and spin-1 down.
    """
    if n < 3:
        raise ValueError(f"ring needs at least 3 vertices, got {n}")
    up = tuple((v - 1) % n for v in range(n))
    down = tuple((v + 1) % n for v in range(n))
    host = build_digraph(
        n, [(v, u) for v, u in enumerate(up)] + [(v, u) for v, u in enumerate(down)]
    )
    return EdgeColouring(d=2, perms=(up, down), host=host)


def colouring_to_json(c: EdgeColouring) -> str:
    return json.dumps({"n": c.n, "d": c.d, "perms": [list(p) for p in c.perms]})


def colouring_from_json(text: str, host: Digraph | None = None) -> EdgeColouring:
    data = json.loads(text)
    if not isinstance(data, dict) or set(data) != {"n", "d", "perms"}:
        raise ValueError('colouring JSON must have exactly "n", "d" and "perms"')
    n, d = int(data["n"]), int(data["d"])
    perms = tuple(tuple(int(x) for x in p) for p in data["perms"])
    if host is None:
        host = make_complete(n) if d == n else _host_from_perms(n, perms)
    col = EdgeColouring(d=d, perms=perms, host=host)
    if not verify_colouring(col):
        raise ValueError("colouring does not match its host graph")
    return col


def _host_from_perms(n: int, perms) -> Digraph:
    return build_digraph(n, [(v, p[v]) for p in perms for v in range(n)])


def colouring_from_latin_csv(path) -> EdgeColouring:
    """Read a Latin square of colour indices from CSV; cell (r, c) is the
    colour of arc (r, c) of the complete graph."""
    square = np.loadtxt(path, delimiter=",", dtype=np.int64, ndmin=2)
    n = square.shape[0]
    if square.shape != (n, n):
        raise ValueError(f"Latin square must be square, got shape {square.shape}")
    perms = []
    for s in range(n):
        rows, cols = np.nonzero(square == s)
        if len(rows) != n or frozenset(rows.tolist()) != frozenset(range(n)):
            raise ValueError(f"colour {s} does not appear exactly once per row")
        succ = [0] * n
        for r, c in zip(rows.tolist(), cols.tolist()):
            succ[r] = c
        perms.append(tuple(succ))
    col = EdgeColouring(d=n, perms=tuple(perms), host=make_complete(n))
    if not verify_colouring(col):
        raise ValueError("CSV square is not a Latin square")
    return col
