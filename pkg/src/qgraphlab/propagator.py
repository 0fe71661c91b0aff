"""Unitary propagators on the arc space of a digraph.

Three constructions are provided:

* ``build_propagator``: S = D(k) V from per-vertex unitary scattering
  matrices, with V[(i j), (j j')] = sigma^(j)[i, j'] supported on the line
  digraph and D attaching the phase exp(i k L_a) of the row arc.
* ``build_star_propagator``: the star graph is handled on its full arc space,
  S = D(k) (-I + (2/n) J); leaf reflection phases are absorbed into the arc
  lengths.
* ``build_regular_propagator``: S = (oplus rho_c) (C(k) otimes I_n) from an
  edge-colouring and a coin, the same local scattering at every vertex.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .colouring import EdgeColouring, verify_colouring
from .graphs import Digraph, degree_profile, is_quantisable

__all__ = [
    "Coin",
    "Propagator",
    "UNITARITY_TOL",
    "ks_vertex_scattering",
    "star_scattering",
    "fourier_coin",
    "haar_unitary",
    "ks_scattering_set",
    "haar_scattering_set",
    "random_arc_lengths",
    "build_propagator",
    "build_star_propagator",
    "build_regular_propagator",
    "block_diagonalise_cyclic",
    "propagator_to_json",
]

UNITARITY_TOL = 1e-12


def _check_unitary(m: np.ndarray, tol: float, what: str) -> None:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be square, got shape {m.shape}")
    err = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()
    if err > tol:
        raise ValueError(f"{what} is not unitary (max |S^dag S - I| = {err:.3e})")


@dataclass(frozen=True)
class Coin:
    """Local scattering matrix sigma with one arc length per colour.

    The realised coin at wavenumber k is C(k) = diag(exp(i k L_j)) sigma.
    """

    sigma: np.ndarray
    lengths: np.ndarray

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=complex)
        lengths = np.asarray(self.lengths, dtype=float)
        _check_unitary(sigma, UNITARITY_TOL, "coin sigma")
        if lengths.shape != (sigma.shape[0],):
            raise ValueError(
                f"need one length per colour: got {lengths.shape} for d = {sigma.shape[0]}"
            )
        if not (lengths > 0).all():
            raise ValueError("coin lengths must be strictly positive")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "lengths", lengths)

    @property
    def d(self) -> int:
        return self.sigma.shape[0]

    def matrix(self, k: float) -> np.ndarray:
        """Realised coin C(k) = D(k) sigma."""
        return np.exp(1j * k * self.lengths)[:, None] * self.sigma


@dataclass(frozen=True)
class Propagator:
    """Unitary arc-space propagator with its length and provenance metadata.

    ``phase_classes`` groups arcs that share one free phase under ensemble
    averaging: all distinct for generic graphs, one class per colour for
    regular graphs. ``graph`` (with ``arc_tails``/``arc_heads`` giving the
    arc of each matrix index) is set when the matrix is supported on a line
    digraph; the star construction couples all arcs and leaves it None.
    """

    matrix: np.ndarray
    k: float
    arc_lengths: np.ndarray
    provenance: str
    graph: Digraph | None = None
    arc_tails: np.ndarray | None = None
    arc_heads: np.ndarray | None = None
    phase_classes: np.ndarray | None = None
    coin: Coin | None = None
    colouring: EdgeColouring | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        _check_unitary(m, UNITARITY_TOL, f"{self.provenance} propagator")
        lengths = np.asarray(self.arc_lengths, dtype=float)
        if lengths.shape != (m.shape[0],):
            raise ValueError("need one arc length per matrix dimension")
        if not (lengths > 0).all():
            raise ValueError("arc lengths must be strictly positive")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "arc_lengths", lengths)
        if self.phase_classes is None:
            object.__setattr__(self, "phase_classes", np.arange(m.shape[0]))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def coupling(self) -> np.ndarray:
        """The unitary V with the arc phases stripped: S = diag(e^{ikL}) V."""
        return np.exp(-1j * self.k * self.arc_lengths)[:, None] * self.matrix


def ks_vertex_scattering(d: int) -> np.ndarray:
    """Continuity/flux-conservation vertex matrix: -delta_ij + 2/d."""
    if d < 1:
        raise ValueError(f"degree must be >= 1, got {d}")
    return (2.0 / d) * np.ones((d, d)) - np.eye(d)


def star_scattering(n_arcs: int) -> np.ndarray:
    """Central scattering of a star on its full arc space: -delta_ij + 2/n."""
    if n_arcs < 1:
        raise ValueError(f"arc count must be >= 1, got {n_arcs}")
    return ks_vertex_scattering(n_arcs)


def fourier_coin(d: int, lengths=None) -> Coin:
    """Coin whose sigma is the Fourier matrix exp(2 pi i j l / d) / sqrt(d), j, l = 1..d."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    idx = np.arange(1, d + 1)
    sigma = np.exp(2j * np.pi * np.outer(idx, idx) / d) / np.sqrt(d)
    if lengths is None:
        lengths = np.ones(d)
    return Coin(sigma=sigma, lengths=lengths)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * np.exp(-1j * np.angle(np.diag(r)))[None, :]


def ks_scattering_set(g: Digraph) -> dict[int, np.ndarray]:
    """The -delta + 2/d matrix at every vertex of g."""
    prof = degree_profile(g)
    return {
        v: ks_vertex_scattering(prof.out_degrees[v])
        for v in range(g.n_vertices)
        if prof.out_degrees[v] > 0
    }


def haar_scattering_set(g: Digraph, seed: int) -> dict[int, np.ndarray]:
    """Independent Haar-random unitaries at every vertex of g."""
    rng = np.random.default_rng(seed)
    prof = degree_profile(g)
    return {
        v: haar_unitary(prof.out_degrees[v], rng)
        for v in range(g.n_vertices)
        if prof.out_degrees[v] > 0
    }


def random_arc_lengths(n_arcs: int, seed: int) -> np.ndarray:
    """I.i.d. lengths uniform on (0, 1], rationally independent with probability 1."""
    rng = np.random.default_rng(seed)
    return 1.0 - rng.random(n_arcs)


def _as_length_array(g: Digraph, lengths) -> np.ndarray:
    if isinstance(lengths, dict):
        try:
            arr = np.array([float(lengths[arc]) for arc in g.arcs])
        except KeyError as missing:
            raise ValueError(f"no length for arc {missing.args[0]}") from None
    else:
        arr = np.asarray(lengths, dtype=float)
        if arr.shape != (g.n_arcs,):
            raise ValueError(f"need {g.n_arcs} arc lengths, got shape {arr.shape}")
    if not (arr > 0).all():
        raise ValueError("arc lengths must be strictly positive")
    return arr


def build_propagator(g: Digraph, scattering: dict[int, np.ndarray], lengths, k: float) -> Propagator:
    """Generic quantum-graph propagator S = D(k) V on the arcs of g.

    ``scattering`` maps each vertex to a unitary of dimension equal to its
    degree; rows follow the incoming arcs sorted by tail, columns the
    outgoing arcs sorted by head. The entry between row arc (i j) and column
    arc (j j') is exp(i k L_{ij}) sigma^(j)[i, j'].
    """
    if not is_quantisable(g):
        raise ValueError("digraph is not quantisable: in/out degrees differ at some vertex")
    arr = _as_length_array(g, lengths)
    n_e = g.n_arcs
    s = np.zeros((n_e, n_e), dtype=complex)
    for v in range(g.n_vertices):
        rows = g.in_arcs[v]
        cols = g.out_arcs[v]
        deg = len(rows)
        if deg == 0:
            continue
        if v not in scattering:
            raise ValueError(f"no scattering matrix for vertex {v}")
        sigma = np.asarray(scattering[v], dtype=complex)
        if sigma.shape != (deg, deg):
            raise ValueError(
                f"scattering at vertex {v} has shape {sigma.shape}, degree is {deg}"
            )
        _check_unitary(sigma, UNITARITY_TOL, f"scattering at vertex {v}")
        block = np.exp(1j * k * arr[list(rows)])[:, None] * sigma
        s[np.ix_(rows, cols)] = block
    return Propagator(
        matrix=s,
        k=k,
        arc_lengths=arr,
        provenance="generic",
        graph=g,
        arc_tails=g.arc_tails,
        arc_heads=g.arc_heads,
    )


def build_star_propagator(n_arcs: int, lengths=None, k: float = 0.0) -> Propagator:
    """Star propagator S = D(k) (-I + (2/n) J) on the full n-dimensional arc space."""
    base = star_scattering(n_arcs)
    if lengths is None:
        arr = np.ones(n_arcs)
    else:
        arr = np.asarray(lengths, dtype=float)
        if arr.shape != (n_arcs,):
            raise ValueError(f"need {n_arcs} arc lengths, got shape {arr.shape}")
        if not (arr > 0).all():
            raise ValueError("arc lengths must be strictly positive")
    s = np.exp(1j * k * arr)[:, None] * base
    return Propagator(matrix=s, k=k, arc_lengths=arr, provenance="star")


def build_regular_propagator(colouring: EdgeColouring, coin: Coin, k: float) -> Propagator:
    """Regular propagator S = (oplus rho_c)(C(k) otimes I_n).

    Block row i, block column j holds C(k)_{ij} rho_i; the matrix index
    (colour c, vertex v) refers to the colour-c arc leaving v, so arc phases
    carry the colour's length.
    """
    if coin.d != colouring.d:
        raise ValueError(f"coin dimension {coin.d} != colour count {colouring.d}")
    if not verify_colouring(colouring):
        raise ValueError("invalid colouring")
    n, d = colouring.n, colouring.d
    c_k = coin.matrix(k)
    s = np.zeros((n * d, n * d), dtype=complex)
    for i in range(d):
        rho = colouring.rho_matrix(i).astype(complex)
        for j in range(d):
            s[i * n : (i + 1) * n, j * n : (j + 1) * n] = c_k[i, j] * rho
    tails = np.tile(np.arange(n), d)
    heads = np.concatenate([np.asarray(colouring.perms[c]) for c in range(d)])
    return Propagator(
        matrix=s,
        k=k,
        arc_lengths=np.repeat(coin.lengths, n),
        provenance="regular",
        graph=colouring.host,
        arc_tails=tails,
        arc_heads=heads,
        phase_classes=np.repeat(np.arange(d), n),
        coin=coin,
        colouring=colouring,
    )


def block_diagonalise_cyclic(coin: Coin, n: int, k: float) -> list[np.ndarray]:
    """The n sector matrices S_m = diag(e^{2 pi i j m / n}, j = 1..n) C(k).

    For the cyclic colouring of the complete graph the union of their spectra
    is the spectrum of the full n^2-dimensional regular propagator.
    """
    if coin.d != n:
        raise ValueError(f"coin dimension {coin.d} != group order {n}")
    c_k = coin.matrix(k)
    j = np.arange(1, n + 1)
    return [np.exp(2j * np.pi * j * m / n)[:, None] * c_k for m in range(1, n + 1)]


def propagator_to_json(p: Propagator, **metadata) -> str:
    """Row-major re/im dump of the matrix plus provenance metadata."""
    payload = {
        "dim": p.dim,
        "k": p.k,
        "provenance": p.provenance,
        "arc_lengths": p.arc_lengths.tolist(),
        "matrix": [[float(z.real), float(z.imag)] for z in p.matrix.ravel()],
    }
    payload.update(metadata)
    return json.dumps(payload)
