"""Eigenphase statistics: traces, a periodic-orbit trace oracle, nearest
neighbour spacings and the random-matrix reference curves."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import StochasticMatrix, _as_matrix
from .propagator import Propagator

__all__ = [
    "EigenphaseSet",
    "SpacingHistogram",
    "eigenphases",
    "trace_power",
    "periodic_orbit_trace",
    "nns",
    "circular_spacings",
    "remove_coin_phases",
    "rmt_reference",
    "spacing_cdf",
    "ks_distance",
    "star_formfactor_reference",
    "diagonal_term",
]


@dataclass(frozen=True)
class EigenphaseSet:
    """Sorted eigenphases of a unitary matrix, in [0, 2 pi)."""

    phases: np.ndarray

    def __post_init__(self):
        p = np.sort(np.asarray(self.phases, dtype=float))
        object.__setattr__(self, "phases", p)

    @property
    def size(self) -> int:
        return len(self.phases)

    @property
    def mean_density(self) -> float:
        return self.size / (2 * np.pi)


@dataclass(frozen=True)
class SpacingHistogram:
    """Normalized histogram of unfolded nearest-neighbour spacings."""

    bin_edges: np.ndarray
    density: np.ndarray
    count: int


def eigenphases(p: Propagator | np.ndarray) -> EigenphaseSet:
    """Arguments of the eigenvalues, sorted into [0, 2 pi).

    Raises if any eigenvalue sits further than 1e-6 from the unit circle.
    """
    m = p.matrix if isinstance(p, Propagator) else np.asarray(p, dtype=complex)
    eigs = np.linalg.eigvals(m)
    off = np.abs(np.abs(eigs) - 1.0).max()
    if off > 1e-6:
        raise ValueError(f"eigenvalue modulus off the unit circle by {off:.3e}")
    return EigenphaseSet(phases=np.angle(eigs) % (2 * np.pi))


def trace_power(p: Propagator | np.ndarray, n: int) -> complex:
    """Tr S^n by repeated matrix multiplication."""
    if n < 1:
        raise ValueError(f"power must be >= 1, got {n}")
    m = p.matrix if isinstance(p, Propagator) else np.asarray(p, dtype=complex)
    return complex(np.trace(np.linalg.matrix_power(m, n)))


def periodic_orbit_trace(p: Propagator, n: int, n_max: int = 12) -> complex:
    """Tr S^n summed over closed arc paths of length n.

    Each closed vertex code contributes the product of coupling weights
    between consecutive arcs times exp(i k L) with L the summed arc lengths;
    paths are enumerated by depth-first traversal of the line digraph, one
    term per starting arc. Capped at ``n_max`` to bound the path explosion.
    """
    if n < 1:
        raise ValueError(f"orbit length must be >= 1, got {n}")
    if n > n_max:
        raise ValueError(f"orbit length {n} exceeds the cap n_max = {n_max}")
    if p.graph is None:
        raise ValueError(
            f"{p.provenance} propagator has no line-digraph structure to enumerate"
        )
    coupling = p.coupling()
    phase = np.exp(1j * p.k * p.arc_lengths)
    # successor arcs in the matrix labelling: b follows a iff head(a) = tail(b)
    heads = np.asarray(p.arc_heads)
    tails = np.asarray(p.arc_tails)
    succ = [np.flatnonzero(tails == heads[a]).tolist() for a in range(p.dim)]

    total = 0.0 + 0.0j

    def walk(first: int, current: int, depth: int, weight: complex) -> None:
        nonlocal total
        if depth == n:
            total += weight * coupling[current, first] * phase[current]
            return
        w = weight * phase[current]
        for nxt in succ[current]:
            walk(first, nxt, depth + 1, w * coupling[current, nxt])

    for start in range(p.dim):
        walk(start, start, 1, 1.0 + 0.0j)
    return complex(total)


def circular_spacings(phases: EigenphaseSet | np.ndarray) -> np.ndarray:
    """Unfolded circular gaps s_j = N (theta_{j+1} - theta_j) / (2 pi).

    The last gap wraps around the circle, so the spacings sum to N exactly
    and their mean is 1.
    """
    p = phases.phases if isinstance(phases, EigenphaseSet) else np.sort(np.asarray(phases))
    n = len(p)
    if n < 2:
        raise ValueError(f"need at least 2 phases, got {n}")
    gaps = np.diff(p, append=p[0] + 2 * np.pi)
    return n * gaps / (2 * np.pi)


def nns(phase_sets, bin_width: float = 0.05, s_max: float | None = None) -> SpacingHistogram:
    """Nearest-neighbour spacing histogram pooled over eigenphase sets.

    Degenerate (zero) spacings are retained. The density integrates to 1
    over [0, s_max]; s_max defaults to covering every observed spacing.
    """
    if isinstance(phase_sets, EigenphaseSet):
        phase_sets = [phase_sets]
    samples = np.concatenate([circular_spacings(ps) for ps in phase_sets])
    if s_max is None:
        s_max = float(np.ceil(samples.max() / bin_width) * bin_width)
        s_max = max(s_max, bin_width)
    edges = np.arange(0.0, s_max + bin_width / 2, bin_width)
    density, edges = np.histogram(np.clip(samples, 0.0, s_max - 1e-12), bins=edges, density=True)
    return SpacingHistogram(bin_edges=edges, density=density, count=len(samples))


def remove_coin_phases(phases: np.ndarray, coin_phases: np.ndarray) -> np.ndarray:
    """Drop, for each coin eigenphase, the circularly nearest spectrum phase.

    Regular propagators always contain the coin spectrum (the uniform vector
    over vertices is fixed by every colour permutation), which distorts the
    spacing statistics; this strips that part before unfolding.
    """
    remaining = np.sort(np.asarray(phases, dtype=float)).tolist()
    for target in np.asarray(coin_phases, dtype=float):
        diffs = np.abs(np.asarray(remaining) - target)
        dist = np.minimum(diffs, 2 * np.pi - diffs)
        remaining.pop(int(np.argmin(dist)))
    return np.asarray(remaining)


def rmt_reference(kind: str, x: float, statistic: str = "formfactor") -> float:
    """Random-matrix reference value at x.

    Form factors: CUE tau for tau <= 1 then 1, COE 2 tau - tau log(1 + 2 tau)
    on [0, 1) (the branch consistent with the small-tau series
    2 tau - 2 tau^2 + 2 tau^3 and with sampled COE matrices), Poisson 1.
    Spacing densities: Poisson exp(-s); CUE and COE use the Wigner surmises
    for beta = 2 and beta = 1 (desk-scale approximation).
    """
    if statistic == "formfactor":
        tau = float(x)
        if kind == "CUE":
            if tau < 0:
                raise ValueError(f"tau must be >= 0, got {tau}")
            return min(tau, 1.0)
        if kind == "COE":
            if not 0 <= tau < 1:
                raise ValueError(f"COE form factor needs tau in [0, 1), got {tau}")
            return 2 * tau - tau * math.log(1 + 2 * tau)
        if kind == "Poisson":
            return 1.0
        raise ValueError(f"unknown ensemble kind {kind!r}")
    if statistic == "spacing":
        s = float(x)
        if s < 0:
            raise ValueError(f"spacing must be >= 0, got {s}")
        if kind == "Poisson":
            return math.exp(-s)
        if kind == "CUE":
            return (32 / math.pi**2) * s**2 * math.exp(-4 * s**2 / math.pi)
        if kind == "COE":
            return (math.pi * s / 2) * math.exp(-math.pi * s**2 / 4)
        raise ValueError(f"unknown ensemble kind {kind!r}")
    raise ValueError(f"unknown statistic {statistic!r}")


def spacing_cdf(kind: str, s) -> np.ndarray:
    """CDF of the spacing references, for Kolmogorov-Smirnov comparisons."""
    s = np.asarray(s, dtype=float)
    if kind == "Poisson":
        return 1.0 - np.exp(-s)
    if kind == "CUE":
        from math import erf

        erf_vec = np.vectorize(erf)
        return erf_vec(2 * s / np.sqrt(np.pi)) - (4 * s / np.pi) * np.exp(-4 * s**2 / np.pi)
    if kind == "COE":
        return 1.0 - np.exp(-np.pi * s**2 / 4)
    raise ValueError(f"unknown ensemble kind {kind!r}")


def ks_distance(samples: np.ndarray, kind: str) -> float:
    """Kolmogorov-Smirnov sup distance between sample spacings and a reference CDF."""
    s = np.sort(np.asarray(samples, dtype=float))
    n = len(s)
    if n == 0:
        raise ValueError("no samples")
    cdf = spacing_cdf(kind, s)
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def star_formfactor_reference(tau: float, include_higher_order: bool = False) -> float:
    """Leading small-tau form factor exp(-4 tau) of the star family.

    The flagged correction adds the 8 tau^3 + (32/3) tau^4 + (16/3) tau^5
    terms; only the exponential leading term is used quantitatively.
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    value = math.exp(-4 * tau)
    if include_higher_order:
        value += 8 * tau**3 + (32 / 3) * tau**4 + (16 / 3) * tau**5
    return value


def diagonal_term(t: StochasticMatrix | np.ndarray, n: int, g: int = 1) -> float:
    """Cyclic-orbit-pair contribution g (n / N) Tr T^n to the form factor."""
    if g not in (1, 2):
        raise ValueError(f"symmetry factor must be 1 or 2, got {g}")
    if n < 1:
        raise ValueError(f"power must be >= 1, got {n}")
    m = _as_matrix(t)
    big_n = m.shape[0]
    return float(g * n / big_n * np.trace(np.linalg.matrix_power(m, n)).real)
