"""Classical stochastic dynamics underlying a unitary arc propagator.

The map S -> T with T_ab = |S_ab|^2 sends a unitary to a doubly stochastic
matrix. The spectral gap of T (decay rate towards the uniform stationary
state) controls how fast Tr T^n approaches 1, which in turn bounds where
the spectral statistics of the quantum side can stay universal.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .graphs import make_lattice
from .propagator import Propagator

__all__ = [
    "StochasticMatrix",
    "GapReport",
    "GapScalingFit",
    "to_stochastic",
    "perron_check",
    "spectral_gap",
    "leading_eigenvalues",
    "diffusive_transition",
    "diffusion_spectrum_prediction",
    "gap_scaling_report",
    "gap_report_to_json",
    "spectrum_to_csv",
]

ROW_SUM_TOL = 1e-12


def _as_matrix(t) -> np.ndarray:
    if isinstance(t, StochasticMatrix):
        return t.matrix
    return np.asarray(t, dtype=float)


@dataclass(frozen=True)
class StochasticMatrix:
    """Row-stochastic nonnegative matrix on the arc space."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"transition matrix must be square, got shape {m.shape}")
        if (m < -ROW_SUM_TOL).any():
            raise ValueError("transition probabilities must be nonnegative")
        err = np.abs(m.sum(axis=1) - 1.0).max()
        if err > ROW_SUM_TOL:
            raise ValueError(f"rows must sum to 1 (max deviation {err:.3e})")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class GapReport:
    """Modulus-sorted spectrum of a stochastic matrix with its decay rate.

    ``gap`` is -log |Lambda_1|, the per-step rate at which Tr T^n - 1 decays;
    it is 0 when the subleading modulus is 1 and infinite when it is 0.
    """

    leading: float
    subleading_modulus: float
    gap: float
    spectrum: np.ndarray


@dataclass(frozen=True)
class GapScalingFit:
    """Least-squares slope of log(gap) against log(size)."""

    alpha: float
    residual: float
    sizes: np.ndarray
    gaps: np.ndarray


def to_stochastic(p: Propagator) -> StochasticMatrix:
    """Entrywise |S|^2 of a unitary propagator; doubly stochastic."""
    t = np.abs(np.asarray(p.matrix)) ** 2
    return StochasticMatrix(matrix=t)


def perron_check(t) -> bool:
    """True iff the uniform vector is fixed (within 1e-10) and the spectral
    radius is 1."""
    m = _as_matrix(t)
    n = m.shape[0]
    uniform = np.full(n, 1.0 / n)
    if np.abs(m @ uniform - uniform).max() > 1e-10:
        return False
    radius = np.abs(np.linalg.eigvals(m)).max()
    return bool(abs(radius - 1.0) <= 1e-10)


def spectral_gap(t) -> GapReport:
    """Full dense spectrum of T sorted by modulus, with gap -log |Lambda_1|.

    T is generally non-normal, so no symmetry is assumed anywhere.
    """
    m = _as_matrix(t)
    err = np.abs(m.sum(axis=1) - 1.0).max()
    if (m < -ROW_SUM_TOL).any() or err > 1e-10:
        raise ValueError(f"input is not stochastic (row-sum deviation {err:.3e})")
    eigs = np.linalg.eigvals(m)
    order = np.argsort(-np.abs(eigs))
    eigs = eigs[order]
    leading = float(np.abs(eigs[0]))
    if m.shape[0] == 1:
        return GapReport(leading=leading, subleading_modulus=0.0, gap=math.inf, spectrum=eigs)
    sub = float(np.abs(eigs[1]))
    if sub >= 1.0 - 1e-12:
        gap = 0.0
    elif sub < 1e-14:  # below eigensolver noise: treat as exactly zero
        gap = math.inf
    else:
        gap = -math.log(sub)
    return GapReport(leading=leading, subleading_modulus=sub, gap=gap, spectrum=eigs)


def leading_eigenvalues(t, k: int = 12) -> np.ndarray:
    """The k modulus-largest eigenvalues, via sparse Arnoldi for big matrices.

    Cross-checked against the dense route in the test suite; use this for
    lattice transition matrices too large to eigendecompose densely.
    """
    m = _as_matrix(t)
    n = m.shape[0]
    if n <= 600 or k >= n - 2:
        eigs = np.linalg.eigvals(m)
        return eigs[np.argsort(-np.abs(eigs))][:k]
    sparse = scipy.sparse.csr_matrix(m)
    v0 = np.full(n, 1.0 / n)
    eigs = scipy.sparse.linalg.eigs(
        sparse, k=k, which="LM", v0=v0, ncv=max(4 * k, 40), return_eigenvectors=False
    )
    return eigs[np.argsort(-np.abs(eigs))]


def diffusive_transition(d: int, length: int) -> StochasticMatrix:
    """Markov chain on the arcs of the periodic lattice: every arc continues
    to each of the 2d arcs leaving its head with probability 1/(2d)."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if length < 3:
        raise ValueError(f"side length must be >= 3, got {length}")
    g = make_lattice(d, length)
    n_e = g.n_arcs
    prob = 1.0 / (2 * d)
    t = np.zeros((n_e, n_e))
    for a in range(n_e):
        head = g.arcs[a][1]
        for b in g.out_arcs[head]:
            t[a, b] = prob
    return StochasticMatrix(matrix=t)


def diffusion_spectrum_prediction(d: int, length: int, m) -> float:
    """Continuum eigenvalue exp(-(4 pi^2 D / L^2) sum m_i^2) with D = 1/(2d)."""
    m = np.atleast_1d(np.asarray(m, dtype=float))
    if m.shape != (d,):
        raise ValueError(f"mode vector must have {d} components, got shape {m.shape}")
    diff_const = 1.0 / (2 * d)
    return float(np.exp(-4 * np.pi**2 * diff_const / length**2 * np.sum(m**2)))


def gap_scaling_report(family) -> GapScalingFit:
    """Fit gap ~ size^(-alpha) over a family of stochastic matrices.

    Returns the least-squares slope of log(gap) against log(n_E) (negated,
    so alpha > 0 for closing gaps) and the residual RMS of the fit.
    """
    members = list(family)
    if len(members) < 2:
        raise ValueError(f"need at least 2 family members, got {len(members)}")
    sizes = np.array([_as_matrix(t).shape[0] for t in members], dtype=float)
    gaps = np.array([spectral_gap(t).gap for t in members])
    if not np.isfinite(gaps).all() or (gaps <= 0).any():
        raise ValueError("every family member needs a finite positive gap")
    x = np.log(sizes)
    y = np.log(gaps)
    coeffs, res, *_ = np.polyfit(x, y, 1, full=True)
    rms = float(np.sqrt(res[0] / len(x))) if len(res) else 0.0
    return GapScalingFit(alpha=float(-coeffs[0]), residual=rms, sizes=sizes, gaps=gaps)


def gap_report_to_json(report: GapReport) -> str:
    return json.dumps(
        {
            "leading": report.leading,
            "subleading_modulus": report.subleading_modulus,
            "gap": report.gap if math.isfinite(report.gap) else None,
            "spectrum": [[float(z.real), float(z.imag)] for z in report.spectrum],
        }
    )


def spectrum_to_csv(eigenvalues, path) -> None:
    """Write eigenvalues as CSV rows (modulus, argument)."""
    eigs = np.asarray(eigenvalues, dtype=complex)
    rows = np.column_stack([np.abs(eigs), np.angle(eigs)])
    np.savetxt(path, rows, fmt="%.17g", delimiter=",", header="modulus,argument", comments="")
