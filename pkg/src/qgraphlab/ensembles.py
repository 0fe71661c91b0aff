"""Ensemble averaging over propagators sharing one classical transition matrix.

Every realization rephases the fixed coupling V of a base propagator with a
fresh unitary diagonal, which sweeps the ensemble of unitaries having the
same entrywise |S|^2. Two modes are provided:

* ``random-phase``: i.i.d. uniform phases, one per phase class of the base
  propagator (per arc for generic graphs; per colour for regular graphs,
  which preserves the length correlations those graphs are built on).
* ``k-sweep``: a fresh wavenumber drawn uniformly from ``k_window`` multiplies
  the fixed arc lengths.

Realizations are seeded independently from a master seed via SeedSequence
spawning, so aggregation is order-independent and thread counts do not
affect results.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .propagator import Propagator
from .spectral import EigenphaseSet, circular_spacings, nns, remove_coin_phases

__all__ = [
    "EnsembleSpec",
    "FormFactorCurve",
    "realization_matrix",
    "ensemble_eigenphases",
    "ensemble_spacings",
    "form_factor",
    "nns_ensemble",
    "formfactor_to_csv",
    "spacing_histogram_to_csv",
]


@dataclass(frozen=True)
class EnsembleSpec:
    """A base propagator plus the averaging recipe."""

    base: Propagator
    mode: str = "random-phase"
    realizations: int = 100
    seed: int = 0
    k_window: tuple[float, float] = (0.0, 1.0e5)

    def __post_init__(self):
        if self.mode not in ("random-phase", "k-sweep"):
            raise ValueError(f"unknown averaging mode {self.mode!r}")
        if self.realizations < 1:
            raise ValueError(f"realization count must be >= 1, got {self.realizations}")


@dataclass(frozen=True)
class FormFactorCurve:
    """Ensemble-averaged |Tr S^n|^2 / N on a grid of tau = n / N."""

    tau: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    realizations: int
    n_values: np.ndarray


def _class_count(p: Propagator) -> int:
    return int(np.asarray(p.phase_classes).max()) + 1


def realization_matrix(spec: EnsembleSpec, index: int) -> np.ndarray:
    """The index-th realization matrix (for inspection; the statistics
    pipelines generate realizations internally)."""
    child = np.random.SeedSequence(spec.seed).spawn(spec.realizations)[index]
    phases = _draw_phases(spec, np.random.default_rng(child))
    return np.exp(1j * phases[np.asarray(spec.base.phase_classes)])[:, None] * spec.base.coupling()


def _draw_phases(spec: EnsembleSpec, rng: np.random.Generator) -> np.ndarray:
    """Per-class diagonal phases for one realization."""
    n_classes = _class_count(spec.base)
    if spec.mode == "random-phase":
        return rng.uniform(0.0, 2 * np.pi, size=n_classes)
    k = rng.uniform(*spec.k_window)
    # one length per class: classes are contiguous blocks of equal length
    classes = np.asarray(spec.base.phase_classes)
    lengths = np.empty(n_classes)
    lengths[classes] = spec.base.arc_lengths
    return k * lengths


def _realization_phases_and_coin(spec: EnsembleSpec, child) -> tuple[np.ndarray, np.ndarray | None]:
    rng = np.random.default_rng(child)
    class_phases = _draw_phases(spec, rng)
    coin_matrix = None
    if spec.base.coin is not None:
        d = spec.base.coin.d
        coin_matrix = np.exp(1j * class_phases[:d])[:, None] * spec.base.coin.sigma
    return class_phases, coin_matrix


def ensemble_eigenphases(
    spec: EnsembleSpec, remove_coin: bool = False, workers: int = 1
) -> list[EigenphaseSet]:
    """Eigenphase sets of every realization, optionally with the coin's own
    spectrum stripped from each."""
    if remove_coin and spec.base.coin is None:
        raise ValueError("base propagator carries no coin to remove")
    coupling = spec.base.coupling()
    classes = np.asarray(spec.base.phase_classes)
    children = np.random.SeedSequence(spec.seed).spawn(spec.realizations)

    def one(index: int) -> EigenphaseSet:
        class_phases, coin_matrix = _realization_phases_and_coin(spec, children[index])
        matrix = np.exp(1j * class_phases[classes])[:, None] * coupling
        phases = np.angle(np.linalg.eigvals(matrix)) % (2 * np.pi)
        if remove_coin:
            coin_phases = np.angle(np.linalg.eigvals(coin_matrix)) % (2 * np.pi)
            phases = remove_coin_phases(phases, coin_phases)
        return EigenphaseSet(phases=phases)

    if workers <= 1:
        return [one(i) for i in range(spec.realizations)]
    results: list[EigenphaseSet | None] = [None] * spec.realizations
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for i, ps in zip(range(spec.realizations), pool.map(one, range(spec.realizations))):
            results[i] = ps
    return results  # type: ignore[return-value]


def form_factor(
    spec: EnsembleSpec,
    n_list,
    remove_coin: bool = False,
    workers: int = 1,
    phase_sets: list[EigenphaseSet] | None = None,
) -> FormFactorCurve:
    """K(tau) = <|Tr S^n|^2> / N on tau = n / N for each n in n_list.

    The traces are evaluated as eigenphase sums, which lets the same
    realizations feed the spacing statistics. ``phase_sets`` can reuse a
    previous ensemble_eigenphases run.
    """
    n_values = np.asarray(list(n_list), dtype=int)
    if n_values.size == 0:
        raise ValueError("empty n_list")
    if (n_values < 1).any():
        raise ValueError("trace powers must be >= 1")
    if phase_sets is None:
        phase_sets = ensemble_eigenphases(spec, remove_coin=remove_coin, workers=workers)
    dim = phase_sets[0].size
    samples = np.empty((len(phase_sets), n_values.size))
    for r, ps in enumerate(phase_sets):
        traces = np.exp(1j * np.outer(n_values, ps.phases)).sum(axis=1)
        samples[r] = np.abs(traces) ** 2 / dim
    values = samples.mean(axis=0)
    if len(phase_sets) > 1:
        stderr = samples.std(axis=0, ddof=1) / np.sqrt(len(phase_sets))
    else:
        stderr = np.zeros_like(values)
    return FormFactorCurve(
        tau=n_values / dim,
        values=values,
        stderr=stderr,
        realizations=len(phase_sets),
        n_values=n_values,
    )


def ensemble_spacings(
    spec: EnsembleSpec,
    remove_coin: bool = False,
    workers: int = 1,
    phase_sets: list[EigenphaseSet] | None = None,
) -> np.ndarray:
    """All unfolded nearest-neighbour spacings pooled over realizations."""
    if phase_sets is None:
        phase_sets = ensemble_eigenphases(spec, remove_coin=remove_coin, workers=workers)
    return np.concatenate([circular_spacings(ps) for ps in phase_sets])


def nns_ensemble(
    spec: EnsembleSpec,
    remove_coin: bool = False,
    bin_width: float = 0.05,
    workers: int = 1,
    phase_sets: list[EigenphaseSet] | None = None,
):
    """Spacing histogram over the whole ensemble."""
    if phase_sets is None:
        phase_sets = ensemble_eigenphases(spec, remove_coin=remove_coin, workers=workers)
    return nns(phase_sets, bin_width=bin_width)


def formfactor_to_csv(curve: FormFactorCurve, path) -> None:
    rows = np.column_stack(
        [curve.tau, curve.values, curve.stderr, np.full(curve.tau.shape, curve.realizations)]
    )
    np.savetxt(
        path, rows, fmt="%.17g", delimiter=",", header="tau,K,stderr,realizations", comments=""
    )


def spacing_histogram_to_csv(hist, path) -> None:
    centres = 0.5 * (hist.bin_edges[:-1] + hist.bin_edges[1:])
    rows = np.column_stack([centres, hist.density, np.full(centres.shape, hist.count)])
    np.savetxt(path, rows, fmt="%.17g", delimiter=",", header="s,P,count", comments="")
