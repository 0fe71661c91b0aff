"""Coined discrete-time quantum walks on the line and on rings.

A walk step is coin-then-shift: the coin mixes the two spin components at
every site, then spin-up amplitude moves one site up and spin-down one site
down (directions exchanged on sites marked as swapped). The infinite line is
simulated exactly on a window that grows with the step count, so there is no
truncation error. Spin order is (up, down): row 0 of the coin acts on up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .propagator import Coin

__all__ = [
    "WalkState",
    "ShiftRule",
    "PositionDistribution",
    "hadamard_coin",
    "line_state",
    "ring_state",
    "walk_step",
    "run_walk",
    "position_distribution",
    "walk_spread",
    "disordered_rule",
    "classical_walk_reference",
    "measured_walk_spread",
    "spread_exponent",
    "distribution_to_csv",
]

NORM_TOL = 1e-10


def hadamard_coin() -> Coin:
    """The 2x2 coin (1/sqrt 2) [[1, 1], [-1, 1]] with unit arc lengths."""
    sigma = np.array([[1.0, 1.0], [-1.0, 1.0]]) / np.sqrt(2.0)
    return Coin(sigma=sigma, lengths=np.ones(2))


@dataclass(frozen=True)
class ShiftRule:
    """Spin-conditioned shifts: up moves +1, down moves -1, with an optional
    set of sites where the two directions are exchanged."""

    swapped: frozenset[int] = frozenset()

    def swap_mask(self, positions: np.ndarray) -> np.ndarray:
        if not self.swapped:
            return np.zeros(len(positions), dtype=bool)
        table = np.asarray(sorted(self.swapped))
        return np.isin(positions, table)


@dataclass(frozen=True)
class WalkState:
    """Amplitudes psi[site, spin] on a window of sites.

    ``origin`` is the position of window index 0. On a ring the window is
    the whole ring and positions are taken mod its size.
    """

    amps: np.ndarray
    t: int = 0
    origin: int = 0
    ring: bool = False

    def __post_init__(self):
        a = np.asarray(self.amps, dtype=complex)
        if a.ndim != 2 or a.shape[1] != 2:
            raise ValueError(f"amplitudes must have shape (sites, 2), got {a.shape}")
        object.__setattr__(self, "amps", a)

    @property
    def positions(self) -> np.ndarray:
        return self.origin + np.arange(self.amps.shape[0])

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def stacked(self) -> np.ndarray:
        """Spin-major vector (all up amplitudes, then all down) for comparison
        with the block propagator on a ring."""
        return np.concatenate([self.amps[:, 0], self.amps[:, 1]])


@dataclass(frozen=True)
class PositionDistribution:
    positions: np.ndarray
    probabilities: np.ndarray
    t: int


def line_state(position: int = 0, spin=(1.0, 0.0)) -> WalkState:
    amps = np.array([spin], dtype=complex)
    state = WalkState(amps=amps, t=0, origin=position, ring=False)
    _check_norm(state)
    return state


def ring_state(n_sites: int, position: int = 0, spin=(1.0, 0.0)) -> WalkState:
    if n_sites < 3:
        raise ValueError(f"ring needs at least 3 sites, got {n_sites}")
    amps = np.zeros((n_sites, 2), dtype=complex)
    amps[position % n_sites] = np.asarray(spin, dtype=complex)
    state = WalkState(amps=amps, t=0, origin=0, ring=True)
    _check_norm(state)
    return state


def _check_norm(state: WalkState) -> None:
    err = abs(state.norm_squared() - 1.0)
    if err > NORM_TOL:
        raise ValueError(f"state norm deviates from 1 by {err:.3e}")


def walk_step(state: WalkState, coin: Coin, rule: ShiftRule, k: float = 0.0) -> WalkState:
    """One coin-then-shift cycle; norm preserving.

    At swapped sites the two coin output channels are exchanged before the
    fixed up/down shift, so the component that would have moved up moves
    down there. Keeping the shift permutations fixed is what keeps the step
    unitary under site-dependent disorder.
    """
    if coin.d != 2:
        raise ValueError(f"line/ring walks need a 2-dimensional coin, got d = {coin.d}")
    c = coin.matrix(k)
    mixed = state.amps @ c.T  # mixed[v, i] = sum_j C[i, j] psi[v, j]
    swap = rule.swap_mask(state.positions)
    if swap.any():
        mixed = mixed.copy()
        mixed[swap] = mixed[swap][:, ::-1]
    if state.ring:
        new = np.empty_like(mixed)
        new[:, 0] = np.roll(mixed[:, 0], 1)
        new[:, 1] = np.roll(mixed[:, 1], -1)
        return WalkState(amps=new, t=state.t + 1, origin=0, ring=True)
    m = state.amps.shape[0]
    new = np.zeros((m + 2, 2), dtype=complex)
    new[2:, 0] = mixed[:, 0]  # up channel moves one site up
    new[:m, 1] = mixed[:, 1]  # down channel moves one site down
    return WalkState(amps=new, t=state.t + 1, origin=state.origin - 1, ring=False)


def run_walk(start: WalkState, t: int, coin: Coin, rule: ShiftRule, k: float = 0.0) -> PositionDistribution:
    """Evolve t steps and return the position distribution P(v) = sum_i |psi(v, i)|^2."""
    if t < 0:
        raise ValueError(f"step count must be >= 0, got {t}")
    state = start
    for _ in range(t):
        state = walk_step(state, coin, rule, k=k)
    return position_distribution(state)


def position_distribution(state: WalkState) -> PositionDistribution:
    probs = np.sum(np.abs(state.amps) ** 2, axis=1)
    total = probs.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"probabilities sum to {total}, expected 1")
    return PositionDistribution(positions=state.positions, probabilities=probs, t=state.t)


def walk_spread(dist: PositionDistribution) -> float:
    """Standard deviation of the position under the distribution."""
    p = np.asarray(dist.probabilities, dtype=float)
    if abs(p.sum() - 1.0) > 1e-6:
        raise ValueError(f"distribution is not normalized (sum {p.sum()})")
    x = np.asarray(dist.positions, dtype=float)
    mean = float(np.dot(p, x))
    return float(np.sqrt(np.dot(p, (x - mean) ** 2)))


def disordered_rule(sites, seed: int) -> ShiftRule:
    """Independent fair-coin swap of the shift directions at each site.

    ``sites`` is an iterable of site indices, or an int w for the symmetric
    window [-w, w]. Deterministic for a fixed seed.
    """
    if isinstance(sites, (int, np.integer)):
        sites = range(-int(sites), int(sites) + 1)
    sites = np.asarray(sorted(set(int(s) for s in sites)), dtype=int)
    rng = np.random.default_rng(seed)
    flips = rng.random(len(sites)) < 0.5
    return ShiftRule(swapped=frozenset(sites[flips].tolist()))


def classical_walk_reference(t: int) -> float:
    """Spread sqrt(t) of the unbiased classical walk (binomial variance t)."""
    if t < 0:
        raise ValueError(f"step count must be >= 0, got {t}")
    return float(np.sqrt(t))


def measured_walk_spread(t_values, trials: int, seed: int) -> np.ndarray:
    """Monte Carlo spread of the walk measured (spin projected) after every
    step, which reduces it to the classical +/-1 random walk."""
    rng = np.random.default_rng(seed)
    t_values = np.asarray(list(t_values), dtype=int)
    t_max = int(t_values.max())
    steps = rng.choice((-1, 1), size=(trials, t_max))
    positions = np.cumsum(steps, axis=1)
    return np.array([positions[:, t - 1].std() if t > 0 else 0.0 for t in t_values])


def spread_exponent(t_values, spreads) -> float:
    """Unweighted least-squares slope of log(spread) against log(t)."""
    t = np.asarray(list(t_values), dtype=float)
    s = np.asarray(list(spreads), dtype=float)
    if len(t) < 2:
        raise ValueError("need at least 2 points to fit an exponent")
    if (s <= 0).any() or (t <= 0).any():
        raise ValueError("exponent fit needs positive times and spreads")
    return float(np.polyfit(np.log(t), np.log(s), 1)[0])


def distribution_to_csv(dist: PositionDistribution, path) -> None:
    rows = np.column_stack(
        [dist.positions, dist.probabilities, np.full(dist.positions.shape, dist.t)]
    )
    np.savetxt(path, rows, fmt="%.17g", delimiter=",", header="position,probability,t", comments="")
