import numpy as np
import pytest

from qgraphlab.colouring import colour_from_group, cyclic_group
from qgraphlab.ensembles import (
    EnsembleSpec,
    ensemble_eigenphases,
    ensemble_spacings,
    form_factor,
    formfactor_to_csv,
    nns_ensemble,
    realization_matrix,
    spacing_histogram_to_csv,
)
from qgraphlab.graphs import build_digraph
from qgraphlab.propagator import (
    build_propagator,
    build_regular_propagator,
    build_star_propagator,
    fourier_coin,
    random_arc_lengths,
)


def diagonal_base(n=8):
    """Identity coupling: the ensemble sweeps pure diagonal phase matrices."""
    g = build_digraph(n, [(v, v) for v in range(n)])
    scat = {v: np.eye(1) for v in range(n)}
    return build_propagator(g, scat, np.ones(n), k=0.5)


def test_spec_validation():
    base = diagonal_base()
    with pytest.raises(ValueError, match="mode"):
        EnsembleSpec(base=base, mode="bogus")
    with pytest.raises(ValueError, match="realization"):
        EnsembleSpec(base=base, realizations=0)


def test_realizations_are_unitary_and_share_transition():
    base = build_star_propagator(6, lengths=random_arc_lengths(6, 0), k=2.0)
    spec = EnsembleSpec(base=base, mode="random-phase", realizations=5, seed=9)
    t0 = np.abs(base.matrix) ** 2
    for r in range(5):
        m = realization_matrix(spec, r)
        assert np.abs(m.conj().T @ m - np.eye(6)).max() < 1e-12
        assert np.abs(np.abs(m) ** 2 - t0).max() < 1e-12


def test_random_phase_regular_rephases_colours_only():
    col = colour_from_group(cyclic_group(4))
    coin = fourier_coin(4, lengths=random_arc_lengths(4, 1))
    base = build_regular_propagator(col, coin, k=0.0)
    spec = EnsembleSpec(base=base, realizations=3, seed=2)
    m = realization_matrix(spec, 0)
    ratio = np.where(np.abs(base.matrix) > 1e-12, m / np.where(base.matrix == 0, 1, base.matrix), 0)
    # the rephasing must be constant on each colour block row
    n = 4
    for c in range(4):
        block = ratio[c * n : (c + 1) * n]
        phases = block[np.abs(block) > 1e-12]
        assert np.abs(phases - phases[0]).max() < 1e-12


def test_determinism_and_seed_sensitivity():
    base = diagonal_base()
    a = form_factor(EnsembleSpec(base=base, realizations=20, seed=5), [1, 2, 3])
    b = form_factor(EnsembleSpec(base=base, realizations=20, seed=5), [1, 2, 3])
    c = form_factor(EnsembleSpec(base=base, realizations=20, seed=6), [1, 2, 3])
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_workers_do_not_change_results():
    base = build_star_propagator(8, lengths=random_arc_lengths(8, 3), k=0.0)
    spec = EnsembleSpec(base=base, realizations=12, seed=4)
    serial = form_factor(spec, [1, 2, 5], workers=1)
    threaded = form_factor(spec, [1, 2, 5], workers=3)
    assert np.array_equal(serial.values, threaded.values)
    assert np.array_equal(serial.stderr, threaded.stderr)


def test_identity_coupling_form_factor_is_one():
    # <|sum_a e^{i n phi_a}|^2> = N exactly, so K = 1 for every n >= 1
    spec = EnsembleSpec(base=diagonal_base(8), realizations=600, seed=0)
    curve = form_factor(spec, [1, 2, 3, 5, 8])
    for value, err in zip(curve.values, curve.stderr):
        assert abs(value - 1.0) < 3 * err


def test_form_factor_rejects_empty():
    spec = EnsembleSpec(base=diagonal_base(), realizations=2, seed=0)
    with pytest.raises(ValueError, match="empty"):
        form_factor(spec, [])
    with pytest.raises(ValueError, match=">= 1"):
        form_factor(spec, [0])


def test_random_phase_and_k_sweep_agree():
    # incommensurate lengths: both averaging modes sample the same torus
    base = build_star_propagator(8, lengths=random_arc_lengths(8, 7), k=0.0)
    ns = [1, 2, 3, 4]
    a = form_factor(EnsembleSpec(base=base, mode="random-phase", realizations=3000, seed=1), ns)
    b = form_factor(EnsembleSpec(base=base, mode="k-sweep", realizations=3000, seed=2), ns)
    for ka, kb, ea, eb in zip(a.values, b.values, a.stderr, b.stderr):
        assert abs(ka - kb) < 4 * np.hypot(ea, eb)


def test_mean_spacing_unfolded_to_one():
    col = colour_from_group(cyclic_group(5))
    coin = fourier_coin(5, lengths=random_arc_lengths(5, 5))
    base = build_regular_propagator(col, coin, k=0.0)
    spec = EnsembleSpec(base=base, realizations=30, seed=3)
    spacings = ensemble_spacings(spec)
    assert abs(spacings.mean() - 1.0) < 0.02


def test_coin_removal_shrinks_sets():
    col = colour_from_group(cyclic_group(4))
    coin = fourier_coin(4, lengths=random_arc_lengths(4, 8))
    base = build_regular_propagator(col, coin, k=0.0)
    spec = EnsembleSpec(base=base, realizations=4, seed=6)
    plain = ensemble_eigenphases(spec)
    cleaned = ensemble_eigenphases(spec, remove_coin=True)
    assert all(ps.size == 16 for ps in plain)
    assert all(ps.size == 12 for ps in cleaned)


def test_coin_removal_requires_coin():
    spec = EnsembleSpec(base=diagonal_base(), realizations=2, seed=0)
    with pytest.raises(ValueError, match="coin"):
        ensemble_eigenphases(spec, remove_coin=True)


def test_removed_phases_match_realized_coin():
    # the removed phases are the realization coin's own spectrum, which the
    # regular propagator always contains
    col = colour_from_group(cyclic_group(6))
    coin = fourier_coin(6, lengths=random_arc_lengths(6, 9))
    base = build_regular_propagator(col, coin, k=0.0)
    spec = EnsembleSpec(base=base, mode="k-sweep", realizations=1, seed=11)
    m = realization_matrix(spec, 0)
    full = np.sort(np.angle(np.linalg.eigvals(m)) % (2 * np.pi))
    cleaned = ensemble_eigenphases(spec, remove_coin=True)[0]
    assert cleaned.size == 30
    # every cleaned phase is present in the full spectrum
    for phase in cleaned.phases:
        assert np.min(np.abs(full - phase)) < 1e-9


def test_csv_outputs(tmp_path):
    spec = EnsembleSpec(base=diagonal_base(6), realizations=10, seed=1)
    curve = form_factor(spec, [1, 2])
    ff_path = tmp_path / "ff.csv"
    formfactor_to_csv(curve, ff_path)
    header = ff_path.read_text().splitlines()[0]
    assert header == "tau,K,stderr,realizations"
    loaded = np.loadtxt(ff_path, delimiter=",", skiprows=1)
    assert loaded.shape == (2, 4)

    hist = nns_ensemble(spec, bin_width=0.1)
    sp_path = tmp_path / "nns.csv"
    spacing_histogram_to_csv(hist, sp_path)
    assert sp_path.read_text().splitlines()[0] == "s,P,count"
