import math

import numpy as np
import pytest

from qgraphlab.classical import (
    GapReport,
    StochasticMatrix,
    diffusion_spectrum_prediction,
    diffusive_transition,
    gap_report_to_json,
    gap_scaling_report,
    leading_eigenvalues,
    perron_check,
    spectral_gap,
    spectrum_to_csv,
    to_stochastic,
)
from qgraphlab.colouring import random_latin_colouring
from qgraphlab.graphs import make_lattice
from qgraphlab.propagator import (
    build_propagator,
    build_regular_propagator,
    build_star_propagator,
    fourier_coin,
    haar_scattering_set,
    random_arc_lengths,
)

from test_graphs import reg4_digraph


def star_transition(n):
    return to_stochastic(build_star_propagator(n))


def test_to_stochastic_diagonal_unitary():
    from qgraphlab.graphs import build_digraph

    g = build_digraph(3, [(0, 0), (1, 1), (2, 2)])
    scat = {v: np.array([[np.exp(1j * (v + 0.5))]]) for v in range(3)}
    p = build_propagator(g, scat, np.ones(3), k=1.0)
    t = to_stochastic(p)
    assert np.allclose(t.matrix, np.eye(3), atol=1e-14)


def test_to_stochastic_star_closed_form():
    n = 10
    t = star_transition(n).matrix
    expected = (1 - 4 / n) * np.eye(n) + (4 / n**2) * np.ones((n, n))
    assert np.abs(t - expected).max() < 1e-14


def test_to_stochastic_fourier_regular_uniform():
    col = random_latin_colouring(4, seed=1)
    p = build_regular_propagator(col, fourier_coin(4, random_arc_lengths(4, 2)), k=1.8)
    t = to_stochastic(p).matrix
    nonzero = t[t > 1e-14]
    assert np.allclose(nonzero, 0.25)


def test_to_stochastic_doubly_stochastic_random():
    g = reg4_digraph()
    for seed in range(5):
        p = build_propagator(
            g, haar_scattering_set(g, seed), random_arc_lengths(g.n_arcs, seed), k=0.9
        )
        t = to_stochastic(p).matrix
        assert np.abs(t.sum(axis=1) - 1).max() < 1e-12
        assert np.abs(t.sum(axis=0) - 1).max() < 1e-12


def test_stochastic_matrix_validates():
    with pytest.raises(ValueError, match="sum to 1"):
        StochasticMatrix(matrix=np.array([[0.5, 0.4], [0.5, 0.5]]))
    with pytest.raises(ValueError, match="nonnegative"):
        StochasticMatrix(matrix=np.array([[1.5, -0.5], [0.0, 1.0]]))


def test_perron_check_identity_and_star():
    assert perron_check(np.eye(4))
    assert perron_check(star_transition(8))


def test_perron_check_rejects_scaled_row():
    t = star_transition(6).matrix.copy()
    t[0] *= 1.01
    assert not perron_check(t)


def test_spectral_gap_star4():
    report = spectral_gap(star_transition(4))
    assert np.allclose(np.sort(np.abs(report.spectrum)), [0, 0, 0, 1], atol=1e-10)
    assert math.isinf(report.gap)


def test_spectral_gap_star20():
    report = spectral_gap(star_transition(20))
    assert abs(report.leading - 1) < 1e-10
    assert abs(report.subleading_modulus - 0.8) < 1e-10
    # nineteen-fold degeneracy at 1 - 4/20
    close = np.abs(np.abs(report.spectrum) - 0.8) < 1e-10
    assert close.sum() == 19
    assert abs(report.gap + math.log(0.8)) < 1e-12


def test_spectral_gap_identity_degenerate():
    report = spectral_gap(np.eye(5))
    assert report.subleading_modulus == pytest.approx(1.0)
    assert report.gap == 0.0


def test_spectral_gap_rejects_nonstochastic():
    with pytest.raises(ValueError, match="stochastic"):
        spectral_gap(np.array([[0.5, 0.4], [0.5, 0.5]]))


def test_star_trace_power_closed_form():
    # Tr T^n = 1 + (n_E - 1)(1 - 4/n_E)^n exactly
    n = 12
    t = star_transition(n).matrix
    power = np.eye(n)
    for steps in range(1, 9):
        power = power @ t
        expected = 1 + (n - 1) * (1 - 4 / n) ** steps
        assert abs(np.trace(power) - expected) < 1e-10


def test_diffusive_transition_structure_1d():
    t = diffusive_transition(1, 3)
    m = t.matrix
    assert m.shape == (6, 6)
    rows, cols = np.nonzero(m)
    assert np.allclose(m[rows, cols], 0.5)
    assert (m.sum(axis=1) == 1).all()
    # each arc continues to exactly 2 arcs
    assert ((m > 0).sum(axis=1) == 2).all()


def test_diffusive_transition_row_sums_2d():
    t = diffusive_transition(2, 4)
    assert np.abs(t.matrix.sum(axis=1) - 1).max() < 1e-14
    assert np.abs(t.matrix.sum(axis=0) - 1).max() < 1e-14


def test_diffusive_transition_uniform_stationary():
    t = diffusive_transition(2, 3).matrix
    n = t.shape[0]
    uniform = np.full(n, 1 / n)
    assert np.abs(uniform @ t - uniform).max() < 1e-14


def test_diffusion_prediction_values():
    assert diffusion_spectrum_prediction(1, 10, [0]) == pytest.approx(1.0)
    assert diffusion_spectrum_prediction(1, 10, [1]) == pytest.approx(
        math.exp(-4 * math.pi**2 * 0.5 / 100)
    )
    assert diffusion_spectrum_prediction(2, 8, [1, 0]) == pytest.approx(
        math.exp(-4 * math.pi**2 * 0.25 / 64)
    )


def test_diffusion_prediction_rejects_bad_mode():
    with pytest.raises(ValueError):
        diffusion_spectrum_prediction(2, 8, [1])


def test_diffusive_low_spectrum_matches_prediction():
    # continuum prediction within 10% for the low-lying modes, L >= 10
    t = diffusive_transition(1, 12)
    eigs = np.sort(np.linalg.eigvals(t.matrix).real)[::-1]
    for m, mult in ((0, 1), (1, 2)):
        pred = diffusion_spectrum_prediction(1, 12, [m])
        got = eigs[:3][0] if m == 0 else eigs[1]
        assert abs(got - pred) / pred < 0.10


def test_leading_eigenvalues_matches_dense():
    t = diffusive_transition(2, 5)
    dense = np.linalg.eigvals(t.matrix)
    dense = dense[np.argsort(-np.abs(dense))][:6]
    top = leading_eigenvalues(t, k=6)
    assert np.abs(np.sort(np.abs(dense)) - np.sort(np.abs(top))).max() < 1e-9


def test_gap_scaling_star_family():
    reports = [star_transition(n) for n in (8, 16, 32, 64)]
    fit = gap_scaling_report(reports)
    # closed-form gaps -ln(1 - 4/n) give slope 1.138 on these sizes,
    # drifting towards 1 for larger families
    assert fit.alpha == pytest.approx(1.1384, abs=0.01)
    big = [star_transition(n) for n in (32, 64, 128, 256)]
    assert gap_scaling_report(big).alpha == pytest.approx(1.0, abs=0.1)


def test_gap_scaling_requires_two():
    with pytest.raises(ValueError, match="at least 2"):
        gap_scaling_report([star_transition(8)])


def test_gap_report_json(tmp_path):
    import json

    report = spectral_gap(star_transition(8))
    data = json.loads(gap_report_to_json(report))
    assert data["leading"] == pytest.approx(1.0)
    assert data["subleading_modulus"] == pytest.approx(0.5)
    path = tmp_path / "spec.csv"
    spectrum_to_csv(report.spectrum, path)
    loaded = np.loadtxt(path, delimiter=",", skiprows=1)
    assert loaded.shape == (8, 2)
    assert loaded[0, 0] == pytest.approx(1.0)


def test_diagonal_term_consistency_eigen_vs_power():
    # (n/N) Tr T^n via eigenvalues and via matrix powers agree
    t = diffusive_transition(1, 5).matrix
    eigs = np.linalg.eigvals(t)
    power = np.eye(t.shape[0])
    for n in range(1, 7):
        power = power @ t
        via_eig = np.sum(eigs**n).real
        assert abs(np.trace(power).real - via_eig) < 1e-9
