"""
Tests for the brute-force oracle and the spectrum comparison
"""

import math

import numpy as np
import pytest

from conftest import build_model_a, dispersion
from commands.oracle import shift_spectrum
from schemas import CosineSeries, ModelSpec, OracleKind, W1Terms, W2Terms
from services.channel_engine import channel_engine
from services.faddeev_engine import faddeev_engine
from services.friedrichs_engine import friedrichs_engine
from services.model_engine import model_engine
from services.oracle_engine import OracleMatrix, oracle_engine
from services.torus_grid import make_grid
from exceptions import ResourceLimitError

PI = math.pi
ORIGIN = [0.0]


def test_full_H_dimension_and_symmetry(model_a):
    matrix = oracle_engine.discretize_H(model_a, ORIGIN, make_grid(1, 4))
    assert matrix.kind is OracleKind.FULL_H
    assert matrix.dimension == 15
    assert matrix.entries.shape == (15, 15)
    assert np.max(np.abs(matrix.entries - matrix.entries.T)) == 0.0


def test_full_H_block_diagonals(model_a):
    grid = make_grid(1, 6)
    matrix = oracle_engine.discretize_H(model_a, [0.5], grid)
    nodes = grid.nodes
    diagonal = np.diag(matrix.entries)
    assert diagonal[0] == pytest.approx(model_engine.eval_w0(model_a, [0.5]))
    assert np.allclose(diagonal[1:7], model_engine.w1(model_a, [0.5], nodes))
    rows, cols = np.triu_indices(6)
    assert np.allclose(diagonal[7:], model_engine.w2(model_a, [0.5], nodes[rows], nodes[cols]))


def test_full_H_size_guard(model_a_factory):
    with pytest.raises(ResourceLimitError):
        oracle_engine.discretize_H(model_a_factory(d=2), [0.0, 0.0], make_grid(2, 12))


def test_decoupled_oracle_spectrum_is_parameter_samples(decoupled):
    grid = make_grid(1, 8)
    nodes = grid.nodes
    eigenvalues = oracle_engine.eigenvalues(oracle_engine.discretize_H(decoupled, ORIGIN, grid))
    rows, cols = np.triu_indices(8)
    expected = np.sort(np.concatenate([
        [-3.0],
        model_engine.w1(decoupled, ORIGIN, nodes),
        model_engine.w2(decoupled, ORIGIN, nodes[rows], nodes[cols]),
    ]))
    assert np.max(np.abs(np.asarray(eigenvalues) - expected)) <= 1e-10


def test_eigenvalues_of_small_matrices():
    grid = make_grid(1, 2)
    swap = OracleMatrix(kind=OracleKind.FIBER_H, dimension=2, entries=np.array([[0.0, 1.0], [1.0, 0.0]]), grid=grid)
    assert oracle_engine.eigenvalues(swap) == pytest.approx([-1.0, 1.0])
    diagonal = OracleMatrix(kind=OracleKind.FIBER_H, dimension=3, entries=np.diag([3.0, -1.0, 2.0]), grid=grid)
    assert oracle_engine.eigenvalues(diagonal) == [-1.0, 2.0, 3.0]


def test_uncoupled_fiber_oracle():
    spec = build_model_a(beta=0.0)
    grid = make_grid(1, 8)
    eigenvalues = oracle_engine.eigenvalues(oracle_engine.discretize_h(spec, [0.3], [1.2], grid))
    expected = np.sort(np.concatenate([
        [model_engine.eval_w1(spec, [0.3], [1.2])],
        model_engine.w2(spec, [0.3], np.array([1.2]), grid.nodes),
    ]))
    assert np.allclose(eigenvalues, expected, atol=1e-12)


def test_degenerate_fiber_oracle_band_block(model_a):
    matrix = oracle_engine.discretize_h(model_a, ORIGIN, [PI], make_grid(1, 16))
    assert np.allclose(np.diag(matrix.entries)[1:], 4.0, atol=1e-13)


def test_fiber_oracle_ground_state(model_a):
    eigenvalues = oracle_engine.eigenvalues(oracle_engine.discretize_h(model_a, ORIGIN, ORIGIN, make_grid(1, 256)))
    assert eigenvalues[0] == pytest.approx(-1.2353, abs=2e-3)


def test_channel_oracle_structure(model_a):
    grid = make_grid(1, 5)
    matrix = oracle_engine.discretize_Hch(model_a, ORIGIN, grid)
    assert matrix.dimension == 5 + 25
    coupling = matrix.entries[:5, 5:]
    for i in range(5):
        block = coupling[i].reshape(5, 5)
        assert np.count_nonzero(np.delete(block, i, axis=0)) == 0
        assert np.allclose(block[i], math.sqrt(grid.weight) / math.sqrt(2.0))


def test_uncoupled_channel_oracle():
    spec = build_model_a(beta=0.0)
    grid = make_grid(1, 6)
    nodes = grid.nodes
    eigenvalues = oracle_engine.eigenvalues(oracle_engine.discretize_Hch(spec, ORIGIN, grid))
    expected = np.sort(np.concatenate([
        model_engine.w1(spec, ORIGIN, nodes),
        model_engine.w2(spec, ORIGIN, nodes[:, None, :], nodes[None, :, :]).reshape(-1),
    ]))
    assert np.allclose(eigenvalues, expected, atol=1e-12)


def test_channel_oracle_is_direct_sum_of_fibers(model_a):
    grid = make_grid(1, 16)
    channel = oracle_engine.eigenvalues(oracle_engine.discretize_Hch(model_a, [0.7], grid))
    fibers = oracle_engine.fiber_union_eigenvalues(model_a, [0.7], grid)
    assert len(channel) == len(fibers)
    assert np.max(np.abs(np.asarray(channel) - np.asarray(fibers))) < 1e-8


def test_channel_oracle_lies_in_sigma(model_a):
    grid = make_grid(1, 32)
    sigma = channel_engine.channel_spectrum(model_a, ORIGIN, grid, grid)
    eigenvalues = oracle_engine.eigenvalues(oracle_engine.discretize_Hch(model_a, ORIGIN, grid))
    assert all(sigma.contains(z, pad=0.05) for z in eigenvalues)


def test_fiber_oracle_matches_friedrichs_roots(model_a):
    grid = make_grid(1, 256)
    fiber = friedrichs_engine.fiber_discrete_spectrum(model_a, ORIGIN, ORIGIN, grid)
    eigenvalues = oracle_engine.eigenvalues(oracle_engine.discretize_h(model_a, ORIGIN, ORIGIN, grid))
    assert abs(eigenvalues[0] - fiber.below) < 1e-6
    assert abs(eigenvalues[-1] - fiber.above) < 1e-6


def test_faddeev_roots_match_dense_eigenvalues_on_the_same_grid(model_a):
    grid = make_grid(1, 20)
    report = faddeev_engine.discrete_spectrum(model_a, [0.4], None, grid, grid)
    sigma, window = report.sigma_K_used, report.search_window
    margin = 1e-6
    eigenvalues = oracle_engine.eigenvalues(oracle_engine.discretize_H(model_a, [0.4], grid))
    isolated = [z for z in eigenvalues if window.contains(z) and not sigma.contains(z, pad=margin)]
    roots = [z for z in report.eigenvalues if not sigma.contains(z, pad=margin)]
    assert len(roots) == len(isolated)
    assert np.allclose(roots, isolated, atol=1e-8)


def test_compare_spectra_decoupled(decoupled):
    grid = make_grid(1, 12)
    sigma = channel_engine.channel_spectrum(decoupled, ORIGIN, grid, grid)
    eigenvalues = oracle_engine.eigenvalues(oracle_engine.discretize_H(decoupled, ORIGIN, grid))
    comparison = oracle_engine.compare_spectra(sigma, [-3.0], eigenvalues, 0.05, 1e-3)
    assert comparison.passed
    assert comparison.matched_discrete == 1
    assert comparison.coverage_violations == [] and comparison.missing_discrete == []


def test_compare_spectra_negative_control(decoupled):
    grid = make_grid(1, 12)
    sigma = channel_engine.channel_spectrum(decoupled, ORIGIN, grid, grid)
    eigenvalues = oracle_engine.eigenvalues(oracle_engine.discretize_H(decoupled, ORIGIN, grid))
    comparison = oracle_engine.compare_spectra(shift_spectrum(sigma, 1.0), [-3.0], eigenvalues, 0.05, 1e-3)
    assert not comparison.passed
    assert comparison.coverage_violations
    assert not comparison.document()["passed"]


def test_compare_spectra_reports_missing_roots(decoupled):
    grid = make_grid(1, 12)
    sigma = channel_engine.channel_spectrum(decoupled, ORIGIN, grid, grid)
    eigenvalues = oracle_engine.eigenvalues(oracle_engine.discretize_H(decoupled, ORIGIN, grid))
    comparison = oracle_engine.compare_spectra(sigma, [-3.0, -7.0], eigenvalues, 0.05, 1e-3)
    assert comparison.missing_discrete == [-7.0]


@pytest.mark.parametrize("K", [0.0, PI / 2, PI])
def test_model_a_essential_spectrum_equality(K):
    spec = build_model_a(alpha=1.0, beta=1.0)
    grid = make_grid(1, 48)
    eigenvalues = oracle_engine.eigenvalues(oracle_engine.discretize_H(spec, [K], grid))
    sigma = channel_engine.channel_spectrum(spec, [K], grid, grid)
    report = faddeev_engine.discrete_spectrum(spec, [K], None, grid, grid, sigma=sigma)
    comparison = oracle_engine.compare_spectra(sigma, report.eigenvalues, eigenvalues, 0.05, 1e-3)
    assert comparison.coverage_violations == []
    assert comparison.missing_discrete == []
    assert all(check < 1e-6 for check in report.eigen_check)


def test_weyl_distance_shrinks_with_refinement(model_a):
    sigma = channel_engine.channel_spectrum(model_a, ORIGIN, make_grid(1, 64), make_grid(1, 64))
    report = faddeev_engine.discrete_spectrum(model_a, ORIGIN, None, make_grid(1, 64), make_grid(1, 64), sigma=sigma)

    def worst_distance(n: int) -> float:
        eigenvalues = oracle_engine.eigenvalues(oracle_engine.discretize_H(model_a, ORIGIN, make_grid(1, n)))
        distances = []
        for z in eigenvalues:
            to_roots = min((abs(z - root) for root in report.eigenvalues), default=math.inf)
            distances.append(min(sigma.distance(z), to_roots))
        return max(distances)

    coarse, fine = worst_distance(16), worst_distance(48)
    assert fine <= coarse + 1e-12
    assert fine < 0.05


def test_isolated_eigenvalue_converges_at_second_order():
    # v1 = 0 leaves a 2x2 Friedrichs block: -3 - z = α² · 2π / sqrt((2 - z)² - 4)
    eps = dispersion(1)
    alpha = 0.5
    spec = ModelSpec(
        dimension=1,
        w0=CosineSeries(constant=-3.0),
        w1=W1Terms(self_term=eps, pair=eps),
        w2=W2Terms(single=eps, recoil=eps),
        v0=CosineSeries(constant=alpha),
    )
    lo, hi = -4.0, -3.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if -3.0 - mid - alpha ** 2 * 2.0 * PI / math.sqrt((2.0 - mid) ** 2 - 4.0) > 0.0:
            lo = mid
        else:
            hi = mid
    exact = 0.5 * (lo + hi)

    for n in (8, 16, 32):
        lowest = oracle_engine.eigenvalues(oracle_engine.discretize_H(spec, ORIGIN, make_grid(1, n)))[0]
        assert abs(lowest - exact) <= 1.0 / n ** 2
