"""
Tests for the channel operator spectrum Σ_K
"""

import math

import numpy as np
import pytest

from conftest import build_model_a
from schemas import Interval
from services.channel_engine import channel_engine, merge_intervals, ordered_map
from services.torus_grid import make_grid
from config import settings

PI = math.pi
ORIGIN = [0.0]
BELOW_ROOT_AT_ORIGIN = -1.2353


def test_merge_touching_and_disjoint():
    assert merge_intervals([Interval(lo=0, hi=1), Interval(lo=1, hi=2)]) == [Interval(lo=0, hi=2)]
    assert merge_intervals([Interval(lo=2, hi=3), Interval(lo=0, hi=1)]) == [Interval(lo=0, hi=1), Interval(lo=2, hi=3)]


def test_merge_sorts_three_pieces():
    merged = channel_engine.merge_intervals([
        Interval(lo=0, hi=4.5),
        Interval(lo=-1.3, hi=-1.2),
        Interval(lo=4.8, hi=5.0),
    ])
    assert [(interval.lo, interval.hi) for interval in merged] == [(-1.3, -1.2), (0, 4.5), (4.8, 5.0)]


def test_merge_nested_and_overlapping():
    merged = merge_intervals([Interval(lo=0, hi=5), Interval(lo=1, hi=2), Interval(lo=4, hi=7)])
    assert merged == [Interval(lo=0, hi=7)]


def test_ordered_map_keeps_input_order(monkeypatch):
    monkeypatch.setattr(settings, "LATSPEC_THREADS", 4)
    assert ordered_map(lambda x: x * x, list(range(20))) == [x * x for x in range(20)]


def test_uncoupled_model_has_three_particle_band_only():
    spec = build_model_a(beta=0.0)
    grid = make_grid(1, 64)
    sigma = channel_engine.channel_spectrum(spec, ORIGIN, grid, grid)
    assert sigma.two_particle_below is None and sigma.two_particle_above is None
    assert len(sigma.intervals) == 1
    assert sigma.intervals[0].lo == pytest.approx(0.0, abs=1e-9)
    assert sigma.intervals[0].hi == pytest.approx(4.5, abs=1e-9)


def test_model_a_branches_at_origin(model_a):
    grid = make_grid(1, 64)
    branches = channel_engine.lambda_branches(model_a, ORIGIN, grid, grid)
    assert branches.below is not None and branches.above is not None
    assert branches.uniform_below and branches.uniform_above
    assert branches.below.lo <= BELOW_ROOT_AT_ORIGIN + 1e-3
    assert branches.below.hi >= BELOW_ROOT_AT_ORIGIN - 1e-3
    assert len(branches.fibers) == grid.size


def test_model_a_channel_spectrum_is_canonical(model_a):
    grid = make_grid(1, 48)
    sigma = channel_engine.channel_spectrum(model_a, ORIGIN, grid, grid)
    assert sigma.three_particle.lo == pytest.approx(0.0, abs=1e-9)
    assert sigma.three_particle.hi == pytest.approx(4.5, abs=1e-9)
    assert 1 <= len(sigma.intervals) <= 3
    for left, right in zip(sigma.intervals, sigma.intervals[1:]):
        assert left.hi < right.lo
    for branch in sigma.branches():
        assert sigma.contains(branch.lo) and sigma.contains(branch.hi)
    assert sigma.k_samples == 48
    assert sigma.document()["k_samples"] == 48


def test_branch_hull_contains_every_fiber_root(model_a):
    grid = make_grid(1, 32)
    branches = channel_engine.lambda_branches(model_a, [1.0], grid, grid)
    for fiber in branches.fibers:
        if fiber.below is not None:
            assert branches.below.lo <= fiber.below <= branches.below.hi
        if fiber.above is not None:
            assert branches.above.lo <= fiber.above <= branches.above.hi


def test_constant_band_gives_point_branches(constant_band):
    grid = make_grid(1, 8)
    sigma = channel_engine.channel_spectrum(constant_band, [0.4], grid, grid)
    root = math.sqrt(1.0 + PI)
    assert sigma.three_particle == Interval(lo=2.0, hi=2.0)
    assert sigma.two_particle_below.lo == pytest.approx(1.0 - root, abs=1e-9)
    assert sigma.two_particle_below.hi == pytest.approx(1.0 - root, abs=1e-9)
    assert sigma.two_particle_above.lo == pytest.approx(1.0 + root, abs=1e-9)
    assert len(sigma.intervals) == 3


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 2.0])
def test_at_most_three_intervals_along_K(beta):
    spec = build_model_a(alpha=1.0, beta=beta)
    grid = make_grid(1, 24)
    for K in np.linspace(-PI, PI, 33):
        sigma = channel_engine.channel_spectrum(spec, [K], grid, grid)
        assert 1 <= len(sigma.intervals) <= 3


def test_at_most_three_intervals_on_default_grid():
    spec = build_model_a(alpha=1.0, beta=1.0)
    grid = make_grid(1, settings.DEFAULT_N_K)
    for K in np.linspace(-PI, PI, 9):
        sigma = channel_engine.channel_spectrum(spec, [K], grid, grid)
        assert 1 <= len(sigma.intervals) <= 3


def test_endpoints_stable_under_grid_doubling(model_a):
    coarse_grid, fine_grid = make_grid(1, 64), make_grid(1, 128)
    coarse = channel_engine.channel_spectrum(model_a, ORIGIN, coarse_grid, coarse_grid)
    fine = channel_engine.channel_spectrum(model_a, ORIGIN, fine_grid, fine_grid)
    assert len(coarse.intervals) == len(fine.intervals)
    for a, b in zip(coarse.intervals, fine.intervals):
        assert abs(a.lo - b.lo) < 1e-3
        assert abs(a.hi - b.hi) < 1e-3
