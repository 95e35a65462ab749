"""
Channel operator H_ch(K)

σ(H_ch(K)) = Σ_K = [m_K, M_K] ∪ Λ_K, computed from the fiber decomposition
H_ch(K) = ∫⊕ h(K, k) dk by sweeping k over a torus grid.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence, TypeVar
import logging

import numpy as np

from config import settings
from schemas import BranchSide, ChannelSpectrum, FiberSpectrum, Interval, ModelSpec
from services.friedrichs_engine import friedrichs_engine
from services.model_engine import model_engine, PointLike
from services.torus_grid import TorusGrid, canonicalize, local_patch
from exceptions import NumericalFailureError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Sequence[T]) -> List[R]:
    """Map in input order, using up to LATSPEC_THREADS workers"""
    workers = max(1, settings.LATSPEC_THREADS)
    if workers == 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def merge_intervals(intervals: Iterable[Interval]) -> List[Interval]:
    """Canonical sorted union; overlapping or touching (gap < MERGE_TOL) intervals are merged"""
    ordered = sorted(intervals, key=lambda interval: (interval.lo, interval.hi))
    merged: List[Interval] = []
    for interval in ordered:
        if merged and interval.lo - merged[-1].hi < settings.MERGE_TOL:
            last = merged[-1]
            merged[-1] = Interval(lo=last.lo, hi=max(last.hi, interval.hi))
        else:
            merged.append(interval)
    return merged


class LambdaBranches(NamedTuple):
    below: Optional[Interval]
    above: Optional[Interval]
    uniform_below: bool
    uniform_above: bool
    fibers: List[FiberSpectrum]


class ChannelEngine:
    """Sweeps fiber spectra over k to assemble Σ_K"""

    def lambda_branches(self, spec: ModelSpec, K: PointLike, k_grid: TorusGrid, quad_grid: TorusGrid) -> LambdaBranches:
        """Hulls of the fiber eigenvalues below and above the bands over the k-grid"""
        K = canonicalize(K)
        nodes = list(k_grid.nodes)

        def fiber_at(k: np.ndarray) -> FiberSpectrum:
            try:
                return friedrichs_engine.fiber_discrete_spectrum(spec, K, k, quad_grid)
            except NumericalFailureError as e:
                logger.error(f"fiber computation failed at k={k.tolist()}: {e.detail}")
                raise NumericalFailureError(f"fiber at k={k.tolist()} failed: {e.detail}")

        fibers = ordered_map(fiber_at, nodes)

        below = self._side_hull(spec, K, fibers, k_grid, quad_grid, BranchSide.BELOW)
        above = self._side_hull(spec, K, fibers, k_grid, quad_grid, BranchSide.ABOVE)
        uniform_below = all(fiber.below is not None for fiber in fibers)
        uniform_above = all(fiber.above is not None for fiber in fibers)

        for side, hull, uniform in ((BranchSide.BELOW, below, uniform_below), (BranchSide.ABOVE, above, uniform_above)):
            if hull is not None and not uniform:
                logger.warning(
                    f"{side.value} branch at K={K.tolist()} exists only for part of the k-grid; "
                    f"hull [{hull.lo}, {hull.hi}] may not be connected"
                )
        return LambdaBranches(below, above, uniform_below, uniform_above, fibers)

    def channel_spectrum(self, spec: ModelSpec, K: PointLike, k_grid: TorusGrid, quad_grid: TorusGrid) -> ChannelSpectrum:
        """Σ_K as at most three merged closed intervals with branch labels"""
        K = canonicalize(K)
        logger.info(f"channel spectrum at K={K.tolist()} with {k_grid.size} fibers")
        m_K, M_K = model_engine.band_extrema(spec, K, k_grid)
        branches = self.lambda_branches(spec, K, k_grid, quad_grid)

        # The fiber bands cover [m_K, M_K]; widen by any polished fiber edge beyond the scan
        m_K = min([m_K] + [fiber.band.e_min for fiber in branches.fibers])
        M_K = max([M_K] + [fiber.band.e_max for fiber in branches.fibers])
        three_particle = Interval(lo=m_K, hi=M_K)

        pieces = [three_particle] + [hull for hull in (branches.below, branches.above) if hull is not None]
        intervals = merge_intervals(pieces)

        return ChannelSpectrum(
            K=K.tolist(),
            three_particle=three_particle,
            two_particle_below=branches.below,
            two_particle_above=branches.above,
            existence_uniform_below=branches.uniform_below,
            existence_uniform_above=branches.uniform_above,
            k_samples=k_grid.size,
            intervals=intervals,
        )

    def merge_intervals(self, intervals: Iterable[Interval]) -> List[Interval]:
        return merge_intervals(intervals)

    def _side_hull(
        self,
        spec: ModelSpec,
        K: np.ndarray,
        fibers: List[FiberSpectrum],
        k_grid: TorusGrid,
        quad_grid: TorusGrid,
        side: BranchSide,
    ) -> Optional[Interval]:
        roots = [(fiber.below if side is BranchSide.BELOW else fiber.above) for fiber in fibers]
        found = [(root, i) for i, root in enumerate(roots) if root is not None]
        if not found:
            return None

        lo, i_lo = min(found)
        hi, i_hi = max(found)
        spacing = 2.0 * np.pi / k_grid.points_per_axis
        lo = self._refine_endpoint(spec, K, k_grid.nodes[i_lo], lo, spacing, quad_grid, side, lower=True)
        hi = self._refine_endpoint(spec, K, k_grid.nodes[i_hi], hi, spacing, quad_grid, side, lower=False)
        return Interval(lo=lo, hi=hi)

    def _refine_endpoint(
        self,
        spec: ModelSpec,
        K: np.ndarray,
        k_best: np.ndarray,
        value: float,
        half_width: float,
        quad_grid: TorusGrid,
        side: BranchSide,
        lower: bool,
    ) -> float:
        """Zoom around the k attaining an endpoint; only ever widens the hull"""
        finder = (
            friedrichs_engine.fiber_eigenvalue_below
            if side is BranchSide.BELOW
            else friedrichs_engine.fiber_eigenvalue_above
        )
        zoom = settings.ENDPOINT_REFINE_ZOOM
        for _ in range(settings.ENDPOINT_REFINE_ROUNDS):
            patch = local_patch(k_best, half_width, zoom + 1)
            roots = ordered_map(lambda k: finder(spec, K, k, quad_grid), list(patch))
            for k, root in zip(patch, roots):
                if root is None:
                    continue
                if (lower and root < value) or (not lower and root > value):
                    value, k_best = root, k
            half_width /= zoom
        return value


# Global engine instance
channel_engine = ChannelEngine()
