"""
Generalized Friedrichs models h(K, k)

Fiber essential spectrum [E_min, E_max], the Fredholm determinant
Δ_K(k; z) = w1(K; k) - z - (1/2) ∫ v1(t)^2 / (w2(K; k, t) - z) dt
and the at most two discrete fiber eigenvalues outside the band.
"""

from typing import Optional, Tuple
import logging

import numpy as np
from scipy import optimize

from config import settings
from schemas import BranchSide, FiberBand, FiberSpectrum, ModelSpec
from services.model_engine import model_engine, PointLike
from services.torus_grid import TorusGrid, canonicalize
from exceptions import DomainError, NumericalFailureError

logger = logging.getLogger(__name__)


class FiberDeterminant:
    """Δ_K(k; ·) with the quadrature samples of the fiber precomputed"""

    def __init__(self, w1_value: float, w2_samples: np.ndarray, coupling: np.ndarray):
        self.w1_value = w1_value
        self.w2_samples = w2_samples
        # (1/2) · weight · v1(t)^2 at every node
        self.coupling = coupling

    def __call__(self, z: float) -> float:
        return float(self.w1_value - z - np.sum(self.coupling / (self.w2_samples - z)))


class FriedrichsEngine:
    """Spectral analysis of the fiber operators h(K, k)"""

    def fiber_determinant(self, spec: ModelSpec, K: PointLike, k: PointLike, quad_grid: TorusGrid) -> FiberDeterminant:
        """Precompute the samples entering Δ_K(k; z) on the quadrature grid"""
        K = canonicalize(K)
        k = canonicalize(k)
        nodes = quad_grid.nodes
        w1_value = model_engine.eval_w1(spec, K, k)
        w2_samples = model_engine.w2(spec, K, k[None, :], nodes)
        coupling = 0.5 * quad_grid.weight * model_engine.v1(spec, nodes) ** 2
        return FiberDeterminant(w1_value, w2_samples, coupling)

    def delta(
        self,
        spec: ModelSpec,
        K: PointLike,
        k: PointLike,
        z: float,
        quad_grid: TorusGrid,
        band: Optional[FiberBand] = None,
    ) -> float:
        """Δ_K(k; z) for real z outside the guarded fiber band"""
        if band is None:
            band = self.fiber_essential_spectrum(spec, K, k, quad_grid)
        guard = settings.GAP_GUARD
        if band.e_min - guard <= z <= band.e_max + guard:
            raise DomainError(
                f"Δ undefined on fiber band: z={z} lies in [{band.e_min}, {band.e_max}] ± {guard}"
            )
        return self.fiber_determinant(spec, K, k, quad_grid)(z)

    def fiber_essential_spectrum(self, spec: ModelSpec, K: PointLike, k: PointLike, refine_grid: TorusGrid) -> FiberBand:
        """σ_ess(h(K, k)) = [E_min(K, k), E_max(K, k)]; independent of v1"""
        e_min, e_max = model_engine.fiber_extrema(spec, K, k, refine_grid)
        return FiberBand(
            e_min=e_min,
            e_max=e_max,
            degenerate=(e_max - e_min) < settings.DEGENERATE_TOL,
        )

    def fiber_eigenvalue_below(
        self,
        spec: ModelSpec,
        K: PointLike,
        k: PointLike,
        quad_grid: TorusGrid,
        band: Optional[FiberBand] = None,
        determinant: Optional[FiberDeterminant] = None,
    ) -> Optional[float]:
        """The eigenvalue of h(K, k) below E_min, if any"""
        root, _ = self._side_eigenvalue(spec, K, k, quad_grid, BranchSide.BELOW, band, determinant)
        return root

    def fiber_eigenvalue_above(
        self,
        spec: ModelSpec,
        K: PointLike,
        k: PointLike,
        quad_grid: TorusGrid,
        band: Optional[FiberBand] = None,
        determinant: Optional[FiberDeterminant] = None,
    ) -> Optional[float]:
        """The eigenvalue of h(K, k) above E_max, if any"""
        root, _ = self._side_eigenvalue(spec, K, k, quad_grid, BranchSide.ABOVE, band, determinant)
        return root

    def fiber_discrete_spectrum(
        self,
        spec: ModelSpec,
        K: PointLike,
        k: PointLike,
        quad_grid: TorusGrid,
        band: Optional[FiberBand] = None,
    ) -> FiberSpectrum:
        """Band plus the at most one eigenvalue on each side of it"""
        K = canonicalize(K)
        k = canonicalize(k)
        if band is None:
            band = self.fiber_essential_spectrum(spec, K, k, quad_grid)
        determinant = self.fiber_determinant(spec, K, k, quad_grid)

        below, below_unsure = self._side_eigenvalue(spec, K, k, quad_grid, BranchSide.BELOW, band, determinant)
        above, above_unsure = self._side_eigenvalue(spec, K, k, quad_grid, BranchSide.ABOVE, band, determinant)

        indeterminate = []
        if below_unsure:
            indeterminate.append(BranchSide.BELOW)
        if above_unsure:
            indeterminate.append(BranchSide.ABOVE)

        return FiberSpectrum(
            K=K.tolist(),
            k=k.tolist(),
            band=band,
            below=below,
            above=above,
            indeterminate=indeterminate,
        )

    def _side_eigenvalue(
        self,
        spec: ModelSpec,
        K: PointLike,
        k: PointLike,
        quad_grid: TorusGrid,
        side: BranchSide,
        band: Optional[FiberBand],
        determinant: Optional[FiberDeterminant],
    ) -> Tuple[Optional[float], bool]:
        """Root of Δ on one side of the band, plus an indeterminate-at-tolerance flag

        Δ decreases on both sides of the band, tends to +∞ at -∞ and to -∞ at +∞,
        so the sign at the probe point decides existence.
        """
        if band is None:
            band = self.fiber_essential_spectrum(spec, K, k, quad_grid)
        if determinant is None:
            determinant = self.fiber_determinant(spec, K, k, quad_grid)

        probe = settings.EDGE_PROBE
        if side is BranchSide.BELOW:
            edge = band.e_min - probe
            direction = -1.0
        else:
            edge = band.e_max + probe
            direction = 1.0

        value_at_edge = determinant(edge)
        if not np.isfinite(value_at_edge):
            raise NumericalFailureError(
                f"Δ is not finite at z={edge} next to the {side.value} band edge, K={np.asarray(K).tolist()}, k={np.asarray(k).tolist()}"
            )
        indeterminate = abs(value_at_edge) < settings.RESIDUAL_TOL
        # Below the band a root needs Δ(edge) < 0, above it needs Δ(edge) > 0
        if direction * value_at_edge <= 0.0 or indeterminate:
            return None, indeterminate

        step = 1.0
        far = edge + direction * step
        while True:
            value = determinant(far)
            if not np.isfinite(value):
                raise NumericalFailureError(f"Δ is not finite at z={far} while bracketing the {side.value} fiber eigenvalue")
            if direction * value <= 0.0:
                break
            step *= 2.0
            far = edge + direction * step
            if abs(far) > settings.BRACKET_LIMIT:
                logger.error(f"bracket expansion for the {side.value} fiber eigenvalue passed {settings.BRACKET_LIMIT}")
                raise NumericalFailureError(
                    f"could not bracket the {side.value} fiber eigenvalue at K={np.asarray(K).tolist()}, "
                    f"k={np.asarray(k).tolist()} within |z| <= {settings.BRACKET_LIMIT}"
                )

        low, high = (far, edge) if side is BranchSide.BELOW else (edge, far)
        root = optimize.brentq(determinant, low, high, xtol=settings.ROOT_XTOL)
        return float(root), False


# Global engine instance
friedrichs_engine = FriedrichsEngine()
