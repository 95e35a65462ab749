"""
Faddeev reduction for H(K)

Discretizes the compact block operator T(K, z) on H_0 ⊕ H_1 by the Nyström
method, evaluates Ω_K(z) = det(I - T(K, z)) and locates the discrete spectrum
of H(K) as the real zeros of Ω_K outside Σ_K.
"""

from typing import List, Optional, Tuple
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import linalg, optimize

from config import settings
from schemas import ChannelSpectrum, DiscreteSpectrumReport, Interval, ModelSpec
from services.channel_engine import channel_engine, ordered_map
from services.model_engine import model_engine, PointLike
from services.torus_grid import TorusGrid, canonicalize
from exceptions import DomainError, LatspecError, NearSingularFiberError, NumericalFailureError, ResourceLimitError

logger = logging.getLogger(__name__)


class FaddeevMatrix(BaseModel):
    """Nyström matrix of T(K, z) in the basis (scalar, weighted grid samples)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    size: int
    entries: np.ndarray
    z: float
    K: List[float]
    delta_samples: np.ndarray


class FaddeevState(BaseModel):
    """Eigenvector of H(K) rebuilt from a null vector of I - T(K, z)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    z: float
    f0: float
    f1: np.ndarray  # samples at the grid nodes
    f2: np.ndarray  # samples on grid × grid, symmetric


def check_quadrature_size(quad_grid: TorusGrid) -> None:
    """T(K, z) is a dense square matrix with one row per quadrature node"""
    if quad_grid.size > settings.FADDEEV_MAX_NODES:
        raise ResourceLimitError(
            f"T(K, z) limited to {settings.FADDEEV_MAX_NODES} quadrature nodes, got {quad_grid.size}"
        )


class FaddeevKernel:
    """z-independent samples of the model on one quadrature grid"""

    def __init__(self, spec: ModelSpec, K: PointLike, quad_grid: TorusGrid):
        check_quadrature_size(quad_grid)
        self.K = canonicalize(K)
        self.grid = quad_grid
        nodes = quad_grid.nodes
        self.w0 = model_engine.eval_w0(spec, self.K)
        self.w1 = model_engine.w1(spec, self.K, nodes)
        self.v0 = model_engine.v0(spec, nodes)
        self.v1 = model_engine.v1(spec, nodes)
        self.w2 = model_engine.w2(spec, self.K, nodes[:, None, :], nodes[None, :, :])

    def delta(self, z: float, resolvent: np.ndarray) -> np.ndarray:
        """Δ_K(p_i; z) at every node, from the same quadrature as T11"""
        weighted = 0.5 * self.grid.weight * self.v1 ** 2
        return self.w1 - z - resolvent @ weighted

    def build(self, z: float) -> FaddeevMatrix:
        shifted = self.w2 - z
        if np.min(np.abs(shifted)) < settings.GAP_GUARD:
            raise DomainError(f"z={z} lies on the three-particle band, T(K, z) is undefined")
        resolvent = 1.0 / shifted
        delta = self.delta(z, resolvent)

        i_small = int(np.argmin(np.abs(delta)))
        if abs(delta[i_small]) < settings.NEAR_SINGULAR_TOL:
            p = self.grid.nodes[i_small].tolist()
            raise NearSingularFiberError(f"Δ_K(p; {z}) vanishes at p={p}", p=p)

        weight = self.grid.weight
        size = 1 + self.grid.size
        entries = np.empty((size, size), dtype=float)
        entries[0, 0] = 1.0 + self.w0 - z
        entries[0, 1:] = weight * self.v0
        entries[1:, 0] = -self.v0 / delta
        entries[1:, 1:] = (self.v1 / (2.0 * delta))[:, None] * resolvent * (weight * self.v1)[None, :]
        return FaddeevMatrix(size=size, entries=entries, z=z, K=self.K.tolist(), delta_samples=delta)

    def determinant(self, z: float) -> float:
        matrix = self.build(z)
        sign, log_abs = np.linalg.slogdet(np.eye(matrix.size) - matrix.entries)
        if sign == 0.0:
            return 0.0
        return float(sign * math.exp(log_abs))

    def distance_to_one(self, z: float) -> Tuple[float, int]:
        """min |λ_i - 1| over the eigenvalues of T, and the cluster size near 1"""
        matrix = self.build(z)
        try:
            eigenvalues = linalg.eigvals(matrix.entries)
        except linalg.LinAlgError as e:
            logger.error(f"eigensolver failed on T(K, z) at z={z}: {e}")
            raise NumericalFailureError(f"eigenvalues of T(K, z) did not converge at z={z}: {e}")
        distances = np.abs(eigenvalues - 1.0)
        closest = float(np.min(distances))
        multiplicity = int(np.count_nonzero(distances < max(settings.EIGEN_CHECK_TOL, 10.0 * closest)))
        return closest, max(multiplicity, 1)


class FaddeevEngine:
    """Fredholm determinant and discrete spectrum of H(K)"""

    def kernel(self, spec: ModelSpec, K: PointLike, quad_grid: TorusGrid) -> FaddeevKernel:
        return FaddeevKernel(spec, K, quad_grid)

    def build_T(self, spec: ModelSpec, K: PointLike, z: float, quad_grid: TorusGrid) -> FaddeevMatrix:
        return self.kernel(spec, K, quad_grid).build(z)

    def fredholm_det(self, spec: ModelSpec, K: PointLike, z: float, quad_grid: TorusGrid) -> float:
        """Ω_K(z) = det(I - T(K, z)), real for real z"""
        return self.kernel(spec, K, quad_grid).determinant(z)

    def eigen_check(self, spec: ModelSpec, K: PointLike, z_candidate: float, quad_grid: TorusGrid) -> float:
        """Distance of 1 to the spectrum of T(K, z); vanishes exactly at eigenvalues of H(K)"""
        distance, _ = self.kernel(spec, K, quad_grid).distance_to_one(z_candidate)
        return distance

    def default_window(self, sigma: ChannelSpectrum) -> Interval:
        m_K, M_K = sigma.three_particle.lo, sigma.three_particle.hi
        spread = 2.0 * (M_K - m_K) + 1.0
        return Interval(lo=m_K - spread, hi=M_K + spread)

    def discrete_spectrum(
        self,
        spec: ModelSpec,
        K: PointLike,
        window: Optional[Interval],
        quad_grid: TorusGrid,
        k_grid: TorusGrid,
        sigma: Optional[ChannelSpectrum] = None,
    ) -> DiscreteSpectrumReport:
        """Real zeros of Ω_K in the window, away from Σ_K"""
        K = canonicalize(K)
        if sigma is None:
            sigma = channel_engine.channel_spectrum(spec, K, k_grid, quad_grid)
        if window is None:
            window = self.default_window(sigma)
        kernel = self.kernel(spec, K, quad_grid)

        segments = self._allowed_segments(window, sigma)
        mesh = np.linspace(window.lo, window.hi, settings.Z_MESH_POINTS)
        logger.info(f"scanning Ω_K on {len(segments)} segments of [{window.lo}, {window.hi}] at K={K.tolist()}")

        candidates: List[float] = []
        unresolved: List[float] = []
        for lo, hi, lo_open, hi_open in segments:
            inner = mesh[(mesh > lo) & (mesh < hi)]
            zs = np.concatenate([[lo], inner, [hi]])
            values = np.array(ordered_map(lambda z: self._safe_determinant(kernel, z), list(zs)))
            candidates.extend(self._sign_change_roots(kernel, zs, values))
            candidates.extend(self._even_roots(kernel, zs, values))
            for z, value, next_to_sigma in ((lo, values[0], lo_open), (hi, values[-1], hi_open)):
                if next_to_sigma and np.isfinite(value) and abs(value) < settings.RESIDUAL_TOL:
                    logger.warning(f"possible root of Ω_K within the guard of Σ_K near z={z}")
                    unresolved.append(float(z))

        eigenvalues, multiplicities, residuals, checks = [], [], [], []
        for z in sorted(candidates):
            if eigenvalues and abs(z - eigenvalues[-1]) < settings.ROOT_DEDUP_TOL:
                continue
            distance, multiplicity = kernel.distance_to_one(z)
            if distance > settings.ROOT_ACCEPT_TOL:
                # sign change across a pole of Ω, not a zero
                logger.debug(f"rejected candidate z={z}: distance of 1 to spec T = {distance}")
                continue
            eigenvalues.append(float(z))
            multiplicities.append(multiplicity)
            residuals.append(abs(kernel.determinant(z)))
            checks.append(distance)

        logger.info(f"found {len(eigenvalues)} discrete eigenvalues at K={K.tolist()}")
        return DiscreteSpectrumReport(
            K=K.tolist(),
            eigenvalues=eigenvalues,
            multiplicities=multiplicities,
            residuals=residuals,
            eigen_check=checks,
            search_window=window,
            sigma_K_used=sigma,
            unresolved_near_edge=unresolved,
        )

    def reconstruct_eigenvector(self, spec: ModelSpec, K: PointLike, z: float, quad_grid: TorusGrid) -> FaddeevState:
        """Null vector (f0, f1) of I - T(K, z) and f2 from the Faddeev relation"""
        kernel = self.kernel(spec, K, quad_grid)
        matrix = kernel.build(z)
        try:
            _, _, vh = linalg.svd(np.eye(matrix.size) - matrix.entries)
        except linalg.LinAlgError as e:
            logger.error(f"SVD of I - T(K, z) failed at z={z}: {e}")
            raise NumericalFailureError(f"SVD of I - T(K, z) did not converge at z={z}: {e}")
        null_vector = vh[-1]
        f0 = float(null_vector[0])
        f1 = null_vector[1:]
        f2 = -(kernel.v1[None, :] * f1[:, None] + kernel.v1[:, None] * f1[None, :]) / (2.0 * (kernel.w2 - z))
        return FaddeevState(z=z, f0=f0, f1=f1, f2=f2)

    def _allowed_segments(self, window: Interval, sigma: ChannelSpectrum) -> List[Tuple[float, float, bool, bool]]:
        """window ∖ (Σ_K fattened by the guard), with flags marking ends adjacent to Σ_K"""
        guard = settings.GAP_GUARD
        segments = []
        cursor, cursor_at_sigma = window.lo, False
        for interval in sigma.intervals:
            lo, hi = interval.lo - guard, interval.hi + guard
            if hi <= cursor:
                continue
            if lo >= window.hi:
                break
            if lo > cursor:
                segments.append((cursor, lo, cursor_at_sigma, True))
            cursor, cursor_at_sigma = hi, True
        if cursor < window.hi:
            segments.append((cursor, window.hi, cursor_at_sigma, False))
        return segments

    def _safe_determinant(self, kernel: FaddeevKernel, z: float) -> float:
        try:
            return kernel.determinant(z)
        except LatspecError as e:
            logger.debug(f"Ω_K undefined at z={z}: {e.detail}")
            return math.nan

    def _sign_change_roots(self, kernel: FaddeevKernel, zs: np.ndarray, values: np.ndarray) -> List[float]:
        roots = []
        for i in range(len(zs) - 1):
            a, b = values[i], values[i + 1]
            if not (np.isfinite(a) and np.isfinite(b)):
                continue
            if a == 0.0:
                roots.append(float(zs[i]))
            elif a * b < 0.0:
                try:
                    roots.append(float(optimize.brentq(kernel.determinant, zs[i], zs[i + 1], xtol=settings.ROOT_XTOL)))
                except LatspecError as e:
                    logger.debug(f"bracket [{zs[i]}, {zs[i + 1]}] skipped: {e.detail}")
        if len(values) and values[-1] == 0.0:
            roots.append(float(zs[-1]))
        return roots

    def _even_roots(self, kernel: FaddeevKernel, zs: np.ndarray, values: np.ndarray) -> List[float]:
        """Touching zeros: local minima of |Ω| without a sign change"""
        roots = []
        magnitude = np.abs(values)
        finite = magnitude[np.isfinite(magnitude)]
        if finite.size == 0:
            return roots
        probe_below = settings.EVEN_ROOT_PROBE_RATIO * float(np.max(finite))
        for i in range(1, len(zs) - 1):
            window = values[i - 1:i + 2]
            if not np.all(np.isfinite(window)) or np.any(window == 0.0):
                continue
            if np.sign(window[0]) != np.sign(window[1]) or np.sign(window[1]) != np.sign(window[2]):
                continue
            if not (magnitude[i] <= magnitude[i - 1] and magnitude[i] <= magnitude[i + 1]):
                continue
            if magnitude[i] > probe_below:
                continue
            result = optimize.minimize_scalar(
                lambda z: abs(self._safe_determinant(kernel, z)),
                bounds=(zs[i - 1], zs[i + 1]),
                method="bounded",
                options={"xatol": settings.ROOT_XTOL},
            )
            if np.isfinite(result.fun) and result.fun < settings.EVEN_ROOT_TOL:
                roots.append(float(result.x))
        return roots


# Global engine instance
faddeev_engine = FaddeevEngine()
