"""
Evaluation engine for the parameter functions w0, w1, w2, v0, v1

All evaluators are vectorized: points are arrays of shape (..., d) and the
result has shape (...).  Scalar wrappers return floats.
"""

from typing import Tuple, List, Union, Sequence
import logging
import math

import numpy as np
from scipy import optimize

from config import settings
from schemas import CosineSeries, ModelSpec, ValidationCheck, ValidationReport
from services.torus_grid import TorusGrid, canonicalize, wrap
from exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

PointLike = Union[Sequence[float], np.ndarray]


def _series_arrays(series: CosineSeries) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    orders = np.array([h.m for h in series.harmonics], dtype=float)
    cos_coeffs = np.array([h.cos for h in series.harmonics], dtype=float)
    sin_coeffs = np.array([h.sin for h in series.harmonics], dtype=float)
    return orders, cos_coeffs, sin_coeffs


def evaluate_series(series: CosineSeries, points: np.ndarray) -> np.ndarray:
    """f(q) = constant + Σ_i Σ_m [c_m cos(m q_i) + s_m sin(m q_i)] for q of shape (..., d)"""
    points = np.asarray(points, dtype=float)
    result = np.full(points.shape[:-1], series.constant, dtype=float)
    if not series.harmonics:
        return result
    orders, cos_coeffs, sin_coeffs = _series_arrays(series)
    # angles: (..., d, m)
    angles = points[..., :, None] * orders
    terms = cos_coeffs * np.cos(angles) + sin_coeffs * np.sin(angles)
    return result + terms.sum(axis=(-1, -2))


def series_gradient(series: CosineSeries, points: np.ndarray) -> np.ndarray:
    """Analytic gradient of a cosine series, shape (..., d)"""
    points = np.asarray(points, dtype=float)
    if not series.harmonics:
        return np.zeros_like(points)
    orders, cos_coeffs, sin_coeffs = _series_arrays(series)
    angles = points[..., :, None] * orders
    terms = orders * (-cos_coeffs * np.sin(angles) + sin_coeffs * np.cos(angles))
    return terms.sum(axis=-1)


class ModelEngine:
    """Evaluates the model functions and their extrema"""

    def _check_point(self, spec: ModelSpec, point: PointLike, name: str) -> np.ndarray:
        array = np.asarray(point, dtype=float)
        if array.ndim == 0 or array.shape[-1] != spec.dimension:
            raise InvalidArgumentError(
                f"{name} has dimension {array.shape[-1] if array.ndim else 0}, model dimension is {spec.dimension}"
            )
        return array

    # Pointwise evaluation
    def w0(self, spec: ModelSpec, K: PointLike) -> np.ndarray:
        K = self._check_point(spec, K, "K")
        return evaluate_series(spec.w0, K)

    def w1(self, spec: ModelSpec, K: PointLike, p: PointLike) -> np.ndarray:
        K = self._check_point(spec, K, "K")
        p = self._check_point(spec, p, "p")
        return (
            evaluate_series(spec.w1.self_term, p)
            + evaluate_series(spec.w1.pair, K - p)
            + spec.w1.const
        )

    def w2(self, spec: ModelSpec, K: PointLike, p: PointLike, q: PointLike) -> np.ndarray:
        K = self._check_point(spec, K, "K")
        p = self._check_point(spec, p, "p")
        q = self._check_point(spec, q, "q")
        return (
            spec.w2.const
            + evaluate_series(spec.w2.single, p)
            + evaluate_series(spec.w2.single, q)
            + evaluate_series(spec.w2.recoil, K - p - q)
        )

    def v0(self, spec: ModelSpec, p: PointLike) -> np.ndarray:
        return evaluate_series(spec.v0, self._check_point(spec, p, "p"))

    def v1(self, spec: ModelSpec, p: PointLike) -> np.ndarray:
        return evaluate_series(spec.v1, self._check_point(spec, p, "p"))

    # Scalar wrappers
    def eval_w0(self, spec: ModelSpec, K: PointLike) -> float:
        return float(self.w0(spec, K))

    def eval_w1(self, spec: ModelSpec, K: PointLike, p: PointLike) -> float:
        return float(self.w1(spec, K, p))

    def eval_w2(self, spec: ModelSpec, K: PointLike, p: PointLike, q: PointLike) -> float:
        return float(self.w2(spec, K, p, q))

    def eval_v0(self, spec: ModelSpec, p: PointLike) -> float:
        return float(self.v0(spec, p))

    def eval_v1(self, spec: ModelSpec, p: PointLike) -> float:
        return float(self.v1(spec, p))

    def w2_gradient(self, spec: ModelSpec, K: np.ndarray, p: np.ndarray, q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Partial gradients (∂_p w2, ∂_q w2)"""
        recoil = series_gradient(spec.w2.recoil, K - p - q)
        grad_p = series_gradient(spec.w2.single, p) - recoil
        grad_q = series_gradient(spec.w2.single, q) - recoil
        return grad_p, grad_q

    # Extrema
    def band_extrema(self, spec: ModelSpec, K: PointLike, refine_grid: TorusGrid) -> Tuple[float, float]:
        """(m_K, M_K) = min/max of w2(K; p, q) over (T^d)^2"""
        K = canonicalize(self._check_point(spec, K, "K"))
        self._check_grid(spec, refine_grid)
        nodes = refine_grid.nodes
        values = self.w2(spec, K, nodes[:, None, :], nodes[None, :, :])
        d = spec.dimension

        def objective(x: np.ndarray, sign: float) -> Tuple[float, np.ndarray]:
            p, q = x[:d], x[d:]
            grad_p, grad_q = self.w2_gradient(spec, K, p, q)
            return sign * float(self.w2(spec, K, p, q)), sign * np.concatenate([grad_p, grad_q])

        i_min, j_min = np.unravel_index(np.argmin(values), values.shape)
        i_max, j_max = np.unravel_index(np.argmax(values), values.shape)
        start_min = np.concatenate([nodes[i_min], nodes[j_min]])
        start_max = np.concatenate([nodes[i_max], nodes[j_max]])

        m_K = min(float(values[i_min, j_min]), self._polish(objective, start_min, 1.0))
        M_K = max(float(values[i_max, j_max]), -self._polish(objective, start_max, -1.0))
        logger.debug(f"band extrema at K={K.tolist()}: [{m_K}, {M_K}]")
        return m_K, M_K

    def fiber_extrema(self, spec: ModelSpec, K: PointLike, k: PointLike, refine_grid: TorusGrid) -> Tuple[float, float]:
        """(E_min, E_max) = min/max over q of w2(K; k, q)"""
        K = canonicalize(self._check_point(spec, K, "K"))
        k = canonicalize(self._check_point(spec, k, "k"))
        self._check_grid(spec, refine_grid)
        values = self.w2(spec, K, k[None, :], refine_grid.nodes)

        def objective(q: np.ndarray, sign: float) -> Tuple[float, np.ndarray]:
            _, grad_q = self.w2_gradient(spec, K, k, q)
            return sign * float(self.w2(spec, K, k, q)), sign * grad_q

        i_min = int(np.argmin(values))
        i_max = int(np.argmax(values))
        e_min = min(float(values[i_min]), self._polish(objective, refine_grid.nodes[i_min], 1.0))
        e_max = max(float(values[i_max]), -self._polish(objective, refine_grid.nodes[i_max], -1.0))
        return e_min, e_max

    def _polish(self, objective, start: np.ndarray, sign: float) -> float:
        """Local gradient polish from the best grid node; returns the signed objective value"""
        result = optimize.minimize(
            objective,
            np.asarray(start, dtype=float),
            args=(sign,),
            jac=True,
            method="BFGS",
            options={"gtol": settings.POLISH_TOL, "xrtol": settings.POLISH_TOL},
        )
        if not np.isfinite(result.fun):
            logger.warning(f"extrema polish returned a non-finite value from {start.tolist()}")
            return math.inf
        return float(result.fun)

    def _check_grid(self, spec: ModelSpec, grid: TorusGrid) -> None:
        if grid.dimension != spec.dimension:
            raise InvalidArgumentError(
                f"grid dimension {grid.dimension} does not match model dimension {spec.dimension}"
            )

    # Validation
    def validate(self, spec: ModelSpec) -> ValidationReport:
        """Check finiteness, dimension consistency and the w2 swap symmetry"""
        checks: List[ValidationCheck] = []

        non_finite = [
            name for name, series in spec.named_series().items()
            if not all(math.isfinite(value) for value in series.coefficients())
        ]
        for name, value in (("w1.const", spec.w1.const), ("w2.const", spec.w2.const)):
            if not math.isfinite(value):
                non_finite.append(name)
        checks.append(ValidationCheck(
            name="finite_coefficients",
            passed=not non_finite,
            detail=f"non-finite coefficients in {', '.join(non_finite)}" if non_finite else None,
        ))

        mismatched = [
            name for name, series in spec.named_series().items()
            if series.dimension is not None and series.dimension != spec.dimension
        ]
        checks.append(ValidationCheck(
            name="dimension_consistency",
            passed=not mismatched,
            detail=(
                f"series {', '.join(mismatched)} tagged with a dimension other than {spec.dimension}"
                if mismatched else None
            ),
        ))

        checks.append(self._symmetry_check(spec, finite=not non_finite))

        report = ValidationReport(passed=all(check.passed for check in checks), checks=checks)
        logger.info(f"model validation {'passed' if report.passed else 'failed'}")
        return report

    def _symmetry_check(self, spec: ModelSpec, finite: bool) -> ValidationCheck:
        if not finite:
            return ValidationCheck(name="w2_symmetry", passed=False, detail="skipped: non-finite coefficients")
        rng = np.random.default_rng(settings.VALIDATION_SEED)
        shape = (settings.VALIDATION_SAMPLES, spec.dimension)
        K = wrap(rng.uniform(-np.pi, np.pi, shape))
        p = wrap(rng.uniform(-np.pi, np.pi, shape))
        q = wrap(rng.uniform(-np.pi, np.pi, shape))
        deviation = float(np.max(np.abs(self.w2(spec, K, p, q) - self.w2(spec, K, q, p))))
        passed = deviation <= settings.SYMMETRY_TOL
        return ValidationCheck(
            name="w2_symmetry",
            passed=passed,
            detail=None if passed else f"max |w2(K;p,q) - w2(K;q,p)| = {deviation:.3e}",
        )


# Global engine instance
model_engine = ModelEngine()
