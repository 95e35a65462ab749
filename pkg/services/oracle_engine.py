"""
Brute-force oracle: finite symmetric discretizations of H(K), h(K, k) and H_ch(K)

Basis functions are cell indicators scaled by 1/sqrt(weight), so every
discretized operator is an exactly symmetric matrix whose spectrum converges
to the spectrum of the operator as the grid is refined.
"""

from typing import List, Sequence
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import linalg

from config import settings
from schemas import ChannelSpectrum, ModelSpec, OracleKind, SpectrumComparison
from services.faddeev_engine import FaddeevState
from services.model_engine import model_engine, PointLike
from services.torus_grid import TorusGrid, canonicalize
from exceptions import NumericalFailureError, ResourceLimitError

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


class OracleMatrix(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: OracleKind
    dimension: int
    entries: np.ndarray
    grid: TorusGrid


class OracleEngine:
    """Assembles and diagonalizes the discretized operators"""

    def discretize_H(self, spec: ModelSpec, K: PointLike, grid: TorusGrid) -> OracleMatrix:
        """H(K) on vacuum ⊕ one-particle cells ⊕ unordered pairs of cells"""
        n_nodes = grid.size
        if n_nodes > settings.ORACLE_MAX_NODES:
            raise ResourceLimitError(
                f"full H(K) oracle limited to {settings.ORACLE_MAX_NODES} grid nodes, got {n_nodes}"
            )
        K = canonicalize(K)
        nodes = grid.nodes
        root_w = math.sqrt(grid.weight)

        v0 = model_engine.v0(spec, nodes)
        v1 = model_engine.v1(spec, nodes)
        w2 = model_engine.w2(spec, K, nodes[:, None, :], nodes[None, :, :])
        rows, cols = np.triu_indices(n_nodes)
        n_pairs = rows.size
        dimension = 1 + n_nodes + n_pairs
        self._check_dimension(dimension)

        # creation operator on symmetric pairs: ½(v1(p) f1(q) + v1(q) f1(p))
        pairs = np.arange(n_pairs)
        diagonal = rows == cols
        off = ~diagonal
        coupling = np.zeros((n_nodes, n_pairs))
        coupling[rows[diagonal], pairs[diagonal]] = root_w * v1[rows[diagonal]]
        coupling[rows[off], pairs[off]] = root_w * v1[cols[off]] / SQRT2
        coupling[cols[off], pairs[off]] = root_w * v1[rows[off]] / SQRT2

        one = slice(1, 1 + n_nodes)
        two = slice(1 + n_nodes, dimension)
        entries = np.zeros((dimension, dimension))
        entries[0, 0] = model_engine.eval_w0(spec, K)
        entries[0, one] = root_w * v0
        entries[one, 0] = root_w * v0
        entries[one, one] = np.diag(model_engine.w1(spec, K, nodes))
        entries[one, two] = coupling
        entries[two, one] = coupling.T
        entries[two, two] = np.diag(w2[rows, cols])

        logger.info(f"assembled full H(K) oracle of dimension {dimension}")
        return OracleMatrix(kind=OracleKind.FULL_H, dimension=dimension, entries=self._symmetrize(entries), grid=grid)

    def discretize_h(self, spec: ModelSpec, K: PointLike, k: PointLike, grid: TorusGrid) -> OracleMatrix:
        """Fiber h(K, k) on ℂ ⊕ one-particle cells"""
        K = canonicalize(K)
        k = canonicalize(k)
        nodes = grid.nodes
        dimension = 1 + grid.size
        self._check_dimension(dimension)

        entries = np.zeros((dimension, dimension))
        entries[0, 0] = model_engine.eval_w1(spec, K, k)
        coupling = math.sqrt(grid.weight) * model_engine.v1(spec, nodes) / SQRT2
        entries[0, 1:] = coupling
        entries[1:, 0] = coupling
        entries[1:, 1:] = np.diag(model_engine.w2(spec, K, k[None, :], nodes))
        return OracleMatrix(kind=OracleKind.FIBER_H, dimension=dimension, entries=self._symmetrize(entries), grid=grid)

    def discretize_Hch(self, spec: ModelSpec, K: PointLike, grid: TorusGrid) -> OracleMatrix:
        """Channel operator on one-particle cells ⊕ ordered pairs of cells (no symmetrization)"""
        K = canonicalize(K)
        n_nodes = grid.size
        dimension = n_nodes + n_nodes * n_nodes
        self._check_dimension(dimension)
        nodes = grid.nodes

        v1 = model_engine.v1(spec, nodes)
        w2 = model_engine.w2(spec, K, nodes[:, None, :], nodes[None, :, :])
        entries = np.zeros((dimension, dimension))
        entries[np.arange(n_nodes), np.arange(n_nodes)] = model_engine.w1(spec, K, nodes)
        two_index = n_nodes + np.arange(n_nodes * n_nodes)
        entries[two_index, two_index] = w2.reshape(-1)

        # (H12* f1)(p, q) = v1(q) f1(p), scaled by 1/√2
        coupling = math.sqrt(grid.weight) * v1 / SQRT2
        for i in range(n_nodes):
            block = n_nodes + i * n_nodes + np.arange(n_nodes)
            entries[i, block] = coupling
            entries[block, i] = coupling
        return OracleMatrix(kind=OracleKind.CHANNEL_HCH, dimension=dimension, entries=self._symmetrize(entries), grid=grid)

    def eigenvalues(self, matrix: OracleMatrix) -> List[float]:
        """Full dense symmetric eigensolve, ascending"""
        try:
            values = linalg.eigvalsh(matrix.entries)
        except linalg.LinAlgError as e:
            logger.error(f"eigensolver failed on {matrix.kind.value} oracle: {e}")
            raise NumericalFailureError(f"dense eigensolver did not converge: {e}")
        return np.sort(values).tolist()

    def fiber_union_eigenvalues(self, spec: ModelSpec, K: PointLike, grid: TorusGrid) -> List[float]:
        """Union over the grid k of the fiber oracle spectra"""
        values: List[float] = []
        for k in grid.nodes:
            values.extend(self.eigenvalues(self.discretize_h(spec, K, k, grid)))
        return sorted(values)

    def compare_spectra(
        self,
        analytic: ChannelSpectrum,
        analytic_discrete: Sequence[float],
        oracle_eigs: Sequence[float],
        ess_tol: float,
        disc_tol: float,
    ) -> SpectrumComparison:
        """Classify every oracle eigenvalue against fattened Σ_K and the analytic roots"""
        roots = np.asarray(sorted(analytic_discrete), dtype=float)
        eigs = np.asarray(sorted(oracle_eigs), dtype=float)

        violations: List[float] = []
        matched = 0
        for value in eigs:
            if analytic.contains(float(value), pad=ess_tol):
                continue
            if roots.size and np.min(np.abs(roots - value)) <= disc_tol:
                matched += 1
                continue
            violations.append(float(value))

        missing = [
            float(root) for root in roots
            if not eigs.size or np.min(np.abs(eigs - root)) > disc_tol
        ]
        comparison = SpectrumComparison(
            analytic=analytic,
            analytic_discrete=roots.tolist(),
            oracle_eigenvalues=eigs.tolist(),
            coverage_violations=violations,
            missing_discrete=missing,
            matched_discrete=matched,
            ess_tol=ess_tol,
            disc_tol=disc_tol,
        )
        if not comparison.passed:
            logger.warning(
                f"oracle comparison failed: {len(violations)} uncovered eigenvalues, {len(missing)} unmatched roots"
            )
        return comparison

    def state_residual(self, spec: ModelSpec, K: PointLike, z: float, state: FaddeevState, grid: TorusGrid) -> float:
        """‖(H - z) f‖ / ‖f‖ for a Faddeev state embedded in the full oracle basis"""
        matrix = self.discretize_H(spec, K, grid)
        rows, cols = np.triu_indices(grid.size)
        pair_scale = np.where(rows == cols, grid.weight, SQRT2 * grid.weight)
        vector = np.concatenate([
            [state.f0],
            math.sqrt(grid.weight) * state.f1,
            pair_scale * state.f2[rows, cols],
        ])
        residual = matrix.entries @ vector - z * vector
        return float(np.linalg.norm(residual) / np.linalg.norm(vector))

    def _check_dimension(self, dimension: int) -> None:
        if dimension > settings.ORACLE_MAX_DIMENSION:
            raise ResourceLimitError(
                f"oracle matrix of dimension {dimension} exceeds the limit of {settings.ORACLE_MAX_DIMENSION}"
            )

    def _symmetrize(self, entries: np.ndarray) -> np.ndarray:
        return 0.5 * (entries + entries.T)


# Global engine instance
oracle_engine = OracleEngine()
