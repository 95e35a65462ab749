"""
Points, uniform grids and quadrature on the torus T^d = (-π, π]^d

The measure is the unnormalized Lebesgue measure, total mass (2π)^d.
"""

from typing import Any, Dict, Sequence, Union
import logging
import math

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict

from config import settings
from exceptions import InvalidArgumentError, ResourceLimitError

logger = logging.getLogger(__name__)

# A torus point is a float array of shape (d,) with coordinates in (-π, π]
TorusPoint = npt.NDArray[np.float64]

TWO_PI = 2.0 * np.pi
MEASURE_NAME = "lebesgue_unnormalized"


class TorusGrid(BaseModel):
    """Uniform tensor grid {-π + 2π(j+1)/n} ^ d with equal weights"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dimension: int
    points_per_axis: int
    nodes: np.ndarray  # shape (n^d, d), lexicographic over axes
    weight: float

    @property
    def size(self) -> int:
        return self.nodes.shape[0]


def canonicalize(raw: Union[Sequence[float], np.ndarray]) -> TorusPoint:
    """Reduce coordinates modulo 2π into (-π, π]; in-range values are returned unchanged"""
    values = np.asarray(raw, dtype=float)
    if values.ndim == 0:
        values = values.reshape(1)
    if values.size == 0:
        raise InvalidArgumentError("torus point needs at least one coordinate")
    if not np.all(np.isfinite(values)):
        raise InvalidArgumentError(f"torus coordinates must be finite, got {values.tolist()}")
    return wrap(values)


def wrap(values: np.ndarray) -> np.ndarray:
    """Vectorized canonicalization for arrays of points of any shape"""
    values = np.asarray(values, dtype=float)
    in_range = (values > -np.pi) & (values <= np.pi)
    reduced = np.pi - np.mod(np.pi - values, TWO_PI)
    # mod can round up to 2π for tiny negative arguments
    reduced = np.where(reduced <= -np.pi, np.pi, reduced)
    return np.where(in_range, values, reduced)


def axis_nodes(n: int) -> np.ndarray:
    """The 1-D node set {-π + 2π(j+1)/n : j = 0..n-1}; always contains π"""
    # written as π(2(j+1) - n)/n so that 0 is hit exactly for even n
    nodes = np.pi * (2.0 * np.arange(1, n + 1) - n) / n
    nodes[-1] = np.pi
    return wrap(nodes)


def make_grid(d: int, n: int) -> TorusGrid:
    """Build the uniform tensor grid with n points per axis"""
    if d < 1:
        raise InvalidArgumentError(f"dimension must be positive, got {d}")
    if n < 2:
        raise InvalidArgumentError(f"grid needs at least 2 points per axis, got {n}")
    node_count = n ** d
    if node_count > settings.MAX_GRID_NODES:
        raise ResourceLimitError(
            f"grid with {n}^{d} = {node_count} nodes exceeds the limit of {settings.MAX_GRID_NODES}"
        )

    axis = axis_nodes(n)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    nodes = np.stack([component.reshape(-1) for component in mesh], axis=-1)
    weight = (TWO_PI / n) ** d
    return TorusGrid(dimension=d, points_per_axis=n, nodes=nodes, weight=weight)


def integrate(samples: Union[Sequence[float], np.ndarray], grid: TorusGrid) -> float:
    """Rectangle rule weight · Σ samples; spectrally accurate for smooth periodic integrands"""
    values = np.asarray(samples, dtype=float)
    if values.shape != (grid.size,):
        raise InvalidArgumentError(
            f"expected {grid.size} samples aligned with the grid nodes, got shape {values.shape}"
        )
    if not np.all(np.isfinite(values)):
        raise InvalidArgumentError("quadrature samples must be finite")
    return float(grid.weight * np.sum(values))


def local_patch(center: np.ndarray, half_width: float, points_per_axis: int) -> np.ndarray:
    """Uniform patch of points centred on center, used for endpoint zooming"""
    offsets = np.linspace(-half_width, half_width, points_per_axis)
    d = center.shape[0]
    mesh = np.meshgrid(*([offsets] * d), indexing="ij")
    shifts = np.stack([component.reshape(-1) for component in mesh], axis=-1)
    return wrap(center[None, :] + shifts)


def total_measure(d: int) -> float:
    return math.pow(2.0 * math.pi, d)


def measure_metadata(d: int) -> Dict[str, Any]:
    """Measure convention recorded in the result documents"""
    return {"name": MEASURE_NAME, "total_mass": total_measure(d)}
