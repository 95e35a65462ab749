"""
sweep command: Σ_K and discrete eigenvalues along a path of total momenta
"""

from typing import Dict, List, Optional, Tuple
import csv
import io
import logging

import numpy as np

from commands import CommandResult, format_float, load_valid_model, render_json
from schemas import ChannelSpectrum, DiscreteSpectrumReport, ModelSpec
from services.channel_engine import channel_engine, ordered_map
from services.faddeev_engine import check_quadrature_size, faddeev_engine
from services.torus_grid import TorusGrid, canonicalize, make_grid
from exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

NAMED_PATHS = ("axis", "diagonal")


def build_path(dimension: int, named: Optional[str], explicit: Optional[str], n_path: int) -> List[List[float]]:
    """Raw path points: a named path on t ∈ [-π, π] or 'a,b;c,d' literal points"""
    if explicit is not None:
        points = []
        for chunk in explicit.split(";"):
            try:
                values = [float(part) for part in chunk.split(",")]
            except ValueError:
                raise InvalidArgumentError(f"--K-path point '{chunk}' is not a list of reals")
            if len(values) != dimension:
                raise InvalidArgumentError(f"--K-path point '{chunk}' has {len(values)} components, model dimension is {dimension}")
            points.append(values)
        return points

    name = named or "axis"
    if name not in NAMED_PATHS:
        raise InvalidArgumentError(f"unknown path '{name}', expected one of {', '.join(NAMED_PATHS)}")
    if n_path < 2:
        raise InvalidArgumentError(f"--n-path must be at least 2, got {n_path}")
    ts = np.linspace(-np.pi, np.pi, n_path)
    if name == "axis":
        return [[float(t)] + [0.0] * (dimension - 1) for t in ts]
    return [[float(t)] * dimension for t in ts]


def _row(raw: List[float], sigma: ChannelSpectrum, report: DiscreteSpectrumReport) -> Dict[str, object]:
    below, above = sigma.two_particle_below, sigma.two_particle_above
    return {
        "K": raw,
        "m_K": sigma.three_particle.lo,
        "M_K": sigma.three_particle.hi,
        "below_lo": below.lo if below else None,
        "below_hi": below.hi if below else None,
        "above_lo": above.lo if above else None,
        "above_hi": above.hi if above else None,
        "interval_count": len(sigma.intervals),
        "discrete": report.eigenvalues,
    }


def _render_csv(rows: List[Dict[str, object]], dimension: int) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    k_columns = ["K"] if dimension == 1 else [f"K{i + 1}" for i in range(dimension)]
    writer.writerow(k_columns + ["m_K", "M_K", "below_lo", "below_hi", "above_lo", "above_hi", "interval_count", "discrete"])

    def cell(value: Optional[float]) -> str:
        return "" if value is None else format_float(value)

    for row in rows:
        writer.writerow(
            [format_float(value) for value in row["K"]]
            + [cell(row[key]) for key in ("m_K", "M_K", "below_lo", "below_hi", "above_lo", "above_hi")]
            + [str(row["interval_count"]), ";".join(format_float(z) for z in row["discrete"])]
        )
    return buffer.getvalue()


def cmd_sweep(
    model_path: str,
    path: Optional[str],
    K_path: Optional[str],
    n_path: int,
    n_quad: int,
    n_k: int,
    output_format: str,
) -> CommandResult:
    spec = load_valid_model(model_path)
    raw_points = build_path(spec.dimension, path, K_path, n_path)
    quad_grid = make_grid(spec.dimension, n_quad)
    check_quadrature_size(quad_grid)
    k_grid = make_grid(spec.dimension, n_k)
    logger.info(f"sweeping {len(raw_points)} total momenta")

    def analyze(raw: List[float]) -> Tuple[ChannelSpectrum, DiscreteSpectrumReport]:
        return _analyze(spec, raw, quad_grid, k_grid)

    results = ordered_map(analyze, raw_points)
    rows = [_row(raw, sigma, report) for raw, (sigma, report) in zip(raw_points, results)]

    if output_format == "json":
        return render_json(rows), 0
    return _render_csv(rows, spec.dimension), 0


def _analyze(spec: ModelSpec, raw: List[float], quad_grid: TorusGrid, k_grid: TorusGrid) -> Tuple[ChannelSpectrum, DiscreteSpectrumReport]:
    K = canonicalize(raw)
    sigma = channel_engine.channel_spectrum(spec, K, k_grid, quad_grid)
    report = faddeev_engine.discrete_spectrum(spec, K, None, quad_grid, k_grid, sigma=sigma)
    return sigma, report
