"""
fiber command: spectrum of one fiber operator h(K, k)
"""

from typing import Optional

from commands import CommandResult, load_valid_model, parse_point, render_json, with_measure
from services.friedrichs_engine import friedrichs_engine
from services.torus_grid import make_grid


def cmd_fiber(model_path: str, K: Optional[str], k: Optional[str], n_quad: int) -> CommandResult:
    spec = load_valid_model(model_path)
    K_point = parse_point(K, spec.dimension, "K")
    k_point = parse_point(k, spec.dimension, "k")
    quad_grid = make_grid(spec.dimension, n_quad)
    fiber = friedrichs_engine.fiber_discrete_spectrum(spec, K_point, k_point, quad_grid)
    return render_json(with_measure(fiber.model_dump(mode="json"), spec.dimension)), 0
