"""
spectrum command: Σ_K and the discrete spectrum of H(K)
"""

from typing import Optional

from commands import CommandResult, load_valid_model, parse_point, parse_window, render_json, with_measure
from services.channel_engine import channel_engine
from services.faddeev_engine import check_quadrature_size, faddeev_engine
from services.torus_grid import make_grid


def cmd_spectrum(
    model_path: str,
    K: Optional[str],
    n_quad: int,
    n_k: int,
    window: Optional[str],
) -> CommandResult:
    spec = load_valid_model(model_path)
    K_point = parse_point(K, spec.dimension, "K")
    search_window = parse_window(window)
    quad_grid = make_grid(spec.dimension, n_quad)
    check_quadrature_size(quad_grid)
    k_grid = make_grid(spec.dimension, n_k)

    sigma = channel_engine.channel_spectrum(spec, K_point, k_grid, quad_grid)
    report = faddeev_engine.discrete_spectrum(spec, K_point, search_window, quad_grid, k_grid, sigma=sigma)
    return render_json(with_measure(report.document(), spec.dimension)), 0
