"""
oracle command: brute-force verification of Σ_K and the discrete spectrum of H(K)
"""

from typing import Optional
import logging

from commands import CommandResult, load_valid_model, parse_point, render_json, with_measure, write_csv_column
from schemas import ChannelSpectrum, Interval
from services.channel_engine import channel_engine
from services.faddeev_engine import faddeev_engine
from services.oracle_engine import oracle_engine
from services.torus_grid import make_grid

logger = logging.getLogger(__name__)


def shift_spectrum(sigma: ChannelSpectrum, shift: float) -> ChannelSpectrum:
    """Translate every interval of Σ_K; used as a negative control"""
    def moved(interval: Optional[Interval]) -> Optional[Interval]:
        if interval is None:
            return None
        return Interval(lo=interval.lo + shift, hi=interval.hi + shift)

    return sigma.model_copy(update={
        "three_particle": moved(sigma.three_particle),
        "two_particle_below": moved(sigma.two_particle_below),
        "two_particle_above": moved(sigma.two_particle_above),
        "intervals": [moved(interval) for interval in sigma.intervals],
    })


def cmd_oracle(
    model_path: str,
    K: Optional[str],
    n_oracle: int,
    ess_tol: float,
    disc_tol: float,
    sigma_shift: float = 0.0,
    dump_eigs: Optional[str] = None,
) -> CommandResult:
    """Compare the oracle spectrum of H(K) with Σ_K and the roots of Ω_K; exit 0 iff consistent"""
    spec = load_valid_model(model_path)
    K_point = parse_point(K, spec.dimension, "K")
    # one grid for quadrature, fibers and oracle so the discretizations coincide
    grid = make_grid(spec.dimension, n_oracle)

    oracle_eigs = oracle_engine.eigenvalues(oracle_engine.discretize_H(spec, K_point, grid))
    if dump_eigs:
        write_csv_column(dump_eigs, oracle_eigs)

    sigma = channel_engine.channel_spectrum(spec, K_point, grid, grid)
    default = faddeev_engine.default_window(sigma)
    window = Interval(lo=min(default.lo, oracle_eigs[0] - 1.0), hi=max(default.hi, oracle_eigs[-1] + 1.0))
    report = faddeev_engine.discrete_spectrum(spec, K_point, window, grid, grid, sigma=sigma)

    if sigma_shift:
        logger.info(f"shifting Σ_K by {sigma_shift} before comparison")
        sigma = shift_spectrum(sigma, sigma_shift)

    comparison = oracle_engine.compare_spectra(sigma, report.eigenvalues, oracle_eigs, ess_tol, disc_tol)
    document = comparison.document()
    document["K"] = report.K
    document["n_oracle"] = n_oracle
    document["eigen_check"] = report.eigen_check
    with_measure(document, spec.dimension)
    return render_json(document), 0 if comparison.passed else 1
