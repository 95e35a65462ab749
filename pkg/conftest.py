"""
Shared fixtures: Model A builders and small torus grids
"""

import json

import pytest

from schemas import CosineSeries, Harmonic, ModelSpec, W1Terms, W2Terms
from services.torus_grid import make_grid


def dispersion(d: int) -> CosineSeries:
    """ε(p) = Σ_i (1 - cos p_i)"""
    return CosineSeries(constant=float(d), harmonics=(Harmonic(m=1, cos=-1.0),))


def build_model_a(alpha: float = 1.0, beta: float = 1.0, d: int = 1) -> ModelSpec:
    eps = dispersion(d)
    return ModelSpec(
        dimension=d,
        w0=eps,
        w1=W1Terms(self_term=eps, pair=eps),
        w2=W2Terms(single=eps, recoil=eps),
        v0=CosineSeries(constant=alpha),
        v1=CosineSeries(constant=beta),
    )


@pytest.fixture
def model_a():
    return build_model_a()


@pytest.fixture
def model_a_factory():
    return build_model_a


@pytest.fixture
def decoupled():
    """v0 = v1 = 0 with w0 ≡ -3 below every band"""
    eps = dispersion(1)
    return ModelSpec(
        dimension=1,
        w0=CosineSeries(constant=-3.0),
        w1=W1Terms(self_term=eps, pair=eps),
        w2=W2Terms(single=eps, recoil=eps),
    )


@pytest.fixture
def constant_band():
    """w1 = 0, w2 ≡ 2, v1 ≡ 1: fibers with closed-form eigenvalues"""
    return ModelSpec(
        dimension=1,
        w2=W2Terms(const=2.0),
        v1=CosineSeries(constant=1.0),
    )


@pytest.fixture
def grid_1d():
    return make_grid(1, 64)


@pytest.fixture
def write_model(tmp_path):
    """Write a ModelSpec or raw dict to a JSON file and return its path"""
    def _write(model, name: str = "model.json") -> str:
        path = tmp_path / name
        if isinstance(model, ModelSpec):
            document = model.model_dump(mode="json", by_alias=True, exclude_none=True)
        else:
            document = model
        path.write_text(json.dumps(document))
        return str(path)
    return _write
