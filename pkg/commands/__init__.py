"""
Command handlers for the latspec CLI

Each handler takes plain arguments, returns the rendered payload and the
process exit status, and lets LatspecError propagate to main.
"""

from typing import Any, Dict, Optional, Sequence, Tuple
import json
import logging
import math

import numpy as np
from pydantic import ValidationError

from schemas import Interval, ModelSpec
from services.model_engine import model_engine
from services.torus_grid import TorusPoint, canonicalize, measure_metadata
from exceptions import InvalidArgumentError, ModelFormatError

logger = logging.getLogger(__name__)

CommandResult = Tuple[str, int]


def load_model(model_path: str) -> ModelSpec:
    """Read and parse a model document, translating every failure into ModelFormatError"""
    try:
        with open(model_path, "r", encoding="utf-8") as handle:
            raw = handle.read()
    except OSError as e:
        logger.error(f"cannot read model file {model_path}: {e}")
        raise ModelFormatError(f"cannot read model file {model_path}: {e.strerror or e}")

    try:
        document = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"{model_path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")

    try:
        return ModelSpec.model_validate(document)
    except ValidationError as e:
        lines = []
        for error in e.errors():
            location = ".".join(str(part) for part in error["loc"]) or "<document>"
            lines.append(f"{location}: {error['msg']}")
        raise ModelFormatError("\n".join(lines))


def load_valid_model(model_path: str) -> ModelSpec:
    """Load a model for computation; documents failing validate are rejected as malformed"""
    spec = load_model(model_path)
    report = model_engine.validate(spec)
    if not report.passed:
        failed = [f"{check.name}: {check.detail}" for check in report.checks if not check.passed]
        logger.error(f"model {model_path} failed validation: {'; '.join(failed)}")
        raise ModelFormatError(f"{model_path} failed validation\n" + "\n".join(failed))
    return spec


def parse_point(text: Optional[str], dimension: int, name: str) -> TorusPoint:
    """Comma-separated reals, canonicalized to (-π, π]; None means the origin"""
    if text is None:
        return canonicalize(np.zeros(dimension))
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise InvalidArgumentError(f"--{name} expects comma-separated reals, got '{text}'")
    if len(values) != dimension:
        raise InvalidArgumentError(f"--{name} has {len(values)} components, model dimension is {dimension}")
    return canonicalize(values)


def parse_window(text: Optional[str]) -> Optional[Interval]:
    if text is None:
        return None
    parts = text.split(":")
    if len(parts) != 2:
        raise InvalidArgumentError(f"--window expects lo:hi, got '{text}'")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise InvalidArgumentError(f"--window expects real endpoints, got '{text}'")
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise InvalidArgumentError(f"--window needs finite lo < hi, got '{text}'")
    return Interval(lo=lo, hi=hi)


def render_json(payload: Any) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip float repr"""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def format_float(value: float) -> str:
    return "%.17g" % value


def write_csv_column(path: str, values: Sequence[float]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for value in values:
            handle.write(format_float(value) + "\n")



def with_measure(document: Dict[str, Any], dimension: int) -> Dict[str, Any]:
    document["measure"] = measure_metadata(dimension)
    return document
