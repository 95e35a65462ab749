"""
validate command: structural checks of a model document
"""

import logging

from commands import CommandResult, load_model, render_json
from services.model_engine import model_engine

logger = logging.getLogger(__name__)


def cmd_validate(model_path: str) -> CommandResult:
    """Print the validation report; exit 0 iff every check passes"""
    spec = load_model(model_path)
    report = model_engine.validate(spec)
    if not report.passed:
        failed = [check.name for check in report.checks if not check.passed]
        logger.warning(f"model {model_path} failed checks: {', '.join(failed)}")
    return render_json(report.model_dump(mode="json")), 0 if report.passed else 1
