"""
Exception hierarchy for latspec

Each error carries the process exit status the CLI reports for it.
"""

from typing import Optional


class LatspecError(Exception):
    """Base error with an exit status and a human readable detail"""

    exit_code: int = 2
    code: str = "latspec_error"

    def __init__(self, detail: str, code: Optional[str] = None):
        super().__init__(detail)
        self.detail = detail
        if code:
            self.code = code


class InvalidArgumentError(LatspecError):
    """Malformed or inconsistent input value"""

    exit_code = 2
    code = "invalid_argument"


class ResourceLimitError(LatspecError):
    """Requested grid or matrix exceeds the configured limits"""

    exit_code = 2
    code = "resource_limit"


class DomainError(LatspecError):
    """Function evaluated outside its domain of definition"""

    exit_code = 2
    code = "domain_error"


class ModelFormatError(LatspecError):
    """Model document could not be read or parsed"""

    exit_code = 2
    code = "model_format"


class NumericalFailureError(LatspecError):
    """A numerical procedure did not converge or produced an unusable result"""

    exit_code = 3
    code = "numerical_failure"


class NearSingularFiberError(NumericalFailureError):
    """Δ_K(p; z) vanishes at a quadrature node, so T(K, z) cannot be built"""

    code = "near_singular_fiber"

    def __init__(self, detail: str, p: Optional[list] = None):
        super().__init__(detail)
        self.p = p
