"""
Pydantic schemas for model documents and spectral results
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Optional, List, Dict, Any, Tuple
from enum import Enum
import math


class BranchSide(str, Enum):
    BELOW = "below"
    ABOVE = "above"


class OracleKind(str, Enum):
    FULL_H = "full_H"
    FIBER_H = "fiber_h"
    CHANNEL_HCH = "channel_Hch"


# Model document schemas
class Harmonic(BaseModel):
    """One per-axis harmonic cos_coeff·cos(m q_i) + sin_coeff·sin(m q_i)"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    m: int = Field(..., gt=0)
    cos: float = 0.0
    sin: float = 0.0


class CosineSeries(BaseModel):
    """f(q) = constant + Σ_i Σ_m [cos·cos(m q_i) + sin·sin(m q_i)]"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    constant: float = 0.0
    harmonics: Tuple[Harmonic, ...] = ()
    # Optional tag checked against the document dimension by validate
    dimension: Optional[int] = Field(default=None, gt=0)

    def coefficients(self) -> List[float]:
        values = [self.constant]
        for harmonic in self.harmonics:
            values.extend([harmonic.cos, harmonic.sin])
        return values


class W1Terms(BaseModel):
    """w1(K; p) = self(p) + pair(K - p) + const"""
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    self_term: CosineSeries = Field(default_factory=CosineSeries, alias="self")
    pair: CosineSeries = Field(default_factory=CosineSeries)
    const: float = 0.0


class W2Terms(BaseModel):
    """w2(K; p, q) = const + single(p) + single(q) + recoil(K - p - q)"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    const: float = 0.0
    single: CosineSeries = Field(default_factory=CosineSeries)
    recoil: CosineSeries = Field(default_factory=CosineSeries)


class ModelSpec(BaseModel):
    """The five parameter functions of H(K) on the d-dimensional torus"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    dimension: int = Field(..., gt=0)
    w0: CosineSeries = Field(default_factory=CosineSeries)
    w1: W1Terms = Field(default_factory=W1Terms)
    w2: W2Terms = Field(default_factory=W2Terms)
    v0: CosineSeries = Field(default_factory=CosineSeries)
    v1: CosineSeries = Field(default_factory=CosineSeries)

    def named_series(self) -> Dict[str, CosineSeries]:
        return {
            "w0": self.w0,
            "w1.self": self.w1.self_term,
            "w1.pair": self.w1.pair,
            "w2.single": self.w2.single,
            "w2.recoil": self.w2.recoil,
            "v0": self.v0,
            "v1": self.v1,
        }


# Validation report
class ValidationCheck(BaseModel):
    name: str
    passed: bool
    detail: Optional[str] = None


class ValidationReport(BaseModel):
    passed: bool
    checks: List[ValidationCheck] = []


# Spectral result schemas
class Interval(BaseModel):
    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float

    @model_validator(mode="after")
    def check_order(self) -> "Interval":
        if not self.lo <= self.hi:
            raise ValueError(f"interval lower end {self.lo} exceeds upper end {self.hi}")
        return self

    def contains(self, value: float, pad: float = 0.0) -> bool:
        return self.lo - pad <= value <= self.hi + pad

    def distance(self, value: float) -> float:
        if value < self.lo:
            return self.lo - value
        if value > self.hi:
            return value - self.hi
        return 0.0


class FiberBand(BaseModel):
    e_min: float
    e_max: float
    degenerate: bool = False


class FiberSpectrum(BaseModel):
    K: List[float]
    k: List[float]
    band: FiberBand
    below: Optional[float] = None
    above: Optional[float] = None
    indeterminate: List[BranchSide] = []

    def eigenvalues(self) -> List[float]:
        return [z for z in (self.below, self.above) if z is not None]


class Branch(BaseModel):
    side: BranchSide
    lo: float
    hi: float
    uniform: bool


class ChannelSpectrum(BaseModel):
    K: List[float]
    three_particle: Interval
    two_particle_below: Optional[Interval] = None
    two_particle_above: Optional[Interval] = None
    existence_uniform_below: bool = False
    existence_uniform_above: bool = False
    k_samples: int
    # Canonical merged union of all branches, at most three intervals
    intervals: List[Interval] = []

    def branches(self) -> List[Branch]:
        branches = []
        if self.two_particle_below is not None:
            branches.append(Branch(
                side=BranchSide.BELOW,
                lo=self.two_particle_below.lo,
                hi=self.two_particle_below.hi,
                uniform=self.existence_uniform_below,
            ))
        if self.two_particle_above is not None:
            branches.append(Branch(
                side=BranchSide.ABOVE,
                lo=self.two_particle_above.lo,
                hi=self.two_particle_above.hi,
                uniform=self.existence_uniform_above,
            ))
        return branches

    def distance(self, value: float) -> float:
        """Distance from value to the union of intervals"""
        if not self.intervals:
            return math.inf
        return min(interval.distance(value) for interval in self.intervals)

    def contains(self, value: float, pad: float = 0.0) -> bool:
        return self.distance(value) <= pad

    def document(self) -> Dict[str, Any]:
        return {
            "K": self.K,
            "three_particle": self.three_particle.model_dump(),
            "branches": [branch.model_dump(mode="json") for branch in self.branches()],
            "intervals": [interval.model_dump() for interval in self.intervals],
            "k_samples": self.k_samples,
        }


class DiscreteSpectrumReport(BaseModel):
    K: List[float]
    eigenvalues: List[float] = []
    multiplicities: List[int] = []
    residuals: List[float] = []
    eigen_check: List[float] = []
    search_window: Interval
    sigma_K_used: ChannelSpectrum
    unresolved_near_edge: List[float] = []

    def document(self) -> Dict[str, Any]:
        return {
            "K": self.K,
            "eigenvalues": self.eigenvalues,
            "multiplicities": self.multiplicities,
            "residuals": self.residuals,
            "eigen_check": self.eigen_check,
            "search_window": self.search_window.model_dump(),
            "sigma_K_used": self.sigma_K_used.document(),
            "unresolved_near_edge": self.unresolved_near_edge,
        }


class SpectrumComparison(BaseModel):
    analytic: ChannelSpectrum
    analytic_discrete: List[float] = []
    oracle_eigenvalues: List[float] = []
    coverage_violations: List[float] = []
    missing_discrete: List[float] = []
    matched_discrete: int = 0
    ess_tol: float
    disc_tol: float

    @property
    def passed(self) -> bool:
        return not self.coverage_violations and not self.missing_discrete

    def document(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "sigma_K": self.analytic.document(),
            "analytic_discrete": self.analytic_discrete,
            "oracle_eigenvalue_count": len(self.oracle_eigenvalues),
            "matched_discrete": self.matched_discrete,
            "coverage_violations": self.coverage_violations,
            "missing_discrete": self.missing_discrete,
            "tolerances": {"ess_tol": self.ess_tol, "disc_tol": self.disc_tol},
        }


# Error schemas
class ErrorResponse(BaseModel):
    error: str
    detail: Optional[str] = None
    code: Optional[str] = None
