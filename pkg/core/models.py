"""
Core data models shared by the gausstail packages.
"""
import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Provenance(str, Enum):
    """Where a coefficient set came from."""
    EXACT = "exact"
    FITTED = "fitted"


class Basis(str, Enum):
    """Basis functions used in tail expansions."""
    TAIL = "Phi_bar(u)"
    DENSITY = "phi(u)"
    U_DENSITY = "u*phi(u)"
    HERMITE2 = "(u^2-1)*phi(u)"
    ROOT_DENSITY = "u^-1/2*phi(u)"


class SteinerCoeffs2D(BaseModel):
    """Steiner coefficients of a planar set: area, outer Minkowski content and L0."""
    model_config = ConfigDict(frozen=True, use_enum_values=True)

    # fitted sets may come out negative; exact ones may not
    sigma2: float
    L1: float
    L0: float
    provenance: Provenance = Provenance.EXACT

    @model_validator(mode="after")
    def _check_exact_signs(self) -> "SteinerCoeffs2D":
        if self.provenance == Provenance.EXACT and (self.sigma2 < 0 or self.L1 < 0):
            raise ValueError(f"exact coefficients need sigma2 >= 0 and L1 >= 0, got {self.sigma2}, {self.L1}")
        return self

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.sigma2, self.L1, self.L0)


class SteinerCoeffs3D(BaseModel):
    """Steiner-type coefficients of a polytope."""
    model_config = ConfigDict(frozen=True, use_enum_values=True)

    L1: float
    L2: float
    L3: float
    provenance: Provenance = Provenance.EXACT

    @model_validator(mode="after")
    def _check_exact_signs(self) -> "SteinerCoeffs3D":
        if self.provenance == Provenance.EXACT and (self.L2 < 0 or self.L3 < 0):
            raise ValueError(f"exact coefficients need L2 >= 0 and L3 >= 0, got {self.L2}, {self.L3}")
        return self

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.L1, self.L2, self.L3)


class ExpansionTerm(BaseModel):
    """One term of an expansion: coefficient times basis value."""
    model_config = ConfigDict(frozen=True, use_enum_values=True)

    name: str
    coefficient: float
    basis: Basis
    basis_value: float
    product: float


class ExpansionResult(BaseModel):
    """
    Tail expansion evaluated at a level u.

    The total is always the sum of the term products; the validator
    rejects hand-built results that break this.
    """
    model_config = ConfigDict(frozen=True, use_enum_values=True)

    u: float
    terms: List[ExpansionTerm]
    total: float

    @model_validator(mode="after")
    def _check_total(self) -> "ExpansionResult":
        expected = math.fsum(term.product for term in self.terms)
        scale = max(abs(expected), sum(abs(t.product) for t in self.terms), 1e-300)
        if abs(self.total - expected) > 1e-14 * scale:
            raise ValueError(f"total {self.total!r} differs from sum of terms {expected!r}")
        return self

    @classmethod
    def from_terms(cls, u: float, terms: List[ExpansionTerm]) -> "ExpansionResult":
        return cls(u=u, terms=terms, total=math.fsum(term.product for term in terms))

    def term(self, name: str) -> ExpansionTerm:
        for term in self.terms:
            if term.name == name:
                return term
        raise KeyError(name)


class DiagnosticCounts(BaseModel):
    """Counters of the negligible events and of ball-sandwich failures."""
    examined: int = 0
    a1: int = 0
    a2: int = 0
    a3: int = 0
    a4: int = 0
    single_maximum: int = 0
    sandwich_failures: int = 0

    def merge(self, other: "DiagnosticCounts") -> "DiagnosticCounts":
        return DiagnosticCounts(**{
            name: getattr(self, name) + getattr(other, name)
            for name in DiagnosticCounts.model_fields
        })


class MCEstimate(BaseModel):
    """Crude Monte Carlo estimate of an exceedance probability."""
    model_config = ConfigDict(frozen=True)

    u: float
    p_hat: float = Field(ge=0.0, le=1.0)
    replicates: int = Field(gt=0)
    hits: int = Field(ge=0)
    standard_error: float = Field(ge=0.0)
    grid_h: float = Field(gt=0.0)
    diagnostics: DiagnosticCounts = Field(default_factory=DiagnosticCounts)

    @classmethod
    def from_hits(cls, u: float, hits: int, replicates: int, grid_h: float,
                  diagnostics: Optional[DiagnosticCounts] = None) -> "MCEstimate":
        p_hat = hits / replicates
        return cls(
            u=u,
            p_hat=p_hat,
            replicates=replicates,
            hits=hits,
            standard_error=math.sqrt(p_hat * (1.0 - p_hat) / replicates),
            grid_h=grid_h,
            diagnostics=diagnostics or DiagnosticCounts(),
        )


class RunManifest(BaseModel):
    """Provenance record attached to every CLI output."""
    command: str
    input_hash: Optional[str] = None
    seed: Optional[int] = None
    parameters: Dict[str, Any] = Field(default_factory=dict)
    tool_version: str
    wall_time: float = 0.0
