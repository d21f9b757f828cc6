"""Configuration models for hg-entangle."""

from enum import Enum
from typing import Dict, List, Optional

from pydantic import AliasChoices, BaseModel, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from hg_entangle.models.hom import Axis, PolarizationSymmetry
from hg_entangle.models.quadrature import QuadratureSpec
from hg_entangle.models.states import Basis


class OutputFormat(str, Enum):
    """Serialization of command output."""

    CSV = "csv"
    JSON = "json"


class ModeFamily(str, Enum):
    """Transverse mode family for grid evaluation."""

    HG = "hg"
    LG = "lg"


class HGEntangleConfig(BaseSettings):
    """Library defaults, overridable through HG_ENTANGLE_* environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="HG_ENTANGLE_", case_sensitive=False, populate_by_name=True
    )

    quadrature_order: int = Field(default=64, ge=1, description="Gauss-Hermite nodes")
    quadrature_tolerance: float = Field(default=1e-12, ge=0.0)
    max_table_order: int = Field(default=12, ge=0, description="Cap on coefficient table order")
    q_tail_terms: int = Field(default=80, ge=0, description="Default n_max for Q_m sums")
    tail_tolerance: float = Field(default=1e-12, gt=0.0)
    max_block_order: int = Field(default=16, ge=0, description="Largest HG/LG conversion block")
    log_level: str = Field(
        default="INFO", validation_alias=AliasChoices("LOG_LEVEL", "HG_ENTANGLE_LOG_LEVEL")
    )

    def quadrature_spec(self, rule_order: Optional[int] = None) -> QuadratureSpec:
        """QuadratureSpec from the defaults, optionally overriding the order."""
        return QuadratureSpec(
            rule_order=self.quadrature_order if rule_order is None else rule_order,
            abs_tolerance=self.quadrature_tolerance,
        )


class QCurveConfig(BaseModel):
    """Parameters of the qcurve command."""

    m_values: List[int] = Field(min_length=1)
    a_values: List[float] = Field(min_length=1)
    n_max: int = Field(ge=0)
    out: Optional[str] = None

    @field_validator("m_values")
    @classmethod
    def _nonnegative_m(cls, value: List[int]) -> List[int]:
        if any(m < 0 for m in value):
            raise ValueError("m values must be nonnegative")
        return value

    @field_validator("a_values")
    @classmethod
    def _positive_a(cls, value: List[float]) -> List[float]:
        if any(not 0.0 < a < float("inf") for a in value):
            raise ValueError("grid values must lie in (0, inf)")
        return value

    @model_validator(mode="after")
    def _tail_covers_m(self) -> "QCurveConfig":
        if self.n_max < max(self.m_values):
            raise ValueError(f"n_max {self.n_max} is below the largest m {max(self.m_values)}")
        return self


class CoeffsConfig(BaseModel):
    """Parameters of the coeffs command."""

    pump_m: int = Field(ge=0)
    pump_n: int = Field(ge=0)
    a: float = Field(gt=0.0)
    max_order: int = Field(ge=0)
    max_table_order: int = Field(default=12, ge=0)
    normalize: bool = False
    rule_order: int = Field(default=64, ge=1)
    format: OutputFormat = OutputFormat.CSV
    out: Optional[str] = None

    @model_validator(mode="after")
    def _order_within_cap(self) -> "CoeffsConfig":
        if self.max_order > self.max_table_order:
            raise ValueError(
                f"max_order {self.max_order} exceeds the table cap {self.max_table_order}"
            )
        return self


class BuildHGConfig(BaseModel):
    a: float = Field(gt=0.0)
    max_order: int = Field(ge=0)
    out: Optional[str] = None


class LGInputConfig(BaseModel):
    l_max: int = Field(ge=0)
    coefficients: Dict[int, complex]
    out: Optional[str] = None

    @model_validator(mode="after")
    def _within_l_max(self) -> "LGInputConfig":
        outside = [l for l in self.coefficients if abs(l) > self.l_max]  # noqa: E741
        if outside:
            raise ValueError(f"coefficients given for |l| > l_max: {outside}")
        if not any(c != 0 for c in self.coefficients.values()):
            raise ValueError("at least one coefficient must be nonzero")
        return self


class ConvertConfig(BaseModel):
    input: str
    target: Basis
    max_block_order: int = Field(default=16, ge=0)
    out: Optional[str] = None


class EntropyConfig(BaseModel):
    input: str
    out: Optional[str] = None


class HomConfig(BaseModel):
    mirror_axis: Axis = Axis.Y
    out: Optional[str] = None


class TeleportConfig(BaseModel):
    alpha: complex
    beta: complex
    polarization: PolarizationSymmetry = PolarizationSymmetry.SYMMETRIC
    mirror_axis: Axis = Axis.Y
    out: Optional[str] = None

    @model_validator(mode="after")
    def _normalized(self) -> "TeleportConfig":
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")
        return self


class ModesEvalConfig(BaseModel):
    family: ModeFamily = ModeFamily.HG
    index: List[int] = Field(min_length=2, max_length=2)
    waist: float = Field(default=1.0, gt=0.0)
    extent: float = Field(default=3.0, gt=0.0)
    points: int = Field(default=101, ge=2)
    z: float = 0.0
    wavenumber: Optional[float] = Field(default=None, gt=0.0)
    out: Optional[str] = None

    @model_validator(mode="after")
    def _family_rules(self) -> "ModesEvalConfig":
        first, _ = self.index
        if first < 0 or (self.family is ModeFamily.HG and min(self.index) < 0):
            raise ValueError(f"invalid {self.family.value} index {self.index}")
        if self.family is ModeFamily.LG and self.z != 0.0:
            raise ValueError("LG fields are evaluated at the waist only")
        if self.z != 0.0 and self.wavenumber is None:
            raise ValueError("--wavenumber is required away from the waist")
        return self
