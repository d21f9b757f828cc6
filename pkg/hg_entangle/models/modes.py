"""Transverse mode labels and Gaussian beam parameters."""

import math
from typing import Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, computed_field, model_validator

from hg_entangle.exceptions import InputError


class ModeIndex(BaseModel):
    """Hermite-Gaussian mode label HG_m^n (m along x, n along y)."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=0, description="x-direction index")
    n: int = Field(ge=0, description="y-direction index")

    @classmethod
    def of(cls, m: int, n: int) -> "ModeIndex":
        """Positional constructor."""
        return cls(m=m, n=n)

    def order(self) -> int:
        return self.m + self.n

    def as_tuple(self) -> Tuple[int, int]:
        return (self.m, self.n)

    def __str__(self) -> str:
        return f"HG({self.m},{self.n})"


class LGIndex(BaseModel):
    """Laguerre-Gaussian mode label LG_p^l."""

    model_config = ConfigDict(frozen=True)

    p: int = Field(ge=0, description="Radial index")
    l: int = Field(description="Azimuthal index (orbital angular momentum)")  # noqa: E741

    @classmethod
    def of(cls, p: int, l: int) -> "LGIndex":  # noqa: E741
        """Positional constructor."""
        return cls(p=p, l=l)

    def order(self) -> int:
        return 2 * self.p + abs(self.l)

    def as_tuple(self) -> Tuple[int, int]:
        return (self.p, self.l)

    def __str__(self) -> str:
        return f"LG({self.p},{self.l})"


class BeamGeometry(BaseModel):
    """Waist and wavenumber of a focused Gaussian beam, in one length unit."""

    model_config = ConfigDict(frozen=True)

    waist: float = Field(gt=0.0, description="Beam waist radius w_0")
    wavenumber: float = Field(gt=0.0, description="Wavenumber k = 2*pi/lambda")

    @classmethod
    def from_wavelength(cls, waist: float, wavelength: float) -> "BeamGeometry":
        """Build a geometry from the vacuum wavelength instead of the wavenumber."""
        if wavelength <= 0:
            raise ValueError("wavelength must be positive")
        return cls(waist=waist, wavenumber=2.0 * math.pi / wavelength)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def rayleigh_range(self) -> float:
        """z_R = k w_0^2 / 2."""
        return 0.5 * self.wavenumber * self.waist**2


class BeamParameters(BaseModel):
    """Spot size, wavefront curvature radius and Gouy phase at one propagation distance."""

    model_config = ConfigDict(frozen=True)

    spot_size: float
    curvature_radius: float = Field(description="math.inf for a flat wavefront")
    gouy_phase: float

    @property
    def is_flat(self) -> bool:
        return math.isinf(self.curvature_radius)


class WaistRatio(BaseModel):
    """a = (w_o / w_p)^2, signal/idler waist over pump waist, squared."""

    model_config = ConfigDict(frozen=True)

    value: float = Field(gt=0.0, description="Dimensionless waist ratio a")

    @model_validator(mode="after")
    def _finite(self) -> "WaistRatio":
        if not math.isfinite(self.value):
            raise ValueError("waist ratio must be finite")
        return self

    @classmethod
    def coerce(cls, a: Union["WaistRatio", float]) -> "WaistRatio":
        """Accept either a plain float or an existing WaistRatio."""
        if isinstance(a, WaistRatio):
            return a
        try:
            return cls(value=a)
        except ValidationError as e:
            raise InputError("waist ratio a must be a positive finite number", a=a) from e


WaistRatioLike = Union[WaistRatio, float]
