"""Down-conversion coefficient tables and conservation-law reports."""

import math
from enum import Enum
from typing import Dict, Iterator, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from hg_entangle.models.modes import ModeIndex, WaistRatio

# (m_s, n_s, m_i, n_i)
EntryKey = Tuple[int, int, int, int]

NORMALIZATION_TOLERANCE = 1e-12


class ConservationLaw(str, Enum):
    """Selection rules checked against a coefficient table."""

    QUASI_CONSERVATION = "quasi_conservation"  # |m_s - m_i| = m_p and |n_s - n_i| = n_p
    PARITY = "parity"  # m_s + m_i = m_p and n_s + n_i = n_p modulo 2


class CoefficientTable(BaseModel):
    """Thin-crystal amplitudes C(m_s, n_s, m_i, n_i) for one pump mode."""

    model_config = ConfigDict(frozen=True)

    pump: ModeIndex
    waist_ratio: WaistRatio
    max_order: int = Field(ge=0, description="Truncation for both signal and idler orders")
    entries: Dict[EntryKey, complex] = Field(default_factory=dict)
    normalized: bool = Field(default=False, description="Entries rescaled to unit square-sum")

    @model_validator(mode="after")
    def _check_entries(self) -> "CoefficientTable":
        for key in self.entries:
            m_s, n_s, m_i, n_i = key
            if min(key) < 0:
                raise ValueError(f"negative mode index in entry {key}")
            if m_s + n_s > self.max_order or m_i + n_i > self.max_order:
                raise ValueError(f"entry {key} exceeds max_order {self.max_order}")
        if self.normalized and abs(self.norm() - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError("normalized table does not have unit square-sum")
        return self

    def norm(self) -> float:
        """Square-sum of all amplitudes."""
        return math.fsum(abs(c) ** 2 for c in self.entries.values())

    def entry(self, signal: ModeIndex, idler: ModeIndex) -> complex:
        return self.entries.get((signal.m, signal.n, idler.m, idler.n), 0j)

    def normalized_copy(self) -> "CoefficientTable":
        """Copy with the square-sum rescaled to one."""
        scale = math.sqrt(self.norm())
        if scale == 0.0:
            raise ValueError("cannot normalize an all-zero table")
        entries = {key: c / scale for key, c in self.entries.items()}
        return self.model_copy(update={"entries": entries, "normalized": True})

    def rows(self) -> Iterator[Tuple[EntryKey, complex]]:
        """Entries in ascending (m_s, n_s, m_i, n_i) order."""
        for key in sorted(self.entries):
            yield key, self.entries[key]

    def __len__(self) -> int:
        return len(self.entries)


class ConservationReport(BaseModel):
    """How much of a table's weight obeys one selection rule."""

    law: ConservationLaw
    satisfied_weight: float = Field(ge=0.0, le=1.0)
    worst_violation: float = Field(ge=0.0, description="Largest |c| among violating entries")
    satisfied_count: int = Field(ge=0)
    violating_count: int = Field(ge=0)

    def summary(self) -> Dict[str, object]:
        return self.model_dump(mode="json")


class GaussianPumpCheck(BaseModel):
    """Agreement of a Gaussian-pump table with the factorized analytic form."""

    max_ratio_deviation: float = Field(ge=0.0)
    entries_checked: int = Field(ge=0)
    worst_entry: List[int] = Field(default_factory=list)
