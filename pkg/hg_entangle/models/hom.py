"""Parity-encoded photon states for Hong-Ou-Mandel and teleportation runs."""

import math
from enum import Enum
from typing import Dict, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

PARITY_NORM_TOLERANCE = 1e-12


class Axis(str, Enum):
    """Transverse axis carrying the parity qubit (x: index m, y: index n)."""

    X = "x"
    Y = "y"


class PolarizationSymmetry(str, Enum):
    """Exchange symmetry of the polarization part of the pair."""

    SYMMETRIC = "sym"
    ANTISYMMETRIC = "antisym"

    @property
    def sign(self) -> int:
        return 1 if self is PolarizationSymmetry.SYMMETRIC else -1


class BellState(str, Enum):
    """Bell states of two parity qubits; |p1, p2> with 1 = odd."""

    PSI_PLUS = "Psi+"  # (|1,0> + |0,1>)/sqrt(2)
    PSI_MINUS = "Psi-"  # (|1,0> - |0,1>)/sqrt(2)
    PHI_PLUS = "Phi+"  # (|0,0> + |1,1>)/sqrt(2)
    PHI_MINUS = "Phi-"  # (|0,0> - |1,1>)/sqrt(2)


def _check_norm(value: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    array = np.asarray(value, dtype=np.complex128)
    if array.shape != shape:
        raise ValueError(f"amplitudes must have shape {shape}, got {array.shape}")
    norm = float(np.sum(np.abs(array) ** 2))
    if abs(norm - 1.0) > PARITY_NORM_TOLERANCE:
        raise ValueError(f"amplitudes must have unit norm, got {norm}")
    array.setflags(write=False)
    return array


class ParityBiphoton(BaseModel):
    """Two photons as amplitudes over (parity_1, parity_2) plus a polarization symmetry tag."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    axis: Axis
    amplitudes: np.ndarray
    polarization_symmetry: PolarizationSymmetry

    @field_validator("amplitudes", mode="before")
    @classmethod
    def _unit_norm(cls, value: np.ndarray) -> np.ndarray:
        return _check_norm(value, (2, 2))

    def distance(self, other: "ParityBiphoton") -> float:
        """Largest amplitude difference, ignoring the tags."""
        return float(np.max(np.abs(self.amplitudes - other.amplitudes)))


class ThreePhotonParityState(BaseModel):
    """Amplitudes over (particle 1, particle 2, particle 3) parities."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amplitudes: np.ndarray

    @field_validator("amplitudes", mode="before")
    @classmethod
    def _unit_norm(cls, value: np.ndarray) -> np.ndarray:
        return _check_norm(value, (2, 2, 2))


class TruthTableRow(BaseModel):
    """One cell of the HOM coincidence table."""

    axis: Axis
    bell_state: BellState
    pol_symmetry: PolarizationSymmetry
    coincidence_prob: float = Field(ge=0.0)


class BellBranch(BaseModel):
    """Particle-3 state left behind when particles 1 and 2 are found in one Bell state.

    The three-photon state is the sum over branches of weight * |bell> |conditional_state>.
    """

    bell_state: BellState
    weight: float = Field(ge=0.0)
    conditional_state: Tuple[complex, complex]

    @property
    def probability(self) -> float:
        return self.weight**2


class TeleportResult(BaseModel):
    """Outcome of a heralded parity-qubit teleportation."""

    branch_probabilities: Dict[BellState, float]
    selected_branch: BellState
    output_qubit: Tuple[complex, complex]
    fidelity: float = Field(ge=0.0, le=1.0)
    success_probability: float = Field(ge=0.0, le=1.0)

    def branch_total(self) -> float:
        return math.fsum(self.branch_probabilities.values())
