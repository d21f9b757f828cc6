"""Two-photon states over transverse mode labels."""

import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

Label = Tuple[int, int]
PairLabel = Tuple[Label, Label]


class Basis(str, Enum):
    """Mode basis of a two-photon state. HG labels are (m, n), LG labels are (p, l)."""

    HG = "hg"
    LG = "lg"


def label_order(basis: Basis, label: Label) -> int:
    """Mode order of a label: m + n for HG, 2p + |l| for LG."""
    first, second = label
    if basis is Basis.HG:
        return first + second
    return 2 * first + abs(second)


def labels_of_order(basis: Basis, order: int) -> List[Label]:
    """Labels of one order block in conversion-matrix order.

    HG: (N, 0), (N-1, 1), ..., (0, N). LG: l = N, N-2, ..., -N with p = (N - |l|) / 2.
    """
    if basis is Basis.HG:
        return [(order - n, n) for n in range(order + 1)]
    return [((order - abs(l)) // 2, l) for l in range(order, -order - 1, -2)]  # noqa: E741


def labels_up_to(basis: Basis, max_order: int) -> List[Label]:
    labels: List[Label] = []
    for order in range(max_order + 1):
        labels.extend(labels_of_order(basis, order))
    return labels


class TwoPhotonState(BaseModel):
    """Sparse pure state sum over c(s, i) |s, i> with s the signal and i the idler label."""

    model_config = ConfigDict(frozen=True)

    basis: Basis
    truncation_order: int = Field(ge=0)
    amplitudes: Dict[PairLabel, complex] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _labels_within_truncation(self) -> "TwoPhotonState":
        for signal, idler in self.amplitudes:
            for label in (signal, idler):
                if label[0] < 0 or (self.basis is Basis.HG and label[1] < 0):
                    raise ValueError(f"invalid {self.basis.value} label {label}")
                if label_order(self.basis, label) > self.truncation_order:
                    raise ValueError(
                        f"label {label} exceeds truncation order {self.truncation_order}"
                    )
        return self

    def norm(self) -> float:
        """Square-sum of amplitudes."""
        return math.fsum(abs(c) ** 2 for c in self.amplitudes.values())

    def normalized(self) -> "TwoPhotonState":
        total = self.norm()
        if total == 0.0:
            raise ValueError("cannot normalize a zero state")
        scale = math.sqrt(total)
        return self.model_copy(
            update={"amplitudes": {key: c / scale for key, c in self.amplitudes.items()}}
        )

    def amplitude(self, signal: Label, idler: Label) -> complex:
        return self.amplitudes.get((tuple(signal), tuple(idler)), 0j)  # type: ignore[arg-type]

    def swapped(self) -> "TwoPhotonState":
        """Exchange the signal and idler labels."""
        swapped = {(idler, signal): c for (signal, idler), c in self.amplitudes.items()}
        return self.model_copy(update={"amplitudes": swapped})

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        """True if the state is unchanged by signal/idler exchange."""
        other = self.swapped()
        keys = set(self.amplitudes) | set(other.amplitudes)
        return all(abs(self.amplitude(*k) - other.amplitude(*k)) <= tol for k in keys)

    def pruned(self, tol: float = 1e-15) -> "TwoPhotonState":
        """Drop amplitudes with modulus at or below ``tol``."""
        kept = {key: c for key, c in self.amplitudes.items() if abs(c) > tol}
        return self.model_copy(update={"amplitudes": kept})

    def sorted_items(self) -> List[Tuple[PairLabel, complex]]:
        return sorted(self.amplitudes.items())

    def amplitude_matrix(
        self, labels: Optional[List[Label]] = None
    ) -> Tuple[np.ndarray, List[Label]]:
        """Dense matrix c[s, i] over ``labels`` (all labels up to the truncation by default)."""
        labels = labels if labels is not None else labels_up_to(self.basis, self.truncation_order)
        position = {label: k for k, label in enumerate(labels)}
        matrix = np.zeros((len(labels), len(labels)), dtype=np.complex128)
        for (signal, idler), c in self.amplitudes.items():
            matrix[position[signal], position[idler]] = c
        return matrix, labels


class ConversionBlock(BaseModel):
    """Overlaps <HG | LG> within one mode order.

    Rows follow the HG labels and columns the LG labels, so that
    LG_col = sum over rows of matrix[row, col] * HG_row.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    order: int = Field(ge=0)
    matrix: np.ndarray
    hg_labels: List[Label]
    lg_labels: List[Label]

    @model_validator(mode="after")
    def _shape(self) -> "ConversionBlock":
        size = self.order + 1
        if self.matrix.shape != (size, size):
            raise ValueError(f"block of order {self.order} must be {size}x{size}")
        return self

    def unitarity_error(self) -> float:
        """Largest entry of |U^H U - I|."""
        product = self.matrix.conj().T @ self.matrix
        return float(np.max(np.abs(product - np.eye(self.order + 1))))
