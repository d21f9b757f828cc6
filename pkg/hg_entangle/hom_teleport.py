"""Parity-qubit Hong-Ou-Mandel interference and HG-encoded teleportation.

Beam-splitter convention: the coincidence amplitude is t^2 psi - r^2 E(psi),
where E swaps the photons, applies the polarization exchange sign and, when
the parity axis is the mirror axis, flips each photon's parity phase
(-1)^(p1 + p2). The minus sign is the i*i phase of two reflections. E is an
involution, so a pair leaves no coincidences at a balanced splitter exactly
when it is a +1 eigenvector of E.
"""

import math
from typing import Dict, List, Optional, Tuple

import numpy as np
import structlog
from numpy.typing import NDArray

from hg_entangle.exceptions import InputError, InvariantError
from hg_entangle.models.hom import (
    Axis,
    BellBranch,
    BellState,
    ParityBiphoton,
    PolarizationSymmetry,
    TeleportResult,
    ThreePhotonParityState,
    TruthTableRow,
)
from hg_entangle.models.spdc import CoefficientTable
from hg_entangle.models.validation import ValidationResult

logger = structlog.get_logger(__name__)

BALANCED = math.sqrt(0.5)
SPLITTER_TOLERANCE = 1e-12
QUBIT_NORM_TOLERANCE = 1e-12
COINCIDENCE_THRESHOLD = 1e-12

_MIRROR_PHASE = np.array([[1.0, -1.0], [-1.0, 1.0]])

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

# Unitary on particle 3 that maps each branch's conditional state back to the input qubit
_CORRECTIONS: Dict[BellState, NDArray[np.complex128]] = {
    BellState.PSI_PLUS: np.eye(2, dtype=np.complex128),
    BellState.PSI_MINUS: _PAULI_Z,
    BellState.PHI_PLUS: _PAULI_X,
    BellState.PHI_MINUS: _PAULI_Z @ _PAULI_X,
}


def bell_state(kind: BellState) -> NDArray[np.complex128]:
    """2x2 amplitudes over (parity_1, parity_2) for one Bell state."""
    s = BALANCED
    amplitudes = {
        BellState.PSI_PLUS: [[0, s], [s, 0]],
        BellState.PSI_MINUS: [[0, -s], [s, 0]],
        BellState.PHI_PLUS: [[s, 0], [0, s]],
        BellState.PHI_MINUS: [[s, 0], [0, -s]],
    }[kind]
    return np.array(amplitudes, dtype=np.complex128)


def bell_biphoton(
    kind: BellState, axis: Axis, polarization: PolarizationSymmetry
) -> ParityBiphoton:
    return ParityBiphoton(
        axis=axis, amplitudes=bell_state(kind), polarization_symmetry=polarization
    )


def exchange_and_mirror(state: ParityBiphoton, mirror_axis: Axis = Axis.Y) -> ParityBiphoton:
    """Swap the photons, apply the polarization sign and the mirror parity phase."""
    amplitudes = state.polarization_symmetry.sign * state.amplitudes.T
    if state.axis is mirror_axis:
        amplitudes = amplitudes * _MIRROR_PHASE
    return state.model_copy(update={"amplitudes": np.ascontiguousarray(amplitudes)})


def _check_splitter(t: float, r: float) -> None:
    if not (0.0 <= t <= 1.0 and 0.0 <= r <= 1.0):
        raise InputError("splitter amplitudes must lie in [0, 1]", t=t, r=r)
    if abs(t**2 + r**2 - 1.0) > SPLITTER_TOLERANCE:
        raise InputError("splitter must be lossless, t^2 + r^2 = 1", t=t, r=r)


def coincidence_probability(
    state: ParityBiphoton,
    t: float = BALANCED,
    r: float = BALANCED,
    mirror_axis: Axis = Axis.Y,
) -> float:
    """Probability that the two photons leave the splitter by different ports."""
    _check_splitter(t, r)
    exchanged = exchange_and_mirror(state, mirror_axis).amplitudes
    amplitude = t**2 * state.amplitudes - r**2 * exchanged
    return float(np.sum(np.abs(amplitude) ** 2))


def hom_truth_table(
    mirror_axis: Axis = Axis.Y, t: float = BALANCED, r: float = BALANCED
) -> List[TruthTableRow]:
    """Coincidence probability for every axis, Bell state and polarization symmetry."""
    rows = []
    for axis in Axis:
        for kind in BellState:
            for polarization in PolarizationSymmetry:
                probability = coincidence_probability(
                    bell_biphoton(kind, axis, polarization), t, r, mirror_axis
                )
                rows.append(
                    TruthTableRow(
                        axis=axis,
                        bell_state=kind,
                        pol_symmetry=polarization,
                        coincidence_prob=probability,
                    )
                )
    return rows


def check_truth_table(rows: List[TruthTableRow], mirror_axis: Axis = Axis.Y) -> ValidationResult:
    """Verify the balanced-splitter coincidence pattern.

    On the mirror axis only (Psi+, sym) of the symmetric-polarization cells
    clicks and (Psi+, antisym) stays dark; on the other axis Psi+ clicks
    only for antisymmetric polarization. Each (axis, Bell state) pair has
    exactly one clicking polarization.
    """
    result = ValidationResult()
    cells = {(row.axis, row.bell_state, row.pol_symmetry): row.coincidence_prob for row in rows}
    other_axis = Axis.X if mirror_axis is Axis.Y else Axis.Y
    sym, anti = PolarizationSymmetry.SYMMETRIC, PolarizationSymmetry.ANTISYMMETRIC

    psi_plus = BellState.PSI_PLUS
    expected_positive = [(mirror_axis, psi_plus, sym), (other_axis, psi_plus, anti)]
    expected_zero = [(mirror_axis, psi_plus, anti), (other_axis, psi_plus, sym)]
    expected_zero += [
        (mirror_axis, kind, sym) for kind in BellState if kind is not psi_plus
    ]
    for cell in expected_positive:
        if cells[cell] <= COINCIDENCE_THRESHOLD:
            result.add_error(f"expected coincidences for {_cell_name(cell)}")
    for cell in expected_zero:
        if cells[cell] > COINCIDENCE_THRESHOLD:
            result.add_error(
                f"expected no coincidences for {_cell_name(cell)}: {cells[cell]:.3e}"
            )
    for axis in Axis:
        for kind in BellState:
            clicking = [
                p for p in PolarizationSymmetry if cells[(axis, kind, p)] > COINCIDENCE_THRESHOLD
            ]
            if len(clicking) != 1:
                result.add_error(
                    f"{axis.value}/{kind.value} clicks for {len(clicking)} polarizations"
                )
    return result


def _cell_name(cell: Tuple[Axis, BellState, PolarizationSymmetry]) -> str:
    axis, kind, polarization = cell
    return f"({axis.value}, {kind.value}, {polarization.value})"


def parity_biphoton_from_table(
    table: CoefficientTable,
    axis: Axis,
    polarization: PolarizationSymmetry = PolarizationSymmetry.SYMMETRIC,
) -> ParityBiphoton:
    """Coarse-grain a coefficient table onto the parities of one axis.

    Each parity class gets the square root of its share of the table's weight,
    all in phase. A Gaussian-profile HG_0^1 pump lands on Psi+ along y.
    """
    weights = np.zeros((2, 2))
    for (m_s, n_s, m_i, n_i), c in table.entries.items():
        first, second = (m_s, m_i) if axis is Axis.X else (n_s, n_i)
        weights[first % 2, second % 2] += abs(c) ** 2
    total = weights.sum()
    if total == 0.0:
        raise InputError("table carries no weight")
    amplitudes = np.sqrt(weights / total).astype(np.complex128)
    return ParityBiphoton(axis=axis, amplitudes=amplitudes, polarization_symmetry=polarization)


def _qubit(alpha: complex, beta: complex) -> NDArray[np.complex128]:
    qubit = np.array([alpha, beta], dtype=np.complex128)
    norm = float(np.sum(np.abs(qubit) ** 2))
    if abs(norm - 1.0) > QUBIT_NORM_TOLERANCE:
        raise InputError("qubit must satisfy |alpha|^2 + |beta|^2 = 1", norm=norm)
    return qubit / math.sqrt(norm)


def three_photon_state(alpha: complex, beta: complex) -> ThreePhotonParityState:
    """(alpha|0> + beta|1>)_1 times (|1,0> + |0,1>)_23 / sqrt(2)."""
    qubit = _qubit(alpha, beta)
    pair = bell_state(BellState.PSI_PLUS)
    return ThreePhotonParityState(amplitudes=np.einsum("a,bc->abc", qubit, pair))


def bell_decompose(alpha: complex, beta: complex) -> List[BellBranch]:
    """Expand the three-photon state over Bell states of particles 1 and 2.

    Returns:
        One branch per Bell state, in BellState order
    """
    state = three_photon_state(alpha, beta).amplitudes
    branches = []
    for kind in BellState:
        projected = np.einsum("ab,abc->c", bell_state(kind).conj(), state)
        weight = float(np.linalg.norm(projected))
        conditional = projected / weight
        branches.append(
            BellBranch(
                bell_state=kind,
                weight=weight,
                conditional_state=(complex(conditional[0]), complex(conditional[1])),
            )
        )
    return branches


def teleport(
    alpha: complex,
    beta: complex,
    polarization: PolarizationSymmetry = PolarizationSymmetry.SYMMETRIC,
    mirror_axis: Axis = Axis.Y,
    qubit_axis: Optional[Axis] = None,
) -> TeleportResult:
    """Teleport alpha|0> + beta|1> using a HOM coincidence as the Bell-state herald.

    The branch whose Bell state gives coincidences is selected; its particle-3
    state is corrected back to the input frame. With symmetric polarization
    and parity on the mirror axis the herald is Psi+ and no correction is needed.

    Raises:
        InputError: if the qubit is not normalized or the herald does not pick out one branch
        InvariantError: if the branch probabilities do not sum to one
    """
    target = _qubit(alpha, beta)
    axis = qubit_axis or mirror_axis
    branches = bell_decompose(alpha, beta)
    probabilities = {branch.bell_state: branch.probability for branch in branches}
    total = math.fsum(probabilities.values())
    if abs(total - 1.0) > 1e-12:
        raise InvariantError("Bell branch probabilities do not sum to one", total=total)

    heralded = [
        branch
        for branch in branches
        if coincidence_probability(
            bell_biphoton(branch.bell_state, axis, polarization), mirror_axis=mirror_axis
        )
        > COINCIDENCE_THRESHOLD
    ]
    if len(heralded) != 1:
        raise InputError(
            "coincidences do not single out one Bell branch",
            polarization=polarization.value,
            heralded=[branch.bell_state.value for branch in heralded],
        )
    selected = heralded[0]
    output = _CORRECTIONS[selected.bell_state] @ np.array(selected.conditional_state)
    fidelity = float(abs(np.vdot(target, output)) ** 2)
    logger.debug(
        "Teleportation heralded", branch=selected.bell_state.value, fidelity=fidelity
    )
    return TeleportResult(
        branch_probabilities=probabilities,
        selected_branch=selected.bell_state,
        output_qubit=(complex(output[0]), complex(output[1])),
        fidelity=min(fidelity, 1.0),
        success_probability=selected.probability,
    )
