"""HG-entangled biphoton states and the HG/LG change of basis.

Within one mode order N the overlap of HG_m^n with LG_p^l is

    <HG_m^n | LG_p^l> = (-1)^p i^n b((N - l)/2, (N + l)/2, n),    2p + |l| = N = m + n

and zero across orders, where b(n', m', k) is sqrt((N-k)! k! / (2^N n'! m'!))
times the t^k coefficient of (1 - t)^n' (1 + t)^m'. Index roles and the
(-1)^p factor match the LG convention used by ``lg_field_waist``; the
plane-overlap quadrature reproduces every block.
"""

import math
from functools import lru_cache
from typing import Dict, List, Mapping, Tuple

import numpy as np
import structlog
from numpy.typing import NDArray
from scipy.linalg import block_diag

from hg_entangle.exceptions import InputError, InvariantError, TruncationError, UnitarityError
from hg_entangle.models.modes import LGIndex, ModeIndex, WaistRatio, WaistRatioLike
from hg_entangle.models.states import (
    Basis,
    ConversionBlock,
    Label,
    PairLabel,
    TwoPhotonState,
    labels_of_order,
    labels_up_to,
)
from hg_entangle.spdc_overlap import analytic_P

logger = structlog.get_logger(__name__)

DEFAULT_MAX_BLOCK_ORDER = 16
UNITARITY_TOLERANCE = 1e-10
NORM_TOLERANCE = 1e-10


def build_hg_entangled_state(a: WaistRatioLike, max_order: int) -> TwoPhotonState:
    """Diagonal Gaussian-pump state, C_m^n proportional to P(m, m) P(n, n), m + n <= max_order."""
    ratio = WaistRatio.coerce(a).value
    if max_order < 0:
        raise InputError("max_order must be nonnegative", max_order=max_order)
    amplitudes: Dict[PairLabel, complex] = {}
    for m in range(max_order + 1):
        for n in range(max_order + 1 - m):
            amplitude = analytic_P(m, m, ratio) * analytic_P(n, n, ratio)
            amplitudes[((m, n), (m, n))] = complex(amplitude)
    state = TwoPhotonState(basis=Basis.HG, truncation_order=max_order, amplitudes=amplitudes)
    return state.normalized()


def b_coefficient(n_prime: int, m_prime: int, m: int) -> float:
    """sqrt((n'+m'-m)! m! / (2^(n'+m') n'! m'!)) times the t^m coefficient of (1-t)^n' (1+t)^m'."""
    if n_prime < 0 or m_prime < 0:
        raise InputError("b arguments must be nonnegative", n_prime=n_prime, m_prime=m_prime)
    order = n_prime + m_prime
    if not 0 <= m <= order:
        raise InputError("derivative order out of range", n_prime=n_prime, m_prime=m_prime, m=m)
    coefficient = sum(
        (-1) ** j * math.comb(n_prime, j) * math.comb(m_prime, m - j)
        for j in range(max(0, m - m_prime), min(n_prime, m) + 1)
    )
    if coefficient == 0:
        return 0.0
    prefactor = math.factorial(order - m) * math.factorial(m) / (
        2**order * math.factorial(n_prime) * math.factorial(m_prime)
    )
    return coefficient * math.sqrt(prefactor)


def hg_lg_overlap(hg: ModeIndex, lg: LGIndex) -> complex:
    """<HG_m^n | LG_p^l>; exactly zero unless 2p + |l| = m + n."""
    order = hg.order()
    if lg.order() != order:
        return 0j
    value = b_coefficient((order - lg.l) // 2, (order + lg.l) // 2, hg.n)
    return (-1) ** lg.p * 1j**hg.n * value


@lru_cache(maxsize=64)
def _block(order: int) -> ConversionBlock:
    hg_labels = labels_of_order(Basis.HG, order)
    lg_labels = labels_of_order(Basis.LG, order)
    matrix = np.array(
        [
            [hg_lg_overlap(ModeIndex.of(*hg), LGIndex.of(*lg)) for lg in lg_labels]
            for hg in hg_labels
        ],
        dtype=np.complex128,
    )
    matrix.setflags(write=False)
    block = ConversionBlock(order=order, matrix=matrix, hg_labels=hg_labels, lg_labels=lg_labels)
    error = block.unitarity_error()
    if error > UNITARITY_TOLERANCE:
        raise UnitarityError("HG/LG conversion block is not unitary", order=order, error=error)
    logger.debug("Conversion block built", order=order, unitarity_error=error)
    return block


def conversion_block(order: int, max_block_order: int = DEFAULT_MAX_BLOCK_ORDER) -> ConversionBlock:
    """Unitary (N+1)x(N+1) matrix of HG/LG overlaps for mode order N.

    Raises:
        TruncationError: if ``order`` exceeds ``max_block_order``
        UnitarityError: if the assembled block is not unitary within 1e-10
    """
    if order < 0:
        raise InputError("order must be nonnegative", order=order)
    if order > max_block_order:
        raise TruncationError(
            "mode order beyond available conversion blocks", order=order, cap=max_block_order
        )
    return _block(order)


def conversion_matrix(
    max_order: int, max_block_order: int = DEFAULT_MAX_BLOCK_ORDER
) -> Tuple[NDArray[np.complex128], List[Label], List[Label]]:
    """Block-diagonal HG/LG overlap matrix over all orders up to ``max_order``."""
    blocks = [conversion_block(order, max_block_order) for order in range(max_order + 1)]
    matrix = block_diag(*(block.matrix for block in blocks))
    return matrix, labels_up_to(Basis.HG, max_order), labels_up_to(Basis.LG, max_order)


def lg_spdc_state(coefficients: Mapping[int, complex], l_max: int) -> TwoPhotonState:
    """Normalized sum over l of C_l |LG_0^l, LG_0^-l> for a Gaussian pump."""
    if l_max < 0:
        raise InputError("l_max must be nonnegative", l_max=l_max)
    amplitudes: Dict[PairLabel, complex] = {}
    for l, c in coefficients.items():  # noqa: E741
        if abs(l) > l_max:
            raise InputError("coefficient outside |l| <= l_max", l=l, l_max=l_max)
        if c != 0:
            amplitudes[((0, l), (0, -l))] = complex(c)
    if not amplitudes:
        raise InputError("at least one nonzero coefficient is required")
    state = TwoPhotonState(basis=Basis.LG, truncation_order=l_max, amplitudes=amplitudes)
    return state.normalized()


def flat_lg_coefficients(l_max: int) -> Dict[int, complex]:
    """Equal C_l for every |l| <= l_max."""
    return {l: 1.0 + 0j for l in range(-l_max, l_max + 1)}  # noqa: E741


def convert_state(
    state: TwoPhotonState, target_basis: Basis, max_block_order: int = DEFAULT_MAX_BLOCK_ORDER
) -> TwoPhotonState:
    """Apply the per-photon change of basis order by order.

    With U the block-diagonal overlap matrix, LG amplitudes C become HG
    amplitudes U C U^T, and HG amplitudes A become LG amplitudes U^H A conj(U).

    Raises:
        InputError: if the state is not normalized
        TruncationError: if the state's order exceeds the available blocks
        InvariantError: if the norm changes by more than 1e-10
    """
    norm = state.norm()
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise InputError("state must be normalized before conversion", norm=norm)
    if state.basis is target_basis:
        return state
    order = state.truncation_order
    if order > max_block_order:
        raise TruncationError(
            "state order beyond available conversion blocks", order=order, cap=max_block_order
        )
    unitary, hg_labels, lg_labels = conversion_matrix(order, max_block_order)
    if state.basis is Basis.LG:
        source, _ = state.amplitude_matrix(lg_labels)
        converted = unitary @ source @ unitary.T
        labels = hg_labels
    else:
        source, _ = state.amplitude_matrix(hg_labels)
        converted = unitary.conj().T @ source @ unitary.conj()
        labels = lg_labels

    amplitudes: Dict[PairLabel, complex] = {
        (signal, idler): complex(converted[row, col])
        for row, signal in enumerate(labels)
        for col, idler in enumerate(labels)
    }
    result = TwoPhotonState(
        basis=target_basis, truncation_order=order, amplitudes=amplitudes
    ).pruned()
    drift = abs(result.norm() - norm)
    if drift > NORM_TOLERANCE:
        raise InvariantError("conversion changed the state norm", drift=drift)
    logger.debug(
        "State converted",
        source=state.basis.value,
        target=target_basis.value,
        order=order,
        terms=len(amplitudes),
    )
    return result


def quasi_conservation_filter(state: TwoPhotonState, normalize: bool = True) -> TwoPhotonState:
    """Keep only entries whose signal and idler HG labels coincide."""
    if state.basis is not Basis.HG:
        raise InputError("the diagonal filter acts on HG-basis states", basis=state.basis.value)
    kept = {
        (signal, idler): c for (signal, idler), c in state.amplitudes.items() if signal == idler
    }
    filtered = state.model_copy(update={"amplitudes": kept})
    if not normalize:
        return filtered
    if filtered.norm() == 0.0:
        raise InputError("no diagonal amplitude survives the filter")
    return filtered.normalized()


def schmidt_coefficients(state: TwoPhotonState) -> NDArray[np.float64]:
    """Singular values of the amplitude matrix, largest first."""
    signals = sorted({signal for signal, _ in state.amplitudes})
    idlers = sorted({idler for _, idler in state.amplitudes})
    row = {label: k for k, label in enumerate(signals)}
    col = {label: k for k, label in enumerate(idlers)}
    matrix = np.zeros((len(signals), len(idlers)), dtype=np.complex128)
    for (signal, idler), c in state.amplitudes.items():
        matrix[row[signal], col[idler]] = c
    if matrix.size == 0:
        return np.zeros(0)
    return np.linalg.svd(matrix, compute_uv=False)


def schmidt_entropy(state: TwoPhotonState) -> float:
    """Entanglement entropy in bits, -sum of s^2 log2 s^2 over Schmidt coefficients s."""
    weights = schmidt_coefficients(state) ** 2
    total = weights.sum()
    if total == 0.0:
        raise InputError("entropy of a zero state is undefined")
    weights = weights[weights > 1e-300] / total
    # + 0.0 turns -0.0 into 0.0 for product states
    return float(-np.sum(weights * np.log2(weights))) + 0.0
