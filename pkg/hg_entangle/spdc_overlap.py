"""Thin-crystal SPDC coefficients in the Hermite-Gaussian basis.

Signal and idler waists are the unit length and the pump waist is 1/sqrt(a),
so every quantity depends on the waist ratio a alone. The biphoton amplitude
separates in x and y, and each axis reduces to a one-dimensional
Gauss-Hermite integral over normalized Hermite functions.

The factorized per-axis amplitude is

    P(m, n) = integral of H_m(u) H_n(u) exp(-(1 + a) u^2) du / sqrt(2^(m+n) m! n!)

which ``analytic_P`` evaluates from the finite double sum and
``quadrature_P`` from the quadrature rule.
"""

import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import structlog
from numpy.typing import NDArray

from hg_entangle.exceptions import ConvergenceError, InputError, InvariantError
from hg_entangle.models.modes import ModeIndex, WaistRatio, WaistRatioLike
from hg_entangle.models.quadrature import QuadratureSpec
from hg_entangle.models.spdc import (
    CoefficientTable,
    ConservationLaw,
    ConservationReport,
    EntryKey,
    GaussianPumpCheck,
)
from hg_entangle.special_math import (
    SQRT_PI,
    GaussHermiteRule,
    gauss_hermite_rule,
    half_integer_factorial_exact,
    hermite_coefficient,
    hermite_functions,
    require_converged,
    require_exact_degree,
)

logger = structlog.get_logger(__name__)

DEFAULT_MAX_TABLE_ORDER = 12
DEFAULT_TAIL_TERMS = 80
DEFAULT_TAIL_TOLERANCE = 1e-12

# Waist ratios are read as the nearest rational with at most this denominator.
MAX_RATIO_DENOMINATOR = 10**15

# (2/pi)^(3/4): three unit-normalized 1D profiles multiplied together
_PROFILE_NORM_CUBED = (2.0 / math.pi) ** 0.75


def _axis_tensor(
    pump_index: int, max_index: int, a: float, spec: QuadratureSpec
) -> NDArray[np.float64]:
    """1D overlaps of the pump profile with all signal/idler index pairs up to ``max_index``.

    Element [s, i] is the integral of u_p(sqrt(2) x; w_p) u_s(x; 1) u_i(x; 1) dx.
    """
    rule = gauss_hermite_rule(spec)
    b = 1.0 + a
    # x = t / sqrt(2 b) maps exp(-2 b x^2) onto the rule weight
    pump = hermite_functions(pump_index, rule.nodes * math.sqrt(2.0 * a / b))[pump_index]
    photons = hermite_functions(max_index, rule.nodes / math.sqrt(b))
    scale = _PROFILE_NORM_CUBED * a**0.25 / math.sqrt(2.0 * b)
    return scale * np.einsum("k,k,sk,ik->si", rule.weights, pump, photons, photons)


def thin_crystal_coefficient(
    pump: ModeIndex,
    signal: ModeIndex,
    idler: ModeIndex,
    a: WaistRatioLike,
    spec: Optional[QuadratureSpec] = None,
) -> complex:
    """Overlap of HG_pump(sqrt(2) rho; w_p) with conj(HG_signal) conj(HG_idler) at unit waist.

    The value is the bare integral; the pump-independent constant in front of
    the biphoton amplitude is not applied.

    Raises:
        QuadratureError: if the rule cannot integrate the requested indices exactly
    """
    spec = spec or QuadratureSpec()
    ratio = WaistRatio.coerce(a).value
    indices = (pump.as_tuple(), signal.as_tuple(), idler.as_tuple())
    for degree in (pump.m + signal.m + idler.m, pump.n + signal.n + idler.n):
        require_exact_degree(spec, degree, indices=indices)
    x_axis = _axis_tensor(pump.m, max(signal.m, idler.m), ratio, spec)[signal.m, idler.m]
    y_axis = _axis_tensor(pump.n, max(signal.n, idler.n), ratio, spec)[signal.n, idler.n]
    return complex(x_axis * y_axis)


def rational_waist_ratio(a: float) -> Fraction:
    """Nearest rational to ``a`` with denominator at most MAX_RATIO_DENOMINATOR.

    Grid values such as 0.1 + 0.2 map back to 3/10, which keeps the exact
    sums in ``analytic_P`` on small integers. The absolute change in ``a`` is
    below 1e-15.
    """
    return Fraction(a).limit_denominator(MAX_RATIO_DENOMINATOR)


@lru_cache(maxsize=8192)
def _analytic_p(m: int, n: int, a: float) -> float:
    if (m + n) % 2:
        return 0.0
    b = rational_waist_ratio(a) + 1
    p, q = b.numerator, b.denominator
    top = (m + n) // 2
    # Sum over j, k of coefficient * 2^M * Gamma((M+1)/2) * b^(-(M+1)/2), M = m + n - 2j - 2k,
    # grouped by h = M/2 and scaled by p^top * sqrt(b) / sqrt(pi).
    total = Fraction(0)
    for j in range(m // 2 + 1):
        for k in range(n // 2 + 1):
            h = top - j - k
            gamma, _ = half_integer_factorial_exact(Fraction(2 * h - 1, 2))
            coef = hermite_coefficient(m, j) * hermite_coefficient(n, k) * 4**h
            total += coef * gamma * q**h * p ** (top - h)
    if total == 0:
        return 0.0
    norm = 2 ** (m + n) * math.factorial(m) * math.factorial(n)
    squared = Fraction(q) * total**2 / (p ** (2 * top + 1) * norm)
    magnitude = SQRT_PI * math.sqrt(float(squared))
    return magnitude if total > 0 else -magnitude


def analytic_P(m: int, n: int, a: WaistRatioLike) -> float:  # noqa: N802
    """Closed-form per-axis amplitude P(m, n), exactly zero when m + n is odd.

    The alternating double sum is accumulated in exact rational arithmetic and
    rounded once, so long index ranges do not lose digits to cancellation.
    """
    if m < 0 or n < 0:
        raise InputError("mode indices must be nonnegative", m=m, n=n)
    return _analytic_p(m, n, WaistRatio.coerce(a).value)


def quadrature_P(  # noqa: N802
    m: int, n: int, a: WaistRatioLike, spec: Optional[QuadratureSpec] = None
) -> float:
    """Gauss-Hermite evaluation of P(m, n)."""
    if m < 0 or n < 0:
        raise InputError("mode indices must be nonnegative", m=m, n=n)
    spec = spec or QuadratureSpec()
    require_exact_degree(spec, m + n, indices=(m, n))
    scale = math.sqrt(1.0 + WaistRatio.coerce(a).value)

    def integrate(rule: GaussHermiteRule) -> float:
        h = hermite_functions(max(m, n), rule.nodes / scale)
        return rule.integrate(h[m] * h[n]) / scale

    return require_converged(spec, integrate, indices=(m, n))


def mode_match_probability(
    m: int,
    a: WaistRatioLike,
    n_max: int = DEFAULT_TAIL_TERMS,
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
) -> float:
    """Q_m = P(m, m)^2 / sum over n <= n_max of P(m, n)^2.

    Raises:
        InputError: if n_max < m
        ConvergenceError: if the last included nonzero term is not below
            ``tail_tolerance`` of the running sum
        InvariantError: if the ratio leaves [0, 1 + 1e-12]
    """
    ratio = WaistRatio.coerce(a).value
    if m < 0:
        raise InputError("mode index must be nonnegative", m=m)
    if n_max < m:
        raise InputError("n_max must be at least m", m=m, n_max=n_max)
    terms = [analytic_P(m, n, ratio) ** 2 for n in range(n_max + 1)]
    total = math.fsum(terms)
    last = n_max if (n_max + m) % 2 == 0 else n_max - 1
    tail = terms[last] / total
    if tail >= tail_tolerance:
        raise ConvergenceError(
            "Q_m tail not converged", m=m, a=ratio, n_max=n_max, tail_ratio=tail
        )
    q = terms[m] / total
    if not 0.0 <= q <= 1.0 + 1e-12:
        raise InvariantError("Q_m outside [0, 1]", m=m, a=ratio, value=q)
    return q


def mode_match_probabilities(
    m_values: Sequence[int],
    a_values: Iterable[float],
    n_max: int = DEFAULT_TAIL_TERMS,
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
) -> NDArray[np.float64]:
    """Grid of Q_m values, one row per a and one column per m."""
    if not m_values:
        raise InputError("at least one m is required")
    rows = [
        [mode_match_probability(m, a, n_max, tail_tolerance) for m in m_values] for a in a_values
    ]
    return np.array(rows, dtype=np.float64).reshape(-1, len(m_values))


def coefficient_table(
    pump: ModeIndex,
    a: WaistRatioLike,
    max_order: int,
    spec: Optional[QuadratureSpec] = None,
    normalize: bool = False,
    max_table_order: int = DEFAULT_MAX_TABLE_ORDER,
) -> CoefficientTable:
    """Fill every (signal, idler) pair with orders <= max_order for one pump mode.

    Raises:
        InputError: if max_order is negative or above ``max_table_order``
        QuadratureError: if the rule cannot integrate the highest-degree entry exactly
    """
    if not 0 <= max_order <= max_table_order:
        raise InputError(
            "max_order outside supported range", max_order=max_order, cap=max_table_order
        )
    spec = spec or QuadratureSpec()
    ratio = WaistRatio.coerce(a)
    for degree in (pump.m + 2 * max_order, pump.n + 2 * max_order):
        require_exact_degree(
            spec, degree, indices=(pump.as_tuple(), (max_order, 0), (max_order, 0))
        )
    x_axis = _axis_tensor(pump.m, max_order, ratio.value, spec)
    y_axis = _axis_tensor(pump.n, max_order, ratio.value, spec)

    entries: Dict[EntryKey, complex] = {}
    for m_s in range(max_order + 1):
        for n_s in range(max_order + 1 - m_s):
            for m_i in range(max_order + 1):
                for n_i in range(max_order + 1 - m_i):
                    entries[(m_s, n_s, m_i, n_i)] = complex(x_axis[m_s, m_i] * y_axis[n_s, n_i])

    table = CoefficientTable(pump=pump, waist_ratio=ratio, max_order=max_order, entries=entries)
    logger.debug(
        "Coefficient table filled",
        pump=pump.as_tuple(),
        a=ratio.value,
        max_order=max_order,
        entries=len(entries),
    )
    return table.normalized_copy() if normalize else table


def _satisfies(law: ConservationLaw, pump: ModeIndex, key: EntryKey) -> bool:
    m_s, n_s, m_i, n_i = key
    if law is ConservationLaw.PARITY:
        return (m_s + m_i - pump.m) % 2 == 0 and (n_s + n_i - pump.n) % 2 == 0
    return abs(m_s - m_i) == pump.m and abs(n_s - n_i) == pump.n


def conservation_report(table: CoefficientTable, law: ConservationLaw) -> ConservationReport:
    """Split the table's squared amplitude between entries obeying and violating ``law``."""
    satisfied: List[float] = []
    violating: List[float] = []
    worst = 0.0
    for key, c in table.entries.items():
        weight = abs(c) ** 2
        if _satisfies(law, table.pump, key):
            satisfied.append(weight)
        else:
            violating.append(weight)
            worst = max(worst, abs(c))
    satisfied_sum = math.fsum(satisfied)
    total = satisfied_sum + math.fsum(violating)
    report = ConservationReport(
        law=law,
        satisfied_weight=satisfied_sum / total if total > 0 else 1.0,
        worst_violation=worst,
        satisfied_count=len(satisfied),
        violating_count=len(violating),
    )
    logger.debug(
        "Conservation report computed",
        law=law.value,
        satisfied_weight=report.satisfied_weight,
        worst_violation=report.worst_violation,
    )
    return report


def gaussian_pump_check(table: CoefficientTable) -> GaussianPumpCheck:
    """Compare a Gaussian-pump table with C proportional to P(m_s, m_i) P(n_s, n_i).

    Deviations are measured relative to the (0,0;0,0) reference entry.
    """
    if table.pump.as_tuple() != (0, 0):
        raise InputError(
            "factorized form only holds for a Gaussian pump", pump=table.pump.as_tuple()
        )
    a = table.waist_ratio.value
    reference = table.entries[(0, 0, 0, 0)]
    constant = reference / analytic_P(0, 0, a) ** 2
    worst = 0.0
    worst_key: EntryKey = (0, 0, 0, 0)
    for key, c in table.entries.items():
        m_s, n_s, m_i, n_i = key
        expected = constant * analytic_P(m_s, m_i, a) * analytic_P(n_s, n_i, a)
        deviation = abs(c - expected) / abs(reference)
        if deviation > worst:
            worst, worst_key = deviation, key
    return GaussianPumpCheck(
        max_ratio_deviation=worst, entries_checked=len(table), worst_entry=list(worst_key)
    )
