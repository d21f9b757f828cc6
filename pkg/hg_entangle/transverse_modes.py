"""Normalized Hermite-Gaussian and Laguerre-Gaussian transverse fields.

Lengths share one unit throughout; the tests use a unit waist. The LG mode
carries an e^{i l phi} phase and no extra global phase at the waist, which
pins the phase convention for the HG/LG overlaps.
"""

import math
from typing import Callable, Tuple

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray
from scipy import special

from hg_entangle.models.modes import BeamGeometry, BeamParameters, LGIndex, ModeIndex
from hg_entangle.models.quadrature import QuadratureSpec
from hg_entangle.special_math import gauss_hermite_rule, hermite_functions

logger = structlog.get_logger(__name__)

Field2D = Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.complex128]]

_NORM_2D = math.sqrt(2.0 / math.pi)


def beam_parameters(geom: BeamGeometry, z: float) -> BeamParameters:
    """Spot size w(z), curvature radius R(z) and Gouy phase psi(z).

    At the waist the wavefront is flat and R is reported as ``math.inf``.
    """
    z_r = geom.rayleigh_range
    spot = geom.waist * math.sqrt(1.0 + (z / z_r) ** 2)
    curvature = math.inf if z == 0 else z * (1.0 + (z_r / z) ** 2)
    return BeamParameters(spot_size=spot, curvature_radius=curvature, gouy_phase=math.atan(z / z_r))


def hg_profile_1d(index: int, waist: float, x: ArrayLike) -> NDArray[np.float64]:
    """One transverse factor of an HG mode, unit-normalized on the line."""
    x = np.asarray(x, dtype=np.float64)
    scaled = math.sqrt(2.0) * x / waist
    h = hermite_functions(index, scaled)[index]
    return (2.0 / math.pi) ** 0.25 / math.sqrt(waist) * h * np.exp(-(x**2) / waist**2)


def hg_field(
    mode: ModeIndex, geom: BeamGeometry, x: ArrayLike, y: ArrayLike, z: float
) -> NDArray[np.complex128]:
    """HG_m^n at (x, y, z) including curvature, plane-wave and Gouy phases.

    Args:
        mode: HG label
        geom: Waist and wavenumber
        x: Transverse x coordinate(s)
        y: Transverse y coordinate(s), broadcast against x
        z: Distance from the waist

    Returns:
        Complex amplitude in units of 1/length
    """
    params = beam_parameters(geom, z)
    w = params.spot_size
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    r2 = x**2 + y**2
    hx = hermite_functions(mode.m, math.sqrt(2.0) * x / w)[mode.m]
    hy = hermite_functions(mode.n, math.sqrt(2.0) * y / w)[mode.n]
    amplitude = _NORM_2D / w * hx * hy * np.exp(-r2 / w**2)
    phase = -geom.wavenumber * z + (mode.order() + 1) * params.gouy_phase
    if not params.is_flat:
        phase = phase - geom.wavenumber * r2 / (2.0 * params.curvature_radius)
    return (amplitude * np.exp(1j * phase))[()]


def hg_field_waist(
    mode: ModeIndex, waist: float, x: ArrayLike, y: ArrayLike
) -> NDArray[np.float64]:
    """Real HG_m^n profile at the beam waist."""
    return (hg_profile_1d(mode.m, waist, x) * hg_profile_1d(mode.n, waist, y))[()]


def lg_field_waist(
    index: LGIndex, waist: float, x: ArrayLike, y: ArrayLike
) -> NDArray[np.complex128]:
    """Normalized LG_p^l at the beam waist with an e^{i l phi} azimuthal phase."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    p, abs_l = index.p, abs(index.l)
    sign = 1.0 if index.l >= 0 else -1.0
    r2 = x**2 + y**2
    norm = _NORM_2D * math.sqrt(math.factorial(p) / math.factorial(p + abs_l)) / waist
    # (sqrt(2) r / w)^{|l|} e^{i l phi}, written without phi so the axis is regular
    vortex = (math.sqrt(2.0) * (x + 1j * sign * y) / waist) ** abs_l
    radial = special.eval_genlaguerre(p, abs_l, 2.0 * r2 / waist**2)
    return (norm * vortex * radial * np.exp(-r2 / waist**2))[()]


def plane_overlap(f: Field2D, g: Field2D, waist: float, spec: QuadratureSpec) -> complex:
    """Integral of conj(f) * g over the plane on a tensor Gauss-Hermite grid.

    Exact when conj(f) * g is a polynomial times e^{-2 r^2 / waist^2} of degree
    at most 2 * rule_order - 1 per axis.
    """
    rule = gauss_hermite_rule(spec)
    coords = waist * rule.nodes / math.sqrt(2.0)
    weights = rule.envelope_weights()
    xx, yy = np.meshgrid(coords, coords, indexing="ij")
    integrand = np.conj(f(xx, yy)) * g(xx, yy)
    value = (waist**2 / 2.0) * np.einsum("i,j,ij->", weights, weights, integrand)
    return complex(value)


def field_grid(
    field: Field2D, extent: float, points: int
) -> Tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.complex128]]:
    """Sample a field on a square grid spanning [-extent, extent] along both axes.

    Returns:
        Flattened x, y and complex field values, x varying slowest
    """
    axis = np.linspace(-extent, extent, points)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    values = np.asarray(field(xx, yy), dtype=np.complex128)
    logger.debug("Field grid sampled", points=points, extent=extent)
    return xx.ravel(), yy.ravel(), values.ravel()
