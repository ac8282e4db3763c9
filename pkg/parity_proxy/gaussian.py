"""Single-mode Gaussian states: moment parameters, Wigner values and parity.

A single-mode Gaussian state is fixed by three numbers,

    alpha0 = <a>
    u      = -(<a^dag^2> - <a^dag>^2) / 2
    tau    = <a^dag a + 1/2> - <a^dag><a>

and its Wigner function is

    W(alpha) = exp(-[u d^2 + u* d*^2 + tau |d|^2] / D) / (pi sqrt(D))

with d = alpha - alpha0 and D = tau^2 - 4|u|^2 >= 1/4. Parity is pi/2 times the
Wigner function at the phase-space origin.
"""

import math
from typing import NamedTuple, Union

import numpy as np
import numpy.typing as npt
from scipy.integrate import trapezoid
from typing_extensions import Self

from parity_proxy.errors import UnphysicalMomentsError

# Propagated moments pass through many matrix products; accept the uncertainty
# bound up to this much rounding.
PHYSICALITY_TOL = 1e-9

VACUUM_TAU = 0.5
VACUUM_DETERMINANT = 0.25

ComplexLike = Union[complex, npt.NDArray[np.complex128]]


class GaussianMoments(NamedTuple):
    """Moment parameters (alpha0, u, tau) of a single-mode Gaussian state.

    Sign convention: ``<a^dag^2> - <a^dag>^2 = -2u``, so a state with a real,
    positive ``<a^2>`` has a real, negative ``u``.
    """

    alpha0: complex
    u: complex
    tau: float

    @property
    def determinant(self) -> float:
        """tau^2 - 4|u|^2; equals 1/4 exactly for pure states."""
        return self.tau**2 - 4.0 * abs(self.u) ** 2

    @property
    def mean_photon_number(self) -> float:
        return self.tau - 0.5 + abs(self.alpha0) ** 2

    @property
    def is_pure(self) -> bool:
        return abs(self.determinant - VACUUM_DETERMINANT) <= PHYSICALITY_TOL

    @classmethod
    def vacuum(cls) -> Self:
        return cls(0j, 0j, VACUUM_TAU)

    @classmethod
    def coherent(cls, beta: complex) -> Self:
        return cls(complex(beta), 0j, VACUUM_TAU)

    @classmethod
    def thermal(cls, n_mean: float) -> Self:
        """Zero-mean thermal state, e.g. one mode of a two-mode squeezed vacuum."""
        return cls(0j, 0j, n_mean + VACUUM_TAU)

    @classmethod
    def squeezed_vacuum(cls, r: float) -> Self:
        """Single-mode squeezed vacuum with <a^2> = cosh r sinh r."""
        return cls(0j, complex(-0.5 * math.cosh(r) * math.sinh(r)), math.sinh(r) ** 2 + 0.5)


def check_physical(m: GaussianMoments) -> GaussianMoments:
    """Raise UnphysicalMomentsError unless ``m`` obeys the uncertainty bounds."""
    if m.tau < VACUUM_TAU - PHYSICALITY_TOL:
        raise UnphysicalMomentsError(
            f"tau={m.tau!r} is below the vacuum noise floor 1/2"
        )
    if m.determinant < VACUUM_DETERMINANT - PHYSICALITY_TOL:
        raise UnphysicalMomentsError(
            f"tau^2 - 4|u|^2 = {m.determinant!r} < 1/4: moments are not those of a "
            "physical Gaussian state"
        )
    return m


def moments_from_raw(
    a_mean: complex, asq_mean: complex, n_mean: float
) -> GaussianMoments:
    """Build (alpha0, u, tau) from the raw expectations <a>, <a^2>, <a^dag a>.

    Examples:
        >>> moments_from_raw(2, 4, 4).tau
        0.5
    """
    a_mean = complex(a_mean)
    asq_mean = complex(asq_mean)
    u = -(asq_mean.conjugate() - a_mean.conjugate() ** 2) / 2
    tau = float(n_mean) + 0.5 - abs(a_mean) ** 2
    return check_physical(GaussianMoments(a_mean, u, tau))


def wigner_value(m: GaussianMoments, alpha: ComplexLike) -> Union[float, npt.NDArray[np.float64]]:
    """Evaluate W(alpha, alpha*) at a point or on an array of points."""
    det = m.determinant
    if det <= 0:
        raise UnphysicalMomentsError(
            f"degenerate Wigner denominator tau^2 - 4|u|^2 = {det!r}"
        )
    d = np.asarray(alpha, dtype=np.complex128) - m.alpha0
    exponent = (m.u * d**2 + np.conj(m.u) * np.conj(d) ** 2).real + m.tau * np.abs(d) ** 2
    value = np.exp(-exponent / det) / (np.pi * np.sqrt(det))
    if value.ndim == 0:
        return float(value)
    return value


def wigner_at_origin(m: GaussianMoments) -> float:
    """W(0, 0); reduces to 1/(pi sqrt(tau^2 - 4|u|^2)) for zero-mean states."""
    if m.alpha0 == 0:
        det = m.determinant
        if det <= 0:
            raise UnphysicalMomentsError(
                f"degenerate Wigner denominator tau^2 - 4|u|^2 = {det!r}"
            )
        return 1.0 / (math.pi * math.sqrt(det))
    return float(wigner_value(m, 0j))


def parity_expectation(m: GaussianMoments) -> float:
    """<(-1)^N> = (pi/2) W(0, 0)."""
    return 0.5 * math.pi * wigner_at_origin(m)


def _principal_widths(m: GaussianMoments) -> tuple[float, float]:
    # standard deviations of W along its narrowest and widest axes
    det = m.determinant
    if det <= 0:
        raise UnphysicalMomentsError(
            f"degenerate Wigner denominator tau^2 - 4|u|^2 = {det!r}"
        )
    lam_max = (m.tau + 2 * abs(m.u)) / det
    lam_min = (m.tau - 2 * abs(m.u)) / det
    return 1.0 / math.sqrt(2 * lam_max), 1.0 / math.sqrt(2 * lam_min)


def wigner_grid(
    m: GaussianMoments, extent: float, points: int
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Sample W on a square grid centred on alpha0.

    Returns:
        (xs, ys, values) where ``values[j, i]`` is W at ``xs[i] + 1j*ys[j]``.
    """
    xs = np.linspace(-extent, extent, points) + m.alpha0.real
    ys = np.linspace(-extent, extent, points) + m.alpha0.imag
    grid_x, grid_y = np.meshgrid(xs, ys)
    values = wigner_value(m, grid_x + 1j * grid_y)
    return xs, ys, np.asarray(values)


def wigner_normalization(m: GaussianMoments, max_points: int = 2001) -> float:
    """Integrate W over phase space with the trapezoid rule; 1 for physical states."""
    narrow, wide = _principal_widths(m)
    extent = 12.0 * wide
    points = min(max_points, int(math.ceil(2 * extent / (narrow / 3))) + 1)
    xs, ys, values = wigner_grid(m, extent, points)
    return float(trapezoid(trapezoid(values, xs, axis=1), ys))
