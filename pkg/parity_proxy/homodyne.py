"""Homodyne prescriptions that turn intensity measurements into parity.

Conventions follow ``parity_proxy.circuit``: the detected fields are
``c = (a_f + i b)/sqrt2`` and ``d = (b + i a_f)/sqrt2`` for signal a_f and local
oscillator b. The intensity-correlation functional is

    X(theta, |beta|) = 4 <d^dag d c^dag c>
                     = <a_f^dag^2 a_f^2> + |beta|^2 e^{2i theta} <a_f^dag^2>
                       + |beta|^2 e^{-2i theta} <a_f^2> + |beta|^4

and linear combinations of X at a few bias phases isolate <a_f^dag^2>.
"""

import cmath
import logging
import math
from collections.abc import Sequence
from typing import Literal, NamedTuple

from parity_proxy.circuit import (
    BeamSplitter,
    MultiModeMoments,
    ProxyGeometry,
    coherent_in_mode,
    compose,
    extend_vacuum,
    propagate,
    reduce_mode,
    signal_moments,
    vacuum_state,
)
from parity_proxy.errors import (
    DegenerateLocalOscillatorError,
    InconsistentInputsError,
    UndefinedSensitivityError,
    UnphysicalMomentsError,
)
from parity_proxy.gaussian import GaussianMoments, check_physical, parity_expectation

logger = logging.getLogger(__name__)

Prescription = Literal["three", "four"]
PRESCRIPTIONS: tuple[Prescription, ...] = ("three", "four")

SETTING_TOL = 1e-12
INTENSITY_TOL = 1e-9
SLOPE_TOL = 1e-15


class XMeasurement(NamedTuple):
    """One intensity-correlation measurement X(theta, |beta|)."""

    theta: float
    beta_mag: float
    value: float


class SensitivityEstimate(NamedTuple):
    phi: float
    signal: float
    delta_phi: float


class ProxyReading(NamedTuple):
    """Everything the post processor derives at one probe phase."""

    phi: float
    circuit_phi: float
    asq: complex
    intensity: float
    signal: float
    parity: float


class Ladder(NamedTuple):
    """One factor of an operator product: a_mode or a_mode^dag."""

    mode: int
    dagger: bool = False


def _mean(state: MultiModeMoments, op: Ladder) -> complex:
    m = complex(state.mean[op.mode])
    return m.conjugate() if op.dagger else m


def _contraction(state: MultiModeMoments, left: Ladder, right: Ladder) -> complex:
    # normally ordered central pair moment <:da da:>
    k, l = left.mode, right.mode
    if not left.dagger and not right.dagger:
        return complex(state.A[k, l])
    if left.dagger and right.dagger:
        return complex(state.A[k, l]).conjugate()
    if left.dagger:
        return complex(state.B[k, l])
    return complex(state.B[l, k])


def normal_ordered_moment(state: MultiModeMoments, ops: Sequence[Ladder]) -> complex:
    """Expectation of a normally ordered product on a Gaussian state.

    Isserlis expansion: every factor either contributes its mean or pairs with a
    later factor through a central second moment.
    """
    if not ops:
        return 1.0 + 0j
    first, rest = ops[0], ops[1:]
    total = _mean(state, first) * normal_ordered_moment(state, rest)
    for j, partner in enumerate(rest):
        remaining = [*rest[:j], *rest[j + 1 :]]
        total += _contraction(state, first, partner) * normal_ordered_moment(
            state, remaining
        )
    return total


def _single_mode(m: GaussianMoments) -> MultiModeMoments:
    state = vacuum_state(1)
    state.mean[0] = m.alpha0
    state.A[0, 0] = -2 * complex(m.u).conjugate()
    state.B[0, 0] = m.tau - 0.5
    return state


def gaussian_fourth_moment(m: GaussianMoments) -> float:
    """<a^dag^2 a^2>; 2<a^dag a>^2 + |<a^2>|^2 for zero-mean states."""
    adag, a = Ladder(0, dagger=True), Ladder(0)
    return normal_ordered_moment(_single_mode(m), [adag, adag, a, a]).real


def y_measurement(
    state: MultiModeMoments, theta: float, beta_mag: float, mode: int = 0
) -> float:
    """Intensity difference Y(theta) after mixing ``mode`` with a local oscillator.

    The oscillator enters an extra mode with amplitude ``|beta| e^{i theta}``; the
    result equals -i|beta|(<a^dag> e^{i theta} - <a> e^{-i theta}).
    """
    if beta_mag <= 0:
        raise DegenerateLocalOscillatorError(
            f"homodyne difference needs |beta| > 0, got {beta_mag!r}"
        )
    lo = state.num_modes
    mixed = coherent_in_mode(extend_vacuum(state), lo, beta_mag * cmath.exp(1j * theta))
    out = propagate(mixed, compose([BeamSplitter(mode, lo)], lo + 1))
    return out.intensity(lo) - out.intensity(mode)


def recover_first_moments(
    y0: float, y_half_pi: float, beta_mag: float
) -> tuple[complex, complex]:
    """(<a>, <a^dag>) from Y(0) and Y(pi/2)."""
    if beta_mag <= 0:
        raise DegenerateLocalOscillatorError(
            f"cannot divide by |beta| = {beta_mag!r}"
        )
    a_mean = (y_half_pi - 1j * y0) / (2 * beta_mag)
    adag_mean = (y_half_pi + 1j * y0) / (2 * beta_mag)
    return a_mean, adag_mean


def x_from_moments(
    fourth: float, adag_sq: complex, theta: float, beta_mag: float
) -> float:
    """X(theta, |beta|) from <a^dag^2 a^2> and <a^dag^2> by its definition."""
    beta_sq = beta_mag**2
    cross = beta_sq * cmath.exp(2j * theta) * adag_sq
    return fourth + 2 * cross.real + beta_sq**2


def x_closed_form(theta: float, beta_mag: float, phi: float, r: float) -> float:
    """Printed closed form of X for the squeezed-vacuum MZI lower port."""
    return (
        11
        + 16 * beta_mag**4
        + math.cos(2 * phi)
        - 16 * math.cosh(2 * r)
        + 16 * beta_mag**2 * math.cos(2 * theta - phi) * math.sin(phi) * math.sinh(2 * r)
        - (math.cos(2 * phi) - 5) * math.cosh(4 * r)
    ) / 16


def x_measurement(
    state: MultiModeMoments,
    theta: float,
    beta_mag: float,
    geometry: ProxyGeometry,
) -> XMeasurement:
    """Evaluate X = 4 <d^dag d c^dag c> on the detector outputs of ``geometry``.

    ``state`` is the interferometer input; the local oscillator of the measured
    port is set to the real amplitude ``beta_mag`` before propagation.
    """
    if beta_mag < 0:
        raise DegenerateLocalOscillatorError(f"|beta| must be >= 0, got {beta_mag!r}")
    layout = geometry.layout
    prepared = coherent_in_mode(state, layout.lo, beta_mag)
    out = propagate(prepared, geometry.transform(theta))
    c, d = layout.signal, layout.lo
    for mode in (c, d):
        check_physical(reduce_mode(out, mode))
    ops = [Ladder(c, True), Ladder(d, True), Ladder(c), Ladder(d)]
    value = 4 * normal_ordered_moment(out, ops).real
    return XMeasurement(theta, beta_mag, value)


def detector_intensities(
    state: MultiModeMoments,
    theta: float,
    beta_mag: float,
    geometry: ProxyGeometry,
) -> tuple[float, float]:
    """(<d^dag d>, <c^dag c>) at the two detectors of the measured port."""
    layout = geometry.layout
    prepared = coherent_in_mode(state, layout.lo, beta_mag)
    out = propagate(prepared, geometry.transform(theta))
    return out.intensity(layout.lo), out.intensity(layout.signal)


def intensity_from_detectors(d_int: float, c_int: float, beta_mag: float) -> float:
    """<a_f^dag a_f> = <d^dag d> + <c^dag c> - |beta|^2."""
    n_f = d_int + c_int - beta_mag**2
    if n_f < -INTENSITY_TOL:
        raise InconsistentInputsError(
            f"detector intensities {d_int!r} + {c_int!r} fall below the oscillator "
            f"intensity {beta_mag**2!r}"
        )
    return n_f


def three_measurement_settings(beta_mag: float) -> list[tuple[float, float]]:
    """(theta, |beta|) for X(0,|beta|), X(pi/4,|beta|) and the blocked X(0,0)."""
    return [(0.0, beta_mag), (math.pi / 4, beta_mag), (0.0, 0.0)]


def four_phase_settings(beta_mag: float) -> list[tuple[float, float]]:
    return [
        (0.0, beta_mag),
        (math.pi / 4, beta_mag),
        (math.pi / 2, beta_mag),
        (-math.pi / 4, beta_mag),
    ]


def prescription_settings(
    prescription: Prescription, beta_mag: float
) -> list[tuple[float, float]]:
    if prescription == "three":
        return three_measurement_settings(beta_mag)
    if prescription == "four":
        return four_phase_settings(beta_mag)
    raise ValueError(f"Unsupported prescription: {prescription}")


def _check_live(x: XMeasurement, theta: float, beta_mag: float) -> None:
    if abs(x.beta_mag - beta_mag) > SETTING_TOL * max(1.0, beta_mag):
        raise DegenerateLocalOscillatorError(
            f"measurement taken at |beta|={x.beta_mag!r}, expected {beta_mag!r}"
        )
    if abs(x.theta - theta) > SETTING_TOL:
        raise InconsistentInputsError(
            f"measurement taken at theta={x.theta!r}, expected {theta!r}"
        )


def recover_asq_three(
    x_0: XMeasurement,
    x_quarter: XMeasurement,
    x_blocked: XMeasurement,
    beta_mag: float,
) -> complex:
    """<a_f^dag^2> from X(0,|beta|), X(pi/4,|beta|) and X(0,0)."""
    if beta_mag <= 0:
        raise DegenerateLocalOscillatorError(
            f"the three-measurement prescription needs |beta| > 0, got {beta_mag!r}"
        )
    _check_live(x_0, 0.0, beta_mag)
    _check_live(x_quarter, math.pi / 4, beta_mag)
    if x_blocked.beta_mag != 0:
        raise InconsistentInputsError(
            f"blocked measurement taken with |beta|={x_blocked.beta_mag!r}"
        )
    beta_sq = beta_mag**2
    return (
        1j * x_0.value
        + x_quarter.value
        - (1 + 1j) * x_blocked.value
        - (1 + 1j) * beta_sq**2
    ) / (2j * beta_sq)


def recover_asq_four(
    x0: XMeasurement,
    x_q: XMeasurement,
    x_h: XMeasurement,
    x_mq: XMeasurement,
    beta_mag: float,
) -> complex:
    """<a_f^dag^2> from X at theta = 0, pi/4, pi/2, -pi/4 with a steady oscillator."""
    if beta_mag <= 0:
        raise DegenerateLocalOscillatorError(
            f"the four-phase prescription needs |beta| > 0, got {beta_mag!r}"
        )
    for x, theta in zip(
        (x0, x_q, x_h, x_mq), (0.0, math.pi / 4, math.pi / 2, -math.pi / 4)
    ):
        _check_live(x, theta, beta_mag)
    return (1j * x0.value + x_q.value - 1j * x_h.value - x_mq.value) / (
        4j * beta_mag**2
    )


def recover_asq(
    prescription: Prescription, xs: Sequence[XMeasurement], beta_mag: float
) -> complex:
    if prescription == "three":
        return recover_asq_three(*xs, beta_mag=beta_mag)
    if prescription == "four":
        return recover_asq_four(*xs, beta_mag=beta_mag)
    raise ValueError(f"Unsupported prescription: {prescription}")


def proxy_signal(n_f: float, asq: complex) -> float:
    """S = 1 / (2 sqrt((<n_f> + 1/2)^2 - |<a_f^dag^2>|^2))."""
    radicand = (n_f + 0.5) ** 2 - abs(asq) ** 2
    if radicand <= 0:
        raise UnphysicalMomentsError(
            f"signal radicand (n_f + 1/2)^2 - |asq|^2 = {radicand!r} is not positive"
        )
    return 0.5 / math.sqrt(radicand)


def mean_photon_number(r: float) -> float:
    """Total photons leaving the amplifier, 2 sinh^2 r."""
    return 2 * math.sinh(r) ** 2


def signal_closed_form(n_bar: float, phi: float) -> float:
    """S = 1/sqrt(1 + n(n+2) sin^2 phi)."""
    return 1 / math.sqrt(1 + n_bar * (n_bar + 2) * math.sin(phi) ** 2)


def signal_slope(n_bar: float, phi: float) -> float:
    """dS/dphi of the closed-form signal."""
    k = n_bar * (n_bar + 2)
    s = math.sin(phi)
    return -k * s * math.cos(phi) * (1 + k * s * s) ** -1.5


def minimum_detectable_phase(n_bar: float) -> float:
    """1/sqrt(n(n+2)), the phase uncertainty as phi -> 0."""
    return 1 / math.sqrt(n_bar * (n_bar + 2))


def phase_sensitivity(r: float, phi: float) -> SensitivityEstimate:
    """Error-propagated phase uncertainty with parity noise sqrt(1 - <Pi>^2)."""
    n_bar = mean_photon_number(r)
    slope = signal_slope(n_bar, phi)
    if abs(slope) < SLOPE_TOL:
        raise UndefinedSensitivityError(
            f"signal slope {slope!r} vanishes at phi={phi!r}, r={r!r}"
        )
    k_s2 = n_bar * (n_bar + 2) * math.sin(phi) ** 2
    # 1 - S^2 without cancellation
    noise = math.sqrt(k_s2 / (1 + k_s2))
    return SensitivityEstimate(phi, signal_closed_form(n_bar, phi), noise / abs(slope))


def proxy_reading(
    phi: float,
    r: float,
    *,
    beta_mag: float = 1.0,
    prescription: Prescription = "three",
    bias_shift: bool = True,
    dual: bool = False,
    port: Literal["lower", "upper"] = "lower",
) -> ProxyReading:
    """Run the exact-moment measurement schedule at probe phase ``phi``.

    With ``bias_shift`` the interferometer runs at ``phi + pi/2`` so the signal
    takes the form 1/sqrt(1 + n(n+2) sin^2 phi).
    """
    circuit_phi = phi + math.pi / 2 if bias_shift else phi
    geometry = ProxyGeometry(circuit_phi, r, dual, port)
    state = vacuum_state(geometry.num_modes)
    xs = [
        x_measurement(state, theta, beta, geometry)
        for theta, beta in prescription_settings(prescription, beta_mag)
    ]
    asq = recover_asq(prescription, xs, beta_mag)
    intensity = intensity_from_detectors(
        *detector_intensities(state, 0.0, beta_mag, geometry), beta_mag
    )
    return ProxyReading(
        phi,
        circuit_phi,
        asq,
        intensity,
        proxy_signal(intensity, asq),
        parity_expectation(signal_moments(geometry)),
    )
