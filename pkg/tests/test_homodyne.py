import cmath
import math

import numpy as np
import pytest

from parity_proxy.circuit import (
    MultiModeMoments,
    ProxyGeometry,
    build_mzi_circuit,
    coherent_in_mode,
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
from parity_proxy.gaussian import GaussianMoments, parity_expectation
from parity_proxy.homodyne import (
    Ladder,
    XMeasurement,
    detector_intensities,
    gaussian_fourth_moment,
    intensity_from_detectors,
    mean_photon_number,
    minimum_detectable_phase,
    normal_ordered_moment,
    phase_sensitivity,
    prescription_settings,
    proxy_reading,
    proxy_signal,
    recover_asq_four,
    recover_asq_three,
    recover_first_moments,
    signal_closed_form,
    signal_slope,
    x_closed_form,
    x_from_moments,
    x_measurement,
    y_measurement,
)
from tests.conftest import GAINS, PHASES

SIGNAL_GRID = tuple(np.linspace(0.0, 2 * math.pi, 200, endpoint=False))


def _coherent(alpha: complex) -> MultiModeMoments:
    return coherent_in_mode(vacuum_state(1), 0, alpha)


def _synthetic(q: float, p: complex, thetas: list[tuple[float, float]]) -> list[XMeasurement]:
    return [XMeasurement(t, b, x_from_moments(q, p, t, b)) for t, b in thetas]


def test_y_measurement_vacuum() -> None:
    for theta in (0.0, 0.7, math.pi / 2):
        assert y_measurement(vacuum_state(1), theta, 1.5) == pytest.approx(0.0, abs=1e-14)


def test_y_measurement_coherent() -> None:
    assert y_measurement(_coherent(1.0), math.pi / 2, 2.0) == pytest.approx(4.0)
    assert y_measurement(_coherent(1j), 0.0, 1.0) == pytest.approx(-2.0)


def test_y_measurement_needs_live_oscillator() -> None:
    with pytest.raises(DegenerateLocalOscillatorError):
        y_measurement(_coherent(1.0), 0.0, 0.0)


@pytest.mark.parametrize("alpha", [0j, 1.0 + 0j, 0.3 + 0.4j, -1.2 + 0.1j])
def test_first_moment_round_trip(alpha: complex) -> None:
    beta = 1.7
    state = _coherent(alpha)
    a_mean, adag_mean = recover_first_moments(
        y_measurement(state, 0.0, beta), y_measurement(state, math.pi / 2, beta), beta
    )
    assert a_mean == pytest.approx(alpha, abs=1e-12)
    assert adag_mean == pytest.approx(alpha.conjugate(), abs=1e-12)


def test_recover_first_moments_rejects_zero_beta() -> None:
    with pytest.raises(DegenerateLocalOscillatorError):
        recover_first_moments(0.0, 0.0, 0.0)


def test_gaussian_fourth_moment_examples() -> None:
    assert gaussian_fourth_moment(GaussianMoments.vacuum()) == pytest.approx(0.0)
    assert gaussian_fourth_moment(GaussianMoments.coherent(1.5 - 0.5j)) == pytest.approx(
        abs(1.5 - 0.5j) ** 4
    )
    n = math.sinh(0.5) ** 2
    assert gaussian_fourth_moment(GaussianMoments.thermal(n)) == pytest.approx(
        0.14747, abs=1e-5
    )


def test_gaussian_fourth_moment_squeezed_vacuum() -> None:
    r = 0.6
    n = math.sinh(r) ** 2
    asq = math.cosh(r) * math.sinh(r)
    expected = 2 * n**2 + asq**2
    assert gaussian_fourth_moment(GaussianMoments.squeezed_vacuum(r)) == pytest.approx(expected)


def test_normal_ordered_moment_two_modes() -> None:
    # |alpha>|beta>: <a^dag b^dag a b> = |alpha|^2 |beta|^2
    state = coherent_in_mode(coherent_in_mode(vacuum_state(2), 0, 0.5j), 1, 2.0)
    ops = [Ladder(0, True), Ladder(1, True), Ladder(0), Ladder(1)]
    assert normal_ordered_moment(state, ops) == pytest.approx(0.25 * 4.0)


def test_x_measurement_blocked_vacuum() -> None:
    geometry = ProxyGeometry(0.4, 0.0)
    x = x_measurement(vacuum_state(3), 0.0, 0.0, geometry)
    assert (x.theta, x.beta_mag) == (0.0, 0.0)
    assert x.value == pytest.approx(0.0, abs=1e-15)


def test_x_measurement_matches_closed_form_example() -> None:
    r, phi, theta, beta = 0.5, math.pi / 2, 0.0, 2.0
    geometry = ProxyGeometry(phi, r)
    x = x_measurement(vacuum_state(3), theta, beta, geometry)
    assert x.value == pytest.approx(x_closed_form(theta, beta, phi, r), abs=1e-10)


@pytest.mark.parametrize("r", [0.0, 0.3, 0.8])
@pytest.mark.parametrize("phi", [0.0, 0.9, 2.5, 4.0])
def test_x_measurement_matches_closed_form_grid(r: float, phi: float) -> None:
    geometry = ProxyGeometry(phi, r)
    state = vacuum_state(3)
    for theta in (0.0, math.pi / 4, math.pi / 2, -math.pi / 4, 1.1):
        for beta in (0.0, 0.5, 2.0):
            x = x_measurement(state, theta, beta, geometry).value
            expected = x_closed_form(theta, beta, phi, r)
            assert x == pytest.approx(expected, rel=1e-10, abs=1e-10)
            assert x >= -1e-12


def test_x_measurement_rejects_sub_vacuum_input() -> None:
    noise = -0.4 * np.eye(3, dtype=np.complex128)
    state = MultiModeMoments(
        np.zeros(3, dtype=np.complex128), np.zeros((3, 3), dtype=np.complex128), noise
    )
    with pytest.raises(UnphysicalMomentsError):
        x_measurement(state, 0.0, 1.0, ProxyGeometry(0.5, 0.3))


def test_x_measurement_agrees_with_definition() -> None:
    r, phi = 0.7, 1.3
    geometry = ProxyGeometry(phi, r)
    m = signal_moments(geometry)
    q = gaussian_fourth_moment(m)
    p = complex(-2 * m.u + m.alpha0.conjugate() ** 2)
    for theta in (0.2, -0.9):
        x = x_measurement(vacuum_state(3), theta, 1.3, geometry).value
        assert x == pytest.approx(x_from_moments(q, p, theta, 1.3), rel=1e-10)


@pytest.mark.parametrize("p", [0j, 0.3 - 0.2j, -1.1 + 0.4j])
@pytest.mark.parametrize("beta", [0.5, 1.0, 3.0])
def test_synthetic_round_trip(p: complex, beta: float) -> None:
    q = 2.5
    three = _synthetic(q, p, prescription_settings("three", beta))
    four = _synthetic(q, p, prescription_settings("four", beta))
    assert recover_asq_three(*three, beta_mag=beta) == pytest.approx(p, abs=1e-12)
    assert recover_asq_four(*four, beta_mag=beta) == pytest.approx(p, abs=1e-12)


def test_recover_three_input_checks() -> None:
    x0, xq, xb = _synthetic(1.0, 0.2j, prescription_settings("three", 1.0))
    with pytest.raises(DegenerateLocalOscillatorError):
        recover_asq_three(x0, xq, xb, 0.0)
    with pytest.raises(DegenerateLocalOscillatorError):
        recover_asq_three(x0, xq._replace(beta_mag=1.1), xb, 1.0)
    with pytest.raises(InconsistentInputsError):
        recover_asq_three(x0, xq, xb._replace(beta_mag=1.0), 1.0)
    with pytest.raises(InconsistentInputsError):
        recover_asq_three(xq, x0, xb, 1.0)


def test_recover_four_input_checks() -> None:
    xs = _synthetic(1.0, 0.2j, prescription_settings("four", 1.0))
    with pytest.raises(DegenerateLocalOscillatorError):
        recover_asq_four(*xs, beta_mag=0.0)
    with pytest.raises(DegenerateLocalOscillatorError):
        recover_asq_four(*xs[:3], xs[3]._replace(beta_mag=2.0), beta_mag=1.0)


def test_recovery_of_unsqueezed_circuit_is_zero() -> None:
    reading = proxy_reading(0.7, 0.0)
    assert abs(reading.asq) < 1e-12
    assert reading.signal == pytest.approx(1.0)


@pytest.mark.parametrize("phi", PHASES)
def test_recovered_moment_at_shifted_phase(phi: float) -> None:
    r = 0.5
    reading = proxy_reading(phi, r)
    shifted = reading.circuit_phi
    expected = cmath.exp(-1j * shifted) * math.cosh(r) * math.sinh(r) * math.sin(shifted)
    assert reading.asq == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("r", [0.2, 0.5, 1.0])
def test_prescriptions_agree_on_circuit_states(r: float) -> None:
    for phi in PHASES:
        three = proxy_reading(phi, r, beta_mag=1.3, prescription="three")
        four = proxy_reading(phi, r, beta_mag=1.3, prescription="four")
        assert three.asq == pytest.approx(four.asq, abs=1e-12)


def test_intensity_from_detectors() -> None:
    beta = 1.4
    assert intensity_from_detectors(beta**2 / 2, beta**2 / 2, beta) == pytest.approx(0.0)
    with pytest.raises(InconsistentInputsError):
        intensity_from_detectors(0.1, 0.1, 1.0)


@pytest.mark.parametrize("r", [0.5, 1.0])
def test_detector_intensities_give_signal_intensity(r: float) -> None:
    for phi in PHASES:
        geometry = ProxyGeometry(phi, r)
        d_int, c_int = detector_intensities(vacuum_state(3), 0.3, 1.2, geometry)
        n_f = intensity_from_detectors(d_int, c_int, 1.2)
        assert n_f == pytest.approx(math.sinh(r) ** 2, abs=1e-12)


def test_proxy_signal_examples() -> None:
    assert proxy_signal(0.0, 0j) == pytest.approx(1.0)
    for r in (0.3, 0.7):
        n = math.sinh(r) ** 2
        asq = math.cosh(r) * math.sinh(r)
        assert proxy_signal(n, asq) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(UnphysicalMomentsError):
        proxy_signal(0.0, 1.0 + 0j)


def test_signal_closed_form_examples() -> None:
    assert signal_closed_form(3.0, 0.0) == 1.0
    assert signal_closed_form(0.0, 1.2) == 1.0
    n_bar = mean_photon_number(0.5)
    assert n_bar == pytest.approx(0.54308, abs=1e-5)
    expected = 1 / math.sqrt(1 + n_bar * (n_bar + 2))
    assert signal_closed_form(n_bar, math.pi / 2) == pytest.approx(expected)


@pytest.mark.parametrize("r", GAINS)
def test_signal_equivalence(r: float) -> None:
    n_bar = mean_photon_number(r)
    worst = max(
        abs(proxy_reading(phi, r).signal - signal_closed_form(n_bar, phi))
        for phi in SIGNAL_GRID
    )
    assert worst <= 1e-10


@pytest.mark.parametrize("phi", PHASES)
def test_proxy_signal_equals_gaussian_parity(phi: float) -> None:
    reading = proxy_reading(phi, 0.8)
    geometry = ProxyGeometry(reading.circuit_phi, 0.8)
    m = reduce_mode(propagate(vacuum_state(3), build_mzi_circuit(reading.circuit_phi, 0.8)), 2)
    assert reading.signal == pytest.approx(parity_expectation(m), abs=1e-12)
    assert reading.parity == pytest.approx(parity_expectation(signal_moments(geometry)))


def test_unshifted_reading() -> None:
    r, phi = 0.5, 0.6
    reading = proxy_reading(phi, r, bias_shift=False)
    assert reading.circuit_phi == phi
    n_bar = mean_photon_number(r)
    assert reading.signal == pytest.approx(signal_closed_form(n_bar, phi + math.pi / 2))


@pytest.mark.parametrize("port", ["lower", "upper"])
def test_dual_port_readings(port: str) -> None:
    r = 0.5
    n_bar = mean_photon_number(r)
    for phi in PHASES:
        reading = proxy_reading(phi, r, prescription="four", dual=True, port=port)  # type: ignore[arg-type]
        assert reading.signal == pytest.approx(signal_closed_form(n_bar, phi), abs=1e-10)


def test_signal_slope_matches_finite_difference() -> None:
    n_bar, phi, h = 1.3, 0.7, 1e-6
    numeric = (signal_closed_form(n_bar, phi + h) - signal_closed_form(n_bar, phi - h)) / (2 * h)
    assert signal_slope(n_bar, phi) == pytest.approx(numeric, rel=1e-6)


def test_phase_sensitivity_near_zero() -> None:
    r = 0.5
    floor = minimum_detectable_phase(mean_photon_number(r))
    assert floor == pytest.approx(1 / math.sinh(1.0))
    estimate = phase_sensitivity(r, 1e-3)
    assert estimate.delta_phi == pytest.approx(floor, rel=1e-3)
    assert 0 < estimate.signal <= 1


def test_sub_heisenberg_at_low_photon_number() -> None:
    assert minimum_detectable_phase(0.5) == pytest.approx(0.89443, abs=1e-5)
    n_bar = mean_photon_number(0.35)
    assert minimum_detectable_phase(n_bar) < 1 / n_bar


def test_phase_sensitivity_undefined() -> None:
    with pytest.raises(UndefinedSensitivityError):
        phase_sensitivity(0.0, 0.4)
    with pytest.raises(UndefinedSensitivityError):
        phase_sensitivity(0.5, 0.0)
