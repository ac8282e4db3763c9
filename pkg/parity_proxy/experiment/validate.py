"""Named cross-checks between the moment path, the closed forms and the Fock oracle."""

import logging
import math
from collections.abc import Callable, Iterator
from typing import Optional

import numpy as np

from parity_proxy.circuit import (
    A2,
    LO,
    ProxyGeometry,
    commutation_defect,
    compose,
    random_circuit,
    signal_moments,
    vacuum_state,
)
from parity_proxy.config import ExperimentConfig
from parity_proxy.errors import CutoffTooSmallError, ParityProxyError
from parity_proxy.experiment.utils import CheckResult
from parity_proxy.fock import (
    FockVector,
    coherent_fock,
    joint_count_distribution,
    mode_moments_fock,
    mode_parity_fock,
    mzi_fock,
    proxy_circuit_fock,
    smsv_fock,
    suggest_cutoff,
    tmsv_fock,
    wigner_parity_check,
)
from parity_proxy.gaussian import parity_expectation
from parity_proxy.homodyne import (
    mean_photon_number,
    minimum_detectable_phase,
    phase_sensitivity,
    proxy_reading,
    signal_closed_form,
    x_closed_form,
    x_measurement,
)

logger = logging.getLogger(__name__)

COMMUTATION_TOL = 1e-12
SIGNAL_TOL = 1e-10
X_TOL = 1e-10
INTENSITY_TOL = 1e-10
ORACLE_TOL = 1e-6
WIGNER_PARITY_TOL = 1e-8
SENSITIVITY_TOL = 1e-2

# truncation budget for oracle gates at cutoffs near 40
ORACLE_TAIL_TOL = 1e-6

RANDOM_CIRCUITS = 100
CHECK_PHASES = tuple(np.linspace(0.0, 2 * math.pi, 16, endpoint=False))
X_GRID_PHASES = (0.0, math.pi / 6, math.pi / 2)
X_GRID_GAINS = (0.2, 0.6)
X_GRID_BIAS = (0.0, math.pi / 4, math.pi / 2)
X_GRID_BETAS = (0.0, 1.0, 2.0)
ORACLE_PHASES = (0.0, math.pi / 5, math.pi / 3, 3 * math.pi / 4)

Check = Callable[[ExperimentConfig], CheckResult]


def _live_beta(cfg: ExperimentConfig) -> float:
    return cfg.beta_mag if cfg.beta_mag > 0 else 1.0


def check_commutation(cfg: ExperimentConfig) -> CheckResult:
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(RANDOM_CIRCUITS):
        num_modes = int(rng.integers(2, 5))
        elements = random_circuit(rng, num_modes, depth=int(rng.integers(1, 12)))
        worst = max(worst, commutation_defect(compose(elements, num_modes)))
    return CheckResult("commutation", worst <= COMMUTATION_TOL, worst, COMMUTATION_TOL)


def check_signal_equivalence(cfg: ExperimentConfig) -> CheckResult:
    n_bar = mean_photon_number(cfg.r)
    worst = 0.0
    for phi in cfg.phi_grid:
        reading = proxy_reading(
            float(phi), cfg.r, beta_mag=_live_beta(cfg), prescription=cfg.prescription
        )
        worst = max(worst, abs(reading.signal - signal_closed_form(n_bar, phi)))
        worst = max(worst, abs(reading.signal - reading.parity))
    return CheckResult("signal_equivalence", worst <= SIGNAL_TOL, worst, SIGNAL_TOL)


def check_prescription_equivalence(cfg: ExperimentConfig) -> CheckResult:
    """Both prescriptions recover <a_f^dag^2> as read off the signal mode."""
    worst = 0.0
    for phi in CHECK_PHASES:
        three = proxy_reading(phi, cfg.r, beta_mag=_live_beta(cfg), prescription="three")
        four = proxy_reading(phi, cfg.r, beta_mag=_live_beta(cfg), prescription="four")
        m = signal_moments(ProxyGeometry(three.circuit_phi, cfg.r))
        adag_sq = complex(-2 * m.u + m.alpha0.conjugate() ** 2)
        worst = max(worst, abs(three.asq - four.asq), abs(three.asq - adag_sq))
    return CheckResult("prescription_equivalence", worst <= SIGNAL_TOL, worst, SIGNAL_TOL)


def check_closed_form_x(cfg: ExperimentConfig) -> CheckResult:
    """Absolute gap between propagated X and its closed form on a fixed grid plus ``cfg.r``."""
    worst = 0.0
    for r in sorted({*X_GRID_GAINS, cfg.r}):
        for phi in X_GRID_PHASES:
            geometry = ProxyGeometry(phi, r)
            state = vacuum_state(geometry.num_modes)
            for theta in X_GRID_BIAS:
                for beta in X_GRID_BETAS:
                    x = x_measurement(state, theta, beta, geometry).value
                    worst = max(worst, abs(x - x_closed_form(theta, beta, phi, r)))
    return CheckResult("closed_form_x", worst <= X_TOL, worst, X_TOL)


def check_intensity_phase_independence(cfg: ExperimentConfig) -> CheckResult:
    expected = math.sinh(cfg.r) ** 2
    worst = max(
        abs(signal_moments(ProxyGeometry(phi, cfg.r)).mean_photon_number - expected)
        for phi in CHECK_PHASES
    )
    return CheckResult(
        "intensity_phase_independence", worst <= INTENSITY_TOL, worst, INTENSITY_TOL
    )


def check_oracle_agreement(cfg: ExperimentConfig) -> CheckResult:
    """Gaussian parity and intensity of a_f against the truncated MZI at ``cfg.cutoff``."""
    worst = 0.0
    for phi in ORACLE_PHASES:
        s = mzi_fock(phi, cfg.r, cfg.cutoff, ORACLE_TAIL_TOL)
        m = signal_moments(ProxyGeometry(phi, cfg.r))
        worst = max(
            worst,
            abs(mode_parity_fock(s, 1) - parity_expectation(m)),
            abs(mode_moments_fock(s, 1).n_mean - m.mean_photon_number),
        )
    return CheckResult("oracle_agreement", worst <= ORACLE_TOL, worst, ORACLE_TOL)


def check_joint_counts(cfg: ExperimentConfig) -> CheckResult:
    """Sampled-path correlation E[n_c n_d] against the Wick-based X / 4."""
    beta = min(_live_beta(cfg), 2.0)
    worst = 0.0
    for theta in (0.0, math.pi / 4):
        phi = math.pi / 4
        s = proxy_circuit_fock(phi, theta, cfg.r, beta, cfg.cutoff, ORACLE_TAIL_TOL)
        dist = joint_count_distribution(s, (A2, LO))
        n = np.arange(cfg.cutoff)
        correlation = float(n @ dist @ n)
        geometry = ProxyGeometry(phi, cfg.r)
        x = x_measurement(vacuum_state(geometry.num_modes), theta, beta, geometry)
        worst = max(worst, abs(correlation - x.value / 4) / max(1.0, x.value / 4))
    return CheckResult("joint_counts", worst <= ORACLE_TOL, worst, ORACLE_TOL)


def _adequate(factory: Callable[[int], FockVector], first_guess: int) -> FockVector:
    try:
        return factory(first_guess)
    except CutoffTooSmallError as exc:
        if exc.suggested is None:
            raise
        return factory(exc.suggested)


def _identity_states() -> Iterator[tuple[str, FockVector]]:
    yield "vacuum", coherent_fock(0, 8)
    for beta in (0.5, 1.0, 2.0):
        yield (
            f"coherent {beta}",
            _adequate(lambda c, b=beta: coherent_fock(b, c), suggest_cutoff(beta**2, beta**2)),
        )
    for r in (0.3, 0.5, 0.8):
        n = math.sinh(r) ** 2
        yield (
            f"thermal r={r}",
            _adequate(lambda c, r=r: tmsv_fock(r, c), suggest_cutoff(n, n * (n + 1))),
        )
    for r in (0.3, 0.6):
        n = math.sinh(r) ** 2
        yield (
            f"squeezed r={r}",
            _adequate(lambda c, r=r: smsv_fock(r, c), suggest_cutoff(n, 2 * n * (n + 1))),
        )


def check_wigner_parity(cfg: ExperimentConfig) -> CheckResult:
    """W(0,0) = (2/pi) <(-1)^N> on reference states at self-chosen cutoffs."""
    worst = 0.0
    worst_state = ""
    for label, s in _identity_states():
        diff = wigner_parity_check(s, 0).abs_diff
        if diff >= worst:
            worst, worst_state = diff, label
    return CheckResult(
        "wigner_parity",
        worst <= WIGNER_PARITY_TOL,
        worst,
        WIGNER_PARITY_TOL,
        f"largest gap on {worst_state}",
    )


def check_sensitivity(cfg: ExperimentConfig) -> CheckResult:
    if cfg.r == 0:
        return CheckResult("sensitivity", True, 0.0, SENSITIVITY_TOL, "skipped at r=0")
    floor = minimum_detectable_phase(mean_photon_number(cfg.r))
    near_zero = phase_sensitivity(cfg.r, 1e-3).delta_phi
    gap = abs(near_zero - floor) / floor
    passed = gap <= SENSITIVITY_TOL and near_zero <= phase_sensitivity(cfg.r, math.pi / 4).delta_phi
    return CheckResult("sensitivity", passed, gap, SENSITIVITY_TOL)


CHECKS: tuple[Check, ...] = (
    check_commutation,
    check_signal_equivalence,
    check_prescription_equivalence,
    check_closed_form_x,
    check_intensity_phase_independence,
    check_oracle_agreement,
    check_joint_counts,
    check_wigner_parity,
    check_sensitivity,
)


def check_name(check: Check) -> str:
    return check.__name__.removeprefix("check_")


def run_check(check: Check, cfg: ExperimentConfig) -> CheckResult:
    """Run one check; library errors become a failure carrying the message."""
    try:
        result = check(cfg)
    except ParityProxyError as exc:
        logger.warning("check %s raised: %s", check_name(check), exc)
        return CheckResult(check_name(check), False, math.nan, math.nan, str(exc))
    if not result.passed:
        logger.warning(
            "check %s failed: deviation %.3e > %.1e",
            result.name,
            result.max_deviation,
            result.tolerance,
        )
    return result


def run_checks(
    cfg: ExperimentConfig, checks: Optional[tuple[Check, ...]] = None
) -> list[CheckResult]:
    return [run_check(check, cfg) for check in checks or CHECKS]
