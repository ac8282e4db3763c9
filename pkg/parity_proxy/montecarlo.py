"""Finite-shot simulation of the proxy detection scheme.

Each bias setting of a shot plan samples ``(n_c, n_d)`` detector count pairs from
the Fock oracle's joint distribution, forms X = 4 n_c n_d per shot, and feeds the
averages through the same recovery prescriptions used on exact moments.
"""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import Executor
from typing import Literal, NamedTuple, Optional, Union

import numpy as np
import numpy.typing as npt
from typing_extensions import Self

from parity_proxy.circuit import A2, LO, ProxyGeometry, vacuum_state
from parity_proxy.errors import (
    DegenerateLocalOscillatorError,
    InconsistentInputsError,
    UnphysicalMomentsError,
)
from parity_proxy.fock import joint_count_distribution, proxy_circuit_fock
from parity_proxy.homodyne import (
    Prescription,
    XMeasurement,
    detector_intensities,
    four_phase_settings,
    proxy_signal,
    recover_asq,
    three_measurement_settings,
    x_measurement,
)

logger = logging.getLogger(__name__)

MAX_SAMPLED_BETA = 3.0
DISTRIBUTION_TOL = 1e-6
SETTING_TOL = 1e-12
# per-gate truncation budget of the sampled oracle
SAMPLED_TAIL_TOL = 1e-8

ErrorMethod = Literal["delta", "bootstrap"]
SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]
CountSamples = npt.NDArray[np.int64]


class EstimatorResult(NamedTuple):
    mean: float
    stderr: float
    shots: int


class SampleMoments(NamedTuple):
    """Sufficient statistics (count, mean, sum of squared deviations)."""

    count: int
    mean: float
    m2: float

    @classmethod
    def empty(cls) -> Self:
        return cls(0, 0.0, 0.0)

    @classmethod
    def from_values(cls, values: npt.ArrayLike) -> Self:
        arr = np.asarray(values, dtype=np.float64)
        if arr.size == 0:
            return cls.empty()
        mean = float(arr.mean())
        return cls(int(arr.size), mean, float(np.sum((arr - mean) ** 2)))

    def merge(self, other: "SampleMoments") -> "SampleMoments":
        """Pairwise (Chan) combination; commutative and associative."""
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        count = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / count
        m2 = self.m2 + other.m2 + delta**2 * self.count * other.count / count
        return SampleMoments(count, mean, m2)

    @property
    def variance(self) -> float:
        if self.count < 2:
            return 0.0
        return self.m2 / (self.count - 1)

    def to_estimator(self) -> EstimatorResult:
        if self.count == 0:
            raise ValueError("no samples to estimate from")
        return EstimatorResult(self.mean, math.sqrt(self.variance / self.count), self.count)


def _same_settings(
    settings: Sequence[tuple[float, float]], expected: Sequence[tuple[float, float]]
) -> bool:
    return len(settings) == len(expected) and all(
        abs(t - te) <= SETTING_TOL and abs(b - be) <= SETTING_TOL * max(1.0, be)
        for (t, b), (te, be) in zip(settings, expected)
    )


class ShotPlan(NamedTuple):
    """Bias settings ``(theta, |beta|)``, shots per setting and master seed."""

    settings: tuple[tuple[float, float], ...]
    shots_per_setting: int
    seed: int = 0

    @classmethod
    def three_measurement(cls, beta_mag: float, shots_per_setting: int, seed: int = 0) -> Self:
        return cls(tuple(three_measurement_settings(beta_mag)), shots_per_setting, seed)

    @classmethod
    def four_phase(cls, beta_mag: float, shots_per_setting: int, seed: int = 0) -> Self:
        return cls(tuple(four_phase_settings(beta_mag)), shots_per_setting, seed)

    @classmethod
    def for_prescription(
        cls, prescription: Prescription, beta_mag: float, shots_per_setting: int, seed: int = 0
    ) -> Self:
        if prescription == "three":
            return cls.three_measurement(beta_mag, shots_per_setting, seed)
        if prescription == "four":
            return cls.four_phase(beta_mag, shots_per_setting, seed)
        raise ValueError(f"Unsupported prescription: {prescription}")

    @property
    def beta_mag(self) -> float:
        return max(b for _, b in self.settings)

    @property
    def prescription(self) -> Prescription:
        """Which recovery the settings belong to; raises if neither."""
        beta = self.beta_mag
        if beta <= 0:
            raise DegenerateLocalOscillatorError("shot plan has no live local oscillator")
        if _same_settings(self.settings, three_measurement_settings(beta)):
            return "three"
        if _same_settings(self.settings, four_phase_settings(beta)):
            return "four"
        raise InconsistentInputsError(
            f"settings {self.settings!r} match neither the three-measurement nor the "
            "four-phase prescription"
        )

    def validate(self) -> Prescription:
        if self.shots_per_setting < 1:
            raise ValueError(f"shots_per_setting must be >= 1, got {self.shots_per_setting}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        return self.prescription


class SettingRun(NamedTuple):
    """Per-setting estimates; ``covariance`` is that of the (X, intensity) means."""

    theta: float
    beta_mag: float
    x: EstimatorResult
    intensity: EstimatorResult
    covariance: npt.NDArray[np.float64]


class ExperimentResult(NamedTuple):
    parity: EstimatorResult
    settings: tuple[SettingRun, ...]
    asq: complex
    intensity: float
    valid: bool = True


def _generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.default_rng(seed)


def sample_counts(
    dist: npt.ArrayLike, shots: int, seed: SeedLike
) -> CountSamples:
    """Draw ``shots`` i.i.d. ``(n_c, n_d)`` pairs from a joint count table."""
    table = np.asarray(dist, dtype=np.float64)
    if table.size == 0:
        raise ValueError("cannot sample from an empty distribution")
    if np.any(table < 0):
        raise InconsistentInputsError("count distribution has negative entries")
    total = float(table.sum())
    if abs(total - 1.0) > DISTRIBUTION_TOL:
        raise InconsistentInputsError(
            f"count distribution sums to {total!r}, not 1 within {DISTRIBUTION_TOL}"
        )
    rng = _generator(seed)
    flat = rng.choice(table.size, size=shots, p=table.ravel() / total)
    return np.column_stack(np.unravel_index(flat, table.shape)).astype(np.int64)


def _x_values(samples: CountSamples) -> npt.NDArray[np.float64]:
    return 4.0 * samples[:, 0].astype(np.float64) * samples[:, 1]


def _intensity_values(samples: CountSamples, beta_mag: float) -> npt.NDArray[np.float64]:
    return samples.sum(axis=1).astype(np.float64) - beta_mag**2


def estimate_x(samples: CountSamples) -> EstimatorResult:
    """X = 4 * mean(n_c n_d) with its standard error."""
    samples = np.asarray(samples)
    if samples.size == 0:
        raise ValueError("estimate_x needs at least one sample")
    return SampleMoments.from_values(_x_values(samples)).to_estimator()


def estimate_intensity(samples: CountSamples, beta_mag: float) -> EstimatorResult:
    """<a_f^dag a_f> = mean(n_c + n_d) - |beta|^2."""
    return SampleMoments.from_values(_intensity_values(samples, beta_mag)).to_estimator()


def _recovery_weights(
    prescription: Prescription, settings: Sequence[tuple[float, float]], beta_mag: float
) -> tuple[complex, list[complex]]:
    # the recoveries are affine in the X values: asq = offset + sum_s w_s X_s
    def recover(values: Sequence[float]) -> complex:
        xs = [XMeasurement(t, b, v) for (t, b), v in zip(settings, values)]
        return recover_asq(prescription, xs, beta_mag)

    k = len(settings)
    offset = recover([0.0] * k)
    weights = [recover([1.0 if s == j else 0.0 for s in range(k)]) - offset for j in range(k)]
    return offset, weights


def _signal_or_none(n_f: float, asq: complex) -> Optional[float]:
    try:
        return proxy_signal(n_f, asq)
    except UnphysicalMomentsError:
        return None


def _sample_setting(
    args: tuple[float, float, float, float, int, float, int, np.random.SeedSequence],
) -> CountSamples:
    phi, theta, r, beta_mag, cutoff, tail_tol, shots, seq = args
    state = proxy_circuit_fock(phi, theta, r, beta_mag, cutoff, tail_tol)
    dist = joint_count_distribution(state, (A2, LO))
    samples = sample_counts(dist, shots, seq)
    logger.debug(
        "setting theta=%.6g |beta|=%.6g: %d shots, mean n_c=%.6g n_d=%.6g",
        theta,
        beta_mag,
        shots,
        samples[:, 0].mean(),
        samples[:, 1].mean(),
    )
    return samples


def _setting_run(theta: float, beta_mag: float, samples: CountSamples) -> SettingRun:
    x_vals = _x_values(samples)
    n_vals = _intensity_values(samples, beta_mag)
    shots = len(samples)
    cov = np.cov(np.vstack([x_vals, n_vals])) / shots if shots > 1 else np.zeros((2, 2))
    return SettingRun(
        theta,
        beta_mag,
        SampleMoments.from_values(x_vals).to_estimator(),
        SampleMoments.from_values(n_vals).to_estimator(),
        np.asarray(cov, dtype=np.float64).reshape(2, 2),
    )


def _bootstrap_stderr(
    prescription: Prescription,
    settings: Sequence[tuple[float, float]],
    beta_mag: float,
    samples: Sequence[CountSamples],
    n_bootstrap: int,
    rng: np.random.Generator,
) -> float:
    estimates = []
    for _ in range(n_bootstrap):
        xs = []
        pooled = SampleMoments.empty()
        for (theta, beta), block in zip(settings, samples):
            resampled = block[rng.integers(len(block), size=len(block))]
            xs.append(XMeasurement(theta, beta, float(_x_values(resampled).mean())))
            pooled = pooled.merge(
                SampleMoments.from_values(_intensity_values(resampled, beta))
            )
        signal = _signal_or_none(pooled.mean, recover_asq(prescription, xs, beta_mag))
        if signal is not None:
            estimates.append(signal)
    if len(estimates) < 2:
        return math.nan
    return float(np.std(estimates, ddof=1))


def _run_exact(
    plan: ShotPlan, prescription: Prescription, circuit_phi: float, r: float
) -> ExperimentResult:
    geometry = ProxyGeometry(circuit_phi, r)
    state = vacuum_state(geometry.num_modes)
    beta_mag = plan.beta_mag
    xs = [x_measurement(state, t, b, geometry) for t, b in plan.settings]
    d_int, c_int = detector_intensities(state, 0.0, beta_mag, geometry)
    n_f = d_int + c_int - beta_mag**2
    asq = recover_asq(prescription, xs, beta_mag)
    shots = plan.shots_per_setting
    runs = tuple(
        SettingRun(
            x.theta,
            x.beta_mag,
            EstimatorResult(x.value, 0.0, shots),
            EstimatorResult(n_f, 0.0, shots),
            np.zeros((2, 2)),
        )
        for x in xs
    )
    signal = _signal_or_none(n_f, asq)
    if signal is None:
        logger.warning("exact moments at phi=%.6g give a non-positive radicand", circuit_phi)
        return ExperimentResult(EstimatorResult(math.nan, math.nan, shots), runs, asq, n_f, False)
    return ExperimentResult(EstimatorResult(signal, 0.0, shots), runs, asq, n_f)


def run_proxy_experiment(
    plan: ShotPlan,
    phi: float,
    r: float,
    *,
    cutoff: int = 60,
    bias_shift: bool = True,
    exact: bool = False,
    error: ErrorMethod = "delta",
    n_bootstrap: int = 200,
    tail_tol: float = SAMPLED_TAIL_TOL,
    executor: Optional[Executor] = None,
) -> ExperimentResult:
    """Estimate the proxy parity signal at probe phase ``phi`` from finite shots.

    Settings draw from independent substreams spawned off ``plan.seed``, so the
    result does not depend on whether ``executor`` runs them in parallel. With
    ``exact=True`` the X values come from Gaussian moments and carry no error.
    A noisy recovery that leaves no physical radicand yields ``valid=False``.
    ``tail_tol`` bounds the probability each Fock gate may push past ``cutoff``.
    """
    prescription = plan.validate()
    circuit_phi = phi + math.pi / 2 if bias_shift else phi
    if exact:
        return _run_exact(plan, prescription, circuit_phi, r)
    if error not in ("delta", "bootstrap"):
        raise ValueError(f"Unsupported error method: {error}")
    beta_mag = plan.beta_mag
    if beta_mag > MAX_SAMPLED_BETA:
        raise ValueError(
            f"sampled mode caps |beta| at {MAX_SAMPLED_BETA}, got {beta_mag!r}; "
            "use exact=True for larger oscillators"
        )

    *setting_seqs, bootstrap_seq = np.random.SeedSequence(plan.seed).spawn(
        len(plan.settings) + 1
    )
    jobs = [
        (circuit_phi, theta, r, beta, cutoff, tail_tol, plan.shots_per_setting, seq)
        for (theta, beta), seq in zip(plan.settings, setting_seqs)
    ]
    if executor is None:
        samples = [_sample_setting(job) for job in jobs]
    else:
        samples = list(executor.map(_sample_setting, jobs))

    runs = tuple(
        _setting_run(theta, beta, block)
        for (theta, beta), block in zip(plan.settings, samples)
    )
    pooled = SampleMoments.empty()
    for (_, beta), block in zip(plan.settings, samples):
        pooled = pooled.merge(SampleMoments.from_values(_intensity_values(block, beta)))
    n_f = pooled.mean
    offset, weights = _recovery_weights(prescription, plan.settings, beta_mag)
    asq = offset + sum(w * run.x.mean for w, run in zip(weights, runs))
    total_shots = pooled.count

    signal = _signal_or_none(n_f, asq)
    if signal is None:
        logger.warning(
            "recovered moments at phi=%.6g leave no physical radicand with %d shots "
            "per setting; increase the shot budget",
            phi,
            plan.shots_per_setting,
        )
        return ExperimentResult(
            EstimatorResult(math.nan, math.nan, total_shots), runs, asq, n_f, False
        )

    if error == "bootstrap":
        stderr = _bootstrap_stderr(
            prescription,
            plan.settings,
            beta_mag,
            samples,
            n_bootstrap,
            np.random.Generator(np.random.PCG64(bootstrap_seq)),
        )
    else:
        radicand = (n_f + 0.5) ** 2 - abs(asq) ** 2
        scale = 0.5 * radicand**-1.5
        d_intensity = -scale * (n_f + 0.5)
        variance = 0.0
        for w, run in zip(weights, runs):
            grad = np.array(
                [
                    scale * (asq.conjugate() * w).real,
                    d_intensity * run.intensity.shots / total_shots,
                ]
            )
            variance += float(grad @ run.covariance @ grad)
        stderr = math.sqrt(max(variance, 0.0))
    return ExperimentResult(EstimatorResult(signal, stderr, total_shots), runs, asq, n_f)
