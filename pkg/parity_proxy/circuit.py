"""Linear-optical (Bogoliubov) transforms and Gaussian moment propagation.

Operators are ordered as ``v = (a_1, a_1^dag, a_2, a_2^dag, ..., a_M, a_M^dag)`` and
a transform ``S`` maps input operators to output operators, ``v_out = S v_in``.
Circuits are listed in the order light meets the elements; ``compose`` returns
``S_n ... S_2 S_1`` so the matrix product reads right-to-left like the operator
propagation chain of the interferometer.

The canonical proxy layout has three modes ``[a_1, b, a_2]``: the two squeezed
signal modes around the local oscillator ``b``. After the homodyne beam splitter
the detected field ``d`` sits in the ``b`` slot and ``c`` in the ``a_2`` slot.
"""

import logging
import math
from collections.abc import Sequence
from typing import Literal, NamedTuple, Union

import numpy as np
import numpy.typing as npt

from parity_proxy.errors import DimensionMismatchError, ModeIndexError
from parity_proxy.gaussian import GaussianMoments, moments_from_raw

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]
ComplexVector = npt.NDArray[np.complex128]

A1, LO, A2 = 0, 1, 2
PROXY_MODES = 3

# dual-port layout: one local oscillator per MZI output
DUAL_A1, DUAL_LO_UPPER, DUAL_A2, DUAL_LO_LOWER = 0, 1, 2, 3
DUAL_MODES = 4


class BeamSplitter(NamedTuple):
    """50:50 beam splitter: a_i -> (a_i + i a_j)/sqrt2, a_j -> (a_j + i a_i)/sqrt2."""

    mode_i: int
    mode_j: int


class PhaseShift(NamedTuple):
    """a -> exp(i phi) a."""

    mode: int
    phi: float


class TwoModeSqueezer(NamedTuple):
    """Parametric amplifier with zero pump phase: a_i -> mu a_i + nu a_j^dag."""

    mode_i: int
    mode_j: int
    r: float


CircuitElement = Union[BeamSplitter, PhaseShift, TwoModeSqueezer]


class BogoliubovTransform(NamedTuple):
    num_modes: int
    matrix: ComplexMatrix

    @property
    def annihilation_block(self) -> ComplexMatrix:
        """Coefficients of a_k in the output a_i."""
        return self.matrix[0::2, 0::2]

    @property
    def creation_block(self) -> ComplexMatrix:
        """Coefficients of a_k^dag in the output a_i."""
        return self.matrix[0::2, 1::2]

    @property
    def is_passive(self) -> bool:
        return bool(np.all(self.creation_block == 0))


class MultiModeMoments(NamedTuple):
    """First and central second moments of an M-mode Gaussian state.

    ``A[i, j] = <da_i da_j>`` and ``B[i, j] = <da_i^dag da_j>`` with
    ``da = a - <a>``; vacuum and coherent states both have ``A = B = 0``.
    """

    mean: ComplexVector
    A: ComplexMatrix
    B: ComplexMatrix

    @property
    def num_modes(self) -> int:
        return int(self.mean.shape[0])

    def intensity(self, mode: int) -> float:
        """<a^dag a> of one mode."""
        _check_mode(mode, self.num_modes)
        return float(self.B[mode, mode].real + abs(self.mean[mode]) ** 2)

    def total_intensity(self) -> float:
        return float(np.trace(self.B).real + np.sum(np.abs(self.mean) ** 2))


def _check_mode(mode: int, num_modes: int) -> None:
    if not 0 <= mode < num_modes:
        raise ModeIndexError(f"mode {mode} out of range for {num_modes} modes")


def _assemble(P: ComplexMatrix, Q: ComplexMatrix) -> ComplexMatrix:
    # creation rows are the conjugates of the annihilation rows, columns swapped
    M = P.shape[0]
    S = np.zeros((2 * M, 2 * M), dtype=np.complex128)
    S[0::2, 0::2] = P
    S[0::2, 1::2] = Q
    S[1::2, 0::2] = Q.conj()
    S[1::2, 1::2] = P.conj()
    return S


def identity(num_modes: int) -> BogoliubovTransform:
    return BogoliubovTransform(num_modes, np.eye(2 * num_modes, dtype=np.complex128))


def commutation_form(num_modes: int) -> npt.NDArray[np.float64]:
    """K with K[v_i, v_j] = [v_i, v_j]: blocks [[0, 1], [-1, 0]] per mode."""
    return np.kron(np.eye(num_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def commutation_defect(T: BogoliubovTransform) -> float:
    """max |S K S^T - K|; zero when the transform preserves [a_i, a_j^dag]."""
    K = commutation_form(T.num_modes)
    return float(np.max(np.abs(T.matrix @ K @ T.matrix.T - K)))


def element_matrix(e: CircuitElement, num_modes: int) -> BogoliubovTransform:
    """Embed a single element into the 2M x 2M identity."""
    P = np.eye(num_modes, dtype=np.complex128)
    Q = np.zeros((num_modes, num_modes), dtype=np.complex128)
    if isinstance(e, BeamSplitter):
        i, j = e.mode_i, e.mode_j
        _check_mode(i, num_modes)
        _check_mode(j, num_modes)
        if i == j:
            raise ValueError(f"beam splitter needs two distinct modes, got {i} twice")
        t = 1 / math.sqrt(2)
        P[i, i] = P[j, j] = t
        P[i, j] = P[j, i] = 1j * t
    elif isinstance(e, PhaseShift):
        _check_mode(e.mode, num_modes)
        P[e.mode, e.mode] = np.exp(1j * e.phi)
    elif isinstance(e, TwoModeSqueezer):
        i, j = e.mode_i, e.mode_j
        _check_mode(i, num_modes)
        _check_mode(j, num_modes)
        if i == j:
            raise ValueError(f"two-mode squeezer needs two distinct modes, got {i} twice")
        P[i, i] = P[j, j] = math.cosh(e.r)
        Q[i, j] = Q[j, i] = math.sinh(e.r)
    else:
        raise TypeError(f"Invalid circuit element: {type(e)}")
    return BogoliubovTransform(num_modes, _assemble(P, Q))


def compose(
    elements: Sequence[Union[CircuitElement, BogoliubovTransform]], num_modes: int
) -> BogoliubovTransform:
    """Multiply element matrices; ``elements[0]`` acts on the input first."""
    if not elements:
        raise ValueError("cannot compose an empty circuit")
    S = np.eye(2 * num_modes, dtype=np.complex128)
    for e in elements:
        if isinstance(e, BogoliubovTransform):
            if e.num_modes != num_modes:
                raise DimensionMismatchError(
                    f"transform on {e.num_modes} modes in a {num_modes}-mode circuit"
                )
            step = e.matrix
        else:
            step = element_matrix(e, num_modes).matrix
        S = step @ S
    return BogoliubovTransform(num_modes, S)


def mzi_elements(phi: float, r: float, a1: int, a2: int) -> list[CircuitElement]:
    """Squeezer, first beam splitter, probe phase, second beam splitter."""
    return [
        TwoModeSqueezer(a1, a2, r),
        BeamSplitter(a1, a2),
        PhaseShift(a1, phi),
        BeamSplitter(a1, a2),
    ]


def build_mzi_circuit(phi: float, r: float) -> BogoliubovTransform:
    """The squeezed-vacuum MZI on the proxy layout, without homodyning."""
    return compose(mzi_elements(phi, r, A1, A2), PROXY_MODES)


def build_proxy_circuit(phi: float, theta: float, r: float) -> BogoliubovTransform:
    """Full chain on ``[a_1, b, a_2]``: OPA, MZI, LO bias phase and homodyne splitter."""
    squeezer, bs1, probe, bs2 = mzi_elements(phi, r, A1, A2)
    return compose(
        [squeezer, bs1, probe, PhaseShift(LO, theta), bs2, BeamSplitter(LO, A2)],
        PROXY_MODES,
    )


def build_dual_port_circuit(
    phi: float, theta_upper: float, theta_lower: float, r: float
) -> BogoliubovTransform:
    """Alternate setup on ``[a_1, b_1, a_2, b_2]`` homodyning both MZI outputs."""
    squeezer, bs1, probe, bs2 = mzi_elements(phi, r, DUAL_A1, DUAL_A2)
    return compose(
        [
            squeezer,
            bs1,
            probe,
            PhaseShift(DUAL_LO_UPPER, theta_upper),
            PhaseShift(DUAL_LO_LOWER, theta_lower),
            bs2,
            BeamSplitter(DUAL_LO_UPPER, DUAL_A1),
            BeamSplitter(DUAL_LO_LOWER, DUAL_A2),
        ],
        DUAL_MODES,
    )


def random_circuit(
    rng: np.random.Generator, num_modes: int, depth: int, max_r: float = 1.0
) -> list[CircuitElement]:
    """Random mix of splitters, phases and squeezers, for invariant checks."""
    elements: list[CircuitElement] = []
    for _ in range(depth):
        kind = rng.integers(3)
        if kind == 1 or num_modes < 2:
            elements.append(
                PhaseShift(int(rng.integers(num_modes)), float(rng.uniform(0, 2 * math.pi)))
            )
            continue
        i, j = (int(k) for k in rng.choice(num_modes, size=2, replace=False))
        if kind == 0:
            elements.append(BeamSplitter(i, j))
        else:
            elements.append(TwoModeSqueezer(i, j, float(rng.uniform(0, max_r))))
    return elements


def vacuum_state(num_modes: int) -> MultiModeMoments:
    return MultiModeMoments(
        np.zeros(num_modes, dtype=np.complex128),
        np.zeros((num_modes, num_modes), dtype=np.complex128),
        np.zeros((num_modes, num_modes), dtype=np.complex128),
    )


def coherent_in_mode(
    state: MultiModeMoments, mode: int, beta: complex
) -> MultiModeMoments:
    """Displace one mode to mean ``beta``; noise is left untouched."""
    _check_mode(mode, state.num_modes)
    mean = state.mean.copy()
    mean[mode] = beta
    return state._replace(mean=mean)


def extend_vacuum(state: MultiModeMoments, extra: int = 1) -> MultiModeMoments:
    """Append ``extra`` vacuum modes after the existing ones."""
    M = state.num_modes
    grown = vacuum_state(M + extra)
    grown.mean[:M] = state.mean
    grown.A[:M, :M] = state.A
    grown.B[:M, :M] = state.B
    return grown


def propagate(state: MultiModeMoments, T: BogoliubovTransform) -> MultiModeMoments:
    """Transport first and second moments through ``T``."""
    M = state.num_modes
    if T.num_modes != M:
        raise DimensionMismatchError(
            f"transform acts on {T.num_modes} modes, state has {M}"
        )
    S = T.matrix

    stacked_mean = np.empty(2 * M, dtype=np.complex128)
    stacked_mean[0::2] = state.mean
    stacked_mean[1::2] = state.mean.conj()

    # G[p, q] = <dv_p dv_q>
    G = np.empty((2 * M, 2 * M), dtype=np.complex128)
    G[0::2, 0::2] = state.A
    G[0::2, 1::2] = np.eye(M) + state.B.T
    G[1::2, 0::2] = state.B
    G[1::2, 1::2] = state.A.conj()

    G_out = S @ G @ S.T
    A = G_out[0::2, 0::2]
    B = G_out[1::2, 0::2]
    return MultiModeMoments(
        (S @ stacked_mean)[0::2],
        0.5 * (A + A.T),
        0.5 * (B + B.conj().T),
    )


def full_moments(state: MultiModeMoments, mode: int) -> tuple[complex, complex, float]:
    """Raw (<a>, <a^2>, <a^dag a>) of one mode."""
    _check_mode(mode, state.num_modes)
    a = complex(state.mean[mode])
    return a, complex(state.A[mode, mode]) + a**2, state.intensity(mode)


def reduce_mode(state: MultiModeMoments, mode: int) -> GaussianMoments:
    return moments_from_raw(*full_moments(state, mode))


class PortLayout(NamedTuple):
    """Mode slots of one homodyned port.

    ``signal`` holds a_f before the homodyne splitter and c after it; ``lo`` holds
    the local oscillator b before and d after.
    """

    signal: int
    lo: int


class ProxyGeometry(NamedTuple):
    """Which interferometer is measured and on which port.

    The single-port geometry is the three-mode proxy layout; ``dual=True`` selects
    the four-mode alternate setup in which either port can be read.
    """

    phi: float
    r: float
    dual: bool = False
    port: Literal["lower", "upper"] = "lower"

    @property
    def num_modes(self) -> int:
        return DUAL_MODES if self.dual else PROXY_MODES

    @property
    def layout(self) -> PortLayout:
        if not self.dual:
            if self.port != "lower":
                raise ValueError("the single-port proxy layout only homodynes the lower port")
            return PortLayout(A2, LO)
        if self.port == "lower":
            return PortLayout(DUAL_A2, DUAL_LO_LOWER)
        if self.port == "upper":
            return PortLayout(DUAL_A1, DUAL_LO_UPPER)
        raise ValueError(f"Unknown port: {self.port}")

    def interferometer(self) -> BogoliubovTransform:
        """OPA and MZI only; the signal slot then holds a_f."""
        a1, a2 = (DUAL_A1, DUAL_A2) if self.dual else (A1, A2)
        return compose(mzi_elements(self.phi, self.r, a1, a2), self.num_modes)

    def transform(self, theta: float) -> BogoliubovTransform:
        """Full chain with bias phase ``theta`` on the measured port's oscillator."""
        layout = self.layout
        if not self.dual:
            return build_proxy_circuit(self.phi, theta, self.r)
        if layout.signal == DUAL_A1:
            return build_dual_port_circuit(self.phi, theta, 0.0, self.r)
        return build_dual_port_circuit(self.phi, 0.0, theta, self.r)

    def input_state(self, beta_mag: float) -> MultiModeMoments:
        """Vacuum signal modes with a real local oscillator of amplitude ``beta_mag``."""
        state = vacuum_state(self.num_modes)
        if self.dual:
            state = coherent_in_mode(state, DUAL_LO_UPPER, beta_mag)
            return coherent_in_mode(state, DUAL_LO_LOWER, beta_mag)
        return coherent_in_mode(state, LO, beta_mag)


def signal_moments(geometry: ProxyGeometry) -> GaussianMoments:
    """Reduced Gaussian moments of the measured MZI output a_f."""
    out = propagate(vacuum_state(geometry.num_modes), geometry.interferometer())
    return reduce_mode(out, geometry.layout.signal)
