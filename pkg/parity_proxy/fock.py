"""Truncated Fock-space simulator used as ground truth for the moment path.

States are dense complex tensors with one axis per mode; axis ``k`` of length
``cutoffs[k]`` indexes occupations ``0 ... cutoffs[k] - 1``. Gates follow the same
conventions as ``parity_proxy.circuit``:

* beam splitter ``U a_i^dag U^dag = (a_i^dag + i a_j^dag)/sqrt2``, so that in the
  Heisenberg picture ``a_i -> (a_i + i a_j)/sqrt2``;
* phase shift multiplies ``|n>`` by ``e^{i phi n}``.

Probability pushed past the cutoff by a gate is tracked in ``FockVector.leaked``;
a gate that loses more than ``tail_tol`` raises ``CutoffTooSmallError``.
"""

import functools
import logging
import math
from collections.abc import Sequence
from typing import NamedTuple, Optional

import numpy as np
import numpy.typing as npt
from scipy.special import gammaln
from scipy.stats import poisson

from parity_proxy.circuit import A1, A2, LO
from parity_proxy.errors import CutoffTooSmallError, ModeIndexError
from parity_proxy.gaussian import moments_from_raw, wigner_at_origin

logger = logging.getLogger(__name__)

DEFAULT_TAIL_TOL = 1e-12

ComplexTensor = npt.NDArray[np.complex128]


class FockVector(NamedTuple):
    """A truncated pure state.

    ``leaked`` is the probability lost to truncation so far, both at preparation
    and through gates; the squared norm is ``1 - leaked`` up to rounding.
    """

    cutoffs: tuple[int, ...]
    amplitudes: ComplexTensor
    tail_tol: float = DEFAULT_TAIL_TOL
    leaked: float = 0.0

    @property
    def num_modes(self) -> int:
        return len(self.cutoffs)

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


class FockMoments(NamedTuple):
    a_mean: complex
    asq_mean: complex
    n_mean: float
    a2dag_a2_mean: float


class WignerParityCheck(NamedTuple):
    """Both sides of W(0,0) = (2/pi) <(-1)^N> for one mode."""

    gaussian_side: float
    fock_side: float
    abs_diff: float


def suggest_cutoff(mean: float, variance: float) -> int:
    """Per-mode cutoff rule: mean + 10 standard deviations + 20."""
    return int(math.ceil(mean + 10 * math.sqrt(max(variance, 0.0)) + 20))


def _geometric_cutoff(ratio: float, tail_tol: float) -> int:
    # smallest n with ratio**n <= tail_tol
    if ratio <= 0:
        return 1
    return int(math.ceil(math.log(tail_tol) / math.log(ratio))) + 1


def _check_cutoff(cutoff: int) -> None:
    if cutoff < 1:
        raise ValueError(f"cutoff must be positive, got {cutoff!r}")


def _check_mode(s: FockVector, mode: int) -> None:
    if not 0 <= mode < s.num_modes:
        raise ModeIndexError(f"mode {mode} out of range for {s.num_modes} modes")


def vacuum_fock(cutoffs: Sequence[int], tail_tol: float = DEFAULT_TAIL_TOL) -> FockVector:
    amplitudes = np.zeros(tuple(cutoffs), dtype=np.complex128)
    amplitudes[(0,) * len(cutoffs)] = 1.0
    return FockVector(tuple(cutoffs), amplitudes, tail_tol)


def tmsv_fock(r: float, cutoff: int, tail_tol: float = DEFAULT_TAIL_TOL) -> FockVector:
    """Two-mode squeezed vacuum sum_n (tanh^n r / cosh r) |n, n>."""
    _check_cutoff(cutoff)
    t = math.tanh(r)
    tail = t ** (2 * cutoff)
    if tail > tail_tol:
        n = math.sinh(r) ** 2
        raise CutoffTooSmallError(
            f"two-mode squeezed vacuum at r={r!r} leaves tail mass {tail:.3e} beyond "
            f"cutoff {cutoff}",
            cutoff=cutoff,
            suggested=max(suggest_cutoff(n, n * (n + 1)), _geometric_cutoff(t * t, tail_tol)),
        )
    amplitudes = np.zeros((cutoff, cutoff), dtype=np.complex128)
    idx = np.arange(cutoff)
    amplitudes[idx, idx] = t**idx / math.cosh(r)
    return FockVector((cutoff, cutoff), amplitudes, tail_tol, tail)


def coherent_fock(
    beta: complex, cutoff: int, tail_tol: float = DEFAULT_TAIL_TOL
) -> FockVector:
    """Coherent state |beta> truncated at ``cutoff``."""
    _check_cutoff(cutoff)
    beta = complex(beta)
    mean = abs(beta) ** 2
    if beta == 0:
        return vacuum_fock((cutoff,), tail_tol)
    tail = float(poisson.sf(cutoff - 1, mean))
    if tail > tail_tol:
        raise CutoffTooSmallError(
            f"coherent state |beta|={abs(beta)!r} leaves tail mass {tail:.3e} beyond "
            f"cutoff {cutoff}",
            cutoff=cutoff,
            suggested=suggest_cutoff(mean, mean),
        )
    n = np.arange(cutoff)
    log_mag = -mean / 2 + n * math.log(abs(beta)) - 0.5 * gammaln(n + 1)
    amplitudes = np.exp(log_mag + 1j * n * np.angle(beta))
    return FockVector((cutoff,), amplitudes.astype(np.complex128), tail_tol, tail)


def smsv_fock(r: float, cutoff: int, tail_tol: float = DEFAULT_TAIL_TOL) -> FockVector:
    """Single-mode squeezed vacuum with real positive <a^2> = cosh r sinh r."""
    _check_cutoff(cutoff)
    t = math.tanh(r)
    pairs = np.arange((cutoff + 1) // 2)
    amplitudes = np.zeros(cutoff, dtype=np.complex128)
    if t == 0:
        amplitudes[0] = 1.0
        return FockVector((cutoff,), amplitudes, tail_tol)
    log_mag = (
        pairs * math.log(t)
        + 0.5 * gammaln(2 * pairs + 1)
        - pairs * math.log(2)
        - gammaln(pairs + 1)
        - 0.5 * math.log(math.cosh(r))
    )
    amplitudes[0::2] = np.exp(log_mag)
    tail = max(0.0, 1.0 - float(np.sum(np.abs(amplitudes) ** 2)))
    if tail > tail_tol:
        n = math.sinh(r) ** 2
        raise CutoffTooSmallError(
            f"squeezed vacuum at r={r!r} leaves tail mass {tail:.3e} beyond cutoff {cutoff}",
            cutoff=cutoff,
            suggested=max(suggest_cutoff(n, 2 * n * (n + 1)), _geometric_cutoff(t, tail_tol)),
        )
    return FockVector((cutoff,), amplitudes, tail_tol, tail)


def product_state(*vectors: FockVector) -> FockVector:
    """Tensor product; modes are concatenated in argument order."""
    if not vectors:
        raise ValueError("product_state needs at least one vector")
    amplitudes = vectors[0].amplitudes
    kept = 1.0 - vectors[0].leaked
    for v in vectors[1:]:
        amplitudes = np.multiply.outer(amplitudes, v.amplitudes)
        kept *= 1.0 - v.leaked
    cutoffs = tuple(c for v in vectors for c in v.cutoffs)
    return FockVector(cutoffs, amplitudes, max(v.tail_tol for v in vectors), 1.0 - kept)


def permute_modes(s: FockVector, order: Sequence[int]) -> FockVector:
    """Reorder modes: new mode ``k`` is old mode ``order[k]``."""
    if sorted(order) != list(range(s.num_modes)):
        raise ModeIndexError(f"{list(order)} is not a permutation of {s.num_modes} modes")
    return s._replace(
        cutoffs=tuple(s.cutoffs[k] for k in order),
        amplitudes=np.transpose(s.amplitudes, tuple(order)),
    )


def _raise_on_sector(v: npt.NDArray[np.complex128], N: int, op: int) -> npt.NDArray[np.complex128]:
    # apply (t a_i^dag + s a_j^dag) for op=0 or (s a_i^dag + t a_j^dag) for op=1 to a
    # sector-N vector v[m] = <m, N-m|psi>
    t, s = 1 / math.sqrt(2), 1j / math.sqrt(2)
    on_i, on_j = (t, s) if op == 0 else (s, t)
    m = np.arange(N + 1)
    w = np.zeros(N + 2, dtype=np.complex128)
    w[1:] += on_i * np.sqrt(m + 1) * v
    w[:-1] += on_j * np.sqrt(N - m + 1) * v
    return w


@functools.lru_cache(maxsize=16)
def _sector_unitaries(ci: int, cj: int) -> tuple[npt.NDArray[np.complex128], ...]:
    """Per total photon number N, columns U|n, N-n> in the sector basis |m, N-m>.

    Columns are generated by the ladder recursion
    U|n_i+1, n_j> = (t a_i^dag + s a_j^dag) U|n_i, n_j> / sqrt(n_i + 1)
    which stays exact where a binomial sum would cancel catastrophically.
    """
    max_sector = ci + cj - 2
    blocks = [np.zeros((N + 1, N + 1), dtype=np.complex128) for N in range(max_sector + 1)]
    column = np.ones(1, dtype=np.complex128)
    for nj in range(cj):
        if nj > 0:
            column = _raise_on_sector(column, nj - 1, 1) / math.sqrt(nj)
        current = column
        blocks[nj][:, 0] = current
        for ni in range(1, ci):
            N = ni + nj
            current = _raise_on_sector(current, N - 1, 0) / math.sqrt(ni)
            blocks[N][:, ni] = current
    for block in blocks:
        block.flags.writeable = False
    return tuple(blocks)


def apply_beamsplitter_fock(
    s: FockVector, i: int, j: int, tail_tol: Optional[float] = None
) -> FockVector:
    """50:50 beam splitter between modes ``i`` and ``j``."""
    _check_mode(s, i)
    _check_mode(s, j)
    if i == j:
        raise ValueError(f"beam splitter needs two distinct modes, got {i} twice")
    budget = s.tail_tol if tail_tol is None else tail_tol
    ci, cj = s.cutoffs[i], s.cutoffs[j]
    psi = np.moveaxis(s.amplitudes, (i, j), (-2, -1))
    out = np.zeros_like(psi)
    lost = 0.0
    photon_sq = 0.0
    photon_mean = 0.0
    for N, block in enumerate(_sector_unitaries(ci, cj)):
        n = np.arange(max(0, N - cj + 1), min(ci - 1, N) + 1)
        x = psi[..., n, N - n]
        y = x @ block[:, n].T
        m = np.arange(N + 1)
        keep = (m < ci) & (N - m < cj)
        out[..., m[keep], N - m[keep]] = y[..., keep]
        lost += float(np.sum(np.abs(y[..., ~keep]) ** 2))
        weight = float(np.sum(np.abs(x) ** 2))
        photon_mean += N * weight
        photon_sq += N * N * weight
    logger.debug("beam splitter (%d, %d) leaked %.3e", i, j, lost)
    if lost > budget:
        raise CutoffTooSmallError(
            f"beam splitter on modes ({i}, {j}) leaked {lost:.3e} > tail_tol {budget:.1e}",
            cutoff=max(ci, cj),
            suggested=suggest_cutoff(photon_mean, photon_sq - photon_mean**2),
        )
    amplitudes = np.moveaxis(out, (-2, -1), (i, j))
    return s._replace(amplitudes=amplitudes, leaked=s.leaked + lost)


def apply_phase_fock(s: FockVector, mode: int, phi: float) -> FockVector:
    _check_mode(s, mode)
    shape = [1] * s.num_modes
    shape[mode] = s.cutoffs[mode]
    phases = np.exp(1j * phi * np.arange(s.cutoffs[mode])).reshape(shape)
    return s._replace(amplitudes=s.amplitudes * phases)


def _marginal(s: FockVector, modes: Sequence[int]) -> npt.NDArray[np.float64]:
    for mode in modes:
        _check_mode(s, mode)
    probs = np.abs(s.amplitudes) ** 2
    others = tuple(k for k in range(s.num_modes) if k not in modes)
    marginal = probs.sum(axis=others)
    # the sum leaves the kept axes in ascending mode order
    ranked = sorted(modes)
    return np.transpose(marginal, tuple(ranked.index(m) for m in modes))


def mode_parity_fock(s: FockVector, mode: int) -> float:
    """<(-1)^{n_mode}> summed over the retained occupations."""
    p = _marginal(s, [mode])
    signs = (-1.0) ** np.arange(s.cutoffs[mode])
    return float(signs @ p)


def mode_moments_fock(s: FockVector, mode: int) -> FockMoments:
    """Exact truncated <a>, <a^2>, <a^dag a> and <a^dag^2 a^2> of one mode."""
    _check_mode(s, mode)
    c = s.cutoffs[mode]
    psi = np.moveaxis(s.amplitudes, mode, 0).reshape(c, -1)
    n = np.arange(c)
    a_mean = np.sum(np.sqrt(n[1:])[:, None] * psi[:-1].conj() * psi[1:])
    asq_mean = np.sum(np.sqrt(n[1:-1] * n[2:])[:, None] * psi[:-2].conj() * psi[2:])
    p = np.sum(np.abs(psi) ** 2, axis=1)
    return FockMoments(
        complex(a_mean),
        complex(asq_mean),
        float(n @ p),
        float((n * (n - 1)) @ p),
    )


def joint_count_distribution(
    s: FockVector, modes: tuple[int, int]
) -> npt.NDArray[np.float64]:
    """P[n_c, n_d] for the pair ``modes = (c, d)``, other modes traced out."""
    c, d = modes
    if c == d:
        raise ValueError(f"joint counts need two distinct modes, got {c} twice")
    return _marginal(s, [c, d])


def wigner_parity_check(s: FockVector, mode: int) -> WignerParityCheck:
    """Compare the Gaussian Wigner value at the origin with the Fock parity sum."""
    fm = mode_moments_fock(s, mode)
    gaussian_side = wigner_at_origin(moments_from_raw(fm.a_mean, fm.asq_mean, fm.n_mean))
    fock_side = 2 / math.pi * mode_parity_fock(s, mode)
    return WignerParityCheck(gaussian_side, fock_side, abs(gaussian_side - fock_side))


def mzi_fock(
    phi: float, r: float, cutoff: int, tail_tol: float = DEFAULT_TAIL_TOL
) -> FockVector:
    """Squeezed-vacuum MZI on modes [a_1, a_2]; a_2 is the lower output a_f."""
    s = tmsv_fock(r, cutoff, tail_tol)
    s = apply_beamsplitter_fock(s, 0, 1)
    s = apply_phase_fock(s, 0, phi)
    return apply_beamsplitter_fock(s, 0, 1)


def proxy_circuit_fock(
    phi: float,
    theta: float,
    r: float,
    beta_mag: float,
    cutoff: int,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> FockVector:
    """Full proxy chain on [a_1, b, a_2]; ``d`` ends in the b slot, ``c`` in a_2."""
    s = product_state(tmsv_fock(r, cutoff, tail_tol), coherent_fock(beta_mag, cutoff, tail_tol))
    s = permute_modes(s, (0, 2, 1))
    s = apply_beamsplitter_fock(s, A1, A2)
    s = apply_phase_fock(s, A1, phi)
    s = apply_phase_fock(s, LO, theta)
    s = apply_beamsplitter_fock(s, A1, A2)
    return apply_beamsplitter_fock(s, LO, A2)
