import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from parity_proxy.circuit import A2, LO, ProxyGeometry, signal_moments
from parity_proxy.errors import CutoffTooSmallError, ModeIndexError
from parity_proxy.fock import (
    FockVector,
    apply_beamsplitter_fock,
    apply_phase_fock,
    coherent_fock,
    joint_count_distribution,
    mode_moments_fock,
    mode_parity_fock,
    mzi_fock,
    permute_modes,
    product_state,
    proxy_circuit_fock,
    smsv_fock,
    suggest_cutoff,
    tmsv_fock,
    vacuum_fock,
    wigner_parity_check,
)
from parity_proxy.gaussian import parity_expectation
from parity_proxy.homodyne import x_closed_form

ORACLE_TAIL_TOL = 1e-6


def _number_state(occupations: tuple[int, ...], cutoffs: tuple[int, ...]) -> FockVector:
    s = vacuum_fock(cutoffs)
    amplitudes = np.zeros(cutoffs, dtype=np.complex128)
    amplitudes[occupations] = 1.0
    return s._replace(amplitudes=amplitudes)


def test_vacuum() -> None:
    s = vacuum_fock((4, 3))
    assert s.num_modes == 2
    assert s.norm_squared == 1.0
    assert mode_parity_fock(s, 1) == 1.0


@pytest.mark.parametrize("r", [0.2, 0.5, 0.8])
def test_tmsv_intensity(r: float) -> None:
    s = tmsv_fock(r, 40)
    for mode in (0, 1):
        assert mode_moments_fock(s, mode).n_mean == pytest.approx(math.sinh(r) ** 2, abs=1e-10)
    assert s.norm_squared == pytest.approx(1.0 - s.leaked, abs=1e-14)


def test_tmsv_without_gain_is_vacuum() -> None:
    s = tmsv_fock(0.0, 10)
    assert s.amplitudes[0, 0] == 1.0
    assert s.norm_squared == 1.0
    assert s.leaked == 0.0


def test_tmsv_counts_are_perfectly_correlated() -> None:
    p = joint_count_distribution(tmsv_fock(0.6, 30), (0, 1))
    assert_allclose(p - np.diag(np.diag(p)), 0.0, atol=1e-15)
    assert np.sum(p) == pytest.approx(1.0, abs=1e-12)


def test_tmsv_cutoff_too_small() -> None:
    with pytest.raises(CutoffTooSmallError) as info:
        tmsv_fock(1.5, 12)
    assert info.value.cutoff == 12
    assert info.value.suggested > 12
    assert f"try cutoff >= {info.value.suggested}" in str(info.value)


def test_coherent_state_moments() -> None:
    s = coherent_fock(2.0, 60)
    fm = mode_moments_fock(s, 0)
    assert fm.n_mean == pytest.approx(4.0, abs=1e-10)
    assert fm.a_mean == pytest.approx(2.0, abs=1e-10)
    assert fm.a2dag_a2_mean == pytest.approx(16.0, abs=1e-9)


def test_coherent_parity() -> None:
    assert mode_parity_fock(coherent_fock(1.0, 40), 0) == pytest.approx(math.exp(-2))


def test_coherent_phase() -> None:
    beta = 0.5 + 0.5j
    fm = mode_moments_fock(coherent_fock(beta, 30), 0)
    assert fm.a_mean == pytest.approx(beta, abs=1e-12)
    assert fm.asq_mean == pytest.approx(beta**2, abs=1e-12)
    assert fm.n_mean == pytest.approx(abs(beta) ** 2, abs=1e-12)


def test_coherent_zero_is_vacuum() -> None:
    s = coherent_fock(0.0, 5)
    assert s.amplitudes[0] == 1.0
    assert s.norm_squared == 1.0


def test_coherent_cutoff_too_small() -> None:
    with pytest.raises(CutoffTooSmallError) as info:
        coherent_fock(2.0, 5)
    assert info.value.suggested == suggest_cutoff(4.0, 4.0)


def test_smsv_moments() -> None:
    r = 0.6
    fm = mode_moments_fock(smsv_fock(r, 60), 0)
    assert fm.n_mean == pytest.approx(math.sinh(r) ** 2, abs=1e-10)
    assert fm.asq_mean == pytest.approx(math.cosh(r) * math.sinh(r), abs=1e-10)
    assert fm.a_mean == 0


def test_beam_splitter_single_photon() -> None:
    out = apply_beamsplitter_fock(_number_state((1, 0), (3, 3)), 0, 1)
    t = 1 / math.sqrt(2)
    assert out.amplitudes[1, 0] == pytest.approx(t)
    assert out.amplitudes[0, 1] == pytest.approx(1j * t)
    assert out.norm_squared == pytest.approx(1.0)


def test_hong_ou_mandel_dip() -> None:
    out = apply_beamsplitter_fock(_number_state((1, 1), (3, 3)), 0, 1)
    p = joint_count_distribution(out, (0, 1))
    assert p[1, 1] == pytest.approx(0.0, abs=1e-15)
    assert p[2, 0] == pytest.approx(0.5)
    assert p[0, 2] == pytest.approx(0.5)
    assert out.leaked == pytest.approx(0.0, abs=1e-15)


def test_beam_splitter_leakage_raises() -> None:
    with pytest.raises(CutoffTooSmallError) as info:
        apply_beamsplitter_fock(_number_state((1, 1), (2, 2)), 0, 1)
    assert info.value.cutoff == 2
    assert info.value.suggested == suggest_cutoff(2.0, 0.0)


def test_beam_splitter_leakage_is_recorded() -> None:
    out = apply_beamsplitter_fock(_number_state((1, 1), (2, 2)), 0, 1, tail_tol=1.5)
    assert out.leaked == pytest.approx(1.0)
    assert out.norm_squared == pytest.approx(0.0, abs=1e-15)


def test_beam_splitter_bad_modes() -> None:
    s = vacuum_fock((3, 3))
    with pytest.raises(ModeIndexError):
        apply_beamsplitter_fock(s, 0, 2)
    with pytest.raises(ValueError):
        apply_beamsplitter_fock(s, 1, 1)


def test_tmsv_splits_into_independent_squeezed_modes() -> None:
    s = apply_beamsplitter_fock(tmsv_fock(0.5, 40), 0, 1)
    for mode in (0, 1):
        assert mode_parity_fock(s, mode) == pytest.approx(1.0, abs=1e-10)
    p = joint_count_distribution(s, (0, 1))
    n = np.arange(40)
    mean_0 = n @ p.sum(axis=1)
    mean_1 = n @ p.sum(axis=0)
    assert n @ p @ n - mean_0 * mean_1 == pytest.approx(0.0, abs=1e-10)


def test_phase_shift() -> None:
    s = vacuum_fock((4,))
    assert_allclose(apply_phase_fock(s, 0, 1.3).amplitudes, s.amplitudes)
    one = apply_phase_fock(_number_state((0, 2), (3, 3)), 1, 0.4)
    assert one.amplitudes[0, 2] == pytest.approx(np.exp(0.8j))


def test_product_and_permutation() -> None:
    s = product_state(coherent_fock(1.0, 20), vacuum_fock((5,)))
    assert s.cutoffs == (20, 5)
    swapped = permute_modes(s, (1, 0))
    assert swapped.cutoffs == (5, 20)
    assert mode_moments_fock(swapped, 1).n_mean == pytest.approx(1.0, abs=1e-12)
    assert mode_moments_fock(swapped, 0).n_mean == 0.0
    with pytest.raises(ModeIndexError):
        permute_modes(s, (0, 0))


def test_joint_counts_transpose_with_mode_order() -> None:
    s = product_state(coherent_fock(1.0, 20), vacuum_fock((5,)))
    assert_allclose(joint_count_distribution(s, (1, 0)), joint_count_distribution(s, (0, 1)).T)


def test_joint_counts_give_intensity_correlation() -> None:
    r, phi, theta, beta = 0.3, 1.1, 0.4, 2.0
    s = proxy_circuit_fock(phi, theta, r, beta, 60, ORACLE_TAIL_TOL)
    p = joint_count_distribution(s, (A2, LO))
    n = np.arange(60)
    assert n @ p @ n == pytest.approx(x_closed_form(theta, beta, phi, r) / 4, abs=1e-8)


@pytest.mark.parametrize(
    "state",
    [
        coherent_fock(0.7 - 0.2j, 30),
        smsv_fock(0.4, 60),
        vacuum_fock((6,)),
    ],
)
def test_wigner_parity_identity_single_mode(state: FockVector) -> None:
    check = wigner_parity_check(state, 0)
    assert check.abs_diff <= 1e-10
    assert check.fock_side == pytest.approx(check.gaussian_side, abs=1e-10)


def test_wigner_parity_identity_reduced_tmsv() -> None:
    assert wigner_parity_check(tmsv_fock(0.5, 40), 1).abs_diff <= 1e-10


@pytest.mark.parametrize("r", [0.1, 0.5, 0.8])
@pytest.mark.parametrize("phi", [0.0, 0.6, math.pi / 2, 2.5])
def test_oracle_matches_gaussian_parity(r: float, phi: float) -> None:
    s = mzi_fock(phi, r, 40, ORACLE_TAIL_TOL)
    expected = parity_expectation(signal_moments(ProxyGeometry(phi, r)))
    assert mode_parity_fock(s, 1) == pytest.approx(expected, abs=1e-6)


def test_oracle_intensity_is_phase_independent() -> None:
    r = 0.5
    for phi in (0.0, 1.0, 2.0):
        s = mzi_fock(phi, r, 40, ORACLE_TAIL_TOL)
        assert mode_moments_fock(s, 1).n_mean == pytest.approx(math.sinh(r) ** 2, abs=1e-8)


@pytest.mark.parametrize("phi", [0.3, 1.2, 2.8])
def test_oracle_second_moment_matches_moment_path(phi: float) -> None:
    r = 0.5
    fm = mode_moments_fock(mzi_fock(phi, r, 40, ORACLE_TAIL_TOL), 1)
    expected = math.cosh(r) * math.sinh(r) * np.exp(-1j * phi) * math.sin(phi)
    assert fm.asq_mean.conjugate() == pytest.approx(expected, abs=1e-8)
    assert fm.a_mean == pytest.approx(0.0, abs=1e-12)
