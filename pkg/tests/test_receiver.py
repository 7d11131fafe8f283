import numpy as np
import pytest
from numpy.testing import assert_allclose

from mimolink.receiver import (
    interference_plus_noise_covariance,
    linear_receive,
    mmse_estimate,
    zf_estimate,
)


def random_channel(n_r, n_t, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n_r, n_t)) + 1j * rng.standard_normal((n_r, n_t))


def test_zf_recovers_noiseless_transmission():
    h = random_channel(4, 2, 0)
    x = np.array([1.0 + 1.0j, -1.0 + 0.5j]) / np.sqrt(2)
    assert_allclose(zf_estimate(h @ x, h), x, rtol=1e-10)


def test_zf_rejects_rank_deficient():
    h = np.ones((3, 2), dtype=np.complex128)  # identical columns
    with pytest.raises(ValueError, match="rank deficient"):
        zf_estimate(np.ones(3), h)


def test_mmse_matches_direct_formula():
    h = random_channel(3, 2, 1)
    hi = random_channel(3, 2, 2)
    y = random_channel(3, 1, 3).ravel()
    r = interference_plus_noise_covariance(hi, 3)
    got = mmse_estimate(y, h, r)
    rinv = np.linalg.inv(r)
    expected = np.linalg.inv(h.conj().T @ rinv @ h + np.eye(2)) @ h.conj().T @ rinv @ y
    assert_allclose(got, expected, rtol=1e-11)


def test_mmse_shrinks_toward_zero_at_low_snr():
    # with a tiny channel the regularized estimate collapses to zero
    h = 1e-6 * random_channel(2, 2, 4)
    y = np.array([1.0 + 1j, 2.0 - 1j])
    est = mmse_estimate(y, h, np.eye(2, dtype=np.complex128))
    assert np.abs(est).max() < 1e-5


def test_mmse_approaches_zf_at_high_snr():
    h = 1e4 * random_channel(2, 2, 5)
    x = np.array([1.0 + 0.0j, -1.0j]) / np.sqrt(2)
    y = h @ x
    zf = zf_estimate(y, h)
    mmse = mmse_estimate(y, h, np.eye(2, dtype=np.complex128))
    assert_allclose(mmse, zf, rtol=1e-6)


def test_mmse_whitening_outperforms_white_assumption():
    # strong rank-one interference: the interference-aware filter nulls it
    rng = np.random.default_rng(6)
    h = random_channel(4, 2, 7)
    hi = 10.0 * random_channel(4, 1, 8)
    x = np.array([1.0 + 1.0j, -1.0 - 1.0j]) / np.sqrt(2)
    si = rng.standard_normal(1) + 1j * rng.standard_normal(1)
    y = h @ x + (hi @ si).ravel()
    r = interference_plus_noise_covariance(hi, 4)
    aware = mmse_estimate(y, h, r)
    blind = mmse_estimate(y, h, np.eye(4, dtype=np.complex128))
    assert np.linalg.norm(aware - x) < np.linalg.norm(blind - x)


def test_linear_receive_kinds_and_validation():
    h = random_channel(3, 2, 9)
    y = np.ones(3, dtype=np.complex128)
    assert_allclose(linear_receive(y, h, None, kind="zf"), zf_estimate(y, h))
    assert_allclose(
        linear_receive(y, h, None, kind="MMSE"),
        mmse_estimate(y, h, np.eye(3, dtype=np.complex128)),
    )
    with pytest.raises(ValueError, match="kind"):
        linear_receive(y, h, None, kind="ml")
    with pytest.raises(ValueError, match="does not match"):
        linear_receive(np.ones(2), h, None)
    with pytest.raises(ValueError, match="dimension"):
        linear_receive(y, h, np.eye(2))


def test_covariance_identity_without_interferers():
    assert_allclose(
        interference_plus_noise_covariance(None, 3), np.eye(3), rtol=0, atol=0
    )
    empty = np.zeros((3, 0), dtype=np.complex128)
    assert_allclose(
        interference_plus_noise_covariance(empty, 3), np.eye(3), rtol=0, atol=0
    )


def test_covariance_accumulates_outer_products():
    hi = random_channel(3, 2, 10)
    r = interference_plus_noise_covariance(hi, 3)
    assert_allclose(r, np.eye(3) + hi @ hi.conj().T, rtol=1e-14)
    # Hermitian PSD by construction
    assert_allclose(r, r.conj().T, rtol=1e-14)
    assert np.linalg.eigvalsh(r)[0] >= 1.0 - 1e-12
