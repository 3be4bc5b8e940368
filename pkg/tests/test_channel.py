import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbgrand_ai.channel import (
    GaussMarkovChannel,
    block_covariance,
    block_entropy_rate,
    demap_bpsk,
    ebno_to_sigma,
    entropy_rate,
    gm_noise,
    modulate_bpsk,
    transmit,
)


def logdet_entropy(n, sigma2, rho):
    idx = np.arange(n)
    C = sigma2 * rho ** np.abs(idx[:, None] - idx[None, :])
    sign, logdet = np.linalg.slogdet(C)
    assert sign > 0
    return (n / 2 * math.log(2 * math.pi * math.e) + 0.5 * logdet) / n


def test_bpsk_convention(rng):
    assert np.array_equal(modulate_bpsk(np.zeros(5, np.uint8)), np.ones(5))
    assert np.array_equal(modulate_bpsk([0, 1]), [1, -1])
    c = rng.integers(0, 2, 128).astype(np.uint8)
    x = modulate_bpsk(c)
    assert x.shape == (128,)
    assert np.array_equal(demap_bpsk(x), c)


def test_ebno_to_sigma():
    assert ebno_to_sigma(0.0, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert ebno_to_sigma(math.inf, 0.5) == 0.0
    rate = 116 / 128
    assert ebno_to_sigma(3.7, rate) == pytest.approx(0.5 / (rate * 10 ** 0.37), rel=1e-14)
    with pytest.raises(ValueError):
        ebno_to_sigma(3.0, 0.0)


def test_channel_validation():
    with pytest.raises(ValueError):
        GaussMarkovChannel(1.0, 1.0)
    with pytest.raises(ValueError):
        GaussMarkovChannel(-0.1, 1.0)
    ch = GaussMarkovChannel.from_ebno(0.5, 0.0, 0.5)
    assert ch.sigma2 == pytest.approx(1.0)


def test_white_noise_has_no_lag_correlation():
    z = gm_noise(10**5, GaussMarkovChannel(0.0, 2.0), np.random.default_rng(1))
    r1 = np.mean(z.real[1:] * z.real[:-1]) / np.var(z.real)
    assert abs(r1) < 4 / math.sqrt(10**5)


def test_ar1_autocovariance_within_four_standard_errors():
    # 10^4 independent rows of 100 samples; lag products averaged per row.
    sigma2, rho = 1.7, 0.5
    z = gm_noise(100, GaussMarkovChannel(rho, sigma2), np.random.default_rng(7), size=10**4)
    for comp in (z.real, z.imag):
        for lag in range(5):
            prods = (comp[:, lag:] * comp[:, : comp.shape[1] - lag]).mean(axis=1)
            se = prods.std(ddof=1) / math.sqrt(len(prods))
            assert abs(prods.mean() - sigma2 * rho**lag) < 4 * se


def test_ar1_lag_correlations_million_samples():
    z = gm_noise(10**6, GaussMarkovChannel(0.5, 1.0), np.random.default_rng(11)).real
    var = np.mean(z * z)
    for lag, expect in [(1, 0.5), (2, 0.25), (3, 0.125)]:
        assert abs(np.mean(z[lag:] * z[:-lag]) / var - expect) < 0.01
    assert abs(var - 1.0) < 0.01


def test_real_and_imaginary_parts_independent():
    z = gm_noise(10**5, GaussMarkovChannel(0.8, 1.0), np.random.default_rng(3))
    assert abs(np.corrcoef(z.real, z.imag)[0, 1]) < 0.05


def test_first_sample_has_stationary_variance():
    z = gm_noise(4, GaussMarkovChannel(0.9, 3.0), np.random.default_rng(5), size=2 * 10**5)
    var0 = np.var(z.real[:, 0])
    assert abs(var0 / 3.0 - 1) < 0.02


def test_transmit_noiseless_and_deterministic(rng):
    x = modulate_bpsk(rng.integers(0, 2, 64))
    assert np.array_equal(transmit(x, GaussMarkovChannel(0.5, 0.0), rng), x)
    ch = GaussMarkovChannel(0.5, 0.3)
    a = transmit(x, ch, np.random.default_rng(9))
    b = transmit(x, ch, np.random.default_rng(9))
    assert np.array_equal(a, b)


def test_transmit_mean_is_signal():
    x = modulate_bpsk(np.array([0, 1, 1, 0, 1, 0, 0, 0]))
    ch = GaussMarkovChannel(0.6, 0.5)
    trials = 20000
    y = transmit(np.tile(x, (trials, 1)), ch, np.random.default_rng(2))
    tol = 4 * math.sqrt(0.5) / math.sqrt(trials)
    assert np.all(np.abs(y.real.mean(axis=0) - x.real) < tol)
    assert np.all(np.abs(y.imag.mean(axis=0)) < tol)


def test_block_covariance_scalar():
    cov = block_covariance(1, GaussMarkovChannel(0.7, 2.5))
    assert cov.matrix.tolist() == [[2.5]]
    assert cov.precision[0, 0] == pytest.approx(1 / 2.5, rel=1e-15)


def test_block_covariance_two_by_two_determinant():
    cov = block_covariance(2, GaussMarkovChannel(0.5, 1.0))
    assert math.exp(cov.log_det) == pytest.approx(0.75, rel=1e-12)


@pytest.mark.parametrize("b", range(1, 9))
@pytest.mark.parametrize("rho", [0.0, 0.3, 0.9])
def test_block_covariance_entries_exact(b, rho):
    sigma2 = 1.3
    cov = block_covariance(b, GaussMarkovChannel(rho, sigma2))
    for i in range(b):
        for j in range(b):
            assert cov.matrix[i, j] == sigma2 * rho ** abs(i - j)
    assert np.allclose(cov.matrix @ cov.precision, np.eye(b), rtol=0, atol=1e-10)
    assert cov.log_det == pytest.approx(np.linalg.slogdet(cov.matrix)[1], rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("b", [2, 3, 5, 8])
def test_ar1_precision_is_tridiagonal_closed_form(b):
    rho, sigma2 = 0.6, 0.8
    expect = np.diag(np.r_[1.0, np.full(b - 2, 1 + rho**2), 1.0][:b]) if b > 1 else np.eye(1)
    expect -= rho * (np.eye(b, k=1) + np.eye(b, k=-1))
    expect /= sigma2 * (1 - rho**2)
    cov = block_covariance(b, GaussMarkovChannel(rho, sigma2))
    assert np.allclose(cov.precision, expect, rtol=1e-12, atol=1e-12)


def test_block_covariance_rejects_empty_block():
    with pytest.raises(ValueError):
        block_covariance(0, GaussMarkovChannel(0.5, 1.0))


def test_entropy_interleaved_channel_has_no_correlation_term():
    ch = GaussMarkovChannel(0.0, 2.0)
    expect = 0.5 * math.log(2 * math.e * math.pi) + 0.5 * math.log(2.0)
    assert entropy_rate(128, ch) == expect


def test_entropy_single_sample_ignores_rho():
    assert entropy_rate(1, GaussMarkovChannel(0.9, 1.0)) == entropy_rate(1, GaussMarkovChannel(0.0, 1.0))


@pytest.mark.parametrize("n,sigma2,rho", [(2, 1.0, 0.5), (17, 0.3, 0.9), (64, 7.0, 0.25)])
def test_entropy_matches_logdet(n, sigma2, rho):
    assert entropy_rate(n, GaussMarkovChannel(rho, sigma2)) == pytest.approx(logdet_entropy(n, sigma2, rho), abs=1e-9)


def test_block_entropy_b2_is_half_of_asymptotic_reduction():
    ch = GaussMarkovChannel(0.5, 1.0)
    base = block_entropy_rate(1, ch)
    assert base == entropy_rate(1, ch)
    full_reduction = 0.5 * math.log(1 - 0.25)
    assert block_entropy_rate(2, ch) - base == pytest.approx(0.5 * full_reduction, rel=1e-12)


def test_block_entropy_converges_to_entropy_rate():
    ch = GaussMarkovChannel(0.7, 1.0)
    assert block_entropy_rate(128, ch) == entropy_rate(128, ch)


def test_entropy_singular_rho_rejected():
    with pytest.raises(ValueError):
        entropy_rate(4, GaussMarkovChannel(1.0, 1.0))


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(2, 500),
    sigma2=st.floats(0.01, 100),
    r1=st.floats(0, 0.99),
    r2=st.floats(0, 0.99),
)
def test_entropy_nonincreasing_in_rho(n, sigma2, r1, r2):
    lo, hi = sorted((r1, r2))
    assert entropy_rate(n, GaussMarkovChannel(hi, sigma2)) <= entropy_rate(n, GaussMarkovChannel(lo, sigma2))


@settings(max_examples=60, deadline=None)
@given(n=st.integers(3, 500), data=st.data(), rho=st.floats(0.01, 0.99))
def test_block_approximation_concedes_entropy(n, data, rho):
    b = data.draw(st.integers(1, n - 1))
    ch = GaussMarkovChannel(rho, 1.0)
    assert block_entropy_rate(b, ch) > entropy_rate(n, ch)
