"""BPSK mapping, complex Gauss-Markov (AR(1)) noise, Eb/N0 calibration,
block covariances and Gauss-Markov differential entropy rates.

Conventions:

* BPSK maps bit 0 to +1 and bit 1 to -1 on the real axis (unit symbol energy).
* ``sigma2`` is the noise variance per real dimension. It is derived from
  Eb/N0 as ``1 / (2 * rate * m_s * 10**(ebno_db / 10))``.
* Entropies are in nats, per real noise component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, signal

from .validation import check_bits, check_positive, check_rho

MAX_RHO = 0.999


@dataclass(frozen=True)
class GaussMarkovChannel:
    """Additive complex Gauss-Markov noise: each real component is a
    stationary AR(1) process with covariance ``sigma2 * rho**|i - j|``."""

    rho: float
    sigma2: float

    def __post_init__(self):
        object.__setattr__(self, "rho", check_rho(self.rho))
        sigma2 = float(self.sigma2)
        if not sigma2 >= 0 or math.isnan(sigma2):
            raise ValueError(f"sigma2 must be nonnegative, got {sigma2}")
        object.__setattr__(self, "sigma2", sigma2)

    @classmethod
    def from_ebno(cls, rho: float, ebno_db: float, rate: float, m_s: int = 1) -> "GaussMarkovChannel":
        return cls(rho, ebno_to_sigma(ebno_db, rate, m_s))


def modulate_bpsk(c) -> np.ndarray:
    """Bits to complex BPSK symbols: 0 -> +1, 1 -> -1."""
    c = check_bits(c, name="codeword", allow_batch=True)
    return (1.0 - 2.0 * c).astype(np.complex128)


def demap_bpsk(x) -> np.ndarray:
    """Hard decision on the real axis (negative -> bit 1)."""
    return (np.real(x) < 0).astype(np.uint8)


def ebno_to_sigma(ebno_db: float, rate: float, m_s: int = 1) -> float:
    """Per-real-dimension noise variance for a given Eb/N0 in dB."""
    rate = float(rate)
    if not 0 < rate <= 1:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    if m_s < 1:
        raise ValueError(f"bits per symbol must be >= 1, got {m_s}")
    ebno_db = float(ebno_db)
    if math.isnan(ebno_db) or ebno_db == -math.inf:
        raise ValueError(f"invalid Eb/N0 {ebno_db}")
    return 1.0 / (2.0 * rate * m_s * 10.0 ** (ebno_db / 10.0))


def ar1_process(white: np.ndarray, rho: float) -> np.ndarray:
    """Filter unit-scale white noise along the last axis into a stationary
    AR(1) sequence ``N_t = rho N_{t-1} + sqrt(1 - rho^2) W_t`` with
    ``N_1 = W_1``."""
    white = np.array(white, dtype=np.float64)
    if rho == 0.0:
        return white
    gain = math.sqrt(1.0 - rho * rho)
    white[..., 0] /= gain
    return signal.lfilter([gain], [1.0, -rho], white, axis=-1)


def gm_noise(n_s: int, channel: GaussMarkovChannel, rng: np.random.Generator, size=()) -> np.ndarray:
    """Complex Gauss-Markov noise of shape ``(*size, n_s)``.

    Real and imaginary parts are independent AR(1) processes with common
    ``rho``; the real draws come first in the generator stream.
    """
    if n_s < 1:
        raise ValueError("n_s must be >= 1")
    size = (size,) if np.isscalar(size) else tuple(size)
    white = rng.standard_normal((2, *size, n_s))
    noise = ar1_process(white, channel.rho) * math.sqrt(channel.sigma2)
    return noise[0] + 1j * noise[1]


def transmit(x, channel: GaussMarkovChannel, rng: np.random.Generator) -> np.ndarray:
    """``Y = x + N`` with identity channel matrix."""
    x = np.asarray(x, dtype=np.complex128)
    return x + gm_noise(x.shape[-1], channel, rng, size=x.shape[:-1])


@dataclass(frozen=True, eq=False)
class BlockCovariance:
    b: int
    matrix: np.ndarray
    precision: np.ndarray
    log_det: float


def block_covariance(b: int, channel: GaussMarkovChannel) -> BlockCovariance:
    """Toeplitz ``b x b`` covariance of one noise component, with its inverse
    and log-determinant from a Cholesky factorization."""
    if b < 1:
        raise ValueError(f"block size must be >= 1, got {b}")
    check_positive(channel.sigma2, "sigma2")
    C = linalg.toeplitz([channel.sigma2 * channel.rho**lag for lag in range(b)])
    factor = linalg.cho_factor(C, lower=True)
    precision = linalg.cho_solve(factor, np.eye(b))
    precision = 0.5 * (precision + precision.T)
    log_det = 2.0 * float(np.sum(np.log(np.diag(factor[0]))))
    for a in (C, precision):
        a.setflags(write=False)
    return BlockCovariance(b, C, precision, log_det)


def _entropy(multiplier: float, channel: GaussMarkovChannel) -> float:
    if channel.rho >= 1.0:
        raise ValueError("rho = 1 gives a singular covariance")
    sigma2 = check_positive(channel.sigma2, "sigma2")
    corr = 0.0 if multiplier == 0.0 else 0.5 * multiplier * math.log1p(-channel.rho**2)
    return 0.5 * math.log(2 * math.e * math.pi) + 0.5 * math.log(sigma2) + corr


def entropy_rate(n: int, channel: GaussMarkovChannel) -> float:
    """Normalized differential entropy rate (nats/symbol) of ``n`` samples of
    one Gauss-Markov noise component."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _entropy(1.0 - 1.0 / n, channel)


def block_entropy_rate(b: int, channel: GaussMarkovChannel) -> float:
    """Entropy rate when the noise is independent across blocks of ``b``
    samples; the correlation term carries ``(1 - 1/b)`` instead of
    ``(1 - 1/n)``."""
    if b < 1:
        raise ValueError("b must be >= 1")
    return _entropy(1.0 - 1.0 / b, channel)
