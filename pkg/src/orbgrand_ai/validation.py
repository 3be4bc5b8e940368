"""Input validation helpers shared by the estimators and functional API."""

from __future__ import annotations

import numbers

import numpy as np


def check_bits(x, length: int | None = None, name: str = "bits", allow_batch: bool = False) -> np.ndarray:
    """Coerce to a ``uint8`` 0/1 array, checking the trailing dimension."""
    arr = np.asarray(x)
    if arr.ndim == 0 or arr.ndim > (2 if allow_batch else 1):
        raise ValueError(f"{name} must be {'1-D or 2-D' if allow_batch else '1-D'}, got shape {arr.shape}")
    if arr.dtype.kind not in "biu":
        raise TypeError(f"{name} must be an integer or boolean array, got {arr.dtype}")
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError(f"{name} must contain only 0 and 1")
    if length is not None and arr.shape[-1] != length:
        raise ValueError(f"{name} has length {arr.shape[-1]}, expected {length}")
    return arr.astype(np.uint8, copy=False)


def check_signal(y, length: int | None = None, name: str = "received signal") -> np.ndarray:
    """Coerce a received signal (real or complex) to a 1-D or 2-D array.

    Only the in-phase (real) component carries BPSK information, so callers
    generally take ``.real`` of the result.
    """
    arr = np.asarray(y)
    if arr.ndim not in (1, 2):
        raise ValueError(f"{name} must be 1-D or 2-D, got shape {arr.shape}")
    if arr.dtype.kind not in "biufc":
        raise TypeError(f"{name} must be numeric, got {arr.dtype}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or inf")
    if length is not None and arr.shape[-1] != length:
        raise ValueError(f"{name} has length {arr.shape[-1]}, expected {length}")
    return arr


def check_block_size(b, n_s: int) -> int:
    if not isinstance(b, numbers.Integral) or b < 1:
        raise ValueError(f"block size must be a positive integer, got {b!r}")
    if n_s % b:
        raise ValueError(f"block size {b} does not divide {n_s} symbols")
    return int(b)


def check_rho(rho, cap: float = 1.0) -> float:
    rho = float(rho)
    if not (0.0 <= rho < 1.0) or rho > cap:
        raise ValueError(f"rho must lie in [0, {min(cap, 1.0)}{']' if cap < 1 else ')'}, got {rho}")
    return rho


def check_positive(value, name: str) -> float:
    value = float(value)
    if not value > 0 or not np.isfinite(value):
        raise ValueError(f"{name} must be positive and finite, got {value}")
    return value
