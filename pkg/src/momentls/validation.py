"""Input validation helpers shared across estimators and core routines."""

from __future__ import annotations

import numpy as np

__all__ = ["as_chain", "as_autocov", "check_open_unit"]


def as_chain(x, min_length: int = 2) -> np.ndarray:
    """Coerce ``x`` to a 1-D float array of chain output values.

    Accepts any array-like of shape ``(M,)`` or ``(M, 1)``. Raises
    ``ValueError`` if the chain is shorter than ``min_length`` or contains
    non-finite entries.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 2 and x.shape[1] == 1:
        x = x[:, 0]
    if x.ndim != 1:
        raise ValueError(f"chain must be one-dimensional, got shape {x.shape}")
    if x.size < min_length:
        raise ValueError(f"chain too short: need at least {min_length} values, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("chain contains non-finite values")
    return x


def as_autocov(r, require_peak_at_zero: bool = True) -> np.ndarray:
    """Coerce ``r`` to a valid nonnegative-lag autocovariance array.

    The array stores lags ``0..K-1``; the sequence is implicitly even in the
    lag and zero beyond ``K-1``. When ``require_peak_at_zero`` is set the
    values must satisfy ``r[0] >= 0`` and ``r[0] >= |r[k]|`` for every lag.
    """
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or r.size < 1:
        raise ValueError("autocovariance must be a non-empty 1-D array")
    if not np.all(np.isfinite(r)):
        raise ValueError("autocovariance contains non-finite values")
    if require_peak_at_zero:
        if r[0] < 0:
            raise ValueError(f"autocovariance at lag 0 must be nonnegative, got {r[0]}")
        bad = np.abs(r) > r[0]
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            raise ValueError(
                f"|r({k})| = {abs(r[k])} exceeds r(0) = {r[0]}; "
                "input must peak at lag 0"
            )
    return r


def check_open_unit(alpha, name: str = "alpha") -> np.ndarray:
    """Validate that all entries of ``alpha`` lie strictly inside (-1, 1)."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any(np.abs(alpha) >= 1.0):
        raise ValueError(f"{name} must lie strictly inside (-1, 1)")
    return alpha
