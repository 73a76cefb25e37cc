"""Autocovariance sequences, Fourier-grid transforms, and kernel primitives.

Sequences are stored on nonnegative lags only: an array ``r`` of length ``K``
represents the even sequence with ``r(k) = r(-k) = r[|k|]`` and ``r(k) = 0``
for ``|k| >= K``. All transforms here are exact evaluations of the cosine
series of that even extension.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import next_fast_len

from .validation import as_chain, as_autocov, check_open_unit

__all__ = [
    "empirical_autocov",
    "dtft_on_grid",
    "cosine_transform",
    "poisson_kernel",
    "exp_inner",
    "x_alpha_l1",
]

# magnitude above which a residual imaginary FFT component indicates a bug
_IMAG_TOL = 1e-9


def empirical_autocov(chain, max_lag: int | None = None) -> np.ndarray:
    """Empirical autocovariance of a chain, with divisor M at every lag.

    Parameters
    ----------
    chain : array_like, shape (M,)
        Observed output values. Must contain at least two finite entries.
    max_lag : int, optional
        Number of lags to return (``0 .. max_lag-1``). Defaults to ``M``,
        the full sequence.

    Returns
    -------
    numpy.ndarray, shape (max_lag,)
        ``r[k] = (1/M) * sum_t (x_t - mean)(x_{t+k} - mean)``. The divisor
        is ``M`` for every lag, not ``M - k``, which guarantees the result
        peaks at lag 0.
    """
    x = as_chain(chain)
    m = x.size
    if max_lag is None:
        max_lag = m
    max_lag = int(max_lag)
    if not 1 <= max_lag <= m:
        raise ValueError(f"max_lag must be in [1, {m}], got {max_lag}")

    xc = x - x.mean()
    # Wiener-Khinchin: correlate via FFT with enough zero padding to avoid
    # circular wrap-around.
    nfft = next_fast_len(2 * m)
    f = np.fft.rfft(xc, nfft)
    acf = np.fft.irfft(f * np.conj(f), nfft)[:max_lag]
    return acf / m


def dtft_on_grid(r, m0: int) -> np.ndarray:
    """Transform of an even sequence on the Fourier frequencies ``2*pi*j/m0``.

    Parameters
    ----------
    r : array_like, shape (K,)
        Nonnegative-lag values of an even, finitely supported sequence.
    m0 : int
        Grid size; must satisfy ``m0 >= 2*K`` so the symmetric extension of
        ``r`` embeds into one period without overlap.

    Returns
    -------
    numpy.ndarray, shape (m0,)
        ``values[j] = r[0] + 2 * sum_k r[k] * cos(k * 2*pi*j/m0)``, real by
        construction and symmetric under ``j -> m0 - j``.
    """
    r = as_autocov(r, require_peak_at_zero=False)
    k = r.size
    m0 = int(m0)
    if m0 < 2 * k:
        raise ValueError(f"grid size {m0} too small for {k} lags; need m0 >= {2 * k}")
    half = _rfft_even(r, m0)
    if m0 % 2 == 0:
        return np.concatenate([half, half[-2:0:-1]])
    return np.concatenate([half, half[:0:-1]])


def _rfft_even(r: np.ndarray, m0: int) -> np.ndarray:
    """Transform values on the half grid ``j = 0 .. m0//2`` via a real FFT."""
    k = r.size
    c = np.zeros(m0)
    c[0] = r[0]
    if k > 1:
        c[1:k] = r[1:]
        c[m0 - k + 1:] = r[:0:-1]
    spec = np.fft.rfft(c)
    bad = np.abs(spec.imag).max(initial=0.0)
    if bad > _IMAG_TOL * max(1.0, np.abs(spec.real).max(initial=0.0)):
        raise AssertionError(f"even-sequence FFT produced imaginary residue {bad:g}")
    return spec.real


def cosine_transform(r, omegas) -> np.ndarray:
    """Evaluate the even sequence's transform at arbitrary frequencies.

    Unlike :func:`dtft_on_grid` this places no constraint on how many
    frequencies are requested; it is the direct cosine sum
    ``r[0] + 2 * sum_k r[k] cos(k*omega)``.
    """
    r = as_autocov(r, require_peak_at_zero=False)
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    ks = np.arange(1, r.size)
    vals = np.full(omegas.shape, r[0])
    if ks.size:
        # blocked to keep the (n_omega, K) workspace bounded
        step = max(1, int(4e6) // max(1, ks.size))
        for lo in range(0, omegas.size, step):
            w = omegas[lo:lo + step, None]
            vals[lo:lo + step] += 2.0 * np.cos(w * ks) @ r[1:]
    return vals


def poisson_kernel(alpha, omega):
    """Fourier transform of ``k -> alpha**|k|``: ``(1-a^2)/(1-2a cos w + a^2)``.

    Strictly positive for ``|alpha| < 1``, and bounded between
    ``(1-|a|)/(1+|a|)`` and ``(1+|a|)/(1-|a|)``.
    """
    alpha = check_open_unit(alpha)
    omega = np.asarray(omega, dtype=float)
    return (1.0 - alpha**2) / (1.0 - 2.0 * alpha * np.cos(omega) + alpha**2)


def exp_inner(alpha, alpha2):
    """Inner product of two exponential sequences: ``(1+aa')/(1-aa')``.

    ``<x_a, x_a'> = sum_k (a a')**|k|`` over all integer lags.
    """
    alpha = check_open_unit(alpha)
    alpha2 = check_open_unit(alpha2, name="alpha2")
    prod = alpha * alpha2
    return (1.0 + prod) / (1.0 - prod)


def x_alpha_l1(alpha):
    """l1 norm of the exponential sequence: ``(1+|a|)/(1-|a|)``."""
    alpha = check_open_unit(alpha)
    a = np.abs(alpha)
    return (1.0 + a) / (1.0 - a)
