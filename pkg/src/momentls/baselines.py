"""Classical asymptotic-variance estimators used for comparison.

Covers triangle (Bartlett) and trapezoid lag windows with bandwidth rules,
overlapping batch means, and the initial-sequence family built from paired
lag sums with positivity / monotonicity / convexity constraints.
"""

from __future__ import annotations

import numpy as np

from .validation import as_chain, as_autocov

__all__ = [
    "windowed_autocov",
    "windowed_avar",
    "politis_bandwidth",
    "obm",
    "paired_gamma",
    "truncate_positive",
    "running_min",
    "convex_minorant",
    "initial_seq",
]

_WINDOW_KINDS = ("bartlett", "trapezoid")


def _window(kind: str, lags: np.ndarray, b: int) -> np.ndarray:
    if kind == "bartlett":
        return np.where(lags < b, 1.0 - lags / b, 0.0)
    if kind == "trapezoid":
        frac = lags / b
        return np.where(frac <= 0.5, 1.0, np.where(frac <= 1.0, 2.0 * (1.0 - frac), 0.0))
    raise ValueError(f"unknown window kind {kind!r}; expected one of {_WINDOW_KINDS}")


def windowed_autocov(r, kind: str, bandwidth: int) -> np.ndarray:
    """Apply a lag window to ``r`` and trim the zero tail.

    Bartlett: ``w(k) = (1 - |k|/b)`` for ``|k| < b``; trapezoid: flat to
    ``b/2`` then linear down to zero at ``b``.
    """
    r = as_autocov(r, require_peak_at_zero=False)
    b = int(bandwidth)
    if b < 1:
        raise ValueError(f"bandwidth must be >= 1, got {bandwidth}")
    lags = np.arange(r.size, dtype=float)
    out = r * _window(kind, lags, b)
    last = int(np.flatnonzero(out)[-1]) + 1 if np.any(out) else 1
    return out[:min(last, min(r.size, b + 1))]


def windowed_avar(r, kind: str, bandwidth: int) -> float:
    """Lag-window asymptotic variance: ``w(0)r(0) + 2 sum_k w(k)r(k)``.

    May be negative; callers decide whether to flag it.
    """
    rw = windowed_autocov(r, kind, bandwidth)
    return float(rw[0] + 2.0 * rw[1:].sum())


def politis_bandwidth(r, m: int, c: float = 2.0, lookahead: int = 5) -> int:
    """Empirical bandwidth rule: twice the lag where correlations go quiet.

    Finds the smallest ``k >= 1`` such that the next ``min(lookahead, K-1-k)``
    autocorrelations all fall below ``c * sqrt(log10(m) / m)``, and returns
    ``max(2k, 2)``; ``2(K-1)`` if no such lag exists.
    """
    r = as_autocov(r, require_peak_at_zero=False)
    m = int(m)
    if m < 4:
        raise ValueError(f"need m >= 4, got {m}")
    if r[0] <= 0:
        raise ValueError(f"lag-0 value must be positive, got {r[0]}")
    k_max = r.size - 1
    if k_max < 1:
        return 2
    rho = np.abs(r / r[0])
    threshold = c * np.sqrt(np.log10(m) / m)
    for k in range(1, k_max + 1):
        ahead = min(lookahead, k_max - k)
        if np.all(rho[k + 1:k + 1 + ahead] < threshold):
            return max(2 * k, 2)
    return 2 * k_max


def obm(chain, batch_size: int) -> float:
    """Overlapping batch means estimate of the asymptotic variance.

    With batch means ``Y_j`` over the ``M - b + 1`` windows of length ``b``,
    returns ``M b / ((M-b)(M-b+1)) * sum_j (Y_j - Y)^2``.
    """
    x = as_chain(chain)
    m = x.size
    b = int(batch_size)
    if not 1 <= b < m:
        raise ValueError(f"batch size must be in [1, {m - 1}], got {batch_size}")
    csum = np.concatenate([[0.0], np.cumsum(x)])
    means = (csum[b:] - csum[:-b]) / b
    dev = means - x.mean()
    return float(m * b / ((m - b) * (m - b + 1)) * (dev @ dev))


def paired_gamma(r) -> np.ndarray:
    """Sums of adjacent lag pairs: ``G_m = r(2m) + r(2m+1)``."""
    r = as_autocov(r, require_peak_at_zero=False)
    if r.size < 2:
        raise ValueError("need at least 2 lags to pair")
    n_pairs = (r.size - 2) // 2 + 1
    idx = 2 * np.arange(n_pairs)
    return r[idx] + r[idx + 1]


def truncate_positive(gamma: np.ndarray) -> np.ndarray:
    """Keep the leading run of strictly positive pair sums (may be empty)."""
    gamma = np.asarray(gamma, dtype=float)
    nonpos = np.flatnonzero(gamma <= 0)
    stop = int(nonpos[0]) if nonpos.size else gamma.size
    return gamma[:stop]


def running_min(g: np.ndarray) -> np.ndarray:
    """Greatest nonincreasing minorant: the running minimum."""
    return np.minimum.accumulate(np.asarray(g, dtype=float))


def convex_minorant(g) -> np.ndarray:
    """Greatest convex minorant of the points ``(m, g[m])``.

    Computed as the lower convex hull (monotone chain) evaluated by linear
    interpolation between hull vertices.
    """
    g = np.asarray(g, dtype=float)
    n = g.size
    if n <= 2:
        return g.copy()
    hull = [0]
    for j in range(1, n):
        # pop while the turn through the last two hull points is non-convex
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            if (g[i1] - g[i0]) * (j - i1) <= (g[j] - g[i1]) * (i1 - i0):
                break
            hull.pop()
        hull.append(j)
    out = np.empty(n)
    for i0, i1 in zip(hull[:-1], hull[1:]):
        ms = np.arange(i0, i1 + 1)
        out[i0:i1 + 1] = ((i1 - ms) * g[i0] + (ms - i0) * g[i1]) / (i1 - i0)
    return out


_VARIANTS = ("pos", "dec", "conv")


def initial_seq(r, variant: str = "conv") -> float:
    """Initial-sequence asymptotic variance estimate from paired lag sums.

    Variants apply increasingly strict shape constraints to the truncated
    positive pair sums: ``pos`` uses them directly, ``dec`` their running
    minimum, ``conv`` the convex minorant of that. Returns
    ``-r(0) + 2 * sum(adjusted sums)``; a sequence with no positive leading
    pair degenerates to 0.
    """
    if variant not in _VARIANTS:
        raise ValueError(f"variant must be one of {_VARIANTS}, got {variant!r}")
    r = as_autocov(r, require_peak_at_zero=False)
    gamma = truncate_positive(paired_gamma(r))
    if gamma.size == 0:
        return max(-float(r[0]), 0.0)
    if variant == "dec":
        gamma = running_min(gamma)
    elif variant == "conv":
        gamma = convex_minorant(running_min(gamma))
    return float(-r[0] + 2.0 * gamma.sum())
