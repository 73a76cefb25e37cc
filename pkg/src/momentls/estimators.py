"""Scikit-learn style estimators wrapping the functional core.

Each estimator follows the usual conventions: hyperparameters are stored
verbatim in ``__init__``, validation happens in ``fit``, and fitted results
live in trailing-underscore attributes. ``get_params`` / ``set_params`` come
from ``sklearn.base.BaseEstimator`` so the classes compose with pipelines and
parameter search utilities.

The input ``X`` to ``fit`` is a single chain: a 1-D array (or column vector)
of consecutive output values.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from . import baselines
from .projection import _pipeline_stages
from .sequences import empirical_autocov, cosine_transform
from .validation import as_chain

__all__ = [
    "MomentLS",
    "BartlettKernel",
    "TrapezoidKernel",
    "OverlappingBatchMeans",
    "InitialSequence",
    "METHODS",
    "SPECTRAL_METHODS",
    "make_estimator",
]


class MomentLS(BaseEstimator):
    """Shape-constrained autocovariance estimator with plug-in variance.

    Parameters
    ----------
    weighting : {"weighted", "unweighted"}
        Whether to re-project under the frequency weight derived from the
        unweighted fit.
    delta : float or "auto"
        Margin keeping the candidate support away from +-1; "auto" tunes it
        from chain batches.
    grid_size : int
        Number of candidate support points.
    tune_batches : int
        Batch count for automatic delta tuning.
    tol : float
        Solver tolerance of the nonnegative least-squares step.

    Attributes
    ----------
    fit_ : MomentLSFit
        Full projection result for the requested mode.
    unweighted_fit_ : MomentLSFit
        First-stage fit (equals ``fit_`` when unweighted).
    support_, masses_ : ndarray
        The fitted measure.
    avar_ : float
        Plug-in asymptotic variance estimate.
    delta_ : float
        The margin actually used.
    """

    def __init__(self, weighting="weighted", delta="auto", grid_size=1000,
                 tune_batches=5, tol=1e-12):
        self.weighting = weighting
        self.delta = delta
        self.grid_size = grid_size
        self.tune_batches = tune_batches
        self.tol = tol

    def fit(self, X, y=None):
        uw, w = _pipeline_stages(X, self.delta, self.grid_size, self.weighting,
                                 self.tune_batches, self.tol)
        self.unweighted_fit_ = uw
        self.fit_ = w if self.weighting == "weighted" else uw
        self.delta_ = self.fit_.delta
        self.support_ = self.fit_.measure.support
        self.masses_ = self.fit_.measure.masses
        self.avar_ = self.fit_.avar
        self.objective_ = self.fit_.objective
        self.kkt_residual_ = self.fit_.kkt_residual
        self.l1_norm_ = self.fit_.l1_norm
        self.n_lags_ = self.fit_.input_lags
        return self

    def spectral_density(self, omega):
        """Fitted spectral density at the given frequencies."""
        return self.fit_.spectral_density(omega)

    def autocovariance(self, lags):
        """Fitted autocovariance values at the given lags."""
        return self.fit_.autocovariance(lags)


class _LagWindowBase(BaseEstimator):
    """Shared fit logic for lag-window estimators."""

    _kind = ""

    def __init__(self, bandwidth=None):
        self.bandwidth = bandwidth

    def _resolve_bandwidth(self, r, m):
        if self.bandwidth is not None:
            return int(self.bandwidth)
        return max(2, int(np.sqrt(m)))

    def fit(self, X, y=None):
        x = as_chain(X)
        r = empirical_autocov(x)
        self.bandwidth_ = self._resolve_bandwidth(r, x.size)
        self.windowed_autocov_ = baselines.windowed_autocov(r, self._kind, self.bandwidth_)
        self.avar_ = float(self.windowed_autocov_[0] + 2.0 * self.windowed_autocov_[1:].sum())
        self.negative_estimate_ = self.avar_ < 0
        return self

    def spectral_density(self, omega):
        """Cosine series of the windowed autocovariance at given frequencies."""
        return cosine_transform(self.windowed_autocov_, omega)


class BartlettKernel(_LagWindowBase):
    """Triangle lag-window estimator; default bandwidth ``floor(sqrt(M))``."""

    _kind = "bartlett"


class TrapezoidKernel(_LagWindowBase):
    """Flat-top trapezoid lag-window estimator.

    The default bandwidth follows the empirical quiet-lag rule
    (:func:`momentls.baselines.politis_bandwidth`).
    """

    _kind = "trapezoid"

    def _resolve_bandwidth(self, r, m):
        if self.bandwidth is not None:
            return int(self.bandwidth)
        return baselines.politis_bandwidth(r, m)


class OverlappingBatchMeans(BaseEstimator):
    """Overlapping batch means; default batch size ``floor(sqrt(M))``."""

    def __init__(self, batch_size=None):
        self.batch_size = batch_size

    def fit(self, X, y=None):
        x = as_chain(X)
        b = int(self.batch_size) if self.batch_size is not None else max(1, int(np.sqrt(x.size)))
        self.batch_size_ = b
        self.avar_ = baselines.obm(x, b)
        return self


class InitialSequence(BaseEstimator):
    """Initial-sequence estimator over paired lag sums.

    ``variant`` picks the shape constraint: "pos" (positive prefix), "dec"
    (nonincreasing), or "conv" (nonincreasing and convex).
    """

    def __init__(self, variant="conv"):
        self.variant = variant

    def fit(self, X, y=None):
        x = as_chain(X)
        r = empirical_autocov(x)
        self.avar_ = baselines.initial_seq(r, self.variant)
        self.degenerate_ = baselines.truncate_positive(baselines.paired_gamma(r)).size == 0
        return self


METHODS = ("mls-w", "mls-uw", "bartlett", "io", "obm", "init-pos", "init-dec", "init-conv")
SPECTRAL_METHODS = ("mls-w", "mls-uw", "bartlett", "io")


def make_estimator(method: str, *, delta="auto", grid_size=1000, bandwidth=None,
                   tune_batches=5, tol=1e-12):
    """Instantiate the estimator registered under a method identifier."""
    if method == "mls-w":
        return MomentLS("weighted", delta, grid_size, tune_batches, tol)
    if method == "mls-uw":
        return MomentLS("unweighted", delta, grid_size, tune_batches, tol)
    if method == "bartlett":
        return BartlettKernel(bandwidth)
    if method == "io":
        return TrapezoidKernel(bandwidth)
    if method == "obm":
        return OverlappingBatchMeans(bandwidth)
    if method.startswith("init-"):
        variant = method[len("init-"):]
        if variant in ("pos", "dec", "conv"):
            return InitialSequence(variant)
    raise ValueError(f"unknown method {method!r}; valid methods: {', '.join(METHODS)}")
