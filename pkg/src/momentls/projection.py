"""Projection of autocovariance estimates onto mixtures of exponentials.

The fitted object is a discrete nonnegative measure on (-1, 1): support
points ``alpha_i`` with masses ``w_i`` such that ``sum_i w_i alpha_i**|k|``
is the least-squares closest mixture sequence to the input, optionally under
a frequency-domain weighted norm. Plug-in spectral density and asymptotic
variance estimates follow in closed form from the measure.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .nnls import QuadProgram, solve_nnls
from .sequences import empirical_autocov, poisson_kernel, exp_inner, _rfft_even
from .validation import as_chain, as_autocov

__all__ = [
    "AlphaGrid",
    "Weight",
    "RepresentingMeasure",
    "MomentLSFit",
    "build_grid",
    "assemble_qp",
    "project",
    "modified_weight",
    "weight_from_values",
    "tune_delta",
    "fit_pipeline",
    "support_size_bound",
]

_GRAM_BLOCK = 1 << 22  # max elements of the kernel matrix held at once


@dataclass(frozen=True)
class AlphaGrid:
    """Equally spaced candidate support points in ``[-1+delta, 1-delta]``."""

    points: np.ndarray
    delta: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 1:
            raise ValueError("grid must hold at least one point")
        if np.any(np.abs(pts) >= 1.0):
            raise ValueError("grid points must lie strictly inside (-1, 1)")
        if pts.size > 1 and np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def size(self) -> int:
        return self.points.size


def build_grid(delta: float, size: int) -> AlphaGrid:
    """Build the length-``size`` grid from ``-1+delta`` to ``1-delta``.

    ``delta = 1`` collapses the interval to the single point ``{0}`` (the
    white-noise model).
    """
    delta = float(delta)
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must be in (0, 1], got {delta}")
    if delta == 1.0:
        return AlphaGrid(np.zeros(1), delta)
    size = int(size)
    if size < 2:
        raise ValueError(f"grid size must be at least 2, got {size}")
    return AlphaGrid(np.linspace(-1.0 + delta, 1.0 - delta, size), delta)


@dataclass(frozen=True)
class Weight:
    """Strictly positive, even weight values on the ``m0`` Fourier frequencies.

    ``c0`` and ``c1`` bound the values from below and above; they feed the
    norm-equivalence diagnostics.
    """

    values: np.ndarray
    c0: float
    c1: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("weight needs at least two grid values")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValueError("weight values must be finite and strictly positive")
        m0 = v.size
        sym_err = np.abs(v[1:] - v[:0:-1]).max(initial=0.0)
        if sym_err > 1e-9 * max(1.0, np.abs(v).max()):
            raise ValueError("weight values must be even: values[j] == values[m0-j]")
        if not (0 < self.c0 <= self.c1 < np.inf):
            raise ValueError("need 0 < c0 <= c1 < inf")
        object.__setattr__(self, "values", v)

    @property
    def grid_size(self) -> int:
        return self.values.size


def weight_from_values(values) -> Weight:
    """Wrap user-supplied grid values, using grid extrema as the bounds."""
    v = np.asarray(values, dtype=float)
    return Weight(v, float(v.min()), float(v.max()))


@dataclass(frozen=True)
class RepresentingMeasure:
    """Discrete nonnegative measure: support in (-1, 1) with positive masses."""

    support: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        sup = np.asarray(self.support, dtype=float)
        mas = np.asarray(self.masses, dtype=float)
        if sup.shape != mas.shape or sup.ndim != 1:
            raise ValueError("support and masses must be 1-D arrays of equal length")
        if np.any(np.abs(sup) >= 1.0):
            raise ValueError("support must lie strictly inside (-1, 1)")
        if np.any(mas <= 0):
            raise ValueError("masses must be strictly positive")
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "masses", mas)

    @property
    def is_null(self) -> bool:
        return self.support.size == 0

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def autocovariance(self, lags) -> np.ndarray:
        """Mixture sequence values ``sum_i w_i alpha_i**|k|`` at given lags."""
        lags = np.abs(np.atleast_1d(np.asarray(lags)))
        if self.is_null:
            return np.zeros(lags.shape)
        return (self.support[None, :] ** lags[:, None]) @ self.masses

    def spectral_density(self, omega) -> np.ndarray:
        """Transform of the mixture sequence: ``sum_i w_i K(alpha_i, omega)``."""
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        if self.is_null:
            return np.zeros(omega.shape)
        return poisson_kernel(self.support[None, :], omega[:, None]) @ self.masses

    def asymptotic_variance(self) -> float:
        """Sum of the mixture sequence over all lags: ``sum w_i (1+a)/(1-a)``."""
        if self.is_null:
            return 0.0
        return float(((1.0 + self.support) / (1.0 - self.support)) @ self.masses)

    def l1_norm(self) -> float:
        """``sum_i w_i (1+|a_i|)/(1-|a_i|)``, the mixture's absolute lag sum."""
        if self.is_null:
            return 0.0
        a = np.abs(self.support)
        return float(((1.0 + a) / (1.0 - a)) @ self.masses)


_NULL_MEASURE = RepresentingMeasure(np.empty(0), np.empty(0))


@dataclass(frozen=True)
class MomentLSFit:
    """Result of one projection: measure, weight used, solver diagnostics."""

    measure: RepresentingMeasure
    delta: float
    weight: Weight | None  # None means the unweighted norm
    objective: float
    kkt_residual: float
    grid_size: int
    iterations: int = 0
    status: str = "converged"
    support_clusters: int = 0
    input_lags: int = 0
    mode: str = "unweighted"

    @property
    def avar(self) -> float:
        return self.measure.asymptotic_variance()

    @property
    def l1_norm(self) -> float:
        return self.measure.l1_norm()

    def spectral_density(self, omega) -> np.ndarray:
        return self.measure.spectral_density(omega)

    def autocovariance(self, lags) -> np.ndarray:
        return self.measure.autocovariance(lags)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "mode": self.mode,
            "support": self.measure.support.tolist(),
            "masses": self.measure.masses.tolist(),
            "avar": self.avar,
            "objective": self.objective,
            "kkt_residual": self.kkt_residual,
            "l1_norm": self.l1_norm,
        }


def support_size_bound(input_lags: int) -> int:
    """Largest support-cluster count expected for an input with ``K`` lags.

    ``n/2 + 1`` where ``n`` is the smallest even number exceeding ``K - 1``.
    """
    k = int(input_lags)
    n = k if k % 2 == 0 else k + 1
    return n // 2 + 1


def _half_grid_quadrature(r, grid_points, weight_values, m0, m1, need_gram=True):
    """Return (a, B, constant) from Fourier-frequency quadrature.

    Sums over the full frequency grid are folded onto ``j = 0 .. m0//2``
    using evenness; ``mult`` carries the fold multiplicity. With
    ``need_gram=False`` the Gram matrix is skipped and returned as None.
    """
    r = np.asarray(r, dtype=float)
    rhat = _rfft_even(r, m0)
    half = rhat.size
    omega = 2.0 * np.pi * np.arange(half) / m0
    mult = np.full(half, 2.0)
    mult[0] = 1.0
    if m0 % 2 == 0:
        mult[-1] = 1.0

    if weight_values is None:
        phi2 = np.ones(half)
    else:
        phi2 = np.asarray(weight_values[:half], dtype=float) ** 2

    c = mult / phi2
    constant = float((c * rhat**2).sum() / m0)

    s = grid_points.size
    a = np.zeros(s)
    B = np.zeros((s, s)) if need_gram else None
    cos_w = np.cos(omega)
    step = max(1, _GRAM_BLOCK // max(1, s))
    for lo in range(0, half, step):
        hi = min(half, lo + step)
        # kernel block: rows = grid points, cols = frequencies
        G = (1.0 - grid_points[:, None] ** 2) / (
            1.0 - 2.0 * grid_points[:, None] * cos_w[None, lo:hi] + grid_points[:, None] ** 2
        )
        Gc = G * c[None, lo:hi]
        a += Gc @ rhat[lo:hi]
        if need_gram:
            B += Gc @ G.T
    a /= m0
    if need_gram:
        B /= m1
        B = 0.5 * (B + B.T)
    return a, B, constant


def _closed_form_qp(r, grid_points):
    """Exact unweighted QP data via the closed-form inner products.

    ``a_i = r(0) + 2 sum_k r(k) alpha_i**k`` (two-sided inner product with
    the exponential sequence), Gram ``B = (1 + aa') / (1 - aa')``, constant
    ``r(0)^2 + 2 sum_k r(k)^2``.
    """
    r = np.asarray(r, dtype=float)
    s = grid_points.size
    ks = r.size - 1
    a = np.full(s, r[0])
    if ks:
        step = max(1, _GRAM_BLOCK // ks)
        for lo in range(0, s, step):
            pts = grid_points[lo:lo + step]
            powers = np.broadcast_to(pts[:, None], (pts.size, ks)).copy()
            np.cumprod(powers, axis=1, out=powers)
            a[lo:lo + step] += 2.0 * (powers @ r[1:])
    B = exp_inner(grid_points[:, None], grid_points[None, :])
    constant = float(r[0] ** 2 + 2.0 * (r[1:] @ r[1:]))
    return a, B, constant


def assemble_qp(r, grid: AlphaGrid, weight: Weight | None, m0: int, m1: int | None = None) -> QuadProgram:
    """Assemble the projection quadratic program by Fourier-frequency sums.

    ``a_i`` approximates the weighted inner product of the input with the
    ``i``-th exponential sequence, ``B_ij`` the pairwise Gram entries, and
    ``constant`` the weighted squared norm of the input. ``m0`` and ``m1``
    must agree with each other and with ``weight.grid_size``.
    """
    r = as_autocov(np.asarray(r, dtype=float), require_peak_at_zero=False)
    m0 = int(m0)
    m1 = m0 if m1 is None else int(m1)
    if m1 != m0:
        raise ValueError(f"frequency grids must match: m0={m0}, m1={m1}")
    if weight is not None and weight.grid_size != m0:
        raise ValueError(
            f"weight grid size {weight.grid_size} does not match m0={m0}"
        )
    if m0 < 2 * r.size:
        raise ValueError(f"m0={m0} too small for {r.size} lags; need m0 >= {2 * r.size}")
    vals = None if weight is None else weight.values
    a, B, constant = _half_grid_quadrature(r, grid.points, vals, m0, m1)
    return QuadProgram(a, B, constant)


def project(r, grid: AlphaGrid, weight: Weight | None = None,
            m0: int | None = None, tol: float = 1e-12) -> MomentLSFit:
    """Project an autocovariance estimate onto the mixture cone over ``grid``.

    Parameters
    ----------
    r : array_like, shape (K,)
        Nonnegative-lag input values. Must peak at lag 0 (``r[0] >= |r[k]|``,
        ``r[0] >= 0``); violations raise ``ValueError``.
    grid : AlphaGrid
        Candidate support points.
    weight : Weight or None
        Fourier-grid weight values; ``None`` selects the unweighted norm, in
        which case all quadratic-program data come from exact closed forms
        (Gram ``(1 + a a') / (1 - a a')``) instead of quadrature.
    m0 : int, optional
        Fourier quadrature grid size for weighted fits, defaults to ``2*K``
        or the weight's own grid size. Unused for unweighted fits.
    tol : float
        Solver tolerance passed to the nonnegative least-squares step.
    """
    r = as_autocov(r)
    k = r.size
    if m0 is None:
        m0 = 2 * k if weight is None else weight.grid_size
    m0 = int(m0)

    if not np.any(r):
        return MomentLSFit(_NULL_MEASURE, grid.delta, weight, 0.0, 0.0,
                           grid.size, status="null", input_lags=k,
                           mode="unweighted" if weight is None else "weighted")

    if weight is None:
        a, B, constant = _closed_form_qp(r, grid.points)
        qp = QuadProgram(a, B, constant)
    else:
        qp = assemble_qp(r, grid, weight, m0, m0)
    sol = solve_nnls(qp, tol=tol)

    nonzero = sol.weights > 0
    clusters = _count_clusters(nonzero)
    measure = RepresentingMeasure(grid.points[nonzero], sol.weights[nonzero])
    bound = support_size_bound(k)
    if clusters > bound:
        warnings.warn(
            f"fitted support has {clusters} clusters, above the expected "
            f"bound {bound} for {k} input lags",
            RuntimeWarning,
            stacklevel=2,
        )
    return MomentLSFit(
        measure=measure,
        delta=grid.delta,
        weight=weight,
        objective=sol.objective,
        kkt_residual=sol.kkt_residual,
        grid_size=grid.size,
        iterations=sol.iterations,
        status=sol.status,
        support_clusters=clusters,
        input_lags=k,
        mode="unweighted" if weight is None else "weighted",
    )


def _count_clusters(nonzero: np.ndarray) -> int:
    if not nonzero.any():
        return 0
    flags = nonzero.astype(int)
    return int(flags[0] + np.sum((flags[1:] - flags[:-1]) == 1))


def modified_weight(fit: MomentLSFit, m0: int) -> Weight:
    """Weight from an unweighted fit: its spectral density over its mass.

    Normalizing by the total mass pins the weight's bounds to
    ``delta/(2-delta)`` and ``(2-delta)/delta``; a null fit yields the flat
    weight 1.
    """
    m0 = int(m0)
    if m0 < 2:
        raise ValueError("m0 must be at least 2")
    measure = fit.measure
    if measure.is_null or measure.total_mass == 0.0:
        return Weight(np.ones(m0), 1.0, 1.0)
    half = m0 // 2 + 1
    omega = 2.0 * np.pi * np.arange(half) / m0
    vals_half = measure.spectral_density(omega) / measure.total_mass
    if m0 % 2 == 0:
        values = np.concatenate([vals_half, vals_half[-2:0:-1]])
    else:
        values = np.concatenate([vals_half, vals_half[:0:-1]])
    delta = fit.delta
    c0 = delta / (2.0 - delta)
    c1 = (2.0 - delta) / delta
    return Weight(values, c0, c1)


def tune_delta(chain, batches: int = 5, tail_mass: float = 0.05) -> float:
    """Estimate the support margin ``delta`` from consecutive chain batches.

    Each batch is projected without weighting on a wide conservative grid,
    and the batch estimate is one minus the support edge of the fitted
    measure (1 for a null fit). The edge is read as the smallest ``|alpha|``
    containing a ``1 - tail_mass`` fraction of the total mass, which keeps
    spurious noise atoms near the grid boundary from collapsing the
    estimate. The final value is 0.8 times the batch mean, clamped to
    ``[1e-3, 1]``.
    """
    x = as_chain(chain)
    batches = int(batches)
    if batches < 1:
        raise ValueError("need at least one batch")
    m = x.size
    if m < 10 * batches:
        raise ValueError(f"chain too short to tune delta: need {10 * batches} values, got {m}")
    blen = m // batches
    floor = max(1e-3, blen ** -0.5)
    grid = build_grid(floor, 400)
    estimates = []
    for b in range(batches):
        seg = x[b * blen:(b + 1) * blen]
        r = empirical_autocov(seg)
        fit = project(r, grid, None, 2 * blen)
        estimates.append(1.0 - _support_edge(fit.measure, tail_mass))
    value = 0.8 * float(np.mean(estimates))
    return float(min(1.0, max(1e-3, value)))


def _support_edge(measure: RepresentingMeasure, tail_mass: float) -> float:
    """Smallest ``|alpha|`` whose atoms hold ``1 - tail_mass`` of the mass."""
    if measure.is_null:
        return 0.0
    radii = np.abs(measure.support)
    order = np.argsort(radii)
    cum = np.cumsum(measure.masses[order])
    target = (1.0 - tail_mass) * cum[-1]
    pos = int(np.searchsorted(cum, target))
    return float(radii[order][min(pos, radii.size - 1)])


def fit_pipeline(chain, delta="auto", grid_size: int = 1000,
                 mode: str = "weighted", tune_batches: int = 5,
                 tol: float = 1e-12) -> MomentLSFit:
    """Full estimation pipeline from raw chain output to a fitted measure.

    Computes the empirical autocovariance (all ``M`` lags, Fourier grid
    ``2M``), resolves ``delta`` (``"auto"`` tunes it from batches), projects
    without weights, and in ``"weighted"`` mode re-projects under the weight
    derived from the first fit.
    """
    uw, w = _pipeline_stages(chain, delta, grid_size, mode, tune_batches, tol)
    return w if mode == "weighted" else uw


def _pipeline_stages(chain, delta, grid_size, mode, tune_batches, tol):
    if mode not in ("weighted", "unweighted"):
        raise ValueError(f"mode must be 'weighted' or 'unweighted', got {mode!r}")
    x = as_chain(chain, min_length=4)
    m = x.size
    r = empirical_autocov(x)
    m0 = 2 * m
    if isinstance(delta, str):
        if delta != "auto":
            raise ValueError(f"delta must be a float or 'auto', got {delta!r}")
        delta_val = tune_delta(x, tune_batches)
    else:
        delta_val = float(delta)
    grid = build_grid(delta_val, grid_size)
    unweighted = project(r, grid, None, m0, tol)
    if mode == "unweighted":
        return unweighted, None
    weight = modified_weight(unweighted, m0)
    weighted = project(r, grid, weight, m0, tol)
    return unweighted, weighted
