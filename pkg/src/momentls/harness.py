"""Replicated comparison experiments on simulated chains.

Runs each configured estimator on the same seeded chains and aggregates
squared asymptotic-variance errors and integrated squared spectral errors.
Replicate ``r`` always uses seed ``base_seed + r``, so results are
reproducible bit-for-bit and independent of execution order.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .chains import Ar1Spec, GroundTruth, ar1_truth, simulate_ar1
from .estimators import METHODS, SPECTRAL_METHODS, MomentLS, make_estimator

__all__ = ["ExperimentConfig", "ExperimentResult", "ise", "run_experiment"]


def ise(estimate, truth: GroundTruth) -> float:
    """Mean squared spectral error over the Fourier frequencies.

    ``estimate`` holds spectral values at ``omega_j = 2 pi j / M0`` for
    ``j = 0 .. M0-1``; the result averages the squared deviation from
    ``truth.spectral`` over that grid.
    """
    est = np.asarray(estimate, dtype=float)
    if est.ndim != 1 or est.size < 1:
        raise ValueError("spectral estimate must be a non-empty 1-D array")
    m0 = est.size
    omega = 2.0 * np.pi * np.arange(m0) / m0
    dev = est - truth.spectral(omega)
    return float(dev @ dev / m0)


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings for one replicated comparison run."""

    rho: float
    length: int
    replications: int
    base_seed: int = 0
    tau: float = 1.0
    estimators: tuple = ("mls-w", "mls-uw")
    ise_grid: int = 8192
    grid_size: int = 200
    delta: object = "auto"
    tune_batches: int = 5

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("need at least one replication")
        if self.ise_grid < 256:
            raise ValueError("ise grid must have at least 256 frequencies")
        unknown = [m for m in self.estimators if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown estimators {unknown}; valid: {', '.join(METHODS)}")
        object.__setattr__(self, "estimators", tuple(self.estimators))


@dataclass
class ExperimentResult:
    """Aggregated metrics plus the per-replicate raw values."""

    config: ExperimentConfig
    truth_avar: float
    avar_estimates: dict = field(default_factory=dict)  # method -> list
    avar_sq_errors: dict = field(default_factory=dict)  # method -> list
    ise_values: dict = field(default_factory=dict)      # method -> list or None
    failures: dict = field(default_factory=dict)        # method -> count
    flags: dict = field(default_factory=dict)           # method -> list of str

    def summary(self, method: str) -> dict:
        sq = np.asarray(self.avar_sq_errors[method], dtype=float)
        out = {
            "method": method,
            "n_used": int(sq.size),
            "failures": self.failures[method],
            "mse_avar": float(sq.mean()) if sq.size else None,
            "mse_avar_se": _stderr(sq),
            "flags": list(self.flags[method]),
        }
        ises = self.ise_values[method]
        if ises is None:
            out["mean_ise"] = None
            out["ise_se"] = None
        else:
            arr = np.asarray(ises, dtype=float)
            out["mean_ise"] = float(arr.mean()) if arr.size else None
            out["ise_se"] = _stderr(arr)
        return out

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "config": {
                "rho": cfg.rho,
                "tau": cfg.tau,
                "length": cfg.length,
                "replications": cfg.replications,
                "base_seed": cfg.base_seed,
                "estimators": list(cfg.estimators),
                "ise_grid": cfg.ise_grid,
                "grid_size": cfg.grid_size,
                "delta": cfg.delta,
                "tune_batches": cfg.tune_batches,
            },
            "truth_avar": self.truth_avar,
            "summaries": [self.summary(m) for m in cfg.estimators],
            "raw": {
                "avar": {m: list(v) for m, v in self.avar_estimates.items()},
                "avar_sq_errors": {m: list(v) for m, v in self.avar_sq_errors.items()},
                "ise": {m: (list(v) if v is not None else None)
                        for m, v in self.ise_values.items()},
            },
        }


def _stderr(values: np.ndarray):
    if values.size <= 1:
        return 0.0
    return float(values.std(ddof=1) / np.sqrt(values.size))


def _evaluate_replicate(config: ExperimentConfig, index: int) -> dict:
    """Run all configured estimators on replicate ``index``'s chain."""
    spec = Ar1Spec(rho=config.rho, tau=config.tau, length=config.length,
                   seed=config.base_seed + index)
    chain = simulate_ar1(spec)
    truth = ar1_truth(config.rho, config.tau)
    omega = 2.0 * np.pi * np.arange(config.ise_grid) / config.ise_grid

    out = {}
    methods = config.estimators
    shared_mls = None
    if "mls-w" in methods or "mls-uw" in methods:
        mode = "weighted" if "mls-w" in methods else "unweighted"
        try:
            shared_mls = MomentLS(mode, config.delta, config.grid_size,
                                  config.tune_batches).fit(chain)
        except Exception as exc:  # noqa: BLE001 - failures are counted per method
            shared_mls = exc

    for method in methods:
        try:
            if method in ("mls-w", "mls-uw"):
                if isinstance(shared_mls, Exception):
                    raise shared_mls
                fit = shared_mls.fit_ if method == "mls-w" else shared_mls.unweighted_fit_
                avar = fit.avar
                spectral = fit.spectral_density(omega)
            else:
                est = make_estimator(method).fit(chain)
                avar = est.avar_
                spectral = est.spectral_density(omega) if method in SPECTRAL_METHODS else None
            entry = {"avar": float(avar), "sq_error": (avar - truth.avar) ** 2}
            if spectral is not None:
                dev = spectral - truth.spectral(omega)
                entry["ise"] = float(dev @ dev / config.ise_grid)
            out[method] = entry
        except Exception as exc:  # noqa: BLE001
            out[method] = {"error": f"{type(exc).__name__}: {exc}"}
    return out


def _worker(args):
    config, index = args
    return index, _evaluate_replicate(config, index)


def run_experiment(config: ExperimentConfig, n_jobs: int | None = None) -> ExperimentResult:
    """Run the replicated comparison described by ``config``.

    ``n_jobs`` defaults to the ``MOMENTLS_THREADS`` environment variable, or
    serial execution. Estimator failures are excluded from the averages and
    counted per method.
    """
    if n_jobs is None:
        n_jobs = int(os.environ.get("MOMENTLS_THREADS", "1"))
    n_jobs = max(1, int(n_jobs))

    indices = range(config.replications)
    if n_jobs == 1:
        rows = [(i, _evaluate_replicate(config, i)) for i in indices]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            rows = list(pool.map(_worker, [(config, i) for i in indices]))
    rows.sort(key=lambda pair: pair[0])

    truth = ar1_truth(config.rho, config.tau)
    result = ExperimentResult(config=config, truth_avar=truth.avar)
    for method in config.estimators:
        avars, sq, ises, fails = [], [], [], 0
        spectral_capable = method in SPECTRAL_METHODS
        for _, row in rows:
            entry = row[method]
            if "error" in entry:
                fails += 1
                continue
            avars.append(entry["avar"])
            sq.append(entry["sq_error"])
            if spectral_capable:
                ises.append(entry["ise"])
        result.avar_estimates[method] = avars
        result.avar_sq_errors[method] = sq
        result.ise_values[method] = ises if spectral_capable else None
        result.failures[method] = fails
        flags = []
        if len(sq) <= 1:
            flags.append("se-undefined")
        result.flags[method] = flags
    return result
