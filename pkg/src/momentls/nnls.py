"""Nonnegative least squares in Gram form.

Solves ``min_w  constant - 2 a'w + w'Bw  subject to  w >= 0`` where ``B`` is
a symmetric positive semidefinite Gram matrix. This is the quadratic program
produced by projecting a sequence onto a finite cone of basis sequences; the
solver works directly on ``(a, B)`` so callers never form a design matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

__all__ = ["QuadProgram", "QpSolution", "NnlsError", "solve_nnls"]

_SYM_TOL = 1e-12
_COND_LIMIT = 1e12
_PRUNE_REL = 1e-12


@dataclass(frozen=True)
class QuadProgram:
    """Quadratic program data: linear term ``a``, Gram matrix ``B``, constant.

    ``constant`` is the objective value at ``w = 0`` and only affects
    objective reporting, not the minimizer.
    """

    a: np.ndarray
    B: np.ndarray
    constant: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        B = np.asarray(self.B, dtype=float)
        if a.ndim != 1 or B.shape != (a.size, a.size):
            raise ValueError(f"shape mismatch: a {a.shape}, B {B.shape}")
        scale = max(1.0, np.abs(B).max(initial=0.0))
        if np.abs(B - B.T).max(initial=0.0) > _SYM_TOL * scale:
            raise ValueError("B is not symmetric")
        if a.size and np.any(np.diag(B) <= 0):
            raise ValueError("B must have a strictly positive diagonal")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "constant", float(self.constant))

    @property
    def size(self) -> int:
        return self.a.size


@dataclass(frozen=True)
class QpSolution:
    """Solver output: nonnegative weights plus optimality diagnostics.

    ``status`` is ``"converged"`` or ``"degenerate-path"`` (a near-singular
    passive-set system forced the solver to skip a grid column; the iterate
    still satisfies the reported ``kkt_residual``).
    """

    weights: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    status: str = "converged"


class NnlsError(RuntimeError):
    """Iteration limit reached before meeting tolerance.

    Carries the best iterate found so far in ``solution``.
    """

    def __init__(self, message: str, solution: QpSolution):
        super().__init__(message)
        self.solution = solution


def kkt_residual(qp: QuadProgram, w: np.ndarray) -> float:
    """Scaled KKT violation of ``w`` for ``qp``.

    Combines dual feasibility ``(Bw - a) >= 0`` (scaled by ``max(1, |a|_inf)``)
    with coordinatewise complementary slackness ``|w_i (Bw - a)_i|`` scaled by
    ``max(1, |a_i|)``.
    """
    g = qp.B @ w - qp.a
    scale = max(1.0, np.abs(qp.a).max(initial=0.0))
    dual = max(0.0, float(-g.min(initial=0.0))) / scale
    slack = float(np.max(np.abs(w * g) / np.maximum(1.0, np.abs(qp.a)), initial=0.0))
    return max(dual, slack)


def _objective(qp: QuadProgram, w: np.ndarray) -> float:
    return float(qp.constant - 2.0 * qp.a @ w + w @ (qp.B @ w))


def solve_nnls(qp: QuadProgram, tol: float = 1e-12) -> QpSolution:
    """Solve the nonnegative least-squares program with an active-set method.

    Lawson-Hanson iteration on the Gram system: grow a passive set one column
    at a time, solve the equality-constrained subproblem with a Cholesky
    factorization, and step back along the segment to the previous iterate
    whenever a passive weight would turn negative.

    Parameters
    ----------
    qp : QuadProgram
        Problem data; ``B`` must be symmetric positive semidefinite.
    tol : float
        Relative KKT tolerance. Dual feasibility is scaled by
        ``max(1, |a|_inf)``.

    Returns
    -------
    QpSolution
        Weights with entries below ``1e-12 * max(weights)`` zeroed, the
        objective, the scaled KKT residual, and the iteration count.

    Raises
    ------
    NnlsError
        If the ``10 * s`` iteration cap is hit before meeting ``tol``; the
        exception carries the best iterate.
    """
    s = qp.size
    if s < 1:
        raise ValueError("empty quadratic program")
    a, B = qp.a, qp.B
    max_iter = 10 * s
    tol_dual = tol * max(1.0, np.abs(a).max(initial=0.0))

    w = np.zeros(s)
    passive: list[int] = []  # insertion-ordered
    banned: set[int] = set()
    status = "converged"
    iters = 0
    g = a.copy()  # a - B w

    while True:
        candidates = [
            i for i in range(s)
            if i not in banned and (i not in passive) and g[i] > tol_dual
        ]
        if not candidates:
            break
        j = max(candidates, key=lambda i: g[i])
        passive.append(j)

        hit_limit = False
        while True:
            iters += 1
            if iters > max_iter:
                hit_limit = True
                break
            idx = np.array(passive)
            z = _passive_solve(B, a, idx)
            if z is None:
                # near-singular system: drop the newest column for good
                banned.add(passive.pop())
                status = "degenerate-path"
                break
            if np.all(z > 0):
                w[:] = 0.0
                w[idx] = z
                break
            # step toward z until the first passive weight hits zero
            wp = w[idx]
            shrink = z <= 0
            denom = wp[shrink] - z[shrink]
            if np.any(denom <= 0):
                # zero-weight column solved nonpositive: no progress possible
                banned.add(passive.pop())
                status = "degenerate-path"
                break
            ratios = wp[shrink] / denom
            step = ratios.min()
            if step <= 0.0:
                banned.add(passive.pop())
                status = "degenerate-path"
                break
            wp = wp + step * (z - wp)
            # blocking coordinates reach zero exactly in real arithmetic;
            # clear the rounding dust so they leave the passive set
            blocked = np.zeros(wp.size, dtype=bool)
            blocked[shrink] = ratios <= step * (1.0 + 1e-12)
            wp[blocked] = 0.0
            wp[shrink & (wp <= 0)] = 0.0
            w[:] = 0.0
            w[idx] = np.maximum(wp, 0.0)
            passive = [i for i in passive if w[i] > 0.0]
            if not passive:
                break
        if hit_limit:
            w = _prune(w)
            sol = QpSolution(w, _objective(qp, w), kkt_residual(qp, w), iters,
                             "iteration-limit")
            raise NnlsError(
                f"iteration limit {max_iter} reached (kkt residual {sol.kkt_residual:g})",
                sol,
            )
        if passive:
            g = a - B[:, passive] @ w[passive]
        else:
            g = a.copy()

    w = _prune(w)
    return QpSolution(w, _objective(qp, w), kkt_residual(qp, w), iters, status)


def _passive_solve(B: np.ndarray, a: np.ndarray, idx: np.ndarray):
    """Solve ``B[idx, idx] z = a[idx]``; None if numerically singular.

    A Cholesky failure marks the passive Gram as effectively rank-deficient
    (condition beyond ~1/eps); one retry with a relative jitter of
    ``1/_COND_LIMIT`` distinguishes borderline systems from true collinearity.
    """
    sub = B[np.ix_(idx, idx)]
    try:
        c, low = cho_factor(sub, check_finite=False)
    except LinAlgError:
        shift = np.trace(sub) / idx.size / _COND_LIMIT
        try:
            c, low = cho_factor(sub + shift * np.eye(idx.size), check_finite=False)
        except LinAlgError:
            return None
    return cho_solve((c, low), a[idx], check_finite=False)


def _prune(w: np.ndarray) -> np.ndarray:
    top = w.max(initial=0.0)
    if top > 0:
        w = np.where(w < _PRUNE_REL * top, 0.0, w)
    return w
