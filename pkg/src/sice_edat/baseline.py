"""Proximal-gradient (G-ISTA style) solver for the l1-penalized log-det
program, also used as a high-accuracy reference on tiny instances."""
import logging
from dataclasses import dataclass

import numpy as np

from . import defaults
from .estimator import EstimationResult, IterationRecord, Status, objective_value
from .linalg import NotPositiveDefinite, soft_threshold, spd_inverse, sym_matrix

__all__ = [
    "BaselineConfig",
    "InstanceTooLarge",
    "gista_step",
    "run_gista",
    "reference_solve",
    "subgradient_violation",
]

logger = logging.getLogger(__name__)

_MIN_STEP = 1e-16
_REFERENCE_GRAD_TOL = 1e-11
_REFERENCE_ACCEPT = 1e-8


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class BaselineConfig:
    lam: float = defaults.BASELINE_LAMBDA
    step0: float = defaults.BASELINE_STEP0
    backtrack: float = defaults.BASELINE_BACKTRACK
    max_iters: int = defaults.BASELINE_MAX_ITERS
    obj_tol: float = defaults.BASELINE_OBJ_TOL
    penalize_diagonal: bool = defaults.BASELINE_PENALIZE_DIAGONAL

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if not self.step0 > 0:
            raise ValueError("step0 must be positive")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack must lie in (0, 1)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.obj_tol < 0:
            raise ValueError("obj_tol must be nonnegative")


def _prox(z, t, penalize_diagonal):
    if t == 0:
        return z
    return soft_threshold(z, t, skip_diagonal=not penalize_diagonal)


def gista_step(theta, s, step, lam, penalize_diagonal=False):
    """Gradient ascent on ``log det - tr(S .)`` followed by soft thresholding.

    Raises
    ------
    NotPositiveDefinite
        If the candidate leaves the PD cone; the caller should shrink
        ``step`` and retry.
    """
    theta = sym_matrix(theta)
    s = sym_matrix(s)
    grad = spd_inverse(theta) - s
    cand = _prox(theta + step * grad, step * lam, penalize_diagonal)
    spd_inverse(cand)
    return cand


def _smooth(theta, s):
    # objective without the penalty
    return objective_value(theta, s, 0.0)


def run_gista(s_hat, cfg=None, theta0=None, grad_tol=0.0):
    """Maximize ``log det T - tr(S T) - lam ||T||_1`` by proximal gradient.

    Each iteration tries a Barzilai-Borwein step (``step0`` on the first
    one) and backtracks until the candidate is SPD and satisfies the
    quadratic-model ascent condition, which in particular keeps the
    objective non-decreasing.

    Returns
    -------
    EstimationResult
        Trace records use ``mu_k`` for the accepted step and ``thr_k`` for
        the soft-threshold level ``step * lam``.

    Notes
    -----
    Besides ``cfg.obj_tol`` the run also stops once the optimality
    violation (see :func:`subgradient_violation`) drops to ``grad_tol``.
    """
    cfg = cfg or BaselineConfig()
    s = sym_matrix(s_hat)
    if theta0 is None:
        diag = np.diag(s) + cfg.lam
        theta0 = np.diag(1.0 / np.where(diag > 0, diag, 1.0))
    theta = sym_matrix(theta0)
    pen_diag = cfg.penalize_diagonal

    def penalty(t):
        l1 = np.abs(t).sum()
        if not pen_diag:
            l1 -= np.abs(np.diag(t)).sum()
        return cfg.lam * l1

    try:
        sigma = spd_inverse(theta)
    except NotPositiveDefinite as exc:
        return EstimationResult(theta, [], Status.FAILED, 0,
                                f"initialization: {exc}")
    g_val = _smooth(theta, s)
    f_val = g_val - penalty(theta)
    result = EstimationResult(theta)
    step = cfg.step0
    prev = None
    for k in range(cfg.max_iters):
        grad = sigma - s
        if prev is not None:
            d_theta = theta - prev[0]
            d_grad = grad - prev[1]
            curv = -np.sum(d_theta * d_grad)
            if curv > 0:
                step = float(np.sum(d_theta * d_theta) / curv)
        accepted = False
        while step > _MIN_STEP:
            cand = _prox(theta + step * grad, step * cfg.lam, pen_diag)
            try:
                g_cand = _smooth(cand, s)
            except NotPositiveDefinite:
                step *= cfg.backtrack
                continue
            diff = cand - theta
            model = g_val + np.sum(grad * diff) - np.sum(diff * diff) / (2 * step)
            f_cand = g_cand - penalty(cand)
            slack = 1e-13 * max(1.0, abs(f_val))
            if g_cand >= model - slack and f_cand >= f_val - slack:
                accepted = True
                break
            step *= cfg.backtrack
        if not accepted:
            # no ascent step left above machine precision
            if np.max(np.abs(_prox(theta + _MIN_STEP * grad, _MIN_STEP * cfg.lam,
                                   pen_diag) - theta)) == 0:
                result.status = Status.CONVERGED
            else:
                result.status = Status.FAILED
                result.reason = f"iteration {k}: backtracking exhausted"
            break
        delta = np.linalg.norm(diff) / max(np.linalg.norm(theta), 1e-300)
        prev = (theta, grad)
        theta = cand
        sigma = spd_inverse(theta)
        change = f_cand - f_val
        g_val, f_val = g_cand, f_cand
        result.trace.append(IterationRecord(
            k=k, thr_k=step * cfg.lam, mu_k=step, rho_k=0.0, objective=f_val,
            nnz_offdiag=int(np.count_nonzero(np.triu(theta, 1))),
            delta_rel=float(delta)))
        result.theta_hat = theta
        result.iters_run = k + 1
        # strict, so obj_tol = 0 never stops the run
        if abs(change) < cfg.obj_tol * max(1.0, abs(f_val)):
            result.status = Status.CONVERGED
            break
        if grad_tol > 0 and _violation(theta, sigma - s, cfg.lam,
                                       pen_diag) <= grad_tol:
            result.status = Status.CONVERGED
            break
    return result


def reference_solve(s_hat, lam, max_iters=defaults.REFERENCE_MAX_ITERS):
    """High-accuracy solution of the l1-penalized log-det program, diagonal
    penalized, for ``p <= 10``. Used as the ground-truth oracle in tests."""
    s = sym_matrix(s_hat)
    if s.shape[0] > defaults.REFERENCE_MAX_DIM:
        raise InstanceTooLarge(
            f"reference_solve supports p <= {defaults.REFERENCE_MAX_DIM}")
    cfg = BaselineConfig(lam=lam, step0=1.0, backtrack=0.5, max_iters=max_iters,
                         obj_tol=0.0,
                         penalize_diagonal=True)
    res = run_gista(s, cfg, grad_tol=_REFERENCE_GRAD_TOL)
    viol = subgradient_violation(res.theta_hat, s, lam)
    if res.status is Status.FAILED and viol > _REFERENCE_ACCEPT:
        raise RuntimeError(f"reference solve failed: {res.reason}")
    return res.theta_hat


def subgradient_violation(theta, s, lam, penalize_diagonal=True):
    """Largest violation of the optimality conditions of the l1 log-det program.

    Where ``theta_ij != 0`` the gradient ``inv(theta) - s`` must equal
    ``lam * sign(theta_ij)``; where it is zero its magnitude must not exceed
    ``lam``. Unpenalized diagonal entries need a zero gradient.
    """
    theta = np.asarray(theta, dtype=np.float64)
    grad = spd_inverse(theta) - np.asarray(s)
    return _violation(theta, grad, lam, penalize_diagonal)


def _violation(theta, grad, lam, penalize_diagonal):
    weight = np.full(theta.shape, float(lam))
    if not penalize_diagonal:
        np.fill_diagonal(weight, 0.0)
    nz = theta != 0
    viol = np.where(nz, np.abs(grad - weight * np.sign(theta)),
                    np.maximum(np.abs(grad) - weight, 0.0))
    return float(viol.max())
