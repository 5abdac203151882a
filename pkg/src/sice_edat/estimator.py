"""Sparse precision estimation with transform-domain updates and
exponentially decaying hard thresholding (SICE-EDAT).

One iteration, for the current estimate ``theta`` and threshold ``thr``::

    mu    = thr / lambda
    M     = inv(theta) + mu * (S_hat - inv(theta))     # covariance-domain update
    theta = inv(M + rho * I)                           # Tikhonov re-inversion
    theta = hard_threshold(theta, thr)
    thr   = thr * decay
"""
import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import defaults
from .linalg import (DimensionMismatch, NotPositiveDefinite, cholesky,
                     factor_inverse, frob_inner, hard_threshold, log_det,
                     spd_inverse, sym_matrix)

__all__ = [
    "EstimatorConfig",
    "IterationRecord",
    "EstimationResult",
    "Status",
    "objective_value",
    "init_theta",
    "sice_edat_step",
    "run_sice_edat",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EstimatorConfig:
    """Knobs of the SICE-EDAT iteration.

    ``thr0=None`` starts at ``MU0 * lam`` (initial step ``MU0``).
    ``rho0=None`` uses ``thr0`` and ``rho_growth=None`` uses ``decay``, so
    that by default the Tikhonov shift tracks the threshold, ``rho_k = thr_k``.
    """

    lam: float = defaults.LAMBDA
    thr0: float | None = None
    decay: float = defaults.DECAY
    rho0: float | None = defaults.RHO0
    rho_growth: float | None = defaults.RHO_GROWTH
    max_iters: int = defaults.MAX_ITERS
    rel_tol: float = defaults.REL_TOL
    skip_diagonal: bool = defaults.SKIP_DIAGONAL
    jitter_base: float = defaults.JITTER_BASE

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.thr0 is not None and not self.thr0 > 0:
            raise ValueError("thr0 must be positive")
        if not 0 < self.decay < 1:
            raise ValueError("decay must lie in (0, 1)")
        if (self.rho0 or 0) < 0 or (self.rho_growth or 0) < 0:
            raise ValueError("rho0 and rho_growth must be nonnegative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be nonnegative")
        if not self.jitter_base > 0:
            raise ValueError("jitter_base must be positive")

    def schedule(self):
        """Resolved ``(thr0, rho0, rho_growth)``."""
        thr0 = self.thr0 if self.thr0 is not None else defaults.MU0 * self.lam
        rho0 = self.rho0 if self.rho0 is not None else thr0
        growth = self.rho_growth if self.rho_growth is not None else self.decay
        return float(thr0), float(rho0), float(growth)


@dataclass(frozen=True)
class IterationRecord:
    k: int
    thr_k: float
    mu_k: float
    rho_k: float
    objective: float
    nnz_offdiag: int
    delta_rel: float


class Status(enum.Enum):
    MAX_ITERS = "MaxIters"
    CONVERGED = "Converged"
    FAILED = "Failed"


@dataclass
class EstimationResult:
    theta_hat: np.ndarray
    trace: list = field(default_factory=list)
    status: Status = Status.MAX_ITERS
    iters_run: int = 0
    reason: str = ""

    @property
    def ok(self):
        return self.status is not Status.FAILED

    @property
    def objective(self):
        return self.trace[-1].objective if self.trace else float("nan")


def objective_value(theta, s, lam, penalize_diagonal=True):
    """``log det(theta) - tr(s theta) - lam * ||theta||_1``.

    The l1 norm runs over all entries unless ``penalize_diagonal`` is off.

    Raises
    ------
    NotPositiveDefinite
        If ``theta`` is outside the PD cone, where the objective is -inf.
    """
    theta = np.asarray(theta, dtype=np.float64)
    l1 = np.abs(theta).sum()
    if not penalize_diagonal:
        l1 -= np.abs(np.diag(theta)).sum()
    return log_det(cholesky(theta)) - frob_inner(s, theta) - lam * l1


def _nnz_offdiag(theta):
    return int(np.count_nonzero(np.triu(theta, 1)))


def _inverse_with_jitter(a, jitter_base, stage):
    try:
        return spd_inverse(a)
    except NotPositiveDefinite:
        pass
    p = a.shape[0]
    eps = jitter_base * abs(np.trace(a)) / p
    try:
        return spd_inverse(a + eps * np.eye(p))
    except NotPositiveDefinite as exc:
        raise NotPositiveDefinite(exc.pivot_index, stage) from None


def init_theta(s_hat, rho0):
    """Starting point ``inv(S_hat + rho0 I)``."""
    s_hat = sym_matrix(s_hat)
    return spd_inverse(s_hat + rho0 * np.eye(s_hat.shape[0]))


def _step(sigma_k, s_hat, thr_k, cfg, rho_k):
    """Step from the current covariance-domain iterate ``sigma_k = inv(theta_k)``.

    Returns the thresholded iterate, its Cholesky factor and the Tikhonov
    constant that was finally used.
    """
    p = sigma_k.shape[0]
    eye = np.eye(p)
    mu_k = thr_k / cfg.lam
    m_k = sigma_k + mu_k * (s_hat - sigma_k)
    rho = rho_k
    for attempt in range(defaults.TIKHONOV_RETRIES + 1):
        try:
            theta = _inverse_with_jitter(m_k + rho * eye, cfg.jitter_base,
                                         "tikhonov inverse")
            theta = hard_threshold(theta, thr_k, cfg.skip_diagonal)
            # thresholding can leave the PD cone; the next step could not invert
            factor = cholesky(theta)
            return theta, factor, rho
        except NotPositiveDefinite as exc:
            if attempt == defaults.TIKHONOV_RETRIES:
                raise NotPositiveDefinite(exc.pivot_index,
                                          exc.stage or "thresholded iterate")
            # a zero rho cannot be scaled up; seed it from the jitter scale
            rho = rho * defaults.TIKHONOV_RETRY_FACTOR if rho > 0 else \
                cfg.jitter_base * abs(np.trace(m_k)) / p
            logger.debug("step left the PD cone, retrying with rho=%g", rho)


def sice_edat_step(theta_k, s_hat, thr_k, cfg, rho_k):
    """One SICE-EDAT iteration at threshold ``thr_k`` and Tikhonov ``rho_k``.

    Raises
    ------
    NotPositiveDefinite
        ``stage`` names the inversion that failed after all retries.
    """
    theta_k = sym_matrix(theta_k)
    s_hat = sym_matrix(s_hat)
    if theta_k.shape != s_hat.shape:
        raise DimensionMismatch("theta_k and s_hat differ in shape")
    sigma_k = _inverse_with_jitter(theta_k, cfg.jitter_base, "theta inverse")
    return _step(sigma_k, s_hat, thr_k, cfg, rho_k)[0]


def run_sice_edat(s_hat, cfg=None, theta0=None, callback=None):
    """Run SICE-EDAT on an empirical covariance.

    Parameters
    ----------
    s_hat : array-like, shape (p, p)
        Empirical covariance (symmetric PSD, possibly singular).
    cfg : EstimatorConfig, optional
    theta0 : array-like, optional
        Starting precision; defaults to ``inv(s_hat + rho0 I)``.
    callback : callable, optional
        Called as ``callback(record, theta)`` after every iteration.

    Returns
    -------
    EstimationResult
        ``trace`` holds one :class:`IterationRecord` per completed iteration,
        including when the run fails part way.
    """
    cfg = cfg or EstimatorConfig()
    s_hat = sym_matrix(s_hat)
    thr, rho, rho_growth = cfg.schedule()
    try:
        theta = init_theta(s_hat, rho) if theta0 is None \
            else sym_matrix(theta0)
    except NotPositiveDefinite as exc:
        return EstimationResult(s_hat * np.nan, [], Status.FAILED, 0,
                                f"initialization: {exc}")

    result = EstimationResult(theta)
    try:
        sigma = _inverse_with_jitter(theta, cfg.jitter_base, "theta inverse")
    except NotPositiveDefinite as exc:
        return EstimationResult(theta, [], Status.FAILED, 0,
                                f"initialization: {exc}")
    for k in range(cfg.max_iters):
        try:
            new, factor, rho_used = _step(sigma, s_hat, thr, cfg, rho)
        except NotPositiveDefinite as exc:
            result.status = Status.FAILED
            result.reason = f"iteration {k}: {exc}"
            logger.warning("SICE-EDAT failed at %s", result.reason)
            break
        obj = log_det(factor) - frob_inner(s_hat, new) - cfg.lam * np.abs(new).sum()
        sigma = factor_inverse(factor)
        denom = np.linalg.norm(theta)
        delta = np.linalg.norm(new - theta) / denom if denom > 0 else math.inf
        result.trace.append(IterationRecord(
            k=k, thr_k=thr, mu_k=thr / cfg.lam, rho_k=rho_used, objective=obj,
            nnz_offdiag=_nnz_offdiag(new), delta_rel=float(delta)))
        theta = new
        result.theta_hat = theta
        result.iters_run = k + 1
        if callback is not None:
            callback(result.trace[-1], theta)
        if cfg.rel_tol > 0 and delta < cfg.rel_tol:
            result.status = Status.CONVERGED
            break
        thr = thr * cfg.decay
        rho = rho * rho_growth
    return result
