"""Support recovery and estimation-error metrics, plus empirical checks of
the ratios that the convergence argument assumes stay small."""
import math
from dataclasses import dataclass

import numpy as np

from .linalg import DimensionMismatch, frob_inner, spd_inverse

__all__ = [
    "SupportMetrics",
    "AssumptionReport",
    "support_metrics",
    "frob_error",
    "assumption_diagnostics",
]


@dataclass(frozen=True)
class SupportMetrics:
    """Confusion counts over unordered off-diagonal pairs ``i < j``."""

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def tpr(self):
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def fpr(self):
        return self.fp / (self.fp + self.tn) if self.fp + self.tn else 0.0


@dataclass(frozen=True)
class AssumptionReport:
    k: int
    ratio1: float
    ratio2: float
    ratio3: float

    def holds(self, eta_sq):
        """True when every ratio is bounded by ``eta_sq``."""
        return max(self.ratio1, self.ratio2, self.ratio3) <= eta_sq


def support_metrics(theta_hat, support_true, zero_tol=0.0):
    """TPR/FPR of the estimated off-diagonal support.

    Parameters
    ----------
    theta_hat : array-like, shape (p, p)
    support_true : iterable of (i, j) pairs or array-like (p, p)
        True support; pairs may be given in either order. A matrix is
        converted via its nonzero off-diagonal entries.
    zero_tol : float
        An entry counts as zero iff ``|value| <= zero_tol``.
    """
    theta_hat = np.asarray(theta_hat)
    p = theta_hat.shape[0]
    if theta_hat.shape != (p, p):
        raise DimensionMismatch(f"expected a square matrix, got {theta_hat.shape}")
    truth = np.zeros((p, p), dtype=bool)
    if isinstance(support_true, np.ndarray) and support_true.ndim == 2:
        if support_true.shape != theta_hat.shape:
            raise DimensionMismatch("support matrix shape differs from estimate")
        truth = support_true != 0
    else:
        for i, j in support_true:
            if not (0 <= i < p and 0 <= j < p):
                raise DimensionMismatch(f"pair ({i}, {j}) out of range for p={p}")
            truth[i, j] = truth[j, i] = True
    upper = np.triu(np.ones((p, p), dtype=bool), 1)
    truth = truth & upper
    est = (np.abs(theta_hat) > zero_tol) & upper
    tp = int(np.sum(est & truth))
    fp = int(np.sum(est & ~truth & upper))
    fn = int(np.sum(~est & truth))
    tn = int(upper.sum()) - tp - fp - fn
    return SupportMetrics(tp=tp, fp=fp, tn=tn, fn=fn)


def frob_error(theta_hat, theta_star):
    """``||theta_hat - theta_star||_F``."""
    a = np.asarray(theta_hat)
    b = np.asarray(theta_star)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def assumption_diagnostics(theta_k, theta_star, s, k=0):
    """Ratios whose boundedness by ``eta_k**2`` the convergence argument assumes.

    ``ratio1 = <T_k, T*> / ||T_k||^2``, ``ratio2 = <T_k S T_k, T*> / ||T_k||^2``
    and ``ratio3 = ||S - inv(T*)||^2 / ||T_k - T*||^2`` (``inf`` when
    ``T_k == T*``).
    """
    theta_k = np.asarray(theta_k, dtype=np.float64)
    theta_star = np.asarray(theta_star, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    sigma_star = spd_inverse(theta_star)
    norm_k = frob_inner(theta_k, theta_k)
    ratio1 = frob_inner(theta_k, theta_star) / norm_k if norm_k else math.inf
    ratio2 = frob_inner(theta_k @ s @ theta_k, theta_star) / norm_k \
        if norm_k else math.inf
    gap = frob_error(theta_k, theta_star) ** 2
    resid = frob_error(s, sigma_star) ** 2
    ratio3 = resid / gap if gap > 0 else math.inf
    return AssumptionReport(k=k, ratio1=ratio1, ratio2=ratio2, ratio3=ratio3)
