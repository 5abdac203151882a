"""Synthetic GMRF problems: chain and random-sparsity precision matrices,
sampling, and empirical covariances.

Randomness goes through :class:`RngSpec`, which pins the bit generator
(PCG64) and numpy's ziggurat normal sampler, so a ``(algorithm, seed)`` pair
reproduces the same stream on the same build.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh

from . import defaults
from .linalg import cholesky, spd_inverse, sym_matrix

__all__ = [
    "RngSpec",
    "SyntheticProblem",
    "GenerationFailed",
    "chain_precision",
    "random_precision",
    "precision_from_factor",
    "sample_gmrf",
    "empirical_covariance",
    "make_problem",
    "support_pairs",
]


class GenerationFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class RngSpec:
    seed: int
    algorithm_name: str = defaults.RNG_ALGORITHM

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.algorithm_name != "PCG64":
            raise ValueError(f"unsupported bit generator {self.algorithm_name!r}")

    def generator(self):
        return np.random.Generator(np.random.PCG64(self.seed))


@dataclass(frozen=True)
class SyntheticProblem:
    kind: str
    theta_star: np.ndarray
    sigma: np.ndarray
    samples: np.ndarray
    s_hat: np.ndarray
    support: frozenset
    seed: int

    @property
    def p(self):
        return self.theta_star.shape[0]

    @property
    def n(self):
        return self.samples.shape[0]


def support_pairs(theta):
    """Off-diagonal support ``{(i, j): i < j, theta_ij != 0}``."""
    i, j = np.nonzero(np.triu(np.asarray(theta), 1))
    return frozenset(zip(i.tolist(), j.tolist()))


def chain_precision(p):
    """Tridiagonal precision with 1.25 on the diagonal and -0.5 next to it."""
    if p < 1:
        raise ValueError("p must be >= 1")
    theta = 1.25 * np.eye(p)
    idx = np.arange(p - 1)
    theta[idx, idx + 1] = -0.5
    theta[idx + 1, idx] = -0.5
    return theta


def precision_from_factor(u):
    """``U.T U + (|lambda_min(U.T U)| + 1) I``, SPD for any real ``U``."""
    u = np.atleast_2d(np.asarray(u, dtype=np.float64))
    g = u.T @ u
    lam_min = eigvalsh(g, subset_by_index=[0, 0])[0]
    return g + (abs(lam_min) + 1.0) * np.eye(g.shape[0])


def random_precision(p, target_nnz, rng, rows=None):
    """Random-sparsity precision ``U.T U + delta I`` with ``U`` in {0, +-1}.

    The density of ``U`` is bisected until the number of off-diagonal
    nonzero pairs lies within ``NNZ_BAND`` of ``(target_nnz - p) / 2``.
    ``target_nnz`` counts every nonzero entry, diagonal included.

    Parameters
    ----------
    p : int
    target_nnz : int
        Desired nonzero count of the result (``10 * p`` in the usual recipe).
    rng : RngSpec or numpy.random.Generator
    rows : int, optional
        Number of rows of ``U``; defaults to ``p``.

    Raises
    ------
    GenerationFailed
        If bisection does not land inside the band.
    """
    if target_nnz < p:
        raise ValueError("target_nnz must be >= p")
    gen = rng.generator() if isinstance(rng, RngSpec) else rng
    m = rows or p
    target_pairs = (target_nnz - p) / 2
    # one draw of positions and signs; the density only moves the cut-off,
    # so the support grows monotonically with it
    r = gen.random((m, p))
    signs = np.where(gen.random((m, p)) < 0.5, -1.0, 1.0)

    def pairs_at(q):
        u = np.where(r < q, signs, 0.0)
        g = u.T @ u
        return int(np.count_nonzero(np.triu(g, 1))), u

    lo, hi = 0.0, 1.0
    for _ in range(defaults.NNZ_MAX_ATTEMPTS):
        q = (lo + hi) / 2
        count, u = pairs_at(q)
        if abs(count - target_pairs) <= defaults.NNZ_BAND * target_pairs:
            return precision_from_factor(u)
        if count < target_pairs:
            lo = q
        else:
            hi = q
    raise GenerationFailed(
        f"could not reach {target_pairs:.0f} off-diagonal pairs for p={p}")


def sample_gmrf(theta_star, n, rng):
    """Draw ``n`` zero-mean samples ``x = L z`` with ``L L^T = inv(theta_star)``.

    Returns an ``(n, p)`` array, one sample per row.
    """
    gen = rng.generator() if isinstance(rng, RngSpec) else rng
    sigma = spd_inverse(sym_matrix(theta_star))
    chol = cholesky(sigma).lower
    z = gen.standard_normal((n, sigma.shape[0]))
    return z @ chol.T


def empirical_covariance(samples, center=False):
    """``X^T X / n``, optionally after removing column means."""
    x = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    if center:
        x = x - x.mean(axis=0)
    return sym_matrix(x.T @ x / x.shape[0])


def make_problem(kind, p, n=None, rng=0, target_nnz=None, center=False):
    """Ground truth, samples and empirical covariance for one benchmark draw.

    ``kind`` is ``"chain"`` or ``"random"``; ``n`` defaults to ``p // 2``
    and ``target_nnz`` (random graphs only) to ``10 * p``. ``rng`` is an
    :class:`RngSpec` or a seed.
    """
    kind = kind.lower()
    if p < 2:
        raise ValueError("p must be >= 2")
    n = n or max(p // 2, 1)
    spec = rng if isinstance(rng, RngSpec) else RngSpec(int(rng))
    gen = spec.generator()
    if kind == "chain":
        theta = chain_precision(p)
    elif kind == "random":
        theta = random_precision(p, target_nnz or defaults.NNZ_PER_DIM * p, gen)
    else:
        raise ValueError(f"unknown problem kind {kind!r}")
    x = sample_gmrf(theta, n, gen)
    return SyntheticProblem(kind=kind, theta_star=theta, sigma=spd_inverse(theta),
                            samples=x, s_hat=empirical_covariance(x, center),
                            support=support_pairs(theta), seed=spec.seed)
