"""Exact forward/backward dynamic programming over binding-site configurations.

All tables are log-domain with -inf as the impossible-state sentinel: F[c, j]
sums likelihood ratios of all ways to place c sites in the first j positions,
B[c, j] the mirror image over the suffix starting at j.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.special import logsumexp

from .likelihood import log_lambda_profile
from .model import DataError, log_binom, log_count_prior, max_sites

NEG_INF = -np.inf


@njit(cache=True)
def _forward_kernel(loglam, n, L, C):
    logf = np.full((C + 1, n + 1), -np.inf)
    logf[0, :] = 0.0
    for c in range(1, C + 1):
        for j in range(c * L, n + 1):
            a = logf[c, j - 1]
            b = logf[c - 1, j - L] + loglam[j - L]
            if a == -np.inf:
                logf[c, j] = b
            elif b == -np.inf:
                logf[c, j] = a
            elif a >= b:
                logf[c, j] = a + math.log1p(math.exp(b - a))
            else:
                logf[c, j] = b + math.log1p(math.exp(a - b))
    return logf


@njit(cache=True)
def _backward_kernel(loglam, n, L, C):
    logb = np.full((C + 1, n + 2), -np.inf)
    logb[0, :] = 0.0
    for c in range(1, C + 1):
        for j in range(n - c * L + 1, 0, -1):
            a = logb[c, j + 1]
            b = logb[c - 1, j + L] + loglam[j - 1]
            if a == -np.inf:
                logb[c, j] = b
            elif b == -np.inf:
                logb[c, j] = a
            elif a >= b:
                logb[c, j] = a + math.log1p(math.exp(b - a))
            else:
                logb[c, j] = b + math.log1p(math.exp(a - b))
    return logb


@dataclass(frozen=True)
class DpTables:
    n: int
    motif_len: int
    c_max: int
    log_lam: np.ndarray  # (n-L+1,) log lambda(j), index j-1
    log_f: np.ndarray  # (C+1, n+1)
    log_b: np.ndarray  # (C+1, n+2)


def forward_sums(seq, theta, c_max=None):
    n, L = len(seq), theta.motif_len
    C = max_sites(n, L) if c_max is None else min(c_max, max_sites(n, L))
    return _forward_kernel(log_lambda_profile(seq, theta), n, L, C)


def backward_sums(seq, theta, c_max=None):
    n, L = len(seq), theta.motif_len
    C = max_sites(n, L) if c_max is None else min(c_max, max_sites(n, L))
    return _backward_kernel(log_lambda_profile(seq, theta), n, L, C)


def compute_tables(seq, theta, c_max=None):
    n, L = len(seq), theta.motif_len
    C = max_sites(n, L) if c_max is None else min(c_max, max_sites(n, L))
    loglam = log_lambda_profile(seq, theta)
    return DpTables(
        n=n,
        motif_len=L,
        c_max=C,
        log_lam=loglam,
        log_f=_forward_kernel(loglam, n, L, C),
        log_b=_backward_kernel(loglam, n, L, C),
    )


def count_posterior(tables, prior):
    """Pr(c(Y) = c | R, Theta) for c = 0..C, normalized over the (capped) range."""
    n, L, C = tables.n, tables.motif_len, tables.c_max
    logw = np.empty(C + 1)
    for c in range(C + 1):
        logw[c] = (
            tables.log_f[c, n]
            - log_binom(n - c * (L - 1), c)
            + log_count_prior(c, n, L, prior)
        )
    if np.all(np.isinf(logw)):
        raise DataError("count posterior degenerate: all weights zero")
    probs = np.exp(logw - logsumexp(logw))
    return probs / probs.sum()


def site_marginals(tables, c):
    """Pr(Y_k = y | c(Y) = c, R, Theta) as a (c, n-L+1) matrix; column y-1 holds
    start position y. Entries outside the admissible range of Y_k are zero."""
    n, L, C = tables.n, tables.motif_len, tables.c_max
    if not 1 <= c <= C:
        raise DataError(f"site count {c} out of range 1..{C}")
    M = n - L + 1
    probs = np.zeros((c, M))
    log_norm = tables.log_f[c, n]
    for k in range(1, c + 1):
        lo = (k - 1) * L + 1
        hi = n - (c - k + 1) * L + 1
        ys = np.arange(lo, hi + 1)
        lognum = (
            tables.log_f[k - 1, ys - 1]
            + tables.log_lam[ys - 1]
            + tables.log_b[c - k, ys + L]
        )
        probs[k - 1, ys - 1] = np.exp(lognum - log_norm)
    return probs
