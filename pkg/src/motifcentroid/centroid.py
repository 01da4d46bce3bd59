"""Centroid decoding: single-site centroid, local centroids per site count,
global centroid over local candidates, coverage profile, 1-global centroid."""

from dataclasses import dataclass, field

import numpy as np

from .loss import config_loss, gain_convolve
from .model import BindingConfig, DataError


def _argmax_first(values):
    """Index of the maximum, smallest index on ties."""
    return int(np.argmax(values))


def single_site_centroid(profile, kernel):
    """Best single start position of a normalized start-position posterior."""
    profile = np.asarray(profile, dtype=float)
    if profile.size == 0:
        raise DataError("empty posterior profile")
    return _argmax_first(gain_convolve(profile, kernel)) + 1


def local_centroid(marginals, kernel, n, L):
    """Best configuration with exactly c sites, c = number of marginal rows.

    Maximizes the sum of gain-convolved marginal rows over ordered starts with
    gap >= L, via partial maxima with backtrack pointers; a running prefix
    maximum per level keeps each level O(n).
    """
    marginals = np.asarray(marginals, dtype=float)
    c, M = marginals.shape
    if M != n - L + 1:
        raise DataError("marginal rows must span starts 1..n-L+1")
    if c * L > n:
        raise DataError(f"no configuration with {c} sites fits n={n}, L={L}")
    f = np.array([gain_convolve(marginals[k], kernel) for k in range(c)])
    m = np.full((c, M), -np.inf)
    back = np.full((c, M), -1, dtype=np.int64)
    lo0 = 0  # level-1 range: 1 .. n - cL + 1
    hi0 = n - c * L
    m[0, lo0 : hi0 + 1] = f[0, lo0 : hi0 + 1]
    for k in range(1, c):
        lo = k * L  # 0-based index of (k)L + 1
        hi = n - (c - k) * L  # 0-based index of n - (c-k)L + 1
        best = -np.inf
        best_idx = -1
        feed = k * L - L  # next predecessor index to absorb: starts at (k-1)L+1
        for y in range(lo, hi + 1):
            limit = y - L  # predecessors allowed up to y - L (0-based)
            while feed <= limit:
                if m[k - 1, feed] > best:
                    best = m[k - 1, feed]
                    best_idx = feed
                feed += 1
            m[k, y] = f[k, y] + best
            back[k, y] = best_idx
    lo_last = (c - 1) * L
    tail = m[c - 1, lo_last:]
    y = lo_last + _argmax_first(tail)
    objective = float(m[c - 1, y])
    sites = [y + 1]
    for k in range(c - 1, 0, -1):
        y = int(back[k, y])
        sites.append(y + 1)
    sites.reverse()
    return BindingConfig(sites, n, L), objective


@dataclass(frozen=True)
class LocalCentroidSet:
    """Local centroids indexed by site count c = 0..C (c=0 is the empty config)."""

    n: int
    motif_len: int
    configs: dict  # c -> BindingConfig
    objectives: dict  # c -> best convolved-score sum
    scores: dict = field(default_factory=dict)  # c -> (c, n-L+1) convolved rows


def compute_local_centroids(marginals_by_c, kernel, n, L):
    configs = {0: BindingConfig((), n, L)}
    objectives = {0: 0.0}
    scores = {}
    for c, marg in sorted(marginals_by_c.items()):
        if c == 0:
            continue
        config, objective = local_centroid(marg, kernel, n, L)
        configs[c] = config
        objectives[c] = objective
        scores[c] = np.array([gain_convolve(row, kernel) for row in marg])
    return LocalCentroidSet(n, L, configs, objectives, scores)


def coverage_profile(count_post, marginals_by_c):
    """P_c(i): posterior probability that some binding site starts at i."""
    count_post = np.asarray(count_post, dtype=float)
    sizes = [m.shape[1] for m in marginals_by_c.values()]
    if not sizes:
        return np.zeros(0)
    profile = np.zeros(sizes[0])
    for c, marg in marginals_by_c.items():
        if c == 0:
            continue
        if count_post[c] > 0:
            profile += count_post[c] * marg.sum(axis=0)
    return profile


def one_global_centroid(coverage, kernel):
    """Single start maximizing the gain-convolved coverage profile; None when
    the coverage profile is identically zero (no-site outcome)."""
    coverage = np.asarray(coverage, dtype=float)
    if coverage.size == 0 or coverage.max() == 0.0:
        return None
    return _argmax_first(gain_convolve(coverage, kernel)) + 1


def expected_config_loss(candidate, dist, n, L, h):
    """Expected generalized Hamming loss of a candidate configuration.

    `dist` is either a list of (config, weight) pairs with weights summing to
    one, or a plain list of sampled configs (equal weights).
    """
    if len(dist) == 0:
        raise DataError("empty configuration distribution")
    if isinstance(dist[0], tuple):
        return float(
            sum(w * config_loss(candidate, y, n, L, h) for y, w in dist)
        )
    return float(
        sum(config_loss(candidate, y, n, L, h) for y in dist) / len(dist)
    )


def global_centroid(local_set, count_post, n, L, h):
    """Candidate among the local centroids minimizing the expected loss against
    the count-posterior mixture of local centroids.

    Ties break to the smaller site count, then the lexicographically smaller
    configuration. Returns (config, expected-loss by candidate c).
    """
    count_post = np.asarray(count_post, dtype=float)
    support = [c for c in range(count_post.size) if count_post[c] > 0]
    missing = [c for c in support if c not in local_set.configs]
    if missing:
        raise DataError(f"local centroids missing for counts {missing}")
    candidates = sorted(local_set.configs.items())
    losses = {}
    best_c, best_loss = None, np.inf
    for c_cand, config in candidates:
        loss = sum(
            count_post[c] * config_loss(local_set.configs[c], config, n, L, h)
            for c in support
        )
        losses[c_cand] = float(loss)
        if loss < best_loss:
            best_loss, best_c = loss, c_cand
    return local_set.configs[best_c], losses


@dataclass(frozen=True)
class CentroidReport:
    """Full decoding summary for one sequence."""

    n: int
    motif_len: int
    count_posterior: np.ndarray
    marginals_by_c: dict
    local_set: LocalCentroidSet
    global_config: BindingConfig
    expected_losses: dict  # candidate c -> expected loss
    coverage: np.ndarray
    coverage_scores: np.ndarray
    one_global: int  # None when coverage is all-zero

    @property
    def modal_count(self):
        return int(np.argmax(self.count_posterior))


def decode(count_post, marginals_by_c, kernel, h, n, L):
    """Assemble the centroid report from a count posterior and per-c marginals."""
    local_set = compute_local_centroids(marginals_by_c, kernel, n, L)
    config, losses = global_centroid(local_set, count_post, n, L, h)
    coverage = coverage_profile(count_post, marginals_by_c)
    scores = gain_convolve(coverage, kernel) if coverage.size else coverage
    return CentroidReport(
        n=n,
        motif_len=L,
        count_posterior=np.asarray(count_post, dtype=float),
        marginals_by_c=marginals_by_c,
        local_set=local_set,
        global_config=config,
        expected_losses=losses,
        coverage=coverage,
        coverage_scores=scores,
        one_global=one_global_centroid(coverage, kernel),
    )
