"""Gibbs sampler for joint inference of compositions and binding configurations.

RNG streams: every draw comes from a generator keyed by the run seed and a
spawn key -- (sweep, sequence_index) for configuration draws, (sweep, m) for
the composition update, (0,) for initialization -- so serial and per-sequence
parallel execution produce identical chains.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from . import dp
from .likelihood import accumulate_counts, log_lambda_profile
from .model import (
    BindingConfig,
    Composition,
    DataError,
    log_binom,
    log_count_prior,
    max_sites,
)


@dataclass(frozen=True)
class GibbsSettings:
    iterations: int = 10000
    burn_in: int = None  # default iterations // 2
    seed: int = 0
    c_cap: int = None
    init: str = "prior"  # "prior" | "uniform"

    def __post_init__(self):
        if self.iterations < 1:
            raise DataError("iterations must be >= 1")
        burn = self.iterations // 2 if self.burn_in is None else self.burn_in
        if not 0 <= burn < self.iterations:
            raise DataError("burn_in must satisfy 0 <= burn_in < iterations")
        object.__setattr__(self, "burn_in", burn)
        if self.init not in ("prior", "uniform"):
            raise DataError(f"unknown init mode {self.init!r}")


@dataclass
class Chain:
    """Retained post-burn-in Gibbs states."""

    settings: GibbsSettings
    motif_len: int
    seq_lengths: list
    thetas: list = field(default_factory=list)  # (L+1, |S|) arrays
    configs: list = field(default_factory=list)  # per sweep: list of site tuples
    log_post: list = field(default_factory=list)  # per sweep (all sweeps)

    def __len__(self):
        return len(self.configs)


def _stream(seed, key):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def sample_dirichlet(alphas, rng):
    """Exact Dirichlet draw (normalized gamma variates)."""
    alphas = np.asarray(alphas, dtype=float)
    if (alphas <= 0).any():
        raise DataError("dirichlet parameters must be positive")
    draw = rng.dirichlet(alphas)
    # guard against zero components from extreme underflow
    if (draw <= 0).any():
        draw = np.clip(draw, np.finfo(float).tiny, None)
        draw /= draw.sum()
    return draw


def sample_count(count_post, rng):
    """Categorical draw of the number of sites from its posterior."""
    count_post = np.asarray(count_post, dtype=float)
    u = rng.random()
    return int(np.searchsorted(np.cumsum(count_post), u))


def sample_config_backtrack(log_f, log_lam, c, n, L, rng):
    """Exact draw from Pr(Y | c(Y)=c, R, Theta) by sampling sites last-to-first
    with weights read off the forward table."""
    if c == 0:
        return BindingConfig((), n, L)
    if c * L > n:
        raise DataError(f"no configuration with {c} sites fits n={n}, L={L}")
    sites = []
    upper = n + 1  # convention: virtual site after the sequence end
    for k in range(c, 0, -1):
        lo = (k - 1) * L + 1
        hi = upper - L
        ys = np.arange(lo, hi + 1)
        logw = log_f[k - 1, ys - 1] + log_lam[ys - 1]
        w = np.exp(logw - logw.max())
        cum = np.cumsum(w)
        y = int(ys[np.searchsorted(cum, rng.random() * cum[-1])])
        sites.append(y)
        upper = y
    sites.reverse()
    return BindingConfig(sites, n, L)


def _log_joint(counts, theta_rows, dirichlet, seqs, configs, priors, L):
    """Unnormalized log Pr(R, Y, Theta): convergence trace for external checks."""
    logt = np.log(theta_rows)
    ll = float((counts * logt).sum())
    lp_theta = float(
        ((dirichlet.alphas - 1) * logt).sum()
        + (gammaln(dirichlet.alphas.sum(axis=1)) - gammaln(dirichlet.alphas).sum(axis=1)).sum()
    )
    lp_y = 0.0
    for seq, config, prior in zip(seqs, configs, priors):
        n, c = len(seq), config.count
        lp_y += log_count_prior(c, n, L, prior)
        lp_y -= gammaln(n - c * (L - 1) + 1) - gammaln(c + 1) - gammaln(n - c * L + 1)
    return ll + lp_theta + lp_y


def gibbs_run(seqs, L, dirichlet, prior, settings):
    """Alternate exact configuration draws given Theta with conjugate Dirichlet
    updates of Theta given the configurations; fully deterministic per seed.

    `prior` is a CountPrior, or a list with one CountPrior per sequence.
    """
    if not seqs:
        raise DataError("no sequences to sample")
    priors = prior if isinstance(prior, (list, tuple)) else [prior] * len(seqs)
    if len(priors) != len(seqs):
        raise DataError("one count prior per sequence required")
    short = [s.id for s in seqs if len(s) < L]
    if len(short) == len(seqs):
        raise DataError("all sequences shorter than the motif")
    if short:
        raise DataError(f"sequences shorter than the motif: {short}")
    if dirichlet.motif_len != L:
        raise DataError("dirichlet pseudocount shape does not match motif length")
    m = len(seqs)
    num_symbols = len(seqs[0].alphabet)

    init_rng = _stream(settings.seed, (0,))
    if settings.init == "uniform":
        theta_rows = np.full((L + 1, num_symbols), 1.0 / num_symbols)
    else:
        theta_rows = np.array(
            [sample_dirichlet(a, init_rng) for a in dirichlet.alphas]
        )

    chain = Chain(settings=settings, motif_len=L, seq_lengths=[len(s) for s in seqs])
    caps = [
        max_sites(len(s), L) if settings.c_cap is None
        else min(settings.c_cap, max_sites(len(s), L))
        for s in seqs
    ]
    # per-sequence count-prior corrections are sweep-invariant
    corrections = [
        np.array([
            log_count_prior(c, len(seq), L, priors[i])
            - log_binom(len(seq) - c * (L - 1), c)
            for c in range(caps[i] + 1)
        ])
        for i, seq in enumerate(seqs)
    ]
    for t in range(1, settings.iterations + 1):
        theta = Composition(theta_rows)
        configs = []
        for i, seq in enumerate(seqs):
            rng = _stream(settings.seed, (t, i))
            configs.append(
                _draw_config(seq, theta, corrections[i], caps[i], rng)
            )
        counts = accumulate_counts(seqs, configs, L, num_symbols)
        theta_rng = _stream(settings.seed, (t, m))
        theta_rows = np.array(
            [sample_dirichlet(counts[j] + dirichlet.alphas[j], theta_rng)
             for j in range(L + 1)]
        )
        chain.log_post.append(
            _log_joint(counts, theta_rows, dirichlet, seqs, configs, priors, L)
        )
        if t > settings.burn_in:
            chain.thetas.append(theta_rows)
            chain.configs.append([cfg.sites for cfg in configs])
    return chain


def _draw_config(seq, theta, correction, c_cap, rng):
    n, L = len(seq), theta.motif_len
    loglam = log_lambda_profile(seq, theta)
    log_f = dp._forward_kernel(loglam, n, L, c_cap)
    logp = log_f[:, n] + correction
    count_post = np.exp(logp - logsumexp(logp))
    c = sample_count(count_post / count_post.sum(), rng)
    return sample_config_backtrack(log_f, loglam, c, n, L, rng)


def posterior_mean_theta(chain):
    if not chain.thetas:
        raise DataError("chain holds no retained samples")
    return np.mean(np.stack(chain.thetas), axis=0)


def estimate_marginals(chain, i):
    """Monte Carlo estimates of the count posterior and per-c site marginals for
    sequence i, as indicator frequencies over retained samples."""
    if not chain.configs:
        raise DataError("chain holds no retained samples")
    n, L = chain.seq_lengths[i], chain.motif_len
    C = max_sites(n, L)
    M = n - L + 1
    T = len(chain.configs)
    count_est = np.zeros(C + 1)
    hits = {}
    for sweep in chain.configs:
        sites = sweep[i]
        c = len(sites)
        count_est[c] += 1
        if c > 0:
            mat = hits.setdefault(c, np.zeros((c, M)))
            for k, y in enumerate(sites):
                mat[k, y - 1] += 1
    count_est /= T
    marginals = {c: mat / mat[0].sum() for c, mat in hits.items()}
    return count_est, marginals


def map_from_samples(chain, i):
    """Most frequent sampled configuration for sequence i (first attained wins
    ties) and its relative frequency."""
    if not chain.configs:
        raise DataError("chain holds no retained samples")
    n, L = chain.seq_lengths[i], chain.motif_len
    freq = {}
    order = []
    for sweep in chain.configs:
        sites = sweep[i]
        if sites not in freq:
            order.append(sites)
        freq[sites] = freq.get(sites, 0) + 1
    best = max(order, key=lambda s: freq[s])
    return BindingConfig(best, n, L), freq[best] / len(chain.configs)


def distance_matrix(chain, i, h):
    """Pairwise config_loss matrix over the distinct sampled configurations of
    sequence i, with their sample frequencies; for external projection."""
    from .loss import config_loss

    if not chain.configs:
        raise DataError("chain holds no retained samples")
    n, L = chain.seq_lengths[i], chain.motif_len
    freq = {}
    order = []
    for sweep in chain.configs:
        sites = sweep[i]
        if sites not in freq:
            order.append(sites)
        freq[sites] = freq.get(sites, 0) + 1
    configs = [BindingConfig(s, n, L) for s in order]
    T = len(chain.configs)
    frequencies = np.array([freq[s] / T for s in order])
    k = len(configs)
    mat = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            mat[a, b] = mat[b, a] = config_loss(configs[a], configs[b], n, L, h)
    return configs, frequencies, mat
