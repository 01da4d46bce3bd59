"""Synthetic data: configurations drawn from the count prior, sequences from
the product-multinomial model."""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .model import (
    Alphabet,
    BindingConfig,
    Composition,
    CountPrior,
    DataError,
    DNA,
    Sequence,
    log_count_prior,
    max_sites,
)


@dataclass(frozen=True)
class SimSpec:
    num_seqs: int
    length: int
    theta: Composition
    prior: CountPrior
    seed: int = 0
    alphabet: Alphabet = DNA

    def __post_init__(self):
        if self.num_seqs < 1:
            raise DataError("need at least one sequence")
        if self.length < self.theta.motif_len:
            raise DataError("sequence length must be at least the motif length")


def sample_prior_config(n, L, prior, rng):
    """Draw c from the normalized count prior, then a uniformly random placement
    of c non-overlapping sites via the gap bijection: a sorted c-subset of
    n - c(L-1) slots re-inflates to site starts with spacing >= L."""
    C = max_sites(n, L)
    logw = np.array([log_count_prior(c, n, L, prior) for c in range(C + 1)])
    probs = np.exp(logw - logsumexp(logw))
    c = int(rng.choice(C + 1, p=probs / probs.sum()))
    if c == 0:
        return BindingConfig((), n, L)
    slots = np.sort(rng.choice(n - c * (L - 1), size=c, replace=False)) + 1
    sites = slots + np.arange(c) * (L - 1)
    return BindingConfig(sites, n, L)


def generate_sequence(config, n, theta, rng, alphabet=DNA, id="sim"):
    """Emit a sequence: background positions from row 0, site offsets j from row j."""
    L = theta.motif_len
    num_symbols = theta.num_symbols
    if num_symbols != len(alphabet):
        raise DataError("composition width does not match alphabet size")
    residues = rng.choice(num_symbols, size=n, p=theta.rows[0])
    for y in config.sites:
        for j in range(L):
            residues[y - 1 + j] = rng.choice(num_symbols, p=theta.rows[j + 1])
    return Sequence(id, residues, alphabet)


def simulate_dataset(spec):
    """Generate (sequences, true configs) under the model; deterministic per seed."""
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    L = spec.theta.motif_len
    seqs, truths = [], []
    for i in range(spec.num_seqs):
        config = sample_prior_config(spec.length, L, spec.prior, rng)
        seq = generate_sequence(
            config, spec.length, spec.theta, rng, spec.alphabet, id=f"sim{i + 1:03d}"
        )
        seqs.append(seq)
        truths.append(config)
    return seqs, truths
