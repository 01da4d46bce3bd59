"""Product-multinomial likelihood machinery in log domain."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .model import DataError


def log_lambda_profile(seq, theta):
    """Log composition ratios log lambda(j) for every start j = 1..n-L+1.

    lambda(j) is the likelihood ratio between placing a site at j and leaving
    the same window as background.
    """
    L = theta.motif_len
    n = len(seq)
    if n < L:
        raise DataError(f"sequence {seq.id!r} shorter than motif ({n} < {L})")
    logt = theta.log_rows()
    diff = logt[1:] - logt[0]  # (L, |S|)
    windows = sliding_window_view(seq.residues, L)  # (n-L+1, L)
    return diff[np.arange(L)[None, :], windows].sum(axis=1)


def log_lambda(seq, j, theta):
    """Log composition ratio for a single candidate start j (1-based)."""
    L = theta.motif_len
    if j < 1 or j > len(seq) - L + 1:
        raise DataError(f"start {j} out of range")
    logt = theta.log_rows()
    window = seq.residues[j - 1 : j - 1 + L]
    idx = np.arange(L)
    return float((logt[1 + idx, window] - logt[0, window]).sum())


def log_likelihood(seq, config, theta):
    """Full-sequence log-likelihood log Pr(R | Y, Theta)."""
    logt = theta.log_rows()
    L = theta.motif_len
    background = float(logt[0, seq.residues].sum())
    total = background
    for y in config.sites:
        window = seq.residues[y - 1 : y - 1 + L]
        idx = np.arange(L)
        total += float(logt[1 + idx, window].sum() - logt[0, window].sum())
    return total


def accumulate_counts(seqs, configs, L, num_symbols=None):
    """Sufficient-statistic counts: row 0 background symbols, row j symbols at
    motif offset j across all sites of all sequences."""
    if len(seqs) != len(configs):
        raise DataError("one binding configuration per sequence required")
    if num_symbols is None:
        num_symbols = len(seqs[0].alphabet)
    counts = np.zeros((L + 1, num_symbols), dtype=np.int64)
    for seq, config in zip(seqs, configs):
        covered = np.zeros(len(seq), dtype=bool)
        for y in config.sites:
            covered[y - 1 : y - 1 + L] = True
            window = seq.residues[y - 1 : y - 1 + L]
            np.add.at(counts, (np.arange(1, L + 1), window), 1)
        np.add.at(counts[0], seq.residues[~covered], 1)
    return counts
