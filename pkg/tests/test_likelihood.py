import numpy as np
import pytest

from motifcentroid.likelihood import (
    accumulate_counts,
    log_lambda,
    log_lambda_profile,
    log_likelihood,
)
from motifcentroid.model import BindingConfig, state_of_position

from conftest import random_sequence, random_theta


@pytest.fixture(scope="module")
def instance():
    rng = np.random.default_rng(11)
    return random_sequence(rng, 40), random_theta(rng, 4)


def test_profile_matches_pointwise_definition(instance):
    seq, theta = instance
    n, L = len(seq), theta.motif_len
    prof = log_lambda_profile(seq, theta)
    assert prof.shape == (n - L + 1,)
    logt = np.log(theta.rows)
    for j in range(1, n - L + 2):
        expected = sum(
            logt[i, seq.residues[j + i - 2]] - logt[0, seq.residues[j + i - 2]]
            for i in range(1, L + 1)
        )
        assert prof[j - 1] == pytest.approx(expected, abs=1e-12)
        assert log_lambda(seq, j, theta) == pytest.approx(expected, abs=1e-12)


def test_log_likelihood_decomposes_as_background_plus_ratios(instance):
    seq, theta = instance
    n, L = len(seq), theta.motif_len
    cfg = BindingConfig((3, 12, 30), n, L)
    logt = np.log(theta.rows)
    # direct positional evaluation
    direct = sum(
        logt[state_of_position(i, cfg, L), seq.residues[i - 1]] for i in range(1, n + 1)
    )
    assert log_likelihood(seq, cfg, theta) == pytest.approx(direct, abs=1e-10)
    # likelihood-ratio identity: loglik = background loglik + sum of log-lambdas
    bg = float(logt[0, seq.residues].sum())
    lam = log_lambda_profile(seq, theta)
    assert log_likelihood(seq, cfg, theta) == pytest.approx(
        bg + sum(lam[y - 1] for y in cfg.sites), abs=1e-10
    )


def test_accumulate_counts(instance):
    seq, theta = instance
    n, L = len(seq), theta.motif_len
    cfg = BindingConfig((1, 10), n, L)
    counts = accumulate_counts([seq], [cfg], L, 4)
    assert counts.shape == (L + 1, 4)
    assert counts.sum() == n
    assert counts[0].sum() == n - 2 * L
    for i in range(1, L + 1):
        for y in (1, 10):
            sym = seq.residues[y + i - 2]
            assert counts[i, sym] >= 1
    # symbol totals preserved
    totals = np.bincount(seq.residues, minlength=4)
    assert (counts.sum(axis=0) == totals).all()
