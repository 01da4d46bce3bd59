import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from motifcentroid.model import (
    Alphabet,
    BindingConfig,
    Composition,
    CountPrior,
    DataError,
    DirichletParams,
    Sequence,
    log_binom,
    log_count_prior,
    max_sites,
    state_of_position,
)

from oracles import enumerate_configs


def test_alphabet_roundtrip():
    ab = Alphabet()
    assert ab.symbols == ("A", "C", "G", "T")
    assert ab.decode(ab.encode("GATTACA")) == "GATTACA"
    assert ab.index("T") == 3
    with pytest.raises(DataError):
        ab.index("X")


def test_sequence_from_string_rejects_bad_symbols():
    with pytest.raises(DataError):
        Sequence.from_string("s", "ACGTN")


def test_composition_validates_rows():
    rows = np.full((4, 4), 0.25)
    comp = Composition(rows)
    assert comp.motif_len == 3
    assert comp.num_symbols == 4
    bad = rows.copy()
    bad[1, 0] = 0.5
    with pytest.raises(DataError):
        Composition(bad)


def test_composition_require_positive():
    rows = np.full((2, 4), 0.25)
    rows[1] = [0.5, 0.5, 0.0, 0.0]
    with pytest.raises(DataError):
        Composition(rows).require_positive()


def test_dirichlet_symmetric():
    d = DirichletParams.symmetric(6, 4, 2.0)
    assert d.alphas.shape == (7, 4)
    assert (d.alphas == 2.0).all()
    assert d.motif_len == 6


def test_binding_config_validation():
    cfg = BindingConfig((1, 4, 9), 12, 3)
    assert cfg.count == 3
    with pytest.raises(DataError):
        BindingConfig((1, 3), 12, 3)  # gap < L
    with pytest.raises(DataError):
        BindingConfig((4, 1), 12, 3)  # unsorted
    with pytest.raises(DataError):
        BindingConfig((11,), 12, 3)  # runs off the end
    with pytest.raises(DataError):
        BindingConfig((0,), 12, 3)  # positions are one-based


def test_max_sites():
    assert max_sites(200, 6) == 33
    assert max_sites(12, 3) == 4
    assert max_sites(2, 3) == 0


def test_state_of_position():
    cfg = BindingConfig((2, 7), 10, 3)
    # [TRIVIAL] background before, offsets 1..L within each site
    assert [state_of_position(i, cfg, 3) for i in range(1, 11)] == [
        0, 1, 2, 3, 0, 0, 1, 2, 3, 0,
    ]


@settings(deadline=None, max_examples=30)
@given(st.integers(3, 24), st.integers(1, 4))
def test_config_count_matches_binomial(n, L):
    # [DERIVED] number of c-site configurations is binom(n - c(L-1), c)
    from math import comb

    for c in range(max_sites(n, L) + 1):
        got = len(enumerate_configs(n, L, c))
        assert got == comb(n - c * (L - 1), c)


def test_log_binom_matches_math_comb():
    from math import comb, log

    for n in range(0, 40, 7):
        for k in range(0, n + 1, 3):
            assert log_binom(n, k) == pytest.approx(log(comb(n, k)), abs=1e-9)


def test_markov_count_prior_normalizes():
    # [DERIVED] normalized over the attainable counts the prior sums to one
    n, L = 50, 4
    prior = CountPrior("markov", 0.9)
    logs = np.array([log_count_prior(c, n, L, prior) for c in range(max_sites(n, L) + 1)])
    w = np.exp(logs - logs.max())
    assert (w / w.sum() > 0).all()


def test_uniform_count_prior_is_flat():
    prior = CountPrior("uniform", None)
    vals = {log_count_prior(c, 30, 3, prior) for c in range(max_sites(30, 3) + 1)}
    assert len(vals) == 1


def test_count_prior_kind_validation():
    with pytest.raises(DataError):
        CountPrior("poisson", 0.5)
    with pytest.raises(DataError):
        CountPrior("markov", 1.5)
