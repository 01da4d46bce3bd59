"""Acceptance gate: one test per criterion, at the stated tolerances.

Criterion 8 needs an external dataset that is not shipped, so it is excluded
from automated acceptance (skipped with an explanation).
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from motifcentroid import cli, dp, sampler
from motifcentroid.centroid import decode, single_site_centroid
from motifcentroid.likelihood import log_lambda_profile
from motifcentroid.loss import build_gain_kernel, indicator_distance, null_loss
from motifcentroid.model import (
    Composition,
    CountPrior,
    DirichletParams,
    log_binom,
    log_count_prior,
    max_sites,
)
from motifcentroid.simulate import SimSpec, simulate_dataset

from conftest import EBOX_THETA_ROWS, random_sequence, random_theta
from oracles import enum_posteriors, enumerate_configs


KNOWN_COUNT_POSTERIOR = [0.014, 0.075, 0.181, 0.254, 0.233, 0.147, 0.067]
KNOWN_LOCAL_CENTROIDS = {
    1: (36,),
    2: (36, 147),
    3: (13, 36, 147),
    4: (13, 36, 63, 147),
    5: (13, 36, 63, 147, 167),
    6: (3, 29, 36, 63, 147, 167),
}


@pytest.fixture(scope="module", autouse=True)
def warm_kernels(ebox_seq, ebox_theta):
    # compile the numba kernels outside any timed section
    dp.compute_tables(ebox_seq, ebox_theta, c_max=1)


def test_criterion_1_single_site_reproduction(ebox_seq, ebox_theta):
    start = time.perf_counter()
    tables = dp.compute_tables(ebox_seq, ebox_theta, c_max=1)
    marginal = dp.site_marginals(tables, 1)[0]
    kern = build_gain_kernel(indicator_distance(6), 6)
    centroid = single_site_centroid(marginal, kern)
    map_site = int(np.argmax(marginal)) + 1
    elapsed = time.perf_counter() - start
    assert centroid == 36
    assert map_site == 36
    assert elapsed < 1.0


def test_criterion_2_full_posterior_reproduction(ebox_seq, ebox_theta, ebox_prior):
    start = time.perf_counter()
    tables = dp.compute_tables(ebox_seq, ebox_theta)
    assert tables.c_max == 33
    count_post = dp.count_posterior(tables, ebox_prior)
    marg = {c: dp.site_marginals(tables, c) for c in range(1, tables.c_max + 1)}
    h = indicator_distance(6)
    kern = build_gain_kernel(h, 6)
    report = decode(count_post, marg, kern, h, len(ebox_seq), 6)
    elapsed = time.perf_counter() - start

    for c, expect in enumerate(KNOWN_COUNT_POSTERIOR):
        assert count_post[c] == pytest.approx(expect, abs=1e-3)
    for c, sites in KNOWN_LOCAL_CENTROIDS.items():
        assert report.local_set.configs[c].sites == sites
    assert report.global_config.sites == (13, 36, 147)
    assert report.one_global == 36
    coverage = report.coverage
    assert coverage[36 - 1] > 0.5
    assert elapsed < 5.0


def test_criterion_3_combinatorial_identities():
    priors = [CountPrior("uniform", None), CountPrior("markov", 0.97)]
    for L in range(1, 6):
        for n in range(L, 51):
            rng = np.random.default_rng(1000 * L + n)
            seq = random_sequence(rng, n)
            theta = Composition(np.full((L + 1, 4), 0.25))
            tables = dp.compute_tables(seq, theta)
            C = max_sites(n, L)
            for c in range(C + 1):
                expect = log_binom(n - c * (L - 1), c)
                got = tables.log_f[c, n]
                tol = 1e-9 * max(1.0, abs(expect))
                assert abs(got - expect) <= tol
            for prior in priors:
                post = dp.count_posterior(tables, prior)
                logs = np.array(
                    [log_count_prior(c, n, L, prior) for c in range(C + 1)]
                )
                w = np.exp(logs - logs.max())
                assert np.abs(post - w / w.sum()).max() < 1e-12


def test_criterion_4_brute_force_equivalence():
    from oracles import brute_centroids
    from motifcentroid.loss import config_loss

    L = 3
    h = indicator_distance(L)
    kern = build_gain_kernel(h, L)
    hstar = null_loss(h)
    rng = np.random.default_rng(99)
    cases = [(n, s) for n in range(7, 16) for s in range(2)]
    for n, _ in cases:
        seq = random_sequence(rng, n)
        theta = random_theta(rng, L)
        prior = CountPrior("markov", 0.9)
        tables = dp.compute_tables(seq, theta)
        count_post = dp.count_posterior(tables, prior)
        ecp, emarg, _ = enum_posteriors(seq, theta, prior)
        assert np.abs(count_post - ecp).max() < 1e-10
        marg = {c: dp.site_marginals(tables, c) for c in range(1, tables.c_max + 1)}
        for c in emarg:
            assert np.abs(marg[c] - emarg[c]).max() < 1e-10
        report = decode(count_post, marg, kern, h, n, L)
        bloc, bglob = brute_centroids(seq, theta, prior, h)
        for c, (cand, brute_loss) in bloc.items():
            if c == 0:
                continue
            assert report.local_set.configs[c].sites == cand.sites
            # DP objective relates to the paired loss: E[H_A|c] = H*(c - obj)
            got_loss = hstar * (c - report.local_set.objectives[c])
            assert abs(got_loss - brute_loss) < 1e-10
        assert report.global_config.sites == bglob[0].sites
        # mixture losses per candidate agree with direct evaluation
        for c_cand, cand in report.local_set.configs.items():
            direct = sum(
                count_post[k] * config_loss(cand, report.local_set.configs[k], n, L, h)
                for k in report.local_set.configs
                if count_post[k] > 0
            )
            assert abs(report.expected_losses[c_cand] - direct) < 1e-10


def test_criterion_5_sampler_calibration():
    # (a) stochastic backtracking matches the enumerated conditional posterior
    rng = np.random.default_rng(12345)
    n, L = 9, 3
    seq = random_sequence(rng, n)
    theta = random_theta(rng, L)
    prior = CountPrior("markov", 0.85)
    _, _, dist = enum_posteriors(seq, theta, prior)
    tables = dp.compute_tables(seq, theta)
    loglam = log_lambda_profile(seq, theta)
    for c in (1, 2):
        cond = {
            cfg.sites: p for cfg, p in dist.items() if cfg.count == c
        }
        total = sum(cond.values())
        cond = {s: p / total for s, p in cond.items()}
        draws = {}
        T = 100000
        for _ in range(T):
            cfg = sampler.sample_config_backtrack(tables.log_f, loglam, c, n, L, rng)
            draws[cfg.sites] = draws.get(cfg.sites, 0) + 1
        tv = 0.5 * sum(abs(draws.get(s, 0) / T - p) for s, p in cond.items())
        tv += 0.5 * sum(v / T for s, v in draws.items() if s not in cond)
        assert tv < 0.01

    # (b) Dirichlet conditional draws: first coordinate is Beta(a1, rest)
    alphas = np.array([3.0, 2.0, 1.0, 0.5])
    draws = np.array(
        [sampler.sample_dirichlet(alphas, rng)[0] for _ in range(5000)]
    )
    ks = stats.kstest(draws, stats.beta(alphas[0], alphas[1:].sum()).cdf)
    assert ks.pvalue > 0.01


def test_criterion_6_forward_backward_consistency():
    rng = np.random.default_rng(321)
    for _ in range(100):
        n = int(rng.integers(6, 60))
        L = int(rng.integers(2, 7))
        if L > n:
            continue
        seq = random_sequence(rng, n)
        theta = random_theta(rng, L)
        tables = dp.compute_tables(seq, theta)
        for c in range(tables.c_max + 1):
            f, b = tables.log_f[c, n], tables.log_b[c, 1]
            if np.isinf(f) and np.isinf(b):
                continue
            assert abs(f - b) < 1e-9
        for c in range(1, tables.c_max + 1):
            marg = dp.site_marginals(tables, c)
            assert np.abs(marg.sum(axis=1) - 1.0).max() < 1e-9


def test_criterion_7_gibbs_recovery_at_desk_scale(dna):
    theta = Composition(EBOX_THETA_ROWS)
    passes = 0
    for seed in range(1, 11):
        seqs, _ = simulate_dataset(
            SimSpec(num_seqs=20, length=200, theta=theta,
                    prior=CountPrior("markov", 0.995), seed=seed)
        )
        start = time.perf_counter()
        chain = sampler.gibbs_run(
            seqs, 6, DirichletParams.symmetric(6, 4, 1.0),
            CountPrior("markov", 0.985),
            sampler.GibbsSettings(iterations=10000, seed=seed),
        )
        elapsed = time.perf_counter() - start
        assert elapsed < 300.0
        mean = sampler.posterior_mean_theta(chain)
        consensus = "".join(dna.symbols[j] for j in mean[1:].argmax(axis=1))
        passes += consensus == "CACGTG"
    assert passes >= 9, f"consensus recovered in {passes}/10 runs"


def test_criterion_8_excluded_dataset():
    pytest.skip(
        "needs an external benchmark dataset that is not shipped; when "
        "supplied, reports emit expected losses for centroid vs MAP without "
        "asserting them"
    )


def _tree_bytes(root):
    return {
        p.relative_to(root): p.read_bytes()
        for p in sorted(Path(root).rglob("*"))
        if p.is_file()
    }


def test_criterion_9_byte_determinism(tmp_path):
    theta_doc = {"alphabet": "ACGT", "rows": EBOX_THETA_ROWS.tolist()}
    theta_file = tmp_path / "theta.json"
    theta_file.write_text(json.dumps(theta_doc))

    def pipeline(tag):
        base = tmp_path / tag
        sim = base / "sim"
        assert cli.main([
            "simulate", "--theta", str(theta_file), "--num-seqs", "3",
            "--length", "60", "--p", "0.95", "--seed", "11", "--out", str(sim),
        ]) == 0
        infer = base / "infer"
        assert cli.main([
            "infer", str(sim / "sequences.fasta"), "--theta", str(theta_file),
            "--p", "0.95", "--out", str(infer),
        ]) == 0
        gibbs = base / "gibbs"
        assert cli.main([
            "gibbs", str(sim / "sequences.fasta"), "--motif-len", "6",
            "--iterations", "40", "--burn-in", "20", "--p", "0.95",
            "--seed", "11", "--out", str(gibbs),
        ]) == 0
        assert cli.main(["report", str(infer)]) == 0
        return _tree_bytes(base)

    t1 = pipeline("a")
    t2 = pipeline("b")
    assert t1.keys() == t2.keys()
    different = [str(k) for k in t1 if t1[k] != t2[k]]
    assert not different, f"outputs differ between reruns: {different}"
