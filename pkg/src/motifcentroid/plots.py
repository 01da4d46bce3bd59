"""Figure rendering for finished runs: posterior profiles and their
gain-convolved scores, drawn next to the TSV files they come from."""

import json
import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def _read_profile(path):
    data = np.loadtxt(path, delimiter="\t", skiprows=1, ndmin=2)
    return data[:, 0].astype(int), data[:, 1]


def _mark_sites(ax, sites, L, color, y=-0.02):
    for s in sites:
        ax.plot([s, s + L - 1], [y, y], lw=3, color=color, solid_capstyle="butt")


def render_sequence_dir(seq_dir):
    seq_dir = Path(seq_dir)
    with open(seq_dir / "report.json") as fh:
        report = json.load(fh)
    L = report["motif_len"]
    made = []

    counts, probs = _read_profile(seq_dir / "count_posterior.tsv")
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ax.bar(counts, probs, color="steelblue")
    ax.set_xlabel("number of binding sites")
    ax.set_ylabel("posterior probability")
    ax.axvline(report["modal_count"], color="k", ls=":", lw=1)
    fig.tight_layout()
    path = seq_dir / "count_posterior.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    made.append(path)

    pos, coverage = _read_profile(seq_dir / "coverage.tsv")
    _, scores = _read_profile(seq_dir / "coverage_convolved.tsv")
    fig, ax = plt.subplots(figsize=(8, 3.2))
    ax.plot(pos, coverage, "-", color="k", lw=1, label="coverage")
    ax.plot(pos, scores, ":", color="firebrick", lw=1.2, label="convolved score")
    _mark_sites(ax, report["global_centroid"], L, "k")
    if report.get("one_global_centroid") is not None:
        ax.axvline(report["one_global_centroid"], color="gray", ls="--", lw=0.8)
    ax.set_xlabel("position")
    ax.set_ylabel("probability / score")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    path = seq_dir / "coverage.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    made.append(path)

    by_c = {}
    for tsv in seq_dir.glob("marginal_c*_k*.tsv"):
        m = re.match(r"marginal_c(\d+)_k(\d+)\.tsv", tsv.name)
        by_c.setdefault(int(m.group(1)), []).append((int(m.group(2)), tsv))
    for c, rows in sorted(by_c.items()):
        rows.sort()
        fig, axes = plt.subplots(len(rows), 1, figsize=(8, 1.6 * len(rows) + 1),
                                 sharex=True, squeeze=False)
        for (k, tsv), ax in zip(rows, axes[:, 0]):
            pos, marg = _read_profile(tsv)
            _, score = _read_profile(seq_dir / f"score_c{c}_k{k}.tsv")
            ax.plot(pos, marg, "-", color="k", lw=1)
            ax.plot(pos, score, ":", color="firebrick", lw=1.2)
            ax.set_ylabel(f"site {k}", fontsize=8)
        local = next((e for e in report["local_centroids"] if e["count"] == c), None)
        if local:
            _mark_sites(axes[-1, 0], local["sites"], L, "gray")
        axes[-1, 0].set_xlabel("position")
        fig.suptitle(f"site marginals, {c} binding sites", fontsize=10)
        fig.tight_layout()
        path = seq_dir / f"marginals_c{c}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        made.append(path)
    return made


def render_run(run_dir, run_doc):
    run_dir = Path(run_dir)
    made = []
    for name in run_doc.get("sequences", []):
        made.extend(render_sequence_dir(run_dir / name))
    trace = run_dir / "log_posterior.tsv"
    if trace.exists():
        sweep, logp = _read_profile(trace)
        fig, ax = plt.subplots(figsize=(6, 3))
        ax.plot(sweep, logp, lw=0.7, color="k")
        ax.set_xlabel("sweep")
        ax.set_ylabel("log joint density")
        fig.tight_layout()
        path = run_dir / "log_posterior.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        made.append(path)
    return made
