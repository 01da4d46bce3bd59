"""Command-line surface: FASTA ingestion, file formats, and the subcommands
`simulate`, `infer`, `gibbs`, and `report`.

Formats: FASTA in; compositions and reports as JSON; per-position profiles as
two-column TSV (`position<TAB>value`); Gibbs chains as line-delimited JSON,
one sweep per line.
"""

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import centroid as centroid_mod
from . import dp, sampler, simulate
from .loss import build_gain_kernel, state_distance
from .model import (
    Alphabet,
    BindingConfig,
    Composition,
    CountPrior,
    DataError,
    DirichletParams,
    DNA,
    Sequence,
    max_sites,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# file formats

def parse_fasta(stream, alphabet=DNA):
    """Parse FASTA records into validated sequences; any non-alphabet symbol is
    a hard error reported with its line and column."""
    seqs = []
    header = None
    residues = []
    start_line = 0

    def flush():
        if header is None:
            return
        if not residues:
            raise DataError(f"record {header!r} (line {start_line}) has no residues")
        seqs.append(Sequence(header, np.concatenate(residues), alphabet))

    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(">"):
            flush()
            header = line[1:].split()[0] if line[1:].split() else None
            if not header:
                raise DataError(f"line {lineno}: empty FASTA header")
            start_line = lineno
            residues = []
        else:
            if header is None:
                raise DataError(f"line {lineno}: sequence data before any header")
            encoded = np.empty(len(line), dtype=np.int64)
            for col, ch in enumerate(line.upper(), start=1):
                try:
                    encoded[col - 1] = alphabet.index(ch)
                except DataError:
                    raise DataError(
                        f"line {lineno}, column {col}: invalid symbol {ch!r}"
                    ) from None
            residues.append(encoded)
    flush()
    if not seqs:
        raise DataError("empty FASTA input")
    return seqs


def write_fasta(path, seqs, width=60):
    with open(path, "w") as fh:
        for seq in seqs:
            fh.write(f">{seq.id}\n")
            text = seq.to_string()
            for i in range(0, len(text), width):
                fh.write(text[i : i + width] + "\n")


def load_theta(path):
    with open(path) as fh:
        doc = json.load(fh)
    try:
        alphabet = Alphabet(tuple(doc["alphabet"]))
        rows = np.asarray(doc["rows"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise DataError(f"{path}: bad composition file ({exc})") from None
    if rows.ndim != 2 or rows.shape[1] != len(alphabet):
        raise DataError(f"{path}: composition shape does not match alphabet")
    return Composition(rows), alphabet


def theta_to_doc(rows, alphabet):
    return {
        "alphabet": "".join(alphabet.symbols),
        "rows": [[float(v) for v in row] for row in rows],
    }


def write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def write_profile_tsv(path, values, start=1):
    with open(path, "w") as fh:
        fh.write("position\tvalue\n")
        for i, v in enumerate(values, start=start):
            fh.write(f"{i}\t{v:.12g}\n")


def _safe_name(name):
    return re.sub(r"[^A-Za-z0-9._-]", "_", name)


# ---------------------------------------------------------------------------
# report assembly

def _displayed_counts(count_post, threshold=0.95):
    """Counts 0..c where c is the smallest count with cumulative mass > threshold."""
    cum = np.cumsum(count_post)
    last = int(np.searchsorted(cum, threshold, side="right"))
    return list(range(0, min(last, len(count_post) - 1) + 1))


def write_sequence_report(out_dir, seq_id, report, extra=None):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cum = np.cumsum(report.count_posterior)
    shown = _displayed_counts(report.count_posterior)
    doc = {
        "id": seq_id,
        "n": report.n,
        "motif_len": report.motif_len,
        "max_sites": len(report.count_posterior) - 1,
        "modal_count": report.modal_count,
        "count_posterior": [float(p) for p in report.count_posterior],
        "local_centroids": [
            {
                "count": c,
                "sites": list(report.local_set.configs[c].sites),
                "objective": float(report.local_set.objectives[c]),
                "probability": float(report.count_posterior[c]),
                "cumulative": float(cum[c]),
                "expected_loss": float(report.expected_losses[c]),
            }
            for c in sorted(report.local_set.configs)
        ],
        "global_centroid": list(report.global_config.sites),
        "one_global_centroid": report.one_global,
    }
    if extra:
        doc.update(extra)
    write_json(out_dir / "report.json", doc)
    write_profile_tsv(out_dir / "count_posterior.tsv", report.count_posterior, start=0)
    write_profile_tsv(out_dir / "coverage.tsv", report.coverage)
    write_profile_tsv(out_dir / "coverage_convolved.tsv", report.coverage_scores)
    for c in shown:
        if c == 0 or c not in report.marginals_by_c:
            continue
        marg = report.marginals_by_c[c]
        scores = report.local_set.scores[c]
        for k in range(marg.shape[0]):
            write_profile_tsv(out_dir / f"marginal_c{c}_k{k + 1}.tsv", marg[k])
            write_profile_tsv(out_dir / f"score_c{c}_k{k + 1}.tsv", scores[k])
    return doc


def decode_sequence(count_post, marginals_by_c, theta_or_none, loss_kind, n, L):
    h = state_distance(loss_kind, theta=theta_or_none, L=L)
    kernel = build_gain_kernel(h, L)
    return centroid_mod.decode(count_post, marginals_by_c, kernel, h, n, L), h


# ---------------------------------------------------------------------------
# subcommands

def _add_prior_flags(p):
    p.add_argument("--prior", choices=["uniform", "markov"], default="markov")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--p", type=float, default=None,
                       help="Markov transition-to-background probability")
    group.add_argument("--expected-sites", type=float, default=None,
                       help="expected sites per sequence; converts to p = 1 - b/n")
    group.add_argument("--expected-sites-per-kb", type=float, default=None,
                       help="expected sites per thousand positions; p = 1 - b/1000")


def _make_prior(args, n):
    if args.prior == "uniform":
        if args.p is not None or args.expected_sites is not None \
                or args.expected_sites_per_kb is not None:
            raise UsageError("uniform prior takes no rate parameters")
        return CountPrior("uniform")
    if args.p is not None:
        return CountPrior("markov", args.p)
    if args.expected_sites is not None:
        return CountPrior("markov", 1.0 - args.expected_sites / n)
    if args.expected_sites_per_kb is not None:
        return CountPrior("markov", 1.0 - args.expected_sites_per_kb / 1000.0)
    raise UsageError("markov prior needs --p, --expected-sites, or "
                     "--expected-sites-per-kb")


def cmd_simulate(args):
    theta, alphabet = load_theta(args.theta)
    prior = _make_prior(args, args.length)
    spec = simulate.SimSpec(
        num_seqs=args.num_seqs,
        length=args.length,
        theta=theta,
        prior=prior,
        seed=args.seed,
        alphabet=alphabet,
    )
    seqs, truths = simulate.simulate_dataset(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_fasta(out / "sequences.fasta", seqs)
    write_json(out / "truth.json", {
        "seed": args.seed,
        "motif_len": theta.motif_len,
        "theta": theta_to_doc(theta.rows, alphabet),
        "prior": {"kind": prior.kind, "p": prior.p},
        "sites": [{"id": s.id, "sites": list(t.sites)} for s, t in zip(seqs, truths)],
    })
    print(f"wrote {len(seqs)} sequences to {out / 'sequences.fasta'}")
    return 0


def cmd_infer(args):
    theta, alphabet = load_theta(args.theta)
    L = theta.motif_len
    with open(args.fasta) as fh:
        seqs = parse_fasta(fh, alphabet)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    run_doc = {"command": "infer", "motif_len": L, "loss": args.loss,
               "c_cap": args.c_cap, "sequences": []}
    for seq in seqs:
        n = len(seq)
        if n < L:
            raise DataError(f"sequence {seq.id!r} shorter than motif ({n} < {L})")
        prior = _make_prior(args, n)
        tables = dp.compute_tables(seq, theta, c_max=args.c_cap)
        count_post = dp.count_posterior(tables, prior)
        marginals = {c: dp.site_marginals(tables, c)
                     for c in range(1, tables.c_max + 1)}
        loss_theta = theta if args.loss == "symkl" else None
        report, _ = decode_sequence(count_post, marginals, loss_theta, args.loss, n, L)
        seq_dir = out / _safe_name(seq.id)
        write_sequence_report(seq_dir, seq.id, report)
        run_doc["sequences"].append(_safe_name(seq.id))
        print(f"{seq.id}: global centroid {list(report.global_config.sites)}, "
              f"1-global {report.one_global}")
    write_json(out / "run.json", run_doc)
    return 0


def cmd_gibbs(args):
    alphabet = DNA
    with open(args.fasta) as fh:
        seqs = parse_fasta(fh, alphabet)
    L = args.motif_len
    if L is None:
        raise UsageError("gibbs requires --motif-len")
    dirichlet = DirichletParams.symmetric(L, len(alphabet), args.alpha)
    priors = [_make_prior(args, len(s)) for s in seqs]
    settings = sampler.GibbsSettings(
        iterations=args.iterations,
        burn_in=args.burn_in,
        seed=args.seed,
        c_cap=args.c_cap,
    )
    chain = sampler.gibbs_run(seqs, L, dirichlet, priors, settings)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "chain.ndjson", "w") as fh:
        for t, (theta_rows, configs) in enumerate(zip(chain.thetas, chain.configs)):
            fh.write(json.dumps({
                "sweep": settings.burn_in + t + 1,
                "theta": [[float(v) for v in row] for row in theta_rows],
                "configs": [list(sites) for sites in configs],
            }) + "\n")
    write_profile_tsv(out / "log_posterior.tsv", chain.log_post)

    theta_mean = sampler.posterior_mean_theta(chain)
    write_json(out / "theta_mean.json", theta_to_doc(theta_mean, alphabet))
    consensus = "".join(alphabet.symbols[int(np.argmax(theta_mean[j]))]
                        for j in range(1, L + 1))

    run_doc = {"command": "gibbs", "motif_len": L, "loss": args.loss,
               "iterations": args.iterations, "burn_in": settings.burn_in,
               "seed": args.seed, "c_cap": args.c_cap,
               "consensus": consensus, "sequences": []}
    mean_theta = Composition(theta_mean / theta_mean.sum(axis=1, keepdims=True))
    for i, seq in enumerate(seqs):
        n = len(seq)
        count_est, marginals = sampler.estimate_marginals(chain, i)
        loss_theta = mean_theta if args.loss == "symkl" else None
        report, h = decode_sequence(count_est, marginals, loss_theta, args.loss, n, L)
        map_config, map_freq = sampler.map_from_samples(chain, i)
        samples = [BindingConfig(s[i], n, L) for s in chain.configs]
        extra = {
            "map": {
                "sites": list(map_config.sites),
                "frequency": float(map_freq),
                "expected_loss": centroid_mod.expected_config_loss(
                    map_config, samples, n, L, h),
            },
            "centroid_expected_loss": centroid_mod.expected_config_loss(
                report.global_config, samples, n, L, h),
        }
        seq_dir = out / _safe_name(seq.id)
        write_sequence_report(seq_dir, seq.id, report, extra=extra)
        configs, freqs, mat = sampler.distance_matrix(chain, i, h)
        with open(seq_dir / "distances.tsv", "w") as fh:
            labels = [",".join(map(str, c.sites)) if c.sites else "-"
                      for c in configs]
            fh.write("config\tfrequency\t" + "\t".join(labels) + "\n")
            for label, f, row in zip(labels, freqs, mat):
                fh.write(label + f"\t{f:.12g}\t"
                         + "\t".join(f"{v:.12g}" for v in row) + "\n")
        run_doc["sequences"].append(_safe_name(seq.id))
        print(f"{seq.id}: global centroid {list(report.global_config.sites)}, "
              f"MAP {list(map_config.sites)} (freq {map_freq:.3f})")
    write_json(out / "run.json", run_doc)
    print(f"consensus: {consensus}")
    return 0


def cmd_report(args):
    from . import plots

    out = Path(args.run_dir)
    run_file = out / "run.json"
    if not run_file.exists():
        raise DataError(f"{out}: no run.json; not an output directory")
    with open(run_file) as fh:
        run_doc = json.load(fh)
    made = plots.render_run(out, run_doc)
    for path in made:
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# entry point

def build_parser():
    parser = _Parser(prog="motifcentroid",
                     description="Bayesian centroid estimation of motif "
                                 "binding-site configurations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate synthetic sequences",
                       description="Draw site configurations from the count "
                                   "prior and emit sequences from the model.")
    p.add_argument("--theta", required=True, help="composition JSON file")
    p.add_argument("--num-seqs", type=int, default=20)
    p.add_argument("--length", type=int, default=200)
    _add_prior_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("infer", help="exact inference with a known composition",
                       description="Exact count posterior, site marginals, "
                                   "coverage profile, and centroids per "
                                   "sequence given a composition matrix.")
    p.add_argument("fasta")
    p.add_argument("--theta", required=True, help="composition JSON file")
    _add_prior_flags(p)
    p.add_argument("--c-cap", type=int, default=None,
                   help="cap on sites per sequence; posteriors are then "
                        "conditional on the count being at most the cap")
    p.add_argument("--loss", choices=["indicator", "symkl"], default="indicator")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("gibbs", help="Gibbs sampling with unknown composition",
                       description="Joint sampling of compositions and site "
                                   "configurations; Monte Carlo versions of "
                                   "the exact reports.")
    p.add_argument("fasta")
    p.add_argument("--motif-len", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.0,
                   help="symmetric Dirichlet pseudocount")
    _add_prior_flags(p)
    p.add_argument("--iterations", type=int, default=10000)
    p.add_argument("--burn-in", type=int, default=None,
                   help="default: iterations // 2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c-cap", type=int, default=None)
    p.add_argument("--loss", choices=["indicator", "symkl"], default="indicator")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gibbs)

    p = sub.add_parser("report", help="render figures for a finished run",
                       description="Render profile and posterior figures next "
                                   "to the TSV outputs of infer or gibbs.")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
