"""Core domain types: alphabets, sequences, compositions, configurations, priors.

Positions are 1-based everywhere in the public data model; residues are stored
internally as 0-based alphabet indices.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln


class DataError(ValueError):
    """Invalid input data (bad sequence, malformed file, shape mismatch)."""


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple = ("A", "C", "G", "T")

    def __post_init__(self):
        if len(self.symbols) < 2:
            raise DataError("alphabet needs at least 2 symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise DataError("alphabet symbols must be distinct")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.symbols)})

    def __len__(self):
        return len(self.symbols)

    def index(self, symbol):
        try:
            return self._index[symbol]
        except KeyError:
            raise DataError(f"symbol {symbol!r} not in alphabet") from None

    def encode(self, text):
        return np.array([self.index(ch) for ch in text], dtype=np.int64)

    def decode(self, residues):
        return "".join(self.symbols[r] for r in residues)


DNA = Alphabet()


@dataclass(frozen=True)
class Sequence:
    id: str
    residues: np.ndarray
    alphabet: Alphabet = DNA

    def __post_init__(self):
        res = np.asarray(self.residues, dtype=np.int64)
        if res.ndim != 1 or res.size < 1:
            raise DataError(f"sequence {self.id!r}: needs at least one residue")
        if res.min() < 0 or res.max() >= len(self.alphabet):
            raise DataError(f"sequence {self.id!r}: residue index out of range")
        res.flags.writeable = False
        object.__setattr__(self, "residues", res)

    @classmethod
    def from_string(cls, id, text, alphabet=DNA):
        return cls(id, alphabet.encode(text), alphabet)

    def __len__(self):
        return int(self.residues.size)

    def to_string(self):
        return self.alphabet.decode(self.residues)


@dataclass(frozen=True)
class Composition:
    """(L+1) x |S| stochastic matrix: row 0 background, rows 1..L motif positions."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] < 2:
            raise DataError("composition needs a background row and at least one motif row")
        if (rows < 0).any():
            raise DataError("composition entries must be nonnegative")
        if np.abs(rows.sum(axis=1) - 1.0).max() > 1e-12:
            raise DataError("composition rows must sum to 1")
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)

    @property
    def motif_len(self):
        return self.rows.shape[0] - 1

    @property
    def num_symbols(self):
        return self.rows.shape[1]

    def require_positive(self):
        """Reject zero entries before any log-likelihood evaluation."""
        if (self.rows <= 0).any():
            raise DataError("composition has zero entries; likelihoods undefined")
        return self

    def log_rows(self):
        self.require_positive()
        return np.log(self.rows)


@dataclass(frozen=True)
class DirichletParams:
    """(L+1) x |S| positive pseudocounts, one row per composition row."""

    alphas: np.ndarray

    def __post_init__(self):
        alphas = np.asarray(self.alphas, dtype=float)
        if alphas.ndim != 2 or (alphas <= 0).any():
            raise DataError("dirichlet pseudocounts must be a positive matrix")
        alphas.flags.writeable = False
        object.__setattr__(self, "alphas", alphas)

    @classmethod
    def symmetric(cls, motif_len, num_symbols, alpha=1.0):
        return cls(np.full((motif_len + 1, num_symbols), float(alpha)))

    @property
    def motif_len(self):
        return self.alphas.shape[0] - 1


class BindingConfig:
    """Sorted non-overlapping 1-based site starts within one sequence."""

    __slots__ = ("sites",)

    def __init__(self, sites, n, L):
        sites = tuple(int(y) for y in sites)
        if any(b - a < L for a, b in zip(sites, sites[1:])):
            raise DataError(f"sites {sites} overlap for motif length {L}")
        if sites and (sites[0] < 1 or sites[-1] > n - L + 1):
            raise DataError(f"sites {sites} out of range for n={n}, L={L}")
        if sorted(sites) != list(sites):
            raise DataError(f"sites {sites} not sorted")
        self.sites = sites

    @property
    def count(self):
        return len(self.sites)

    def __eq__(self, other):
        return isinstance(other, BindingConfig) and self.sites == other.sites

    def __hash__(self):
        return hash(self.sites)

    def __repr__(self):
        return f"BindingConfig{self.sites}"


@dataclass(frozen=True)
class CountPrior:
    kind: str = "uniform"  # "uniform" | "markov"
    p: float = None

    def __post_init__(self):
        if self.kind not in ("uniform", "markov"):
            raise DataError(f"unknown count prior kind {self.kind!r}")
        if self.kind == "markov" and not (self.p is not None and 0.0 < self.p < 1.0):
            raise DataError("markov count prior needs 0 < p < 1")


def max_sites(n, L):
    """Largest number of non-overlapping length-L sites in a length-n sequence."""
    if n < 1 or L < 1:
        raise DataError("n and L must be positive")
    return n // L


def state_of_position(i, config, L):
    """State of position i: 0 for background, else offset 1..L within its site."""
    if i < 1:
        raise DataError(f"position {i} out of range")
    for y in config.sites:
        if y <= i <= y + L - 1:
            return i - y + 1
    return 0


def log_binom(n, k):
    """log of the binomial coefficient via log-gamma; -inf when k > n."""
    if k < 0 or k > n:
        return -np.inf
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def log_count_prior(c, n, L, prior):
    """Unnormalized log prior weight on the number of sites c."""
    if c < 0 or c > max_sites(n, L):
        raise DataError(f"site count {c} out of range for n={n}, L={L}")
    if prior.kind == "uniform":
        return 0.0
    return (
        log_binom(n - c * (L - 1), c)
        + (n - c * L) * np.log(prior.p)
        + c * np.log1p(-prior.p)
    )
