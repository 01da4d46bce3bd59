import numpy as np
import pytest

from motifcentroid.model import Alphabet, Composition, CountPrior, Sequence

# 200-nt E-box example sequence used across the exact-reproduction tests.
EBOX_TEXT = (
    "GCCACTTTCGGGCCCGTGTCTAACGCACCACGGGCTACGTGACGGTGTGG"
    "CTCTATACTGACGACGTGAACCAAGCTTTACTGAAGGACTTGCTGTTCCC"
    "CGACCCATTTCCTGCCAGAACCTCTGACCAGTGTCTAGGGCTATCGCCCG"
    "TGATGTCTCATGGCGACGCGCGAGGCGGTTGCTCGCCTCACTCCGTTCTG"
)

# Background row plus six motif rows for the CACGTG-consensus test matrix.
EBOX_THETA_ROWS = np.array(
    [
        [0.2, 0.3, 0.3, 0.2],
        [0.1, 0.7, 0.1, 0.1],
        [0.7, 0.1, 0.1, 0.1],
        [0.1, 0.7, 0.1, 0.1],
        [0.1, 0.1, 0.7, 0.1],
        [0.1, 0.1, 0.1, 0.7],
        [0.1, 0.1, 0.7, 0.1],
    ]
)


@pytest.fixture(scope="session")
def dna():
    return Alphabet()


@pytest.fixture(scope="session")
def ebox_seq(dna):
    return Sequence.from_string("ebox", EBOX_TEXT, dna)


@pytest.fixture(scope="session")
def ebox_theta():
    return Composition(EBOX_THETA_ROWS)


@pytest.fixture(scope="session")
def ebox_prior():
    return CountPrior("markov", 0.985)


def random_theta(rng, L, num_symbols=4):
    """A strictly positive random composition for oracle comparisons."""
    rows = rng.dirichlet(np.ones(num_symbols), size=L + 1)
    rows = np.clip(rows, 1e-3, None)
    return Composition(rows / rows.sum(axis=1, keepdims=True))


def random_sequence(rng, n, num_symbols=4, id="rnd"):
    ab = Alphabet()
    return Sequence(id, rng.integers(0, num_symbols, size=n), ab)
