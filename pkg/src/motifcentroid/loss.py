"""State distances, generalized Hamming loss over configurations, and the gain
kernel used by centroid decoding."""

from dataclasses import dataclass

import numpy as np

from .model import DataError, state_of_position


@dataclass(frozen=True)
class StateDistance:
    """(L+1)x(L+1) symmetric distance between position states (0 = background)."""

    kind: str
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DataError("state distance must be square")
        if (values < 0).any() or not np.allclose(values, values.T):
            raise DataError("state distance must be symmetric nonnegative")
        if np.abs(np.diag(values)).max() > 0:
            raise DataError("state distance must have zero diagonal")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def motif_len(self):
        return self.values.shape[0] - 1


def indicator_distance(L):
    """h(i, j) = 1 iff exactly one of the states is background."""
    motif = np.arange(L + 1) > 0
    values = (motif[:, None] != motif[None, :]).astype(float)
    return StateDistance("indicator", values)


def symkl_distance(theta):
    """Symmetric Kullback-Leibler distance between composition rows."""
    logt = theta.log_rows()
    L = theta.motif_len
    values = np.zeros((L + 1, L + 1))
    for i in range(L + 1):
        for j in range(i + 1, L + 1):
            d = float(np.sum((theta.rows[i] - theta.rows[j]) * (logt[i] - logt[j])))
            values[i, j] = values[j, i] = d
    return StateDistance("symkl", values)


def state_distance(kind, theta=None, L=None):
    if kind == "indicator":
        if L is None:
            L = theta.motif_len
        return indicator_distance(L)
    if kind == "symkl":
        return symkl_distance(theta)
    raise DataError(f"unknown loss kind {kind!r}")


def null_loss(h):
    """H*: loss between two single-site configurations with disjoint sites."""
    L = h.motif_len
    return 2.0 * float(h.values[1:, 0].sum())


def single_site_loss(delta, L, h):
    """Loss between two single-site configurations whose starts differ by delta."""
    delta = abs(int(delta))
    if delta >= L:
        return null_loss(h)
    v = h.values
    tails = float(v[1 : delta + 1, 0].sum() + v[L - delta + 1 : L + 1, 0].sum())
    j = np.arange(1, L - delta + 1)
    overlap = float(v[j, j + delta].sum())
    return tails + overlap


@dataclass(frozen=True)
class GainKernel:
    """Similarity weights g(delta) = 1 - H(delta)/H* on offsets |delta| < L."""

    motif_len: int
    weights: np.ndarray  # length 2L-1, index delta + L - 1
    null: float

    def gain(self, delta):
        delta = int(delta)
        if abs(delta) >= self.motif_len:
            return 0.0
        return float(self.weights[delta + self.motif_len - 1])


def build_gain_kernel(h, L=None):
    if L is None:
        L = h.motif_len
    hstar = null_loss(h)
    if hstar <= 0:
        raise DataError("degenerate state distance: null-overlap loss is zero")
    deltas = np.arange(-(L - 1), L)
    weights = np.array([1.0 - single_site_loss(d, L, h) / hstar for d in deltas])
    weights.flags.writeable = False
    return GainKernel(motif_len=L, weights=weights, null=hstar)


def config_loss(a, b, n, L, h):
    """Generalized Hamming loss: position-wise state-distance sum over 1..n."""
    total = 0.0
    v = h.values
    for i in range(1, n + 1):
        total += v[state_of_position(i, a, L), state_of_position(i, b, L)]
    return float(total)


def paired_loss(a, b, L, h):
    """Order-matched loss sum over site pairs; upper-bounds config_loss."""
    if a.count != b.count:
        raise DataError("paired loss requires equal site counts")
    return float(
        sum(single_site_loss(abs(x - y), L, h) for x, y in zip(a.sites, b.sites))
    )


def gain_convolve(profile, kernel):
    """Convolve a start-position probability profile with the gain kernel.

    Positions outside the profile support contribute zero (no padding).
    """
    profile = np.asarray(profile, dtype=float)
    if (profile < 0).any():
        raise DataError("profile entries must be nonnegative")
    return np.convolve(profile, kernel.weights, mode="same")
