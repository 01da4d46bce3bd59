"""Bayesian centroid estimation of motif binding-site configurations."""

from .model import (
    Alphabet,
    BindingConfig,
    Composition,
    CountPrior,
    DataError,
    DirichletParams,
    DNA,
    Sequence,
    log_count_prior,
    max_sites,
    state_of_position,
)

__version__ = "0.1.0"
