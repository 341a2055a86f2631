"""Exact marginal inference for Dirichlet-prior mixture models.

The heavy lifting lives in the C++ extension ``dirmix._core``; this package
re-exports its surface.
"""

from ._core import (
    BudgetError,
    CapacityError,
    DecompositionMismatchError,
    DegenerateEvidenceError,
    DomainError,
    Model,
    brute_force_ptilde,
    digamma,
    em_max_likelihood,
    factor_product_ptilde,
    gibbs_sample,
    interaction_graph,
    load_model,
    moments,
    partition_ptilde,
    permanent,
    pochhammer,
    posterior_mean,
    probability,
    ptilde,
    ptilde_all,
    sparse_posterior_mean,
    sparse_ptilde,
    tree_decomposition,
    variational_bayes,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "CapacityError",
    "DecompositionMismatchError",
    "DegenerateEvidenceError",
    "DomainError",
    "Model",
    "brute_force_ptilde",
    "digamma",
    "em_max_likelihood",
    "factor_product_ptilde",
    "gibbs_sample",
    "interaction_graph",
    "load_model",
    "moments",
    "partition_ptilde",
    "permanent",
    "pochhammer",
    "posterior_mean",
    "probability",
    "ptilde",
    "ptilde_all",
    "sparse_posterior_mean",
    "sparse_ptilde",
    "tree_decomposition",
    "variational_bayes",
]
