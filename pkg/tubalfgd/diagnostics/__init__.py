from tubalfgd.diagnostics.rates import RateFit, rate_fit
from tubalfgd.diagnostics.subspace import (
    ErrorTerms,
    SubspaceBasis,
    error_terms,
    sample_deviation,
    subspace_basis,
    subspace_split,
    tilde_update,
)

__all__ = [
    "SubspaceBasis",
    "ErrorTerms",
    "subspace_basis",
    "subspace_split",
    "error_terms",
    "tilde_update",
    "sample_deviation",
    "RateFit",
    "rate_fit",
]
