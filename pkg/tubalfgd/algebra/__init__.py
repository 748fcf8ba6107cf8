from tubalfgd.algebra.oracle import bcirc_matrix, fold, t_product_oracle, unfold
from tubalfgd.algebra.tensor import (
    SpectralTensor,
    Tensor3,
    conj_transpose,
    fft3,
    fro_norm,
    identity_tensor,
    ifft3,
    inner,
    lateral_slices,
    random_tensor,
    spectral_norm,
    sym,
    t_product,
    zeros,
)

__all__ = [
    "Tensor3",
    "SpectralTensor",
    "fft3",
    "ifft3",
    "bcirc_matrix",
    "unfold",
    "fold",
    "t_product",
    "t_product_oracle",
    "conj_transpose",
    "sym",
    "identity_tensor",
    "zeros",
    "random_tensor",
    "lateral_slices",
    "fro_norm",
    "inner",
    "spectral_norm",
]
