"""
Block-circulant and unfolding oracles.

These build the explicit matrices of the t-product definition and exist to
cross-check the spectral fast path on small tensors.
"""

import numpy as np

from tubalfgd.algebra.tensor import Tensor3
from tubalfgd.errors import OracleTooLarge, ShapeMismatch

ORACLE_MAX_DIM = 500


def bcirc_matrix(A: Tensor3, max_dim: int = ORACLE_MAX_DIM) -> np.ndarray:
    """
    Build the ``(n1*n3, n2*n3)`` block circulant matrix of ``A``.

    Block ``(p, q)`` is the frontal slice ``A^(1 + mod(p - q, n3))``.

    Args:
        A: The tensor to expand.
        max_dim: Cap on either matrix dimension.

    Returns:
        The dense block circulant matrix.

    Raises:
        OracleTooLarge: If ``n1*n3`` or ``n2*n3`` exceeds ``max_dim``.
    """
    n1, n2, n3 = A.shape
    if n1 * n3 > max_dim or n2 * n3 > max_dim:
        raise OracleTooLarge(
            f"bcirc of {A.shape} is {n1 * n3}x{n2 * n3}, above the cap {max_dim}"
        )
    out = np.zeros((n1 * n3, n2 * n3))
    for p in range(n3):
        for q in range(n3):
            out[p * n1 : (p + 1) * n1, q * n2 : (q + 1) * n2] = A.frontal((p - q) % n3)
    return out


def unfold(A: Tensor3) -> np.ndarray:
    """
    Stack the frontal slices of ``A`` vertically into an ``(n1*n3, n2)`` matrix.
    """
    n1, n2, n3 = A.shape
    return A.to_slices().reshape(n3 * n1, n2)


def fold(M: np.ndarray, n3: int) -> Tensor3:
    """
    Invert ``unfold``.

    Args:
        M: Matrix with ``n1*n3`` rows.
        n3: Number of frontal slices.

    Returns:
        The tensor whose unfolding is ``M``.

    Raises:
        ShapeMismatch: If the row count is not divisible by ``n3``.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or n3 < 1 or M.shape[0] % n3 != 0:
        raise ShapeMismatch(f"cannot fold a matrix of shape {M.shape} into {n3} slices")
    return Tensor3.from_slices(M.reshape(n3, M.shape[0] // n3, M.shape[1]))


def t_product_oracle(A: Tensor3, B: Tensor3) -> Tensor3:
    """
    Compute ``fold(bcirc(A) @ unfold(B))`` directly.
    """
    if A.n2 != B.n1 or A.n3 != B.n3:
        raise ShapeMismatch(f"cannot t-multiply {A.shape} by {B.shape}")
    return fold(bcirc_matrix(A) @ unfold(B), A.n3)
