from typing import Optional

from tubalfgd.errors import InvalidParameter
from tubalfgd.sensing.base import DEFAULT_CHUNK_SIZE, BaseEnsemble
from tubalfgd.sensing.dense import DEFAULT_MAX_DENSE_BYTES, DenseEnsemble, dense_bytes
from tubalfgd.sensing.streamed import StreamedEnsemble

ENSEMBLE_CLASSES = {
    "streamed": StreamedEnsemble,
    "dense": DenseEnsemble,
}


def make_ensemble(
    n: int,
    n3: int,
    m: int,
    seed: int,
    mode: str = "plain_gaussian",
    materialization: str = "streamed",
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    entry_std: Optional[float] = None,
    max_dense_bytes: int = DEFAULT_MAX_DENSE_BYTES,
) -> BaseEnsemble:
    """
    Create a deterministic Gaussian measurement ensemble.

    Args:
        n: Lateral size of the square measurement tensors.
        n3: Number of frontal slices.
        m: Number of measurements.
        seed: Unsigned 64-bit seed; ``A_i`` depends only on ``(seed, i)``.
        mode: ``plain_gaussian`` (alias ``gaussian``) or ``symmetrized``.
        materialization: ``streamed``, ``dense``, or ``auto`` (dense when it
            fits under ``max_dense_bytes``).
        chunk_size: Measurement tensors per block.
        entry_std: Entry standard deviation, ``1/sqrt(m)`` by default.
        max_dense_bytes: Memory cap for dense materialization.

    Returns:
        The ensemble.

    Raises:
        OutOfBudget: If dense materialization exceeds ``max_dense_bytes``.
        InvalidParameter: On unknown modes or out-of-range sizes.
    """
    if materialization == "auto":
        fits = dense_bytes(n, n3, m) <= max_dense_bytes
        materialization = "dense" if fits else "streamed"
    if materialization not in ENSEMBLE_CLASSES:
        raise InvalidParameter(
            f"Unsupported materialization: {materialization}, "
            f"expected one of {sorted(ENSEMBLE_CLASSES) + ['auto']}"
        )
    return ENSEMBLE_CLASSES[materialization](
        n=n,
        n3=n3,
        m=m,
        seed=seed,
        mode=mode,
        entry_std=entry_std,
        chunk_size=chunk_size,
        max_dense_bytes=max_dense_bytes,
    )


def measure(E: BaseEnsemble, X):
    return E.measure(X)


def adjoint(E: BaseEnsemble, y):
    return E.adjoint(y)
