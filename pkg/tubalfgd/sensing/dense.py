from typing import Iterator, Optional, Tuple

import numpy as np

from tubalfgd.algebra.tensor import Tensor3
from tubalfgd.errors import OutOfBudget
from tubalfgd.sensing.base import DEFAULT_CHUNK_SIZE, BaseEnsemble
from tubalfgd.utils import log

DEFAULT_MAX_DENSE_BYTES = 2 * 1024**3


def dense_bytes(n: int, n3: int, m: int) -> int:
    """Bytes needed to hold ``m`` float64 measurement tensors of dims ``(n, n, n3)``."""
    return 8 * m * n * n * n3


class DenseEnsemble(BaseEnsemble):
    """
    Measurement ensemble materialized once as an ``(m, n*n*n3)`` matrix.

    Rows are drawn with the same per-index generators as the streamed
    ensemble and iterated with the same chunk boundaries.
    """

    materialization = "dense"

    def __init__(
        self,
        n: int,
        n3: int,
        m: int,
        seed: int,
        mode: str = "plain_gaussian",
        entry_std: Optional[float] = None,
        chunk_size: int = DEFAULT_CHUNK_SIZE,
        max_dense_bytes: int = DEFAULT_MAX_DENSE_BYTES,
        **kwargs,
    ):
        super().__init__(n, n3, m, seed, mode, entry_std, chunk_size, **kwargs)
        needed = dense_bytes(n, n3, m)
        if needed > max_dense_bytes:
            raise OutOfBudget(
                f"dense ensemble needs {needed} bytes, above the cap of {max_dense_bytes}"
            )
        self._matrix = np.empty((m, self.size))
        for start, stop in self._chunk_bounds():
            self._matrix[start:stop] = self._generate_rows(start, stop)
        self._matrix.flags.writeable = False
        log.debug(f"materialized {m} measurement tensors ({needed / 1024**2:.1f} MiB)")

    def iter_chunks(self) -> Iterator[Tuple[int, int, np.ndarray]]:
        for start, stop in self._chunk_bounds():
            yield start, stop, self._matrix[start:stop]

    def tensor(self, i: int) -> Tensor3:
        self._check_index(i)
        return Tensor3._wrap(self._matrix[i].reshape(self.dims).copy())
