from typing import Iterator, Tuple

import numpy as np

from tubalfgd.algebra.tensor import Tensor3
from tubalfgd.sensing.base import BaseEnsemble


class StreamedEnsemble(BaseEnsemble):
    """
    Measurement ensemble that regenerates its tensors on every pass.

    Memory stays at one chunk of ``chunk_size * n * n * n3`` values no matter
    how large ``m`` is.
    """

    materialization = "streamed"

    def iter_chunks(self) -> Iterator[Tuple[int, int, np.ndarray]]:
        for start, stop in self._chunk_bounds():
            yield start, stop, self._generate_rows(start, stop)

    def tensor(self, i: int) -> Tensor3:
        self._check_index(i)
        return Tensor3._wrap(self._generate_rows(i, i + 1).reshape(self.dims))
