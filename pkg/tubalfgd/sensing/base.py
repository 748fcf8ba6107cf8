from abc import ABC, abstractmethod
from typing import Iterator, Literal, Optional, Tuple

import numpy as np

from tubalfgd.algebra.tensor import Tensor3, sym
from tubalfgd.errors import InvalidParameter, ShapeMismatch

MeasurementMode = Literal["plain_gaussian", "symmetrized"]

MODE_ALIASES = {
    "gaussian": "plain_gaussian",
    "plain_gaussian": "plain_gaussian",
    "symmetrized": "symmetrized",
}

DEFAULT_CHUNK_SIZE = 256
_U64_LIMIT = 2**64


def normalize_mode(mode: str) -> str:
    """
    Map a measurement mode name or its CLI alias to the canonical name.

    Raises:
        InvalidParameter: If the mode is unknown.
    """
    try:
        return MODE_ALIASES[mode]
    except KeyError:
        raise InvalidParameter(
            f"Unsupported measurement mode: {mode}, expected one of {sorted(MODE_ALIASES)}"
        )


class BaseEnsemble(ABC):
    """
    Abstract base class for a seeded Gaussian measurement ensemble ``{A_i}``.

    Every ``A_i`` is a pure function of ``(seed, i)``: it is drawn from a
    Philox counter-based generator whose key is the ensemble seed and whose
    counter is offset by ``i``, so chunking and worker count never change a
    measurement tensor. Subclasses decide whether rows are kept in memory or
    regenerated per use; both walk the same chunk boundaries in index order,
    which makes their forward and adjoint maps agree bit for bit.

    Attributes:
        n: Lateral size of each square measurement tensor.
        n3: Number of frontal slices.
        m: Number of measurements.
        seed: Unsigned 64-bit ensemble seed.
        mode: ``plain_gaussian`` or ``symmetrized``.
        entry_std: Standard deviation of each entry, ``1/sqrt(m)`` by default.
        chunk_size: Number of measurement tensors processed per block.
    """

    materialization = "base"

    def __init__(
        self,
        n: int,
        n3: int,
        m: int,
        seed: int,
        mode: str = "plain_gaussian",
        entry_std: Optional[float] = None,
        chunk_size: int = DEFAULT_CHUNK_SIZE,
        **kwargs,
    ):
        if n < 1 or n3 < 1 or m < 1:
            raise InvalidParameter(f"ensemble needs n, n3, m >= 1, got {n}, {n3}, {m}")
        if not 0 <= int(seed) < _U64_LIMIT:
            raise InvalidParameter(f"seed must be an unsigned 64-bit integer, got {seed}")
        if chunk_size < 1:
            raise InvalidParameter(f"chunk_size must be positive, got {chunk_size}")
        self.n = n
        self.n3 = n3
        self.m = m
        self.seed = int(seed)
        self.mode = normalize_mode(mode)
        self.entry_std = float(entry_std) if entry_std is not None else 1.0 / np.sqrt(m)
        if self.entry_std <= 0:
            raise InvalidParameter(f"entry_std must be positive, got {self.entry_std}")
        self.chunk_size = int(chunk_size)
        self._sym_scale = self._symmetrization_scale() if self.mode == "symmetrized" else None

    @property
    def dims(self) -> Tuple[int, int, int]:
        return self.n, self.n, self.n3

    @property
    def size(self) -> int:
        """Number of entries of one measurement tensor."""
        return self.n * self.n * self.n3

    def _symmetrization_scale(self) -> np.ndarray:
        # Entries paired with themselves under A -> A^* keep variance; the
        # rest are averages of two draws and are rescaled by sqrt(2).
        n, n3 = self.n, self.n3
        i = np.arange(n)[:, None, None]
        j = np.arange(n)[None, :, None]
        k = np.arange(n3)[None, None, :]
        self_paired = (i == j) & (k == (-k) % n3)
        return np.where(self_paired, 1.0, np.sqrt(2.0)).reshape(-1)

    def _generate_rows(self, start: int, stop: int) -> np.ndarray:
        """
        Draw measurement tensors ``start..stop-1`` as rows of a matrix.

        Args:
            start: First measurement index.
            stop: One past the last measurement index.

        Returns:
            A ``(stop - start, n*n*n3)`` array, row ``i - start`` holding ``A_i``
            flattened in ``(i, j, k)`` order.
        """
        rows = np.empty((stop - start, self.size))
        for offset, i in enumerate(range(start, stop)):
            bit_generator = np.random.Philox(counter=[0, 0, 0, i], key=self.seed)
            rows[offset] = np.random.Generator(bit_generator).standard_normal(self.size)
        rows *= self.entry_std
        if self.mode == "symmetrized":
            shaped = rows.reshape(-1, self.n, self.n, self.n3)
            order = (-np.arange(self.n3)) % self.n3
            mirrored = np.transpose(shaped, (0, 2, 1, 3))[:, :, :, order]
            rows = ((shaped + mirrored) / 2.0).reshape(stop - start, self.size)
            rows *= self._sym_scale
        return rows

    def _chunk_bounds(self) -> Iterator[Tuple[int, int]]:
        for start in range(0, self.m, self.chunk_size):
            yield start, min(start + self.chunk_size, self.m)

    @abstractmethod
    def iter_chunks(self) -> Iterator[Tuple[int, int, np.ndarray]]:
        """
        Yield ``(start, stop, rows)`` blocks covering all measurements in order.
        """
        pass

    @abstractmethod
    def tensor(self, i: int) -> Tensor3:
        """
        Return the measurement tensor ``A_i``.
        """
        pass

    def _check_index(self, i: int):
        if not 0 <= i < self.m:
            raise InvalidParameter(f"measurement index {i} outside [0, {self.m})")

    def measure(self, X: Tensor3) -> np.ndarray:
        """
        Apply the forward map ``X -> [<A_1, X>, ..., <A_m, X>]``.

        Args:
            X: Tensor with the ensemble's dims.

        Returns:
            The length-``m`` measurement vector.

        Raises:
            ShapeMismatch: If ``X`` has other dims.
        """
        if X.shape != self.dims:
            raise ShapeMismatch(f"cannot measure a {X.shape} tensor with a {self.dims} ensemble")
        x = X.data.reshape(-1)
        out = np.empty(self.m)
        for start, stop, rows in self.iter_chunks():
            out[start:stop] = rows @ x
        return out

    def adjoint(self, y: np.ndarray) -> Tensor3:
        """
        Apply the adjoint map ``y -> sum_i y_i A_i``.

        Chunk contributions are summed sequentially in index order.

        Args:
            y: Length-``m`` vector.

        Returns:
            The adjoint image, exactly symmetric in symmetrized mode.

        Raises:
            ShapeMismatch: If ``y`` does not have length ``m``.
        """
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.m,):
            raise ShapeMismatch(f"adjoint expects a vector of length {self.m}, got {y.shape}")
        acc = np.zeros(self.size)
        for start, stop, rows in self.iter_chunks():
            acc += rows.T @ y[start:stop]
        out = Tensor3._wrap(acc.reshape(self.dims))
        return sym(out) if self.mode == "symmetrized" else out

    def residual_adjoint(self, X: Tensor3, y: np.ndarray) -> Tuple[np.ndarray, Tensor3]:
        """
        Compute ``r = M(X) - y`` and ``M^*(r)`` in a single pass over the chunks.

        Each residual entry only needs its own row, so the adjoint of a chunk
        is accumulated as soon as that chunk's residual is known. The result
        equals ``adjoint(measure(X) - y)`` bit for bit.

        Args:
            X: Tensor with the ensemble's dims.
            y: Length-``m`` vector.

        Returns:
            The residual vector and its adjoint image.

        Raises:
            ShapeMismatch: If ``X`` or ``y`` do not fit the ensemble.
        """
        if X.shape != self.dims:
            raise ShapeMismatch(f"cannot measure a {X.shape} tensor with a {self.dims} ensemble")
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.m,):
            raise ShapeMismatch(f"expected a vector of length {self.m}, got {y.shape}")
        x = X.data.reshape(-1)
        residual = np.empty(self.m)
        acc = np.zeros(self.size)
        for start, stop, rows in self.iter_chunks():
            residual[start:stop] = rows @ x - y[start:stop]
            acc += rows.T @ residual[start:stop]
        out = Tensor3._wrap(acc.reshape(self.dims))
        return residual, sym(out) if self.mode == "symmetrized" else out

    def describe(self) -> dict:
        return {
            "n": self.n,
            "n3": self.n3,
            "m": self.m,
            "seed": self.seed,
            "mode": self.mode,
            "entry_std": self.entry_std,
            "materialization": self.materialization,
            "chunk_size": self.chunk_size,
        }

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dims={self.dims}, m={self.m}, mode={self.mode})"
