from typing import Sequence, Tuple, Union

import numpy as np

from tubalfgd.errors import InvalidParameter, NonRealResult, ShapeMismatch

# Relative bound on the imaginary residue tolerated by ifft3.
IMAG_RESIDUE_TOL = 1e-8


class Tensor3:
    """
    A real, dense third-order tensor.

    Values are held as a read-only float64 array indexed ``[i, j, k]`` where
    ``k`` runs over the frontal slices. The serialized layout (see
    ``to_slices``) is frontal-slice-major and row-major within each slice.

    Attributes:
        data: The read-only ``(n1, n2, n3)`` array of entries.
    """

    __slots__ = ("_data",)

    def __init__(self, data: Union[np.ndarray, Sequence]):
        """
        Initialize a Tensor3 from an ``(n1, n2, n3)`` array, copying it.

        Args:
            data: Array-like of shape ``(n1, n2, n3)`` with finite real entries.

        Raises:
            ShapeMismatch: If the array is not three-dimensional or has an empty mode.
            InvalidParameter: If an entry is NaN or infinite.
        """
        arr = np.array(data, dtype=np.float64, copy=True)
        self._data = self._checked(arr)

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "Tensor3":
        # Takes ownership of a freshly computed array without copying it.
        obj = cls.__new__(cls)
        obj._data = cls._checked(np.ascontiguousarray(arr, dtype=np.float64))
        return obj

    @staticmethod
    def _checked(arr: np.ndarray) -> np.ndarray:
        if arr.ndim != 3 or min(arr.shape) < 1:
            raise ShapeMismatch(f"Tensor3 needs three positive modes, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidParameter("Tensor3 entries must be finite")
        arr.flags.writeable = False
        return arr

    @classmethod
    def from_slices(cls, slices: np.ndarray) -> "Tensor3":
        """
        Build a tensor from its frontal slices stacked as ``(n3, n1, n2)``.

        Args:
            slices: Array of frontal slices, slice index first.

        Returns:
            The tensor whose k-th frontal slice is ``slices[k]``.
        """
        slices = np.asarray(slices, dtype=np.float64)
        if slices.ndim != 3:
            raise ShapeMismatch(f"expected (n3, n1, n2) slices, got shape {slices.shape}")
        return cls._wrap(np.moveaxis(slices, 0, 2).copy())

    def to_slices(self) -> np.ndarray:
        """
        Return the frontal slices as a C-contiguous ``(n3, n1, n2)`` array.

        Flattening the result gives the slice-major, row-major-within-slice
        layout used by the tensor file format.
        """
        return np.ascontiguousarray(np.moveaxis(self._data, 2, 0))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self._data.shape

    @property
    def n1(self) -> int:
        return self._data.shape[0]

    @property
    def n2(self) -> int:
        return self._data.shape[1]

    @property
    def n3(self) -> int:
        return self._data.shape[2]

    @property
    def H(self) -> "Tensor3":
        return conj_transpose(self)

    def frontal(self, k: int) -> np.ndarray:
        return self._data[:, :, k]

    def __matmul__(self, other: "Tensor3") -> "Tensor3":
        return t_product(self, other)

    def __add__(self, other: "Tensor3") -> "Tensor3":
        _require_same_shape(self, other, "add")
        return Tensor3._wrap(self._data + other._data)

    def __sub__(self, other: "Tensor3") -> "Tensor3":
        _require_same_shape(self, other, "subtract")
        return Tensor3._wrap(self._data - other._data)

    def __mul__(self, scalar: float) -> "Tensor3":
        return Tensor3._wrap(self._data * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "Tensor3":
        return Tensor3._wrap(self._data / float(scalar))

    def __neg__(self) -> "Tensor3":
        return Tensor3._wrap(-self._data)

    def __repr__(self) -> str:
        return f"Tensor3(shape={self.shape}, fro_norm={fro_norm(self):.6g})"


class SpectralTensor:
    """
    Frequency-domain representation of a third-order tensor.

    Holds the n3 complex frontal slices obtained by an unnormalized DFT of
    every tube, stacked slice-first as ``(n3, n1, n2)``. Products, conjugate
    transposes and per-slice factorizations act slice by slice on this form.

    Attributes:
        slices: The read-only complex ``(n3, n1, n2)`` array.
    """

    __slots__ = ("_slices",)

    def __init__(self, slices: np.ndarray):
        arr = np.array(slices, dtype=np.complex128, copy=True)
        if arr.ndim != 3 or min(arr.shape) < 1:
            raise ShapeMismatch(f"SpectralTensor needs (n3, n1, n2) slices, got {arr.shape}")
        arr.flags.writeable = False
        self._slices = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "SpectralTensor":
        obj = cls.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.complex128)
        arr.flags.writeable = False
        obj._slices = arr
        return obj

    @property
    def slices(self) -> np.ndarray:
        return self._slices

    @property
    def dims(self) -> Tuple[int, int, int]:
        n3, n1, n2 = self._slices.shape
        return n1, n2, n3

    @property
    def H(self) -> "SpectralTensor":
        return SpectralTensor._wrap(np.conj(np.swapaxes(self._slices, 1, 2)))

    def fro_norm(self) -> float:
        return float(np.linalg.norm(self._slices))

    def __matmul__(self, other: "SpectralTensor") -> "SpectralTensor":
        n1, n2, n3 = self.dims
        p1, q, p3 = other.dims
        if n2 != p1 or n3 != p3:
            raise ShapeMismatch(
                f"cannot multiply spectra of dims {self.dims} and {other.dims}"
            )
        return SpectralTensor._wrap(np.matmul(self._slices, other._slices))


def fft3(A: Tensor3) -> SpectralTensor:
    """
    Apply the unnormalized forward DFT to every tube of ``A``.

    Args:
        A: The tensor to transform.

    Returns:
        The spectrum, whose k-th slice is the k-th DFT coefficient of each tube.
    """
    return SpectralTensor._wrap(np.moveaxis(np.fft.fft(A.data, axis=2), 2, 0))


def ifft3(S: SpectralTensor) -> Tensor3:
    """
    Invert ``fft3``, scaling each tube by ``1/n3`` and returning a real tensor.

    Args:
        S: The spectrum to invert.

    Returns:
        The real tensor whose spectrum is ``S``.

    Raises:
        NonRealResult: If an imaginary residue exceeds ``1e-8 * (1 + ||S||_F)``,
            meaning ``S`` is not conjugate-symmetric.
    """
    out = np.fft.ifft(np.moveaxis(S.slices, 0, 2), axis=2)
    residue = float(np.max(np.abs(out.imag))) if out.size else 0.0
    bound = IMAG_RESIDUE_TOL * (1.0 + S.fro_norm())
    if residue > bound:
        raise NonRealResult(
            f"inverse transform left imaginary residue {residue:.3e} above {bound:.3e}"
        )
    return Tensor3._wrap(out.real.copy())


def t_product(A: Tensor3, B: Tensor3) -> Tensor3:
    """
    Compute the t-product ``A * B`` through slice-wise spectral products.

    Args:
        A: Left factor of shape ``(n1, n2, n3)``.
        B: Right factor of shape ``(n2, q, n3)``.

    Returns:
        The ``(n1, q, n3)`` product.

    Raises:
        ShapeMismatch: If the inner dimensions or the tube lengths differ.
    """
    if A.n2 != B.n1 or A.n3 != B.n3:
        raise ShapeMismatch(f"cannot t-multiply {A.shape} by {B.shape}")
    return ifft3(fft3(A) @ fft3(B))


def conj_transpose(A: Tensor3) -> Tensor3:
    """
    Transpose every frontal slice and reverse the order of slices 2..n3.

    Args:
        A: Tensor of shape ``(n1, n2, n3)``.

    Returns:
        The ``(n2, n1, n3)`` conjugate transpose ``A^*``.
    """
    order = (-np.arange(A.n3)) % A.n3
    return Tensor3._wrap(np.transpose(A.data, (1, 0, 2))[:, :, order])


def sym(A: Tensor3) -> Tensor3:
    """
    Return the symmetric part ``(A + A^*) / 2`` of a square tensor.
    """
    if A.n1 != A.n2:
        raise ShapeMismatch(f"symmetric part needs n1 == n2, got {A.shape}")
    return Tensor3._wrap((A.data + conj_transpose(A).data) / 2.0)


def identity_tensor(n: int, n3: int) -> Tensor3:
    """
    Return the identity tensor: first frontal slice ``I_n``, others zero.
    """
    if n < 1 or n3 < 1:
        raise InvalidParameter(f"identity_tensor needs n, n3 >= 1, got {n}, {n3}")
    data = np.zeros((n, n, n3))
    data[:, :, 0] = np.eye(n)
    return Tensor3._wrap(data)


def zeros(n1: int, n2: int, n3: int) -> Tensor3:
    return Tensor3._wrap(np.zeros((n1, n2, n3)))


def random_tensor(
    shape: Tuple[int, int, int], rng: np.random.Generator, std: float = 1.0
) -> Tensor3:
    """
    Draw a tensor with i.i.d. ``N(0, std^2)`` entries from ``rng``.
    """
    return Tensor3._wrap(rng.standard_normal(shape) * std)


def lateral_slices(A: Tensor3, cols: Union[slice, Sequence[int]]) -> Tensor3:
    """
    Select lateral slices ``A(:, cols, :)``; selection commutes with ``fft3``.
    """
    return Tensor3._wrap(A.data[:, cols, :].copy())


def fro_norm(A: Tensor3) -> float:
    return float(np.linalg.norm(A.data))


def inner(A: Tensor3, B: Tensor3) -> float:
    """
    Euclidean inner product ``sum_k <A^(k), B^(k)>``.

    Raises:
        ShapeMismatch: If the shapes differ.
    """
    _require_same_shape(A, B, "take the inner product of")
    return float(np.vdot(A.data, B.data))


def spectral_norm(A: Tensor3) -> float:
    """
    Largest singular value over the spectral slices, i.e. ``||bcirc(A)||_2``.
    """
    return float(np.max(np.linalg.svd(fft3(A).slices, compute_uv=False)))


def _require_same_shape(A: Tensor3, B: Tensor3, verb: str):
    if A.shape != B.shape:
        raise ShapeMismatch(f"cannot {verb} tensors of shapes {A.shape} and {B.shape}")
