"""
Binary tensor files.

A file starts with the four magic bytes ``T3R1``, followed by ``n1, n2, n3``
as little-endian unsigned 32-bit integers and then ``n1 * n2 * n3``
little-endian float64 values in frontal-slice-major order, row-major within
each slice.
"""

import numpy as np

from tubalfgd.algebra.tensor import Tensor3
from tubalfgd.errors import BadMagic, ShapeOverflow, TruncatedFile

MAGIC = b"T3R1"
HEADER_DIMS = np.dtype("<u4")
VALUE_DTYPE = np.dtype("<f8")
HEADER_SIZE = len(MAGIC) + 3 * HEADER_DIMS.itemsize
_U32_MAX = 2**32 - 1


def write_tensor(path: str, T: Tensor3):
    """
    Write ``T`` to ``path`` in the T3R1 format.

    Raises:
        ShapeOverflow: If a dimension does not fit an unsigned 32-bit integer.
    """
    if max(T.shape) > _U32_MAX:
        raise ShapeOverflow(f"dimensions {T.shape} do not fit the 32-bit header")
    with open(path, "wb") as file:
        file.write(MAGIC)
        file.write(np.asarray(T.shape, dtype=HEADER_DIMS).tobytes())
        file.write(T.to_slices().astype(VALUE_DTYPE, copy=False).tobytes())


def read_tensor(path: str) -> Tensor3:
    """
    Read a T3R1 file.

    Args:
        path: File to read.

    Returns:
        The decoded tensor, bit-identical to the one written.

    Raises:
        BadMagic: If the file does not start with ``T3R1``.
        TruncatedFile: If the header or the data is shorter than declared.
        ShapeOverflow: If a dimension is zero or the declared size is not addressable.
    """
    with open(path, "rb") as file:
        magic = file.read(len(MAGIC))
        if magic != MAGIC:
            raise BadMagic(f"{path} starts with {magic!r}, expected {MAGIC!r}")
        header = file.read(HEADER_SIZE - len(MAGIC))
        if len(header) != HEADER_SIZE - len(MAGIC):
            raise TruncatedFile(f"{path} ends inside the header")
        n1, n2, n3 = (int(d) for d in np.frombuffer(header, dtype=HEADER_DIMS))
        if min(n1, n2, n3) == 0:
            raise ShapeOverflow(f"{path} declares an empty shape ({n1}, {n2}, {n3})")
        count = n1 * n2 * n3
        if count * VALUE_DTYPE.itemsize > np.iinfo(np.int64).max:
            raise ShapeOverflow(f"{path} declares {count} values, more than can be addressed")
        payload = file.read(count * VALUE_DTYPE.itemsize)
    if len(payload) != count * VALUE_DTYPE.itemsize:
        raise TruncatedFile(
            f"{path} holds {len(payload)} data bytes, header declares "
            f"{count * VALUE_DTYPE.itemsize}"
        )
    values = np.frombuffer(payload, dtype=VALUE_DTYPE).reshape(n3, n1, n2)
    return Tensor3.from_slices(values.astype(np.float64))
