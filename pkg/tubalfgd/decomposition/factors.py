from typing import Callable, Optional, Tuple

import numpy as np

from tubalfgd.algebra.tensor import (
    SpectralTensor,
    Tensor3,
    conj_transpose,
    fft3,
    fro_norm,
    ifft3,
    lateral_slices,
    t_product,
)
from tubalfgd.errors import InvalidParameter, NotPsd, NotSymmetric, RankTooSmall, ZeroTensor

DEFAULT_RANK_TOL = 1e-10
DEFAULT_SYM_TOL = 1e-10
PSD_RESIDUAL_TOL = 1e-8


class TSvdFactors:
    """
    Factors of the t-SVD ``A = U * S * V^*``.

    Attributes:
        U: Orthogonal ``(n1, n1, n3)`` tensor.
        S: f-diagonal ``(n1, n2, n3)`` tensor.
        V: Orthogonal ``(n2, n2, n3)`` tensor.
        singular_values: Real ``(n3, min(n1, n2))`` array of the spectral
            singular values, descending within each slice.
    """

    def __init__(self, U: Tensor3, S: Tensor3, V: Tensor3, singular_values: np.ndarray):
        self.U = U
        self.S = S
        self.V = V
        self.singular_values = singular_values

    def reconstruct(self) -> Tensor3:
        return t_product(t_product(self.U, self.S), conj_transpose(self.V))

    def __repr__(self) -> str:
        return f"TSvdFactors(U={self.U.shape}, S={self.S.shape}, V={self.V.shape})"


class TEigFactors:
    """
    Factors of the T-eigenvalue decomposition ``A = U * S * U^*``.

    Attributes:
        U: Orthogonal ``(n, n, n3)`` tensor of T-eigenvectors.
        S: f-diagonal ``(n, n, n3)`` tensor of T-eigenvalues.
        eigenvalues: Real ``(n3, n)`` array, algebraically descending per slice.
    """

    def __init__(self, U: Tensor3, S: Tensor3, eigenvalues: np.ndarray):
        self.U = U
        self.S = S
        self.eigenvalues = eigenvalues

    def reconstruct(self) -> Tensor3:
        return t_product(t_product(self.U, self.S), conj_transpose(self.U))

    def __repr__(self) -> str:
        return f"TEigFactors(U={self.U.shape}, eigenvalues={self.eigenvalues.shape})"


class SpectrumStats:
    """
    Extreme spectral singular values of a tensor and its condition number.

    Attributes:
        sigma1: Largest singular value over all spectral slices.
        sigma_min: Smallest singular value above ``rank_tol * sigma1``.
        kappa: ``sigma1 / sigma_min``.
        rank_tol: Relative tolerance that separated zero from nonzero values.
    """

    def __init__(self, sigma1: float, sigma_min: float, rank_tol: float):
        self.sigma1 = sigma1
        self.sigma_min = sigma_min
        self.kappa = sigma1 / sigma_min
        self.rank_tol = rank_tol

    def as_dict(self) -> dict:
        return {
            "sigma1": self.sigma1,
            "sigma_min": self.sigma_min,
            "kappa": self.kappa,
            "rank_tol": self.rank_tol,
        }

    def __repr__(self) -> str:
        return (
            f"SpectrumStats(sigma1={self.sigma1:.6g}, sigma_min={self.sigma_min:.6g}, "
            f"kappa={self.kappa:.6g})"
        )


def _for_independent_slices(
    spectrum: np.ndarray, fn: Callable[[np.ndarray], Tuple[np.ndarray, ...]]
) -> Tuple[np.ndarray, ...]:
    """
    Apply a per-slice factorization and extend it conjugate-symmetrically.

    Slices ``0..n3//2`` are factored; slice ``k`` and ``n3 - k`` of a real
    tensor's spectrum are conjugates, so the remaining slices take the
    conjugated factors of their mirror. Self-conjugate slices are factored
    as real matrices so that every factor spectrum inverts to a real tensor.
    """
    n3 = spectrum.shape[0]
    outputs = None
    for k in range(n3 // 2 + 1):
        M = spectrum[k].real if (k == 0 or 2 * k == n3) else spectrum[k]
        parts = fn(M)
        if outputs is None:
            outputs = tuple(
                np.zeros((n3,) + np.shape(p), dtype=np.result_type(p, np.complex128))
                for p in parts
            )
        for out, p in zip(outputs, parts):
            out[k] = p
    for k in range(n3 // 2 + 1, n3):
        for out in outputs:
            out[k] = np.conj(out[n3 - k])
    return outputs


def _diag_spectrum(values: np.ndarray, n1: int, n2: int) -> np.ndarray:
    n3, p = values.shape
    spec = np.zeros((n3, n1, n2), dtype=np.complex128)
    idx = np.arange(p)
    spec[:, idx, idx] = values
    return spec


def _phase_normalize(vectors: np.ndarray) -> np.ndarray:
    # Largest-magnitude component of every column becomes real positive.
    pivot = vectors[np.argmax(np.abs(vectors), axis=0), np.arange(vectors.shape[1])]
    scale = np.where(np.abs(pivot) > 0, np.conj(pivot) / np.maximum(np.abs(pivot), 1e-300), 1)
    return vectors * scale[np.newaxis, :]


def spectral_singular_values(A: Tensor3) -> np.ndarray:
    """
    Return the ``(n3, min(n1, n2))`` singular values of every spectral slice.
    """
    return np.linalg.svd(fft3(A).slices, compute_uv=False)


def t_svd(A: Tensor3) -> TSvdFactors:
    """
    Compute the t-SVD ``A = U * S * V^*``.

    Each spectral slice is factored by a complex SVD with singular values in
    descending order, then the three factor spectra are transformed back.

    Args:
        A: The tensor to factor.

    Returns:
        The orthogonal factors and the f-diagonal middle factor.

    Raises:
        NonRealResult: If a factor spectrum fails to invert to a real tensor.
    """
    n1, n2, n3 = A.shape

    def svd(M):
        u, s, vh = np.linalg.svd(M)
        return u, s, np.conj(vh.T)

    u_spec, s_vals, v_spec = _for_independent_slices(fft3(A).slices, svd)
    s_vals = s_vals.real
    return TSvdFactors(
        U=ifft3(SpectralTensor._wrap(u_spec)),
        S=ifft3(SpectralTensor._wrap(_diag_spectrum(s_vals, n1, n2))),
        V=ifft3(SpectralTensor._wrap(v_spec)),
        singular_values=s_vals,
    )


def truncate_t_svd(A: Tensor3, r: int) -> Tensor3:
    """
    Best tubal-rank-``r`` approximation of ``A`` from its first r singular tubes.
    """
    factors = t_svd(A)
    U_r = lateral_slices(factors.U, slice(0, r))
    V_r = lateral_slices(factors.V, slice(0, r))
    S_r = Tensor3._wrap(factors.S.data[:r, :r, :].copy())
    return t_product(t_product(U_r, S_r), conj_transpose(V_r))


def _check_symmetric(A: Tensor3, sym_tol: float):
    if A.n1 != A.n2:
        raise NotSymmetric(f"tensor of shape {A.shape} is not square")
    gap = fro_norm(A - conj_transpose(A))
    if gap > sym_tol * fro_norm(A):
        raise NotSymmetric(
            f"||A - A^*||_F = {gap:.3e} exceeds {sym_tol:g} * ||A||_F = {fro_norm(A):.3e}"
        )


def t_eig(A: Tensor3, sym_tol: float = DEFAULT_SYM_TOL) -> TEigFactors:
    """
    Compute the T-eigenvalue decomposition ``A = U * S * U^*`` of a symmetric tensor.

    Every spectral slice of a symmetric tensor is Hermitian; each is
    diagonalized with eigenvalues sorted algebraically descending and
    eigenvectors phase-normalized.

    Args:
        A: A symmetric ``(n, n, n3)`` tensor.
        sym_tol: Relative tolerance on ``||A - A^*||_F``.

    Returns:
        The orthogonal eigenvector tensor, the f-diagonal eigenvalue tensor and
        the per-slice eigenvalues.

    Raises:
        NotSymmetric: If ``A`` is not symmetric within ``sym_tol``.
    """
    _check_symmetric(A, sym_tol)
    n = A.n1

    def eig(M):
        w, v = np.linalg.eigh((M + np.conj(M.T)) / 2)
        return w[::-1], _phase_normalize(v[:, ::-1])

    values, vectors = _for_independent_slices(fft3(A).slices, eig)
    values = values.real
    return TEigFactors(
        U=ifft3(SpectralTensor._wrap(vectors)),
        S=ifft3(SpectralTensor._wrap(_diag_spectrum(values, n, n))),
        eigenvalues=values,
    )


def tubal_rank(A: Tensor3, tol: float = DEFAULT_RANK_TOL) -> int:
    """
    Count the singular tubes of ``A`` with a spectral value above ``tol * sigma1``.

    Args:
        A: The tensor.
        tol: Threshold relative to the largest spectral singular value.

    Returns:
        The tubal-rank; 0 for the zero tensor.
    """
    s = spectral_singular_values(A)
    sigma1 = float(np.max(s))
    if sigma1 == 0.0:
        return 0
    return int(np.max(np.sum(s > tol * sigma1, axis=1)))


def _factor_from_eig(eig: TEigFactors, r: int) -> Tensor3:
    root = np.sqrt(np.clip(eig.eigenvalues[:, :r], 0.0, None))
    S_half = ifft3(SpectralTensor._wrap(_diag_spectrum(root, r, r)))
    return t_product(lateral_slices(eig.U, slice(0, r)), S_half)


def _check_rank_arg(r: int, n: int):
    if not 1 <= r <= n:
        raise InvalidParameter(f"rank r must lie in [1, {n}], got {r}")


def psd_factor(
    X: Tensor3, r: int, tol: float = DEFAULT_RANK_TOL, sym_tol: float = DEFAULT_SYM_TOL
) -> Tensor3:
    """
    Factor a T-PSD tensor as ``X = F * F^*`` with ``F`` of shape ``(n, r, n3)``.

    Args:
        X: Symmetric T-PSD tensor with tubal-rank at most ``r``.
        r: Number of lateral slices of the factor.
        tol: Eigenvalues below ``-tol * sigma1`` make ``X`` indefinite.
        sym_tol: Relative symmetry tolerance.

    Returns:
        The factor ``U(:, 1:r, :) * S(1:r, 1:r, :)^{1/2}``.

    Raises:
        NotPsd: If a T-eigenvalue is below ``-tol * sigma1``.
        RankTooSmall: If ``F * F^*`` misses ``X`` by more than ``1e-8 ||X||_F``.
    """
    _check_rank_arg(r, X.n1)
    eig = t_eig(X, sym_tol)
    sigma1 = float(np.max(np.abs(eig.eigenvalues)))
    lowest = float(np.min(eig.eigenvalues))
    if lowest < -tol * sigma1:
        raise NotPsd(f"T-eigenvalue {lowest:.3e} below -{tol:g} * sigma1 ({sigma1:.3e})")
    F = _factor_from_eig(eig, r)
    residual = fro_norm(t_product(F, conj_transpose(F)) - X)
    if residual > PSD_RESIDUAL_TOL * fro_norm(X):
        raise RankTooSmall(f"rank-{r} factor leaves residual {residual:.3e}")
    return F


def project_psd_rank_r(A: Tensor3, r: int, sym_tol: float = DEFAULT_SYM_TOL) -> Tensor3:
    """
    Project a symmetric tensor onto T-PSD tensors of tubal-rank at most ``r``.

    Per spectral slice the eigenvalues are sorted descending, negatives are
    clamped to zero and the top ``r`` eigenpairs are kept.

    Args:
        A: Symmetric ``(n, n, n3)`` tensor.
        r: Target rank, ``1 <= r <= n``.
        sym_tol: Relative symmetry tolerance.

    Returns:
        The ``(n, r, n3)`` factor ``F`` of the projection ``F * F^*``.

    Raises:
        NotSymmetric: If ``A`` is not symmetric.
    """
    _check_rank_arg(r, A.n1)
    return _factor_from_eig(t_eig(A, sym_tol), r)


def condition_number(
    X: Tensor3, r_star: Optional[int] = None, tol: float = DEFAULT_RANK_TOL
) -> SpectrumStats:
    """
    Compute ``kappa = sigma1 / sigma_min`` over the spectral slices of ``X``.

    ``sigma_min`` is the smallest singular value above ``tol * sigma1``, taken
    among the leading ``r_star`` values of each slice when ``r_star`` is given.

    Args:
        X: A nonzero tensor.
        r_star: Optional known tubal-rank.
        tol: Relative zero threshold.

    Returns:
        The spectrum statistics.

    Raises:
        ZeroTensor: If ``X`` has no singular value above the threshold.
    """
    s = spectral_singular_values(X)
    sigma1 = float(np.max(s))
    if sigma1 == 0.0:
        raise ZeroTensor("condition number of the zero tensor is undefined")
    if r_star is not None:
        s = s[:, :r_star]
    kept = s[s > tol * sigma1]
    return SpectrumStats(sigma1=sigma1, sigma_min=float(np.min(kept)), rank_tol=tol)


def is_tpsd(X: Tensor3, tol: float = DEFAULT_RANK_TOL, sym_tol: float = DEFAULT_SYM_TOL) -> bool:
    """
    Test whether every T-eigenvalue of symmetric ``X`` is at least ``-tol * sigma1``.

    Raises:
        NotSymmetric: If ``X`` is not symmetric.
    """
    eig = t_eig(X, sym_tol)
    sigma1 = float(np.max(np.abs(eig.eigenvalues)))
    return bool(np.min(eig.eigenvalues) >= -tol * sigma1)
