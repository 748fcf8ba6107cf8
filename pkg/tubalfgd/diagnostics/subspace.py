"""
Subspace diagnostics of the factorized iterates.

With ``X_star = U * D_star * U^*`` and ``V`` the orthogonal complement of
``U``, every factor splits as ``F = U * S + V * T``. The error of the
iterate is then governed by the three blocks ``D_star - S * S^*``,
``S * T^*`` and ``T * T^*``, which these helpers compute and cross-check.
"""

from typing import Tuple

import numpy as np

from tubalfgd.algebra.tensor import (
    Tensor3,
    conj_transpose,
    lateral_slices,
    spectral_norm,
    sym,
    t_product,
)
from tubalfgd.decomposition.factors import DEFAULT_RANK_TOL, DEFAULT_SYM_TOL, t_eig
from tubalfgd.errors import InvalidParameter, RankMismatch, SandwichViolated, ShapeMismatch
from tubalfgd.sensing.problem import ProblemInstance

# Absolute slack of the sandwich check, scaled by max(1, ||X_star||).
SANDWICH_SLACK = 1e-8


class SubspaceBasis:
    """
    Orthonormal split of the column space of ``X_star``.

    Attributes:
        U: ``(n, r_star, n3)`` tensor spanning the column space of ``X_star``.
        V: ``(n, n - r_star, n3)`` orthogonal complement of ``U``.
        D_star: f-diagonal ``(r_star, r_star, n3)`` block of T-eigenvalues.
    """

    def __init__(self, U: Tensor3, V: Tensor3, D_star: Tensor3):
        self.U = U
        self.V = V
        self.D_star = D_star

    @property
    def r_star(self) -> int:
        return self.U.n2

    def reconstruct(self) -> Tensor3:
        return t_product(t_product(self.U, self.D_star), conj_transpose(self.U))

    def __repr__(self) -> str:
        return f"SubspaceBasis(U={self.U.shape}, V={self.V.shape})"


class ErrorTerms:
    """
    Spectral norms of the three error blocks of an iterate.

    Attributes:
        d_ss: ``||D_star - S * S^*||``.
        st: ``||S * T^*||``.
        tt: ``||T * T^*||``.
        e_t: The largest of the three.
        delta_norm: ``||F * F^* - X_star||``.
    """

    def __init__(self, d_ss: float, st: float, tt: float, delta_norm: float):
        self.d_ss = d_ss
        self.st = st
        self.tt = tt
        self.e_t = max(d_ss, st, tt)
        self.delta_norm = delta_norm

    def as_dict(self) -> dict:
        return {
            "d_ss": self.d_ss,
            "st": self.st,
            "tt": self.tt,
            "e_t": self.e_t,
            "delta_norm": self.delta_norm,
        }

    def __repr__(self) -> str:
        return (
            f"ErrorTerms(d_ss={self.d_ss:.3e}, st={self.st:.3e}, tt={self.tt:.3e}, "
            f"delta_norm={self.delta_norm:.3e})"
        )


def subspace_basis(
    X_star: Tensor3,
    r_star: int,
    tol: float = DEFAULT_RANK_TOL,
    sym_tol: float = DEFAULT_SYM_TOL,
) -> SubspaceBasis:
    """
    Split the T-eigenvectors of ``X_star`` into its column space and complement.

    Args:
        X_star: Symmetric T-PSD tensor of tubal-rank ``r_star``.
        r_star: Tubal-rank, ``1 <= r_star < n``.
        tol: Eigenvalues beyond index ``r_star`` must stay below ``tol * sigma1``.
        sym_tol: Relative symmetry tolerance.

    Returns:
        The basis ``(U, V, D_star)``.

    Raises:
        RankMismatch: If an eigenvalue past ``r_star`` exceeds the tolerance.
        InvalidParameter: If ``r_star`` leaves no complement.
    """
    n = X_star.n1
    if not 1 <= r_star < n:
        raise InvalidParameter(f"subspace split needs 1 <= r_star < {n}, got {r_star}")
    eig = t_eig(X_star, sym_tol)
    sigma1 = float(np.max(np.abs(eig.eigenvalues)))
    leftover = float(np.max(np.abs(eig.eigenvalues[:, r_star:])))
    if leftover > tol * sigma1:
        raise RankMismatch(
            f"T-eigenvalue {leftover:.3e} past index {r_star} exceeds {tol:g} * sigma1"
        )
    return SubspaceBasis(
        U=lateral_slices(eig.U, slice(0, r_star)),
        V=lateral_slices(eig.U, slice(r_star, n)),
        D_star=Tensor3._wrap(eig.S.data[:r_star, :r_star, :].copy()),
    )


def subspace_split(F: Tensor3, B: SubspaceBasis) -> Tuple[Tensor3, Tensor3]:
    """
    Return ``(S, T) = (U^* * F, V^* * F)``.

    Raises:
        ShapeMismatch: If ``F`` does not live in the basis' space.
    """
    if F.n1 != B.U.n1 or F.n3 != B.U.n3:
        raise ShapeMismatch(f"cannot split a {F.shape} factor with a {B.U.shape} basis")
    return t_product(conj_transpose(B.U), F), t_product(conj_transpose(B.V), F)


def error_terms(F: Tensor3, B: SubspaceBasis, X_star: Tensor3) -> ErrorTerms:
    """
    Compute the three block errors of ``F * F^* - X_star`` and their maximum.

    The sandwich ``e_t <= ||F * F^* - X_star|| <= 4 e_t`` holds for every
    factor; it is checked on every call with an absolute slack of
    ``1e-8 * max(1, ||X_star||)``.

    Args:
        F: ``(n, r, n3)`` factor.
        B: Basis of ``X_star``.
        X_star: The ground truth.

    Returns:
        The error terms, all spectral norms.

    Raises:
        SandwichViolated: If either side of the sandwich fails.
    """
    S, T = subspace_split(F, B)
    d_ss = spectral_norm(B.D_star - t_product(S, conj_transpose(S)))
    st = spectral_norm(t_product(S, conj_transpose(T)))
    tt = spectral_norm(t_product(T, conj_transpose(T)))
    delta_norm = spectral_norm(t_product(F, conj_transpose(F)) - X_star)
    terms = ErrorTerms(d_ss=d_ss, st=st, tt=tt, delta_norm=delta_norm)

    slack = SANDWICH_SLACK * max(1.0, spectral_norm(X_star))
    if terms.e_t > delta_norm + slack or delta_norm > 4 * terms.e_t + slack:
        raise SandwichViolated(
            f"e_t={terms.e_t:.6e} and ||FF^*-X||={delta_norm:.6e} break the sandwich bound"
        )
    return terms


def tilde_update(
    S: Tensor3, T: Tensor3, B: SubspaceBasis, eta: float
) -> Tuple[Tensor3, Tensor3]:
    """
    Advance the split ``(S, T)`` by one population gradient step.

    ``S~ = S - eta (S S^* S + S T^* T - D_star S)`` and
    ``T~ = T - eta (T T^* T + T S^* S)``, all products being t-products.

    Raises:
        ShapeMismatch: If the blocks do not fit the basis.
    """
    if S.n1 != B.r_star or T.n1 != B.V.n2 or S.n2 != T.n2:
        raise ShapeMismatch(
            f"blocks {S.shape} and {T.shape} do not match basis ranks "
            f"({B.r_star}, {B.V.n2})"
        )
    SH, TH = conj_transpose(S), conj_transpose(T)
    StS = t_product(SH, S)
    TtT = t_product(TH, T)
    S_new = S - eta * (
        t_product(S, StS) + t_product(S, TtT) - t_product(B.D_star, S)
    )
    T_new = T - eta * (t_product(T, TtT) + t_product(T, StS))
    return S_new, T_new


def sample_deviation(F: Tensor3, P: ProblemInstance) -> Tensor3:
    """
    Gap between the sample gradient direction and the population one.

    With ``Delta = F * F^* - X_star`` this is
    ``sym(M^*(M(Delta) - s)) - Delta``, the symmetrized form matching the
    residual used by the solver.

    Args:
        F: ``(n, r, n3)`` factor.
        P: Problem carrying the ground truth and its noise vector.

    Returns:
        The symmetric ``(n, n, n3)`` deviation tensor.
    """
    delta = t_product(F, conj_transpose(F)) - P.X_star
    residual = P.ensemble.measure(delta) - P.noise
    return sym(P.ensemble.adjoint(residual)) - delta
