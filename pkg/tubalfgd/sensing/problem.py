from typing import Optional

import numpy as np

from tubalfgd.algebra.tensor import Tensor3, conj_transpose, random_tensor, t_product
from tubalfgd.decomposition.factors import SpectrumStats, condition_number
from tubalfgd.errors import InvalidParameter
from tubalfgd.sensing.base import DEFAULT_CHUNK_SIZE, BaseEnsemble
from tubalfgd.sensing.dense import DEFAULT_MAX_DENSE_BYTES
from tubalfgd.sensing.ensemble import make_ensemble


class ProblemInstance:
    """
    A synthetic low-tubal-rank sensing problem ``y = M(X_star) + s``.

    Attributes:
        X_star: Symmetric T-PSD ground truth ``F_star * F_star^*``.
        F_star: The ``(n, r_star, n3)`` ground-truth factor.
        y: Observed measurements.
        noise: The noise vector ``s`` that was added to ``M(X_star)``.
        noise_std: Noise standard deviation ``v``.
        ensemble: The measurement ensemble.
        spectrum: Spectrum statistics of ``X_star``.
        r_star: True tubal-rank.
        seed: Seed the instance was generated from.
    """

    def __init__(
        self,
        X_star: Tensor3,
        F_star: Tensor3,
        y: np.ndarray,
        noise: np.ndarray,
        noise_std: float,
        ensemble: BaseEnsemble,
        spectrum: SpectrumStats,
        r_star: int,
        seed: Optional[int] = None,
    ):
        self.X_star = X_star
        self.F_star = F_star
        self.y = y
        self.noise = noise
        self.noise_std = noise_std
        self.ensemble = ensemble
        self.spectrum = spectrum
        self.r_star = r_star
        self.seed = seed

    @property
    def n(self) -> int:
        return self.X_star.n1

    @property
    def n3(self) -> int:
        return self.X_star.n3

    @property
    def m(self) -> int:
        return self.ensemble.m

    def __repr__(self) -> str:
        return (
            f"ProblemInstance(n={self.n}, n3={self.n3}, r_star={self.r_star}, m={self.m}, "
            f"v={self.noise_std}, kappa={self.spectrum.kappa:.4g})"
        )


def gen_problem(
    n: int,
    n3: int,
    r_star: int,
    m: int,
    v: float,
    seed: int,
    mode: str = "plain_gaussian",
    materialization: str = "auto",
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    max_dense_bytes: int = DEFAULT_MAX_DENSE_BYTES,
) -> ProblemInstance:
    """
    Generate a seeded recovery problem.

    ``F_star`` has i.i.d. ``N(0, 1)`` entries, ``X_star = F_star * F_star^*``
    and the noise entries are i.i.d. ``N(0, v^2)``. The ensemble, the factor
    and the noise each draw from their own child of ``SeedSequence(seed)``.

    Args:
        n: Lateral size of ``X_star``.
        n3: Number of frontal slices.
        r_star: Tubal-rank of ``X_star``, ``1 <= r_star <= n``.
        m: Number of measurements.
        v: Noise standard deviation, ``v >= 0``.
        seed: Non-negative integer seed.
        mode: Measurement mode.
        materialization: Ensemble materialization (``streamed``, ``dense`` or ``auto``).
            ``auto`` stores the ensemble densely when it fits in ``max_dense_bytes``.
        chunk_size: Measurement tensors per block.
        max_dense_bytes: Memory cap for dense materialization.

    Returns:
        The problem instance.

    Raises:
        InvalidParameter: On out-of-range parameters.
    """
    if n < 1 or n3 < 1:
        raise InvalidParameter(f"n and n3 must be positive, got {n}, {n3}")
    if not 1 <= r_star <= n:
        raise InvalidParameter(f"r_star must lie in [1, {n}], got {r_star}")
    if m < 1:
        raise InvalidParameter(f"m must be positive, got {m}")
    if v < 0:
        raise InvalidParameter(f"noise level v must be non-negative, got {v}")
    if seed < 0:
        raise InvalidParameter(f"seed must be non-negative, got {seed}")

    ensemble_seq, factor_seq, noise_seq = np.random.SeedSequence(seed).spawn(3)
    ensemble = make_ensemble(
        n,
        n3,
        m,
        seed=int(ensemble_seq.generate_state(1, np.uint64)[0]),
        mode=mode,
        materialization=materialization,
        chunk_size=chunk_size,
        max_dense_bytes=max_dense_bytes,
    )
    F_star = random_tensor((n, r_star, n3), np.random.default_rng(factor_seq))
    X_star = t_product(F_star, conj_transpose(F_star))

    y = ensemble.measure(X_star)
    if v > 0:
        noise = np.random.default_rng(noise_seq).standard_normal(m) * v
        y = y + noise
    else:
        noise = np.zeros(m)

    return ProblemInstance(
        X_star=X_star,
        F_star=F_star,
        y=y,
        noise=noise,
        noise_std=float(v),
        ensemble=ensemble,
        spectrum=condition_number(X_star, r_star=r_star),
        r_star=r_star,
        seed=seed,
    )
