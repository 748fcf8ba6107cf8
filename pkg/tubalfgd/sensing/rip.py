from typing import List, Sequence

import numpy as np

from tubalfgd.algebra.tensor import Tensor3, conj_transpose, fro_norm, random_tensor, t_product
from tubalfgd.errors import InvalidParameter
from tubalfgd.sensing.base import BaseEnsemble
from tubalfgd.sensing.ensemble import make_ensemble


class RipEstimate:
    """
    Monte-Carlo estimate of the T-RIP constant over random tubal-rank-r tensors.

    Attributes:
        r: Tubal-rank of the probe tensors.
        trials: Number of probe tensors.
        delta_hat: ``max_t | ||M(X_t)||_2^2 / ||X_t||_F^2 - 1 |``.
        ratio_samples: Per-trial ratios ``||M(X_t)||_2^2 / ||X_t||_F^2``.
    """

    def __init__(self, r: int, ratio_samples: np.ndarray):
        self.r = r
        self.ratio_samples = np.asarray(ratio_samples, dtype=np.float64)
        self.trials = len(self.ratio_samples)
        self.delta_hat = float(np.max(np.abs(self.ratio_samples - 1.0)))

    def __repr__(self) -> str:
        return f"RipEstimate(r={self.r}, trials={self.trials}, delta_hat={self.delta_hat:.4g})"


def rip_ratios(E: BaseEnsemble, tensors: Sequence[Tensor3]) -> np.ndarray:
    """
    Evaluate ``||M(X)||_2^2 / ||X||_F^2`` for each given tensor.
    """
    ratios: List[float] = []
    for X in tensors:
        y = E.measure(X)
        ratios.append(float(np.dot(y, y)) / fro_norm(X) ** 2)
    return np.asarray(ratios)


def empirical_rip(
    n: int,
    n3: int,
    r: int,
    m: int,
    trials: int,
    seed: int,
    mode: str = "plain_gaussian",
    materialization: str = "streamed",
) -> RipEstimate:
    """
    Estimate the T-RIP constant of a fresh Gaussian ensemble.

    Each trial draws ``X = F * G^*`` with Gaussian ``F, G`` of shape
    ``(n, r, n3)``, normalized to unit Frobenius norm.

    Args:
        n: Lateral size.
        n3: Number of frontal slices.
        r: Tubal-rank of the probe tensors.
        m: Number of measurements.
        trials: Number of probe tensors, at least 1.
        seed: Non-negative seed for the ensemble and the probes.
        mode: Measurement mode.
        materialization: Ensemble materialization.

    Returns:
        The RIP estimate.
    """
    if trials < 1:
        raise InvalidParameter(f"trials must be at least 1, got {trials}")
    if not 1 <= r <= n:
        raise InvalidParameter(f"r must lie in [1, {n}], got {r}")
    ensemble_seq, probe_seq = np.random.SeedSequence(seed).spawn(2)
    E = make_ensemble(
        n,
        n3,
        m,
        seed=int(ensemble_seq.generate_state(1, np.uint64)[0]),
        mode=mode,
        materialization=materialization,
    )
    rng = np.random.default_rng(probe_seq)
    probes = []
    for _ in range(trials):
        F = random_tensor((n, r, n3), rng)
        G = random_tensor((n, r, n3), rng)
        X = t_product(F, conj_transpose(G))
        probes.append(X / fro_norm(X))
    return RipEstimate(r=r, ratio_samples=rip_ratios(E, probes))
