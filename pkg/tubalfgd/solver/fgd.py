import time
from typing import Optional

import numpy as np

from tubalfgd.algebra.tensor import (
    Tensor3,
    conj_transpose,
    fro_norm,
    spectral_norm,
    sym,
    t_product,
)
from tubalfgd.decomposition.factors import project_psd_rank_r
from tubalfgd.diagnostics.subspace import error_terms, subspace_basis
from tubalfgd.errors import Diverged, InvalidParameter, ShapeMismatch
from tubalfgd.sensing.problem import ProblemInstance
from tubalfgd.solver.base import ConvergenceTrace, FgdConfig, SolveResult, StopReason
from tubalfgd.solver.stopping import make_stop_rule
from tubalfgd.utils import log

# A factor whose norm grows past this multiple of the reference norm has diverged.
DIVERGENCE_FACTOR = 1e8


def _gram(F: Tensor3) -> Tensor3:
    return t_product(F, conj_transpose(F))


def relative_error(X: Tensor3, X_star: Tensor3) -> float:
    """
    Return ``||X - X_star||_F / ||X_star||_F``.
    """
    return fro_norm(X - X_star) / fro_norm(X_star)


def objective(F: Tensor3, P: ProblemInstance) -> float:
    """
    Return ``1/4 ||y - M(F * F^*)||_2^2``.
    """
    residual = P.ensemble.measure(_gram(F)) - P.y
    return 0.25 * float(np.dot(residual, residual))


def _relative_change(X_new: Tensor3, X_old: Tensor3) -> float:
    base = fro_norm(X_old)
    gap = fro_norm(X_new - X_old)
    if base == 0.0:
        return 0.0 if gap == 0.0 else np.inf
    return gap / base


def _check_factor(F: Tensor3, P: ProblemInstance):
    if F.n1 != P.n or F.n3 != P.n3:
        raise ShapeMismatch(f"factor {F.shape} does not fit a problem of size {P.n}x{P.n}x{P.n3}")


def _advance(F: Tensor3, G: Tensor3, eta: float, reference_norm: float) -> Tensor3:
    # F - eta * G * F computed on raw arrays so that blow-ups surface as Diverged.
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            data = F.data - eta * t_product(G, F).data
    except InvalidParameter as e:
        raise Diverged(f"gradient became non-finite: {e}")
    if not np.all(np.isfinite(data)):
        raise Diverged("factor became non-finite; the step size is too large")
    norm = float(np.linalg.norm(data))
    if norm > DIVERGENCE_FACTOR * reference_norm:
        raise Diverged(
            f"||F||_F = {norm:.3e} exceeds {DIVERGENCE_FACTOR:g} * {reference_norm:.3e}"
        )
    return Tensor3._wrap(data)


def spectral_init(P: ProblemInstance, r: int) -> Tensor3:
    """
    Spectral initialization from the adjoint image of the measurements.

    The symmetric part of ``M^*(y)`` is projected onto T-PSD tensors of
    tubal-rank ``r``; the returned factor ``F0`` satisfies that
    ``F0 * F0^*`` is the projection.

    Args:
        P: The recovery problem.
        r: Number of lateral slices of the factor, ``1 <= r <= n``.

    Returns:
        The ``(n, r, n3)`` initial factor.
    """
    return project_psd_rank_r(sym(P.ensemble.adjoint(P.y)), r)


def fgd_step(
    F: Tensor3,
    P: ProblemInstance,
    eta: float,
    raw_residual: bool = False,
    reference_norm: Optional[float] = None,
) -> Tensor3:
    """
    One gradient step on ``1/4 ||y - M(F * F^*)||_2^2``.

    With ``G = M^*(M(F * F^*) - y)`` the gradient is ``sym(G) * F``; the step
    returns ``F - eta * sym(G) * F``. ``raw_residual`` drops the symmetrization and
    uses ``G * F``, which only matches the gradient for symmetric measurements.

    Args:
        F: Current ``(n, r, n3)`` factor.
        P: The recovery problem.
        eta: Step size, ``eta >= 0``.
        raw_residual: Use the unsymmetrized residual.
        reference_norm: Norm of the initial factor for the divergence guard;
            defaults to the norm of ``F``.

    Returns:
        The next factor.

    Raises:
        Diverged: If the new factor is non-finite or grows past ``1e8`` times
            the reference norm.
    """
    _check_factor(F, P)
    _, G = P.ensemble.residual_adjoint(_gram(F), P.y)
    return _gradient_step(F, G, eta, raw_residual, reference_norm)


def _gradient_step(
    F: Tensor3, G: Tensor3, eta: float, raw_residual: bool, reference_norm: Optional[float]
) -> Tensor3:
    if not raw_residual:
        G = sym(G)
    reference = fro_norm(F) if reference_norm is None else reference_norm
    return _advance(F, G, eta, max(reference, np.finfo(float).tiny))


def population_step(F: Tensor3, X_star: Tensor3, eta: float) -> Tensor3:
    """
    One gradient step on ``1/4 ||F * F^* - X_star||_F^2``: ``F - eta (F F^* - X_star) F``.
    """
    if F.n1 != X_star.n1 or F.n3 != X_star.n3:
        raise ShapeMismatch(f"factor {F.shape} does not fit ground truth {X_star.shape}")
    return F - eta * t_product(_gram(F) - X_star, F)


def resolve_step_size(P: ProblemInstance, cfg: FgdConfig) -> float:
    """
    Return the fixed step size, or ``1 / (rho * ||sym(M^*(y))||)`` in auto mode.
    """
    if cfg.eta_mode == "fixed":
        return cfg.eta
    sigma1_hat = spectral_norm(sym(P.ensemble.adjoint(P.y)))
    if sigma1_hat == 0.0:
        raise InvalidParameter("auto step size is undefined for an all-zero adjoint image")
    return 1.0 / (cfg.rho * sigma1_hat)


def fgd_solve(P: ProblemInstance, cfg: FgdConfig) -> SolveResult:
    """
    Recover ``X_star`` by factorized gradient descent from a spectral start.

    The iterate ``F_t`` starts at ``spectral_init(P, cfg.r)`` and takes
    ``fgd_step`` until the configured stop rule fires or ``cfg.max_iters``
    steps have been taken. Row ``t`` of the trace describes ``F_t``; rows are
    recorded every ``cfg.trace_every`` steps and at the final iterate.

    Args:
        P: The recovery problem.
        cfg: Solver configuration.

    Returns:
        The final factor and iterate with the convergence trace.

    Raises:
        Diverged: If the iterates blow up.
        InvalidParameter: If ``cfg.r`` exceeds ``n``.
    """
    if cfg.r > P.n:
        raise InvalidParameter(f"rank r={cfg.r} exceeds n={P.n}")
    started = time.perf_counter()
    eta = resolve_step_size(P, cfg)
    rule = make_stop_rule(cfg)
    basis = subspace_basis(P.X_star, P.r_star) if cfg.record_error_terms else None

    F = spectral_init(P, cfg.r)
    reference_norm = max(fro_norm(F), np.finfo(float).tiny)
    X = _gram(F)
    residual, G = P.ensemble.residual_adjoint(X, P.y)
    trace = ConvergenceTrace()

    def record(t: int, rel_change: float):
        trace.append(
            t=t,
            rel_error=relative_error(X, P.X_star),
            objective=0.25 * float(np.dot(residual, residual)),
            rel_change=rel_change,
            wall_time=time.perf_counter() - started,
            error_terms=error_terms(F, basis, P.X_star) if basis is not None else None,
        )

    record(0, np.nan)
    stop_reason = StopReason.MAX_ITERS
    iterations = 0
    for t in range(1, cfg.max_iters + 1):
        F = _gradient_step(F, G, eta, cfg.raw_residual, reference_norm)
        X_new = _gram(F)
        rel_change = _relative_change(X_new, X)
        X = X_new
        residual, G = P.ensemble.residual_adjoint(X, P.y)
        iterations = t

        tail = {"rel_change": rel_change}
        if rule.requires_ground_truth:
            tail["rel_error"] = relative_error(X, P.X_star)
        reason = rule.should_stop(tail)
        if reason is not None or t % cfg.trace_every == 0 or t == cfg.max_iters:
            record(t, rel_change)
        if log.dev_mode and t % cfg.log_every == 0:
            log.iteration(t, rel_error=relative_error(X, P.X_star), rel_change=rel_change)
        if reason is not None:
            stop_reason = reason
            break

    log.debug(f"solve stopped after {iterations} iterations ({stop_reason.value})")
    return SolveResult(
        F_final=F,
        X_final=X,
        iterations=iterations,
        trace=trace,
        stop_reason=stop_reason,
        eta=eta,
    )
