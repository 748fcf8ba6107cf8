from enum import Enum
from typing import Dict, List, Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from tubalfgd.algebra.tensor import Tensor3
from tubalfgd.errors import InvalidParameter

TRACE_COLUMNS = ["t", "rel_error", "objective", "rel_change", "wall_time"]
ERROR_TERM_COLUMNS = ["d_ss", "st", "tt", "e_t", "delta_norm"]


class FgdConfig(BaseModel):
    """
    Parameters of one factorized gradient descent solve.

    Attributes:
        r: Estimated tubal-rank, the number of lateral slices of the factor.
        eta: Fixed step size, used when ``eta_mode`` is ``fixed``.
        max_iters: Maximum number of gradient steps.
        stop: Stopping rule.
        tol: Threshold of the stopping rule.
        eta_mode: ``fixed`` uses ``eta``; ``auto`` uses ``1 / (rho * sigma1_hat)``
            with ``sigma1_hat`` the spectral norm of the symmetrized adjoint image.
        rho: Step-size divisor of the auto mode, at least 10.
        trace_every: Recording cadence of the convergence trace.
        raw_residual: Use the unsymmetrized residual ``G * F`` in the update.
        record_error_terms: Record the subspace error terms at every recorded iteration.
        log_every: Debug logging cadence.
    """

    r: int = Field(ge=1)
    eta: float = Field(default=0.001, gt=0)
    max_iters: int = Field(default=1000, ge=0)
    stop: Literal["rel_change", "rel_error", "iters_only"] = "rel_change"
    tol: float = Field(default=5e-4, gt=0)
    eta_mode: Literal["fixed", "auto"] = "fixed"
    rho: float = 10.0
    trace_every: int = Field(default=1, ge=1)
    raw_residual: bool = False
    record_error_terms: bool = False
    log_every: int = Field(default=100, ge=1)

    @model_validator(mode="after")
    def _check_rho(self):
        if self.eta_mode == "auto" and self.rho < 10:
            raise ValueError(f"auto step size needs rho >= 10, got {self.rho}")
        return self


class StopReason(str, Enum):
    REL_CHANGE = "rel_change"
    REL_ERROR = "rel_error"
    MAX_ITERS = "max_iters"


class ConvergenceTrace:
    """
    Per-iteration record of a solve.

    Each recorded iteration stores the relative error against the ground
    truth, the objective ``1/4 ||y - M(F F^*)||_2^2``, the relative change of
    the iterate (NaN at the initial point) and the elapsed wall time. When
    error terms are recorded every row carries them too.
    """

    def __init__(self):
        self.t: List[int] = []
        self.rel_error: List[float] = []
        self.objective: List[float] = []
        self.rel_change: List[float] = []
        self.wall_time: List[float] = []
        self.error_terms: List = []

    def append(
        self,
        t: int,
        rel_error: float,
        objective: float,
        rel_change: float,
        wall_time: float,
        error_terms=None,
    ):
        if self.t and (t <= self.t[-1] or wall_time < self.wall_time[-1]):
            raise InvalidParameter(f"trace rows must advance, got t={t} after t={self.t[-1]}")
        self.t.append(t)
        self.rel_error.append(rel_error)
        self.objective.append(objective)
        self.rel_change.append(rel_change)
        self.wall_time.append(wall_time)
        if error_terms is not None:
            self.error_terms.append(error_terms)

    def tail(self) -> Dict[str, float]:
        """
        Return the most recent row as a dict, or an empty dict for an empty trace.
        """
        if not self.t:
            return {}
        return {
            "t": self.t[-1],
            "rel_error": self.rel_error[-1],
            "objective": self.objective[-1],
            "rel_change": self.rel_change[-1],
            "wall_time": self.wall_time[-1],
        }

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            {
                "t": self.t,
                "rel_error": self.rel_error,
                "objective": self.objective,
                "rel_change": self.rel_change,
                "wall_time": self.wall_time,
            },
            columns=TRACE_COLUMNS,
        )
        if self.error_terms and len(self.error_terms) == len(self.t):
            for column in ERROR_TERM_COLUMNS:
                frame[column] = [getattr(terms, column) for terms in self.error_terms]
        return frame

    def __len__(self) -> int:
        return len(self.t)

    def __repr__(self) -> str:
        last = f", last_rel_error={self.rel_error[-1]:.3e}" if self.t else ""
        return f"ConvergenceTrace(rows={len(self)}{last})"


class SolveResult:
    """
    Output of a solve.

    Attributes:
        F_final: The final ``(n, r, n3)`` factor.
        X_final: ``F_final * F_final^*``.
        iterations: Number of gradient steps taken.
        trace: The convergence trace.
        stop_reason: Why the solve ended.
        eta: The step size that was used.
    """

    def __init__(
        self,
        F_final: Tensor3,
        X_final: Tensor3,
        iterations: int,
        trace: ConvergenceTrace,
        stop_reason: StopReason,
        eta: float,
    ):
        self.F_final = F_final
        self.X_final = X_final
        self.iterations = iterations
        self.trace = trace
        self.stop_reason = stop_reason
        self.eta = eta

    @property
    def final_rel_error(self) -> Optional[float]:
        return self.trace.rel_error[-1] if self.trace.t else None

    @property
    def wall_time(self) -> float:
        return self.trace.wall_time[-1] if self.trace.t else float(np.nan)

    def __repr__(self) -> str:
        return (
            f"SolveResult(iterations={self.iterations}, stop_reason={self.stop_reason.value}, "
            f"rel_error={self.final_rel_error})"
        )
