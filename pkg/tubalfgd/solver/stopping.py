from abc import ABC, abstractmethod
from typing import Dict, Optional, Union

import numpy as np

from tubalfgd.errors import InvalidParameter
from tubalfgd.solver.base import ConvergenceTrace, FgdConfig, StopReason


class BaseStopRule(ABC):
    """
    Abstract base class for stopping rules of the solver.

    A rule looks at the latest iteration's metrics and either returns
    ``None`` to continue or the reason to stop.
    """

    requires_ground_truth = False

    def __init__(self, tol: float = 5e-4, **kwargs):
        if tol <= 0:
            raise InvalidParameter(f"stop tolerance must be positive, got {tol}")
        self.tol = tol

    @abstractmethod
    def should_stop(self, tail: Dict[str, float]) -> Optional[StopReason]:
        pass

    def __repr__(self) -> str:
        return f"{type(self).__name__}(tol={self.tol:g})"


class RelChangeStop(BaseStopRule):
    """
    Stop once ``||X_{t+1} - X_t||_F / ||X_t||_F <= tol``.
    """

    def should_stop(self, tail: Dict[str, float]) -> Optional[StopReason]:
        change = tail.get("rel_change", np.nan)
        if np.isfinite(change) and change <= self.tol:
            return StopReason.REL_CHANGE
        return None


class RelErrorStop(BaseStopRule):
    """
    Stop once ``||X_t - X_star||_F / ||X_star||_F <= tol``.
    """

    requires_ground_truth = True

    def should_stop(self, tail: Dict[str, float]) -> Optional[StopReason]:
        error = tail.get("rel_error", np.nan)
        if np.isfinite(error) and error <= self.tol:
            return StopReason.REL_ERROR
        return None


class ItersOnlyStop(BaseStopRule):
    def should_stop(self, tail: Dict[str, float]) -> Optional[StopReason]:
        return None


STOP_RULES = {
    "rel_change": RelChangeStop,
    "rel_error": RelErrorStop,
    "iters_only": ItersOnlyStop,
}


def make_stop_rule(cfg: FgdConfig) -> BaseStopRule:
    return STOP_RULES[cfg.stop](tol=cfg.tol)


def stop_check(
    trace: Union[ConvergenceTrace, Dict[str, float]], cfg: FgdConfig
) -> Optional[StopReason]:
    """
    Evaluate the configured stopping rule on the latest iteration.

    Args:
        trace: A convergence trace, whose last row is used, or that row as a dict.
        cfg: The solver configuration naming the rule and its tolerance.

    Returns:
        ``None`` to continue, otherwise the stop reason. Reaching ``max_iters``
        is decided by the solver loop, not here.
    """
    tail = trace.tail() if isinstance(trace, ConvergenceTrace) else trace
    return make_stop_rule(cfg).should_stop(tail)
