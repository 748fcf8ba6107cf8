from typing import TYPE_CHECKING, Optional, Sequence, Union

import numpy as np
import pandas as pd

from tubalfgd.errors import InsufficientData

if TYPE_CHECKING:
    from tubalfgd.solver.base import ConvergenceTrace

MIN_POINTS = 20
# Values below this fraction of the first one are treated as converged to round-off.
FLOOR = 1e-12


class RateFit:
    """
    Classification of an error curve as linear or sub-linear convergence.

    Attributes:
        kind: ``linear`` for ``log e_t ~ a + b t``, ``sublinear`` for ``e_t ~ C / (t + t0)``.
        slope: Fitted ``b`` of the linear model.
        intercept: Fitted ``a`` of the linear model.
        C: Fitted constant of the sub-linear model, NaN when that model is invalid.
        t0: Fitted offset of the sub-linear model.
        r2: Coefficient of determination of the chosen model in log space.
        r2_linear: r^2 of the linear model.
        r2_sublinear: r^2 of the sub-linear model, ``-inf`` when invalid.
        points: Number of tail points used by the fit.
    """

    def __init__(
        self,
        kind: str,
        slope: float,
        intercept: float,
        C: float,
        t0: float,
        r2_linear: float,
        r2_sublinear: float,
        points: int,
    ):
        self.kind = kind
        self.slope = slope
        self.intercept = intercept
        self.C = C
        self.t0 = t0
        self.r2_linear = r2_linear
        self.r2_sublinear = r2_sublinear
        self.r2 = r2_linear if kind == "linear" else r2_sublinear
        self.points = points

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "slope": self.slope,
            "C": self.C,
            "t0": self.t0,
            "r2": self.r2,
            "r2_linear": self.r2_linear,
            "r2_sublinear": self.r2_sublinear,
            "points": self.points,
        }

    def __repr__(self) -> str:
        if self.kind == "linear":
            return f"RateFit(linear, slope={self.slope:.4g}, r2={self.r2:.4f})"
        return f"RateFit(sublinear, C={self.C:.4g}, t0={self.t0:.4g}, r2={self.r2:.4f})"


def _r_squared(observed: np.ndarray, predicted: np.ndarray) -> float:
    ss_res = float(np.sum((observed - predicted) ** 2))
    ss_tot = float(np.sum((observed - np.mean(observed)) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return 1.0 - ss_res / ss_tot


def _curve(trace, column: str, t: Optional[Sequence[float]]):
    if hasattr(trace, "to_frame"):
        trace = trace.to_frame()
    if isinstance(trace, pd.DataFrame):
        return trace["t"].to_numpy(dtype=float), trace[column].to_numpy(dtype=float)
    values = np.asarray(trace, dtype=float)
    steps = np.arange(len(values), dtype=float) if t is None else np.asarray(t, dtype=float)
    return steps, values


def rate_fit(
    trace: Union["ConvergenceTrace", pd.DataFrame, Sequence[float]],
    column: str = "rel_error",
    t: Optional[Sequence[float]] = None,
    min_points: int = MIN_POINTS,
) -> RateFit:
    """
    Classify the tail of an error curve as linear or sub-linear convergence.

    The curve is cut where it first drops below ``1e-12`` times its first
    value or stops being positive and finite. Over the last half of the
    remaining points, ``log e_t`` is fitted linearly in ``t`` and ``1 / e_t``
    is fitted linearly in ``t`` (giving ``e_t = C / (t + t0)``). Both fits are
    scored by r^2 of ``log e_t`` and the better one wins.

    Args:
        trace: A convergence trace, a frame with a ``t`` column, or raw values.
        column: Column to fit when ``trace`` is a trace or frame.
        t: Iteration indices for raw values, ``0..len-1`` by default.
        min_points: Minimum number of usable points.

    Returns:
        The fit.

    Raises:
        InsufficientData: If fewer than ``min_points`` usable points remain.
    """
    steps, values = _curve(trace, column, t)
    usable = len(values)
    if usable and values[0] > 0:
        bad = ~np.isfinite(values) | (values <= FLOOR * values[0])
        if np.any(bad):
            usable = int(np.argmax(bad))
    else:
        usable = 0
    if usable < min_points:
        raise InsufficientData(f"rate fit needs {min_points} positive points, got {usable}")

    start = usable // 2
    ts, es = steps[start:usable], values[start:usable]
    log_e = np.log(es)

    slope, intercept = np.polyfit(ts, log_e, 1)
    r2_linear = _r_squared(log_e, intercept + slope * ts)

    inv_slope, inv_intercept = np.polyfit(ts, 1.0 / es, 1)
    C, t0 = np.nan, np.nan
    r2_sublinear = -np.inf
    if inv_slope > 0:
        C = 1.0 / inv_slope
        t0 = inv_intercept * C
        if np.all(ts + t0 > 0):
            r2_sublinear = _r_squared(log_e, np.log(C) - np.log(ts + t0))
        else:
            C, t0 = np.nan, np.nan

    kind = "linear" if r2_linear >= r2_sublinear else "sublinear"
    return RateFit(
        kind=kind,
        slope=float(slope),
        intercept=float(intercept),
        C=float(C),
        t0=float(t0),
        r2_linear=float(r2_linear),
        r2_sublinear=float(r2_sublinear),
        points=len(ts),
    )
