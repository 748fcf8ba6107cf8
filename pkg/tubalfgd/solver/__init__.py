from tubalfgd.solver.base import ConvergenceTrace, FgdConfig, SolveResult, StopReason
from tubalfgd.solver.fgd import (
    fgd_solve,
    fgd_step,
    objective,
    population_step,
    relative_error,
    resolve_step_size,
    spectral_init,
)
from tubalfgd.solver.stopping import (
    BaseStopRule,
    ItersOnlyStop,
    RelChangeStop,
    RelErrorStop,
    make_stop_rule,
    stop_check,
)

__all__ = [
    "FgdConfig",
    "ConvergenceTrace",
    "SolveResult",
    "StopReason",
    "BaseStopRule",
    "RelChangeStop",
    "RelErrorStop",
    "ItersOnlyStop",
    "make_stop_rule",
    "stop_check",
    "spectral_init",
    "fgd_step",
    "fgd_solve",
    "population_step",
    "relative_error",
    "objective",
    "resolve_step_size",
]
