import os
from typing import List, Literal, Optional

import pandas as pd
from pydantic import Field

from tubalfgd.diagnostics.rates import rate_fit
from tubalfgd.errors import InsufficientData
from tubalfgd.experiments.base import (
    BaseExperiment,
    ExperimentConfig,
    MeasurementFormula,
    describe_class,
    make_problem,
    measurement_count,
)
from tubalfgd.experiments.runner import RunRecord, run_tasks
from tubalfgd.experiments.tensor_io import write_tensor
from tubalfgd.solver.base import FgdConfig
from tubalfgd.solver.fgd import fgd_solve
from tubalfgd.utils import log

Scenario = Literal["exact", "over"]


class ConvergenceConfig(ExperimentConfig):
    n: int = Field(default=50, ge=1)
    n3: int = Field(default=5, ge=1)
    r_star: int = Field(default=3, ge=1)
    scenarios: List[Scenario] = ["exact", "over"]
    over_rank: int = Field(default=2, ge=1)
    m: Optional[int] = Field(default=None, ge=1)
    m_formula: MeasurementFormula = "dof"
    v: float = Field(default=0.0, ge=0)
    eta: float = Field(default=0.001, gt=0)
    eta_mode: Literal["fixed", "auto"] = "fixed"
    max_iters: int = Field(default=1000, ge=0)
    stop: Literal["rel_change", "rel_error", "iters_only"] = "rel_error"
    tol: float = Field(default=1e-5, gt=0)
    trace_every: int = Field(default=1, ge=1)
    record_error_terms: bool = False
    save_tensors: bool = False

    def rank_for(self, scenario: str) -> int:
        return self.r_star if scenario == "exact" else self.r_star + self.over_rank

    def measurements(self) -> int:
        if self.m is not None:
            return self.m
        return measurement_count(self.m_formula, self.n, self.n3, self.r_star)


def run_convergence(config: ConvergenceConfig, scenario: str, seed: int, out_dir: str) -> dict:
    """
    Solve one seeded problem and write its per-iteration trace.

    Returns:
        The summary row of the run.
    """
    r = config.rank_for(scenario)
    m = config.measurements()
    P = make_problem(config, config.n, config.n3, config.r_star, m, config.v, seed)
    fgd = FgdConfig(
        r=r,
        eta=config.eta,
        eta_mode=config.eta_mode,
        max_iters=config.max_iters,
        stop=config.stop,
        tol=config.tol,
        trace_every=config.trace_every,
        record_error_terms=config.record_error_terms,
    )
    result = fgd_solve(P, fgd)

    trace_path = os.path.join(out_dir, f"trace_{scenario}_seed{seed}.csv")
    result.trace.to_frame().to_csv(trace_path, index=False)
    if config.save_tensors:
        write_tensor(os.path.join(out_dir, f"factor_{scenario}_seed{seed}.t3r"), result.F_final)

    try:
        rate = rate_fit(result.trace).kind
    except InsufficientData:
        rate = "n/a"
    return {
        "scenario": scenario,
        "seed": seed,
        "r": r,
        "m": P.m,
        "kappa": P.spectrum.kappa,
        "eta": result.eta,
        "rel_error": result.final_rel_error,
        "iterations": result.iterations,
        "wall_time": result.wall_time,
        "stop_reason": result.stop_reason.value,
        "rate": rate,
        "trace_path": trace_path,
    }


@describe_class(
    "Run the solver per seed in the exact-rank and over-rank scenarios and "
    "write per-iteration traces."
)
class ConvergenceExperiment(BaseExperiment):
    name = "convergence"
    config_class = ConvergenceConfig

    def run(self) -> RunRecord:
        os.makedirs(self.output_dir, exist_ok=True)
        tasks = [
            (self.config, scenario, seed, self.output_dir)
            for scenario in self.config.scenarios
            for seed in self.config.seed_list()
        ]
        rows = pd.DataFrame(run_tasks(run_convergence, tasks, self.config.threads, self.name))
        for row in rows.itertuples():
            log.color_print(
                f"[{row.scenario}] seed={row.seed} r={row.r}: rel_error={row.rel_error:.3e} "
                f"after {row.iterations} iterations ({row.rate})"
            )
        record = RunRecord(
            command=self.name,
            config={**self.config.model_dump(mode="json"), "seed_list": self.config.seed_list()},
            rows=rows,
            group_by=["scenario", "r"],
            value_columns=["rel_error", "iterations", "wall_time"],
            trace_paths=list(rows["trace_path"]) if not rows.empty else [],
        )
        record.write(self.output_dir)
        return record
