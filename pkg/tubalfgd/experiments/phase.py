import math
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import Field

from tubalfgd.errors import Diverged
from tubalfgd.experiments.base import (
    BaseExperiment,
    ExperimentConfig,
    describe_class,
    make_problem,
)
from tubalfgd.experiments.runner import RunRecord, run_tasks
from tubalfgd.solver.base import FgdConfig
from tubalfgd.solver.fgd import fgd_solve
from tubalfgd.utils import log


class PhaseConfig(ExperimentConfig):
    n: int = Field(default=30, ge=2)
    n3: int = Field(default=5, ge=1)
    m_points: int = Field(default=10, ge=1)
    m_min_fraction: float = Field(default=0.01, gt=0, le=1)
    m_max_fraction: float = Field(default=1.0, gt=0, le=1)
    r_points: int = Field(default=10, ge=1)
    m_values: Optional[List[int]] = None
    r_values: Optional[List[int]] = None
    repeats: int = Field(default=10, ge=1)
    eta: float = Field(default=0.001, gt=0)
    max_iters: int = Field(default=1000, ge=1)
    success_tol: float = Field(default=1e-2, gt=0)
    min_successes: int = Field(default=5, ge=1)

    def m_grid(self) -> List[int]:
        """
        Log-spaced measurement counts between the two fractions of ``n^2 n3``.
        """
        if self.m_values is not None:
            return list(self.m_values)
        full = self.n * self.n * self.n3
        fractions = np.geomspace(self.m_min_fraction, self.m_max_fraction, self.m_points)
        return sorted({max(1, math.ceil(f * full - 1e-9)) for f in fractions})

    def r_grid(self) -> List[int]:
        if self.r_values is not None:
            return list(self.r_values)
        return sorted({int(round(r)) for r in np.linspace(1, self.n, self.r_points)})


def run_phase_cell(config: PhaseConfig, m: int, r_star: int, seed: int) -> dict:
    """
    Attempt one exact-rank recovery; success means relative error at most ``success_tol``.
    """
    P = make_problem(config, config.n, config.n3, r_star, m, 0.0, seed)
    fgd = FgdConfig(
        r=r_star,
        eta=config.eta,
        max_iters=config.max_iters,
        stop="rel_error",
        tol=config.success_tol,
        trace_every=config.max_iters,
    )
    try:
        result = fgd_solve(P, fgd)
        rel_error, iterations = result.final_rel_error, result.iterations
    except Diverged:
        rel_error, iterations = float("inf"), -1
    return {
        "m": m,
        "r_star": r_star,
        "seed": seed,
        "rel_error": rel_error,
        "iterations": iterations,
        "success": bool(rel_error <= config.success_tol),
    }


def phase_grid(rows: pd.DataFrame, min_successes: int) -> pd.DataFrame:
    """
    Collapse per-run rows into ``(m, r_star, successes, recovered)`` cells.
    """
    grid = rows.groupby(["m", "r_star"], sort=True)["success"].sum().astype(int)
    grid = grid.rename("successes").reset_index()
    grid["recovered"] = grid["successes"] >= min_successes
    return grid


@describe_class(
    "Grid of measurement counts against true ranks; a cell is recovered when "
    "enough seeded runs reach the success tolerance."
)
class PhaseExperiment(BaseExperiment):
    name = "phase"
    config_class = PhaseConfig

    def run(self) -> RunRecord:
        seeds = self.config.seed_list()
        tasks = [
            (self.config, m, r_star, seed)
            for m in self.config.m_grid()
            for r_star in self.config.r_grid()
            for seed in seeds
        ]
        rows = pd.DataFrame(run_tasks(run_phase_cell, tasks, self.config.threads, self.name))
        grid = phase_grid(rows, self.config.min_successes)
        log.color_print(
            f"{int(grid['recovered'].sum())} of {len(grid)} cells recovered "
            f"({len(seeds)} runs per cell)"
        )
        record = RunRecord(
            command=self.name,
            config={**self.config.model_dump(mode="json"), "seed_list": seeds},
            rows=rows,
            group_by=["m", "r_star"],
            value_columns=["rel_error", "iterations"],
            tables={"grid": grid},
        )
        record.write(self.output_dir)
        return record
