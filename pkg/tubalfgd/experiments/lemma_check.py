"""
Population and sample dynamics of the subspace error terms.

For each rank scenario two runs start from the same spectral initialization:
the population run advances ``(S, T)`` with ``tilde_update`` against the
ground truth, the sample run is the measured solver. Both record the three
block errors and ``||F F^* - X_star||`` per iteration, and every curve gets a
rate classification.
"""

import os
import time
from typing import List, Literal

import pandas as pd
from pydantic import Field

from tubalfgd.algebra.tensor import t_product
from tubalfgd.diagnostics.rates import rate_fit
from tubalfgd.diagnostics.subspace import error_terms, subspace_basis, subspace_split, tilde_update
from tubalfgd.errors import InsufficientData
from tubalfgd.experiments.base import (
    BaseExperiment,
    ExperimentConfig,
    describe_class,
    make_problem,
    measurement_count,
)
from tubalfgd.experiments.runner import RunRecord, run_tasks
from tubalfgd.solver.base import FgdConfig
from tubalfgd.solver.fgd import fgd_solve, spectral_init
from tubalfgd.utils import log

CURVES = ["d_ss", "st", "tt", "delta_norm"]


class LemmaCheckConfig(ExperimentConfig):
    n: int = Field(default=50, ge=2)
    n3: int = Field(default=5, ge=1)
    r_star: int = Field(default=3, ge=1)
    scenarios: List[Literal["exact", "over"]] = ["exact", "over"]
    over_rank: int = Field(default=2, ge=1)
    eta: float = Field(default=0.001, gt=0)
    max_iters: int = Field(default=1000, ge=1)


def population_curves(P, F0, eta: float, max_iters: int) -> pd.DataFrame:
    """
    Iterate ``tilde_update`` from ``F0`` and record the error terms of ``U S + V T``.
    """
    B = subspace_basis(P.X_star, P.r_star)
    S, T = subspace_split(F0, B)
    rows = []
    for t in range(max_iters + 1):
        if t > 0:
            S, T = tilde_update(S, T, B, eta)
        F = t_product(B.U, S) + t_product(B.V, T)
        rows.append({"t": t, **error_terms(F, B, P.X_star).as_dict()})
    return pd.DataFrame(rows)


def classify(curves: pd.DataFrame) -> dict:
    rates = {}
    for column in CURVES:
        try:
            rates[column] = rate_fit(curves, column=column).kind
        except InsufficientData:
            rates[column] = "n/a"
    return rates


def run_lemma_check(
    config: LemmaCheckConfig, scenario: str, seed: int, out_dir: str
) -> List[dict]:
    r = config.r_star if scenario == "exact" else config.r_star + config.over_rank
    m = measurement_count("dof", config.n, config.n3, config.r_star)
    P = make_problem(config, config.n, config.n3, config.r_star, m, 0.0, seed)

    started = time.perf_counter()
    population = population_curves(P, spectral_init(P, r), config.eta, config.max_iters)
    population_time = time.perf_counter() - started

    result = fgd_solve(
        P,
        FgdConfig(
            r=r,
            eta=config.eta,
            max_iters=config.max_iters,
            stop="iters_only",
            record_error_terms=True,
        ),
    )
    sample = result.trace.to_frame()

    rows = []
    for run, curves, wall_time in (
        ("population", population, population_time),
        ("sample", sample, result.wall_time),
    ):
        path = os.path.join(out_dir, f"{run}_{scenario}_seed{seed}.csv")
        curves.to_csv(path, index=False)
        rows.append(
            {
                "scenario": scenario,
                "run": run,
                "seed": seed,
                "r": r,
                "m": m,
                "final_delta_norm": float(curves["delta_norm"].iloc[-1]),
                "wall_time": wall_time,
                **{f"rate_{c}": kind for c, kind in classify(curves).items()},
                "trace_path": path,
            }
        )
    return rows


@describe_class(
    "Track the subspace error terms of population and sample dynamics and "
    "classify each curve as linear or sub-linear."
)
class LemmaCheckExperiment(BaseExperiment):
    name = "lemma-check"
    config_class = LemmaCheckConfig

    def run(self) -> RunRecord:
        os.makedirs(self.output_dir, exist_ok=True)
        seeds = self.config.seed_list()
        tasks = [
            (self.config, scenario, seed, self.output_dir)
            for scenario in self.config.scenarios
            for seed in seeds
        ]
        results = run_tasks(run_lemma_check, tasks, self.config.threads, self.name)
        rows = pd.DataFrame([row for rows in results for row in rows])
        for row in rows.to_dict("records"):
            rates = ", ".join(f"{c}={row[f'rate_{c}']}" for c in CURVES)
            log.color_print(f"[{row['scenario']}/{row['run']}] seed={row['seed']}: {rates}")
        record = RunRecord(
            command=self.name,
            config={**self.config.model_dump(mode="json"), "seed_list": seeds},
            rows=rows,
            group_by=["scenario", "run", "r"],
            value_columns=["final_delta_norm", "wall_time"],
            trace_paths=list(rows["trace_path"]) if not rows.empty else [],
        )
        record.write(self.output_dir)
        return record
