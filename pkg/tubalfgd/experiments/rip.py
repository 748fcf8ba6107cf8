from typing import Optional

import pandas as pd
from pydantic import Field

from tubalfgd.experiments.base import BaseExperiment, ExperimentConfig, describe_class
from tubalfgd.experiments.runner import RunRecord, run_tasks
from tubalfgd.sensing.rip import empirical_rip
from tubalfgd.utils import log


class RipConfig(ExperimentConfig):
    n: int = Field(default=12, ge=1)
    n3: int = Field(default=3, ge=1)
    r: int = Field(default=2, ge=1)
    m: Optional[int] = Field(default=None, ge=1)
    trials: int = Field(default=50, ge=1)
    repeats: int = Field(default=10, ge=1)

    def measurements(self) -> int:
        if self.m is not None:
            return self.m
        return 20 * (2 * self.n - self.r) * self.n3 * self.r


def run_rip(config: RipConfig, seed: int) -> dict:
    estimate = empirical_rip(
        config.n,
        config.n3,
        config.r,
        config.measurements(),
        config.trials,
        seed,
        mode=config.measurement,
        materialization=config.materialization,
    )
    return {
        "seed": seed,
        "r": config.r,
        "m": config.measurements(),
        "delta_hat": estimate.delta_hat,
        "ratios": list(estimate.ratio_samples),
    }


@describe_class("Monte-Carlo estimate of the restricted isometry constant per seed.")
class RipExperiment(BaseExperiment):
    name = "rip"
    config_class = RipConfig

    def run(self) -> RunRecord:
        seeds = self.config.seed_list()
        tasks = [(self.config, seed) for seed in seeds]
        results = run_tasks(run_rip, tasks, self.config.threads, self.name)
        ratios = pd.DataFrame(
            [
                {"seed": res["seed"], "trial": i, "ratio": ratio}
                for res in results
                for i, ratio in enumerate(res["ratios"])
            ],
            columns=["seed", "trial", "ratio"],
        )
        rows = pd.DataFrame([{k: v for k, v in res.items() if k != "ratios"} for res in results])
        below = int((rows["delta_hat"] < 0.5).sum())
        log.color_print(
            f"delta_hat < 0.5 in {below} of {len(rows)} seeds (m={self.config.measurements()})"
        )
        record = RunRecord(
            command=self.name,
            config={**self.config.model_dump(mode="json"), "seed_list": seeds},
            rows=rows,
            group_by=["r", "m"],
            value_columns=["delta_hat"],
            tables={"ratios": ratios},
        )
        record.write(self.output_dir)
        return record
