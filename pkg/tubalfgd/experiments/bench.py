import time
from typing import List, Tuple

import numpy as np
import pandas as pd
from pydantic import Field

from tubalfgd.algebra.tensor import conj_transpose, random_tensor, sym, t_product
from tubalfgd.experiments.base import BaseExperiment, ExperimentConfig, describe_class
from tubalfgd.experiments.runner import RunRecord
from tubalfgd.utils import log

BENCH_COLUMNS = ["n", "r", "n3", "repeats", "median_ns"]
SCALING_COLUMNS = ["r", "n3", "shapes", "exponent_n"]


class BenchConfig(ExperimentConfig):
    shapes: List[Tuple[int, int, int]] = [(64, 8, 5), (128, 8, 5), (128, 16, 5)]
    repeats: int = Field(default=50, ge=1)
    warmup: int = Field(default=3, ge=0)


def time_kernel(n: int, r: int, n3: int, repeats: int, warmup: int, seed: int) -> int:
    """
    Median wall time in nanoseconds of one iteration's tensor work.

    The kernel forms ``F * F^*`` and the product of a symmetric ``n x n x n3``
    residual with ``F``, the t-products and FFTs a solver step performs.
    """
    rng = np.random.default_rng(seed)
    F = random_tensor((n, r, n3), rng)
    G = sym(random_tensor((n, n, n3), rng))
    samples = []
    for i in range(warmup + repeats):
        start = time.perf_counter_ns()
        t_product(F, conj_transpose(F))
        t_product(G, F)
        elapsed = time.perf_counter_ns() - start
        if i >= warmup:
            samples.append(elapsed)
    return int(np.median(samples))


def scaling_exponents(rows: pd.DataFrame) -> pd.DataFrame:
    """
    Fit ``log time ~ a + b log n`` for every ``(r, n3)`` with at least two sizes.
    """
    out = []
    for (r, n3), group in rows.groupby(["r", "n3"], sort=True):
        if group["n"].nunique() < 2:
            continue
        slope, _ = np.polyfit(np.log(group["n"]), np.log(group["median_ns"]), 1)
        out.append({"r": r, "n3": n3, "shapes": len(group), "exponent_n": float(slope)})
    return pd.DataFrame(out, columns=SCALING_COLUMNS)


@describe_class("Time the per-iteration t-product kernel across (n, r, n3) shapes.")
class BenchExperiment(BaseExperiment):
    name = "bench"
    config_class = BenchConfig

    def run(self) -> RunRecord:
        rows = []
        for n, r, n3 in self.config.shapes:
            median_ns = time_kernel(
                n, r, n3, self.config.repeats, self.config.warmup, self.config.seed
            )
            log.color_print(f"n={n} r={r} n3={n3}: {median_ns / 1e6:.3f} ms per iteration")
            rows.append(
                {"n": n, "r": r, "n3": n3, "repeats": self.config.repeats, "median_ns": median_ns}
            )
        frame = pd.DataFrame(rows, columns=BENCH_COLUMNS)
        record = RunRecord(
            command=self.name,
            config=self.config.model_dump(mode="json"),
            rows=frame,
            group_by=["n", "r", "n3"],
            value_columns=["median_ns"],
            tables={"scaling": scaling_exponents(frame)},
        )
        record.write(self.output_dir)
        return record
