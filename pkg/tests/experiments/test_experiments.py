import os
import tempfile
import unittest

import numpy as np
import pandas as pd
import pydantic
import yaml

from tubalfgd.experiments import (
    BenchExperiment,
    ConvergenceExperiment,
    LemmaCheckExperiment,
    PhaseConfig,
    PhaseExperiment,
    RipExperiment,
    TablesExperiment,
    read_tensor,
)
from tubalfgd.experiments.bench import scaling_exponents
from tubalfgd.experiments.lemma_check import CURVES, population_curves
from tubalfgd.experiments.phase import phase_grid
from tubalfgd.experiments.base import measurement_count
from tubalfgd.experiments.tables import family_rank, reference_error
from tubalfgd.sensing import DEFAULT_MAX_DENSE_BYTES, dense_bytes, gen_problem
from tubalfgd.solver import spectral_init

RATE_KINDS = {"linear", "sublinear", "n/a"}


class ExperimentTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()

    def assertOutputs(self, command, *names):
        for name in ("runs.csv", "summary.csv", "config.yaml") + names:
            self.assertTrue(os.path.isfile(os.path.join(self.out, command, name)), name)
        with open(os.path.join(self.out, command, "config.yaml")) as file:
            self.assertEqual(yaml.safe_load(file)["command"], command)


class TestConvergence(ExperimentTestCase):
    def test_initialization_only(self):
        record = ConvergenceExperiment(
            out=self.out, n=4, n3=2, r_star=1, max_iters=0, repeats=2, save_tensors=True
        ).run()
        self.assertEqual(len(record.rows), 4)
        self.assertEqual(sorted(set(record.rows["r"])), [1, 3])
        self.assertTrue((record.rows["iterations"] == 0).all())
        self.assertTrue((record.rows["rate"] == "n/a").all())
        self.assertEqual(record.config["seed_list"], [0, 1])
        self.assertOutputs("convergence", "trace_exact_seed0.csv", "trace_over_seed1.csv")
        trace = pd.read_csv(record.trace_paths[0])
        self.assertEqual(list(trace["t"]), [0])
        factor = read_tensor(os.path.join(self.out, "convergence", "factor_exact_seed0.t3r"))
        self.assertEqual(factor.shape, (4, 1, 2))

    def test_short_run(self):
        record = ConvergenceExperiment(
            out=self.out, n=5, n3=2, r_star=1, scenarios=["exact"], max_iters=25,
            stop="iters_only", trace_every=5, materialization="dense",
        ).run()
        row = record.rows.iloc[0]
        self.assertEqual(row["iterations"], 25)
        self.assertEqual(row["m"], 10 * 9 * 2)
        self.assertEqual(list(pd.read_csv(row["trace_path"])["t"]), [0, 5, 10, 15, 20, 25])

    def test_same_seed_same_rows(self):
        kwargs = dict(n=4, n3=2, r_star=1, scenarios=["exact"], max_iters=10, seed=3)
        a = ConvergenceExperiment(out=os.path.join(self.out, "a"), **kwargs).run()
        b = ConvergenceExperiment(out=os.path.join(self.out, "b"), **kwargs).run()
        self.assertEqual(list(a.rows["rel_error"]), list(b.rows["rel_error"]))

    def test_invalid_config(self):
        with self.assertRaises(pydantic.ValidationError):
            ConvergenceExperiment(out=self.out, scenarios=["under"])
        with self.assertRaises(pydantic.ValidationError):
            ConvergenceExperiment(out=self.out, v=-0.1)


class TestPhase(ExperimentTestCase):
    def test_default_grids(self):
        config = PhaseConfig()
        m_grid, r_grid = config.m_grid(), config.r_grid()
        self.assertEqual((len(m_grid), m_grid[0], m_grid[-1]), (10, 45, 4500))
        self.assertEqual((len(r_grid), r_grid[0], r_grid[-1]), (10, 1, 30))

    def test_grid_collapse(self):
        rows = pd.DataFrame(
            {
                "m": [10, 10, 10, 20, 20, 20],
                "r_star": [1] * 6,
                "success": [True, True, False, False, False, True],
            }
        )
        grid = phase_grid(rows, min_successes=2)
        self.assertEqual(list(grid.columns), ["m", "r_star", "successes", "recovered"])
        self.assertEqual(list(grid["successes"]), [2, 1])
        self.assertEqual(list(grid["recovered"]), [True, False])

    def test_tiny_grid(self):
        record = PhaseExperiment(
            out=self.out, n=4, n3=2, m_values=[5, 60], r_values=[1, 2], repeats=2,
            max_iters=20, min_successes=1,
        ).run()
        self.assertEqual(len(record.rows), 8)
        grid = record.tables["grid"]
        self.assertEqual(len(grid), 4)
        self.assertTrue(grid["successes"].between(0, 2).all())
        self.assertOutputs("phase", "grid.csv")


class TestTables(ExperimentTestCase):
    def test_family_helpers(self):
        self.assertEqual(family_rank("r30", 30), 9)
        self.assertEqual(family_rank("r10", 30), 3)
        self.assertEqual(family_rank("r10", 4), 1)
        self.assertEqual(reference_error("r30", 30, 0.3), 0.0367)
        self.assertIsNone(reference_error("r30", 31, 0.3))

    def test_large_cell_stays_dense(self):
        r_star = family_rank("r30", 50)
        m = measurement_count("rank_scaled", 50, 5, r_star)
        needed = dense_bytes(50, 5, m)
        cap = TablesExperiment(out=self.out).config.max_dense_bytes
        self.assertGreater(needed, DEFAULT_MAX_DENSE_BYTES)
        self.assertLessEqual(needed, cap)

    def test_tiny_cell(self):
        record = TablesExperiment(
            out=self.out, cells=[(5, 0.3)], n3=2, repeats=2, max_iters=20
        ).run()
        row = record.rows.iloc[0]
        self.assertEqual((row["r_star"], row["r"], row["m"]), (2, 4, 320))
        table = record.tables["table"]
        self.assertEqual(len(table), 1)
        self.assertTrue(np.isnan(table["reference_error"].iloc[0]))
        self.assertIn("error_ratio", table.columns)
        self.assertOutputs("tables", "table.csv")

    def test_unknown_family(self):
        with self.assertRaises(pydantic.ValidationError):
            TablesExperiment(out=self.out, family="r40")


class TestLemmaCheck(ExperimentTestCase):
    def test_population_curves(self):
        P = gen_problem(4, 2, 1, 140, 0.0, seed=0)
        curves = population_curves(P, spectral_init(P, 2), 0.001, 15)
        self.assertEqual(list(curves["t"]), list(range(16)))
        for column in CURVES + ["e_t"]:
            self.assertIn(column, curves.columns)
        self.assertTrue((curves["e_t"] <= curves["delta_norm"] + 1e-8).all())

    def test_tiny_run(self):
        record = LemmaCheckExperiment(
            out=self.out, n=4, n3=2, r_star=1, over_rank=1, max_iters=30
        ).run()
        self.assertEqual(len(record.rows), 4)
        self.assertEqual(set(record.rows["run"]), {"population", "sample"})
        for column in CURVES:
            self.assertTrue(set(record.rows[f"rate_{column}"]) <= RATE_KINDS)
        self.assertOutputs("lemma-check", "population_exact_seed0.csv", "sample_over_seed0.csv")
        sample = pd.read_csv(os.path.join(self.out, "lemma-check", "sample_over_seed0.csv"))
        self.assertEqual(len(sample), 31)


class TestBench(ExperimentTestCase):
    def test_no_shapes(self):
        record = BenchExperiment(out=self.out, shapes=[]).run()
        self.assertTrue(record.rows.empty)
        self.assertTrue(record.tables["scaling"].empty)
        self.assertOutputs("bench", "scaling.csv")

    def test_small_shapes(self):
        record = BenchExperiment(
            out=self.out, shapes=[(8, 2, 2), (16, 2, 2)], repeats=3, warmup=1
        ).run()
        self.assertEqual(list(record.rows["n"]), [8, 16])
        self.assertTrue((record.rows["median_ns"] > 0).all())
        scaling = record.tables["scaling"]
        self.assertEqual(len(scaling), 1)
        self.assertTrue(np.isfinite(scaling["exponent_n"].iloc[0]))

    def test_scaling_fit(self):
        rows = pd.DataFrame(
            {"n": [10, 20, 40, 10], "r": [2, 2, 2, 4], "n3": [3, 3, 3, 3],
             "median_ns": [100, 400, 1600, 200]}
        )
        scaling = scaling_exponents(rows)
        self.assertEqual(len(scaling), 1)
        self.assertAlmostEqual(scaling["exponent_n"].iloc[0], 2.0, places=10)


class TestRip(ExperimentTestCase):
    def test_tiny_run(self):
        record = RipExperiment(out=self.out, n=4, n3=2, r=1, trials=3, repeats=2).run()
        self.assertEqual(list(record.rows["seed"]), [0, 1])
        self.assertTrue((record.rows["m"] == 280).all())
        self.assertTrue((record.rows["delta_hat"] >= 0).all())
        self.assertEqual(len(record.tables["ratios"]), 6)
        self.assertOutputs("rip", "ratios.csv")


if __name__ == "__main__":
    unittest.main()
