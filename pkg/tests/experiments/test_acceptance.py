"""
Full-size reproductions of the recovery experiments.

These take minutes and only run with ``TUBAL_FGD_SLOW=1``.
"""

import os
import tempfile
import unittest

import numpy as np

from tubalfgd.diagnostics import rate_fit
from tubalfgd.experiments import PhaseExperiment, TablesExperiment
from tubalfgd.experiments.base import measurement_count
from tubalfgd.experiments.bench import time_kernel
from tubalfgd.experiments.lemma_check import population_curves
from tubalfgd.sensing import gen_problem
from tubalfgd.solver import FgdConfig, fgd_solve, spectral_init

SLOW = os.environ.get("TUBAL_FGD_SLOW") == "1"


@unittest.skipUnless(SLOW, "set TUBAL_FGD_SLOW=1 to run full-size reproductions")
class TestNoiselessConvergence(unittest.TestCase):
    n, n3, r_star = 50, 5, 3

    def setUp(self):
        m = measurement_count("dof", self.n, self.n3, self.r_star)
        self.P = gen_problem(
            self.n, self.n3, self.r_star, m, 0.0, seed=0, materialization="auto"
        )

    def test_exact_rank(self):
        result = fgd_solve(
            self.P, FgdConfig(r=3, eta=0.001, max_iters=1000, stop="rel_error", tol=1e-5)
        )
        self.assertLessEqual(result.final_rel_error, 1e-5)
        self.assertEqual(rate_fit(result.trace).kind, "linear")

    def test_over_rank(self):
        result = fgd_solve(self.P, FgdConfig(r=5, eta=0.001, max_iters=1000, stop="iters_only"))
        self.assertLessEqual(result.final_rel_error, 1e-2)
        self.assertEqual(rate_fit(result.trace).kind, "sublinear")


@unittest.skipUnless(SLOW, "set TUBAL_FGD_SLOW=1 to run full-size reproductions")
class TestLemmaDynamics(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        m = measurement_count("dof", 50, 5, 3)
        cls.P = gen_problem(50, 5, 3, m, 0.0, seed=0, materialization="auto")
        cfg = FgdConfig(r=5, eta=0.001, max_iters=1000, stop="iters_only", record_error_terms=True)
        cls.over_rank_terms = fgd_solve(cls.P, cfg).trace.to_frame()

    def test_exact_rank_curves_are_linear(self):
        curves = population_curves(self.P, spectral_init(self.P, 3), 0.001, 1000)
        for column in ("d_ss", "st", "tt", "delta_norm"):
            self.assertEqual(rate_fit(curves, column=column).kind, "linear", column)

    def test_over_rank_residual_block_is_sublinear(self):
        curves = population_curves(self.P, spectral_init(self.P, 5), 0.001, 1000)
        self.assertEqual(rate_fit(curves, column="tt").kind, "sublinear")
        for column in ("d_ss", "st"):
            self.assertEqual(rate_fit(curves, column=column).kind, "linear", column)

    def test_over_rank_sample_terms_are_sublinear(self):
        for column in ("d_ss", "st"):
            kind = rate_fit(self.over_rank_terms, column=column).kind
            self.assertEqual(kind, "sublinear", column)

    def test_sample_error_bound_is_nonincreasing(self):
        e_t = self.over_rank_terms["e_t"].to_numpy()[1:]
        self.assertTrue(np.all(np.diff(e_t) <= 1e-9 * e_t[0]))


@unittest.skipUnless(SLOW, "set TUBAL_FGD_SLOW=1 to run full-size reproductions")
class TestNoisyTables(unittest.TestCase):
    def test_reference_cells_and_noise_scaling(self):
        with tempfile.TemporaryDirectory() as out:
            record = TablesExperiment(
                out=out,
                family="r30",
                cells=[(30, 0.3), (30, 0.7), (50, 0.3)],
                repeats=10,
                max_iters=5000,
            ).run()
        table = record.tables["table"].set_index(["n", "v"])
        low, high = table.loc[(30, 0.3), "rel_error_mean"], table.loc[(30, 0.7), "rel_error_mean"]
        larger = table.loc[(50, 0.3), "rel_error_mean"]
        self.assertTrue(0.018 <= low <= 0.055, low)
        self.assertTrue(0.0351 <= high <= 0.1053, high)
        self.assertTrue(1.4 <= high / low <= 2.8, high / low)
        self.assertTrue(0.0132 <= larger <= 0.0396, larger)


@unittest.skipUnless(SLOW, "set TUBAL_FGD_SLOW=1 to run full-size reproductions")
class TestPhaseCorners(unittest.TestCase):
    def test_easy_and_hard_corners(self):
        with tempfile.TemporaryDirectory() as out:
            record = PhaseExperiment(
                out=out, n=30, n3=5, m_values=[45, 4500], r_values=[1, 30], repeats=10
            ).run()
        grid = record.tables["grid"].set_index(["m", "r_star"])
        self.assertTrue(grid.loc[(4500, 1), "recovered"])
        self.assertFalse(grid.loc[(45, 30), "recovered"])


@unittest.skipUnless(SLOW, "set TUBAL_FGD_SLOW=1 to run full-size reproductions")
class TestKernelScaling(unittest.TestCase):
    def test_doubling_n(self):
        small = time_kernel(128, 8, 5, repeats=50, warmup=3, seed=0)
        large = time_kernel(256, 8, 5, repeats=50, warmup=3, seed=0)
        self.assertTrue(3.0 <= large / small <= 5.5, large / small)

    def test_doubling_r(self):
        small = time_kernel(256, 32, 5, repeats=50, warmup=3, seed=0)
        large = time_kernel(256, 64, 5, repeats=50, warmup=3, seed=0)
        self.assertTrue(1.6 <= large / small <= 2.6, large / small)
        self.assertTrue(np.isfinite(large))


if __name__ == "__main__":
    unittest.main()
