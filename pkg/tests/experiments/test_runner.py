import operator
import os
import tempfile
import unittest
from unittest.mock import patch

import pandas as pd
import pydantic
import yaml

from tubalfgd.errors import InvalidParameter
from tubalfgd.experiments import (
    ExperimentConfig,
    RunRecord,
    measurement_count,
    resolve_threads,
    run_tasks,
)
from tubalfgd.experiments.runner import THREADS_ENV, aggregate_rows


class TestMeasurementCount(unittest.TestCase):
    def test_formulas(self):
        self.assertEqual(measurement_count("dof", 50, 5, 3), 4850)
        self.assertEqual(measurement_count("rank_scaled", 30, 5, 9), 22950)
        self.assertEqual(measurement_count("dof", 4, 2, 1, factor=20), 280)
        with self.assertRaises(InvalidParameter):
            measurement_count("quadratic", 4, 2, 1)


class TestExperimentConfig(unittest.TestCase):
    """Tests for the shared runtime settings."""

    def test_seed_list(self):
        self.assertEqual(ExperimentConfig(seed=5, repeats=3).seed_list(), [5, 6, 7])
        self.assertEqual(ExperimentConfig(seeds=[9, 2], repeats=5).seed_list(), [9, 2])

    def test_measurement_alias(self):
        self.assertEqual(ExperimentConfig().measurement, "plain_gaussian")
        self.assertEqual(ExperimentConfig(measurement="symmetrized").measurement, "symmetrized")

    def test_invalid_settings(self):
        for kwargs in (
            {"seed": -1},
            {"repeats": 0},
            {"threads": -2},
            {"measurement": "rademacher"},
            {"materialization": "sparse"},
            {"seeds": []},
        ):
            with self.assertRaises(pydantic.ValidationError):
                ExperimentConfig(**kwargs)


class TestResolveThreads(unittest.TestCase):
    """Flag beats environment beats configuration."""

    def test_flag_wins(self):
        with patch.dict(os.environ, {THREADS_ENV: "4"}):
            self.assertEqual(resolve_threads(2, configured=8), 2)

    def test_environment(self):
        with patch.dict(os.environ, {THREADS_ENV: "4"}):
            self.assertEqual(resolve_threads(None, configured=8), 4)

    def test_configured(self):
        with patch.dict(os.environ, {}, clear=True):
            self.assertEqual(resolve_threads(None, configured=3), 3)

    def test_bad_environment(self):
        for value in ("many", "-1"):
            with patch.dict(os.environ, {THREADS_ENV: value}):
                with self.assertRaises(InvalidParameter):
                    resolve_threads(None)


class TestRunTasks(unittest.TestCase):
    def test_in_process_keeps_order(self):
        self.assertEqual(run_tasks(operator.add, [(1, 2), (3, 4), (5, 6)]), [3, 7, 11])

    def test_worker_pool_keeps_order(self):
        tasks = [(i, 10 * i) for i in range(6)]
        self.assertEqual(run_tasks(operator.add, tasks, threads=2), [11 * i for i in range(6)])


class TestRunRecord(unittest.TestCase):
    """Tests for aggregation and output writing."""

    def setUp(self):
        self.rows = pd.DataFrame(
            {
                "scenario": ["exact", "exact", "over"],
                "seed": [0, 1, 0],
                "rel_error": [1e-6, 3e-6, 1e-2],
            }
        )

    def test_aggregate(self):
        summary = aggregate_rows(self.rows, ["scenario"], ["rel_error"])
        self.assertEqual(
            list(summary.columns), ["scenario", "runs", "rel_error_mean", "rel_error_std"]
        )
        exact = summary[summary["scenario"] == "exact"].iloc[0]
        self.assertEqual(exact["runs"], 2)
        self.assertAlmostEqual(exact["rel_error_mean"], 2e-6)
        self.assertTrue(pd.isna(summary[summary["scenario"] == "over"].iloc[0]["rel_error_std"]))

    def test_aggregate_empty(self):
        summary = aggregate_rows(pd.DataFrame(), ["n"], ["t"])
        self.assertTrue(summary.empty)
        self.assertEqual(list(summary.columns), ["n", "runs", "t_mean", "t_std"])

    def test_write(self):
        record = RunRecord(
            command="convergence",
            config={"seed": 0, "seed_list": [0, 1]},
            rows=self.rows,
            group_by=["scenario"],
            value_columns=["rel_error"],
            tables={"extra": pd.DataFrame({"a": [1]})},
        )
        with tempfile.TemporaryDirectory() as tmp:
            out = os.path.join(tmp, "convergence")
            paths = record.write(out)
            self.assertEqual(set(paths), {"runs", "summary", "config", "extra"})
            self.assertEqual(len(pd.read_csv(paths["runs"])), 3)
            self.assertEqual(len(pd.read_csv(paths["summary"])), 2)
            with open(paths["config"]) as file:
                provenance = yaml.safe_load(file)
            self.assertEqual(provenance["command"], "convergence")
            self.assertEqual(provenance["seed_list"], [0, 1])


if __name__ == "__main__":
    unittest.main()
