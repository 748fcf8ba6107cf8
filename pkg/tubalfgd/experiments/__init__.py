from tubalfgd.experiments.base import BaseExperiment, ExperimentConfig, measurement_count
from tubalfgd.experiments.bench import BenchConfig, BenchExperiment
from tubalfgd.experiments.convergence import ConvergenceConfig, ConvergenceExperiment
from tubalfgd.experiments.lemma_check import LemmaCheckConfig, LemmaCheckExperiment
from tubalfgd.experiments.phase import PhaseConfig, PhaseExperiment
from tubalfgd.experiments.rip import RipConfig, RipExperiment
from tubalfgd.experiments.runner import RunRecord, resolve_threads, run_tasks
from tubalfgd.experiments.tables import TablesConfig, TablesExperiment
from tubalfgd.experiments.tensor_io import read_tensor, write_tensor

__all__ = [
    "BaseExperiment",
    "ExperimentConfig",
    "measurement_count",
    "RunRecord",
    "resolve_threads",
    "run_tasks",
    "ConvergenceConfig",
    "ConvergenceExperiment",
    "PhaseConfig",
    "PhaseExperiment",
    "TablesConfig",
    "TablesExperiment",
    "LemmaCheckConfig",
    "LemmaCheckExperiment",
    "BenchConfig",
    "BenchExperiment",
    "RipConfig",
    "RipExperiment",
    "read_tensor",
    "write_tensor",
]
