import os
from abc import ABC, abstractmethod
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from tubalfgd.errors import InvalidParameter
from tubalfgd.sensing.base import DEFAULT_CHUNK_SIZE, normalize_mode
from tubalfgd.sensing.dense import DEFAULT_MAX_DENSE_BYTES
from tubalfgd.sensing.problem import ProblemInstance, gen_problem

MeasurementFormula = Literal["dof", "rank_scaled"]


def describe_class(description):
    """
    Decorator function to add a description to an experiment class.

    The description is shown as the help text of the matching CLI subcommand.

    Args:
        description: The description to add to the class.

    Returns:
        A decorator function that adds the description to the class.
    """

    def decorator(cls):
        cls.__description__ = description
        return cls

    return decorator


def measurement_count(
    formula: MeasurementFormula, n: int, n3: int, r_star: int, factor: int = 10
) -> int:
    """
    Number of measurements for a problem size.

    ``dof`` gives ``factor * (2n - r_star) * n3`` and ``rank_scaled`` gives
    ``factor * r_star * n3 * (2n - r_star)``.
    """
    if formula == "dof":
        return factor * (2 * n - r_star) * n3
    if formula == "rank_scaled":
        return factor * r_star * n3 * (2 * n - r_star)
    raise InvalidParameter(f"Unsupported measurement formula: {formula}")


class ExperimentConfig(BaseModel):
    """
    Runtime settings shared by every experiment command.

    Attributes:
        seed: Base seed; run ``i`` uses ``seed + i`` unless ``seeds`` is given.
        seeds: Explicit per-run seeds.
        repeats: Number of seeded runs when ``seeds`` is not given.
        out: Root output directory; each command writes to ``out/<command>``.
        threads: Worker processes for independent runs, 0 for in-process.
        measurement: Measurement mode, ``gaussian`` or ``symmetrized``.
        materialization: ``streamed``, ``dense`` or ``auto``.
        chunk_size: Measurement tensors per block.
        max_dense_bytes: Memory cap for dense ensembles.
    """

    seed: int = Field(default=0, ge=0, lt=2**64)
    seeds: Optional[List[int]] = None
    repeats: int = Field(default=1, ge=1)
    out: str = "outputs"
    threads: int = Field(default=0, ge=0)
    measurement: str = "gaussian"
    materialization: Literal["streamed", "dense", "auto"] = "auto"
    chunk_size: int = Field(default=DEFAULT_CHUNK_SIZE, ge=1)
    max_dense_bytes: int = Field(default=DEFAULT_MAX_DENSE_BYTES, ge=0)

    @field_validator("measurement")
    @classmethod
    def _check_measurement(cls, value: str) -> str:
        return normalize_mode(value)

    @field_validator("seeds")
    @classmethod
    def _check_seeds(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and (not value or min(value) < 0):
            raise ValueError("seeds must be a non-empty list of non-negative integers")
        return value

    def seed_list(self) -> List[int]:
        if self.seeds is not None:
            return list(self.seeds)
        return [self.seed + i for i in range(self.repeats)]


class BaseExperiment(ABC):
    """
    Abstract base class for experiment commands.

    Subclasses name their pydantic config class, split their work into
    independent tasks and turn the per-task rows into a RunRecord.
    """

    name = "base"
    config_class = ExperimentConfig

    def __init__(self, **kwargs):
        """
        Initialize the experiment from keyword settings.

        Args:
            **kwargs: Fields of the experiment's config class.

        Raises:
            pydantic.ValidationError: If a setting is invalid.
        """
        self.config = self.config_class(**kwargs)

    @property
    def output_dir(self) -> str:
        return os.path.join(self.config.out, self.name)

    def make_problem(
        self, n: int, n3: int, r_star: int, m: int, v: float, seed: int
    ) -> ProblemInstance:
        return make_problem(self.config, n, n3, r_star, m, v, seed)

    @abstractmethod
    def run(self):
        """
        Run the experiment and write its outputs.

        Returns:
            The RunRecord of the experiment.
        """
        pass


def make_problem(
    config: ExperimentConfig, n: int, n3: int, r_star: int, m: int, v: float, seed: int
) -> ProblemInstance:
    """
    Generate a problem with the runtime measurement settings of ``config``.
    """
    return gen_problem(
        n,
        n3,
        r_star,
        m,
        v,
        seed,
        mode=config.measurement,
        materialization=config.materialization,
        chunk_size=config.chunk_size,
        max_dense_bytes=config.max_dense_bytes,
    )
