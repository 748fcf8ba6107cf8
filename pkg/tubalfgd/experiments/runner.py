import os
from typing import Any, Callable, Dict, List, Optional, Sequence

import pandas as pd
import yaml
from joblib import Parallel, delayed
from tqdm import tqdm

from tubalfgd.errors import InvalidParameter
from tubalfgd.utils import log

THREADS_ENV = "TUBAL_FGD_THREADS"


def resolve_threads(flag: Optional[int], configured: int = 0) -> int:
    """
    Pick the worker count: the flag if given, else ``TUBAL_FGD_THREADS``, else the config.

    Raises:
        InvalidParameter: If the environment value is not a non-negative integer.
    """
    if flag is not None:
        return flag
    env_value = os.environ.get(THREADS_ENV)
    if env_value:
        try:
            threads = int(env_value)
        except ValueError:
            raise InvalidParameter(f"{THREADS_ENV} must be an integer, got {env_value!r}")
        if threads < 0:
            raise InvalidParameter(f"{THREADS_ENV} must be non-negative, got {threads}")
        return threads
    return configured


def run_tasks(
    fn: Callable[..., Any], tasks: Sequence[tuple], threads: int = 0, desc: str = "runs"
) -> List[Any]:
    """
    Run ``fn(*task)`` for every task and return the results in task order.

    With ``threads`` of 0 or 1 the tasks run in-process; otherwise they are
    spread over a joblib worker pool of that size.
    """
    if threads <= 1:
        return [fn(*task) for task in tqdm(tasks, desc=desc)]
    return Parallel(n_jobs=threads)(delayed(fn)(*task) for task in tqdm(tasks, desc=desc))


class RunRecord:
    """
    Results of one experiment command.

    Attributes:
        command: The command name.
        config: Snapshot of the resolved configuration, seeds included.
        rows: One row per run.
        group_by: Columns identifying a cell of the aggregate.
        value_columns: Columns averaged in the aggregate.
        tables: Further named result tables, written as ``<name>.csv``.
        trace_paths: Paths of per-run trace files.
    """

    def __init__(
        self,
        command: str,
        config: Dict[str, Any],
        rows: pd.DataFrame,
        group_by: List[str],
        value_columns: List[str],
        tables: Optional[Dict[str, pd.DataFrame]] = None,
        trace_paths: Optional[List[str]] = None,
    ):
        self.command = command
        self.config = config
        self.rows = rows
        self.group_by = group_by
        self.value_columns = value_columns
        self.tables = tables or {}
        self.trace_paths = trace_paths or []

    @property
    def aggregate(self) -> pd.DataFrame:
        return aggregate_rows(self.rows, self.group_by, self.value_columns)

    def write(self, out_dir: str) -> Dict[str, str]:
        """
        Write ``runs.csv``, ``summary.csv``, the extra tables and ``config.yaml``.

        Returns:
            A mapping from output name to path.
        """
        os.makedirs(out_dir, exist_ok=True)
        paths = {
            "runs": os.path.join(out_dir, "runs.csv"),
            "summary": os.path.join(out_dir, "summary.csv"),
            "config": os.path.join(out_dir, "config.yaml"),
        }
        self.rows.to_csv(paths["runs"], index=False)
        self.aggregate.to_csv(paths["summary"], index=False)
        for name, table in self.tables.items():
            paths[name] = os.path.join(out_dir, f"{name}.csv")
            table.to_csv(paths[name], index=False)
        write_provenance(paths["config"], self.command, self.config)
        return paths


def aggregate_rows(
    rows: pd.DataFrame, group_by: List[str], value_columns: List[str]
) -> pd.DataFrame:
    """
    Mean and standard deviation of ``value_columns`` per ``group_by`` cell.

    Output columns are the group keys, ``runs``, then ``<col>_mean`` and
    ``<col>_std`` for each value column.
    """
    columns = group_by + ["runs"] + [f"{c}_{s}" for c in value_columns for s in ("mean", "std")]
    if rows.empty:
        return pd.DataFrame(columns=columns)
    grouped = rows.groupby(group_by, sort=False)
    summary = grouped[value_columns].agg(["mean", "std"])
    summary.columns = [f"{c}_{s}" for c, s in summary.columns]
    summary.insert(0, "runs", grouped.size())
    return summary.reset_index()[columns]


def write_provenance(path: str, command: str, config: Dict[str, Any]):
    with open(path, "w") as file:
        yaml.safe_dump({"command": command, **config}, file, sort_keys=False)
    log.debug(f"wrote provenance to {path}")
