r"""Metric tables over several simulation logs."""
from typing import Dict, Optional

import pandas as pd

from cableflat.errors import InvalidConfig
from cableflat.simulation.simulator import SimLog, output_error_metrics

__all__ = ["metrics_table", "compare_published", "format_table"]


def metrics_table(logs: Dict[str, SimLog], start_fraction: float = 0.0) -> pd.DataFrame:
    r"""Output error metrics of every log, one row per run and output.

    Args:
        logs: Logs by run name
        start_fraction: Fraction of every run discarded at the start

    Returns:
        Columns ``run``, ``mode``, ``output``, ``mean`` and ``max``
    """
    if not logs:
        raise InvalidConfig("no simulation logs to report on")
    frames = []
    for name, log in logs.items():
        metrics = output_error_metrics(log, start_fraction=start_fraction)
        metrics.insert(0, "mode", log.metadata.get("mode", ""))
        metrics.insert(0, "run", name)
        frames.append(metrics)
    return pd.concat(frames, ignore_index=True)


def compare_published(table: pd.DataFrame, published: pd.DataFrame) -> pd.DataFrame:
    r"""Published average errors next to the reproduced ones.

    Rows of ``published`` whose scenario has no run in ``table`` are kept with an
    empty ``reproduced`` column.
    """
    reproduced = table.rename(columns={"run": "scenario", "mean": "reproduced"})[
        ["scenario", "output", "reproduced"]
    ]
    merged = published.merge(reproduced, on=["scenario", "output"], how="left")
    merged["ratio"] = merged["reproduced"] / merged["published"]
    return merged


def format_table(table: pd.DataFrame, precision: Optional[int] = 4) -> str:
    return table.to_string(index=False, float_format=lambda v: "{:.{}f}".format(v, precision))
