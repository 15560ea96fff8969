from pathlib import Path
from typing import Union

import pandas as pd

from cableflat.errors import SchemaError
from cableflat.parse.utilities import check_keys, load_json

__all__ = ["load_published_errors"]


def load_published_errors(path: Union[str, Path] = "table2") -> pd.DataFrame:
    r"""Read a table of published average output errors.

    The document groups tests; every test lists its conditions, the scenario
    reproducing each condition and, per output, one average error per condition.

    Returns:
        One row per test, condition and output with columns ``test``,
        ``condition``, ``scenario``, ``output`` and ``published``
    """
    document = load_json(path)
    check_keys(document, ("tests",), ("description",), "published errors")
    rows = []
    for test, block in document["tests"].items():
        check_keys(block, ("conditions", "scenarios", "outputs"), (), "test {}".format(test))
        conditions, scenarios = block["conditions"], block["scenarios"]
        if len(conditions) != len(scenarios):
            raise SchemaError("test {}: one scenario per condition is required".format(test))
        for output, values in block["outputs"].items():
            if len(values) != len(conditions):
                raise SchemaError(
                    "test {}: output {} needs {} values".format(test, output, len(conditions))
                )
            for condition, scenario, value in zip(conditions, scenarios, values):
                rows.append(
                    {
                        "test": test,
                        "condition": condition,
                        "scenario": scenario,
                        "output": output,
                        "published": float(value),
                    }
                )
    return pd.DataFrame(rows, columns=["test", "condition", "scenario", "output", "published"])
