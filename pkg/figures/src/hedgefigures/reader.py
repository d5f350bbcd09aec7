"""Reader for the benchmark result CSV schema.

The contract is the file format only: a possibly-commented preamble ('#'
lines), one header line
``instance,learner,t,mean_regret,mean_pseudo_regret,std_regret,trials``,
then one row per (learner, checkpoint).  No code is shared with the producer.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

REQUIRED_COLUMNS = (
    "instance",
    "learner",
    "t",
    "mean_regret",
    "mean_pseudo_regret",
    "std_regret",
    "trials",
)


class SchemaError(ValueError):
    """The CSV does not follow the result schema; names the missing column."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(column)


@dataclass
class LearnerSeries:
    learner: str
    t: list[int]
    mean_regret: list[float]
    std_regret: list[float]
    trials: int


@dataclass
class PanelData:
    instance: str
    series: list[LearnerSeries]  # sorted by learner id


def read_panel_csv(path: str) -> PanelData:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = [line for line in fh if line.strip() and not line.lstrip().startswith("#")]
    reader = csv.DictReader(lines)
    header = reader.fieldnames or []
    for column in REQUIRED_COLUMNS:
        if column not in header:
            raise SchemaError(column)
    by_learner: dict[str, list[tuple[int, float, float, int]]] = {}
    instance = ""
    for row in reader:
        instance = row["instance"]
        by_learner.setdefault(row["learner"], []).append(
            (int(row["t"]), float(row["mean_regret"]), float(row["std_regret"]), int(row["trials"]))
        )
    series = []
    for learner in sorted(by_learner):
        points = sorted(by_learner[learner])
        series.append(
            LearnerSeries(
                learner=learner,
                t=[p[0] for p in points],
                mean_regret=[p[1] for p in points],
                std_regret=[p[2] for p in points],
                trials=points[0][3] if points else 0,
            )
        )
    return PanelData(instance=instance, series=series)
