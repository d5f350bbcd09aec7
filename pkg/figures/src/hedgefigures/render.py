"""Render one benchmark panel: mean cumulative regret vs round, one labeled
curve per learner, with a +/- one-std band when the data aggregates several
trials.  Rendering is a pure function of the CSV contents.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .reader import PanelData, read_panel_csv

PANEL_LABELS = ("a", "b", "c", "d")


@dataclass(frozen=True)
class PanelSpec:
    csv_path: str
    panel: str
    out_path: str
    logx: bool = False
    logy: bool = False

    def __post_init__(self):
        if self.panel not in PANEL_LABELS:
            raise ValueError(f"panel must be one of {PANEL_LABELS}, got {self.panel!r}")


@dataclass
class SeriesInfo:
    label: str
    points: int


@dataclass
class RenderResult:
    """What was drawn: the image path and one manifest entry per curve."""

    image_path: str
    panel: str
    instance: str
    series: list[SeriesInfo] = field(default_factory=list)

    def manifest(self) -> dict:
        return {
            "image": self.image_path,
            "panel": self.panel,
            "instance": self.instance,
            "series": [{"label": s.label, "points": s.points} for s in self.series],
        }


def render_panel(spec: PanelSpec) -> RenderResult:
    data: PanelData = read_panel_csv(spec.csv_path)
    if not data.series:
        raise ValueError(f"{spec.csv_path} holds no learner series")
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    result = RenderResult(image_path=spec.out_path, panel=spec.panel, instance=data.instance)
    for s in data.series:
        (line,) = ax.plot(s.t, s.mean_regret, label=s.learner, marker="" if len(s.t) > 1 else "o")
        if s.trials > 1 and any(v > 0 for v in s.std_regret):
            low = [m - sd for m, sd in zip(s.mean_regret, s.std_regret)]
            high = [m + sd for m, sd in zip(s.mean_regret, s.std_regret)]
            ax.fill_between(s.t, low, high, alpha=0.2, linewidth=0, color=line.get_color())
        result.series.append(SeriesInfo(label=s.learner, points=len(s.t)))
    if spec.logx:
        ax.set_xscale("log")
    if spec.logy:
        ax.set_yscale("log")
    ax.set_xlabel("round t")
    ax.set_ylabel("cumulative regret")
    ax.set_title(f"({spec.panel}) {data.instance}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=150)
    plt.close(fig)
    return result
