"""Run learners against loss instances over T rounds and N trials.

Trials are the unit of parallelism; each trial replays every requested
learner on the same per-trial loss stream, so algorithm comparisons are
paired.  Trial results are merged in trial-index order, which keeps the
aggregated floating-point output bit-identical regardless of worker count.
"""

from __future__ import annotations

import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Iterable, Sequence

import numpy as np

from .core import Trace, regret_series
from .environments import InstanceSpec, RngStream, builtin_instance, instance_from_dict, loss_matrix
from .learners import LEARNER_IDS, make_learner

CSV_HEADER = "instance,learner,t,mean_regret,mean_pseudo_regret,std_regret,trials"
CSV_COMMENT = "# std_regret: population convention (divide by trial count N)"


class InvalidHorizon(ValueError):
    def __init__(self, T):
        super().__init__(f"horizon must be a positive integer, got {T!r}")


class GridMismatch(ValueError):
    """Per-trial series disagree on their checkpoint grid."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: an instance, a set of learners, horizons and seeds.

    ``c0`` maps learner ids to rate-constant overrides; learners absent from
    the map use their defaults.  ``checkpoint_every`` switches the emitted
    series grid from the default geometric one (powers of two plus T) to an
    arithmetic stride.
    """

    instance: str | InstanceSpec
    algorithms: tuple[str, ...]
    horizon: int
    trials: int = 1
    seed: int = 0
    c0: dict[str, float] = field(default_factory=dict)
    record_weights: bool = False
    checkpoint_every: int | None = None

    def __post_init__(self):
        if not isinstance(self.horizon, int) or self.horizon < 1:
            raise InvalidHorizon(self.horizon)
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials!r}")
        if not self.algorithms:
            raise ValueError("need at least one learner id")
        for learner_id in self.algorithms:
            if learner_id not in LEARNER_IDS:
                raise ValueError(f"unknown learner: {learner_id}")
        for learner_id in self.c0:
            if learner_id not in self.algorithms:
                raise ValueError(f"c0 override for learner {learner_id!r} not in the run")

    def resolve_instance(self) -> InstanceSpec:
        if isinstance(self.instance, InstanceSpec):
            return self.instance
        return builtin_instance(self.instance)


def checkpoints(T: int, stride: int | None = None) -> np.ndarray:
    """Emitted series grid: powers of two up to T plus T itself, or an
    arithmetic grid when ``stride`` is given.  Always ends at T."""
    if T < 1:
        raise InvalidHorizon(T)
    if stride is not None:
        if stride < 1:
            raise ValueError(f"checkpoint stride must be >= 1, got {stride}")
        grid = list(range(stride, T + 1, stride))
        if not grid or grid[-1] != T:
            grid.append(T)
        return np.array(grid, dtype=int)
    grid = []
    p = 1
    while p <= T:
        grid.append(p)
        p *= 2
    if grid[-1] != T:
        grid.append(T)
    return np.array(grid, dtype=int)


def run_trial(
    learner_id: str,
    spec: InstanceSpec,
    T: int,
    rng: RngStream,
    c0: float | None = None,
    record_weights: bool = False,
) -> Trace:
    """Execute the two-step protocol for rounds 1..T and return the trace.

    The learner commits each round's weights before that round's losses are
    touched; losses are validated on ingestion.
    """
    if not isinstance(T, (int, np.integer)) or T < 1:
        raise InvalidHorizon(T)
    losses = loss_matrix(spec, T, rng)
    learner = make_learner(learner_id, spec.M, T=T, c0=c0)
    weights = learner.trajectory(losses)
    mix = np.einsum("tm,tm->t", weights, losses)
    return Trace(
        losses=losses,
        mix_loss=mix,
        weights=weights if record_weights else None,
        instance_id=spec.id,
        learner_id=learner_id,
    )


def average_series(series: Sequence, grids: Sequence | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise mean and population standard deviation of per-trial series."""
    arrays = [np.asarray(s, dtype=float) for s in series]
    if not arrays:
        raise GridMismatch("no series to average")
    length = arrays[0].shape[0]
    if any(a.shape != (length,) for a in arrays):
        raise GridMismatch("per-trial series have different lengths")
    if grids is not None:
        ref = np.asarray(grids[0])
        if len(grids) != len(arrays):
            raise GridMismatch("grid count does not match series count")
        if any(not np.array_equal(np.asarray(g), ref) for g in grids):
            raise GridMismatch("per-trial series use different checkpoint grids")
    mat = np.vstack(arrays)
    return mat.mean(axis=0), mat.std(axis=0)


def _trial_series(
    trial: int,
    spec: InstanceSpec,
    learner_ids: tuple[str, ...],
    c0: dict[str, float],
    T: int,
    seed: int,
    grid: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Regret and pseudo-regret of every learner at the grid, one trial."""
    rng = RngStream(seed, trial)
    losses = loss_matrix(spec, T, rng)
    cum_losses = np.cumsum(losses, axis=0)
    hindsight = cum_losses.min(axis=1)
    star_col = None if spec.i_star is None else cum_losses[:, spec.i_star - 1]
    idx = grid - 1
    regret = np.empty((len(learner_ids), len(grid)))
    pseudo = np.empty((len(learner_ids), len(grid)))
    for j, learner_id in enumerate(learner_ids):
        learner = make_learner(learner_id, spec.M, T=T, c0=c0.get(learner_id))
        weights = learner.trajectory(losses)
        cum_mix = np.cumsum(np.einsum("tm,tm->t", weights, losses))
        regret[j] = (cum_mix - hindsight)[idx]
        pseudo[j] = np.nan if star_col is None else (cum_mix - star_col)[idx]
    return regret, pseudo


@dataclass(eq=False)
class AggregatedResult:
    """Per (learner, checkpoint) means and spreads over exactly N trials."""

    instance_id: str
    learners: tuple[str, ...]
    grid: np.ndarray
    mean_regret: np.ndarray
    mean_pseudo_regret: np.ndarray
    std_regret: np.ndarray
    trials: int

    def rows(self) -> Iterable[dict]:
        """Result rows in canonical (instance, learner, t) order."""
        for j, learner_id in enumerate(self.learners):
            for k, t in enumerate(self.grid):
                yield {
                    "instance": self.instance_id,
                    "learner": learner_id,
                    "t": int(t),
                    "mean_regret": float(self.mean_regret[j, k]),
                    "mean_pseudo_regret": float(self.mean_pseudo_regret[j, k]),
                    "std_regret": float(self.std_regret[j, k]),
                    "trials": self.trials,
                }

    def at(self, learner_id: str, t: int) -> dict:
        j = self.learners.index(learner_id)
        k = int(np.nonzero(self.grid == t)[0][0])
        return {
            "mean_regret": float(self.mean_regret[j, k]),
            "mean_pseudo_regret": float(self.mean_pseudo_regret[j, k]),
            "std_regret": float(self.std_regret[j, k]),
        }

    def csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_COMMENT + "\n")
        buf.write(CSV_HEADER + "\n")
        for row in self.rows():
            buf.write(
                f"{row['instance']},{row['learner']},{row['t']},"
                f"{row['mean_regret']!r},{row['mean_pseudo_regret']!r},"
                f"{row['std_regret']!r},{row['trials']}\n"
            )
        return buf.getvalue()

    def json_text(self) -> str:
        return json.dumps(list(self.rows()), indent=2) + "\n"


def worker_count(trials: int, total_steps: int) -> int:
    """Resolve the trial-level worker count.

    ``HEDGEBENCH_THREADS`` caps it (0 = auto).  Unset, small runs stay serial
    so fork overhead never dominates; output is identical either way.
    """
    env = os.environ.get("HEDGEBENCH_THREADS", "").strip()
    if env:
        cap = int(env)
        if cap < 0:
            raise ValueError(f"HEDGEBENCH_THREADS must be >= 0, got {env!r}")
        if cap == 0:
            cap = os.cpu_count() or 1
    else:
        if total_steps < 2_000_000:
            return 1
        cap = os.cpu_count() or 1
    return max(1, min(cap, trials))


def run_experiment(config: ExperimentConfig) -> AggregatedResult:
    """N independent trials with rng streams (seed, 1..N); exact aggregation.

    Identical configs produce bit-identical results regardless of the worker
    count: trials are merged in trial-index order.
    """
    spec = config.resolve_instance()
    learner_ids = tuple(sorted(config.algorithms))
    grid = checkpoints(config.horizon, config.checkpoint_every)
    task = partial(
        _trial_series,
        spec=spec,
        learner_ids=learner_ids,
        c0=dict(config.c0),
        T=config.horizon,
        seed=config.seed,
        grid=grid,
    )
    trials = range(1, config.trials + 1)
    total_steps = config.trials * config.horizon * len(learner_ids)
    workers = worker_count(config.trials, total_steps)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, trials))
    else:
        results = [task(n) for n in trials]
    regret = np.stack([r for r, _ in results])   # (N, L, K), trial order
    pseudo = np.stack([p for _, p in results])
    if all(np.array_equal(r, regret[0]) for r in regret[1:]):
        # bitwise-identical trials (deterministic instance): spread is exactly 0
        mean_regret, std_regret = regret[0].copy(), np.zeros_like(regret[0])
        mean_pseudo = pseudo[0].copy()
    else:
        mean_regret, std_regret = regret.mean(axis=0), regret.std(axis=0)
        mean_pseudo = pseudo.mean(axis=0)
    return AggregatedResult(
        instance_id=spec.id,
        learners=learner_ids,
        grid=grid,
        mean_regret=mean_regret,
        mean_pseudo_regret=mean_pseudo,
        std_regret=std_regret,
        trials=config.trials,
    )


def load_config(path: str) -> ExperimentConfig:
    """Read an :class:`ExperimentConfig` from a JSON file.

    Keys: ``instance`` (catalogue id or custom-instance mapping),
    ``algorithms``, ``horizon``, ``trials``, ``seed``, ``c0`` (mapping),
    ``record_weights``, ``checkpoint_every``.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    instance = raw["instance"]
    if isinstance(instance, dict):
        instance = instance_from_dict(instance)
    return ExperimentConfig(
        instance=instance,
        algorithms=tuple(raw["algorithms"]),
        horizon=int(raw["horizon"]),
        trials=int(raw.get("trials", 1)),
        seed=int(raw.get("seed", 0)),
        c0={str(k): float(v) for k, v in raw.get("c0", {}).items()},
        record_weights=bool(raw.get("record_weights", False)),
        checkpoint_every=(None if raw.get("checkpoint_every") is None else int(raw["checkpoint_every"])),
    )
