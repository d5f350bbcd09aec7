"""Shared domain types, regret accounting, and numerically safe simplex arithmetic.

Loss vectors and weight vectors are plain 1-D float64 numpy arrays; the
``as_losses`` / ``validate_simplex`` helpers are the canonical constructors
that enforce their invariants (entries in [0, 1] for losses, nonnegative and
normalized for weights).  Aggregate per-round data lives in :class:`Trace`,
which the regret accounting in :func:`regret_of_trace` consumes.

All types here are treated as immutable values once built; the functions are
pure, so everything in this module is safe to share across trial workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

SIMPLEX_ATOL = 1e-12


class NegativeWeight(ValueError):
    """A probability vector carries a negative entry."""

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"weight at index {index} is negative ({value!r})")


class NotNormalized(ValueError):
    """A probability vector does not sum to one within tolerance."""

    def __init__(self, total: float):
        self.total = total
        super().__init__(f"weights sum to {total!r}, expected 1 within {SIMPLEX_ATOL}")


class DimensionMismatch(ValueError):
    """Weight and loss vectors disagree on the number of experts."""


class EmptyTrace(ValueError):
    """Regret accounting needs at least one round."""


class InvalidLoss(ValueError):
    """A loss entry is outside [0, 1] or not finite."""


def as_losses(values, expected_m: int | None = None) -> np.ndarray:
    """Validate and canonicalize one round of losses to a float64 array.

    Out-of-range losses are a hard error, never clamped: the regret guarantees
    exercised by this package assume losses in [0, 1].
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise InvalidLoss(f"need a 1-D vector of at least 2 losses, got shape {arr.shape}")
    if expected_m is not None and arr.shape[0] != expected_m:
        raise DimensionMismatch(f"expected {expected_m} losses, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidLoss("losses must be finite")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise InvalidLoss(f"losses must lie in [0, 1], got range [{arr.min()}, {arr.max()}]")
    return arr


def validate_simplex(weights) -> np.ndarray:
    """Check that ``weights`` is a point on the probability simplex.

    Raises :class:`NegativeWeight` (sign violations dominate) or
    :class:`NotNormalized`; returns the canonicalized array when valid.
    """
    arr = np.asarray(weights, dtype=float)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise DimensionMismatch(f"need a 1-D weight vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NegativeWeight(int(np.argmin(np.isfinite(arr))), float(arr[np.argmin(np.isfinite(arr))]))
    if arr.min() < 0.0:
        idx = int(np.argmin(arr))
        raise NegativeWeight(idx, float(arr[idx]))
    total = float(arr.sum())
    if abs(total - 1.0) > SIMPLEX_ATOL:
        raise NotNormalized(total)
    return arr


def mix_loss(weights, losses) -> float:
    """Loss suffered when playing ``weights`` against ``losses``: their dot product.

    The result is clipped to the [min, max] hull of the losses, which absorbs
    the last-ulp rounding of the dot product; for valid inputs that hull is a
    subset of [0, 1].
    """
    w = np.asarray(weights, dtype=float)
    l = np.asarray(losses, dtype=float)
    if w.shape != l.shape:
        raise DimensionMismatch(f"weights shape {w.shape} vs losses shape {l.shape}")
    return float(min(max(float(w @ l), float(l.min())), float(l.max())))


@dataclass
class CumulativeLoss:
    """Running per-expert loss totals over the rounds seen so far."""

    totals: np.ndarray
    rounds_seen: int = 0

    @classmethod
    def zeros(cls, m: int) -> "CumulativeLoss":
        return cls(totals=np.zeros(m), rounds_seen=0)

    def absorb(self, losses: np.ndarray) -> None:
        self.totals += losses
        self.rounds_seen += 1

    def copy(self) -> "CumulativeLoss":
        return CumulativeLoss(self.totals.copy(), self.rounds_seen)


@dataclass(frozen=True)
class RoundRecord:
    """One round of the interaction protocol.

    ``weights`` is retained only when the trace was recorded with weight
    tracing enabled; when present, ``mix_loss`` equals its dot product with
    ``losses`` to within 1e-12.
    """

    t: int
    mix_loss: float
    losses: np.ndarray
    weights: np.ndarray | None = None


@dataclass
class Trace:
    """Per-round outcome of a single trial: losses seen and mix losses paid.

    ``losses`` has shape (T, M); ``mix_loss`` has shape (T,).  ``weights`` is
    (T, M) or None depending on the recording flag.  Treat instances as
    read-only after construction.
    """

    losses: np.ndarray
    mix_loss: np.ndarray
    weights: np.ndarray | None = None
    instance_id: str = ""
    learner_id: str = ""

    @property
    def horizon(self) -> int:
        return int(self.losses.shape[0])

    @property
    def num_experts(self) -> int:
        return int(self.losses.shape[1])

    def records(self) -> Iterator[RoundRecord]:
        for t in range(self.horizon):
            w = None if self.weights is None else self.weights[t]
            yield RoundRecord(t=t + 1, mix_loss=float(self.mix_loss[t]), losses=self.losses[t], weights=w)


@dataclass
class RegretSummary:
    """Cumulative regret of a trace against the best expert in hindsight.

    ``regret`` is the final cumulative mix loss minus the smallest cumulative
    expert loss; ``pseudo_regret_vs`` maps each (1-based) expert index to the
    regret measured against that fixed expert, so ``regret`` equals the max of
    its values.  ``series`` carries the running regret after each round; it is
    not monotone in general (the hindsight leader may change).
    """

    horizon: int
    regret: float
    pseudo_regret_vs: dict[int, float]
    series: np.ndarray


def _trace_arrays(trace: "Trace | Iterable[RoundRecord]") -> tuple[np.ndarray, np.ndarray]:
    if isinstance(trace, Trace):
        return trace.mix_loss, trace.losses
    records = list(trace)
    if not records:
        raise EmptyTrace("no rounds to account")
    mix = np.array([r.mix_loss for r in records], dtype=float)
    losses = np.vstack([np.asarray(r.losses, dtype=float) for r in records])
    return mix, losses


def regret_of_trace(trace: "Trace | Iterable[RoundRecord]") -> RegretSummary:
    """Recompute regret and per-expert pseudo-regret from a stored trace."""
    mix, losses = _trace_arrays(trace)
    if mix.shape[0] == 0:
        raise EmptyTrace("no rounds to account")
    if losses.shape[0] != mix.shape[0]:
        raise DimensionMismatch("mix-loss series and loss matrix disagree on horizon")
    cum_mix = np.cumsum(mix)
    cum_losses = np.cumsum(losses, axis=0)
    series = cum_mix - cum_losses.min(axis=1)
    total = float(cum_mix[-1])
    pseudo = {i + 1: total - float(cum_losses[-1, i]) for i in range(losses.shape[1])}
    return RegretSummary(
        horizon=int(mix.shape[0]),
        regret=float(series[-1]),
        pseudo_regret_vs=pseudo,
        series=series,
    )


def regret_series(mix: np.ndarray, losses: np.ndarray) -> np.ndarray:
    """Running cumulative regret after each round (vector form of Trace accounting)."""
    return np.cumsum(mix) - np.cumsum(losses, axis=0).min(axis=1)
