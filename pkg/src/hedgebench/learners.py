"""Online learners for the expert problem behind a uniform step contract.

Every learner commits a weight vector for the current round via ``weights()``
and absorbs that round's loss vector via ``update()``; the driver must never
show a learner the losses of a round before its weights are committed.

Exponential-weights variants share :func:`hedge_weights`, which works in the
log domain (cumulative losses are shifted by their minimum before
exponentiation) so that weights stay finite and normalized for arbitrarily
large totals.

Learner states are single-owner and mutated only by their trial's sequential
loop; distinct trials run concurrently with independent learner objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CumulativeLoss, as_losses


class InvalidRound(ValueError):
    """Round indices start at 1."""

    def __init__(self, t):
        super().__init__(f"round index must be a positive integer, got {t!r}")


class OutOfOrderRound(ValueError):
    """Rounds must be presented in order t = 1, 2, ..."""


ETA_KINDS = ("decreasing", "constant", "doubling-epoch")

# Default rate constants for the benchmark algorithms; overridable per run.
DEFAULT_C0 = {
    "hedge": 2.0,
    "hedge_constant": math.sqrt(8.0),
    "hedge_doubling": math.sqrt(8.0),
}

LEARNER_IDS = ("adahedge", "ftl", "hedge", "hedge_constant", "hedge_doubling")


@dataclass(frozen=True)
class EtaSchedule:
    """Learning-rate schedule: c0 * sqrt(ln(M) / denominator).

    The denominator is the round index (decreasing), the fixed horizon
    (constant), or the current epoch length 2^k (doubling-epoch).
    """

    kind: str
    c0: float
    M: int
    T: int | None = None

    def __post_init__(self):
        if self.kind not in ETA_KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}, expected one of {ETA_KINDS}")
        if not (self.c0 > 0):
            raise ValueError(f"c0 must be positive, got {self.c0!r}")
        if self.M < 2:
            raise ValueError(f"need at least 2 experts, got M={self.M}")
        if self.kind == "constant" and (self.T is None or self.T < 1):
            raise ValueError("constant schedule requires a horizon T >= 1")


def epoch_start(t: int) -> int:
    """Largest power of two <= t: the first round of t's doubling epoch."""
    if t < 1:
        raise InvalidRound(t)
    return 1 << (int(t).bit_length() - 1)


def eta_at(schedule: EtaSchedule, t: int) -> float:
    """Learning rate used at round t under the given schedule."""
    if not isinstance(t, (int, np.integer)) or t < 1:
        raise InvalidRound(t)
    ln_m = math.log(schedule.M)
    if schedule.kind == "decreasing":
        return schedule.c0 * math.sqrt(ln_m / t)
    if schedule.kind == "constant":
        return schedule.c0 * math.sqrt(ln_m / schedule.T)
    return schedule.c0 * math.sqrt(ln_m / epoch_start(t))


def hedge_weights(totals, eta: float) -> np.ndarray:
    """Exponential weights over cumulative losses: v_i proportional to exp(-eta * L_i).

    Shifting by min(L) before exponentiating keeps the largest exponent at 0,
    so the sum is at least 1 and nothing overflows even for totals around 1e6.
    """
    arr = np.asarray(totals, dtype=float)
    if not (eta > 0) or not math.isfinite(eta):
        raise ValueError(f"learning rate must be positive and finite, got {eta!r}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("cumulative losses must be finite")
    e = np.exp(-eta * (arr - arr.min()))
    return e / e.sum()


def ftl_weights(totals) -> np.ndarray:
    """Uniform distribution over the experts with smallest cumulative loss.

    Deterministic stand-in for random tie-breaking: the uniform mixture over
    the argmin set has the same expected loss.
    """
    arr = np.asarray(totals, dtype=float)
    mask = arr == arr.min()
    return mask / mask.sum()


class OnlineLearner:
    """Base class: sequential weights()/update() protocol plus batch replay."""

    id = ""

    def __init__(self, M: int):
        if M < 2:
            raise ValueError(f"need at least 2 experts, got M={M}")
        self.M = int(M)
        self.cum = CumulativeLoss.zeros(M)

    @property
    def round(self) -> int:
        """Index of the next round to be played (1-based)."""
        return self.cum.rounds_seen + 1

    def weights(self) -> np.ndarray:
        raise NotImplementedError

    def update(self, losses) -> None:
        self._absorb(as_losses(losses, expected_m=self.M))

    def _absorb(self, losses: np.ndarray) -> None:
        self.cum.absorb(losses)

    def trajectory(self, losses: np.ndarray) -> np.ndarray:
        """Weight vectors for all T rounds of a loss matrix, shape (T, M).

        Requires a freshly constructed learner and a matrix that was already
        validated on ingestion.  The base implementation steps through the
        sequential protocol; subclasses with closed-form weights override it
        with a vectorized replay that is bit-identical.
        """
        if self.cum.rounds_seen != 0:
            raise OutOfOrderRound("trajectory requires a fresh learner")
        T = losses.shape[0]
        out = np.empty((T, self.M))
        for t in range(T):
            out[t] = self.weights()
            self._absorb(losses[t])
        return out


def learner_step(learner: OnlineLearner, t: int, previous_losses=None):
    """Functional face of the protocol: absorb round t-1's losses, emit round t's weights.

    Returns ``(weight_vector, learner)`` with the learner mutated in place.
    """
    if not isinstance(t, (int, np.integer)) or t < 1:
        raise InvalidRound(t)
    if t == 1:
        if learner.round != 1:
            raise OutOfOrderRound(f"learner already at round {learner.round}, cannot restart at 1")
        if previous_losses is not None:
            raise OutOfOrderRound("round 1 has no previous losses")
    else:
        if previous_losses is None:
            raise OutOfOrderRound(f"round {t} needs the losses of round {t - 1}")
        if learner.round != t - 1:
            raise OutOfOrderRound(f"expected round {learner.round + 1}, got {t}")
        learner.update(previous_losses)
    return learner.weights(), learner


class HedgeLearner(OnlineLearner):
    """Exponential weights under any :class:`EtaSchedule`.

    The doubling-epoch kind restarts its accumulator at every epoch boundary
    2^k, so within an epoch it is exactly a constant-rate learner started
    fresh with horizon 2^k.
    """

    def __init__(self, schedule: EtaSchedule):
        super().__init__(schedule.M)
        self.schedule = schedule
        if schedule.kind == "doubling-epoch":
            self.epoch_index = 0
            self.epoch_totals = np.zeros(self.M)
        else:
            self.epoch_index = None
            self.epoch_totals = None

    def weights(self) -> np.ndarray:
        eta = eta_at(self.schedule, self.round)
        totals = self.epoch_totals if self.schedule.kind == "doubling-epoch" else self.cum.totals
        return hedge_weights(totals, eta)

    def _absorb(self, losses: np.ndarray) -> None:
        super()._absorb(losses)
        if self.schedule.kind == "doubling-epoch":
            self.epoch_totals += losses
            t = self.round
            if t >= 2 and t == epoch_start(t):  # crossed into epoch log2(t)
                self.epoch_index = t.bit_length() - 1
                self.epoch_totals = np.zeros(self.M)

    def trajectory(self, losses: np.ndarray) -> np.ndarray:
        if self.cum.rounds_seen != 0:
            raise OutOfOrderRound("trajectory requires a fresh learner")
        T, M = losses.shape
        ln_m = math.log(self.M)
        if self.schedule.kind == "doubling-epoch":
            weights = np.empty((T, M))
            k = 0
            while (1 << k) <= T:
                lo = (1 << k) - 1                      # 0-based row of the epoch's first round
                hi = min((1 << (k + 1)) - 1, T)        # one past the epoch's last row
                rel = np.zeros((hi - lo, M))
                np.cumsum(losses[lo:hi - 1], axis=0, out=rel[1:])
                eta = self.schedule.c0 * math.sqrt(ln_m / (1 << k))
                e = np.exp(-eta * (rel - rel.min(axis=1, keepdims=True)))
                weights[lo:hi] = e / e.sum(axis=1, keepdims=True)
                k += 1
            return weights
        prev = np.zeros((T, M))
        np.cumsum(losses[:-1], axis=0, out=prev[1:])
        if self.schedule.kind == "decreasing":
            eta = self.schedule.c0 * np.sqrt(ln_m / np.arange(1, T + 1, dtype=float))
        else:
            eta = np.full(T, self.schedule.c0 * math.sqrt(ln_m / self.schedule.T))
        e = np.exp(-eta[:, None] * (prev - prev.min(axis=1, keepdims=True)))
        return e / e.sum(axis=1, keepdims=True)


class DecreasingHedge(HedgeLearner):
    id = "hedge"

    def __init__(self, M: int, c0: float = DEFAULT_C0["hedge"]):
        super().__init__(EtaSchedule(kind="decreasing", c0=c0, M=M))


class ConstantHedge(HedgeLearner):
    id = "hedge_constant"

    def __init__(self, M: int, T: int, c0: float = DEFAULT_C0["hedge_constant"]):
        super().__init__(EtaSchedule(kind="constant", c0=c0, M=M, T=T))


class DoublingHedge(HedgeLearner):
    id = "hedge_doubling"

    def __init__(self, M: int, c0: float = DEFAULT_C0["hedge_doubling"]):
        super().__init__(EtaSchedule(kind="doubling-epoch", c0=c0, M=M))


class FtlLearner(OnlineLearner):
    """Follow-the-leader: all mass on the currently best experts."""

    id = "ftl"

    def weights(self) -> np.ndarray:
        return ftl_weights(self.cum.totals)

    def trajectory(self, losses: np.ndarray) -> np.ndarray:
        if self.cum.rounds_seen != 0:
            raise OutOfOrderRound("trajectory requires a fresh learner")
        T, M = losses.shape
        prev = np.zeros((T, M))
        np.cumsum(losses[:-1], axis=0, out=prev[1:])
        mask = prev == prev.min(axis=1, keepdims=True)
        return mask / mask.sum(axis=1, keepdims=True)


class AdaHedgeLearner(OnlineLearner):
    """Hedge with the learning rate tuned from the accumulated mixability gap.

    The rate at each round is ln(M) / gap_total; while the accumulated gap is
    zero the rate is effectively infinite and the learner plays follow-the-
    leader weights.  After observing a round, the mixability gap
    ``delta = mix_loss - exponential_mixture_loss`` (nonnegative up to
    rounding) is added to the accumulator.
    """

    id = "adahedge"

    def __init__(self, M: int):
        super().__init__(M)
        self.gap_total = 0.0
        self.last_delta = 0.0
        self._cached_round = 0
        self._cached_weights: np.ndarray | None = None

    def _eta(self) -> float:
        if self.gap_total <= 0.0:
            return math.inf
        eta = math.log(self.M) / self.gap_total
        return eta if math.isfinite(eta) else math.inf

    def weights(self) -> np.ndarray:
        if self._cached_round == self.round and self._cached_weights is not None:
            return self._cached_weights
        eta = self._eta()
        w = ftl_weights(self.cum.totals) if math.isinf(eta) else hedge_weights(self.cum.totals, eta)
        self._cached_round = self.round
        self._cached_weights = w
        return w

    def _absorb(self, losses: np.ndarray) -> None:
        w = self.weights()
        eta = self._eta()
        hat = float(w @ losses)
        if math.isinf(eta):
            # limit of the exponential-mixture loss: increment of the leading total
            mixture = float((self.cum.totals + losses).min() - self.cum.totals.min())
        else:
            lmin = float(losses.min())
            mixture = lmin - math.log(float(w @ np.exp(-eta * (losses - lmin)))) / eta
        self.last_delta = hat - mixture
        self.gap_total += max(0.0, self.last_delta)
        super()._absorb(losses)
        self._cached_weights = None


def make_learner(learner_id: str, M: int, T: int | None = None, c0: float | None = None) -> OnlineLearner:
    """Build a learner by its stable identifier.

    ``T`` is required for ``hedge_constant``; ``c0`` overrides the default
    rate constant of the Hedge variants and is rejected for learners that do
    not take one.
    """
    if learner_id == "hedge":
        return DecreasingHedge(M, c0=DEFAULT_C0["hedge"] if c0 is None else c0)
    if learner_id == "hedge_constant":
        if T is None:
            raise ValueError("hedge_constant requires the horizon T")
        return ConstantHedge(M, T, c0=DEFAULT_C0["hedge_constant"] if c0 is None else c0)
    if learner_id == "hedge_doubling":
        return DoublingHedge(M, c0=DEFAULT_C0["hedge_doubling"] if c0 is None else c0)
    if c0 is not None:
        raise ValueError(f"learner {learner_id!r} takes no c0 constant")
    if learner_id == "adahedge":
        return AdaHedgeLearner(M)
    if learner_id == "ftl":
        return FtlLearner(M)
    raise ValueError(f"unknown learner: {learner_id}")
