"""Loss-generating instances, deterministic given (spec, seed, trial).

Stochastic instances draw through a counter-based scheme: the uniforms that
feed round t of trial k occupy a fixed window of the Philox stream keyed by
(seed, k), so any round can be sampled in isolation and full matrices are
bit-identical to per-round access regardless of execution order.  Beta draws
go through the exact inverse CDF (one uniform per expert), never a normal
approximation.

Specs are immutable; sampling is a pure function of (spec, t, rng).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from numpy.random import Generator, Philox
from scipy import special

from .core import InvalidLoss

KINDS = (
    "bernoulli-gap",
    "beta-small-loss",
    "adversarial-gap-d",
    "constant-prop3",
    "bernstein-t4",
    "minimax-prop2",
)

_STOCHASTIC_KINDS = ("bernoulli-gap", "beta-small-loss", "minimax-prop2")
_CONSTANT_KINDS = ("constant-prop3", "bernstein-t4")

GAP_ATOL = 1e-12


class UnknownInstance(ValueError):
    def __init__(self, name: str, detail: str = ""):
        self.name = name
        msg = f"unknown instance: {name}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class UndefinedGap(ValueError):
    """The instance has no declared (i*, gap) pair to report."""


@dataclass(frozen=True)
class RngStream:
    """Counter-based uniform stream for one trial.

    Identical (seed, trial) pairs produce bit-identical sequences on every
    platform and under any parallel schedule.  Each round owns a fixed window
    of the keyed Philox stream (padded to whole 256-bit counter ticks), so a
    round's draws can be generated in isolation or as part of a bulk matrix
    with identical bits.
    """

    seed: int
    trial: int

    def __post_init__(self):
        for name in ("seed", "trial"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0 or v >= 2**64:
                raise ValueError(f"{name} must be an integer in [0, 2**64), got {v!r}")

    def _key(self) -> np.ndarray:
        return np.array([self.seed, self.trial], dtype=np.uint64)

    @staticmethod
    def _stride(width: int) -> int:
        # one double consumes one 64-bit word; Philox advances in 4-word ticks
        return 4 * ((int(width) + 3) // 4)

    def round_uniforms(self, t: int, width: int) -> np.ndarray:
        """The ``width`` uniforms assigned to round t (random access)."""
        bg = Philox(key=self._key())
        ticks = (int(t) - 1) * (self._stride(width) // 4)
        if ticks:
            bg.advance(ticks)
        return Generator(bg).random(int(width))

    def uniform_block(self, rounds: int, width: int) -> np.ndarray:
        """Uniform matrix for rounds 1..rounds, shape (rounds, width).

        Row t-1 is bit-identical to ``round_uniforms(t, width)``.
        """
        stride = self._stride(width)
        full = Generator(Philox(key=self._key())).random((int(rounds), stride))
        return np.ascontiguousarray(full[:, : int(width)])


@dataclass(frozen=True)
class InstanceSpec:
    """Declarative description of a loss-generating environment.

    ``params`` depends on the kind: Bernoulli means for the Bernoulli kinds,
    (a, b) shape pairs for the Beta kind, the per-round gap for the constant
    bernstein-t4 kind, and empty otherwise.  ``i_star`` is the declared best
    expert (1-based) or None; ``gap`` is the declared mean sub-optimality gap
    or None when undefined; ``tau0`` marks the round from which the
    adversarial instance's leader dominates linearly.
    """

    id: str
    kind: str
    M: int
    params: tuple = ()
    i_star: int | None = None
    gap: float | None = None
    tau0: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnknownInstance(self.id, f"kind {self.kind!r} not in {KINDS}")
        if self.M < 2:
            raise ValueError(f"need at least 2 experts, got M={self.M}")
        if self.i_star is not None and not (1 <= self.i_star <= self.M):
            raise ValueError(f"i_star must be in [1, {self.M}], got {self.i_star}")
        if self.kind in ("bernoulli-gap", "minimax-prop2"):
            if len(self.params) != self.M:
                raise ValueError(f"kind {self.kind} needs {self.M} Bernoulli means")
            if any(not (0.0 <= p <= 1.0) for p in self.params):
                raise ValueError("Bernoulli means must lie in [0, 1]")
        elif self.kind == "beta-small-loss":
            if len(self.params) != self.M:
                raise ValueError(f"kind {self.kind} needs {self.M} (a, b) shape pairs")
            if any(len(ab) != 2 or ab[0] <= 0 or ab[1] <= 0 for ab in self.params):
                raise ValueError("Beta shapes must be positive (a, b) pairs")
        elif self.kind == "bernstein-t4":
            if len(self.params) != 1 or not (0.0 <= self.params[0] <= 1.0):
                raise ValueError("kind bernstein-t4 needs a single per-round gap in [0, 1]")
        elif self.kind == "adversarial-gap-d":
            if self.M != 3:
                raise ValueError("the adversarial instance is defined for M=3")
        if self.gap is not None and self.kind != "adversarial-gap-d":
            _, computed = _gap_from_means(self)
            if abs(self.gap - computed) > GAP_ATOL:
                raise ValueError(
                    f"declared gap {self.gap!r} does not match the distribution gap {computed!r}"
                )


def mean_losses(spec: InstanceSpec) -> np.ndarray:
    """Exact per-expert expected losses, for kinds where they are defined."""
    if spec.kind in ("bernoulli-gap", "minimax-prop2"):
        return np.array(spec.params, dtype=float)
    if spec.kind == "beta-small-loss":
        return np.array([a / (a + b) for a, b in spec.params], dtype=float)
    if spec.kind == "constant-prop3":
        return np.r_[0.0, np.ones(spec.M - 1)]
    if spec.kind == "bernstein-t4":
        return np.r_[0.0, np.full(spec.M - 1, float(spec.params[0]))]
    raise UndefinedGap(f"instance {spec.id!r} ({spec.kind}) has no per-round mean losses")


def _gap_from_means(spec: InstanceSpec) -> tuple[int, float]:
    means = mean_losses(spec)
    if spec.i_star is not None:
        best = spec.i_star - 1
        if means[best] > means.min() + GAP_ATOL:
            raise ValueError(
                f"declared best expert {spec.i_star} does not minimize the expected loss"
            )
    else:
        best = int(np.argmin(means))
    others = np.delete(means, best)
    return best + 1, float(others.min() - means[best])


def gap_of(spec: InstanceSpec) -> tuple[int, float]:
    """Declared best expert (1-based) and the exact mean gap of the instance."""
    if spec.kind == "adversarial-gap-d":
        raise UndefinedGap(
            "the adversarial instance has no i.i.d. gap; use scan_adversarial_gap"
        )
    if spec.i_star is None:
        raise UndefinedGap(f"instance {spec.id!r} declares no best expert")
    return _gap_from_means(spec)


def _adversarial_row(t: int) -> np.ndarray:
    # third expert fixed at 3/4; first two alternate, then lock after the switch round
    if t == 1:
        pair = (0.5, 0.0)
    elif t >= 80 or t % 2 == 0:
        pair = (0.0, 1.0)
    else:
        pair = (1.0, 0.0)
    return np.array([pair[0], pair[1], 0.75])


def sample_losses(spec: InstanceSpec, t: int, rng: RngStream) -> np.ndarray:
    """Loss vector of round t (1-based); deterministic kinds ignore ``rng``."""
    if t < 1:
        raise ValueError(f"round index must be >= 1, got {t}")
    if spec.kind == "constant-prop3":
        return np.r_[0.0, np.ones(spec.M - 1)]
    if spec.kind == "bernstein-t4":
        return np.r_[0.0, np.full(spec.M - 1, float(spec.params[0]))]
    if spec.kind == "adversarial-gap-d":
        return _adversarial_row(t)
    u = rng.round_uniforms(t, spec.M)
    return _transform_uniforms(spec, u)


def _transform_uniforms(spec: InstanceSpec, u: np.ndarray) -> np.ndarray:
    if spec.kind in ("bernoulli-gap", "minimax-prop2"):
        p = np.array(spec.params, dtype=float)
        return (u < p).astype(float)
    a = np.array([ab[0] for ab in spec.params], dtype=float)
    b = np.array([ab[1] for ab in spec.params], dtype=float)
    return special.betaincinv(a, b, u)


def loss_matrix(spec: InstanceSpec, T: int, rng: RngStream) -> np.ndarray:
    """Losses for rounds 1..T as a (T, M) matrix, validated on ingestion.

    Bit-identical to stacking ``sample_losses`` round by round.
    """
    if T < 1:
        raise ValueError(f"horizon must be >= 1, got {T}")
    if spec.kind == "constant-prop3":
        out = np.tile(np.r_[0.0, np.ones(spec.M - 1)], (T, 1))
    elif spec.kind == "bernstein-t4":
        out = np.tile(np.r_[0.0, np.full(spec.M - 1, float(spec.params[0]))], (T, 1))
    elif spec.kind == "adversarial-gap-d":
        out = np.vstack([_adversarial_row(t) for t in range(1, T + 1)])
    else:
        out = _transform_uniforms(spec, rng.uniform_block(T, spec.M))
    if not np.all(np.isfinite(out)) or out.min() < 0.0 or out.max() > 1.0:
        raise InvalidLoss(f"instance {spec.id!r} produced losses outside [0, 1]")
    return out


@dataclass(frozen=True)
class ScannedGap:
    """Empirical linear-domination certificate of a deterministic instance."""

    i_star: int
    gap: float
    tau0: int


def scan_adversarial_gap(spec: InstanceSpec, T: int) -> ScannedGap:
    """Scan cumulative losses for the largest gap such that every non-leading
    expert trails by at least gap * t from some round tau0 on.

    The labelled gap of an adversarial instance is not trusted; this is the
    certified value.
    """
    losses = loss_matrix(spec, T, RngStream(0, 0))
    cum = np.cumsum(losses, axis=0)
    best = int(np.argmin(cum[-1]))
    others = np.delete(cum, best, axis=1)
    margins = (others.min(axis=1) - cum[:, best]) / np.arange(1, T + 1)
    violated = np.nonzero(margins <= 0.0)[0]
    tau0 = int(violated[-1]) + 2 if violated.size else 1
    if tau0 > T:
        raise UndefinedGap(f"no round in 1..{T} starts a linear-domination phase")
    return ScannedGap(i_star=best + 1, gap=float(margins[tau0 - 1 :].min()), tau0=tau0)


# --- builtin catalogue ------------------------------------------------------

INSTANCE_IDS = ("fig-a", "fig-b", "fig-c", "fig-d", "prop2", "prop3", "t4")

_PARAM_KEYS = {
    "prop3": ("M",),
    "t4": ("M", "T", "c0"),
    "prop2": ("M", "delta", "istar"),
}


def t4_gap(M: int, T: int, c0: float) -> float:
    """Per-round gap of the bernstein-t4 instance: min(1, sqrt(ln(M)/T)/c0)."""
    return min(1.0, math.sqrt(math.log(M) / T) / c0)


def _parse_instance_name(name: str) -> tuple[str, dict]:
    base, _, tail = name.partition(":")
    if base not in INSTANCE_IDS:
        raise UnknownInstance(base)
    overrides: dict[str, float] = {}
    if tail:
        allowed = _PARAM_KEYS.get(base, ())
        for piece in tail.split(","):
            key, sep, value = piece.partition("=")
            if not sep or key not in allowed:
                raise UnknownInstance(name, f"instance {base!r} accepts parameters {allowed}")
            try:
                overrides[key] = float(value)
            except ValueError:
                raise UnknownInstance(name, f"bad value for {key!r}: {value!r}") from None
    return base, overrides


def builtin_instance(name: str) -> InstanceSpec:
    """Resolve a catalogue instance, optionally parameterized as
    ``name:key=value,...`` (e.g. ``prop3:M=2`` or ``prop2:M=16,delta=0.1,istar=3``).
    """
    base, kw = _parse_instance_name(name)
    if base == "fig-a":
        return InstanceSpec(
            id=name, kind="bernoulli-gap", M=10,
            params=(0.3, 0.4, 0.4) + (0.5,) * 7, i_star=1, gap=0.1,
        )
    if base == "fig-b":
        # two tied leaders; pseudo-regret is reported against expert 1
        return InstanceSpec(
            id=name, kind="bernoulli-gap", M=10,
            params=(0.5, 0.5) + (0.7,) * 8, i_star=1, gap=0.0,
        )
    if base == "fig-c":
        return InstanceSpec(
            id=name, kind="beta-small-loss", M=10,
            params=((0.04, 0.96),) + ((0.08, 0.92),) * 4 + ((0.5, 0.5),) * 5,
            i_star=1, gap=0.04,
        )
    if base == "fig-d":
        return InstanceSpec(id=name, kind="adversarial-gap-d", M=3, i_star=1, tau0=80)
    if base == "prop3":
        m = int(kw.get("M", 10))
        return InstanceSpec(id=name, kind="constant-prop3", M=m, i_star=1, gap=1.0)
    if base == "t4":
        m = int(kw.get("M", 10))
        horizon = int(kw.get("T", 10_000))
        c0 = float(kw.get("c0", 2.0))
        delta = t4_gap(m, horizon, c0)
        return InstanceSpec(id=name, kind="bernstein-t4", M=m, params=(delta,), i_star=1, gap=delta)
    m = int(kw.get("M", 16))
    delta = float(kw.get("delta", 0.1))
    i_star = int(kw.get("istar", 1))
    probs = [0.5] * m
    probs[i_star - 1] = 0.5 - delta
    return InstanceSpec(
        id=name, kind="minimax-prop2", M=m, params=tuple(probs), i_star=i_star, gap=delta
    )


def instance_from_dict(d: dict) -> InstanceSpec:
    """Build a custom instance from a config mapping.

    Recognized keys: ``id``, ``kind``, ``M`` (optional, inferred from params),
    ``params``, ``i_star``, ``gap``, ``tau0``.  Beta params are [a, b] pairs.
    """
    if "kind" not in d:
        raise UnknownInstance(str(d.get("id", "<custom>")), "custom instance needs a kind")
    kind = d["kind"]
    raw = d.get("params", [])
    if kind == "beta-small-loss":
        params = tuple(tuple(float(x) for x in ab) for ab in raw)
    else:
        params = tuple(float(x) for x in raw)
    m = int(d.get("M", len(params) if params else 0))
    return InstanceSpec(
        id=str(d.get("id", "custom")),
        kind=kind,
        M=m,
        params=params,
        i_star=(None if d.get("i_star") is None else int(d["i_star"])),
        gap=(None if d.get("gap") is None else float(d["gap"])),
        tau0=(None if d.get("tau0") is None else int(d["tau0"])),
    )
