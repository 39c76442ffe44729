"""Nelson-Aalen, Kaplan-Meier and Aalen-Johansen estimators.

All three consume an :class:`ObservedSample` of exit pairs ``(t~, d~)`` with
``d~ = 0`` meaning censored. Tied exit times are pooled into one atom before
any hazard division.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DiscreteWorld, WorldFunctionals
from .prodint import HazardMatrix, prodint_path
from .stepfn import AtomicMeasure, StepFunction

__all__ = [
    "EmptySample",
    "ObservedSample",
    "EstimatorPath",
    "nelson_aalen",
    "kaplan_meier",
    "aalen_johansen",
    "sample_world",
]


class EmptySample(ValueError):
    """An estimator was asked to run on zero records."""


@dataclass(frozen=True, eq=False)
class ObservedSample:
    times: np.ndarray
    types: np.ndarray
    d: int

    def __init__(self, times, types, d=None):
        times = np.asarray(times, dtype=float).ravel()
        types = np.asarray(types).ravel()
        if times.shape != types.shape:
            raise ValueError("times and types must have the same length")
        if times.size and (np.any(~np.isfinite(times)) or np.any(times <= 0)):
            raise ValueError("exit times must be positive and finite")
        if types.size and np.any(types != np.round(types)):
            raise ValueError("exit types must be integers")
        types = types.astype(int)
        if types.size and types.min() < 0:
            raise ValueError("exit types must be >= 0")
        top = int(types.max()) if types.size else 0
        d = max(top, 1) if d is None else int(d)
        if top > d:
            raise ValueError(f"exit type {top} exceeds d={d}")
        times.setflags(write=False)
        types.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "types", types)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.times.size

    def tabulate(self):
        """Distinct times with risk-set sizes and per-type counts (column 0 censored)."""
        if self.n == 0:
            raise EmptySample("sample has no records")
        uniq, inv = np.unique(self.times, return_inverse=True)
        counts = np.zeros((uniq.size, self.d + 1), dtype=np.int64)
        np.add.at(counts, (inv, self.types), 1)
        exits = counts.sum(axis=1)
        at_risk = self.n - np.concatenate(([0], np.cumsum(exits)[:-1]))
        return uniq, at_risk, counts


@dataclass(frozen=True, eq=False)
class EstimatorPath:
    """Estimator values at every distinct exit time of the sample."""

    times: np.ndarray
    at_risk: np.ndarray
    counts: np.ndarray
    dH: np.ndarray
    S: np.ndarray
    P: np.ndarray

    @property
    def d(self) -> int:
        return self.dH.shape[1]

    def row(self, t: float) -> np.ndarray:
        """Row 1 of the estimated transition matrix at time ``t``."""
        k = np.searchsorted(self.times, t, side="right") - 1
        if k < 0:
            out = np.zeros(self.d + 1)
            out[0] = 1.0
            return out
        return self.P[k, 0].copy()

    def survival(self) -> StepFunction:
        return StepFunction(1.0, self.times, self.S)


def nelson_aalen(sample: ObservedSample) -> list[AtomicMeasure]:
    """One increment measure per event type, with masses count / at-risk."""
    times, at_risk, counts = sample.tabulate()
    return [AtomicMeasure(times, counts[:, j] / at_risk) for j in range(1, sample.d + 1)]


def kaplan_meier(sample: ObservedSample) -> StepFunction:
    times, at_risk, counts = sample.tabulate()
    dH = counts[:, 1:].sum(axis=1) / at_risk
    return StepFunction(1.0, times, np.cumprod(1.0 - dH))


def aalen_johansen(sample: ObservedSample) -> EstimatorPath:
    times, at_risk, counts = sample.tabulate()
    dH = counts[:, 1:] / at_risk[:, None]
    _, P = prodint_path(HazardMatrix(times, dH), 0.0)
    S = np.cumprod(1.0 - dH.sum(axis=1))
    return EstimatorPath(times, at_risk, counts, dH, S, P)


def sample_world(world, n: int, seed=None) -> ObservedSample:
    """Draw ``n`` i.i.d. exit pairs from the observed law.

    Inverse transform over the observed atoms in (time, type) order, driven
    by numpy's default generator (PCG64) seeded with ``seed``.
    """
    if isinstance(world, WorldFunctionals):
        world = world.world
    if not isinstance(world, DiscreteWorld):
        raise TypeError("expected a DiscreteWorld or WorldFunctionals")
    if n < 1:
        raise ValueError("n must be at least 1")
    obs = world.observed
    flat = obs.ravel()
    cdf = np.cumsum(flat)
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    idx = np.searchsorted(cdf, u, side="right")
    # first cell whose cdf exceeds u; that cell always has positive mass
    i, k = np.divmod(idx, world.d + 1)
    return ObservedSample(world.grid[i], k, world.d)
