"""Atomic measures, cadlag step functions and Lebesgue-Stieltjes sums.

Everything downstream (hazards, survival curves, product integrals) is built on
these two types. Times are compared exactly; callers are expected to put atoms
on a shared grid.
"""

from __future__ import annotations

from typing import Callable, Union

import numpy as np

__all__ = [
    "AtomicMeasure",
    "StepFunction",
    "NonzeroMassAtSingularity",
    "cumulative",
    "ls_integrate",
]


class NonzeroMassAtSingularity(ZeroDivisionError):
    """A reciprocal integrand vanishes at an atom carrying positive mass."""


class AtomicMeasure:
    """Finite nonnegative measure on (0, inf) with finitely many atoms.

    Duplicate times are fused by summing their masses, and atoms are kept in
    ascending time order. Zero masses are retained so that grids survive
    round trips unchanged.
    """

    __slots__ = ("times", "masses")

    def __init__(self, times=(), masses=()):
        times = np.asarray(times, dtype=float).ravel()
        masses = np.asarray(masses, dtype=float).ravel()
        if times.shape != masses.shape:
            raise ValueError("times and masses must have the same length")
        if times.size and np.any(times <= 0):
            raise ValueError("atom times must be strictly positive")
        if masses.size and (np.any(masses < 0) or not np.all(np.isfinite(masses))):
            raise ValueError("atom masses must be finite and nonnegative")
        uniq, inv = np.unique(times, return_inverse=True)
        fused = np.zeros(uniq.size)
        np.add.at(fused, inv, masses)
        uniq.setflags(write=False)
        fused.setflags(write=False)
        self.times = uniq
        self.masses = fused

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        if not pairs:
            return cls()
        t, m = zip(*pairs)
        return cls(t, m)

    def __len__(self):
        return self.times.size

    def __iter__(self):
        return iter(zip(self.times.tolist(), self.masses.tolist()))

    def __repr__(self):
        return f"AtomicMeasure({list(self)!r})"

    @property
    def total(self) -> float:
        return float(self.masses.sum())

    def mass_at(self, t: float) -> float:
        i = np.searchsorted(self.times, t)
        if i < self.times.size and self.times[i] == t:
            return float(self.masses[i])
        return 0.0

    def restrict(self, a: float, b: float) -> "AtomicMeasure":
        """Atoms in the left-open window (a, b]."""
        keep = (self.times > a) & (self.times <= b)
        return AtomicMeasure(self.times[keep], self.masses[keep])


class StepFunction:
    """Right-continuous step function with left limits.

    ``f(t)`` is the value set by the last jump at or before ``t`` and
    ``f.left(t)`` the value set by the last jump strictly before ``t``;
    before the first jump both return ``initial``.
    """

    __slots__ = ("initial", "times", "values")

    def __init__(self, initial: float, times=(), values=()):
        times = np.asarray(times, dtype=float).ravel()
        values = np.asarray(values, dtype=float).ravel()
        if times.shape != values.shape:
            raise ValueError("times and values must have the same length")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("jump times must be strictly increasing")
        times.setflags(write=False)
        values.setflags(write=False)
        self.initial = float(initial)
        self.times = times
        self.values = values

    def __repr__(self):
        jumps = list(zip(self.times.tolist(), self.values.tolist()))
        return f"StepFunction({self.initial!r}, {jumps!r})"

    def _lookup(self, t, side):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t, side=side) - 1
        padded = np.concatenate(([self.initial], self.values))
        out = padded[idx + 1]
        return float(out) if out.ndim == 0 else out

    def __call__(self, t):
        return self._lookup(t, "right")

    def left(self, t):
        return self._lookup(t, "left")


Integrand = Union[StepFunction, Callable[[float], float], float]


def cumulative(m: AtomicMeasure) -> StepFunction:
    """The distribution function ``t -> m((0, t])``."""
    return StepFunction(0.0, m.times, np.cumsum(m.masses))


def _evaluate(g: Integrand, s: float, left: bool) -> float:
    if isinstance(g, StepFunction):
        return g.left(s) if left else g(s)
    if callable(g):
        return float(g(s))
    return float(g)


def ls_integrate(
    g: Integrand,
    m: AtomicMeasure,
    a: float = 0.0,
    b: float = np.inf,
    *,
    left: bool = False,
    reciprocal: bool = False,
) -> float:
    """Integral of ``g`` against ``m`` over the window ``(a, b]``.

    Parameters
    ----------
    g : StepFunction, callable or float
        Integrand. A StepFunction is evaluated at ``s`` or, with ``left=True``,
        at ``s-``.
    m : AtomicMeasure
        Integrator.
    a, b : float
        Left-open, right-closed window.
    left : bool
        Use left limits of ``g``.
    reciprocal : bool
        Integrate ``1/g`` instead of ``g``. A zero integrand against a
        zero-mass atom contributes 0; against positive mass it raises
        :class:`NonzeroMassAtSingularity`.
    """
    if a > b:
        raise ValueError("window requires a <= b")
    total = 0.0
    for s, mass in zip(m.times, m.masses):
        if s <= a or s > b:
            continue
        v = _evaluate(g, s, left)
        if reciprocal:
            if v == 0.0:
                if mass > 0.0:
                    raise NonzeroMassAtSingularity(f"integrand is 0 at t={s} with mass {mass}")
                continue
            v = 1.0 / v
        total += v * mass
    return total
