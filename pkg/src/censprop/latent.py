"""Latent event and censoring times realising a given observed law.

Starting from the law of the observed exit pair (T~, D~) alone, these
constructions produce a censoring time C and an event pair (T, D) with
T~ = T ^ C, D~ = D 1{T <= C} and (T, D) independent of C. The joint law is
computed exactly; an inverse-transform sampler is provided for Monte Carlo
checks of the same construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DiscreteWorld, WorldFunctionals, safe_div
from .stepfn import StepFunction

__all__ = [
    "DefectiveTail",
    "ConditionalCDF",
    "CensoringConstruction",
    "EventConstruction",
    "ConstructedWorld",
    "generalized_inverse",
    "conditional_cdf",
    "conditional_c_law",
    "construct_C",
    "construct_TD",
    "construct_world",
    "verify_existence",
    "sample_C",
]


class DefectiveTail(UserWarning):
    """Observed event hazards do not exhaust survival after a censoring time."""


def generalized_inverse(F: StepFunction, u):
    """``inf{x : F(x) >= u}`` with ``x`` ranging over the jump times of ``F``.

    Returns ``inf`` when no jump time qualifies. Any ``u`` at or below the
    initial value maps to the leftmost jump time. Vectorised over ``u``.
    """
    u = np.asarray(u, dtype=float)
    idx = np.searchsorted(F.values, u, side="left")
    out = np.where(idx < F.times.size, F.times[np.minimum(idx, F.times.size - 1)], np.inf)
    if F.times.size:
        out = np.where(u <= F.initial, F.times[0], out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ConditionalCDF:
    """Law of C given (T~, D~) = (t, k) on the grid, with a mass at infinity."""

    t: float
    k: int
    cdf: StepFunction

    @property
    def mass_at_inf(self) -> float:
        last = self.cdf.values[-1] if self.cdf.values.size else self.cdf.initial
        return max(0.0, 1.0 - float(last))


def _c_survival(f: WorldFunctionals) -> np.ndarray:
    """``surv[i, c] = P(C > grid[c] | T~ = grid[i], D~ != 0)`` for c >= i."""
    m = f.world.m
    factors = 1.0 - f.dHcheck0
    surv = np.ones((m, m))
    for i in range(m):
        surv[i, i:] = np.cumprod(factors[i:])
    return surv


def conditional_c_law(f: WorldFunctionals) -> np.ndarray:
    """``q[i, c] = P(C = grid[c] | T~ = grid[i], D~ != 0)``; column m is inf."""
    m = f.world.m
    surv = _c_survival(f)
    q = np.zeros((m, m + 1))
    for i in range(m):
        prev = np.concatenate(([1.0], surv[i, i:-1]))
        q[i, i:m] = prev * f.dHcheck0[i:]
        q[i, m] = surv[i, m - 1]
    return q


def conditional_cdf(f: WorldFunctionals, t: float, k: int) -> ConditionalCDF:
    """CDF of C given ``T~ = t, D~ = k``.

    A censored exit pins ``C = t``. Otherwise ``C >= t`` and
    ``P(C > c) = prod_{[t, c]} (1 - dH_check0)``.
    """
    i = int(np.searchsorted(f.grid, t))
    if i >= f.world.m or f.grid[i] != t:
        raise ValueError(f"t={t!r} is not on the grid")
    if k == 0:
        cdf = StepFunction(0.0, f.grid, (np.arange(f.world.m) >= i).astype(float))
    else:
        q = conditional_c_law(f)[i, : f.world.m]
        cdf = StepFunction(0.0, f.grid, np.cumsum(q))
    return ConditionalCDF(float(t), int(k), cdf)


@dataclass(frozen=True)
class CensoringConstruction:
    """Exact joint of (T~, D~, C); ``joint[i, k, c]`` with column m for inf."""

    grid: np.ndarray
    joint: np.ndarray
    c_survival: np.ndarray

    @property
    def improper(self) -> bool:
        return bool(self.joint[:, :, -1].sum() > 0)

    @property
    def p_c_inf(self) -> float:
        return float(self.joint[:, :, -1].sum())


def construct_C(f: WorldFunctionals) -> CensoringConstruction:
    """Couple a censoring time to the observed pair.

    ``c_survival[s] = P(C > grid[s])`` is returned as computed from the
    coupled joint, not from the hazard product.
    """
    m, d = f.world.m, f.d
    q = conditional_c_law(f)
    joint = np.zeros((m, d + 1, m + 1))
    joint[:, 1:, :] = f.dFt[:, 1:, None] * q[:, None, :]
    joint[np.arange(m), 0, np.arange(m)] = f.dFt[:, 0]
    c_law = joint.sum(axis=(0, 1))
    c_surv = np.flip(np.cumsum(np.flip(c_law)))[1:]
    return CensoringConstruction(f.grid, joint, c_surv)


@dataclass(frozen=True)
class EventConstruction:
    """Exact joint of (T~, D~, T, D).

    ``joint[i, k, u, j]`` is ``P(T~ = grid[i], D~ = k, T = ext_grid[u],
    D = j + 1)``; ``ext_grid`` appends ``tau_plus`` when the tail is defective.
    """

    grid: np.ndarray
    ext_grid: np.ndarray
    joint: np.ndarray
    defective_tail: bool
    tau_plus: float | None


def _tau_plus(grid):
    return float(grid[-1] + 1.0)


def construct_TD(f: WorldFunctionals) -> EventConstruction:
    """Fill in (T, D) after each censored exit.

    Given ``T~ = s, D~ = 0`` the pair follows the observed cause-specific
    hazards from ``s`` onward. If the observed hazards
    leave survival mass after the last grid point, that residual goes to a
    single atom ``tau_plus`` beyond the grid with type ``d`` and the result is
    flagged ``defective_tail``.
    """
    m, d = f.world.m, f.d
    dHt = f.dHt[:, 1:]
    # 1 - dH~ without cancellation; no hazard once observed mass is exhausted
    factors = np.where(f.St_left > 0, safe_div(f.Scheck, f.St_left), 1.0)
    cond = np.zeros((m, m + 1, d))  # [s, u, j] on the extended axis
    residual = np.zeros(m)
    for s in range(m):
        if f.dFt[s, 0] <= 0:
            continue
        surv = 1.0
        for u in range(s + 1, m):
            cond[s, u] = surv * dHt[u]
            surv *= factors[u]
        residual[s] = surv
    defective = bool(np.any((residual > 0) & (f.dFt[:, 0] > 0)))
    cond[:, m, d - 1] = residual
    ext_grid = np.append(f.grid, _tau_plus(f.grid)) if defective else f.grid.copy()
    width = ext_grid.size
    joint = np.zeros((m, d + 1, width, d))
    for k in range(1, d + 1):
        joint[np.arange(m), k, np.arange(m), k - 1] = f.dFt[:, k]
    joint[:, 0, :, :] = f.dFt[:, 0, None, None] * cond[:, :width, :]
    return EventConstruction(f.grid, ext_grid, joint, defective, _tau_plus(f.grid) if defective else None)


@dataclass(frozen=True)
class ConstructedWorld:
    world: DiscreteWorld
    improper_c: bool
    p_c_inf: float
    defective_tail: bool
    tau_plus: float | None


def construct_world(f: WorldFunctionals) -> ConstructedWorld:
    """Full (T, D, C) world combining both constructions through (T~, D~)."""
    cc = construct_C(f)
    ev = construct_TD(f)
    m, d = f.world.m, f.d
    width = ev.ext_grid.size
    joint = np.zeros((width, d, width + 1))
    # event observed: T = T~, C drawn from its conditional law
    for i in range(m):
        for k in range(1, d + 1):
            if f.dFt[i, k] > 0:
                joint[i, k - 1, :m] += cc.joint[i, k, :m]
                joint[i, k - 1, width] += cc.joint[i, k, m]
    # censored: C = T~, (T, D) drawn after it
    for s in range(m):
        if f.dFt[s, 0] > 0:
            joint[:, :, s] += ev.joint[s, 0]
    # renormalise float drift so the world validates at 1e-12
    total = joint.sum()
    if abs(total - 1.0) > 0:
        joint = joint / total
    world = DiscreteWorld(d, ev.ext_grid, joint=joint)
    return ConstructedWorld(world, cc.improper, cc.p_c_inf, ev.defective_tail, ev.tau_plus)


def verify_existence(f: WorldFunctionals) -> float:
    """Independence defect of the constructed (T, D) and C.

    ``max |P(T<=t, D=j, C>s) - P(T<=t, D=j) P(C>s)|`` over the grid.
    """
    from .model import derive
    from .props import check_full_independence

    built = construct_world(f)
    return check_full_independence(derive(built.world)).value


def sample_C(f: WorldFunctionals, times, types, seed=None) -> np.ndarray:
    """Draw C for observed pairs by inverse transform of a uniform.

    Uses numpy's default generator (PCG64) seeded with ``seed``. The uniform
    is independent of the observed pair; ``inf`` marks an improper draw.
    """
    rng = np.random.default_rng(seed)
    times = np.asarray(times, dtype=float)
    types = np.asarray(types)
    u = rng.random(times.size)
    out = np.empty(times.size)
    q = conditional_c_law(f)
    cdfs = np.cumsum(q[:, : f.world.m], axis=1)
    for n, (t, k) in enumerate(zip(times, types)):
        i = int(np.searchsorted(f.grid, t))
        if k == 0:
            out[n] = t
        else:
            # u in (0, 1]: 1 - rng.random avoids the degenerate u = 0
            out[n] = generalized_inverse(StepFunction(0.0, f.grid, cdfs[i]), 1.0 - u[n])
    return out
