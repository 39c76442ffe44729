"""Exact discrete laws of (T, D, C) and the functionals derived from them.

A :class:`DiscreteWorld` lives on a finite time grid. The full variant stores
the joint law of event time, event type and censoring time as a dense array
``joint[i, j, k] = P(T = grid[i], D = j + 1, C = grid[k])`` where the extra
last slot ``k = m`` stands for ``C = inf`` (never censored). The observed-only
variant stores just ``observed[i, k] = P(T~ = grid[i], D~ = k)``.

Every functional is an array indexed by grid position: ``S[i]`` is the value
at ``grid[i]`` and ``S_left[i]`` the left limit there. Survival-type arrays
are built from tail sums so that exhausted mass is an exact zero, and 0/0
hazard terms are set to 0.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .prodint import HazardMatrix, prodint_matrix
from .stepfn import AtomicMeasure, StepFunction

__all__ = [
    "ObservedOnly",
    "OutsideJ",
    "WorldSpecError",
    "DiscreteWorld",
    "WorldFunctionals",
    "derive",
    "prodint_reconstruct",
    "parse_world",
    "world_to_spec",
    "dump_world",
    "load_world",
    "world_hash",
]

PROB_TOL = 1e-12


class ObservedOnly(LookupError):
    """A functional needs the underlying (T, D, C) law but only (T~, D~) is known."""


class OutsideJ(ValueError):
    """Requested time lies beyond the identifiable region."""


class WorldSpecError(ValueError):
    """A world description does not define a valid discrete law."""


def safe_div(num, den):
    """Elementwise ``num / den`` with ``x / 0 = 0``."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    out = np.zeros(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=den != 0)
    return out


def tail_sum(x, axis=0):
    """``out[i] = sum_{l > i} x[l]`` along ``axis``."""
    x = np.asarray(x, dtype=float)
    rev = np.flip(np.cumsum(np.flip(x, axis=axis), axis=axis), axis=axis)
    return rev - x


@dataclass(frozen=True, eq=False)
class DiscreteWorld:
    d: int
    grid: np.ndarray
    joint: Optional[np.ndarray] = None
    observed: np.ndarray = field(default=None)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise WorldSpecError("grid must be a nonempty list of times")
        if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
            raise WorldSpecError("grid times must be positive and strictly increasing")
        if self.d < 1:
            raise WorldSpecError("need at least one event type")
        m = grid.size
        object.__setattr__(self, "grid", grid)
        if self.joint is not None:
            joint = np.asarray(self.joint, dtype=float)
            if joint.shape != (m, self.d, m + 1):
                raise WorldSpecError(f"joint must have shape {(m, self.d, m + 1)}, got {joint.shape}")
            _check_probabilities(joint)
            object.__setattr__(self, "joint", joint)
            object.__setattr__(self, "observed", _observe(joint))
        else:
            if self.observed is None:
                raise WorldSpecError("either joint or observed law is required")
            obs = np.asarray(self.observed, dtype=float)
            if obs.shape != (m, self.d + 1):
                raise WorldSpecError(f"observed must have shape {(m, self.d + 1)}, got {obs.shape}")
            _check_probabilities(obs)
            object.__setattr__(self, "observed", obs)
        for arr in (self.grid, self.joint, self.observed):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def full(self) -> bool:
        return self.joint is not None

    @property
    def m(self) -> int:
        return self.grid.size

    @classmethod
    def from_atoms(cls, d, grid, atoms):
        """Build from ``(t, j, c, p)`` tuples (full) or ``(t, k, p)`` tuples.

        ``c`` may be ``inf`` (or ``None``-free ``float('inf')``) for never
        censored. Duplicate cells are fused by summing.
        """
        grid = np.asarray(grid, dtype=float)
        atoms = list(atoms)
        index = {float(g): i for i, g in enumerate(grid)}
        m = grid.size

        def pos(t):
            try:
                return index[float(t)]
            except KeyError:
                raise WorldSpecError(f"time {t!r} is not on the grid") from None

        if atoms and len(atoms[0]) == 3:
            obs = np.zeros((m, d + 1))
            for t, k, p in atoms:
                if not 0 <= k <= d:
                    raise WorldSpecError(f"observed type {k!r} outside 0..{d}")
                obs[pos(t), k] += p
            return cls(d, grid, observed=obs)
        joint = np.zeros((m, d, m + 1))
        for t, j, c, p in atoms:
            if not 1 <= j <= d:
                raise WorldSpecError(f"event type {j!r} outside 1..{d}")
            kc = m if c is None or np.isinf(c) else pos(c)
            joint[pos(t), j - 1, kc] += p
        return cls(d, grid, joint=joint)

    def atoms(self):
        """Nonzero atoms in canonical order."""
        g = self.grid.tolist()
        out = []
        if self.full:
            for i, j, k in zip(*np.nonzero(self.joint)):
                c = float("inf") if k == self.m else g[k]
                out.append((g[i], int(j) + 1, c, float(self.joint[i, j, k])))
        else:
            for i, k in zip(*np.nonzero(self.observed)):
                out.append((g[i], int(k), float(self.observed[i, k])))
        return out


def _check_probabilities(p):
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise WorldSpecError("probabilities must be finite and nonnegative")
    total = p.sum()
    if abs(total - 1.0) > PROB_TOL:
        raise WorldSpecError(f"probabilities sum to {total!r}, not 1")


def _observe(joint):
    m, d, _ = joint.shape
    obs = np.zeros((m, d + 1))
    i = np.arange(m)[:, None]
    k = np.arange(m + 1)[None, :]
    seen = k >= i  # T <= C, includes C = inf and ties
    obs[:, 1:] = (joint * seen[:, None, :]).sum(axis=2)
    # censored at grid[k] < T
    cens = joint[:, :, :m].sum(axis=1) * (k[:, :m] < i)
    obs[:, 0] = cens.sum(axis=0)
    return obs


@dataclass(frozen=True, eq=False)
class WorldFunctionals:
    """All survival and hazard functionals of a world, as grid arrays.

    Full-variant-only fields are ``None`` for an observed-only world; use
    :meth:`require_full` before touching them.
    """

    world: DiscreteWorld
    # observed pair
    St: np.ndarray
    St_left: np.ndarray
    dFt: np.ndarray
    Ft: np.ndarray
    dHt: np.ndarray
    Ht: np.ndarray
    dHt_all: np.ndarray
    dHcheck0: np.ndarray
    Hcheck0: np.ndarray
    Scheck: np.ndarray
    free_check0: np.ndarray
    tau: float
    tau_index: int
    J_closed: bool
    in_J: np.ndarray
    # underlying law
    S: Optional[np.ndarray] = None
    S_left: Optional[np.ndarray] = None
    dF: Optional[np.ndarray] = None
    F: Optional[np.ndarray] = None
    dH: Optional[np.ndarray] = None
    H: Optional[np.ndarray] = None
    dH_all: Optional[np.ndarray] = None
    K: Optional[np.ndarray] = None
    K_left: Optional[np.ndarray] = None
    dG: Optional[np.ndarray] = None
    G: Optional[np.ndarray] = None
    dH0: Optional[np.ndarray] = None
    H0: Optional[np.ndarray] = None
    p_c_inf: Optional[float] = None
    B: Optional[np.ndarray] = None
    a: Optional[np.ndarray] = None
    obs_given_at_risk: Optional[np.ndarray] = None

    @property
    def d(self) -> int:
        return self.world.d

    @property
    def grid(self) -> np.ndarray:
        return self.world.grid

    @property
    def full(self) -> bool:
        return self.world.full

    def require_full(self, what: str = "this functional"):
        if not self.full:
            raise ObservedOnly(f"{what} needs the law of (T, D, C), not just (T~, D~)")

    def step(self, name: str, column: Optional[int] = None) -> StepFunction:
        """StepFunction view of a grid array such as ``"S"`` or ``"Ht"``."""
        arr = getattr(self, name)
        if arr is None:
            self.require_full(name)
        if column is not None:
            arr = arr[:, column]
        initial = 1.0 if name in ("S", "St", "K", "Scheck") else 0.0
        return StepFunction(initial, self.grid, arr)

    def measure(self, name: str, column: Optional[int] = None) -> AtomicMeasure:
        """AtomicMeasure view of an increment array such as ``"dH"``."""
        arr = getattr(self, name)
        if arr is None:
            self.require_full(name)
        if column is not None:
            arr = arr[:, column]
        return AtomicMeasure(self.grid, arr)

    def observed_hazard_matrix(self) -> HazardMatrix:
        return HazardMatrix(self.grid, self.dHt[:, 1:])

    def hazard_matrix(self) -> HazardMatrix:
        self.require_full("the hazard matrix of (T, D)")
        return HazardMatrix(self.grid, self.dH)

    def transition_row(self) -> np.ndarray:
        """``(S, F_1, ..., F_d)`` at every grid point."""
        self.require_full("P(t)")
        return np.column_stack([self.S, self.F])


def derive(world: DiscreteWorld) -> WorldFunctionals:
    """Compute every functional of ``world`` by exact summation."""
    obs = world.observed
    dFt = obs
    Ft = np.cumsum(dFt, axis=0)
    exit_mass = obs.sum(axis=1)
    St = tail_sum(exit_mass)
    St_left = St + exit_mass
    dHt = safe_div(dFt, St_left[:, None])
    dHt_all = dHt[:, 1:].sum(axis=1)
    # S_check(t) = S~(t-)(1 - dH~(t)) = S~(t) + P(T~ = t, D~ = 0), from tail sums
    Scheck = St + dFt[:, 0]
    free_check0 = Scheck == 0
    dHcheck0 = safe_div(dFt[:, 0], Scheck)
    positive = np.flatnonzero(exit_mass > 0)
    tau_index = int(positive[-1])
    tau = float(world.grid[tau_index])
    J_closed = bool(St_left[tau_index] > 0)
    in_J = np.arange(world.m) < tau_index + (1 if J_closed else 0)

    common = dict(
        world=world,
        St=St,
        St_left=St_left,
        dFt=dFt,
        Ft=Ft,
        dHt=dHt,
        Ht=np.cumsum(dHt, axis=0),
        dHt_all=dHt_all,
        dHcheck0=dHcheck0,
        Hcheck0=np.cumsum(dHcheck0),
        Scheck=Scheck,
        free_check0=free_check0,
        tau=tau,
        tau_index=tau_index,
        J_closed=J_closed,
        in_J=in_J,
    )
    if not world.full:
        return WorldFunctionals(**common)

    joint = world.joint
    m = world.m
    dF = joint.sum(axis=2)
    dF_all = dF.sum(axis=1)
    S = tail_sum(dF_all)
    S_left = S + dF_all
    dH = safe_div(dF, S_left[:, None])

    c_law = joint.sum(axis=(0, 1))
    dG = c_law[:m]
    p_c_inf = float(c_law[m])
    K = tail_sum(dG) + p_c_inf
    K_left = K + dG
    dH0 = safe_div(dG, K_left)

    # B(t) = sum_{s < t} dFt_0(s) / S(s)
    B_terms = safe_div(dFt[:, 0], S)
    B = np.concatenate(([0.0], np.cumsum(B_terms)[:-1]))

    # a_j(t) = P(T = t, D = j, C >= t) / P(T = t, D = j)
    i = np.arange(m)[:, None]
    k = np.arange(m + 1)[None, :]
    seen = (joint * (k >= i)[:, None, :]).sum(axis=2)
    a = np.where(dF > 0, safe_div(seen, dF), np.nan)

    return WorldFunctionals(
        **common,
        S=S,
        S_left=S_left,
        dF=dF,
        F=np.cumsum(dF, axis=0),
        dH=dH,
        H=np.cumsum(dH, axis=0),
        dH_all=dH.sum(axis=1),
        K=K,
        K_left=K_left,
        dG=dG,
        G=np.cumsum(dG),
        dH0=dH0,
        H0=np.cumsum(dH0),
        p_c_inf=p_c_inf,
        B=B,
        a=a,
        obs_given_at_risk=safe_div(St_left, S_left),
    )


def prodint_reconstruct(f: WorldFunctionals, t: float) -> np.ndarray:
    """``prod_0^t (I + H~(ds))`` built from the observed hazards."""
    J_end = f.tau
    if t < 0 or t > J_end or (t == J_end and not f.J_closed):
        raise OutsideJ(f"t={t!r} is outside J (tau={J_end!r}, closed={f.J_closed})")
    return prodint_matrix(f.observed_hazard_matrix(), 0.0, t)


# ---------------------------------------------------------------------------
# JSON world specs


def _parse_prob(p, where):
    if isinstance(p, dict):
        try:
            return float(Fraction(int(p["num"]), int(p["den"])))
        except (KeyError, ValueError, ZeroDivisionError, TypeError) as exc:
            raise WorldSpecError(f"{where}: bad rational probability {p!r}") from exc
    if isinstance(p, bool) or not isinstance(p, (int, float)):
        raise WorldSpecError(f"{where}: probability must be a number, got {p!r}")
    return float(p)


def parse_world(spec) -> DiscreteWorld:
    """Parse a world spec (a dict or a JSON string)."""
    if isinstance(spec, (str, bytes)):
        spec = json.loads(spec)
    if not isinstance(spec, dict):
        raise WorldSpecError("world spec must be a JSON object")
    try:
        d = spec["d"]
        grid = spec["grid"]
        raw_atoms = spec["atoms"]
    except KeyError as exc:
        raise WorldSpecError(f"missing key {exc.args[0]!r}") from None
    if isinstance(d, bool) or not isinstance(d, int):
        raise WorldSpecError("d must be an integer")
    if not isinstance(grid, list) or not all(isinstance(g, (int, float)) and not isinstance(g, bool) for g in grid):
        raise WorldSpecError("grid must be a list of numbers")
    if not isinstance(raw_atoms, list) or not raw_atoms:
        raise WorldSpecError("atoms must be a nonempty list")
    on_grid = {float(g) for g in grid}
    observed_only = None
    atoms = []
    for n, atom in enumerate(raw_atoms):
        where = f"atoms[{n}]"
        if not isinstance(atom, dict):
            raise WorldSpecError(f"{where}: atom must be an object")
        try:
            t, j = atom["t"], atom["d"]
        except KeyError as exc:
            raise WorldSpecError(f"{where}: missing key {exc.args[0]!r}") from None
        c = atom.get("c")
        p = _parse_prob(atom.get("p"), where)
        this_observed = c is None
        if observed_only is None:
            observed_only = this_observed
        elif observed_only != this_observed:
            raise WorldSpecError(f"{where}: cannot mix observed-only and full atoms")
        if isinstance(j, bool) or not isinstance(j, int):
            raise WorldSpecError(f"{where}: type must be an integer")
        if isinstance(t, bool) or not isinstance(t, (int, float)) or float(t) not in on_grid:
            raise WorldSpecError(f"{where}: time {t!r} is not on the grid")
        if isinstance(c, (int, float)) and not isinstance(c, bool) and float(c) not in on_grid:
            raise WorldSpecError(f"{where}: censoring time {c!r} is not on the grid")
        low = 0 if this_observed else 1
        if isinstance(d, int) and not low <= j <= d:
            raise WorldSpecError(f"{where}: type {j} outside {low}..{d}")
        if this_observed:
            atoms.append((t, j, p))
        else:
            if c == "inf":
                c = float("inf")
            elif isinstance(c, bool) or not isinstance(c, (int, float)):
                raise WorldSpecError(f"{where}: c must be a number, \"inf\" or null")
            atoms.append((t, j, c, p))
    try:
        return DiscreteWorld.from_atoms(d, grid, atoms)
    except WorldSpecError:
        raise
    except (TypeError, ValueError) as exc:
        raise WorldSpecError(str(exc)) from exc


def world_to_spec(world: DiscreteWorld) -> dict:
    """Canonical dict form: sorted nonzero atoms, duplicates fused."""
    atoms = []
    for atom in world.atoms():
        if world.full:
            t, j, c, p = atom
            atoms.append({"t": t, "d": j, "c": "inf" if np.isinf(c) else c, "p": p})
        else:
            t, k, p = atom
            atoms.append({"t": t, "d": k, "c": None, "p": p})
    return {"d": world.d, "grid": world.grid.tolist(), "atoms": atoms}


def dump_world(world: DiscreteWorld, **kwargs) -> str:
    kwargs.setdefault("indent", 1)
    return json.dumps(world_to_spec(world), **kwargs) + "\n"


def load_world(path) -> DiscreteWorld:
    with open(path, encoding="utf-8") as fh:
        return parse_world(fh.read())


def world_hash(world: DiscreteWorld) -> str:
    canon = json.dumps(world_to_spec(world), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()
