"""The unit-square example, the assumption table, heat maps and Monte Carlo consistency runs.

The example lives on ``[0, 1]^2`` with the uniform law. Each axis is cut into
``n`` cells and cell ``(i, k)`` (1-based, ``i`` along t and ``k`` along c)
carries probability ``1/n^2``. Every variable maps a cell to an index on the
grid ``{1/n, ..., 1}``:

* ``T1 = i`` and ``C1 = k``.
* ``T2 = n + 1 - k`` on ``i > n/2, k <= n/2`` and ``i`` elsewhere.
* ``C2 = n + 1 - i`` on ``i <= n/2, k > n/2`` and ``k`` elsewhere.
* ``C3 = k`` if ``k < i`` and ``n`` (the value 1) otherwise.

Case boundaries are decided on cell indices, which is the same as testing the
cell midpoints. The reflections ``1 - c`` and ``1 - t`` become
``n + 1 - index`` so the discrete T2 and C2 stay exactly uniform and all six
pairs induce one observed law.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass

import numpy as np

from .estim import aalen_johansen, sample_world
from .model import DiscreteWorld, WorldFunctionals, derive
from .prodint import prodint_path
from .props import DEFAULT_TOL, check_all, check_identity_of_forces

__all__ = [
    "BadResolution",
    "ExampleSpec",
    "EVENT_VARS",
    "CENSOR_VARS",
    "PAIRS",
    "TABLE1_ROWS",
    "TABLE1_EXPECTED",
    "Table1Result",
    "variable_indices",
    "build_example_world",
    "reproduce_table1",
    "table1_csv",
    "emit_heatmaps",
    "anchor_probabilities",
    "WORLD_KINDS",
    "random_world",
    "dependent_counterexample",
    "ConsistencyRow",
    "consistency_experiment",
    "consistency_csv",
]

EVENT_VARS = ("T1", "T2")
CENSOR_VARS = ("C1", "C2", "C3")
PAIRS = tuple((t, c) for t in EVENT_VARS for c in CENSOR_VARS)

TABLE1_ROWS = (
    "identifiability",
    "representativity",
    "cens_identifiability",
    "cens_representativity",
    "pointwise_independence",
    "full_independence",
)

# rows as above, columns in PAIRS order
TABLE1_EXPECTED = np.array(
    [
        [1, 1, 1, 1, 1, 1],
        [1, 1, 1, 0, 0, 0],
        [1, 1, 0, 1, 1, 0],
        [1, 0, 0, 1, 0, 0],
        [1, 1, 0, 1, 1, 0],
        [1, 0, 0, 0, 0, 0],
    ],
    dtype=bool,
)


class BadResolution(ValueError):
    """Grid resolution must be an even integer of at least 4."""


@dataclass(frozen=True)
class ExampleSpec:
    n: int
    event: str = "T1"
    censor: str = "C1"

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 4 or self.n % 2:
            raise BadResolution(f"n must be an even integer >= 4, got {self.n!r}")
        if self.event not in EVENT_VARS:
            raise ValueError(f"event variable must be one of {EVENT_VARS}")
        if self.censor not in CENSOR_VARS:
            raise ValueError(f"censoring variable must be one of {CENSOR_VARS}")

    @classmethod
    def parse(cls, pair: str, n: int) -> "ExampleSpec":
        """``"T2C1"`` style pair names."""
        pair = pair.upper().replace(",", "").replace("(", "").replace(")", "")
        if len(pair) != 4:
            raise ValueError(f"bad pair {pair!r}; expected e.g. T2C1")
        return cls(n, pair[:2], pair[2:])


def variable_indices(name: str, n: int) -> np.ndarray:
    """Grid index (1..n) of a variable on every cell; rows are t cells, columns c cells."""
    if n < 4 or n % 2:
        raise BadResolution(f"n must be an even integer >= 4, got {n!r}")
    i, k = np.meshgrid(np.arange(1, n + 1), np.arange(1, n + 1), indexing="ij")
    half = n // 2
    if name == "T1":
        return i
    if name == "C1":
        return k
    if name == "T2":
        return np.where((i > half) & (k <= half), n + 1 - k, i)
    if name == "C2":
        return np.where((i <= half) & (k > half), n + 1 - i, k)
    if name == "C3":
        return np.where(k < i, k, n)
    if name == "Tobs":
        return np.minimum(i, k)
    raise ValueError(f"unknown variable {name!r}")


def build_example_world(spec: ExampleSpec) -> DiscreteWorld:
    n = spec.n
    t = variable_indices(spec.event, n) - 1
    c = variable_indices(spec.censor, n) - 1
    joint = np.zeros((n, 1, n + 1))
    np.add.at(joint, (t.ravel(), 0, c.ravel()), 1.0 / n**2)
    return DiscreteWorld(1, np.arange(1, n + 1) / n, joint=joint)


@dataclass(frozen=True, eq=False)
class Table1Result:
    n: int
    holds: np.ndarray
    defects: np.ndarray
    reports: dict

    @property
    def matches(self) -> bool:
        return bool(np.array_equal(self.holds, TABLE1_EXPECTED))


def reproduce_table1(n: int = 8, tol: float = DEFAULT_TOL) -> Table1Result:
    holds = np.zeros((len(TABLE1_ROWS), len(PAIRS)), dtype=bool)
    defects = np.zeros(holds.shape)
    reports = {}
    for col, (ev, ce) in enumerate(PAIRS):
        rep = check_all(derive(build_example_world(ExampleSpec(n, ev, ce))), tol)
        reports[ev + ce] = rep
        for row, fam in enumerate(TABLE1_ROWS):
            holds[row, col] = rep.holds(fam)
            defects[row, col] = rep.defect(fam)
    return Table1Result(n, holds, defects, reports)


def table1_csv(result: Table1Result) -> str:
    """One row per assumption; each pair gets a 0/1 column and a defect column."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["assumption"]
    for ev, ce in PAIRS:
        header += [f"{ev}{ce}", f"{ev}{ce}_defect"]
    w.writerow(header)
    for row, fam in enumerate(TABLE1_ROWS):
        line = [fam]
        for col in range(len(PAIRS)):
            line += [int(result.holds[row, col]), repr(float(result.defects[row, col]))]
        w.writerow(line)
    return buf.getvalue()


HEATMAP_VARS = ("T1", "T2", "C1", "C2", "C3", "Tobs")


def emit_heatmaps(spec: ExampleSpec, outdir, pgm: bool = False) -> list:
    """Write value grids ``heatmap_<var>.csv`` (rows t cells, columns c cells).

    With ``pgm`` an 8-bit greyscale image is written next to each CSV, with
    the c axis pointing up as in the usual plot orientation.
    """
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for name in HEATMAP_VARS:
        values = variable_indices(name, spec.n) / spec.n
        path = os.path.join(outdir, f"heatmap_{name}.csv")
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            for row in values:
                w.writerow([repr(float(v)) for v in row])
        paths.append(path)
        if pgm:
            img = np.round(255 * values.T[::-1]).astype(np.uint8)
            ppath = os.path.join(outdir, f"heatmap_{name}.pgm")
            with open(ppath, "wb") as fh:
                fh.write(f"P5\n{spec.n} {spec.n}\n255\n".encode())
                fh.write(img.tobytes())
            paths.append(ppath)
    return paths


def anchor_probabilities(n: int, s: float = 0.25) -> tuple:
    """Grid analogs of ``P(T2 <= 1-s | T~=s, D~=0)`` and ``P(T2 <= 1-s | T2 > s)``.

    ``s`` must be a grid point below one half. The threshold ``1 - s`` maps to
    the reflected index ``n + 1 - k`` used by T2.
    """
    k = int(round(s * n))
    if k < 1 or k > n // 2 or abs(k / n - s) > 1e-12:
        raise ValueError(f"s={s!r} is not a grid point below 1/2 for n={n}")
    T = variable_indices("T2", n)
    Tobs = variable_indices("Tobs", n)
    censored = variable_indices("T1", n) > variable_indices("C1", n)
    thr = n + 1 - k
    given_cens = (Tobs == k) & censored
    p_cens = np.mean(T[given_cens] <= thr)
    alive = T > k
    p_surv = np.mean(T[alive] <= thr)
    return float(p_cens), float(p_surv)


# random worlds


def _sparse(rng, d, m, density=0.4):
    j = rng.random((m, d, m + 1)) * (rng.random((m, d, m + 1)) < density)
    if j.sum() == 0:
        j[rng.integers(m), rng.integers(d), rng.integers(m + 1)] = 1.0
    return j


def _product(rng, d, m):
    td = rng.random((m, d)) * (rng.random((m, d)) < 0.6)
    if td.sum() == 0:
        td[rng.integers(m), rng.integers(d)] = 1.0
    c = rng.random(m + 1) * (rng.random(m + 1) < 0.6)
    if c.sum() == 0:
        c[-1] = 1.0
    return td[:, :, None] * c[None, None, :]


def _swap(rng, joint, pick, rounds=6):
    # move mass between two cell pairs so that chosen marginals stay fixed
    joint = joint / joint.sum()
    for _ in range(rounds):
        nz = np.argwhere(joint > 0)
        if len(nz) < 2:
            break
        a, b = nz[rng.choice(len(nz), 2, replace=False)]
        res = pick(a, b)
        if res is None:
            continue
        eps = min(joint[tuple(a)], joint[tuple(b)]) * rng.random()
        joint[tuple(a)] -= eps
        joint[tuple(b)] -= eps
        joint[tuple(res[0])] += eps
        joint[tuple(res[1])] += eps
    return np.maximum(joint, 0.0)


def _pick_td(a, b):
    (ta, da, ca), (tb, db, cb) = a, b
    if ca < ta and cb < tb and ca < tb and cb < ta and (ta, da) != (tb, db):
        return (tb, db, ca), (ta, da, cb)
    return None


def _pick_c(a, b):
    (ta, da, ca), (tb, db, cb) = a, b
    if ta <= ca and tb <= cb and ta <= cb and tb <= ca and ca != cb:
        return (ta, da, cb), (tb, db, ca)
    return None


def _swap_td(rng, d, m):
    # (T, D) traded between censored cells: marginals and observed law fixed
    return _swap(rng, _product(rng, d, m), _pick_td)


def _swap_c(rng, d, m):
    # C traded between uncensored cells: marginals and observed law fixed
    return _swap(rng, _product(rng, d, m), _pick_c)


def _mixed(rng, d, m):
    return _swap(rng, _swap_c(rng, d, m), _pick_td)


def _move_c(rng, d, m):
    # unseen C above T moved around: the law of (T, D, T~, D~) is unchanged
    joint = _product(rng, d, m)
    out = joint.copy()
    for t, j, c in np.argwhere(joint > 0):
        if c >= t and rng.random() < 0.5:
            share = rng.random() * joint[t, j, c]
            out[t, j, c] -= share
            out[t, j, rng.integers(t, m + 1)] += share
    return np.maximum(out, 0.0)


WORLD_KINDS = {
    "sparse": _sparse,
    "product": _product,
    "swap_td": _swap_td,
    "swap_c": _swap_c,
    "mixed": _mixed,
    "move_c": _move_c,
}


def random_world(rng, kind: str = "sparse", d=None, m=None, observed_only: bool = False) -> DiscreteWorld:
    """Random full world from one of :data:`WORLD_KINDS` on the grid ``1..m``.

    ``d`` defaults to 1..3 and ``m`` to 1..8. With ``observed_only`` the
    induced observed law is returned instead.
    """
    d = int(rng.integers(1, 4)) if d is None else int(d)
    m = int(rng.integers(1, 9)) if m is None else int(m)
    joint = WORLD_KINDS[kind](rng, d, m)
    joint = joint / joint.sum()
    world = DiscreteWorld(d, np.arange(1, m + 1, dtype=float), joint=joint)
    if observed_only:
        return DiscreteWorld(d, world.grid, observed=world.observed)
    return world


def dependent_counterexample() -> DiscreteWorld:
    """Three atoms where early censoring singles out late events.

    Observed hazards give ``H~_1(2) = 4/7`` while ``H_1(2) = 0.4``, so the
    product-integral limit ``3/7`` misses ``S(2) = 0.6``.
    """
    return DiscreteWorld.from_atoms(
        1,
        [1.0, 2.0, 3.0],
        [(2.0, 1, np.inf, 0.4), (3.0, 1, 1.0, 0.3), (3.0, 1, np.inf, 0.3)],
    )


# consistency


@dataclass(frozen=True)
class ConsistencyRow:
    world: str
    n: int
    seed: int
    sup_error_S: float
    sup_error_P: float
    target: str
    sup_gap_truth_P: float | None


def _targets(f: WorldFunctionals):
    """Row 1 of the product integral of the observed hazards at every grid point."""
    _, P = prodint_path(f.observed_hazard_matrix(), 0.0)
    return P[:, 0, :]


def consistency_experiment(world: DiscreteWorld, n_values, seeds, name: str = "world") -> list:
    """Sup-norm errors of Kaplan-Meier and Aalen-Johansen over grid points in J.

    Errors are measured against the true ``(S, F_j)`` when identity of forces
    holds and against the limit ``prod (I + dH~)`` otherwise (also when only the
    observed law is known). ``sup_gap_truth_P`` always records the distance to
    the truth when the truth is available.
    """
    f = derive(world)
    limit = _targets(f)
    truth = None
    target = "limit"
    if f.full:
        truth = f.transition_row()
        if check_identity_of_forces(f).value <= DEFAULT_TOL:
            target = "truth"
    ref = truth if target == "truth" else limit
    rows = []
    for n in n_values:
        for seed in seeds:
            path = aalen_johansen(sample_world(world, int(n), seed=int(seed)))
            keep = f.in_J & (f.grid <= path.times[-1])
            est = np.array([path.row(t) for t in f.grid])
            err_P = np.abs(est - ref)[keep].max(initial=0.0)
            err_S = np.abs(est[:, 0] - ref[:, 0])[keep].max(initial=0.0)
            gap = None if truth is None else float(np.abs(est - truth)[keep].max(initial=0.0))
            rows.append(ConsistencyRow(name, int(n), int(seed), float(err_S), float(err_P), target, gap))
    return rows


def consistency_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["world", "n", "seed", "sup_error_S", "sup_error_P"])
    for r in rows:
        w.writerow([r.world, r.n, r.seed, repr(r.sup_error_S), repr(r.sup_error_P)])
    return buf.getvalue()
