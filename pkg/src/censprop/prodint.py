"""Product integrals of pure-jump integrators.

For an atomic integrator the product integral is the finite, time-ordered
product of its jump factors, so everything here is exact up to float rounding.
The competing-risks hazard matrix has a single nonzero row, which is stored as
``d`` cause-specific increment columns rather than as full matrices.
"""

from __future__ import annotations

import numpy as np

from .stepfn import AtomicMeasure

__all__ = [
    "MassExceedsOne",
    "HazardMatrix",
    "prodint_scalar",
    "prodint_matrix",
    "prodint_path",
    "forward_solve",
    "duhamel_defect",
    "combine_hazards",
    "increments_from_path",
]

_SLACK = 1e-12


class MassExceedsOne(ValueError):
    """A hazard increment larger than one would make a factor negative."""


def _check_masses(masses):
    if masses.size and masses.max() > 1.0 + _SLACK:
        raise MassExceedsOne(f"hazard increment {masses.max()!r} exceeds 1")


class HazardMatrix:
    """Cumulative hazard matrix path of a competing-risks model.

    Each atom ``t`` carries a vector of cause-specific increments
    ``(dH_1, ..., dH_d)``; the matrix increment has first row
    ``(-sum_j dH_j, dH_1, ..., dH_d)`` and zeros elsewhere. Rows with equal
    times are fused by summation.
    """

    __slots__ = ("times", "increments")

    def __init__(self, times, increments):
        times = np.asarray(times, dtype=float).ravel()
        inc = np.asarray(increments, dtype=float)
        if inc.ndim == 1:
            inc = inc[:, None]
        if inc.shape[0] != times.size:
            raise ValueError("one increment row per atom time is required")
        if np.any(inc < 0):
            raise ValueError("cause-specific increments must be nonnegative")
        uniq, inv = np.unique(times, return_inverse=True)
        fused = np.zeros((uniq.size, inc.shape[1]))
        np.add.at(fused, inv, inc)
        _check_masses(fused.sum(axis=1))
        self.times = uniq
        self.increments = fused

    @property
    def d(self) -> int:
        return self.increments.shape[1]

    @classmethod
    def from_measures(cls, measures) -> "HazardMatrix":
        """Build from ``d`` per-cause AtomicMeasures (grids may differ)."""
        measures = list(measures)
        times = np.unique(np.concatenate([m.times for m in measures] + [np.empty(0)]))
        inc = np.zeros((times.size, len(measures)))
        for j, m in enumerate(measures):
            inc[np.searchsorted(times, m.times), j] = m.masses
        return cls(times, inc)

    def all_cause(self) -> AtomicMeasure:
        return AtomicMeasure(self.times, self.increments.sum(axis=1))

    def factor(self, k: int) -> np.ndarray:
        """The matrix ``I + dH`` at the k-th atom."""
        d = self.d
        m = np.eye(d + 1)
        m[0, 0] -= self.increments[k].sum()
        m[0, 1:] += self.increments[k]
        return m


def prodint_scalar(h: AtomicMeasure, s: float = 0.0, t: float = np.inf) -> float:
    """``prod_{u in (s,t]} (1 - dh(u))``; the empty product is 1."""
    w = h.restrict(s, t)
    _check_masses(w.masses)
    return float(np.prod(1.0 - w.masses))


def prodint_matrix(H: HazardMatrix, s: float = 0.0, t: float = np.inf) -> np.ndarray:
    """Time-ordered product of ``I + dH(u)`` over atoms ``u in (s, t]``."""
    out = np.eye(H.d + 1)
    for k in np.flatnonzero((H.times > s) & (H.times <= t)):
        out = out @ H.factor(k)
    return out


def prodint_path(H: HazardMatrix, s: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Product integrals from ``s`` to every atom after ``s``.

    Returns ``(times, P)`` with ``P[k]`` the matrix on ``(s, times[k]]``.
    """
    sel = np.flatnonzero(H.times > s)
    out = np.empty((sel.size, H.d + 1, H.d + 1))
    cur = np.eye(H.d + 1)
    for n, k in enumerate(sel):
        cur = cur @ H.factor(k)
        out[n] = cur
    return H.times[sel], out


def forward_solve(H: HazardMatrix, s: float, horizon: float) -> np.ndarray:
    """Solve the forward equation ``B(s,t) - I = int_s^t B(s,u-) H(du)``.

    Only the first row is nontrivial; its cause entries accumulate
    ``beta_11(s,u-) dH_j(u)`` and ``beta_11 = 1 - sum_j beta_1j``. This is a
    scalar recursion, independent of the matrix products in
    :func:`prodint_matrix`.
    """
    d = H.d
    cause = np.zeros(d)
    stay = 1.0
    for u, inc in zip(H.times, H.increments):
        if u <= s or u > horizon:
            continue
        if inc.sum() > 1.0 + _SLACK:
            raise MassExceedsOne(f"hazard increment {inc.sum()!r} exceeds 1")
        cause = cause + stay * inc
        stay = 1.0 - cause.sum()
    out = np.eye(d + 1)
    out[0, 0] = stay
    out[0, 1:] = cause
    return out


def duhamel_defect(A: AtomicMeasure, B: AtomicMeasure, s: float = 0.0, t: float = np.inf) -> float:
    """Residual of the Duhamel equation for two scalar hazards on ``(s, t]``.

    Compares ``prod(1-dA) - prod(1-dB)`` with
    ``sum_u prod_{(u,t]}(1-dA) (dB - dA)(u) prod_{(s,u)}(1-dB)``.
    """
    a = A.restrict(s, t)
    b = B.restrict(s, t)
    _check_masses(a.masses)
    _check_masses(b.masses)
    lhs = float(np.prod(1.0 - a.masses) - np.prod(1.0 - b.masses))
    rhs = 0.0
    for u in np.union1d(a.times, b.times):
        after = prodint_scalar(a, u, t)
        before = float(np.prod(1.0 - b.masses[b.times < u]))
        rhs += after * (b.mass_at(u) - a.mass_at(u)) * before
    return abs(lhs - rhs)


def combine_hazards(a: AtomicMeasure, b: AtomicMeasure) -> AtomicMeasure:
    """Hazard of the minimum of two independent exits at shared atoms.

    Increments combine as ``da + db - da*db`` so that
    ``1 - d(a+b) = (1 - da)(1 - db)`` atom by atom.
    """
    times = np.union1d(a.times, b.times)
    da = np.array([a.mass_at(u) for u in times])
    db = np.array([b.mass_at(u) for u in times])
    return AtomicMeasure(times, da + db - da * db)


def increments_from_path(times, P) -> np.ndarray:
    """Recover cause increments from successive product-integral values.

    ``P[k]`` is the product integral up to ``times[k]``. Where the survival
    entry of the previous matrix is positive, the increment at ``times[k]`` is
    the change in the cause entries divided by that survival entry. Entries
    after survival has hit zero are not identifiable and are returned as NaN.
    """
    P = np.asarray(P)
    prev = np.eye(P.shape[1])
    out = np.full((len(times), P.shape[1] - 1), np.nan)
    for k in range(len(times)):
        surv = prev[0, 0]
        if surv > 0:
            out[k] = (P[k, 0, 1:] - prev[0, 1:]) / surv
        prev = P[k]
    return out
