"""Checkers for the censoring assumptions and the appendix identities.

Each checker evaluates one formulation of one assumption directly from its own
defining formula and returns the worst absolute defect over the relevant grid
points together with a witness. Equivalences between formulations are never
used to shortcut a checker; the test suite asserts them instead.

Martingale properties are checked exactly on generator events of the
filtration (a pi-system), which is enough to pin down the conditional
expectations on a finite grid.

"Almost all t" quantifiers range over grid points where the relevant
measure has positive mass, restricted to the identifiable region J.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import WorldFunctionals, safe_div

__all__ = [
    "DEFAULT_TOL",
    "BadEvent",
    "Defect",
    "PropertyResult",
    "AssumptionReport",
    "FAMILIES",
    "check_identity_of_forces",
    "martingale_defect_weak",
    "check_weak_martingale",
    "check_status_independent_observation",
    "check_constant_sum",
    "martingale_defect_strong",
    "check_strong_martingale",
    "check_non_prognostic_observation",
    "check_non_prognostic_censoring",
    "check_independent_C_exists",
    "check_cens_identifiability",
    "check_pointwise_independence",
    "check_cens_representativity",
    "check_full_independence",
    "validate_appendix_identities",
    "check_all",
]

DEFAULT_TOL = 1e-9


class BadEvent(ValueError):
    """Generator event is not measurable at the conditioning time."""


@dataclass(frozen=True)
class Defect:
    value: float
    witness: dict = field(default_factory=dict)

    def __float__(self):
        return self.value


_NONE = Defect(0.0, {})


def _worst(defects: np.ndarray, labels) -> Defect:
    """Largest |defect| with a witness built from the argmax index.

    ``labels`` maps an index tuple of ``defects`` to a witness dict.
    """
    defects = np.abs(np.nan_to_num(np.asarray(defects, dtype=float)))
    if defects.size == 0:
        return _NONE
    idx = np.unravel_index(int(np.argmax(defects)), defects.shape)
    value = float(defects[idx])
    if value == 0.0:
        return Defect(0.0, {})
    w = labels(*[int(x) for x in idx])
    w["defect"] = value
    return Defect(value, w)


def _max(*defects: Defect) -> Defect:
    return max(defects, key=lambda x: x.value)


@dataclass(frozen=True)
class _Atoms:
    """Flat table of the nonzero full-world atoms."""

    ti: np.ndarray  # event time index
    tj: np.ndarray  # event type, 1..d
    tc: np.ndarray  # censoring index, m for inf
    tt: np.ndarray  # observed time index
    dt: np.ndarray  # observed type, 0..d
    p: np.ndarray


def _atoms(f: WorldFunctionals) -> _Atoms:
    f.require_full()
    joint = f.world.joint
    ti, tj, tc = np.nonzero(joint)
    p = joint[ti, tj, tc]
    seen = ti <= tc
    tt = np.where(seen, ti, tc)
    dt = np.where(seen, tj + 1, 0)
    return _Atoms(ti, tj + 1, tc, tt, dt, p)


def _t(f, i):
    return float(f.grid[i])


def _col_time(f, c):
    """Column ``c`` of a 0-prefixed time axis: 0 -> time 0, c -> grid[c-1]."""
    return 0.0 if c == 0 else float(f.grid[c - 1])


# ---------------------------------------------------------------------------
# identifiability (no given censoring time needed)


def check_identity_of_forces(f: WorldFunctionals) -> Defect:
    """sup over j and t in J of |H~_j(t) - H_j(t)|."""
    f.require_full()
    diff = (f.Ht[:, 1:] - f.H) * f.in_J[:, None]
    return _worst(diff, lambda i, j: {"t": _t(f, i), "j": j + 1})


def _weak_paths(f: WorldFunctionals, j: int, compensator: str = "event"):
    """Observed atoms and their compensated counting-process paths.

    Returns ``(ti, k, p, M)`` where ``M[a, c]`` is the process for atom ``a``
    at column ``c`` of the 0-prefixed time axis.
    """
    ti, k = np.nonzero(f.dFt)
    p = f.dFt[ti, k]
    m = f.world.m
    cols = np.arange(m + 1)  # col c -> grid index c - 1
    g = cols[None, :] - 1
    a_t = ti[:, None]
    jumps = ((a_t <= g) & (k[:, None] == j)).astype(float)
    if compensator == "event":
        cum = np.concatenate(([0.0], np.cumsum(f.dH[:, j - 1])))
        # sum_{g <= t, g <= t~} dH_j(g)
        comp = cum[np.minimum(cols[None, :], a_t + 1)]
    else:
        dH0 = f.dH0
        cum = np.concatenate(([0.0], np.cumsum(dH0)))
        strict = cum[np.minimum(cols[None, :], a_t)]  # g < t~ and g <= t
        at_exit = np.where((k[:, None] == 0) & (a_t <= g), dH0[ti][:, None], 0.0)
        comp = strict + at_exit
    return ti, k, p, jumps - comp


def _observed_events(f: WorldFunctionals):
    """Generator events of the observed filtration.

    Yields ``(label, u_col, indicator)``: ``{T~ > u}`` and
    ``{T~ <= u, D~ = k}`` for u on the 0-prefixed axis.
    """
    ti, kk = np.nonzero(f.dFt)
    m, d = f.world.m, f.d
    for u in range(m + 1):
        yield ("gt", u, None), u, (ti + 1 > u)
        if u == 0:
            continue
        for k in range(d + 1):
            yield ("le", u, k), u, (ti + 1 <= u) & (kk == k)


def _event_label(f, ev):
    if ev[0] == "gt":
        return f"T~>{_col_time(f, ev[1])}"
    return f"T~<={_col_time(f, ev[1])},D~={ev[2]}"


def _scan_events(f, W, events, name):
    """Worst |W[e, t] - W[e, s]| over t > s >= u_e."""
    best = _NONE
    ncol = W.shape[1]
    s_idx = np.arange(ncol)
    for e, (ev, u) in enumerate(events):
        inc = W[e][None, :] - W[e][:, None]  # inc[s, t]
        valid = (s_idx[:, None] >= u) & (s_idx[None, :] > s_idx[:, None])
        inc = np.where(valid, np.abs(inc), 0.0)
        if inc.max() > best.value:
            s, t = np.unravel_index(int(np.argmax(inc)), inc.shape)
            best = Defect(
                float(inc[s, t]),
                {"event": name(f, ev), "s": _col_time(f, s), "t": _col_time(f, t), "defect": float(inc[s, t])},
            )
    return best


def martingale_defect_weak(f: WorldFunctionals, j: int, s: float, t: float, event) -> float:
    """Exact ``E[(M_j(t) - M_j(s)) 1_A]`` for the observed-filtration martingale.

    ``event`` is ``("gt", u)`` for ``{T~ > u}`` or ``("le", u, k)`` for
    ``{T~ <= u, D~ = k}``; ``u <= s`` is required. ``M_j`` compensates the
    observed counting process with the at-risk indicator and the underlying
    hazard ``H_j``.
    """
    f.require_full("the weak martingale property")
    return _martingale_defect_observed(f, j, s, t, event, "event")


def _martingale_defect_observed(f, j, s, t, event, compensator):
    u = event[1]
    if u > s:
        raise BadEvent(f"event time {u!r} is after s={s!r}")
    ti, k, p, M = _weak_paths(f, j, compensator)
    times = np.concatenate(([0.0], f.grid))
    obs_t = f.grid[ti]
    if event[0] == "gt":
        ind = obs_t > u
    elif event[0] == "le":
        ind = (obs_t <= u) & (k == event[2])
    else:
        raise BadEvent(f"unknown event kind {event[0]!r}")
    cs = int(np.searchsorted(times, s, side="right") - 1)
    ct = int(np.searchsorted(times, t, side="right") - 1)
    return float(np.sum(p * ind * (M[:, ct] - M[:, cs])))


def check_weak_martingale(f: WorldFunctionals) -> Defect:
    """Worst generator-event defect of the weak martingale property."""
    f.require_full()
    return _check_observed_martingale(f, range(1, f.d + 1), "event")


def _check_observed_martingale(f, types, compensator):
    events = list(_observed_events(f))
    E = np.array([ind for _, _, ind in events], dtype=float)
    meta = [(ev, u) for ev, u, _ in events]
    best = _NONE
    for j in types:
        ti, k, p, M = _weak_paths(f, j, compensator)
        W = (E * p[None, :]) @ M
        res = _scan_events(f, W, meta, _event_label)
        if res.value > best.value:
            best = Defect(res.value, {"j": j, **res.witness})
    return best


def check_status_independent_observation(f: WorldFunctionals) -> Defect:
    """|a_j(t) - P(T~ >= t | T >= t)| over F_j-atoms in J."""
    f.require_full()
    mask = (f.dF > 0) & f.in_J[:, None]
    diff = np.where(mask, f.a - f.obs_given_at_risk[:, None], 0.0)
    return _worst(diff, lambda i, j: {"t": _t(f, i), "j": j + 1})


def check_constant_sum(f: WorldFunctionals) -> Defect:
    """|a_j(t) + B(t) - 1| over F_j-atoms in J."""
    f.require_full()
    mask = (f.dF > 0) & f.in_J[:, None]
    diff = np.where(mask, f.a + f.B[:, None] - 1.0, 0.0)
    return _worst(diff, lambda i, j: {"t": _t(f, i), "j": j + 1})


# ---------------------------------------------------------------------------
# representativity


def _strong_events(f: WorldFunctionals, at: _Atoms):
    """Generators of the enlarged filtration, on the 0-prefixed time axis.

    ``{T > t', T~ > s'}`` for s' <= t' and ``{T <= s', D = k, T~ > u'}``.
    Yields ``(label, measurable_col, indicator)``.
    """
    m, d = f.world.m, f.d
    T = at.ti + 1
    Tt = at.tt + 1
    for tp in range(m + 1):
        for sp in range(tp + 1):
            yield ("surv", tp, sp), tp, (T > tp) & (Tt > sp)
    for sp in range(1, m + 1):
        for up in range(m + 1):
            for k in range(1, d + 1):
                yield ("dead", sp, up, k), max(sp, up), (T <= sp) & (at.tj == k) & (Tt > up)


def _strong_label(f, ev):
    if ev[0] == "surv":
        return f"T>{_col_time(f, ev[1])},T~>{_col_time(f, ev[2])}"
    return f"T<={_col_time(f, ev[1])},D={ev[3]},T~>{_col_time(f, ev[2])}"


def _strong_paths(f: WorldFunctionals, at: _Atoms, j: int):
    m = f.world.m
    cols = np.arange(m + 1)
    T = at.ti[:, None] + 1
    jumps = ((T <= cols[None, :]) & (at.tj[:, None] == j)).astype(float)
    cum = np.concatenate(([0.0], np.cumsum(f.dH[:, j - 1])))
    comp = cum[np.minimum(cols[None, :], T)]
    return jumps - comp


def martingale_defect_strong(f: WorldFunctionals, j: int, s: float, t: float, event) -> float:
    """Exact ``E[(M_j(t) - M_j(s)) 1_A]`` for the underlying counting process.

    ``event`` is ``("surv", t', s')`` for ``{T > t', T~ > s'}`` with
    ``s' <= t' <= s``, or ``("dead", s', u', k)`` for
    ``{T <= s', D = k, T~ > u'}`` with ``s', u' <= s``.
    """
    at = _atoms(f)
    if event[0] == "surv":
        _, tp, sp = event
        if not (sp <= tp <= s):
            raise BadEvent(f"need s' <= t' <= s, got {event!r} with s={s!r}")
        ind = (f.grid[at.ti] > tp) & (f.grid[at.tt] > sp)
    elif event[0] == "dead":
        _, sp, up, k = event
        if sp > s or up > s:
            raise BadEvent(f"need s', u' <= s, got {event!r} with s={s!r}")
        ind = (f.grid[at.ti] <= sp) & (at.tj == k) & (f.grid[at.tt] > up)
    else:
        raise BadEvent(f"unknown event kind {event[0]!r}")
    M = _strong_paths(f, at, j)
    times = np.concatenate(([0.0], f.grid))
    cs = int(np.searchsorted(times, s, side="right") - 1)
    ct = int(np.searchsorted(times, t, side="right") - 1)
    return float(np.sum(at.p * ind * (M[:, ct] - M[:, cs])))


def check_strong_martingale(f: WorldFunctionals) -> Defect:
    """Worst generator-event defect of the strong martingale property."""
    at = _atoms(f)
    events = list(_strong_events(f, at))
    E = np.array([ind for _, _, ind in events], dtype=float)
    meta = [(ev, u) for ev, u, _ in events]
    best = _NONE
    for j in range(1, f.d + 1):
        W = (E * at.p[None, :]) @ _strong_paths(f, at, j)
        res = _scan_events(f, W, meta, _strong_label)
        if res.value > best.value:
            best = Defect(res.value, {"j": j, **res.witness})
    return best


def _cum_event_given(at: _Atoms, m, d, weight):
    """``out[t, j] = sum_a weight[a] 1{T_a <= t, D_a = j}`` over grid index t."""
    out = np.zeros((m, d))
    np.add.at(out, (at.ti, at.tj - 1), weight)
    return np.cumsum(out, axis=0)


def check_non_prognostic_observation(f: WorldFunctionals) -> Defect:
    """|P(T<=t, D=j | T~>s) - P(T<=t, D=j | T>s)| over s in J, t >= s."""
    at = _atoms(f)
    m, d = f.world.m, f.d
    best = _NONE
    for c in range(m + 1):  # s on the 0-prefixed axis
        if c > 0 and not f.in_J[c - 1]:
            continue
        sel = at.tt + 1 > c
        p_obs = at.p[sel].sum()
        if p_obs <= 0:
            continue
        lhs = _cum_event_given(at, m, d, at.p * sel) / p_obs
        S_s = 1.0 if c == 0 else f.S[c - 1]
        F_s = np.zeros(d) if c == 0 else f.F[c - 1]
        rhs = (f.F - F_s[None, :]) / S_s
        valid = (np.arange(m) + 1 >= c)[:, None]
        res = _worst(np.where(valid, lhs - rhs, 0.0), lambda i, j: {"s": _col_time(f, c), "t": _t(f, i), "j": j + 1})
        best = _max(best, res)
    return best


def _cond_event_given_censored(f: WorldFunctionals, at: _Atoms):
    """``out[s, t, j] = P(T <= t, D = j | T~ = s, D~ = 0)``; zero where undefined."""
    m, d = f.world.m, f.d
    out = np.zeros((m, m, d))
    cens = at.dt == 0
    np.add.at(out, (at.tt[cens], at.ti[cens], at.tj[cens] - 1), at.p[cens])
    out = np.cumsum(out, axis=1)
    return safe_div(out, f.dFt[:, 0][:, None, None])


def check_non_prognostic_censoring(f: WorldFunctionals) -> Defect:
    """|P(T<=t, D=j | T~=s, D~=0) - P(T<=t, D=j | T>s)| over F~_0-atoms s in J."""
    at = _atoms(f)
    m = f.world.m
    cond = _cond_event_given_censored(f, at)
    rhs = safe_div(f.F[None, :, :] - f.F[:, None, :], f.S[:, None, None])  # [s, t, j]
    later = np.arange(m)[None, :] >= np.arange(m)[:, None]
    mask = ((f.dFt[:, 0] > 0) & f.in_J)[:, None, None] & later[:, :, None]
    diff = np.where(mask, cond - rhs, 0.0)
    return _worst(diff, lambda s, t, j: {"s": _t(f, s), "t": _t(f, t), "j": j + 1})


def _independence_defect(f: WorldFunctionals, joint: np.ndarray) -> Defect:
    """sup |P(T<=t, D=j, C>s) - P(T<=t, D=j) P(C>s)| over grid t, s."""
    m = joint.shape[0]
    # P(T <= t, D = j, C > s): cumulative in t, tail in C
    c_tail = np.flip(np.cumsum(np.flip(joint, axis=2), axis=2), axis=2)[:, :, 1:]  # C > grid[s]
    lhs = np.cumsum(c_tail, axis=0)  # [t, j, s]
    F = np.cumsum(joint.sum(axis=2), axis=0)
    K = np.flip(np.cumsum(np.flip(joint.sum(axis=(0, 1)))))[1:]
    diff = lhs - F[:, :, None] * K[None, None, :m]
    return _worst(diff, lambda t, j, s: {"t": _t(f, t), "j": j + 1, "s": _t(f, s)})


def check_independent_C_exists(f: WorldFunctionals) -> Defect:
    """Independence defect of the censoring time built from the observed law.

    The constructed ``C`` equals ``T~`` on censored atoms and follows the
    modified-censoring-hazard product limit from ``T~`` onward otherwise,
    conditionally independent of ``(T, D)`` given ``(T~, D~)``.
    """
    from .latent import conditional_c_law

    at = _atoms(f)
    m, d = f.world.m, f.d
    q = conditional_c_law(f)  # [t~, c] for D~ != 0
    coupled = np.zeros((m, d, m + 1))
    cens = at.dt == 0
    np.add.at(coupled, (at.ti[cens], at.tj[cens] - 1, at.tc[cens]), at.p[cens])
    for a in np.flatnonzero(~cens):
        coupled[at.ti[a], at.tj[a] - 1, :] += at.p[a] * q[at.tt[a]]
    return _independence_defect(f, coupled)


# ---------------------------------------------------------------------------
# given censoring time


def _cens_ident_hazard(f):
    diff = np.where(f.free_check0, 0.0, f.dHcheck0 - f.dH0)
    cum = np.cumsum(diff) * f.in_J
    return _worst(cum, lambda i: {"t": _t(f, i)})


def _prob_censored_given_c(f, at):
    """``P(T~ = t, D~ = 0 | C = t)`` on the grid (0 where C has no mass)."""
    m = f.world.m
    num = np.zeros(m)
    cens = at.dt == 0
    np.add.at(num, at.tc[cens], at.p[cens])
    return safe_div(num, f.dG)


def _prob_survive_given_c_at_risk(f, at):
    """``P(T > t | C >= t)`` by enumeration."""
    m = f.world.m
    i = np.arange(m)
    hit = (at.ti[None, :] > i[:, None]) & (at.tc[None, :] >= i[:, None])
    return safe_div(hit @ at.p, f.K_left)


def _obs_event_over_K(f):
    """``sum_j int_0^t K(s-)^{-1} F~_j(ds)`` on the grid."""
    return np.cumsum(safe_div(f.dFt[:, 1:].sum(axis=1), f.K_left))


def check_cens_identifiability(f: WorldFunctionals) -> dict:
    """Four formulations of censoring identifiability.

    Returns a dict with keys ``hazard``, ``martingale``, ``conditional`` and
    ``constant_sum``.
    """
    at = _atoms(f)
    g_mask = (f.dG > 0) & f.in_J
    cens_given_c = _prob_censored_given_c(f, at)
    cond = np.where(g_mask, cens_given_c - _prob_survive_given_c_at_risk(f, at), 0.0)
    const = np.where(g_mask, cens_given_c + _obs_event_over_K(f) - 1.0, 0.0)
    return {
        "hazard": _cens_ident_hazard(f),
        "martingale": _check_observed_martingale(f, [0], "censoring"),
        "conditional": _worst(cond, lambda i: {"t": _t(f, i)}),
        "constant_sum": _worst(const, lambda i: {"t": _t(f, i)}),
    }


def check_pointwise_independence(f: WorldFunctionals) -> dict:
    """Three formulations of pointwise independence plus S~ = S K.

    Keys ``hazards``, ``incidence``, ``conditional`` and ``product_survival``.
    """
    at = _atoms(f)
    J = f.in_J
    hazards = _max(check_identity_of_forces(f), _cens_ident_hazard(f))

    inc_j = (f.Ft[:, 1:] - np.cumsum(f.K_left[:, None] * f.dF, axis=0)) * J[:, None]
    inc_0 = (f.Ft[:, 0] - np.cumsum(f.S * f.dG)) * J
    incidence = _max(
        _worst(inc_j, lambda i, j: {"t": _t(f, i), "j": j + 1}),
        _worst(inc_0, lambda i: {"t": _t(f, i), "j": 0}),
    )

    m = f.world.m
    seen = np.zeros((m, f.d))
    np.add.at(seen, (at.ti, at.tj - 1), at.p * (at.tc >= at.ti))
    c_given_event = safe_div(seen, f.dF)
    mask_j = (f.dF > 0) & J[:, None]
    surv = np.zeros(m)
    np.add.at(surv, at.tc[at.tc < m], (at.p * (at.ti > at.tc))[at.tc < m])
    t_given_c = safe_div(surv, f.dG)
    mask_0 = (f.dG > 0) & J
    conditional = _max(
        _worst(np.where(mask_j, c_given_event - f.K_left[:, None], 0.0), lambda i, j: {"t": _t(f, i), "j": j + 1}),
        _worst(np.where(mask_0, t_given_c - f.S, 0.0), lambda i: {"t": _t(f, i), "j": 0}),
    )
    product = _worst(f.St - f.S * f.K, lambda i: {"t": _t(f, i)})
    return {"hazards": hazards, "incidence": incidence, "conditional": conditional, "product_survival": product}


def check_cens_representativity(f: WorldFunctionals) -> Defect:
    """|P(C<=t | T~=s, D~=j) - P(C<=t | C>=s)| over F~_j-atoms s, all t."""
    at = _atoms(f)
    m, d = f.world.m, f.d
    seen = at.dt > 0
    cond = np.zeros((m, d, m + 1))  # [s, j, c]
    np.add.at(cond, (at.tt[seen], at.dt[seen] - 1, at.tc[seen]), at.p[seen])
    cond = np.cumsum(cond, axis=2)[:, :, :m]  # C <= grid[t]
    cond = safe_div(cond, f.dFt[:, 1:, None])
    G_left = f.G - f.dG
    rhs = safe_div(np.maximum(f.G[None, :] - G_left[:, None], 0.0), f.K_left[:, None])  # [s, t]
    rhs = np.where(np.arange(m)[None, :] >= np.arange(m)[:, None], rhs, 0.0)
    mask = (f.dFt[:, 1:] > 0)[:, :, None]
    diff = np.where(mask, cond - rhs[:, None, :], 0.0)
    return _worst(diff, lambda s, j, t: {"s": _t(f, s), "j": j + 1, "t": _t(f, t)})


def check_full_independence(f: WorldFunctionals) -> Defect:
    """sup |P(T<=t, D=j, C>s) - P(T<=t, D=j) P(C>s)| by enumeration."""
    f.require_full()
    return _independence_defect(f, f.world.joint)


# ---------------------------------------------------------------------------
# appendix identities


def _enumerate(at, cond):
    return float(at.p[cond].sum())


def validate_appendix_identities(f: WorldFunctionals) -> list:
    """Both sides of the seven appendix identities at every grid point of J.

    Left-hand probabilities are enumerated from the joint law; right-hand
    sides are assembled from the derived functionals. Returns a list of
    ``(name, max_defect)``.
    """
    at = _atoms(f)
    m, d = f.world.m, f.d
    J = np.flatnonzero(f.in_J)
    lt = np.arange(m)

    prob_vs_B = []
    B_vs_prob = []
    prob_vs_B2 = []
    B_vs_prob2 = []
    over_K = _obs_event_over_K(f)
    cens_given_c = _prob_censored_given_c(f, at)
    for i in J:
        at_risk = _enumerate(at, at.ti >= i)
        p_early = _enumerate(at, (at.tt < i) & (at.ti >= i)) / at_risk
        before = lt < i
        rhs = f.B[i] + np.sum(safe_div(f.St_left, f.S) * (f.dHt_all - f.dH_all) * before)
        prob_vs_B.append(p_early - rhs)

        cs = np.where(np.isnan(f.a), 0.0, f.a)
        extra = np.sum(((1.0 - cs - f.B[:, None]) * f.dF)[before]) / f.S_left[i]
        B_vs_prob.append(f.B[i] - (p_early + extra))

        c_risk = _enumerate(at, at.tc >= i)
        p_event_c = _enumerate(at, (at.ti <= i) & (at.tc >= i)) / c_risk
        rhs2 = over_K[i] + np.sum(safe_div(f.Scheck, f.K) * (f.dHcheck0 - f.dH0) * before)
        prob_vs_B2.append(p_event_c - rhs2)

        extra2 = np.sum(((1.0 - cens_given_c - over_K) * f.dG)[before]) / f.K_left[i]
        B_vs_prob2.append(over_K[i] - (p_event_c + extra2))

    cond_cens = _cond_event_given_censored(f, at)  # [s, t, j]
    general = []
    for c in range(m + 1):  # s on the 0-prefixed axis
        St_s = 1.0 if c == 0 else f.St[c - 1]
        if c > 0 and not f.in_J[c - 1]:
            continue
        if St_s <= 0:
            continue
        S_s = 1.0 if c == 0 else f.S[c - 1]
        obs_alive = at.tt + 1 > c
        for t in range(c, m):
            window = (lt + 1 > c) & (lt <= t)
            Fj_t_u = safe_div(f.F[t][None, :] - f.F, f.S[:, None])  # [u, j]
            for j in range(1, d + 1):
                lhs = _enumerate(at, (at.ti + 1 > c) & (at.ti <= t) & (at.tj == j)) / S_s
                lhs -= _enumerate(at, obs_alive & (at.ti <= t) & (at.tj == j)) / St_s
                w = f.St_left / St_s * window
                r1 = np.sum(Fj_t_u[:, j - 1] * w * (f.dHt_all - f.dH_all))
                r2 = np.sum(w * (f.dH[:, j - 1] - f.dHt[:, j]))
                r3 = np.sum((Fj_t_u[:, j - 1] - cond_cens[:, t, j - 1]) * f.dFt[:, 0] * window) / St_s
                general.append(lhs - (r1 + r2 + r3))

    cfc = []
    cfc2 = []
    for i in J:
        upto = lt <= i
        Fj_t_s = safe_div(f.F[i][None, :] - f.F, f.S[:, None])
        cs = np.where(np.isnan(f.a), 0.0, f.a)
        for j in range(1, d + 1):
            lhs = np.sum(((Fj_t_s[:, j - 1] - cond_cens[:, i, j - 1]) * f.dFt[:, 0])[upto])
            rhs = np.sum(((cs[:, j - 1] + f.B - 1.0) * f.dF[:, j - 1])[upto])
            cfc.append(lhs - rhs)
        # P(C <= t | C >= s) and P(C <= t | T~ = s, D~ = j)
        G_left = f.G - f.dG
        c_le_t_given_risk = safe_div(f.G[i] - G_left, f.K_left)
        lhs2 = 0.0
        for j in range(1, d + 1):
            sel = (at.dt == j) & (at.tc <= i)
            num = np.zeros(m)
            np.add.at(num, at.tt[sel], at.p[sel])
            c_le_t_given_obs = safe_div(num, f.dFt[:, j])
            lhs2 += np.sum(((c_le_t_given_risk - c_le_t_given_obs) * f.dFt[:, j])[upto])
        rhs2 = np.sum(((cens_given_c + over_K - 1.0) * f.dG)[upto])
        cfc2.append(lhs2 - rhs2)

    def worst(xs):
        return float(np.max(np.abs(xs))) if len(xs) else 0.0

    return [
        ("prob_vs_B", worst(prob_vs_B)),
        ("prob_vs_B2", worst(prob_vs_B2)),
        ("B_vs_prob", worst(B_vs_prob)),
        ("B_vs_prob2", worst(B_vs_prob2)),
        ("general_vs_cond_fixed", worst(general)),
        ("cond_fixed_vs_constant_sum", worst(cfc)),
        ("cond_fixed_vs_constant_sum2", worst(cfc2)),
    ]


# ---------------------------------------------------------------------------
# reports

FAMILIES = {
    "identifiability": (
        "identity_of_forces",
        "weak_martingale",
        "status_independent_observation",
        "constant_sum",
    ),
    "representativity": (
        "strong_martingale",
        "non_prognostic_observation",
        "non_prognostic_censoring",
        "independent_C_exists",
    ),
    "cens_identifiability": (
        "cens_identifiability.hazard",
        "cens_identifiability.martingale",
        "cens_identifiability.conditional",
        "cens_identifiability.constant_sum",
    ),
    "cens_representativity": ("cens_representativity",),
    "pointwise_independence": (
        "pointwise_independence.hazards",
        "pointwise_independence.incidence",
        "pointwise_independence.conditional",
    ),
    "full_independence": ("full_independence",),
}


@dataclass(frozen=True)
class PropertyResult:
    name: str
    holds: Optional[bool]
    defect: Optional[float]
    witness: dict

    @property
    def applicable(self) -> bool:
        return self.holds is not None

    def to_dict(self):
        if not self.applicable:
            return {"applicable": False, "holds": None, "defect": None, "witness": None}
        return {"applicable": True, "holds": self.holds, "defect": self.defect, "witness": self.witness}


@dataclass(frozen=True)
class AssumptionReport:
    tolerance: float
    properties: dict
    families: dict
    extras: dict

    def holds(self, family: str) -> Optional[bool]:
        return self.families[family].holds

    def defect(self, family: str) -> Optional[float]:
        return self.families[family].defect

    def to_dict(self):
        return {
            "tolerance": self.tolerance,
            "properties": {k: v.to_dict() for k, v in self.properties.items()},
            "families": {k: v.to_dict() for k, v in self.families.items()},
            "extras": {k: v.to_dict() for k, v in self.extras.items()},
        }


def check_all(f: WorldFunctionals, tol: float = DEFAULT_TOL) -> AssumptionReport:
    """Run every checker; an observed-only world yields a not-applicable report."""

    def result(name, defect: Defect):
        return PropertyResult(name, defect.value <= tol, defect.value, defect.witness)

    names = [n for forms in FAMILIES.values() for n in forms]
    if not f.full:
        na = {n: PropertyResult(n, None, None, {}) for n in names}
        fam = {k: PropertyResult(k, None, None, {}) for k in FAMILIES}
        extras = {
            n: PropertyResult(n, None, None, {})
            for n in ("pointwise_independence.product_survival", "full_vs_both_representativity")
        }
        return AssumptionReport(tol, na, fam, extras)

    ci = check_cens_identifiability(f)
    pw = check_pointwise_independence(f)
    defects = {
        "identity_of_forces": check_identity_of_forces(f),
        "weak_martingale": check_weak_martingale(f),
        "status_independent_observation": check_status_independent_observation(f),
        "constant_sum": check_constant_sum(f),
        "strong_martingale": check_strong_martingale(f),
        "non_prognostic_observation": check_non_prognostic_observation(f),
        "non_prognostic_censoring": check_non_prognostic_censoring(f),
        "independent_C_exists": check_independent_C_exists(f),
        "cens_representativity": check_cens_representativity(f),
        "full_independence": check_full_independence(f),
    }
    for k, v in ci.items():
        defects[f"cens_identifiability.{k}"] = v
    for k in ("hazards", "incidence", "conditional"):
        defects[f"pointwise_independence.{k}"] = pw[k]
    props = {n: result(n, defects[n]) for n in names}
    fams = {}
    for fam, forms in FAMILIES.items():
        worst = _max(*(defects[n] for n in forms))
        fams[fam] = PropertyResult(fam, all(props[n].holds for n in forms), worst.value, worst.witness)
    agree = fams["full_independence"].holds == (fams["representativity"].holds and fams["cens_representativity"].holds)
    extras = {
        "pointwise_independence.product_survival": result("pointwise_independence.product_survival", pw["product_survival"]),
        "full_vs_both_representativity": PropertyResult("full_vs_both_representativity", agree, 0.0 if agree else 1.0, {}),
    }
    return AssumptionReport(tol, props, fams, extras)
