import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from censprop.stepfn import AtomicMeasure, NonzeroMassAtSingularity, StepFunction, cumulative, ls_integrate


def test_cumulative_single_atom():
    f = cumulative(AtomicMeasure([1.0], [0.5]))
    assert (f(0.5), f(1.0), f(2.0)) == (0.0, 0.5, 0.5)


def test_cumulative_empty_is_zero():
    f = cumulative(AtomicMeasure())
    assert f(0.0) == 0.0 and f(10.0) == 0.0


def test_cumulative_two_atoms():
    f = cumulative(AtomicMeasure([0.25, 0.75], [0.1, 0.2]))
    assert f(0.5) == pytest.approx(0.1, abs=1e-15)
    assert f(1.0) == pytest.approx(0.3, abs=1e-15)


def test_duplicates_fused_and_sorted():
    m = AtomicMeasure([2.0, 1.0, 2.0], [0.1, 0.2, 0.3])
    assert m.times.tolist() == [1.0, 2.0]
    assert m.masses.tolist() == pytest.approx([0.2, 0.4])


@pytest.mark.parametrize("times,masses", [([0.0], [1.0]), ([-1.0], [1.0]), ([1.0], [-0.1]), ([1.0], [np.nan])])
def test_invalid_measures_rejected(times, masses):
    with pytest.raises(ValueError):
        AtomicMeasure(times, masses)


def test_step_left_and_right_values():
    f = StepFunction(1.0, [1.0, 2.0], [0.5, 0.25])
    assert f(1.0) == 0.5 and f.left(1.0) == 1.0
    assert f(1.5) == 0.5 and f.left(2.0) == 0.5
    assert f(0.1) == 1.0 and f.left(0.1) == 1.0


def test_integrate_constant():
    m = AtomicMeasure([1.0], [0.5])
    assert ls_integrate(1.0, m, 0.0, 2.0) == 0.5


def test_integrate_window_is_left_open():
    assert ls_integrate(1.0, AtomicMeasure([1.0], [0.5]), 1.0, 2.0) == 0.0


def test_integrate_reciprocal_left_limit():
    S = StepFunction(1.0, [0.5, 1.0], [0.5, 0.0])
    m = AtomicMeasure([1.0], [0.25])
    assert ls_integrate(S, m, left=True, reciprocal=True) == pytest.approx(0.5)


def test_reciprocal_zero_with_mass_raises():
    S = StepFunction(0.0, [], [])
    with pytest.raises(NonzeroMassAtSingularity):
        ls_integrate(S, AtomicMeasure([1.0], [0.2]), reciprocal=True)


def test_reciprocal_zero_without_mass_contributes_nothing():
    S = StepFunction(0.0, [], [])
    assert ls_integrate(S, AtomicMeasure([1.0], [0.0]), reciprocal=True) == 0.0


def test_bad_window():
    with pytest.raises(ValueError):
        ls_integrate(1.0, AtomicMeasure(), 2.0, 1.0)


measures = st.lists(
    st.tuples(st.integers(1, 30), st.floats(0, 1, allow_nan=False)), max_size=12
).map(lambda xs: AtomicMeasure([float(t) for t, _ in xs], [p for _, p in xs]))


@settings(max_examples=200)
@given(measures, st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
def test_window_additivity(m, a, b, c):
    a, b, c = sorted((a, b, c))
    g = StepFunction(0.3, m.times, np.linspace(1, 2, m.times.size))
    whole = ls_integrate(g, m, a, c, left=True)
    parts = ls_integrate(g, m, a, b, left=True) + ls_integrate(g, m, b, c, left=True)
    assert whole == pytest.approx(parts, abs=1e-12)


@given(measures)
def test_cumulative_at_last_atom_is_total(m):
    if len(m):
        assert abs(cumulative(m)(m.times[-1]) - m.total) <= 1e-12


@given(measures)
def test_left_limit_matches_interior_value(m):
    f = cumulative(m)
    prev = 0.0
    for t in m.times:
        mid = (prev + t) / 2
        assert f.left(t) == f(mid)
        prev = t
