import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from censprop.bench import ExampleSpec, build_example_world
from censprop.estim import EmptySample, ObservedSample, aalen_johansen, kaplan_meier, nelson_aalen, sample_world
from censprop.model import DiscreteWorld, derive


def test_nelson_aalen_single():
    (h,) = nelson_aalen(ObservedSample([1.0], [1]))
    assert list(h) == [(1.0, 1.0)]


def test_nelson_aalen_hand_count():
    (h,) = nelson_aalen(ObservedSample([1, 2, 3], [1, 0, 1]))
    assert h.mass_at(1.0) == pytest.approx(1 / 3)
    assert h.mass_at(3.0) == 1.0


def test_nelson_aalen_ties_pooled():
    h1, h2 = nelson_aalen(ObservedSample([1, 1], [1, 2]))
    assert h1.mass_at(1.0) == 0.5 and h2.mass_at(1.0) == 0.5


def test_empty_sample():
    with pytest.raises(EmptySample):
        nelson_aalen(ObservedSample([], []))


def test_bad_records():
    with pytest.raises(ValueError):
        ObservedSample([0.0], [1])
    with pytest.raises(ValueError):
        ObservedSample([1.0], [-1])
    with pytest.raises(ValueError):
        ObservedSample([1.0], [3], d=2)


def test_km_all_censored():
    S = kaplan_meier(ObservedSample([1, 2, 3], [0, 0, 0]))
    assert np.all(S.values == 1.0)


def test_km_hand_product():
    S = kaplan_meier(ObservedSample([1, 2, 3], [1, 0, 1]))
    assert S(1.0) == pytest.approx(2 / 3) and S(3.0) == 0.0


def test_km_single():
    assert kaplan_meier(ObservedSample([1.0], [1]))(1.0) == 0.0


def test_aj_two_state():
    sample = ObservedSample([1, 2, 2, 3, 4], [1, 0, 1, 1, 0])
    path = aalen_johansen(sample)
    S = kaplan_meier(sample)
    for t in path.times:
        assert path.row(t)[1] == pytest.approx(1 - S(t), abs=1e-15)


def test_aj_hand_matrix():
    path = aalen_johansen(ObservedSample([1, 2, 3], [1, 2, 0]))
    assert path.row(2.0) == pytest.approx([1 / 3, 1 / 3, 1 / 3])


def test_aj_no_events_is_identity():
    path = aalen_johansen(ObservedSample([1, 2], [0, 0], d=2))
    assert all(np.array_equal(P, np.eye(3)) for P in path.P)
    assert path.row(0.5).tolist() == [1.0, 0.0, 0.0]


samples = st.lists(st.tuples(st.integers(1, 10), st.integers(0, 2)), min_size=1, max_size=40)


@settings(max_examples=200)
@given(samples)
def test_path_invariants(records):
    s = ObservedSample([t for t, _ in records], [k for _, k in records], d=2)
    path = aalen_johansen(s)
    assert np.array_equal(path.S, path.P[:, 0, 0])
    assert np.allclose(path.P[:, 0].sum(axis=1), 1.0, atol=1e-12)
    assert np.all(path.P[:, 0] >= -1e-15) and np.all(path.P[:, 0] <= 1 + 1e-15)
    assert np.all(path.at_risk > 0)
    for k, t in enumerate(path.times):
        risk = sum(1 for x, _ in records if x >= t)
        assert path.at_risk[k] == risk
        for j in (1, 2):
            assert path.dH[k, j - 1] == sum(1 for x, y in records if x == t and y == j) / risk


@given(st.lists(st.integers(1, 10), min_size=1, max_size=40))
def test_km_without_censoring_is_empirical(times):
    S = kaplan_meier(ObservedSample(times, [1] * len(times)))
    for t in range(0, 12):
        assert S(t) == pytest.approx(sum(1 for x in times if x > t) / len(times), abs=1e-12)


def test_sample_point_mass():
    w = DiscreteWorld.from_atoms(1, [2.0], [(2.0, 1, np.inf, 1.0)])
    s = sample_world(w, 1, seed=0)
    assert s.times.tolist() == [2.0] and s.types.tolist() == [1]


def test_sample_deterministic():
    w = build_example_world(ExampleSpec(8, "T2", "C1"))
    a, b = sample_world(w, 50, seed=9), sample_world(derive(w), 50, seed=9)
    assert np.array_equal(a.times, b.times) and np.array_equal(a.types, b.types)


@pytest.mark.parametrize("seed", range(5))
def test_sample_frequencies(seed):
    rng = np.random.default_rng(100 + seed)
    joint = rng.random((4, 2, 5))
    w = DiscreteWorld(2, [1.0, 2.0, 3.0, 4.0], joint=joint / joint.sum())
    n = 10_000
    s = sample_world(w, n, seed=seed)
    freq = np.zeros_like(w.observed)
    np.add.at(freq, (np.searchsorted(w.grid, s.times), s.types), 1.0 / n)
    assert np.max(np.abs(freq - w.observed)) < 4 / np.sqrt(n)
