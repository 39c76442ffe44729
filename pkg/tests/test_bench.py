import csv

import numpy as np
import pytest

from censprop.bench import (
    PAIRS,
    TABLE1_EXPECTED,
    BadResolution,
    ExampleSpec,
    anchor_probabilities,
    build_example_world,
    consistency_csv,
    consistency_experiment,
    dependent_counterexample,
    emit_heatmaps,
    reproduce_table1,
    table1_csv,
    variable_indices,
)
from censprop.model import derive


def continuous_value(name, t, c):
    """The unit-square variables evaluated at a point, straight from their case definitions."""
    if name == "T1":
        return t
    if name == "C1":
        return c
    if name == "T2":
        return 1 - c if (0.5 <= t <= 1 and 0 <= c < 0.5) else t
    if name == "C2":
        return 1 - t if (0 <= t <= 0.5 and 0.5 <= c <= 1) else c
    if name == "C3":
        return c * (c < t) + (c >= t)
    return min(t, c)


@pytest.mark.parametrize("n", [3, 5, 2, 0])
def test_bad_resolution(n):
    with pytest.raises(BadResolution):
        ExampleSpec(n)


def test_bad_variable():
    with pytest.raises(ValueError):
        ExampleSpec(4, "T3", "C1")
    with pytest.raises(ValueError):
        ExampleSpec.parse("T1", 4)


def test_pair_parsing():
    assert ExampleSpec.parse("t2c1", 8) == ExampleSpec(8, "T2", "C1")


def test_4x4_T1C1():
    w = build_example_world(ExampleSpec(4))
    assert np.all(w.joint[:, 0, :4] == 1 / 16)
    assert w.observed[0].sum() == pytest.approx(7 / 16)


@pytest.mark.parametrize("n", [4, 8, 16])
@pytest.mark.parametrize("name", ["T1", "T2", "C1", "C2"])
def test_uniform_marginals(n, name):
    counts = np.bincount(variable_indices(name, n).ravel(), minlength=n + 1)[1:]
    assert np.all(counts == n)


@pytest.mark.parametrize("n", [4, 8, 16])
def test_same_observed_law_for_all_pairs(n):
    laws = [build_example_world(ExampleSpec(n, ev, ce)).observed for ev, ce in PAIRS]
    for law in laws[1:]:
        assert np.max(np.abs(law - laws[0])) <= 1e-12


@pytest.mark.parametrize("name", ["T1", "T2", "C1", "C2", "C3", "Tobs"])
def test_cells_agree_with_midpoints(name):
    # away from the reflections, a cell's index equals the continuous value at its midpoint, rounded up
    n = 8
    idx = variable_indices(name, n)
    for i in range(1, n + 1):
        for k in range(1, n + 1):
            v = continuous_value(name, (i - 0.5) / n, (k - 0.5) / n)
            assert idx[i - 1, k - 1] == int(np.ceil(v * n - 1e-9)) or idx[i - 1, k - 1] == int(np.ceil(v * n + 1e-9))


@pytest.mark.parametrize("n", [4, 8, 16])
def test_table1_pattern(n):
    res = reproduce_table1(n)
    assert np.array_equal(res.holds, TABLE1_EXPECTED)
    # nesting
    assert np.all(res.holds[0] | ~res.holds[1])
    assert np.all(res.holds[4] | ~res.holds[5])


def test_table1_csv_shape():
    text = table1_csv(reproduce_table1(4))
    rows = list(csv.reader(text.splitlines()))
    assert len(rows) == 7 and len(rows[0]) == 13
    assert rows[1][0] == "identifiability"


def test_heatmaps(tmp_path):
    paths = emit_heatmaps(ExampleSpec(4, "T2", "C1"), tmp_path)
    assert len(paths) == 6
    grid = lambda name: np.loadtxt(tmp_path / f"heatmap_{name}.csv", delimiter=",")
    # rows are t cells, columns c cells; cell (t=0.75, c=0.25) is row 2, column 0
    assert grid("Tobs")[2, 0] == 0.25
    # reflected region: index n+1-k keeps the marginal uniform, so c=0.25 lands on the top cell
    assert grid("T2")[2, 0] == 1.0
    assert grid("C3")[1, 2] == 1.0
    assert np.array_equal(grid("Tobs"), np.minimum(grid("T1"), grid("C1")))
    assert np.array_equal(np.minimum(grid("T2"), grid("C3")), grid("Tobs"))


def test_heatmaps_pgm(tmp_path):
    paths = emit_heatmaps(ExampleSpec(4), tmp_path, pgm=True)
    assert len(paths) == 12
    data = (tmp_path / "heatmap_T1.pgm").read_bytes()
    assert data.startswith(b"P5\n4 4\n255\n") and len(data) == len(b"P5\n4 4\n255\n") + 16


@pytest.mark.parametrize("n", [8, 16])
def test_anchor(n):
    p_cens, p_surv = anchor_probabilities(n)
    assert abs(p_cens - 1.0) <= 2 / n
    assert abs(p_surv - 2 / 3) <= 2 / n


def test_anchor_rejects_off_grid():
    with pytest.raises(ValueError):
        anchor_probabilities(8, 0.3)


def test_counterexample_gap():
    f = derive(dependent_counterexample())
    assert f.Ht[1, 1] == pytest.approx(4 / 7)
    assert f.H[1, 0] == pytest.approx(0.4)


def test_consistency_rows_and_determinism():
    w = build_example_world(ExampleSpec(4))
    rows = consistency_experiment(w, [50, 100], [0, 1, 2], "w")
    assert len(rows) == 6 and rows[0].target == "truth"
    again = consistency_experiment(w, [50, 100], [0, 1, 2], "w")
    assert consistency_csv(rows) == consistency_csv(again)
    assert consistency_csv(rows).splitlines()[0] == "world,n,seed,sup_error_S,sup_error_P"


def test_consistency_counterexample_targets_limit():
    rows = consistency_experiment(dependent_counterexample(), [1000], [0], "dep")
    assert rows[0].target == "limit" and rows[0].sup_gap_truth_P > 0.1
