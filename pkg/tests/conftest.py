import numpy as np
import pytest

from censprop.bench import PAIRS, ExampleSpec, build_example_world

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def table_worlds():
    """The six unit-square worlds at n=8, keyed like 'T2C1'."""
    return {ev + ce: build_example_world(ExampleSpec(8, ev, ce)) for ev, ce in PAIRS}


def random_hazard(rng, d=None, size=None, max_time=20):
    """Random cause-specific increments with row sums <= 1 on integer times."""
    d = int(rng.integers(1, 4)) if d is None else d
    size = int(rng.integers(0, 11)) if size is None else size
    times = np.sort(rng.choice(np.arange(1, max_time + 1), size=size, replace=False)).astype(float)
    raw = rng.random((size, d + 1))
    raw[:, 0] *= rng.random(size) < 0.8
    inc = raw[:, 1:] / raw.sum(axis=1, keepdims=True).clip(min=1e-300)
    if size and rng.random() < 0.2:
        k = rng.integers(size)
        inc[k] = raw[k, 1:] / raw[k, 1:].sum()  # an exhausting atom
    return times, inc


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
