import numpy as np
import pytest

from schemas import TrajectorySample
from services.plotting import plot_trajectories, plot_trajectory, render_trajectories
from services.semigroup import nilpotent_generator, sample_trajectory


@pytest.fixture
def traces():
    G = nilpotent_generator(2, 2)
    return [
        ("e1", sample_trajectory(G, [1, 0], 2.0, 9), 0),
        ("e2", sample_trajectory(G, [0, 1], 2.0, 9), 2),
    ]


def test_render_is_deterministic(traces):
    first = render_trajectories(traces, title="m = 3")
    assert first == render_trajectories(traces, title="m = 3")
    assert first.startswith("<svg")
    assert first.count("<polyline") == 2
    assert "e2: degree 2" in first
    assert "m = 3" in first


def test_undetermined_degree_has_plain_label():
    t = np.linspace(0, 1, 5)
    sample = TrajectorySample(t_grid=t, values=np.exp(t), x=[1.0])
    svg = render_trajectories([("x <1>", sample, None)])
    assert "degree" not in svg
    assert "x &lt;1&gt;" in svg


def test_render_rejects_empty(traces):
    with pytest.raises(ValueError):
        render_trajectories([])
    empty = TrajectorySample(t_grid=[], values=[], x=[1.0])
    with pytest.raises(ValueError):
        render_trajectories([("empty", empty, None)])


def test_plot_writes_files(tmp_path, traces):
    out = plot_trajectories(traces, tmp_path / "all.svg")
    assert out.read_text() == render_trajectories(traces)
    single = plot_trajectory(traces[1][1], 2, tmp_path / "one.svg")
    assert "x: degree 2" in single.read_text()
