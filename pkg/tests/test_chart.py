import math
import threading

import numpy as np
import pytest

from einstype.chart import Chart, NotPositiveDefinite, PointOutsideDomain
from einstype.constructions import CORPUS, flat_chart, sphere_chart


def test_flat_metric_is_identity():
    c = flat_chart(3)
    for p in c.sample_points(5):
        assert np.array_equal(c.metric_at(p), np.eye(3))
        for order in (1, 2, 3):
            assert not np.any(c.metric_partials_at(p, order))


def test_round_sphere_metric():
    c = sphere_chart(3)
    t2 = 1.1
    g = c.metric_at([math.pi / 2, t2, 0.5])
    # at the equator of the first angle the round metric is diag(1, 1, sin^2 t2)
    assert np.allclose(g, np.diag([1.0, 1.0, math.sin(t2) ** 2]), atol=1e-15)


def test_warped_metric_at_base():
    c = Chart(["r", "u", "v"], {(0, 0): "1", (1, 1): "(1 + r)^2", (2, 2): "(1 + r)^2*sin(u)^2"},
              [(-0.5, 0.5), (0.5, 2.5), (0, 6)])
    g = c.metric_at([0.0, 1.0, 2.0])
    assert np.allclose(g, np.diag([1.0, 1.0, math.sin(1.0) ** 2]), atol=1e-15)


def test_inverse_metric():
    c = flat_chart(3)
    assert np.array_equal(c.inverse_metric_at([0.1, 0.2, 0.3]), np.eye(3))
    d = Chart(["x", "y", "z"], {(0, 0): "1", (1, 1): "4", (2, 2): "1"}, [(0, 1)] * 3)
    assert np.allclose(d.inverse_metric_at([0.5] * 3), np.diag([1, 0.25, 1]), atol=1e-16)


def test_inverse_of_random_spd():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, 4))
    spd = a @ a.T + 4 * np.eye(4)
    entries = {(i, j): repr(float(spd[i, j])) for i in range(4) for j in range(i, 4)}
    c = Chart(["a", "b", "c", "d"], entries, [(0, 1)] * 4)
    p = [0.5] * 4
    G = c.inverse_metric_at(p)
    assert np.abs(c.metric_at(p) @ G - np.eye(4)).max() <= 1e-12


def test_first_partial_of_exponential_entry():
    c = Chart(["r", "y", "z"], {(0, 0): "exp(2*r)", (1, 1): "1", (2, 2): "1"}, [(-1, 1)] * 3)
    d = c.metric_partials_at([0.0, 0.0, 0.0], 1)
    assert d[0, 0, 0] == 2.0
    d2 = c.metric_partials_at([0.0, 0.0, 0.0], 2)
    assert d2[0, 0, 0, 0] == 4.0


def test_partials_symmetric_in_derivative_indices():
    chart, _ = CORPUS["warp4_s2r"].build()
    p = chart.sample_points(1, seed=4)[0]
    d2 = chart.metric_partials_at(p, 2)
    d3 = chart.metric_partials_at(p, 3)
    assert np.array_equal(d2, d2.transpose(0, 1, 3, 2))
    for perm in [(0, 1, 3, 2, 4), (0, 1, 4, 3, 2), (0, 1, 2, 4, 3)]:
        assert np.array_equal(d3, d3.transpose(perm))


def test_cached_partials_are_bit_identical():
    chart = sphere_chart(4)
    p = chart.sample_points(1, seed=2)[0]
    first = chart.metric_jet_at(p, 3)
    again = chart.metric_jet_at(p, 3)
    fresh = sphere_chart(4).metric_jet_at(p, 3)
    for a, b, c in zip(first, again, fresh):
        assert np.array_equal(a, b) and np.array_equal(a, c)


def test_concurrent_readers_agree():
    chart = sphere_chart(4)
    p = chart.sample_points(1, seed=5)[0]
    out = []

    def work():
        out.append(chart.metric_jet_at(p, 3))
    threads = [threading.Thread(target=work) for _ in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for jet in out[1:]:
        assert all(np.array_equal(a, b) for a, b in zip(out[0], jet))


def test_errors():
    c = Chart(["x", "y", "z"], {(0, 0): "x", (1, 1): "1", (2, 2): "1"}, [(-1, 1)] * 3)
    with pytest.raises(NotPositiveDefinite):
        c.metric_at([-0.5, 0, 0])
    with pytest.raises(PointOutsideDomain):
        c.metric_at([2.0, 0, 0])
    with pytest.raises(ValueError):
        Chart(["x", "y"], {(0, 0): "1", (1, 1): "1"}, [(0, 1)] * 2)


def test_sampler_is_deterministic_and_inside_margin():
    c = sphere_chart(3)
    a = c.sample_points(64, seed=3)
    assert np.array_equal(a, c.sample_points(64, seed=3))
    assert not np.array_equal(a, c.sample_points(64, seed=4))
    lo = c.domain[:, 0] + c.margin * c.width
    hi = c.domain[:, 1] - c.margin * c.width
    assert np.all(a >= lo) and np.all(a <= hi)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_metrics_positive_definite(name):
    chart, _ = CORPUS[name].build()
    for p in chart.sample_points(64):
        assert np.linalg.eigvalsh(chart.metric_at(p)).min() > 0
