import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from glad import io
from glad.dynamic import apply_events
from glad.errors import ConfigError, EmptyInput, ParseError, SelfLoop
from glad.scenario import (ChurnConfig, SynthesisConfig, class_counts, generate_trace, kmeans_pivots, load_graph,
                           synthesize_instance)


def test_kmeans_k_equals_n():
    pts = np.random.default_rng(0).random((7, 2))
    piv = kmeans_pivots(pts, 7, seed=1)
    assert sorted(map(tuple, piv)) == sorted(map(tuple, pts))


def test_kmeans_two_clusters():
    pts = np.array([[0, 0]] * 5 + [[10, 10]] * 4, dtype=float)
    piv = kmeans_pivots(pts, 2, seed=3)
    assert sorted(map(tuple, piv)) == [(0.0, 0.0), (10.0, 10.0)]


def test_kmeans_single_cluster_and_errors():
    pts = np.random.default_rng(2).random((30, 2))
    assert np.allclose(kmeans_pivots(pts, 1), pts.mean(axis=0))
    with pytest.raises(EmptyInput):
        kmeans_pivots(np.zeros((0, 2)), 1)
    with pytest.raises(ConfigError):
        kmeans_pivots(pts, 31)


def test_kmeans_deterministic_and_handles_duplicates():
    pts = np.array([[0, 0]] * 6 + [[1, 1]], dtype=float)
    a = kmeans_pivots(pts, 3, seed=5)
    assert np.array_equal(a, kmeans_pivots(pts, 3, seed=5))
    assert np.isfinite(a).all()


@pytest.mark.parametrize("d,expected", [(20, (7, 7, 6)), (10, (4, 3, 3)), (60, (20, 20, 20)), (2, (1, 1, 0))])
def test_class_counts(d, expected):
    assert tuple(class_counts(d).values()) == expected


def test_synthesised_instance_classes():
    inst = synthesize_instance(SynthesisConfig(n_vertices=50, n_servers=20, seed=1))
    classes = [s.machine_class for s in inst.network.servers]
    assert (classes.count("A"), classes.count("B"), classes.count("C")) == (7, 7, 6)


def test_zero_distance_factors():
    inst = synthesize_instance(SynthesisConfig(n_vertices=20, n_servers=3, distance_factor_upload=0,
                                               distance_factor_traffic=0, seed=2))
    assert not inst.upload_cost.any() and not inst.network.traffic.any()


def test_byte_identical_rerun(tmp_path):
    cfg = SynthesisConfig(n_vertices=40, n_servers=4, link_model="er", link_param=0.1, seed=9)
    a = io.save_instance(synthesize_instance(cfg), tmp_path / "a.json")
    b = io.save_instance(synthesize_instance(cfg), tmp_path / "b.json")
    assert a == b


def test_knearest_connectivity():
    inst = synthesize_instance(SynthesisConfig(n_vertices=40, n_servers=6, connectivity="knearest", k_nearest=2))
    w = inst.network.connectivity
    assert np.array_equal(w, w.T) and (w.sum(axis=1) >= 3).all()
    assert np.isinf(inst.network.traffic[~w]).all()


@pytest.mark.parametrize("field,kw", [
    ("link_param", dict(link_model="er", link_param=1.5)),
    ("rho_std", dict(rho_std=-1)),
    ("k_nearest", dict(connectivity="knearest", k_nearest=5, n_servers=5)),
    ("n_vertices", dict(n_vertices=0)),
])
def test_config_rejections(field, kw):
    with pytest.raises(ConfigError) as e:
        SynthesisConfig(**kw)
    assert e.value.field == field


def test_config_from_dict_field_paths():
    with pytest.raises(ConfigError) as e:
        ChurnConfig.from_dict({"link_change_pct": 1.5}, "churn.")
    assert e.value.field == "churn.link_change_pct"
    with pytest.raises(ConfigError) as e:
        SynthesisConfig.from_dict({"bogus": 1})
    assert e.value.field == "bogus"


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 60), st.integers(1, 12), st.sampled_from(["pa", "er"]), st.integers(0, 10**6))
def test_synthesis_always_valid(n, d, model, seed):
    d = min(d, n)
    param = 0.2 if model == "er" else min(2, max(1, n - 1))
    inst = synthesize_instance(SynthesisConfig(n_vertices=n, n_servers=d, link_model=model, link_param=param,
                                               seed=seed))
    t = inst.network.traffic
    assert np.array_equal(t, t.T) and inst.upload_cost.shape == (n, d)
    counts = [s.machine_class for s in inst.network.servers]
    assert [counts.count(c) for c in "ABC"] == list(class_counts(d).values())


def test_zero_churn_gives_empty_slots():
    inst = synthesize_instance(SynthesisConfig(n_vertices=30, n_servers=3))
    assert all(not s.events for s in generate_trace(inst.graph, ChurnConfig(0.0, 0.0, 5)))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_trace_always_applicable_and_deterministic(seed):
    inst = synthesize_instance(SynthesisConfig(n_vertices=50, n_servers=3, seed=seed % 97))
    churn = ChurnConfig(0.1, 0.05, 10, seed=seed)
    trace = generate_trace(inst.graph, churn, inst.network.coords)
    assert io.trace_to_json(trace) == io.trace_to_json(generate_trace(inst.graph, churn, inst.network.coords))
    g = inst.graph
    for slot in trace:
        g = apply_events(g, slot.events)
        kinds = [e.kind for e in slot.events]
        first_del = next((k for k, x in enumerate(kinds) if x.endswith("delete")), len(kinds))
        assert all(x.endswith("delete") for x in kinds[first_del:])


def test_trace_event_count_statistics():
    inst = synthesize_instance(SynthesisConfig(n_vertices=3912, n_servers=10, link_model="er",
                                               link_param=4677 / (3912 * 3911 / 2), seed=1))
    m = inst.graph.n_links
    trace = generate_trace(inst.graph, ChurnConfig(0.01, 0.0, 200, seed=2))
    counts = np.array([len(s.events) for s in trace])
    mean = 0.01 * m
    assert abs(counts.mean() - mean) < 0.15 * mean
    assert abs(counts.std() - mean / 2) < 0.25 * mean / 2


def test_load_graph(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# comment\n0 1\n1 2\n")
    g = load_graph(p)
    assert g.n_vertices == 3 and g.link_set() == {(0, 1), (1, 2)}
    p.write_text("0 1\n0 1\n1 0\n")
    assert load_graph(p).n_links == 1
    p.write_text("0 1\n3 3\n")
    with pytest.raises(SelfLoop):
        load_graph(p)
    p.write_text("0 1\nx y\n")
    with pytest.raises(ParseError) as e:
        load_graph(p)
    assert e.value.line == 2


def test_load_graph_with_coords(tmp_path):
    (tmp_path / "g.txt").write_text("5 7\n")
    (tmp_path / "c.csv").write_text("id,x,y\n7,0.5,0.25\n5,1,2\n")
    g = load_graph(tmp_path / "g.txt", tmp_path / "c.csv")
    assert g.coords.tolist() == [[1.0, 2.0], [0.5, 0.25]]
