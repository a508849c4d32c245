import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from glad.errors import ValidationError
from glad.mincut import FlowNetwork, min_st_cut, to_dimacs


def test_single_arc():
    net = FlowNetwork.from_arcs(2, [(0, 1, 4.0)])
    cut = min_st_cut(net)
    assert cut.flow_value == 4 and cut.cut_arcs == (0,)


def test_bottleneck():
    net = FlowNetwork.from_arcs(3, [(0, 2, 3.0), (2, 1, 5.0)])
    cut = min_st_cut(net)
    assert cut.flow_value == 3 and cut.cut_arcs == (0,)
    assert cut.source_side == frozenset({0})


def test_diamond():
    # s=0, t=1, a=2, b=3
    arcs = [(0, 2, 10), (0, 3, 10), (2, 1, 1), (3, 1, 1), (2, 3, 10)]
    net = FlowNetwork.from_arcs(4, arcs)
    assert min_st_cut(net).flow_value == 2
    assert _enumerated_min(net) == 2


def test_disconnected_sink_is_not_an_error():
    cut = min_st_cut(FlowNetwork.from_arcs(3, [(0, 2, 1.0)]))
    assert cut.flow_value == 0 and cut.cut_arcs == ()


def test_rejects_bad_networks():
    with pytest.raises(ValidationError):
        FlowNetwork(2, [0], [1], [-1.0])
    with pytest.raises(ValidationError):
        FlowNetwork(2, [0], [1], [1.0], source=1, sink=1)
    with pytest.raises(ValidationError):
        FlowNetwork(2, [0], [5], [1.0])


def test_dimacs_text():
    text = to_dimacs(FlowNetwork.from_arcs(3, [(0, 2, 1.5), (2, 1, 2.0)]))
    assert text.splitlines() == ["p max 3 2", "n 1 s", "n 2 t", "a 1 3 1.5", "a 3 2 2.0"]


def _enumerated_min(net):
    inner = [v for v in range(net.n_nodes) if v not in (net.source, net.sink)]
    best = np.inf
    for bits in itertools.product([0, 1], repeat=len(inner)):
        side = {net.source} | {v for v, b in zip(inner, bits) if b}
        w = sum(c for a, b, c in zip(net.tails, net.heads, net.capacities) if a in side and b not in side)
        best = min(best, w)
    return best


def _random_network(seed, n):
    rng = np.random.default_rng(seed)
    arcs = [(a, b, float(rng.choice([rng.random() * 10, rng.integers(0, 5)])))
            for a in range(n) for b in range(n) if a != b and rng.random() < 0.35]
    return FlowNetwork.from_arcs(n, arcs)


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 14))
def test_maxflow_equals_enumerated_min_cut(seed, n):
    net = _random_network(seed, n)
    cut = min_st_cut(net)
    assert 0 in cut.source_side and 1 not in cut.source_side
    assert cut.cut_capacity(net) == pytest.approx(cut.flow_value, rel=1e-9, abs=1e-9)
    if n <= 12:
        assert cut.flow_value == pytest.approx(_enumerated_min(net), rel=1e-9, abs=1e-9)
    # conservation and capacity constraints
    f = cut.arc_flows
    assert np.all(f >= -1e-9) and np.all(f <= net.capacities + 1e-9)
    bal = np.zeros(n)
    np.add.at(bal, net.tails, -f)
    np.add.at(bal, net.heads, f)
    assert np.allclose(np.delete(bal, [0, 1]), 0, atol=1e-9)
    assert bal[1] == pytest.approx(cut.flow_value, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 40))
def test_agrees_with_networkx(seed, n):
    net = _random_network(seed, n)
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    for a, b, c in zip(net.tails.tolist(), net.heads.tolist(), net.capacities.tolist()):
        if g.has_edge(a, b):
            g[a][b]["capacity"] += c
        else:
            g.add_edge(a, b, capacity=c)
    ref = nx.maximum_flow_value(g, 0, 1)
    assert min_st_cut(net).flow_value == pytest.approx(ref, rel=1e-9, abs=1e-9)


def test_deterministic_source_side():
    net = _random_network(5, 12)
    assert min_st_cut(net).source_side == min_st_cut(net).source_side
