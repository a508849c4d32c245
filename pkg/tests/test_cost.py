import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _factories import random_instance
from glad.cost import (CostBreakdown, compute_cost, data_collection_cost, decompose, maintenance_cost,
                       marginal_cost, total_cost, traffic_cost, vertex_compute_cost, write_breakdowns)
from glad.errors import UnreachablePair
from glad.model import DataGraph, EdgeNetwork, GnnModelSpec, GraphLayout, Instance, fully_connected, make_servers


def _inst(n, d, links=(), mu=None, tau=1.0, dims=(52, 16, 2), **params):
    net = EdgeNetwork(make_servers(d, **params), fully_connected(d, tau))
    return Instance(net, DataGraph(n, links), GnnModelSpec(dims), mu)


def test_data_collection():
    inst = _inst(2, 2, mu=[[1, 5], [2, 3]])
    assert data_collection_cost(GraphLayout([0, 1]), inst) == 4
    assert data_collection_cost(GraphLayout([1, 0]), inst) == 7
    assert data_collection_cost(GraphLayout([1, 0]), _inst(2, 2)) == 0


def test_vertex_compute_cost():
    star = [(0, 1), (0, 2)]
    assert vertex_compute_cost(0, 0, _inst(3, 1, star)) == 0
    assert vertex_compute_cost(0, 0, _inst(3, 1, star, alpha=1, beta=1, gamma=1)) == 1018
    assert vertex_compute_cost(0, 0, _inst(4, 1, [(0, 1), (0, 2), (0, 3)], dims=(4, 4), alpha=2)) == 24


def test_compute_cost():
    assert compute_cost(GraphLayout([]), _inst(0, 2, alpha=1)) == 0
    homo = _inst(4, 3, [(0, 1), (1, 2)], alpha=1, beta=2, gamma=3)
    assert compute_cost(GraphLayout([0, 0, 0, 0]), homo) == compute_cost(GraphLayout([2, 1, 0, 1]), homo)
    het = _inst(4, 2, [(0, 1), (1, 2), (2, 3)], alpha=[1, 3], beta=[2, 0.5], gamma=[0, 1])
    lay = GraphLayout([0, 1, 1, 0])
    assert compute_cost(lay, het) == pytest.approx(sum(vertex_compute_cost(v, lay[v], het) for v in range(4)))


def test_traffic_double_count():
    assert traffic_cost(GraphLayout([0, 0, 0]), _inst(3, 2, [(0, 1), (1, 2)], tau=5)) == 0
    assert traffic_cost(GraphLayout([0, 1]), _inst(2, 2, [(0, 1)], tau=5)) == 10
    assert traffic_cost(GraphLayout([0, 1, 0]), _inst(3, 2, [(0, 1), (1, 2)], tau=3)) == 12


def test_traffic_unreachable():
    net = EdgeNetwork(make_servers(2), [[0, np.inf], [np.inf, 0]])
    inst = Instance(net, DataGraph(2, [(0, 1)]))
    assert traffic_cost(GraphLayout([1, 1]), inst) == 0
    with pytest.raises(UnreachablePair):
        traffic_cost(GraphLayout([0, 1]), inst)


def test_maintenance():
    assert maintenance_cost(GraphLayout([0, 1]), _inst(2, 2)) == 0
    assert maintenance_cost(GraphLayout([]), _inst(0, 2, epsilon=[7, 11])) == 18
    assert maintenance_cost(GraphLayout([0, 1, 1]), _inst(3, 2, rho=[1, 4])) == 9


def test_total_and_breakdown(tmp_path):
    assert total_cost(GraphLayout([0, 1]), _inst(2, 2, [(0, 1)], tau=0)) == CostBreakdown(0, 0, 0, 0, 0)
    inst = random_instance(3, 6, 3)
    lay = GraphLayout([0, 1, 2, 0, 1, 2])
    b = total_cost(lay, inst)
    assert b.total == b.c_u + b.c_p + b.c_t + b.c_m
    write_breakdowns(tmp_path / "b.csv", [("i", "l", b)])
    assert (tmp_path / "b.csv").read_text().splitlines()[0] == "instance,layout,c_u,c_p,c_t,c_m,total"


def naive_total(lay, inst):
    """Literal quadruple sum over (i, j, v, u) plus the other factors, no numpy tricks."""
    net, g = inst.network, inst.graph
    adj = {(u, v) for u, v in g.links.tolist()} | {(v, u) for u, v in g.links.tolist()}
    dims = inst.model.layer_dims
    total = sum(net.servers[i].epsilon for i in range(net.n_servers))
    for v in range(inst.n_vertices):
        s = net.servers[lay[v]]
        deg = sum(1 for u in range(inst.n_vertices) if (v, u) in adj)
        total += inst.upload_cost[v][lay[v]] + s.rho
        total += sum(s.alpha * deg * dims[k - 1] + s.beta * dims[k - 1] * dims[k] + s.gamma * dims[k]
                     for k in range(1, len(dims)))
    for i, j in itertools.product(range(net.n_servers), repeat=2):
        if i == j:
            continue
        for v, u in itertools.product(range(inst.n_vertices), repeat=2):
            if (v, u) in adj and lay[v] == i and lay[u] == j:
                total += net.traffic[i, j]
    return total


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 9), st.integers(1, 4))
def test_total_matches_naive_and_decomposition(seed, n, d):
    inst = random_instance(seed, n, d)
    lay = GraphLayout(np.random.default_rng(seed).integers(0, d, n))
    total = total_cost(lay, inst).total
    assert total == pytest.approx(naive_total(lay, inst), rel=1e-9)
    assert decompose(inst).evaluate(lay) == pytest.approx(total, rel=1e-9)


def test_decompose_terms():
    inst = _inst(1, 2, mu=[[2, 0]], dims=(1, 1), epsilon=[3, 4], rho=[1, 0], beta=[10, 0])
    dec = decompose(inst)
    assert dec.c0 == 7
    assert dec.unary[0, 0] == 13
    assert dec.pair_cost[0, 1] == 2.0


def test_marginal_cost_examples():
    zero = _inst(3, 2, [(1, 2)], dims=(1, 1))
    assert marginal_cost({1, 2}, 0, GraphLayout([0, 0, 1]), zero) == 0
    iso = _inst(3, 2, [(1, 2)], mu=[[2, 2], [0, 0], [0, 0]], dims=(1, 1), rho=1, gamma=3)
    assert marginal_cost({1, 2}, 0, GraphLayout([0, 0, 1]), iso) == 6
    linked = _inst(2, 2, [(0, 1)], mu=[[2, 2], [0, 0]], dims=(1, 1), tau=5, rho=1, gamma=3)
    assert marginal_cost({1}, 0, GraphLayout([0, 1]), linked) == pytest.approx(1 + 2 + 3 + 10)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_components_nonnegative(seed):
    inst = random_instance(seed, 7, 3)
    b = total_cost(GraphLayout(np.random.default_rng(seed).integers(0, 3, 7)), inst)
    assert min(b.c_u, b.c_p, b.c_t, b.c_m) >= 0


def test_pairwise_terms_are_regular():
    # what a two-label cut needs: E(i,i) + E(j,j) <= E(i,j) + E(j,i) for every pair
    inst = random_instance(11, 5, 4)
    p = decompose(inst).pair_cost
    for i, j in itertools.combinations(range(4), 2):
        assert p[i, i] + p[j, j] <= p[i, j] + p[j, i]
