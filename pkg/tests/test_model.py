import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from glad.errors import DuplicateLink, MissingVertex, SelfLoop, UnknownServer, ValidationError
from glad.model import (DataGraph, EdgeNetwork, EdgeServer, GnnModelSpec, GraphLayout, Instance,
                        cross_links, fully_connected, make_servers, resident_vertices, validate_layout)


def _inst(n=3, d=2, links=()):
    return Instance(EdgeNetwork(make_servers(d), fully_connected(d)), DataGraph(n, links))


def test_validate_layout_ok():
    inst = _inst()
    assert validate_layout({0: 0, 1: 0, 2: 0}, inst) == GraphLayout([0, 0, 0])


def test_validate_layout_missing_vertex():
    with pytest.raises(MissingVertex) as e:
        validate_layout({0: 0, 1: 1}, _inst())
    assert e.value.vertex == 2


def test_validate_layout_unknown_server():
    with pytest.raises(UnknownServer) as e:
        validate_layout({0: 0, 1: 9, 2: 0}, _inst())
    assert e.value.server == 9


def test_resident_vertices():
    inst = _inst()
    all0 = GraphLayout([0, 0, 0])
    assert resident_vertices(all0, 0, inst) == {0, 1, 2}
    assert resident_vertices(all0, 1, inst) == set()
    assert resident_vertices(GraphLayout([0, 1, 1]), 1, inst) == {1, 2}
    with pytest.raises(UnknownServer):
        resident_vertices(all0, 5, inst)


def test_cross_links():
    tri = DataGraph(3, [(0, 1), (1, 2), (0, 2)])
    assert cross_links(GraphLayout([0, 0, 0]), tri) == set()
    assert cross_links(GraphLayout([0, 1]), DataGraph(2, [(0, 1)])) == {((0, 1), (0, 1))}
    path = DataGraph(3, [(0, 1), (1, 2)])
    assert len(cross_links(GraphLayout([0, 1, 0]), path)) == 2


def test_graph_rejects_bad_links():
    with pytest.raises(SelfLoop):
        DataGraph(2, [(1, 1)])
    with pytest.raises(DuplicateLink):
        DataGraph(2, [(0, 1), (1, 0)])
    with pytest.raises(ValidationError):
        DataGraph.from_adjacency([[0, 1], [0, 0]])


def test_graph_ids_and_neighbors():
    g = DataGraph.from_id_links([10, 20, 30], [(30, 10), (10, 20)])
    assert g.id_links.tolist() == [[10, 20], [10, 30]]
    assert sorted(g.ids[g.neighbors(g.position(10))].tolist()) == [20, 30]
    assert g.degree.tolist() == [2, 1, 1]


def test_network_invariants():
    servers = make_servers(2)
    with pytest.raises(ValidationError):
        EdgeNetwork(servers, [[0, 1], [2, 0]])
    with pytest.raises(ValidationError):
        EdgeNetwork(servers, [[1, 1], [1, 0]])
    with pytest.raises(ValidationError):
        EdgeNetwork(servers, [[0, 1], [1, 0]], connectivity=[[1, 0], [0, 1]])
    net = EdgeNetwork(make_servers(3), [[0, 1, np.inf], [1, 0, 2], [np.inf, 2, 0]])
    assert net.connected_pairs == ((0, 1), (1, 2))
    with pytest.raises(ValidationError):
        EdgeServer(0, alpha=-1.0)


def test_model_spec_and_instance_shapes():
    with pytest.raises(ValidationError):
        GnnModelSpec((5,))
    with pytest.raises(ValidationError):
        GnnModelSpec((5, 0))
    with pytest.raises(ValidationError):
        Instance(EdgeNetwork(make_servers(2), fully_connected(2)), DataGraph(3), upload_cost=np.zeros((2, 2)))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(1, 5), st.integers(0, 2**31 - 1))
def test_resident_sets_partition(n, d, seed):
    rng = np.random.default_rng(seed)
    g = DataGraph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.3])
    inst = Instance(EdgeNetwork(make_servers(d), fully_connected(d)), g)
    lay = GraphLayout(rng.integers(0, d, n))
    sets = [resident_vertices(lay, i, inst) for i in range(d)]
    assert set().union(*sets) == set(range(n))
    assert sum(len(s) for s in sets) == n
    same = all(lay[u] == lay[v] for u, v in g.links.tolist())
    assert (len(cross_links(lay, g)) == 0) == same
