"""Edge network, data graph, GNN layer spec, problem instance and graph layout.

Vertices and servers are addressed by dense 0-based positions internally.
A ``DataGraph`` additionally carries stable integer ``ids`` for its vertices,
so that layouts and evolution events survive re-indexing between time slots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateLink,
    MissingVertex,
    SelfLoop,
    UnknownServer,
    UnknownVertex,
    ValidationError,
)

MACHINE_CLASSES = ("A", "B", "C")


def _frozen(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class EdgeServer:
    id: int
    coords: tuple = (0.0, 0.0)
    machine_class: str = "A"
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    rho: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.machine_class not in MACHINE_CLASSES:
            raise ValidationError(f"server {self.id}: unknown machine class {self.machine_class!r}")
        for name in ("alpha", "beta", "gamma", "rho", "epsilon"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValidationError(f"server {self.id}: {name} must be finite and >= 0, got {value}")


class EdgeNetwork:
    """Servers plus symmetric connectivity ``w`` and unit traffic cost ``tau``.

    Unreachable pairs carry ``inf`` in ``traffic``; that is the only way an
    unreachable pair is represented, so arithmetic on it can never silently
    look cheap.
    """

    def __init__(self, servers: Sequence[EdgeServer], traffic, connectivity=None):
        servers = tuple(servers)
        n = len(servers)
        if n == 0:
            raise ValidationError("edge network needs at least one server")
        for pos, s in enumerate(servers):
            if s.id != pos:
                raise ValidationError(f"server ids must be dense and ordered; position {pos} has id {s.id}")
        tau = np.array(traffic, dtype=float)
        if tau.shape != (n, n):
            raise ValidationError(f"traffic matrix must be {n}x{n}, got {tau.shape}")
        if np.isnan(tau).any():
            raise ValidationError("traffic matrix contains NaN")
        if connectivity is None:
            w = np.isfinite(tau)
        else:
            w = np.array(connectivity, dtype=bool)
            if w.shape != (n, n):
                raise ValidationError(f"connectivity matrix must be {n}x{n}, got {w.shape}")
        np.fill_diagonal(w, True)
        if not np.array_equal(w, w.T):
            raise ValidationError("connectivity matrix must be symmetric")
        if not np.array_equal(tau, tau.T):
            raise ValidationError("traffic matrix must be symmetric")
        if np.any(np.diag(tau) != 0):
            raise ValidationError("traffic matrix must have a zero diagonal")
        if np.any(tau < 0):
            raise ValidationError("traffic costs must be >= 0")
        if not np.array_equal(np.isfinite(tau), w):
            raise ValidationError("traffic must be finite exactly where servers are connected")
        self.servers = servers
        self.connectivity = _frozen(w)
        self.traffic = _frozen(tau)

    def __len__(self):
        return len(self.servers)

    @property
    def n_servers(self) -> int:
        return len(self.servers)

    def _param(self, name):
        return _frozen(np.array([getattr(s, name) for s in self.servers], dtype=float))

    @cached_property
    def alpha(self):
        return self._param("alpha")

    @cached_property
    def beta(self):
        return self._param("beta")

    @cached_property
    def gamma(self):
        return self._param("gamma")

    @cached_property
    def rho(self):
        return self._param("rho")

    @cached_property
    def epsilon(self):
        return self._param("epsilon")

    @cached_property
    def coords(self):
        return _frozen(np.array([s.coords for s in self.servers], dtype=float).reshape(-1, 2))

    @cached_property
    def connected_pairs(self) -> tuple:
        """Unordered pairs ``(i, j)``, ``i < j``, with ``w_ij = 1``, in lexicographic order."""
        n = self.n_servers
        return tuple((i, j) for i in range(n) for j in range(i + 1, n) if self.connectivity[i, j])


class DataGraph:
    """Undirected simple graph of clients.

    ``links`` is an ``(m, 2)`` array of vertex *positions* with ``u < v``,
    sorted and duplicate free.  ``ids`` maps positions to stable vertex ids.
    """

    def __init__(self, n_vertices: int, links=(), ids=None, coords=None, names=None):
        n = int(n_vertices)
        if n < 0:
            raise ValidationError("vertex count must be >= 0")
        ids = np.arange(n, dtype=np.int64) if ids is None else np.array(ids, dtype=np.int64).reshape(-1)
        if len(ids) != n:
            raise ValidationError(f"expected {n} vertex ids, got {len(ids)}")
        if len(np.unique(ids)) != n:
            raise ValidationError("vertex ids must be unique")
        links = np.array(links, dtype=np.int64).reshape(-1, 2)
        if len(links):
            if links.min() < 0 or links.max() >= n:
                bad = links[(links < 0) | (links >= n)][0]
                raise UnknownVertex(int(bad))
            loops = links[:, 0] == links[:, 1]
            if loops.any():
                raise SelfLoop(int(ids[links[loops][0, 0]]))
            links = np.sort(links, axis=1)
            order = np.lexsort((links[:, 1], links[:, 0]))
            links = links[order]
            dup = np.all(links[1:] == links[:-1], axis=1)
            if dup.any():
                u, v = links[1:][dup][0]
                raise DuplicateLink(int(ids[u]), int(ids[v]))
        if coords is not None:
            coords = np.array(coords, dtype=float).reshape(-1, 2)
            if len(coords) != n:
                raise ValidationError(f"expected {n} coordinate rows, got {len(coords)}")
            coords = _frozen(coords)
        if names is not None:
            names = tuple(str(x) for x in names)
            if len(names) != n:
                raise ValidationError(f"expected {n} vertex names, got {len(names)}")
        self.ids = _frozen(ids)
        self.links = _frozen(links)
        self.coords = coords
        self.names = names

    @classmethod
    def from_id_links(cls, ids, id_links, coords=None, names=None):
        """Build from links expressed in vertex ids rather than positions."""
        ids = np.array(ids, dtype=np.int64).reshape(-1)
        index = {int(v): p for p, v in enumerate(ids)}
        pos = []
        for u, v in id_links:
            if int(u) not in index:
                raise UnknownVertex(int(u))
            if int(v) not in index:
                raise UnknownVertex(int(v))
            pos.append((index[int(u)], index[int(v)]))
        return cls(len(ids), pos, ids=ids, coords=coords, names=names)

    @classmethod
    def from_adjacency(cls, adjacency, **kwargs):
        a = np.asarray(adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError("adjacency must be a square matrix")
        a = a != 0
        if not np.array_equal(a, a.T):
            raise ValidationError("adjacency must be symmetric (e_uv == e_vu)")
        if np.diag(a).any():
            raise SelfLoop(int(np.flatnonzero(np.diag(a))[0]))
        u, v = np.nonzero(np.triu(a, 1))
        return cls(a.shape[0], np.column_stack([u, v]), **kwargs)

    @property
    def n_vertices(self) -> int:
        return len(self.ids)

    @property
    def n_links(self) -> int:
        return len(self.links)

    def __len__(self):
        return self.n_vertices

    @cached_property
    def index(self) -> dict:
        """Vertex id -> position."""
        return {int(v): p for p, v in enumerate(self.ids)}

    def position(self, vertex_id) -> int:
        try:
            return self.index[int(vertex_id)]
        except KeyError:
            raise UnknownVertex(vertex_id) from None

    @cached_property
    def degree(self):
        return _frozen(np.bincount(self.links.ravel(), minlength=self.n_vertices))

    @cached_property
    def _csr(self):
        n = self.n_vertices
        if self.n_links == 0:
            return np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)
        src = np.concatenate([self.links[:, 0], self.links[:, 1]])
        dst = np.concatenate([self.links[:, 1], self.links[:, 0]])
        order = np.lexsort((dst, src))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return _frozen(indptr), _frozen(dst[order])

    @property
    def indptr(self):
        return self._csr[0]

    @property
    def indices(self):
        return self._csr[1]

    def neighbors(self, v: int):
        """Positions adjacent to position ``v``."""
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @cached_property
    def id_links(self):
        return _frozen(self.ids[self.links])

    def link_set(self) -> set:
        """Links as a set of ``(min_id, max_id)`` tuples."""
        ends = np.sort(self.id_links, axis=1)
        return set(map(tuple, ends.tolist()))


@dataclass(frozen=True)
class GnnModelSpec:
    """Layer sizes ``s_0 .. s_K``; only the dimensions enter the cost model."""

    layer_dims: tuple = (52, 16, 2)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.layer_dims)
        if len(dims) < 2:
            raise ValidationError("layer_dims needs at least an input and an output size")
        if min(dims) < 1:
            raise ValidationError("layer dims must be >= 1")
        object.__setattr__(self, "layer_dims", dims)

    @property
    def n_layers(self) -> int:
        return len(self.layer_dims) - 1

    @property
    def sum_in(self) -> int:
        return sum(self.layer_dims[:-1])

    @property
    def sum_product(self) -> int:
        d = self.layer_dims
        return sum(a * b for a, b in zip(d[:-1], d[1:]))

    @property
    def sum_out(self) -> int:
        return sum(self.layer_dims[1:])


@dataclass(frozen=True, eq=False)
class Instance:
    network: EdgeNetwork
    graph: DataGraph
    model: GnnModelSpec = field(default_factory=GnnModelSpec)
    upload_cost: np.ndarray = None
    name: str = "instance"

    def __post_init__(self):
        n, d = self.graph.n_vertices, self.network.n_servers
        mu = np.zeros((n, d)) if self.upload_cost is None else np.array(self.upload_cost, dtype=float)
        if mu.shape != (n, d):
            raise ValidationError(f"upload_cost must be {n}x{d}, got {mu.shape}")
        if not np.isfinite(mu).all() or (mu < 0).any():
            raise ValidationError("upload costs must be finite and >= 0")
        object.__setattr__(self, "upload_cost", _frozen(mu))

    @property
    def n_vertices(self) -> int:
        return self.graph.n_vertices

    @property
    def n_servers(self) -> int:
        return self.network.n_servers

    @cached_property
    def decomposition(self):
        from .cost import decompose

        return decompose(self)


class GraphLayout:
    """Assignment of every vertex position to one server.

    Entries of ``-1`` mark unassigned vertices; such a layout exists only so
    that ``validate_layout`` can report which vertex is missing.
    """

    __slots__ = ("assignment",)

    def __init__(self, assignment):
        a = np.array(assignment, dtype=np.int64).reshape(-1)
        self.assignment = _frozen(a)

    @classmethod
    def from_mapping(cls, mapping: Mapping, graph: DataGraph):
        a = np.full(graph.n_vertices, -1, dtype=np.int64)
        for vid, server in mapping.items():
            a[graph.position(vid)] = int(server)
        return cls(a)

    def to_mapping(self, graph: DataGraph) -> dict:
        return {int(v): int(s) for v, s in zip(graph.ids, self.assignment)}

    def __len__(self):
        return len(self.assignment)

    def __getitem__(self, v):
        return int(self.assignment[v])

    def __iter__(self):
        return iter(self.assignment.tolist())

    def __eq__(self, other):
        if not isinstance(other, GraphLayout):
            return NotImplemented
        return np.array_equal(self.assignment, other.assignment)

    def __hash__(self):
        return hash(self.assignment.tobytes())

    def __repr__(self):
        return f"GraphLayout({self.assignment.tolist()})"


def validate_layout(layout, instance: Instance) -> GraphLayout:
    """Return the layout if every vertex sits on exactly one existing server.

    ``layout`` may also be a plain mapping from vertex id to server id.
    """
    graph = instance.graph
    if isinstance(layout, Mapping):
        for vid in layout:
            graph.position(vid)
        for vid in graph.ids.tolist():
            if vid not in layout:
                raise MissingVertex(vid)
        layout = GraphLayout.from_mapping(layout, graph)
    a = layout.assignment
    if len(a) != graph.n_vertices:
        if len(a) < graph.n_vertices:
            raise MissingVertex(int(graph.ids[len(a)]))
        raise UnknownVertex(len(a))
    missing = np.flatnonzero(a < 0)
    if len(missing):
        raise MissingVertex(int(graph.ids[missing[0]]))
    bad = np.flatnonzero(a >= instance.n_servers)
    if len(bad):
        raise UnknownServer(int(a[bad[0]]))
    return layout


def resident_vertices(layout: GraphLayout, server: int, instance: Instance | None = None) -> set:
    """Vertices placed on ``server``; ids when ``instance`` is given, positions otherwise."""
    if server < 0 or (instance is not None and server >= instance.n_servers):
        raise UnknownServer(server)
    pos = np.flatnonzero(layout.assignment == server)
    if instance is not None:
        return set(instance.graph.ids[pos].tolist())
    return set(pos.tolist())


def cross_links(layout: GraphLayout, graph: DataGraph) -> set:
    """``{((u, v), (i, j))}`` for every link whose endpoints sit on different servers."""
    a = layout.assignment
    lu, lv = graph.links[:, 0], graph.links[:, 1]
    split = a[lu] != a[lv]
    out = set()
    for u, v in graph.links[split].tolist():
        out.add(((int(graph.ids[u]), int(graph.ids[v])), (int(a[u]), int(a[v]))))
    return out


def fully_connected(n: int, tau: float = 1.0):
    """Helper traffic matrix: every distinct pair costs ``tau``."""
    t = np.full((n, n), float(tau))
    np.fill_diagonal(t, 0.0)
    return t


def make_servers(n: int, alpha=0.0, beta=0.0, gamma=0.0, rho=0.0, epsilon=0.0, classes: Iterable | None = None):
    """Servers with (possibly per-server) scalar cost parameters."""
    def at(x, i):
        return float(np.broadcast_to(np.asarray(x, dtype=float), (n,))[i])

    classes = list(classes) if classes is not None else ["A"] * n
    return [
        EdgeServer(i, (0.0, 0.0), classes[i], at(alpha, i), at(beta, i), at(gamma, i), at(rho, i), at(epsilon, i))
        for i in range(n)
    ]
