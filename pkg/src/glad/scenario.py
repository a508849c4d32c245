"""Synthetic instances, churn traces and edge-list ingestion.

Everything here is driven by an explicit seed.  Sub-streams are split with
``numpy.random.SeedSequence`` so that, say, changing the link model does not
move the vertex coordinates.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

import networkx as nx
import numpy as np

from .dynamic import LinkDelete, LinkInsert, SlotTrace, VertexDelete, VertexInsert
from .errors import ConfigError, EmptyInput, ParseError, SelfLoop
from .model import MACHINE_CLASSES, DataGraph, EdgeNetwork, EdgeServer, GnnModelSpec, Instance

# Per-class (alpha, beta, gamma): A is the slowest/most expensive machine, C the cheapest.
DEFAULT_CLASS_PARAMS = {
    "A": (2.0e-4, 1.0e-3, 2.0e-4),
    "B": (1.5e-4, 6.0e-4, 1.5e-4),
    "C": (1.0e-4, 3.0e-4, 1.0e-4),
}


def kmeans_pivots(points, k: int, seed=0, tol: float = 1e-6, max_rounds: int = 100) -> np.ndarray:
    """Lloyd's k-means; returns the ``k`` centroids.

    Starts from ``k`` distinct sample points.  A cluster that loses all its
    members is re-seeded at the point farthest from its current centroid.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise EmptyInput("no points to cluster")
    if not 1 <= k <= len(pts):
        raise ConfigError("k", f"must be in 1..{len(pts)}, got {k}")
    rng = np.random.default_rng(seed)
    centers = pts[rng.choice(len(pts), size=k, replace=False)].copy()
    for _ in range(max_rounds):
        d2 = ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        label = np.argmin(d2, axis=1)
        new = centers.copy()
        counts = np.bincount(label, minlength=k)
        for c in range(k):
            if counts[c]:
                new[c] = pts[label == c].mean(axis=0)
        for c in np.flatnonzero(counts == 0):
            far = int(np.argmax(d2[np.arange(len(pts)), label]))
            new[c] = pts[far]
            label[far] = c
            d2[far, :] = 0.0
        shift = float(np.max(np.linalg.norm(new - centers, axis=1)))
        centers = new
        if shift < tol:
            break
    return centers


def class_counts(n_servers: int) -> dict:
    """Equal split over A/B/C, remainders handed out A first, then B."""
    base, rem = divmod(n_servers, len(MACHINE_CLASSES))
    return {c: base + (1 if k < rem else 0) for k, c in enumerate(MACHINE_CLASSES)}


@dataclass
class SynthesisConfig:
    n_vertices: int = 100
    n_servers: int = 10
    link_model: str = "pa"  # "pa" (preferential attachment, param m) or "er" (param p)
    link_param: float = 2
    layer_dims: tuple = (52, 16, 2)
    distance_factor_upload: float = 10.0
    distance_factor_traffic: float = 5.0
    machine_class_params: dict = field(default_factory=lambda: dict(DEFAULT_CLASS_PARAMS))
    rho_mean: float = 0.5
    rho_std: float = 0.1
    epsilon_mean: float = 20.0
    epsilon_std: float = 5.0
    connectivity: str = "full"  # "full" or "knearest"
    k_nearest: int = 3
    seed: int = 0

    def __post_init__(self):
        self.layer_dims = tuple(int(x) for x in self.layer_dims)
        self.machine_class_params = {c: tuple(float(x) for x in v) for c, v in self.machine_class_params.items()}
        self.validate()

    def validate(self):
        for name in ("n_vertices", "n_servers"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise ConfigError(name, f"must be a positive integer, got {v!r}")
        if self.n_servers > self.n_vertices:
            raise ConfigError("n_servers", "cannot exceed n_vertices (servers sit at k-means pivots)")
        if self.link_model == "er":
            if not 0.0 <= self.link_param <= 1.0:
                raise ConfigError("link_param", f"probability must be in [0, 1], got {self.link_param}")
        elif self.link_model == "pa":
            m = self.link_param
            if int(m) != m or not 1 <= m < max(2, self.n_vertices):
                raise ConfigError("link_param", f"attachment count must be an integer in 1..n_vertices-1, got {m}")
        else:
            raise ConfigError("link_model", f"expected 'pa' or 'er', got {self.link_model!r}")
        try:
            GnnModelSpec(self.layer_dims)
        except ValueError as exc:
            raise ConfigError("layer_dims", str(exc)) from None
        for name in ("distance_factor_upload", "distance_factor_traffic"):
            if not getattr(self, name) >= 0:
                raise ConfigError(name, "must be >= 0")
        for c in MACHINE_CLASSES:
            triple = self.machine_class_params.get(c)
            if triple is None or len(triple) != 3 or min(triple) < 0:
                raise ConfigError(f"machine_class_params.{c}", "needs three values >= 0")
        for name in ("rho_std", "epsilon_std"):
            if not getattr(self, name) >= 0:
                raise ConfigError(name, "std must be >= 0")
        if self.connectivity == "knearest":
            if not 1 <= self.k_nearest < self.n_servers:
                raise ConfigError("k_nearest", f"must be in 1..n_servers-1, got {self.k_nearest}")
        elif self.connectivity != "full":
            raise ConfigError("connectivity", f"expected 'full' or 'knearest', got {self.connectivity!r}")

    @classmethod
    def from_dict(cls, data: dict, prefix: str = ""):
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(prefix + key, "unknown field")
        try:
            return cls(**data)
        except ConfigError as exc:
            raise ConfigError(prefix + exc.field, exc.detail) from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(prefix.rstrip(".") or "config", str(exc)) from None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["layer_dims"] = list(self.layer_dims)
        out["machine_class_params"] = {c: list(v) for c, v in self.machine_class_params.items()}
        return out


def _link_graph(cfg: SynthesisConfig, seed: int):
    n = cfg.n_vertices
    if cfg.link_model == "er":
        g = nx.fast_gnp_random_graph(n, cfg.link_param, seed=seed)
    elif n <= cfg.link_param:
        g = nx.complete_graph(n)
    else:
        g = nx.barabasi_albert_graph(n, int(cfg.link_param), seed=seed)
    return sorted((min(u, v), max(u, v)) for u, v in g.edges())


def _distances(a, b):
    return np.linalg.norm(np.asarray(a)[:, None, :] - np.asarray(b)[None, :, :], axis=2)


def synthesize_instance(cfg: SynthesisConfig, name: str = "synthetic") -> Instance:
    ss = np.random.SeedSequence(cfg.seed)
    s_coords, s_kmeans, s_classes, s_maint, s_links = ss.spawn(5)
    coords = np.random.default_rng(s_coords).random((cfg.n_vertices, 2))
    pivots = kmeans_pivots(coords, cfg.n_servers, np.random.default_rng(s_kmeans))

    counts = class_counts(cfg.n_servers)
    classes = [c for c in MACHINE_CLASSES for _ in range(counts[c])]
    np.random.default_rng(s_classes).shuffle(classes)

    rng = np.random.default_rng(s_maint)
    rho = np.maximum(0.0, rng.normal(cfg.rho_mean, cfg.rho_std, cfg.n_servers))
    eps = np.maximum(0.0, rng.normal(cfg.epsilon_mean, cfg.epsilon_std, cfg.n_servers))

    servers = []
    for i in range(cfg.n_servers):
        a, b, g = cfg.machine_class_params[classes[i]]
        servers.append(EdgeServer(i, (float(pivots[i, 0]), float(pivots[i, 1])), classes[i],
                                  a, b, g, float(rho[i]), float(eps[i])))

    dist = _distances(pivots, pivots)
    traffic = cfg.distance_factor_traffic * dist
    np.fill_diagonal(traffic, 0.0)
    if cfg.connectivity == "knearest":
        order = np.argsort(dist + np.diag(np.full(cfg.n_servers, np.inf)), axis=1)[:, : cfg.k_nearest]
        w = np.zeros_like(dist, dtype=bool)
        w[np.repeat(np.arange(cfg.n_servers), cfg.k_nearest), order.ravel()] = True
        w |= w.T
        traffic = np.where(w | np.eye(cfg.n_servers, dtype=bool), traffic, np.inf)
    network = EdgeNetwork(servers, traffic)

    links = _link_graph(cfg, int(s_links.generate_state(1)[0]))
    graph = DataGraph(cfg.n_vertices, links, coords=coords)
    upload = cfg.distance_factor_upload * _distances(coords, pivots)
    return Instance(network, graph, GnnModelSpec(cfg.layer_dims), upload, name)


@dataclass
class ChurnConfig:
    link_change_pct: float = 0.01
    vertex_change_pct: float = 0.0
    n_slots: int = 10
    seed: int = 0
    new_vertex_links: int = 2
    retry_cap: int = 100
    deletion_only_slots: tuple = ()

    def __post_init__(self):
        self.deletion_only_slots = tuple(int(t) for t in self.deletion_only_slots)
        for name in ("link_change_pct", "vertex_change_pct"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(name, f"must be a fraction in [0, 1], got {v}")
        if isinstance(self.n_slots, bool) or not isinstance(self.n_slots, (int, np.integer)) or self.n_slots < 1:
            raise ConfigError("n_slots", f"must be an integer >= 1, got {self.n_slots!r}")
        if self.new_vertex_links < 0:
            raise ConfigError("new_vertex_links", "must be >= 0")

    @classmethod
    def from_dict(cls, data: dict, prefix: str = ""):
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(prefix + key, "unknown field")
        try:
            return cls(**data)
        except ConfigError as exc:
            raise ConfigError(prefix + exc.field, exc.detail) from None


class _Pool:
    """List + index for O(1) uniform sampling and removal."""

    def __init__(self, items=()):
        self.items = list(items)
        self.where = {x: k for k, x in enumerate(self.items)}

    def __contains__(self, x):
        return x in self.where

    def __len__(self):
        return len(self.items)

    def add(self, x):
        self.where[x] = len(self.items)
        self.items.append(x)

    def remove(self, x):
        k = self.where.pop(x)
        last = self.items.pop()
        if k < len(self.items):
            self.items[k] = last
            self.where[last] = k

    def pick(self, rng):
        return self.items[int(rng.integers(len(self.items)))]


def _gauss_count(rng, mean):
    if mean <= 0:
        return 0
    return max(0, int(round(rng.normal(mean, mean / 2))))


def generate_trace(graph: DataGraph, churn: ChurnConfig, server_coords=None, upload_factor: float = 10.0):
    """Seeded churn trace over ``churn.n_slots`` slots.

    Per slot the number of link changes is drawn from a normal distribution
    with mean ``pct * |E|`` (of the starting graph) and half that as std.
    Each change is an insertion or a deletion with equal odds; insertions pick
    an absent pair (re-drawn up to ``retry_cap`` times), deletions pick an
    existing link.  Vertex changes work the same way on ``|V|``.  Inserted
    vertices get uniform unit-square coords and, when ``server_coords`` is
    given, an upload row ``upload_factor * distance``.  Within a slot
    insertions come first and deletions last.
    """
    rng = np.random.default_rng(churn.seed)
    vertices = _Pool(graph.ids.tolist())
    links = _Pool(sorted(graph.link_set()))
    next_id = int(graph.ids.max()) + 1 if graph.n_vertices else 0
    link_mean = churn.link_change_pct * graph.n_links
    vert_mean = churn.vertex_change_pct * graph.n_vertices
    srv = None if server_coords is None else np.asarray(server_coords, dtype=float)

    trace = []
    for t in range(1, churn.n_slots + 1):
        only_del = t in churn.deletion_only_slots
        ins_v, ins_l, del_l, del_v = [], [], [], []
        born = set()

        for _ in range(_gauss_count(rng, vert_mean)):
            if only_del or rng.random() < 0.5:
                # deletion of a vertex that existed before this slot
                cands = [v for v in vertices.items if v not in born]
                if not cands:
                    continue
                v = cands[int(rng.integers(len(cands)))]
                del_v.append(v)
                vertices.remove(v)
                continue
            v = next_id
            next_id += 1
            k = min(churn.new_vertex_links, len(vertices))
            nbrs = tuple(sorted(int(x) for x in rng.choice(vertices.items, size=k, replace=False))) if k else ()
            xy = rng.random(2)
            mu = None if srv is None else tuple((upload_factor * np.linalg.norm(srv - xy, axis=1)).tolist())
            ins_v.append(VertexInsert(v, (float(xy[0]), float(xy[1])), mu, nbrs))
            vertices.add(v)
            born.add(v)
            for u in nbrs:
                links.add((min(u, v), max(u, v)))

        removed_v = set(del_v)
        dropped = set()  # re-inserting these would precede their deletion in the slot
        for _ in range(_gauss_count(rng, link_mean)):
            if only_del or rng.random() < 0.5:
                for _try in range(churn.retry_cap):
                    if not len(links):
                        break
                    key = links.pick(rng)
                    if key[0] not in removed_v and key[1] not in removed_v:
                        links.remove(key)
                        dropped.add(key)
                        del_l.append(LinkDelete(*key))
                        break
                continue
            for _try in range(churn.retry_cap):
                if len(vertices) < 2:
                    break
                a, b = vertices.pick(rng), vertices.pick(rng)
                key = (min(a, b), max(a, b))
                if a != b and key not in links and key not in dropped:
                    links.add(key)
                    ins_l.append(LinkInsert(*key))
                    break

        for v in del_v:
            for key in [k for k in links.items if v in k]:
                links.remove(key)
        trace.append(SlotTrace(t, tuple(ins_v + ins_l + del_l + [VertexDelete(v) for v in del_v])))
    return trace


def load_graph(path, coords_path=None) -> DataGraph:
    """Read a whitespace-separated edge list (``#`` comments, blank lines ok)."""
    ids = {}
    links = set()
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ParseError(f"expected 'u v', got {raw.strip()!r}", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"non-integer vertex id in {raw.strip()!r}", lineno) from None
            if u == v:
                raise SelfLoop(u, lineno)
            ids.setdefault(u, None)
            ids.setdefault(v, None)
            links.add((min(u, v), max(u, v)))
    order = list(ids)
    coords = None
    if coords_path is not None:
        table = {}
        with open(coords_path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line or line.lower().startswith("id"):
                    continue
                parts = [p.strip() for p in line.split(",")]
                if len(parts) != 3:
                    raise ParseError(f"expected 'id,x,y', got {raw.strip()!r}", lineno)
                try:
                    table[int(parts[0])] = (float(parts[1]), float(parts[2]))
                except ValueError:
                    raise ParseError(f"bad number in {raw.strip()!r}", lineno) from None
        missing = [v for v in order if v not in table]
        if missing:
            raise ParseError(f"no coordinates for vertex {missing[0]}")
        coords = [table[v] for v in order]
    return DataGraph.from_id_links(order, sorted(links), coords=coords)

