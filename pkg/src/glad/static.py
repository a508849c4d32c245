"""Iterative pairwise graph-cut optimisation of a graph layout (GLAD-S).

Each iteration picks the least-visited connected server pair ``(i, j)``,
builds a flow network over the vertices currently on ``i`` or ``j`` and lets
the minimum s-t cut re-split them between the two servers.  The candidate is
kept only if it lowers the total cost; the search stops after ``R``
consecutive candidates fail to do so.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .cost import layout_energy, traffic_cost
from .errors import ConfigError, NoConnectedPairs, PairNotConnected
from .mincut import CutResult, FlowNetwork, min_st_cut
from .model import GraphLayout, Instance, validate_layout

SOURCE, SINK = 0, 1


@dataclass(frozen=True)
class GladConfig:
    """``r_max`` is an int >= 1 or ``"exhaustive"`` (one attempt per server pair).

    ``init`` is ``"random"``, ``"upload_first"`` or ``"warm_start"`` (uses
    ``warm_start``).  ``tie_break`` is ``"lowest"`` or ``"random"``.
    """

    r_max: object = 3
    init: str = "random"
    seed: int = 0
    warm_start: GraphLayout | None = None
    tie_break: str = "lowest"
    max_iterations: int | None = None

    def __post_init__(self):
        if self.r_max != "exhaustive":
            if isinstance(self.r_max, bool) or not isinstance(self.r_max, (int, np.integer)) or self.r_max < 1:
                raise ConfigError("r_max", f"must be an integer >= 1 or 'exhaustive', got {self.r_max!r}")
        if self.init not in ("random", "upload_first", "warm_start"):
            raise ConfigError("init", f"unknown strategy {self.init!r}")
        if self.init == "warm_start" and self.warm_start is None:
            raise ConfigError("warm_start", "required when init is 'warm_start'")
        if self.tie_break not in ("lowest", "random"):
            raise ConfigError("tie_break", f"unknown rule {self.tie_break!r}")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ConfigError("max_iterations", "must be >= 0")

    def resolve_r(self, n_servers: int) -> int:
        if self.r_max == "exhaustive":
            return max(1, n_servers * (n_servers - 1) // 2)
        return int(self.r_max)


class VisitCounter:
    """How often each connected server pair has been selected."""

    def __init__(self, pairs):
        self.pairs = tuple(sorted(tuple(sorted(p)) for p in pairs))
        self.counts = {p: 0 for p in self.pairs}

    @classmethod
    def for_network(cls, network):
        return cls(network.connected_pairs)

    def __getitem__(self, pair):
        return self.counts[tuple(sorted(pair))]


def select_pair(visits: VisitCounter, config: GladConfig | None = None, eligible=None, rng=None):
    """Pick a least-visited pair and count the visit.

    ``eligible`` optionally restricts the candidates (a predicate on the
    pair); ``None`` is returned when it rules out every pair.
    """
    if not visits.pairs:
        raise NoConnectedPairs("edge network has no connected server pair")
    tie = config.tie_break if config is not None else "lowest"
    counts = visits.counts
    best, cands = None, []
    for p in visits.pairs:
        if eligible is not None and not eligible(p):
            continue
        c = counts[p]
        if best is None or c < best:
            best, cands = c, [p]
        elif c == best and tie == "random":
            cands.append(p)
    if best is None:
        return None
    if tie == "random" and len(cands) > 1:
        rng = rng if rng is not None else np.random.default_rng(config.seed)
        pick = cands[int(rng.integers(len(cands)))]
    else:
        pick = cands[0]
    counts[pick] += 1
    return pick


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    pair_i: int
    pair_j: int
    candidate_cost: float
    accepted: bool
    best_cost: float
    r: int


@dataclass
class IterationLog:
    initial_cost: float = float("nan")
    records: list = field(default_factory=list)
    r_max: int = 0

    COLUMNS = ("iteration", "pair_i", "pair_j", "candidate_cost", "accepted", "best_cost", "r")

    @property
    def n_iterations(self) -> int:
        return len(self.records)

    @property
    def n_accepted(self) -> int:
        return sum(r.accepted for r in self.records)

    def accepted_costs(self) -> list:
        return [r.best_cost for r in self.records if r.accepted]

    @property
    def final_cost(self) -> float:
        return self.records[-1].best_cost if self.records else self.initial_cost

    def trailing_rejections(self) -> int:
        k = 0
        for rec in reversed(self.records):
            if rec.accepted:
                break
            k += 1
        return k

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.COLUMNS)
            for rec in self.records:
                w.writerow([rec.iteration, rec.pair_i, rec.pair_j, rec.candidate_cost,
                            int(rec.accepted), rec.best_cost, rec.r])


@dataclass(frozen=True, eq=False)
class AuxiliaryGraph:
    """Flow network for one server pair.

    Node 0 stands for server ``i`` (source), node 1 for server ``j`` (sink)
    and node ``2 + k`` for vertex ``vertices[k]``.  ``weight_i[k]`` is the
    cost vertex ``k`` contributes when placed on ``i`` (before infinite
    weights are capped for the solver); likewise ``weight_j``.
    """

    i: int
    j: int
    vertices: np.ndarray
    weight_i: np.ndarray
    weight_j: np.ndarray
    pair_links: np.ndarray
    pair_weight: float
    network: FlowNetwork


def _gather_neighbors(graph, verts):
    """Flattened neighbor lists of ``verts`` plus the owning index into ``verts``."""
    indptr, indices = graph.indptr, graph.indices
    starts = indptr[verts]
    counts = indptr[verts + 1] - starts
    total = int(counts.sum())
    owner = np.repeat(np.arange(len(verts)), counts)
    if total == 0:
        return owner, np.zeros(0, dtype=np.int64)
    offsets = np.repeat(starts - (np.cumsum(counts) - counts), counts) + np.arange(total)
    return owner, indices[offsets]


def _auxiliary(instance: Instance, i: int, j: int, lab: np.ndarray, free=None) -> AuxiliaryGraph:
    net = instance.network
    if i == j or not net.connectivity[i, j]:
        raise PairNotConnected(i, j)
    dec = instance.decomposition
    member = (lab == i) | (lab == j)
    if free is not None:
        member &= free
    verts = np.flatnonzero(member)
    n_aux = len(verts)
    w_i = dec.unary[verts, i].copy()
    w_j = dec.unary[verts, j].copy()
    local = np.full(len(lab), -1, dtype=np.int64)
    local[verts] = np.arange(n_aux)
    owner, nbrs = _gather_neighbors(instance.graph, verts)
    nbr_local = local[nbrs]
    fixed = nbr_local < 0
    if fixed.any():
        k = lab[nbrs[fixed]]
        w_i += np.bincount(owner[fixed], weights=dec.pair_cost[i, k], minlength=n_aux)
        w_j += np.bincount(owner[fixed], weights=dec.pair_cost[j, k], minlength=n_aux)
    inner = (~fixed) & (owner < nbr_local)
    pair_links = np.column_stack([owner[inner], nbr_local[inner]])
    pw = float(dec.pair_cost[i, j])

    cap_i, cap_j = w_i, w_j
    inf_i, inf_j = np.isinf(w_i), np.isinf(w_j)
    if inf_i.any() or inf_j.any():
        # Anything costlier than every finite cut keeps the cut off these arcs
        # whenever a finite cut exists.
        big = 1.0 + float(w_i[~inf_i].sum() + w_j[~inf_j].sum()) + 2.0 * pw * len(pair_links)
        cap_i = np.where(inf_i, big, w_i)
        cap_j = np.where(inf_j, big, w_j)
    nodes = np.arange(n_aux) + 2
    pl = pair_links + 2
    tails = np.concatenate([np.zeros(n_aux, dtype=np.int64), nodes, pl[:, 0], pl[:, 1]])
    heads = np.concatenate([nodes, np.ones(n_aux, dtype=np.int64), pl[:, 1], pl[:, 0]])
    caps = np.concatenate([cap_i, cap_j, np.full(2 * len(pl), pw)])
    network = FlowNetwork(n_aux + 2, tails, heads, caps, SOURCE, SINK)
    return AuxiliaryGraph(i, j, verts, w_i, w_j, pair_links, pw, network)


def build_auxiliary_graph(i: int, j: int, layout: GraphLayout, instance: Instance, free=None) -> AuxiliaryGraph:
    """Flow network whose minimum cut re-splits the vertices on ``i`` and ``j``.

    ``free`` optionally masks which vertices may move; the others act as
    fixed context and only contribute traffic to their movable neighbors.
    """
    return _auxiliary(instance, i, j, layout.assignment, free)


def _apply_cut(cut: CutResult, aux: AuxiliaryGraph, lab: np.ndarray) -> np.ndarray:
    out = lab.copy()
    if len(aux.vertices):
        on_source = np.fromiter((k + 2 in cut.source_side for k in range(len(aux.vertices))),
                                dtype=bool, count=len(aux.vertices))
        # source -> v crossing the cut (v on the sink side) means v goes to i.
        out[aux.vertices] = np.where(on_source, aux.j, aux.i)
    return out


def cut_to_layout(cut: CutResult, aux: AuxiliaryGraph, prev_layout: GraphLayout) -> GraphLayout:
    return GraphLayout(_apply_cut(cut, aux, prev_layout.assignment))


def init_layout(instance: Instance, strategy: str = "random", seed=0, layout=None) -> GraphLayout:
    n, d = instance.n_vertices, instance.n_servers
    if strategy == "random":
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        return GraphLayout(rng.integers(0, d, size=n))
    if strategy == "upload_first":
        if n == 0:
            return GraphLayout(np.zeros(0, dtype=np.int64))
        return GraphLayout(np.argmin(instance.upload_cost, axis=1))
    if strategy == "warm_start":
        if layout is None:
            raise ConfigError("warm_start", "no layout given")
        return validate_layout(layout, instance)
    raise ConfigError("init", f"unknown strategy {strategy!r}")


def _score(dec, a):
    """``(number of unreachable cross links, cost of the reachable part)``."""
    n = len(a)
    total = dec.c0 + float(np.sum(dec.unary[np.arange(n), a]))
    if len(dec.links) == 0:
        return 0, total
    pc = dec.pair_cost[a[dec.links[:, 0]], a[dec.links[:, 1]]]
    bad = np.isinf(pc)
    if bad.any():
        return int(bad.sum()), total + float(np.sum(pc[~bad]))
    return 0, total + float(np.sum(pc))


def _shown(score):
    return float("inf") if score[0] else score[1]


def optimize(instance: Instance, lab0, config: GladConfig, free=None, rng=None):
    """Run the accept-if-better pairwise cut loop from assignment ``lab0``.

    Only vertices with ``free[v]`` set may move.  Returns the final
    assignment array and the ``IterationLog``.
    """
    net = instance.network
    dec = instance.decomposition
    lab = np.array(lab0, dtype=np.int64)
    r_max = config.resolve_r(net.n_servers)
    cur = _score(dec, lab)
    log = IterationLog(_shown(cur), [], r_max)
    if net.n_servers < 2 or len(lab) == 0:
        return lab, log
    visits = VisitCounter.for_network(net)
    if not visits.pairs:
        raise NoConnectedPairs("edge network has no connected server pair")
    free_idx = None if free is None else np.flatnonzero(free)
    if free_idx is not None and len(free_idx) == 0:
        return lab, log
    r = 0
    it = 0
    while r < r_max:
        if config.max_iterations is not None and it >= config.max_iterations:
            break
        occupied = np.bincount(lab if free_idx is None else lab[free_idx], minlength=net.n_servers) > 0
        pair = select_pair(visits, config, lambda p: occupied[p[0]] or occupied[p[1]], rng)
        if pair is None:
            break
        i, j = pair
        aux = _auxiliary(instance, i, j, lab, free)
        cut = min_st_cut(aux.network)
        cand = _apply_cut(cut, aux, lab)
        score = _score(dec, cand)
        accepted = score < cur
        if accepted:
            lab, cur, r = cand, score, 0
        else:
            r += 1
        it += 1
        log.records.append(IterationRecord(it, i, j, _shown(score), bool(accepted), _shown(cur), r))
    return lab, log


def glad_s(instance: Instance, config: GladConfig | None = None):
    """Optimise a layout from scratch; returns ``(GraphLayout, IterationLog)``."""
    config = config or GladConfig()
    init_rng, pair_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(config.seed).spawn(2))
    start = init_layout(instance, config.init, init_rng, config.warm_start)
    lab, log = optimize(instance, start.assignment, config, rng=pair_rng)
    layout = GraphLayout(lab)
    traffic_cost(layout, instance)  # raises UnreachablePair if still infeasible
    return layout, log


def iteration_budget(n_vertices: int, n_links: int, r_max: int) -> int:
    """Shape ``(V+2)(E+2V)(V+E)R`` of the worst-case operation count."""
    v, e = n_vertices, n_links
    return (v + 2) * (e + 2 * v) * (v + e) * r_max


__all__ = [
    "AuxiliaryGraph", "GladConfig", "IterationLog", "IterationRecord", "VisitCounter",
    "build_auxiliary_graph", "cut_to_layout", "glad_s", "init_layout", "layout_energy", "optimize",
    "select_pair", "iteration_budget",
]
