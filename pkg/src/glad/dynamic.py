"""Evolving data graphs: incremental re-optimisation and adaptive scheduling.

A timeline is a sequence of slots.  Between slots the data graph changes by
vertex/link insertions and deletions.  Three re-optimisation strategies are
available per slot:

* GLAD-E re-runs the pairwise cut loop on the vertices the changes can have
  made more expensive, keeping everything else where it was;
* GLAD-S re-runs it on the whole graph, warm-started from the GLAD-E result,
  so its cost is never above the GLAD-E cost for the same slot;
* GLAD-A estimates the drift between the two and calls GLAD-S once the
  accumulated estimate exceeds the budget ``theta``.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .cost import CostBreakdown, layout_energy, total_cost
from .errors import DuplicateLink, MissingLink, SelfLoop, UnknownVertex, ValidationError
from .model import DataGraph, GraphLayout, Instance
from .static import GladConfig, IterationLog, glad_s, optimize


@dataclass(frozen=True)
class VertexInsert:
    vertex: int
    coords: tuple | None = None
    upload_cost: tuple | None = None
    links: tuple = ()
    kind = "vertex_insert"


@dataclass(frozen=True)
class VertexDelete:
    vertex: int
    kind = "vertex_delete"


@dataclass(frozen=True)
class LinkInsert:
    u: int
    v: int
    kind = "link_insert"


@dataclass(frozen=True)
class LinkDelete:
    u: int
    v: int
    kind = "link_delete"


EVENT_TYPES = {cls.kind: cls for cls in (VertexInsert, VertexDelete, LinkInsert, LinkDelete)}


def event_to_json(ev) -> dict:
    if isinstance(ev, VertexInsert):
        out = {"kind": ev.kind, "vertex": ev.vertex, "links": [int(u) for u in ev.links]}
        if ev.coords is not None:
            out["coords"] = [float(x) for x in ev.coords]
        if ev.upload_cost is not None:
            out["upload_cost"] = [float(x) for x in ev.upload_cost]
        return out
    if isinstance(ev, VertexDelete):
        return {"kind": ev.kind, "vertex": ev.vertex}
    return {"kind": ev.kind, "u": ev.u, "v": ev.v}


def event_from_json(d: dict):
    kind = d.get("kind")
    if kind not in EVENT_TYPES:
        raise ValidationError(f"unknown event kind {kind!r}")
    if kind == "vertex_insert":
        coords = tuple(d["coords"]) if d.get("coords") is not None else None
        mu = tuple(d["upload_cost"]) if d.get("upload_cost") is not None else None
        return VertexInsert(int(d["vertex"]), coords, mu, tuple(int(u) for u in d.get("links", ())))
    if kind == "vertex_delete":
        return VertexDelete(int(d["vertex"]))
    return EVENT_TYPES[kind](int(d["u"]), int(d["v"]))


@dataclass(frozen=True)
class SlotTrace:
    """Ordered events turning the graph of slot ``t - 1`` into that of slot ``t``."""

    t: int
    events: tuple = ()

    @property
    def deletions_only(self) -> bool:
        return all(isinstance(e, (VertexDelete, LinkDelete)) for e in self.events)


class _Evolving:
    """Mutable scratch copy of a graph used while applying events."""

    def __init__(self, graph: DataGraph, upload=None):
        self.order = graph.ids.tolist()
        self.alive = set(self.order)
        self.coords = None if graph.coords is None else {int(v): tuple(c) for v, c in zip(graph.ids, graph.coords)}
        self.upload = None if upload is None else {int(v): row for v, row in zip(graph.ids, upload)}
        self.links = graph.link_set()
        self.adj = {}
        for a, b in self.links:
            self.adj.setdefault(a, set()).add(b)
            self.adj.setdefault(b, set()).add(a)

    def _key(self, u, v):
        if u not in self.alive:
            raise UnknownVertex(u)
        if v not in self.alive:
            raise UnknownVertex(v)
        if u == v:
            raise SelfLoop(u)
        return (u, v) if u < v else (v, u)

    def add_link(self, u, v):
        key = self._key(u, v)
        if key in self.links:
            raise DuplicateLink(u, v)
        self.links.add(key)
        self.adj.setdefault(u, set()).add(v)
        self.adj.setdefault(v, set()).add(u)

    def drop_link(self, u, v):
        key = self._key(u, v)
        if key not in self.links:
            raise MissingLink(u, v)
        self.links.remove(key)
        self.adj[u].discard(v)
        self.adj[v].discard(u)

    def apply(self, ev):
        if isinstance(ev, LinkInsert):
            self.add_link(int(ev.u), int(ev.v))
        elif isinstance(ev, LinkDelete):
            self.drop_link(int(ev.u), int(ev.v))
        elif isinstance(ev, VertexInsert):
            v = int(ev.vertex)
            if v in self.alive:
                raise ValidationError(f"vertex {v} already exists")
            self.alive.add(v)
            self.order.append(v)
            if self.coords is not None:
                if ev.coords is None:
                    self.coords = None
                else:
                    self.coords[v] = tuple(ev.coords)
            if self.upload is not None:
                if ev.upload_cost is None:
                    raise ValidationError(f"vertex insert {v} carries no upload-cost row")
                self.upload[v] = np.asarray(ev.upload_cost, dtype=float)
            for u in ev.links:
                self.add_link(v, int(u))
        elif isinstance(ev, VertexDelete):
            v = int(ev.vertex)
            if v not in self.alive:
                raise UnknownVertex(v)
            for u in list(self.adj.get(v, ())):
                self.drop_link(v, u)
            self.adj.pop(v, None)
            self.alive.remove(v)
        else:
            raise ValidationError(f"not an evolution event: {ev!r}")

    def graph(self) -> DataGraph:
        ids = [v for v in self.order if v in self.alive]
        coords = None if self.coords is None else [self.coords[v] for v in ids]
        return DataGraph.from_id_links(ids, sorted(self.links), coords=coords)

    def upload_matrix(self, ids, d):
        if not len(ids):
            return np.zeros((0, d))
        return np.vstack([self.upload[int(v)] for v in ids])


def apply_events(graph: DataGraph, events) -> DataGraph:
    """Graph after applying ``events`` in order.  Surviving vertices keep their relative order."""
    work = _Evolving(graph)
    for ev in events:
        work.apply(ev)
    return work.graph()


def advance_instance(instance: Instance, events) -> Instance:
    """Instance for the next slot: same network and model, evolved graph and upload costs."""
    work = _Evolving(instance.graph, instance.upload_cost)
    for ev in events:
        work.apply(ev)
    g = work.graph()
    mu = work.upload_matrix(g.ids, instance.n_servers)
    return Instance(instance.network, g, instance.model, mu, instance.name)


def carry_layout(prev_graph: DataGraph, prev_layout: GraphLayout, graph: DataGraph) -> np.ndarray:
    """Previous placements on the new graph's positions; ``-1`` for vertices that are new."""
    prev = dict(zip(prev_graph.ids.tolist(), prev_layout.assignment.tolist()))
    return np.fromiter((prev.get(v, -1) for v in graph.ids.tolist()), dtype=np.int64, count=graph.n_vertices)


def filter_affected(prev_graph: DataGraph, new_graph: DataGraph, prev_layout: GraphLayout) -> set:
    """Ids of inserted vertices and of vertices that gained a link to a vertex on another server."""
    prev_ids = set(prev_graph.ids.tolist())
    affected = set(new_graph.ids.tolist()) - prev_ids
    where = dict(zip(prev_graph.ids.tolist(), prev_layout.assignment.tolist()))
    for a, b in new_graph.link_set() - prev_graph.link_set():
        sa, sb = where.get(a), where.get(b)
        if sa is not None and sb is not None and sa != sb:
            affected.add(a)
            affected.add(b)
    return affected


def _place_new_cheapest(instance: Instance, lab: np.ndarray) -> np.ndarray:
    new = lab < 0
    if new.any():
        lab = lab.copy()
        lab[new] = np.argmin(instance.decomposition.unary[new], axis=1)
    return lab


@dataclass
class IncrementalResult:
    layout: GraphLayout
    affected: set
    log: IterationLog


def glad_e(prev_graph: DataGraph, instance: Instance, prev_layout: GraphLayout,
           config: GladConfig | None = None, rng=None) -> IncrementalResult:
    """Re-optimise only the affected vertices; everything else stays put.

    Inserted vertices start on their cheapest server (by unary cost).  The
    unaffected vertices act as fixed context: their placements feed the
    traffic terms of affected neighbours but never change.
    """
    config = config or GladConfig()
    graph = instance.graph
    affected = filter_affected(prev_graph, graph, prev_layout)
    lab = _place_new_cheapest(instance, carry_layout(prev_graph, prev_layout, graph))
    if not affected:
        return IncrementalResult(GraphLayout(lab), affected, IterationLog(layout_energy(instance.decomposition, lab)))
    free = np.zeros(graph.n_vertices, dtype=bool)
    free[[graph.position(v) for v in affected]] = True
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    lab, log = optimize(instance, lab, config, free=free, rng=rng)
    return IncrementalResult(GraphLayout(lab), affected, log)


def _place_new_costliest(instance: Instance, lab: np.ndarray) -> np.ndarray:
    dec = instance.decomposition
    graph = instance.graph
    lab = lab.copy()
    for v in np.flatnonzero(lab < 0).tolist():
        cost = dec.unary[v].copy()
        nb = graph.neighbors(v)
        placed = lab[nb]
        placed = placed[placed >= 0]
        if len(placed):
            cost += dec.pair_cost[:, placed].sum(axis=1)
        finite = np.isfinite(cost)
        lab[v] = int(np.argmax(np.where(finite, cost, -np.inf))) if finite.any() else int(np.argmax(dec.unary[v]))
    return lab


def estimate_drift_bound(prev_graph: DataGraph, prev_layout: GraphLayout, prev_cost: float,
                         instance: Instance) -> float:
    """Upper estimate of the GLAD-E vs GLAD-S cost gap for the new slot.

    Cost of the unadjusted previous layout on the new graph, with each
    inserted vertex on the server where it would cost the most, minus the
    previous slot's cost; clipped at zero.
    """
    lab = carry_layout(prev_graph, prev_layout, instance.graph)
    lab = _place_new_costliest(instance, lab)
    value = layout_energy(instance.decomposition, lab)
    return max(0.0, value - prev_cost)


@dataclass
class TimelineState:
    t: int
    graph: DataGraph
    layout: GraphLayout
    cost: float
    theta: float = math.inf
    drift_accumulator: float = 0.0
    history: list = field(default_factory=list)


def glad_a(state: TimelineState, instance: Instance, config: GladConfig | None = None) -> str:
    """Add this slot's drift estimate to the accumulator; ``"glad_e"`` while within ``theta``."""
    est = estimate_drift_bound(state.graph, state.layout, state.cost, instance)
    state.drift_accumulator += est
    state.history.append(("estimate", state.t + 1, est))
    return "glad_e" if state.drift_accumulator <= state.theta else "glad_s"


POLICIES = ("no_adjustment", "greedy", "glad_e", "adaptive", "glad_s")


@dataclass
class SlotRecord:
    slot: int
    policy: str
    decision: str
    cost: CostBreakdown
    est_drift: float
    migrations: int
    wall_ms: float
    n_affected: int = 0
    n_links: int = 0
    n_vertices: int = 0
    glad_e_ms: float = float("nan")
    glad_s_ms: float = float("nan")
    full_pass_ms: float = float("nan")
    c_e: float = float("nan")
    c_s: float = float("nan")
    accumulator: float = 0.0


REPORT_COLUMNS = ("slot", "policy", "decision", "c_u", "c_p", "c_t", "c_m", "total",
                  "est_drift", "migrations", "wall_ms")


@dataclass
class TimelineReport:
    policy: str
    theta: float
    records: list = field(default_factory=list)
    layouts: list = field(default_factory=list)

    def totals(self) -> np.ndarray:
        return np.array([r.cost.total for r in self.records])

    @property
    def glad_s_invocations(self) -> int:
        return sum(r.decision == "glad_s" for r in self.records)

    def mean_cost(self) -> float:
        return float(np.mean(self.totals()))

    def rows(self):
        for r in self.records:
            c = r.cost
            yield {"slot": r.slot, "policy": r.policy, "decision": r.decision, "c_u": c.c_u, "c_p": c.c_p,
                   "c_t": c.c_t, "c_m": c.c_m, "total": c.total, "est_drift": r.est_drift,
                   "migrations": r.migrations, "wall_ms": r.wall_ms}

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
            w.writeheader()
            w.writerows(self.rows())


def _migrations(prev_graph, prev_layout, graph, layout) -> int:
    before = carry_layout(prev_graph, prev_layout, graph)
    kept = before >= 0
    return int(np.count_nonzero(before[kept] != layout.assignment[kept]))


def run_timeline(instance: Instance, trace, policy: str = "adaptive", config: GladConfig | None = None,
                 theta: float = math.inf, initial_layout: GraphLayout | None = None,
                 keep_layouts: bool = False) -> TimelineReport:
    """Simulate ``trace`` slot by slot under one re-optimisation policy.

    Slot 0 holds the starting layout (``initial_layout`` or a fresh GLAD-S
    run).  Wall times cover only the policy's own work.
    """
    if policy not in POLICIES:
        raise ValidationError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    config = config or GladConfig()
    report = TimelineReport(policy, theta)

    t0 = time.perf_counter()
    if initial_layout is None:
        layout, _ = glad_s(instance, config)
    else:
        layout = initial_layout
    init_ms = (time.perf_counter() - t0) * 1e3
    cost = total_cost(layout, instance)
    state = TimelineState(0, instance.graph, layout, cost.total, theta)
    report.records.append(SlotRecord(0, policy, "initial", cost, 0.0, 0, init_ms,
                                     n_links=instance.graph.n_links, n_vertices=instance.n_vertices))
    if keep_layouts:
        report.layouts.append(layout)

    inst = instance
    for slot in trace:
        t = state.t + 1
        inst = advance_instance(inst, slot.events)
        rng = np.random.default_rng([config.seed, t])
        e_ms = s_ms = pass_ms = float("nan")
        c_e = c_s = float("nan")
        n_aff = 0

        t0 = time.perf_counter()
        if policy == "adaptive":
            decision = glad_a(state, inst, config)
            est = state.history[-1][2]
        else:
            decision = {"no_adjustment": "none", "greedy": "greedy"}.get(policy, policy)
        decide_ms = (time.perf_counter() - t0) * 1e3
        if policy != "adaptive":
            est = estimate_drift_bound(state.graph, state.layout, state.cost, inst)

        t0 = time.perf_counter()
        if decision == "none":
            lab = _place_new_cheapest(inst, carry_layout(state.graph, state.layout, inst.graph))
            new_layout = GraphLayout(lab)
        elif decision == "greedy":
            affected = filter_affected(state.graph, inst.graph, state.layout)
            n_aff = len(affected)
            lab = carry_layout(state.graph, state.layout, inst.graph)
            if affected:
                pos = np.array([inst.graph.position(v) for v in affected])
                lab[pos] = -1
            new_layout = GraphLayout(_place_new_cheapest(inst, lab))
        else:
            res = glad_e(state.graph, inst, state.layout, config, rng)
            n_aff = len(res.affected)
            new_layout = res.layout
            e_ms = (time.perf_counter() - t0) * 1e3
            if decision == "glad_s":
                c_e = layout_energy(inst.decomposition, new_layout.assignment)
                t1 = time.perf_counter()
                lab, _ = optimize(inst, new_layout.assignment, config, rng=rng)
                pass_ms = (time.perf_counter() - t1) * 1e3
                s_ms = e_ms + pass_ms  # the warm start is part of a GLAD-S invocation
                new_layout = GraphLayout(lab)
                c_s = layout_energy(inst.decomposition, lab)
        wall = decide_ms + (time.perf_counter() - t0) * 1e3

        cost = total_cost(new_layout, inst)
        if decision == "glad_s" and policy == "adaptive":
            state.drift_accumulator = 0.0
        rec = SlotRecord(t, policy, decision, cost, est,
                         _migrations(state.graph, state.layout, inst.graph, new_layout), wall,
                         n_aff, inst.graph.n_links, inst.n_vertices, e_ms, s_ms, pass_ms, c_e, c_s,
                         state.drift_accumulator)
        report.records.append(rec)
        if keep_layouts:
            report.layouts.append(new_layout)
        state.t, state.graph, state.layout, state.cost = t, inst.graph, new_layout, cost.total
    return report
