"""Dinic max-flow / minimum s-t cut on small real-capacity networks.

Capacities are floats.  Every augmentation subtracts the path bottleneck,
which is itself one of the residuals on the path, so the bottleneck arc drops
to exactly zero and the phase structure of Dinic's algorithm is preserved
without an epsilon.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    n_nodes: int
    tails: np.ndarray
    heads: np.ndarray
    capacities: np.ndarray
    source: int = 0
    sink: int = 1

    def __post_init__(self):
        tails = np.asarray(self.tails, dtype=np.int64).reshape(-1)
        heads = np.asarray(self.heads, dtype=np.int64).reshape(-1)
        caps = np.asarray(self.capacities, dtype=float).reshape(-1)
        if not (len(tails) == len(heads) == len(caps)):
            raise ValidationError("arc arrays must have equal length")
        n = int(self.n_nodes)
        for name, node in (("source", self.source), ("sink", self.sink)):
            if not 0 <= node < n:
                raise ValidationError(f"{name} {node} outside 0..{n - 1}")
        if self.source == self.sink:
            raise ValidationError("source and sink must differ")
        if len(tails) and (min(tails.min(), heads.min()) < 0 or max(tails.max(), heads.max()) >= n):
            raise ValidationError("arc endpoint outside the node range")
        if not np.isfinite(caps).all() or (caps < 0).any():
            raise ValidationError("capacities must be finite and >= 0")
        object.__setattr__(self, "tails", tails)
        object.__setattr__(self, "heads", heads)
        object.__setattr__(self, "capacities", caps)

    @classmethod
    def from_arcs(cls, n_nodes, arcs, source=0, sink=1):
        arcs = list(arcs)
        if not arcs:
            return cls(n_nodes, [], [], [], source, sink)
        t, h, c = zip(*arcs)
        return cls(n_nodes, t, h, c, source, sink)

    @property
    def n_arcs(self) -> int:
        return len(self.tails)


@dataclass(frozen=True, eq=False)
class CutResult:
    flow_value: float
    source_side: frozenset
    cut_arcs: tuple
    arc_flows: np.ndarray

    def cut_capacity(self, network: FlowNetwork) -> float:
        return float(sum(network.capacities[e] for e in self.cut_arcs))


def min_st_cut(network: FlowNetwork) -> CutResult:
    """Maximum flow plus the source-minimal minimum cut.

    The source side is the set of nodes reachable from the source in the
    final residual network, which is the unique minimal minimum cut.
    """
    n, s, t = int(network.n_nodes), int(network.source), int(network.sink)
    m = network.n_arcs
    head = [0] * (2 * m)
    cap = [0.0] * (2 * m)
    adj = [[] for _ in range(n)]
    for e, (a, b, c) in enumerate(zip(network.tails.tolist(), network.heads.tolist(),
                                      network.capacities.tolist())):
        head[2 * e] = b
        head[2 * e + 1] = a
        cap[2 * e] = c
        adj[a].append(2 * e)
        adj[b].append(2 * e + 1)

    flow = 0.0
    # Paths s -> v -> t need no search; saturating them first leaves Dinic
    # with only the genuinely coupled part of the network.
    into_sink = {}
    for e in range(0, 2 * m, 2):
        if head[e] == t:
            into_sink.setdefault(head[e + 1], []).append(e)
    for e1 in adj[s]:
        if e1 & 1:
            continue
        v = head[e1]
        for e2 in into_sink.get(v, ()):
            f = min(cap[e1], cap[e2])
            if f > 0:
                cap[e1] -= f
                cap[e1 ^ 1] += f
                cap[e2] -= f
                cap[e2 ^ 1] += f
                flow += f

    while True:
        level = [-1] * n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for e in adj[u]:
                w = head[e]
                if level[w] < 0 and cap[e] > 0:
                    level[w] = level[u] + 1
                    q.append(w)
        if level[t] < 0:
            break
        it = [0] * n
        path = []  # arc indices from s to the current node
        u = s
        while True:
            if u == t:
                f = min(cap[e] for e in path)
                cut_at = len(path)
                for k, e in enumerate(path):
                    cap[e] -= f
                    cap[e ^ 1] += f
                    if cap[e] == 0 and k < cut_at:
                        cut_at = k
                flow += f
                del path[cut_at:]
                u = head[path[-1]] if path else s
                continue
            edges = adj[u]
            advanced = False
            while it[u] < len(edges):
                e = edges[it[u]]
                w = head[e]
                if cap[e] > 0 and level[w] == level[u] + 1:
                    path.append(e)
                    u = w
                    advanced = True
                    break
                it[u] += 1
            if advanced:
                continue
            if u == s:
                break
            level[u] = -1
            e = path.pop()
            u = head[e ^ 1]
            it[u] += 1

    seen = [False] * n
    seen[s] = True
    q = deque([s])
    while q:
        u = q.popleft()
        for e in adj[u]:
            w = head[e]
            if not seen[w] and cap[e] > 0:
                seen[w] = True
                q.append(w)
    side = frozenset(i for i in range(n) if seen[i])
    cut = tuple(e for e in range(m) if seen[network.tails[e]] and not seen[network.heads[e]])
    flows = network.capacities - np.array(cap[0::2], dtype=float) if m else np.zeros(0)
    return CutResult(flow, side, cut, flows)


def to_dimacs(network: FlowNetwork) -> str:
    """DIMACS max-flow text (1-based node numbers)."""
    lines = [f"p max {network.n_nodes} {network.n_arcs}",
             f"n {network.source + 1} s",
             f"n {network.sink + 1} t"]
    for a, b, c in zip(network.tails.tolist(), network.heads.tolist(), network.capacities.tolist()):
        lines.append(f"a {a + 1} {b + 1} {c!r}")
    return "\n".join(lines) + "\n"
