"""Cost factors of a graph layout and their constant/unary/pairwise split.

Traffic follows the literal four-fold sum over ``(i, j, v, u)``: every
undirected link whose endpoints sit on different servers ``i != j`` is paid
once per orientation, i.e. ``2 * tau_ij`` per cross link.  ``epsilon_i`` is
charged for every server whether or not it hosts a vertex.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import UnreachablePair
from .model import GraphLayout, Instance


@dataclass(frozen=True)
class CostBreakdown:
    c_u: float
    c_p: float
    c_t: float
    c_m: float
    total: float

    @classmethod
    def from_parts(cls, c_u, c_p, c_t, c_m):
        c_u, c_p, c_t, c_m = float(c_u), float(c_p), float(c_t), float(c_m)
        return cls(c_u, c_p, c_t, c_m, c_u + c_p + c_t + c_m)

    def as_row(self, instance_id="", layout_id="") -> dict:
        return {"instance": instance_id, "layout": layout_id, "c_u": self.c_u, "c_p": self.c_p,
                "c_t": self.c_t, "c_m": self.c_m, "total": self.total}


BREAKDOWN_COLUMNS = ["instance", "layout", "c_u", "c_p", "c_t", "c_m", "total"]


def write_breakdowns(path, rows):
    """Write ``(instance_id, layout_id, CostBreakdown)`` triples as CSV."""
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=BREAKDOWN_COLUMNS)
        w.writeheader()
        for instance_id, layout_id, b in rows:
            w.writerow(b.as_row(instance_id, layout_id))


def vertex_compute_cost(v: int, i: int, instance: Instance) -> float:
    """GNN computation cost of vertex position ``v`` when hosted on server ``i``."""
    s = instance.network.servers[i]
    deg = int(instance.graph.degree[v]) if instance.n_vertices else 0
    dims = instance.model.layer_dims
    total = 0.0
    for k in range(1, len(dims)):
        total += s.alpha * deg * dims[k - 1] + s.beta * dims[k - 1] * dims[k] + s.gamma * dims[k]
    return total


def compute_matrix(instance: Instance) -> np.ndarray:
    """``C_P(v, i)`` for all vertices and servers, shape ``(n, d)``."""
    net, m = instance.network, instance.model
    deg = instance.graph.degree.astype(float)
    per_server = net.beta * m.sum_product + net.gamma * m.sum_out
    return np.outer(deg, net.alpha * m.sum_in) + per_server[None, :]


def _lab(layout):
    return layout.assignment if isinstance(layout, GraphLayout) else np.asarray(layout, dtype=np.int64)


def data_collection_cost(layout, instance: Instance) -> float:
    a = _lab(layout)
    return float(np.sum(instance.upload_cost[np.arange(len(a)), a]))


def compute_cost(layout, instance: Instance) -> float:
    a = _lab(layout)
    if len(a) == 0:
        return 0.0
    return float(np.sum(compute_matrix(instance)[np.arange(len(a)), a]))


def traffic_cost(layout, instance: Instance) -> float:
    a = _lab(layout)
    links = instance.graph.links
    if len(links) == 0:
        return 0.0
    si, sj = a[links[:, 0]], a[links[:, 1]]
    tau = instance.network.traffic[si, sj]
    bad = ~np.isfinite(tau)
    if bad.any():
        k = np.flatnonzero(bad)[0]
        raise UnreachablePair(int(si[k]), int(sj[k]))
    return float(np.sum(2.0 * tau))


def maintenance_cost(layout, instance: Instance) -> float:
    a = _lab(layout)
    net = instance.network
    return float(np.sum(net.rho[a]) + np.sum(net.epsilon))


def total_cost(layout, instance: Instance) -> CostBreakdown:
    return CostBreakdown.from_parts(
        data_collection_cost(layout, instance),
        compute_cost(layout, instance),
        traffic_cost(layout, instance),
        maintenance_cost(layout, instance),
    )


@dataclass(frozen=True, eq=False)
class CostDecomposition:
    """``C = c0 + sum_v unary[v, pi(v)] + sum_{links} pair_cost[pi(u), pi(v)]``.

    ``pair_cost`` already contains the factor 2 of the double-counted traffic
    term; its diagonal is zero and unreachable pairs are ``inf``.
    """

    c0: float
    unary: np.ndarray
    links: np.ndarray
    pair_cost: np.ndarray

    def evaluate(self, layout) -> float:
        return layout_energy(self, _lab(layout))

    def pairwise(self, u: int, v: int, i: int, j: int) -> float:
        return float(self.pair_cost[i, j])


def decompose(instance: Instance) -> CostDecomposition:
    net = instance.network
    unary = instance.upload_cost + compute_matrix(instance) + net.rho[None, :]
    pair = 2.0 * net.traffic
    for a in (unary, pair):
        a.setflags(write=False)
    return CostDecomposition(float(np.sum(net.epsilon)), unary, instance.graph.links, pair)


def layout_energy(dec: CostDecomposition, a: np.ndarray) -> float:
    """Total cost via the decomposition; ``inf`` for layouts needing an unreachable pair."""
    n = len(a)
    total = dec.c0 + float(np.sum(dec.unary[np.arange(n), a]))
    if len(dec.links):
        total += float(np.sum(dec.pair_cost[a[dec.links[:, 0]], a[dec.links[:, 1]]]))
    return total


def unreachable_links(dec: CostDecomposition, a: np.ndarray) -> int:
    if len(dec.links) == 0:
        return 0
    return int(np.count_nonzero(np.isinf(dec.pair_cost[a[dec.links[:, 0]], a[dec.links[:, 1]]])))


def subset_cost(subset, layout, instance: Instance) -> float:
    """Cost of the subgraph induced by ``subset`` (vertex positions) under ``layout``.

    Per-vertex computation cost keeps each vertex's degree in the full graph,
    so the unary terms are exactly those of the full decomposition.
    """
    dec = instance.decomposition
    a = _lab(layout)
    members = np.zeros(instance.n_vertices, dtype=bool)
    idx = np.fromiter(subset, dtype=np.int64)
    members[idx] = True
    total = dec.c0 + float(np.sum(dec.unary[idx, a[idx]]))
    links = dec.links
    if len(links):
        inside = members[links[:, 0]] & members[links[:, 1]]
        lk = links[inside]
        total += float(np.sum(dec.pair_cost[a[lk[:, 0]], a[lk[:, 1]]]))
    return total


def marginal_cost(subset, v: int, layout, instance: Instance) -> float:
    """Cost added by bringing vertex ``v`` into ``subset``, placements fixed by ``layout``."""
    subset = set(int(x) for x in subset)
    if v in subset:
        raise ValueError(f"vertex {v} already belongs to the subset")
    return subset_cost(subset | {v}, layout, instance) - subset_cost(subset, layout, instance)

