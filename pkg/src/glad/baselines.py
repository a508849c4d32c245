"""Exhaustive oracle and the two simple reference layouts (random, greedy)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cost import CostBreakdown, total_cost
from .errors import TooLarge, UnreachablePair
from .model import GraphLayout, Instance

DEFAULT_MAX_STATES = 20_000_000
_CHUNK = 1 << 16


@dataclass(frozen=True)
class OracleResult:
    optimal_layout: GraphLayout
    optimal_cost: CostBreakdown
    states_examined: int


def brute_force_optimal(instance: Instance, max_states: int = DEFAULT_MAX_STATES) -> OracleResult:
    """Enumerate every assignment in lexicographic order and keep the cheapest.

    Vertex 0 is the most significant digit, so among exactly equal costs the
    first one found is the lexicographically smallest.  Assignments are
    scored in vectorised chunks through the cost decomposition.
    """
    n, d = instance.n_vertices, instance.n_servers
    states = d ** n
    if states > max_states:
        raise TooLarge(states, max_states)
    dec = instance.decomposition
    links = dec.links
    place = d ** np.arange(n - 1, -1, -1, dtype=np.int64)
    best_cost, best_code = np.inf, 0
    for start in range(0, states, _CHUNK):
        codes = np.arange(start, min(states, start + _CHUNK), dtype=np.int64)
        a = (codes[:, None] // place[None, :]) % d
        cost = dec.unary[np.arange(n)[None, :], a].sum(axis=1) if n else np.zeros(len(codes))
        if len(links):
            cost = cost + dec.pair_cost[a[:, links[:, 0]], a[:, links[:, 1]]].sum(axis=1)
        k = int(np.argmin(cost))
        if cost[k] < best_cost:
            best_cost, best_code = float(cost[k]), int(codes[k])
    if not np.isfinite(best_cost):
        raise UnreachablePair(*_some_unreachable(instance))
    lab = (best_code // place) % d if n else np.zeros(0, dtype=np.int64)
    layout = GraphLayout(lab)
    return OracleResult(layout, total_cost(layout, instance), states)


def _some_unreachable(instance):
    t = instance.network.traffic
    i, j = np.argwhere(np.isinf(t))[0]
    return int(i), int(j)


def random_layout(instance: Instance, seed=0) -> GraphLayout:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return GraphLayout(rng.integers(0, instance.n_servers, size=instance.n_vertices))


def greedy_layout(instance: Instance) -> GraphLayout:
    """Each vertex on its own cheapest server for upload + compute + per-vertex maintenance.

    Traffic is ignored.  ``epsilon`` does not depend on the layout, so it plays
    no part in the choice.  ``argmin`` breaks ties towards the lowest index.
    """
    if instance.n_vertices == 0:
        return GraphLayout(np.zeros(0, dtype=np.int64))
    return GraphLayout(np.argmin(instance.decomposition.unary, axis=1))
