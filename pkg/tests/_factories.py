"""Small random instances for tests."""

import itertools

import numpy as np

from glad.model import DataGraph, EdgeNetwork, EdgeServer, GnnModelSpec, Instance


def random_instance(seed, n_vertices, n_servers, link_model=None, unreachable=0.0, dims=(4, 3, 2),
                    tau_scale=None):
    """Random parameters, random links (``"er"`` or ``"pa"``-ish), optional unreachable pairs."""
    rng = np.random.default_rng(seed)
    servers = [
        EdgeServer(i, tuple(rng.random(2)), "ABC"[i % 3], *rng.random(3) * 0.5, rng.random() * 2, rng.random() * 5)
        for i in range(n_servers)
    ]
    scale = rng.choice([0.1, 1.0, 5.0]) if tau_scale is None else tau_scale
    tau = rng.random((n_servers, n_servers)) * scale
    tau = (tau + tau.T) / 2
    np.fill_diagonal(tau, 0.0)
    if unreachable:
        # cut server pairs but keep the server graph connected
        for i, j in itertools.combinations(range(n_servers), 2):
            if rng.random() < unreachable:
                trial = tau.copy()
                trial[i, j] = trial[j, i] = np.inf
                if _connected(np.isfinite(trial)):
                    tau = trial
    links = random_links(rng, n_vertices, link_model or rng.choice(["er", "pa", "dense"]))
    graph = DataGraph(n_vertices, links)
    mu = rng.random((n_vertices, n_servers)) * rng.choice([0.5, 2.0, 10.0])
    return Instance(EdgeNetwork(servers, tau), graph, GnnModelSpec(dims), mu, f"rand-{seed}")


def _connected(w):
    seen, stack = {0}, [0]
    while stack:
        u = stack.pop()
        for v in np.flatnonzero(w[u]).tolist():
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == len(w)


def random_links(rng, n, model):
    pairs = list(itertools.combinations(range(n), 2))
    if model == "dense":
        keep = rng.random(len(pairs)) < 0.6
        return [p for p, k in zip(pairs, keep) if k]
    if model == "er":
        keep = rng.random(len(pairs)) < 0.3
        return [p for p, k in zip(pairs, keep) if k]
    # preferential attachment, one or two links per newcomer
    links, deg = set(), np.ones(n)
    for v in range(1, n):
        m = min(v, 1 + int(rng.random() < 0.5))
        targets = rng.choice(v, size=m, replace=False, p=deg[:v] / deg[:v].sum())
        for u in targets:
            links.add((int(u), v))
            deg[u] += 1
            deg[v] += 1
    return sorted(links)


def path_graph(n):
    return DataGraph(n, [(k, k + 1) for k in range(n - 1)])
