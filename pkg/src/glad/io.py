"""JSON files for instances, layouts and traces.

Writers are deterministic: keys sorted, floats in ``repr`` form, unreachable
traffic as ``null``.  Re-writing the same object yields the same bytes.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .dynamic import SlotTrace, event_from_json, event_to_json
from .errors import ParseError, ValidationError
from .model import DataGraph, EdgeNetwork, EdgeServer, GnnModelSpec, GraphLayout, Instance, validate_layout

FORMAT = "glad-instance/1"


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def instance_to_json(instance: Instance, provenance: dict | None = None) -> dict:
    net, g = instance.network, instance.graph
    servers = [{"id": s.id, "coords": list(map(float, s.coords)), "machine_class": s.machine_class,
                "alpha": s.alpha, "beta": s.beta, "gamma": s.gamma, "rho": s.rho, "epsilon": s.epsilon}
               for s in net.servers]
    traffic = [[float(x) if np.isfinite(x) else None for x in row] for row in net.traffic]
    vertices = []
    for p, v in enumerate(g.ids.tolist()):
        entry = {"id": v}
        if g.coords is not None:
            entry["coords"] = [float(x) for x in g.coords[p]]
        if g.names is not None:
            entry["name"] = g.names[p]
        vertices.append(entry)
    return {
        "format": FORMAT,
        "name": instance.name,
        "servers": servers,
        "connectivity": net.connectivity.astype(int).tolist(),
        "traffic": traffic,
        "vertices": vertices,
        "links": g.id_links.tolist(),
        "layer_dims": list(instance.model.layer_dims),
        "upload_cost": instance.upload_cost.tolist(),
        "provenance": provenance or {},
    }


def _need(doc, key):
    if key not in doc:
        raise ParseError(f"instance file lacks section {key!r}")
    return doc[key]


def instance_from_json(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise ParseError("instance file must hold a JSON object")
    try:
        servers = [EdgeServer(int(s["id"]), tuple(s.get("coords", (0.0, 0.0))), s.get("machine_class", "A"),
                              float(s.get("alpha", 0)), float(s.get("beta", 0)), float(s.get("gamma", 0)),
                              float(s.get("rho", 0)), float(s.get("epsilon", 0)))
                   for s in _need(doc, "servers")]
        traffic = [[np.inf if x is None else float(x) for x in row] for row in _need(doc, "traffic")]
        network = EdgeNetwork(servers, traffic, doc.get("connectivity"))
        verts = _need(doc, "vertices")
        ids = [int(v["id"]) for v in verts]
        coords = [v["coords"] for v in verts] if verts and all("coords" in v for v in verts) else None
        names = [v["name"] for v in verts] if verts and all("name" in v for v in verts) else None
        graph = DataGraph.from_id_links(ids, [tuple(x) for x in _need(doc, "links")], coords=coords, names=names)
        mu = np.array(_need(doc, "upload_cost"), dtype=float).reshape(len(ids), len(servers))
        return Instance(network, graph, GnnModelSpec(tuple(_need(doc, "layer_dims"))), mu, doc.get("name", "instance"))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed instance file: {exc!r}") from None


def save_instance(instance: Instance, path, provenance: dict | None = None) -> str:
    text = dumps(instance_to_json(instance, provenance))
    with open(path, "w") as fh:
        fh.write(text)
    return text


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.lineno) from None


def load_instance(path) -> Instance:
    return instance_from_json(_read_json(path))


def layout_to_json(layout: GraphLayout, graph: DataGraph) -> dict:
    return {str(v): int(s) for v, s in layout.to_mapping(graph).items()}


def save_layout(layout: GraphLayout, graph: DataGraph, path) -> str:
    text = dumps(layout_to_json(layout, graph))
    with open(path, "w") as fh:
        fh.write(text)
    return text


def load_layout(path, instance: Instance) -> GraphLayout:
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise ParseError("layout file must hold a JSON object")
    try:
        mapping = {int(k): int(v) for k, v in doc.items()}
    except (TypeError, ValueError):
        raise ParseError("layout keys and values must be integers") from None
    return validate_layout(mapping, instance)


def trace_to_json(trace) -> list:
    return [{"t": s.t, "events": [event_to_json(e) for e in s.events]} for s in trace]


def trace_from_json(doc) -> list:
    if not isinstance(doc, list):
        raise ParseError("trace file must hold a JSON list of slots")
    out = []
    for k, slot in enumerate(doc, 1):
        try:
            out.append(SlotTrace(int(slot.get("t", k)), tuple(event_from_json(e) for e in slot["events"])))
        except (KeyError, TypeError, AttributeError, ValidationError) as exc:
            raise ParseError(f"slot {k}: {exc}") from None
    return out


def save_trace(trace, path) -> str:
    text = dumps(trace_to_json(trace))
    with open(path, "w") as fh:
        fh.write(text)
    return text


def load_trace(path) -> list:
    return trace_from_json(_read_json(path))
