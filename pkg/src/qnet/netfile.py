"""Versioned JSON network files: parse, validate, serialize.

The format stores the quandloid kind and dimension, endpoints, edges,
interactions with their weights and patient modes, input colour
literals, and optionally a protected region, a fault timeline, and the
stream order used to read fault codes.  Serialization uses stable key
ordering so files are diffable and byte-reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import OpParam
from .colours import (
    CLASS_TO_KIND,
    Colour,
    DensityVal,
    EntropyVal,
    GaussianEstimate,
    InfoMatrix,
    UnnormalizedGaussian,
    Vec,
)
from .faults import FaultMask, RegionSpec, Timeline
from .network import Edge, Interaction, Network, PatientPair

FORMAT_VERSION = 1


class ParseError(Exception):
    """The file is not a well-formed network description."""


@dataclass
class NetworkFile:
    network: Network
    inputs: dict[str, Colour]
    dim: int
    region: RegionSpec | None = None
    timeline: Timeline | None = None
    fault_streams: tuple[str, ...] | None = None
    version: int = FORMAT_VERSION


def encode_colour(c: Colour) -> dict:
    if isinstance(c, Vec):
        return {"v": c.v.tolist()}
    if isinstance(c, GaussianEstimate):
        return {"mean": c.mean.tolist(), "cov": c.cov.tolist()}
    if isinstance(c, UnnormalizedGaussian):
        return {"mean": c.mean.tolist(), "cov": c.cov.tolist(), "log_scale": c.log_scale}
    if isinstance(c, InfoMatrix):
        return {"mat": c.mat.tolist()}
    if isinstance(c, EntropyVal):
        return {"bits": c.bits}
    if isinstance(c, DensityVal):
        return {"value": c.value}
    raise TypeError(f"cannot encode colour of type {type(c)!r}")


def decode_colour(kind: str, literal: dict, dim: int) -> Colour:
    try:
        if kind == "vec":
            c = Vec(literal["v"])
        elif kind == "ci":
            c = GaussianEstimate(literal["mean"], literal["cov"])
        elif kind == "gaussian":
            c = UnnormalizedGaussian(
                literal["mean"], literal["cov"], literal.get("log_scale", 0.0)
            )
        elif kind == "info":
            c = InfoMatrix(literal["mat"])
        elif kind == "entropy":
            c = EntropyVal(literal["bits"])
        elif kind == "density":
            c = DensityVal(literal["value"])
        else:
            raise ParseError(f"unknown quandloid kind {kind!r}")
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(f"bad colour literal for kind {kind!r}: {exc}") from exc
    if c.dim != dim:
        raise ParseError(f"colour has dimension {c.dim}, file declares {dim}")
    return c


def parse(source) -> NetworkFile:
    """Parse a network file from a path, JSON text, or dict."""
    if isinstance(source, dict):
        doc = source
    else:
        text = Path(source).read_text() if _looks_like_path(source) else str(source)
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    try:
        return _from_doc(doc)
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"malformed network file: {exc}") from exc


def _looks_like_path(source) -> bool:
    if isinstance(source, Path):
        return True
    if isinstance(source, str):
        stripped = source.lstrip()
        return not (stripped.startswith("{") or stripped.startswith("["))
    raise ParseError(f"cannot parse source of type {type(source)!r}")


def _from_doc(doc: dict) -> NetworkFile:
    version = int(doc.get("version", -1))
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format version {version}")
    q = doc["quandloid"]
    kind = q["kind"]
    dim = int(q.get("dim", 1))

    endpoints = {}
    for ep in doc["endpoints"]:
        role = ep["role"]
        if role not in ("initial", "terminal"):
            raise ParseError(f"endpoint {ep['id']!r} has bad role {role!r}")
        endpoints[str(ep["id"])] = role

    edges = {}
    for e in doc["edges"]:
        eid = str(e["id"])
        if eid in edges:
            raise ParseError(f"duplicate edge id {eid!r}")
        edges[eid] = Edge(eid, str(e["tail"]), str(e["head"]))

    interactions = {}
    for rec in doc["interactions"]:
        vid = str(rec["id"])
        if vid in interactions:
            raise ParseError(f"duplicate interaction id {vid!r}")
        agent = rec["agent"]
        patients = tuple(
            PatientPair(str(p["in"]), str(p["out"]), p.get("mode", "update"))
            for p in rec["patients"]
        )
        interactions[vid] = Interaction(
            id=vid,
            agent_in=str(agent[0]),
            agent_out=str(agent[1]),
            patients=patients,
            op=OpParam(float(rec["s"])),
        )

    net = Network(edges=edges, endpoints=endpoints, interactions=interactions, quandloid_kind=kind)

    inputs = {
        str(eid): decode_colour(kind, literal, dim)
        for eid, literal in doc.get("inputs", {}).items()
    }

    region = None
    if "region" in doc:
        region = RegionSpec(frozenset(str(e) for e in doc["region"]))

    fault_streams = None
    if "fault_streams" in doc:
        fault_streams = tuple(str(e) for e in doc["fault_streams"])

    timeline = None
    if "timeline" in doc:
        steps = []
        for entry in doc["timeline"]:
            idx = int(entry["step"])
            if "code" in entry:
                if fault_streams is None:
                    raise ParseError("timeline uses fault codes but fault_streams is missing")
                code = str(entry["code"])
                if len(code) != len(fault_streams) or any(ch not in "0X" for ch in code):
                    raise ParseError(f"bad fault code {code!r}")
                faulty = frozenset(s for ch, s in zip(code, fault_streams) if ch == "X")
            else:
                faulty = frozenset(str(e) for e in entry.get("faulty", ()))
            overrides = {
                str(eid): decode_colour(kind, lit, dim)
                for eid, lit in entry.get("overrides", {}).items()
            }
            steps.append((idx, FaultMask(faulty, overrides)))
        timeline = Timeline(tuple(steps))

    return NetworkFile(
        network=net, inputs=inputs, dim=dim, region=region,
        timeline=timeline, fault_streams=fault_streams, version=version,
    )


def to_doc(
    net: Network,
    inputs: dict[str, Colour] | None = None,
    dim: int | None = None,
    region: RegionSpec | None = None,
    timeline: Timeline | None = None,
    fault_streams=None,
) -> dict:
    if dim is None:
        if inputs:
            dim = next(iter(inputs.values())).dim
        else:
            dim = 1
    doc: dict = {
        "version": FORMAT_VERSION,
        "quandloid": {"kind": net.quandloid_kind, "dim": dim},
        "endpoints": [
            {"id": nid, "role": role} for nid, role in sorted(net.endpoints.items())
        ],
        "edges": [
            {"id": e.id, "tail": e.tail, "head": e.head}
            for e in sorted(net.edges.values(), key=lambda e: e.id)
        ],
        "interactions": [
            {
                "id": v.id,
                "s": v.op.s,
                "agent": [v.agent_in, v.agent_out],
                "patients": [
                    {"in": p.in_edge, "out": p.out_edge, "mode": p.mode} for p in v.patients
                ],
            }
            for v in sorted(net.interactions.values(), key=lambda v: v.id)
        ],
    }
    if inputs:
        doc["inputs"] = {eid: encode_colour(c) for eid, c in sorted(inputs.items())}
    if region is not None:
        doc["region"] = sorted(region.member_edges)
    if fault_streams is not None:
        doc["fault_streams"] = list(fault_streams)
    if timeline is not None:
        doc["timeline"] = [
            {
                "step": idx,
                "faulty": sorted(mask.faulty),
                **(
                    {"overrides": {eid: encode_colour(c) for eid, c in mask.perturbation}}
                    if mask.perturbation
                    else {}
                ),
            }
            for idx, mask in timeline
        ]
    return doc


def serialize(net: Network, **kwargs) -> str:
    return json.dumps(to_doc(net, **kwargs), indent=2, sort_keys=True) + "\n"
