"""Bundled example networks used by the docs, demos, and test suite.

``triple_fusion_chain`` and ``triple_fusion_rewired`` are the two
classic schemes for fusing three estimator streams pairwise.  In the
chain scheme the first stream is updated by the second and then by the
third; in the rewired scheme both the first and second streams are
updated by the third before fusing with each other.  The two wirings
are related by a single crossing slide and produce identical outputs.

``fault_harness`` is a four-strand network for the adaptive
fault-tolerance demos: a protected chain crossed by three input
streams, with enough stream/stream crossings that any single crossing
can be slid to the front of the chain.
"""

from __future__ import annotations

from .algebra import OpParam
from .colours import GaussianEstimate, UnnormalizedGaussian
from .faults import FaultMask, RegionSpec, Timeline
from .network import INITIAL, TERMINAL, UPDATE, Edge, Interaction, Network, PatientPair


def _net(kind, endpoint_roles, edge_triples, interactions) -> Network:
    edges = {eid: Edge(eid, tail, head) for eid, tail, head in edge_triples}
    return Network(
        edges=edges,
        endpoints=dict(endpoint_roles),
        interactions={v.id: v for v in interactions},
        quandloid_kind=kind,
    )


def triple_fusion_chain(s: float = 0.5, t: float = 0.5, kind: str = "ci") -> Network:
    """Scheme A: stream 0 fused with 1 (weight s), then with 2 (weight t).

    Stream 1 also crosses stream 2 after acting as the agent, so the
    wiring carries the full crossing triangle and admits the slide onto
    scheme B.
    """
    return _net(
        kind,
        {"in0": INITIAL, "in1": INITIAL, "in2": INITIAL,
         "out_b": TERMINAL, "out_e": TERMINAL, "out_g": TERMINAL},
        [
            ("0", "in0", "v1"), ("a", "v1", "v2"), ("b", "v2", "out_b"),
            ("1", "in1", "v1"), ("c", "v1", "v3"), ("e", "v3", "out_e"),
            ("2", "in2", "v2"), ("d", "v2", "v3"), ("g", "v3", "out_g"),
        ],
        [
            Interaction("v1", agent_in="1", agent_out="c",
                        patients=(PatientPair("0", "a", UPDATE),), op=OpParam(s)),
            Interaction("v2", agent_in="2", agent_out="d",
                        patients=(PatientPair("a", "b", UPDATE),), op=OpParam(t)),
            Interaction("v3", agent_in="d", agent_out="g",
                        patients=(PatientPair("c", "e", UPDATE),), op=OpParam(t)),
        ],
    )


def triple_fusion_rewired(s: float = 0.5, t: float = 0.5, kind: str = "ci") -> Network:
    """Scheme B: streams 0 and 1 each fused with 2 (weight t), then together."""
    return _net(
        kind,
        {"in0": INITIAL, "in1": INITIAL, "in2": INITIAL,
         "out_b": TERMINAL, "out_e": TERMINAL, "out_g": TERMINAL},
        [
            ("0", "in0", "v2"), ("a", "v2", "v1"), ("b", "v1", "out_b"),
            ("1", "in1", "v3"), ("c", "v3", "v1"), ("e", "v1", "out_e"),
            ("2", "in2", "v2"), ("d", "v2", "v3"), ("g", "v3", "out_g"),
        ],
        [
            Interaction("v1", agent_in="c", agent_out="e",
                        patients=(PatientPair("a", "b", UPDATE),), op=OpParam(s)),
            Interaction("v2", agent_in="2", agent_out="d",
                        patients=(PatientPair("0", "a", UPDATE),), op=OpParam(t)),
            Interaction("v3", agent_in="d", agent_out="g",
                        patients=(PatientPair("1", "c", UPDATE),), op=OpParam(t)),
        ],
    )


def triple_fusion_inputs() -> dict[str, GaussianEstimate]:
    """The scalar scenario: estimates (0, 1), (2, 1), (1, 2)."""
    return {
        "0": GaussianEstimate([0.0], [[1.0]]),
        "1": GaussianEstimate([2.0], [[1.0]]),
        "2": GaussianEstimate([1.0], [[2.0]]),
    }


def fault_harness(a: float = 0.3, b: float = 0.4, c: float = 0.5):
    """Protected chain crossed by three streams, with slide fabric.

    Returns (network, inputs, region, timeline).  The protected region
    is the chain segment right after the first crossing; the timeline
    walks the six fault codes.  Strand layout::

        W : w0 -v1- w1 -v2- w2 -v3- w3
        S0: s00 -v1* s01 -u01- s02 -u02- s03
        S1: s10 -u01* s11 -v2* s12 -u12- s13
        S2: s20 -u12* s21 -u02* s22 -v3* s23

    (* marks agent passes.)  The stream/stream crossings u01, u02, u12
    are what lets a slide search move any faulty crossing off the front
    of the chain.
    """
    net = _net(
        "gaussian",
        {"iw": INITIAL, "i0": INITIAL, "i1": INITIAL, "i2": INITIAL,
         "tw": TERMINAL, "t0": TERMINAL, "t1": TERMINAL, "t2": TERMINAL},
        [
            ("w0", "iw", "v1"), ("w1", "v1", "v2"), ("w2", "v2", "v3"), ("w3", "v3", "tw"),
            ("s00", "i0", "v1"), ("s01", "v1", "u01"), ("s02", "u01", "u02"), ("s03", "u02", "t0"),
            ("s10", "i1", "u01"), ("s11", "u01", "v2"), ("s12", "v2", "u12"), ("s13", "u12", "t1"),
            ("s20", "i2", "u12"), ("s21", "u12", "u02"), ("s22", "u02", "v3"), ("s23", "v3", "t2"),
        ],
        [
            Interaction("v1", agent_in="s00", agent_out="s01",
                        patients=(PatientPair("w0", "w1", UPDATE),), op=OpParam(a)),
            Interaction("v2", agent_in="s11", agent_out="s12",
                        patients=(PatientPair("w1", "w2", UPDATE),), op=OpParam(b)),
            Interaction("v3", agent_in="s22", agent_out="s23",
                        patients=(PatientPair("w2", "w3", UPDATE),), op=OpParam(c)),
            Interaction("u01", agent_in="s10", agent_out="s11",
                        patients=(PatientPair("s01", "s02", UPDATE),), op=OpParam(b)),
            Interaction("u02", agent_in="s21", agent_out="s22",
                        patients=(PatientPair("s02", "s03", UPDATE),), op=OpParam(c)),
            Interaction("u12", agent_in="s20", agent_out="s21",
                        patients=(PatientPair("s12", "s13", UPDATE),), op=OpParam(c)),
        ],
    )
    inputs = {
        "w0": UnnormalizedGaussian([0.0], [[1.0]], 0.0),
        "s00": UnnormalizedGaussian([0.5], [[1.2]], 0.0),
        "s10": UnnormalizedGaussian([-0.3], [[0.8]], 0.0),
        "s20": UnnormalizedGaussian([1.0], [[1.5]], 0.0),
    }
    region = RegionSpec(frozenset({"w1"}))
    timeline = Timeline(tuple(enumerate(fault_code_masks())))
    return net, inputs, region, timeline


#: fault code digits read left to right name streams 2, 1, 0
FAULT_CODE_STREAMS = ("s20", "s10", "s00")


def mask_from_code(code: str, streams=FAULT_CODE_STREAMS) -> FaultMask:
    if len(code) != len(streams) or any(ch not in "0X" for ch in code):
        raise ValueError(f"bad fault code {code!r}")
    return FaultMask(frozenset(s for ch, s in zip(code, streams) if ch == "X"))


def fault_code_masks() -> list[FaultMask]:
    return [mask_from_code(code) for code in ("000", "00X", "0X0", "X00", "X0X", "0XX")]
