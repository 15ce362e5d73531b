"""Fault injection, taint propagation, and adaptive reconfiguration.

An edge is tainted when a faulty input stream feeds its computation:
faulty inputs are tainted, an agent output inherits the agent input's
taint, and a patient output is tainted when its input side or its agent
is.  Discounts stay conservative: a discount by a tainted agent taints
the result even though the faulty contribution may cancel numerically.

``slide_isolate`` searches the bounded equivalence class under crossing
slides and cancellations for the representative with the fewest tainted
edges inside a protected region.  ``adaptive_run`` repeats, per step of
a fault timeline: re-optimize the weights globally, then reconfigure
inside the equivalence class against the step's fault mask.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .colours import Colour
from .errors import QnetError
from .network import (
    Colouring,
    Network,
    _topological_order,
    canonical_key,
    propagate,
    terminal_colours,
)
from .optimize import COORDINATE, GRID, Objective, ObjectiveKind, local_objective, optimize_params
from .rewrite import SLIDE_KINDS, MoveSite, equivalence_class


@dataclass(frozen=True)
class FaultMask:
    """Faulty input streams, with optional numeric overrides per edge."""

    faulty: frozenset[str] = frozenset()
    perturbation: tuple[tuple[str, Colour], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "faulty", frozenset(self.faulty))
        if isinstance(self.perturbation, dict):
            items = tuple(sorted(self.perturbation.items(), key=lambda kv: kv[0]))
            object.__setattr__(self, "perturbation", items)

    def overrides(self) -> dict[str, Colour]:
        return dict(self.perturbation)

    def apply_to(self, inputs: dict[str, Colour]) -> dict[str, Colour]:
        merged = dict(inputs)
        merged.update(self.overrides())
        return merged


EMPTY_MASK = FaultMask()


@dataclass(frozen=True)
class RegionSpec:
    member_edges: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "member_edges", frozenset(self.member_edges))

    def check_against(self, net: Network) -> None:
        missing = sorted(self.member_edges - set(net.edges))
        if missing:
            raise QnetError(f"region references unknown edges {missing}")


@dataclass(frozen=True)
class Timeline:
    steps: tuple[tuple[int, FaultMask], ...]

    def __post_init__(self):
        steps = tuple(self.steps)
        indices = [i for i, _ in steps]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("timeline step indices must be strictly increasing")
        object.__setattr__(self, "steps", steps)

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)


def taint_propagate(net: Network, mask: FaultMask) -> frozenset[str]:
    """Least set of edges whose colours depend on a faulty input."""
    unknown = mask.faulty - set(net.initial_edges())
    if unknown:
        raise QnetError(f"faulty ids are not initial edges: {sorted(unknown)}")
    tainted: set[str] = set(mask.faulty)
    producer = {}
    for v in net.interactions.values():
        producer[v.agent_out] = (v, "agent", None)
        for p in v.patients:
            producer[p.out_edge] = (v, "patient", p)
    order, leftover = _topological_order(net)
    if leftover:
        raise QnetError(f"network has cyclic dependencies through {sorted(leftover)}")
    for eid in order:
        if eid not in producer:
            continue
        v, role, pair = producer[eid]
        if role == "agent":
            if v.agent_in in tainted:
                tainted.add(eid)
        else:
            if pair.in_edge in tainted or v.agent_in in tainted:
                tainted.add(eid)
    return frozenset(tainted)


@dataclass(frozen=True)
class IsolateReport:
    achieved: bool
    taint_in_region: int
    initial_taint_in_region: int
    moves: tuple[MoveSite, ...]
    region: frozenset[str]
    explored: int
    truncated: bool


@dataclass
class IsolateResult:
    network: Network
    colouring: Colouring
    report: IsolateReport


def slide_isolate(
    net: Network,
    colouring: Colouring,
    mask: FaultMask,
    region: RegionSpec,
    depth: int,
    max_nodes: int = 2000,
    kinds=SLIDE_KINDS,
) -> IsolateResult:
    """Reconfigure within the equivalence class to clear taint from a region.

    Candidates are scored by tainted-edge count inside the (id-tracked)
    region, then by move count, then by canonical key.  Failure to fully
    isolate is reported, not raised.
    """
    region.check_against(net)
    initial_count = len(taint_propagate(net, mask) & region.member_edges)
    if initial_count == 0:
        report = IsolateReport(
            achieved=True,
            taint_in_region=0,
            initial_taint_in_region=0,
            moves=(),
            region=region.member_edges,
            explored=1,
            truncated=False,
        )
        return IsolateResult(network=net, colouring=colouring, report=report)

    result = equivalence_class(
        net, colouring, depth, max_nodes=max_nodes, kinds=kinds, region=region.member_edges
    )
    scored = []
    for member in result.members:
        count = len(taint_propagate(member.network, mask) & member.region)
        scored.append(((count, len(member.moves), member.key), member))
    scored.sort(key=lambda t: t[0])
    (count, _, _), best = scored[0]
    report = IsolateReport(
        achieved=count == 0,
        taint_in_region=count,
        initial_taint_in_region=initial_count,
        moves=best.moves,
        region=best.region,
        explored=len(result.members),
        truncated=result.truncated,
    )
    return IsolateResult(network=best.network, colouring=best.colouring, report=report)


@dataclass
class StepRecord:
    index: int
    faulty: tuple[str, ...]
    chosen_key: str
    taint_in_region: int
    isolation_achieved: bool
    objective: float
    params: dict[str, float]
    moves: int
    terminals: dict[str, Colour]
    error: str | None = None


@dataclass
class RunTrace:
    steps: list[StepRecord]

    def to_jsonl(self) -> str:
        from .netfile import encode_colour

        lines = []
        for rec in self.steps:
            payload = {
                "step": rec.index,
                "faulty": sorted(rec.faulty),
                "chosen_key": rec.chosen_key,
                "taint_in_region": rec.taint_in_region,
                "isolation_achieved": rec.isolation_achieved,
                "objective": rec.objective,
                "params": rec.params,
                "moves": rec.moves,
                "terminals": {eid: encode_colour(c) for eid, c in sorted(rec.terminals.items())},
                "error": rec.error,
            }
            lines.append(json.dumps(payload, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")


def adaptive_run(
    net: Network,
    inputs: dict[str, Colour],
    timeline: Timeline,
    region: RegionSpec,
    global_obj: Objective | None = None,
    depth: int = 4,
    method: str = COORDINATE,
    grid_step: float = 0.05,
    max_nodes: int = 2000,
) -> RunTrace:
    """Two-stage adaptive loop over a fault timeline.

    Each step re-optimizes the interaction weights for the global
    objective on the current wiring, then slides the faulty crossings
    within the equivalence class to shield the protected region, and
    records the chosen representative.  Steps are sequential: each
    starts from the previously chosen network.

    Interactions that currently share a weight are optimized as one
    tied variable; letting them drift apart would erase the exact
    weight equalities that crossing slides require, collapsing the
    equivalence class right when stage two needs it.
    """
    if len(timeline) == 0:
        raise ValueError("timeline must contain at least one step")
    obj = global_obj if global_obj is not None else Objective(ObjectiveKind.CHERNOFF)
    current = net
    records: list[StepRecord] = []
    for index, mask in timeline:
        try:
            params = optimize_params(
                current, inputs, _weight_groups(current), method=method,
                grid_step=grid_step, objective=obj,
            )
            tuned = current.copy()
            for vid, op in params.items():
                tuned.interactions[vid] = replace(tuned.interactions[vid], op=op)
            step_inputs = mask.apply_to(inputs)
            colouring = propagate(tuned, step_inputs, None)
            iso = slide_isolate(tuned, colouring, mask, region, depth, max_nodes=max_nodes)
            objective_value = local_objective(iso.network, iso.colouring, obj)
            records.append(
                StepRecord(
                    index=index,
                    faulty=tuple(sorted(mask.faulty)),
                    chosen_key=canonical_key(iso.network),
                    taint_in_region=iso.report.taint_in_region,
                    isolation_achieved=iso.report.achieved,
                    objective=objective_value,
                    params={vid: op.s for vid, op in sorted(params.items())},
                    moves=len(iso.report.moves),
                    terminals=terminal_colours(iso.network, iso.colouring),
                )
            )
            current = iso.network
        except QnetError as exc:
            records.append(
                StepRecord(
                    index=index,
                    faulty=tuple(sorted(mask.faulty)),
                    chosen_key=canonical_key(current),
                    taint_in_region=-1,
                    isolation_achieved=False,
                    objective=float("nan"),
                    params={},
                    moves=0,
                    terminals={},
                    error=str(exc),
                )
            )
    return RunTrace(steps=records)


def _weight_groups(net: Network) -> list[tuple[str, ...]]:
    by_weight: dict[float, list[str]] = {}
    for vid in sorted(net.interactions):
        by_weight.setdefault(net.interactions[vid].op.s, []).append(vid)
    return [tuple(vids) for _, vids in sorted(by_weight.items())]
