"""Information fusion networks: endpoints, interactions, colourings.

A network is a directed graph whose internal vertices (interactions)
pair their incident edges: one distinguished agent pair passes through
unchanged, and each remaining patient pair is transformed by the agent,
either by an update (out = in >_s agent) or by a discount (in = out >_s
agent).  Degree-1 vertices are endpoints, initial if the edge leaves
them and terminal if it arrives.

Only feed-forward networks are supported: the edge dependency relation
induced by propagation must be acyclic, so colours can be computed from
the initial edges in one topological sweep.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field, replace

from .algebra import OpParam, apply_transition
from .colours import Colour
from .errors import FusionUndefined, MissingInput, QnetError

INITIAL = "initial"
TERMINAL = "terminal"
UPDATE = "update"
DISCOUNT = "discount"


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class PatientPair:
    in_edge: str
    out_edge: str
    mode: str = UPDATE

    def __post_init__(self):
        if self.mode not in (UPDATE, DISCOUNT):
            raise ValueError(f"unknown patient mode {self.mode!r}")


@dataclass(frozen=True)
class Interaction:
    id: str
    agent_in: str
    agent_out: str
    patients: tuple[PatientPair, ...]
    op: OpParam

    def __post_init__(self):
        object.__setattr__(self, "patients", tuple(self.patients))

    @property
    def degree(self) -> int:
        return 2 * len(self.patients) + 2

    def patient_for_in_edge(self, edge_id: str) -> PatientPair | None:
        for p in self.patients:
            if p.in_edge == edge_id:
                return p
        return None


@dataclass
class Network:
    edges: dict[str, Edge]
    endpoints: dict[str, str]  # endpoint node id -> "initial" | "terminal"
    interactions: dict[str, Interaction]
    quandloid_kind: str = "ci"

    def copy(self) -> "Network":
        return Network(
            edges=dict(self.edges),
            endpoints=dict(self.endpoints),
            interactions=dict(self.interactions),
            quandloid_kind=self.quandloid_kind,
        )

    def initial_edges(self) -> list[str]:
        return sorted(
            e.id for e in self.edges.values()
            if e.tail in self.endpoints and self.endpoints[e.tail] == INITIAL
        )

    def terminal_edges(self) -> list[str]:
        return sorted(
            e.id for e in self.edges.values()
            if e.head in self.endpoints and self.endpoints[e.head] == TERMINAL
        )

    def dependency_edges(self):
        """Yield (prerequisite edge, dependent edge) pairs of propagation."""
        for v in self.interactions.values():
            yield (v.agent_in, v.agent_out)
            for p in v.patients:
                yield (p.in_edge, p.out_edge)
                yield (v.agent_in, p.out_edge)

    def successor_map(self) -> dict[str, str]:
        """Edge -> next edge on the same strand (agent or patient pair)."""
        succ: dict[str, str] = {}
        for v in self.interactions.values():
            succ[v.agent_in] = v.agent_out
            for p in v.patients:
                succ[p.in_edge] = p.out_edge
        return succ


@dataclass
class Colouring:
    edge_colour: dict[str, Colour]
    interaction_op: dict[str, OpParam]

    def copy(self) -> "Colouring":
        return Colouring(dict(self.edge_colour), dict(self.interaction_op))


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(f"[{v.code}] {v.message}" for v in self.violations)


def validate(net: Network) -> ValidationReport:
    """Check the structural invariants; violations are data, not errors."""
    bad: list[Violation] = []
    nodes = set(net.endpoints) | set(net.interactions)
    overlap = set(net.endpoints) & set(net.interactions)
    for n in sorted(overlap):
        bad.append(Violation("node-role", f"node {n} is both endpoint and interaction", (n,)))

    in_edges: dict[str, list[str]] = {n: [] for n in nodes}
    out_edges: dict[str, list[str]] = {n: [] for n in nodes}
    for e in net.edges.values():
        for node, bucket in ((e.tail, out_edges), (e.head, in_edges)):
            if node not in nodes:
                bad.append(Violation("dangling-edge", f"edge {e.id} references unknown node {node}", (e.id, node)))
            else:
                bucket[node].append(e.id)

    for n, role in sorted(net.endpoints.items()):
        deg = len(in_edges.get(n, ())) + len(out_edges.get(n, ()))
        if deg != 1:
            bad.append(Violation("endpoint-degree", f"endpoint {n} has degree {deg}", (n,)))
        elif role == INITIAL and not out_edges[n]:
            bad.append(Violation("endpoint-orientation", f"initial endpoint {n} is not a source", (n,)))
        elif role == TERMINAL and not in_edges[n]:
            bad.append(Violation("endpoint-orientation", f"terminal endpoint {n} is not a sink", (n,)))
        elif role not in (INITIAL, TERMINAL):
            bad.append(Violation("endpoint-role", f"endpoint {n} has unknown role {role!r}", (n,)))

    n_init = sum(1 for r in net.endpoints.values() if r == INITIAL)
    n_term = sum(1 for r in net.endpoints.values() if r == TERMINAL)
    if n_init != n_term:
        bad.append(Violation("endpoint-count", f"{n_init} initial vs {n_term} terminal endpoints"))

    for v in sorted(net.interactions.values(), key=lambda x: x.id):
        if not v.patients:
            bad.append(Violation("no-patients", f"interaction {v.id} has no patient pairs", (v.id,)))
        slot_in = [v.agent_in] + [p.in_edge for p in v.patients]
        slot_out = [v.agent_out] + [p.out_edge for p in v.patients]
        for eid in slot_in:
            e = net.edges.get(eid)
            if e is None:
                bad.append(Violation("missing-edge", f"interaction {v.id} references unknown edge {eid}", (v.id, eid)))
            elif e.head != v.id:
                bad.append(Violation("slot-orientation", f"edge {eid} is an in-slot of {v.id} but does not point at it", (v.id, eid)))
        for eid in slot_out:
            e = net.edges.get(eid)
            if e is None:
                bad.append(Violation("missing-edge", f"interaction {v.id} references unknown edge {eid}", (v.id, eid)))
            elif e.tail != v.id:
                bad.append(Violation("slot-orientation", f"edge {eid} is an out-slot of {v.id} but does not leave it", (v.id, eid)))
        if len(set(slot_in + slot_out)) != len(slot_in) + len(slot_out):
            bad.append(Violation("slot-reuse", f"interaction {v.id} reuses an edge in two slots", (v.id,)))
        # every incident edge must be paired: unpaired edges show up as
        # a mismatch between actual degree and slot count
        actual_in = set(in_edges.get(v.id, ()))
        actual_out = set(out_edges.get(v.id, ()))
        if actual_in != set(slot_in) or actual_out != set(slot_out):
            stray = sorted((actual_in ^ set(slot_in)) | (actual_out ^ set(slot_out)))
            bad.append(Violation("unpaired-edge", f"interaction {v.id} has unpaired incident edges {stray}", (v.id, *stray)))

    order, leftover = _topological_order(net)
    if leftover:
        bad.append(Violation("cyclic-dependency", f"propagation dependencies contain a cycle through {sorted(leftover)}", tuple(sorted(leftover))))

    return ValidationReport(tuple(bad))


def _topological_order(net: Network) -> tuple[list[str], set[str]]:
    """Deterministic topological order of edges under propagation deps."""
    pending: dict[str, set[str]] = {eid: set() for eid in net.edges}
    dependents: dict[str, list[str]] = {eid: [] for eid in net.edges}
    for pre, post in net.dependency_edges():
        if pre in pending and post in pending and pre not in pending[post]:
            pending[post].add(pre)
            dependents[pre].append(post)
    ready = sorted(eid for eid, deps in pending.items() if not deps)
    order: list[str] = []
    heap = list(ready)
    heapq.heapify(heap)
    done: set[str] = set()
    while heap:
        eid = heapq.heappop(heap)
        if eid in done:
            continue
        done.add(eid)
        order.append(eid)
        for nxt in dependents[eid]:
            pending[nxt].discard(eid)
            if not pending[nxt]:
                heapq.heappush(heap, nxt)
    leftover = set(net.edges) - done
    return order, leftover


def propagate(net: Network, inputs: dict[str, Colour], ops: dict[str, OpParam] | None = None) -> Colouring:
    """Compute the unique colouring extending the given input colours.

    ``ops`` overrides the interactions' stored weights.  Raises
    MissingInput if an initial edge is uncoloured and FusionUndefined when
    a transition is undefined, carrying the offending interaction id.
    """
    merged_ops = {vid: v.op for vid, v in net.interactions.items()}
    if ops:
        for vid, op in ops.items():
            if vid not in merged_ops:
                raise KeyError(f"unknown interaction {vid!r}")
            merged_ops[vid] = op

    colour: dict[str, Colour] = {}
    for eid in net.initial_edges():
        if eid not in inputs:
            raise MissingInput(f"initial edge {eid!r} has no input colour")
        colour[eid] = inputs[eid]

    producer: dict[str, tuple[str, str]] = {}  # edge -> (interaction, role)
    for v in net.interactions.values():
        producer[v.agent_out] = (v.id, "agent")
        for i, p in enumerate(v.patients):
            producer[p.out_edge] = (v.id, f"patient{i}")

    order, leftover = _topological_order(net)
    if leftover:
        raise QnetError(f"network has cyclic dependencies through {sorted(leftover)}")

    for eid in order:
        if eid in colour:
            continue
        if eid not in producer:
            raise MissingInput(f"edge {eid!r} is neither an input nor produced by an interaction")
        vid, role = producer[eid]
        v = net.interactions[vid]
        op = merged_ops[vid]
        agent_colour = colour[v.agent_in]
        if role == "agent":
            colour[eid] = agent_colour
        else:
            idx = int(role[len("patient"):])
            p = v.patients[idx]
            try:
                colour[eid] = apply_transition(colour[p.in_edge], op, agent_colour, p.mode)
            except QnetError as exc:
                raise FusionUndefined(vid, f"{p.mode} undefined at interaction {vid!r}: {exc}") from exc

    return Colouring(edge_colour=colour, interaction_op=merged_ops)


def terminal_colours(net: Network, colouring: Colouring) -> dict[str, Colour]:
    return {eid: colouring.edge_colour[eid] for eid in net.terminal_edges()}


def processes(net: Network) -> list[list[str]]:
    """Partition the edges into maximal strands from inputs to outputs."""
    succ = net.successor_map()
    chains = []
    for start in net.initial_edges():
        chain = [start]
        while chain[-1] in succ:
            chain.append(succ[chain[-1]])
        chains.append(chain)
    return chains


def fused_intermediate_edges(net: Network) -> list[str]:
    """Non-terminal patient outputs: the intermediate fused estimates."""
    terminals = set(net.terminal_edges())
    out = set()
    for v in net.interactions.values():
        for p in v.patients:
            if p.out_edge not in terminals:
                out.add(p.out_edge)
    return sorted(out)


_EMPTY_KEY = "empty"


def canonical_key(net: Network) -> str:
    """Deterministic key invariant under node/edge relabeling.

    The diagram is renumbered by a structural traversal seeded with an
    ordering of the initial endpoints; the minimum encoding over all
    seed orderings is returned.  Exponential in the number of initial
    endpoints, which stays small for diagram-scale networks.
    """
    if not net.edges:
        return _EMPTY_KEY
    inits = net.initial_edges()
    best = None
    for perm in itertools.permutations(inits):
        enc = _encode(net, perm)
        if best is None or enc < best:
            best = enc
    return best


def _encode(net: Network, init_order) -> str:
    number: dict[str, int] = {}
    for i, eid in enumerate(init_order):
        number[eid] = i
    next_no = len(number)

    remaining = dict(net.interactions)
    parts: list[str] = [f"kind={net.quandloid_kind}"]
    while remaining:
        ready = []
        for vid, v in remaining.items():
            ins = [v.agent_in] + [p.in_edge for p in v.patients]
            if all(e in number for e in ins):
                sig = (number[v.agent_in], tuple(number[p.in_edge] for p in v.patients))
                ready.append((sig, vid))
        if not ready:
            # unreachable structure (cyclic or disconnected from inputs)
            frozen = ",".join(sorted(remaining))
            parts.append(f"stuck[{frozen}]")
            break
        ready.sort()
        sig, vid = ready[0]
        v = remaining.pop(vid)
        number[v.agent_out] = next_no
        next_no += 1
        slots = [f"a{number[v.agent_in]}->{number[v.agent_out]}"]
        for p in v.patients:
            number[p.out_edge] = next_no
            next_no += 1
            slots.append(f"p{number[p.in_edge]}->{number[p.out_edge]}:{p.mode[0]}")
        parts.append(f"i(s={v.op.s!r};{';'.join(slots)})")

    stray = sorted(e for e in net.edges if e not in number)
    if stray:
        parts.append(f"stray[{len(stray)}]")
    terminals = sorted(number[e] for e in net.terminal_edges() if e in number)
    parts.append(f"T={terminals}")
    return "|".join(parts)
