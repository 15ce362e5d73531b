"""Colour-preserving local rewrites and bounded equivalence-class search.

Six move kinds are supported, in elimination/introduction pairs:

* R1: remove or insert a self-update, an interaction whose agent and
  single patient carry equal colours.
* R2: remove or insert an update immediately undone by a discount with
  an equal-coloured agent and the same weight.
* R3: slide a crossing past another.  The left form rewires

      (a >_s b) >_t c   into   (a >_t c) >_s (b >_t c)

  by re-pairing the three interactions involved; the right form is its
  inverse.  Edge and interaction ids survive every R3 application, and
  eliminations keep the upstream edge of each spliced pair, so regions
  of interest can be tracked through rewrites.

Applying a move never touches colours outside the matched pattern;
terminal colours are conserved exactly.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace

from .algebra import OpParam, apply_transition, discount, fuse
from .colours import Colour, colours_equal
from .errors import InvalidSite, QnetError
from .network import (
    DISCOUNT,
    UPDATE,
    Colouring,
    Interaction,
    Network,
    PatientPair,
    canonical_key,
    validate,
)

COLOUR_TOL = 1e-9


class MoveKind(enum.Enum):
    R1_INTRO = "R1_INTRO"
    R1_ELIM = "R1_ELIM"
    R2_INTRO = "R2_INTRO"
    R2_ELIM = "R2_ELIM"
    R3_LEFT = "R3_LEFT"
    R3_RIGHT = "R3_RIGHT"


ALL_KINDS = frozenset(MoveKind)
#: moves that slide or cancel crossings without growing the diagram;
#: the default move set for fault isolation searches
SLIDE_KINDS = frozenset({MoveKind.R2_ELIM, MoveKind.R3_LEFT, MoveKind.R3_RIGHT})


@dataclass(frozen=True)
class MoveSite:
    kind: MoveKind
    anchors: tuple[str, ...]
    params: tuple[OpParam, ...] = ()

    def sort_key(self):
        return (self.kind.value, self.anchors, tuple(p.s for p in self.params))


@dataclass
class ApplyResult:
    network: Network
    colouring: Colouring
    merged: dict[str, str]          # removed edge id -> surviving edge id
    split_children: dict[str, tuple[str, ...]]  # split edge -> new segments

    def remap_edges(self, ids) -> frozenset[str]:
        out = set()
        for eid in ids:
            cur = eid
            while cur in self.merged:
                cur = self.merged[cur]
            if cur in self.network.edges:
                out.add(cur)
            for child in self.split_children.get(eid, ()):
                out.add(child)
        return frozenset(out)


def _op_of(colouring: Colouring, v: Interaction) -> OpParam:
    return colouring.interaction_op.get(v.id, v.op)


def _patient_consumer(net: Network, edge_id: str):
    """Interaction and pair consuming edge_id as a patient input, if any."""
    e = net.edges[edge_id]
    v = net.interactions.get(e.head)
    if v is None:
        return None, None
    pair = v.patient_for_in_edge(edge_id)
    if pair is None:
        return None, None
    return v, pair


def _patient_producer(net: Network, edge_id: str):
    """Interaction and pair producing edge_id as a patient output, if any."""
    e = net.edges[edge_id]
    v = net.interactions.get(e.tail)
    if v is None:
        return None, None
    for p in v.patients:
        if p.out_edge == edge_id:
            return v, p
    return None, None


def find_moves(
    net: Network,
    colouring: Colouring,
    kinds=ALL_KINDS,
    op_pool=None,
    tol: float = COLOUR_TOL,
) -> list[MoveSite]:
    """Enumerate applicable move sites, deterministically ordered.

    Introduction moves need parameters; candidate weights come from
    ``op_pool`` (default: the distinct weights already in the network)
    and candidate agents from the existing edges.  Introduction sites
    that would break validity (for example by creating a dependency
    cycle) are filtered out here by a trial application.
    """
    kinds = {k if isinstance(k, MoveKind) else MoveKind(k) for k in kinds}
    colour = colouring.edge_colour
    sites: list[MoveSite] = []

    if MoveKind.R1_ELIM in kinds:
        for v in net.interactions.values():
            if len(v.patients) != 1:
                continue
            p = v.patients[0]
            if colours_equal(colour[v.agent_in], colour[p.in_edge], tol):
                sites.append(MoveSite(MoveKind.R1_ELIM, (v.id,)))

    if MoveKind.R2_ELIM in kinds:
        for v in net.interactions.values():
            if len(v.patients) != 1:
                continue
            p = v.patients[0]
            w, q = _patient_consumer(net, p.out_edge)
            if w is None or w.id == v.id or len(w.patients) != 1:
                continue
            if {p.mode, q.mode} != {UPDATE, DISCOUNT}:
                continue
            if _op_of(colouring, v).s != _op_of(colouring, w).s:
                continue
            if colours_equal(colour[v.agent_in], colour[w.agent_in], tol):
                sites.append(MoveSite(MoveKind.R2_ELIM, (v.id, w.id)))

    if MoveKind.R3_LEFT in kinds:
        for v1 in net.interactions.values():
            if len(v1.patients) != 1:
                continue
            a1 = v1.patients[0].out_edge
            b1 = v1.agent_out
            v2, p2 = _patient_consumer(net, a1)
            v3, p3 = _patient_consumer(net, b1)
            if v2 is None or v3 is None or v2.id == v1.id or v3.id == v1.id:
                continue
            if p2.mode != p3.mode:
                continue
            if _op_of(colouring, v2).s != _op_of(colouring, v3).s:
                continue
            if colours_equal(colour[v2.agent_in], colour[v3.agent_in], tol):
                sites.append(MoveSite(MoveKind.R3_LEFT, (v1.id, v2.id, v3.id)))

    if MoveKind.R3_RIGHT in kinds:
        for u2 in net.interactions.values():
            if len(u2.patients) != 1:
                continue
            a1 = u2.patients[0].in_edge
            b1 = u2.agent_in
            u1, p1 = _patient_producer(net, a1)
            u3, p3 = _patient_producer(net, b1)
            if u1 is None or u3 is None or u1.id == u2.id or u3.id == u2.id:
                continue
            if p1.mode != p3.mode:
                continue
            if _op_of(colouring, u1).s != _op_of(colouring, u3).s:
                continue
            if colours_equal(colour[u1.agent_in], colour[u3.agent_in], tol):
                sites.append(MoveSite(MoveKind.R3_RIGHT, (u2.id, u1.id, u3.id)))

    intro_kinds = kinds & {MoveKind.R1_INTRO, MoveKind.R2_INTRO}
    if intro_kinds:
        pool = op_pool
        if pool is None:
            pool = sorted({v.op.s for v in net.interactions.values()})
            pool = [OpParam(s) for s in pool if s != 0.0]
        edge_ids = sorted(net.edges)
        for kind in sorted(intro_kinds, key=lambda k: k.value):
            for target, agent in itertools.permutations(edge_ids, 2):
                if kind is MoveKind.R1_INTRO and not colours_equal(
                    colour[target], colour[agent], tol
                ):
                    continue
                for op in pool:
                    site = MoveSite(kind, (target, agent), (op,))
                    try:
                        apply_move(net, colouring, site)
                    except QnetError:
                        continue
                    sites.append(site)

    sites.sort(key=MoveSite.sort_key)
    return sites


def apply_move(net: Network, colouring: Colouring, site: MoveSite) -> tuple[Network, Colouring]:
    """Apply a move and return the rewritten network and colouring."""
    result = apply_move_tracked(net, colouring, site)
    return result.network, result.colouring


def apply_move_tracked(net: Network, colouring: Colouring, site: MoveSite) -> ApplyResult:
    handler = {
        MoveKind.R1_ELIM: _apply_r1_elim,
        MoveKind.R1_INTRO: _apply_r1_intro,
        MoveKind.R2_ELIM: _apply_r2_elim,
        MoveKind.R2_INTRO: _apply_r2_intro,
        MoveKind.R3_LEFT: _apply_r3_left,
        MoveKind.R3_RIGHT: _apply_r3_right,
    }[site.kind]
    result = handler(net, colouring, site)
    report = validate(result.network)
    if not report.ok:
        raise InvalidSite(f"{site.kind.value} at {site.anchors} breaks validity: {report}")
    return result


class _Builder:
    """Mutable copy of a network plus colouring, for local surgery."""

    def __init__(self, net: Network, colouring: Colouring):
        self.edges = dict(net.edges)
        self.endpoints = dict(net.endpoints)
        self.interactions = dict(net.interactions)
        self.kind = net.quandloid_kind
        self.colour = dict(colouring.edge_colour)
        self.ops = dict(colouring.interaction_op)
        for vid, v in net.interactions.items():
            self.ops.setdefault(vid, v.op)
        self.merged: dict[str, str] = {}
        self.split_children: dict[str, tuple[str, ...]] = {}

    def fresh_edge_id(self, base: str) -> str:
        i = 1
        while f"{base}~{i}" in self.edges:
            i += 1
        return f"{base}~{i}"

    def fresh_interaction_id(self, base: str) -> str:
        taken = set(self.interactions) | set(self.endpoints)
        i = 1
        while f"{base}~{i}" in taken:
            i += 1
        return f"{base}~{i}"

    def substitute_slot(self, node_id: str, old_edge: str, new_edge: str, slot: str) -> None:
        """Replace old_edge with new_edge in the given slot side of a node."""
        v = self.interactions.get(node_id)
        if v is None:
            return  # endpoint: nothing stored on the node side
        if slot == "in":
            agent_in = new_edge if v.agent_in == old_edge else v.agent_in
            patients = tuple(
                replace(p, in_edge=new_edge) if p.in_edge == old_edge else p
                for p in v.patients
            )
            self.interactions[node_id] = replace(v, agent_in=agent_in, patients=patients)
        else:
            agent_out = new_edge if v.agent_out == old_edge else v.agent_out
            patients = tuple(
                replace(p, out_edge=new_edge) if p.out_edge == old_edge else p
                for p in v.patients
            )
            self.interactions[node_id] = replace(v, agent_out=agent_out, patients=patients)

    def splice(self, keep: str, drop: str) -> None:
        """Merge the pair (keep -> node -> drop) into the single edge keep."""
        new_head = self.edges[drop].head
        self.edges[keep] = replace(self.edges[keep], head=new_head)
        self.substitute_slot(new_head, drop, keep, "in")
        del self.edges[drop]
        self.colour.pop(drop, None)
        self.merged[drop] = keep

    def split(self, edge_id: str, middle_node: str) -> str:
        """Insert a node on edge_id; returns the new downstream segment id."""
        e = self.edges[edge_id]
        new_id = self.fresh_edge_id(edge_id)
        self.edges[edge_id] = replace(e, head=middle_node)
        self.edges[new_id] = type(e)(id=new_id, tail=middle_node, head=e.head)
        self.substitute_slot(e.head, edge_id, new_id, "in")
        children = self.split_children.get(edge_id, ())
        self.split_children[edge_id] = children + (new_id,)
        return new_id

    def remove_interaction(self, vid: str) -> None:
        v = self.interactions.pop(vid)
        self.ops.pop(vid, None)
        self.splice(v.agent_in, v.agent_out)
        for p in v.patients:
            self.splice(p.in_edge, p.out_edge)

    def finish(self) -> ApplyResult:
        net = Network(
            edges=self.edges,
            endpoints=self.endpoints,
            interactions=self.interactions,
            quandloid_kind=self.kind,
        )
        ops = {vid: self.ops[vid] for vid in self.interactions}
        return ApplyResult(
            network=net,
            colouring=Colouring(edge_colour=self.colour, interaction_op=ops),
            merged=self.merged,
            split_children=self.split_children,
        )


def _require(cond: bool, site: MoveSite, why: str) -> None:
    if not cond:
        raise InvalidSite(f"{site.kind.value} at {site.anchors}: {why}")


def _apply_r1_elim(net, colouring, site) -> ApplyResult:
    (vid,) = site.anchors
    v = net.interactions.get(vid)
    _require(v is not None and len(v.patients) == 1, site, "pattern not present")
    p = v.patients[0]
    _require(
        colours_equal(colouring.edge_colour[v.agent_in], colouring.edge_colour[p.in_edge], COLOUR_TOL),
        site,
        "agent and patient colours differ",
    )
    b = _Builder(net, colouring)
    b.remove_interaction(vid)
    return b.finish()


def _apply_r1_intro(net, colouring, site) -> ApplyResult:
    target, agent = site.anchors
    (op,) = site.params
    _require(target in net.edges and agent in net.edges and target != agent, site, "bad anchors")
    _require(
        colours_equal(colouring.edge_colour[target], colouring.edge_colour[agent], COLOUR_TOL),
        site,
        "self-update needs equal colours",
    )
    b = _Builder(net, colouring)
    vid = b.fresh_interaction_id("r1")
    t2 = b.split(target, vid)
    g2 = b.split(agent, vid)
    b.interactions[vid] = Interaction(
        id=vid, agent_in=agent, agent_out=g2,
        patients=(PatientPair(target, t2, UPDATE),), op=op,
    )
    b.ops[vid] = op
    b.colour[g2] = b.colour[agent]
    b.colour[t2] = fuse(b.colour[target], op, b.colour[agent])
    return b.finish()


def _apply_r2_elim(net, colouring, site) -> ApplyResult:
    vid, wid = site.anchors
    v = net.interactions.get(vid)
    w = net.interactions.get(wid)
    _require(v is not None and w is not None and vid != wid, site, "pattern not present")
    _require(len(v.patients) == 1 and len(w.patients) == 1, site, "multi-patient chain")
    p, q = v.patients[0], w.patients[0]
    _require(p.out_edge == q.in_edge, site, "interactions are not consecutive")
    _require({p.mode, q.mode} == {UPDATE, DISCOUNT}, site, "modes do not cancel")
    _require(_op_of(colouring, v).s == _op_of(colouring, w).s, site, "weights differ")
    _require(
        colours_equal(colouring.edge_colour[v.agent_in], colouring.edge_colour[w.agent_in], COLOUR_TOL),
        site,
        "agent colours differ",
    )
    b = _Builder(net, colouring)
    b.remove_interaction(vid)
    b.remove_interaction(wid)
    return b.finish()


def _apply_r2_intro(net, colouring, site) -> ApplyResult:
    target, agent = site.anchors
    (op,) = site.params
    _require(target in net.edges and agent in net.edges and target != agent, site, "bad anchors")
    c_target = colouring.edge_colour[target]
    c_agent = colouring.edge_colour[agent]
    try:
        lifted = fuse(c_target, op, c_agent)
        dropped = discount(lifted, op, c_agent)
    except QnetError as exc:
        raise InvalidSite(f"R2_INTRO at {site.anchors}: transition undefined ({exc})") from exc
    b = _Builder(net, colouring)
    vid = b.fresh_interaction_id("r2u")
    wid = b.fresh_interaction_id("r2d")
    t2 = b.split(target, vid)
    t3 = b.split(t2, wid)
    g2 = b.split(agent, vid)
    g3 = b.split(g2, wid)
    b.interactions[vid] = Interaction(
        id=vid, agent_in=agent, agent_out=g2,
        patients=(PatientPair(target, t2, UPDATE),), op=op,
    )
    b.interactions[wid] = Interaction(
        id=wid, agent_in=g2, agent_out=g3,
        patients=(PatientPair(t2, t3, DISCOUNT),), op=op,
    )
    b.ops[vid] = op
    b.ops[wid] = op
    b.colour[g2] = c_agent
    b.colour[g3] = c_agent
    b.colour[t2] = lifted
    b.colour[t3] = dropped
    return b.finish()


def _swap_patient(v: Interaction, old: PatientPair, new: PatientPair) -> Interaction:
    patients = tuple(new if p == old else p for p in v.patients)
    return replace(v, patients=patients)


def _apply_r3_left(net, colouring, site) -> ApplyResult:
    v1id, v2id, v3id = site.anchors
    v1 = net.interactions.get(v1id)
    _require(v1 is not None and len(v1.patients) == 1, site, "pattern not present")
    a0, a1, m1 = v1.patients[0].in_edge, v1.patients[0].out_edge, v1.patients[0].mode
    b0, b1 = v1.agent_in, v1.agent_out
    v2, p2 = _patient_consumer(net, a1)
    v3, p3 = _patient_consumer(net, b1)
    _require(v2 is not None and v2.id == v2id, site, "patient continuation mismatch")
    _require(v3 is not None and v3.id == v3id, site, "agent continuation mismatch")
    _require(v2.id != v1id and v3.id != v1id, site, "degenerate anchors")
    _require(p2.mode == p3.mode, site, "far-crossing modes differ")
    op2, op3 = _op_of(colouring, v2), _op_of(colouring, v3)
    _require(op2.s == op3.s, site, "far-crossing weights differ")
    colour = colouring.edge_colour
    _require(
        colours_equal(colour[v2.agent_in], colour[v3.agent_in], COLOUR_TOL),
        site,
        "far-crossing agent colours differ",
    )
    a2 = p2.out_edge
    b2 = p3.out_edge

    b = _Builder(net, colouring)
    # re-pair: the s-crossing moves after the two t-crossings; when the
    # two far crossings are one thick interaction both swaps land on it
    b.interactions[v1id] = replace(
        v1, agent_in=b1, agent_out=b2, patients=(PatientPair(a1, a2, m1),)
    )
    b.interactions[v2.id] = _swap_patient(b.interactions[v2.id], p2, PatientPair(a0, a1, p2.mode))
    b.interactions[v3.id] = _swap_patient(b.interactions[v3.id], p3, PatientPair(b0, b1, p3.mode))

    _rewire(b, a0, head=v2.id)
    _rewire(b, a1, tail=v2.id, head=v1id)
    _rewire(b, a2, tail=v1id)
    _rewire(b, b0, head=v3.id)
    _rewire(b, b1, tail=v3.id, head=v1id)
    _rewire(b, b2, tail=v1id)

    b.colour[a1] = apply_transition(colour[a0], op2, colour[v2.agent_in], p2.mode)
    b.colour[b1] = apply_transition(colour[b0], op3, colour[v3.agent_in], p3.mode)
    return b.finish()


def _apply_r3_right(net, colouring, site) -> ApplyResult:
    u2id, u1id, u3id = site.anchors
    u2 = net.interactions.get(u2id)
    _require(u2 is not None and len(u2.patients) == 1, site, "pattern not present")
    a1, a2, m1 = u2.patients[0].in_edge, u2.patients[0].out_edge, u2.patients[0].mode
    b1, b2 = u2.agent_in, u2.agent_out
    u1, p1 = _patient_producer(net, a1)
    u3, p3 = _patient_producer(net, b1)
    _require(u1 is not None and u1.id == u1id, site, "patient producer mismatch")
    _require(u3 is not None and u3.id == u3id, site, "agent producer mismatch")
    _require(u1.id != u2id and u3.id != u2id, site, "degenerate anchors")
    _require(p1.mode == p3.mode, site, "far-crossing modes differ")
    op1, op3 = _op_of(colouring, u1), _op_of(colouring, u3)
    _require(op1.s == op3.s, site, "far-crossing weights differ")
    colour = colouring.edge_colour
    _require(
        colours_equal(colour[u1.agent_in], colour[u3.agent_in], COLOUR_TOL),
        site,
        "far-crossing agent colours differ",
    )
    a0 = p1.in_edge
    b0 = p3.in_edge

    b = _Builder(net, colouring)
    # re-pair: the s-crossing moves before the two t-crossings
    b.interactions[u2id] = replace(
        u2, agent_in=b0, agent_out=b1, patients=(PatientPair(a0, a1, m1),)
    )
    b.interactions[u1.id] = _swap_patient(b.interactions[u1.id], p1, PatientPair(a1, a2, p1.mode))
    b.interactions[u3.id] = _swap_patient(b.interactions[u3.id], p3, PatientPair(b1, b2, p3.mode))

    _rewire(b, a0, head=u2id)
    _rewire(b, a1, tail=u2id, head=u1.id)
    _rewire(b, a2, tail=u1.id)
    _rewire(b, b0, head=u2id)
    _rewire(b, b1, tail=u2id, head=u3.id)
    _rewire(b, b2, tail=u3.id)

    b.colour[b1] = colour[b0]
    b.colour[a1] = apply_transition(colour[a0], _op_of(colouring, u2), colour[b0], m1)
    return b.finish()


def _rewire(b: _Builder, edge_id: str, tail: str | None = None, head: str | None = None) -> None:
    e = b.edges[edge_id]
    b.edges[edge_id] = replace(
        e, tail=tail if tail is not None else e.tail, head=head if head is not None else e.head
    )


@dataclass
class ClassMember:
    network: Network
    colouring: Colouring
    moves: tuple[MoveSite, ...]
    key: str
    region: frozenset[str] | None = None


@dataclass
class ClassResult:
    members: list[ClassMember]
    truncated: bool

    def keys(self) -> list[str]:
        return [m.key for m in self.members]


def equivalence_class(
    net: Network,
    colouring: Colouring,
    depth: int,
    max_nodes: int = 1000,
    kinds=ALL_KINDS,
    op_pool=None,
    region=None,
    tol: float = COLOUR_TOL,
) -> ClassResult:
    """Breadth-first closure under the given move kinds, up to depth.

    Members are deduplicated by canonical key; the input is always the
    first member.  When a region of edge ids is given it is remapped
    through every move so taint accounting stays meaningful.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    start = ClassMember(
        network=net,
        colouring=colouring,
        moves=(),
        key=canonical_key(net),
        region=frozenset(region) if region is not None else None,
    )
    members = [start]
    seen = {start.key}
    truncated = False
    frontier = [start]
    for _ in range(depth):
        if truncated or not frontier:
            break
        next_frontier: list[ClassMember] = []
        for member in frontier:
            sites = find_moves(member.network, member.colouring, kinds, op_pool=op_pool, tol=tol)
            for site in sites:
                try:
                    result = apply_move_tracked(member.network, member.colouring, site)
                except QnetError:
                    continue
                key = canonical_key(result.network)
                if key in seen:
                    continue
                if len(members) >= max_nodes:
                    truncated = True
                    break
                seen.add(key)
                child = ClassMember(
                    network=result.network,
                    colouring=result.colouring,
                    moves=member.moves + (site,),
                    key=key,
                    region=result.remap_edges(member.region) if member.region is not None else None,
                )
                members.append(child)
                next_frontier.append(child)
            if truncated:
                break
        frontier = next_frontier
    return ClassResult(members=members, truncated=truncated)
