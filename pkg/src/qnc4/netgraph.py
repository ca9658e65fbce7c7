"""Directed acyclic network model over the four-letter alphabet.

The alphabet is Sigma4 = {00, 01, 10, 11}, encoded as the integers 0..3
(value = 2 * first_bit + second_bit).  A classical protocol attaches to each
outgoing edge of a node an operation of the form sum_i h_i(X_i), where the
sum is taken in one of the two abelian group structures on Sigma4 and every
h_i is a constant, one-to-one, or two-to-one letter map.

Any such network can be rewritten into an equivalent degree-3 form whose
nodes are sources (0 in, 1 out), sinks (1 in, 0 out), forks (1 in, 2 out,
pure copy), joins (2 in, 1 out, group addition) and transforms (1 in, 1 out,
one letter map).  The rewrite is `normalize_to_d3`.
"""

import enum
import heapq
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

from .errors import QncError, SchemaError, ValidationError

Letter = int

LETTERS: tuple[Letter, ...] = (0, 1, 2, 3)

_LETTER_STRINGS = ("00", "01", "10", "11")


def letter_to_str(x: Letter) -> str:
    return _LETTER_STRINGS[x]


def letter_from_str(s: str) -> Letter:
    try:
        return _LETTER_STRINGS.index(s)
    except ValueError:
        raise SchemaError(
            f"not a letter: {s!r} (expected one of {', '.join(_LETTER_STRINGS)})"
        ) from None


class GroupKind(enum.Enum):
    """The two abelian group structures on the four letters."""

    Z4 = "Z4"
    Z2xZ2 = "Z2xZ2"

    def add(self, a: Letter, b: Letter) -> Letter:
        if self is GroupKind.Z4:
            return (a + b) & 3
        return a ^ b

    @staticmethod
    def from_name(name: str) -> "GroupKind":
        for kind in GroupKind:
            if kind.value == name:
                return kind
        raise SchemaError(f"unknown group {name!r} (expected Z4 or Z2xZ2)")


class MapClass(enum.Enum):
    CONSTANT = "constant"
    ONE_TO_ONE = "one-to-one"
    TWO_TO_ONE = "two-to-one"


@dataclass(frozen=True)
class LetterMap:
    """A letter map given by its value table, indexed by input letter."""

    table: tuple[Letter, Letter, Letter, Letter]

    def __call__(self, x: Letter) -> Letter:
        return self.table[x]

    def image(self) -> frozenset:
        return frozenset(self.table)

    def try_classify(self) -> MapClass | None:
        """Classify the map, or return None when it is in no legal class.

        Legal classes: constant (image size 1), one-to-one (image size 4),
        two-to-one (image size 2, each image value hit exactly twice).
        A map of image size 3, or of image size 2 with a 3/1 preimage split,
        is illegal and is reported by validation, never repaired.
        """
        counts = Counter(self.table)
        if len(counts) == 1:
            return MapClass.CONSTANT
        if len(counts) == 4:
            return MapClass.ONE_TO_ONE
        if len(counts) == 2 and set(counts.values()) == {2}:
            return MapClass.TWO_TO_ONE
        return None

    def classify(self) -> MapClass:
        cls = self.try_classify()
        if cls is None:
            raise ValueError(
                f"map {self.table} is neither constant, one-to-one nor two-to-one"
            )
        return cls

    @property
    def is_identity(self) -> bool:
        return self.table == (0, 1, 2, 3)


IDENTITY_MAP = LetterMap((0, 1, 2, 3))


def constant_map(c: Letter) -> LetterMap:
    return LetterMap((c, c, c, c))


@dataclass(frozen=True)
class Term:
    """One summand h(X_i) of an edge operation; `in_pos` indexes the node's
    incoming edges sorted by edge id."""

    in_pos: int
    map: LetterMap


@dataclass(frozen=True)
class NodeOp:
    """The operation for one outgoing edge (position `out_pos` in the node's
    sorted outgoing-edge list).  An empty term tuple denotes the constant 00."""

    out_pos: int
    terms: tuple[Term, ...]


def node_op(out_pos: int, terms) -> NodeOp:
    """Convenience constructor from (in_pos, LetterMap) pairs."""
    return NodeOp(out_pos, tuple(Term(i, m) for i, m in terms))


@dataclass(frozen=True)
class Node:
    id: str
    kind: str  # source | sink | internal


NODE_KINDS = ("source", "sink", "internal")


@dataclass
class Network:
    """A DAG with typed nodes, ordered edges, and a delivery requirement.

    Edges are identified by their index in `edges`.  `requirements` maps each
    sink id to the source id whose input letter the sink must reproduce.
    Instances are treated as immutable once constructed; derived views are
    cached.
    """

    nodes: list[Node]
    edges: list[tuple[str, str]]
    requirements: dict[str, str]

    @cached_property
    def kind_of(self) -> dict[str, str]:
        return {n.id: n.kind for n in self.nodes}

    @cached_property
    def _in_map(self) -> dict[str, list[int]]:
        m = {n.id: [] for n in self.nodes}
        for e, (_, v) in enumerate(self.edges):
            if v in m:
                m[v].append(e)
        return m

    @cached_property
    def _out_map(self) -> dict[str, list[int]]:
        m = {n.id: [] for n in self.nodes}
        for e, (u, _) in enumerate(self.edges):
            if u in m:
                m[u].append(e)
        return m

    def in_edges(self, v: str) -> list[int]:
        return self._in_map[v]

    def out_edges(self, v: str) -> list[int]:
        return self._out_map[v]

    @cached_property
    def source_ids(self) -> list[str]:
        return sorted(n.id for n in self.nodes if n.kind == "source")

    @cached_property
    def sink_ids(self) -> list[str]:
        return sorted(n.id for n in self.nodes if n.kind == "sink")

    def _kahn(self) -> list[str]:
        """Topological order over well-formed edges, smallest id first among
        ready nodes.  Shorter than the node list iff there is a cycle."""
        ids = {n.id for n in self.nodes}
        indeg = {i: 0 for i in ids}
        children = {i: [] for i in ids}
        for u, v in self.edges:
            if u in ids and v in ids:
                indeg[v] += 1
                children[u].append(v)
        ready = sorted(i for i in ids if indeg[i] == 0)
        heapq.heapify(ready)
        order = []
        while ready:
            u = heapq.heappop(ready)
            order.append(u)
            for w in children[u]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(ready, w)
        return order

    @cached_property
    def topo_order(self) -> list[str]:
        order = self._kahn()
        if len(order) != len(self.nodes):
            raise QncError("network contains a cycle")
        return order


def make_network(nodes, edges, requirements) -> Network:
    """Build a Network from (id, kind) pairs, (from, to) pairs and a
    sink -> source mapping."""
    return Network(
        [Node(i, k) for i, k in nodes],
        [(u, v) for u, v in edges],
        dict(requirements),
    )


@dataclass
class ClassicalProtocol:
    """Edge operations for every non-source node of a Network.

    `ops[node]` lists one NodeOp per outgoing-edge position.  Sinks carry at
    most one NodeOp, under out position 0, describing how the delivered
    letter is decoded from the sink's incoming edges; a sink with a single
    incoming edge may omit it (identity).  Sources pass their input letter
    through unchanged and carry no operations.
    """

    group: GroupKind
    ops: dict[str, tuple[NodeOp, ...]]


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, msg: str) -> None:
        self.violations.append(msg)


def validate_network(net: Network, proto: ClassicalProtocol) -> ValidationReport:
    """Structural validation; every problem becomes one report entry."""
    rep = ValidationReport()
    seen = set()
    for n in net.nodes:
        if n.id in seen:
            rep.add(f"duplicate node id {n.id}")
        seen.add(n.id)
        if n.kind not in NODE_KINDS:
            rep.add(f"node {n.id} has unknown kind {n.kind!r}")
    for e, (u, v) in enumerate(net.edges):
        if u not in seen:
            rep.add(f"edge {e} starts at unknown node {u}")
        if v not in seen:
            rep.add(f"edge {e} ends at unknown node {v}")
    if len(net._kahn()) != len(net.nodes):
        rep.add("network contains a cycle")

    for n in net.nodes:
        indeg = len(net.in_edges(n.id))
        outdeg = len(net.out_edges(n.id))
        if n.kind == "source":
            if indeg:
                rep.add(f"source {n.id} has indegree {indeg} (must be 0)")
            if not outdeg:
                rep.add(f"source {n.id} has outdegree 0 (must send its letter somewhere)")
        elif n.kind == "sink":
            if outdeg:
                rep.add(f"sink {n.id} has outdegree {outdeg} (must be 0)")
            if not indeg:
                rep.add(f"sink {n.id} has indegree 0 (receives nothing)")
        else:
            if not indeg:
                rep.add(f"internal node {n.id} has indegree 0")
            if not outdeg:
                rep.add(f"internal node {n.id} has outdegree 0")

    sources = set(net.source_ids)
    for t in net.sink_ids:
        if t not in net.requirements:
            rep.add(f"missing requirement for sink {t}")
    for t, s in net.requirements.items():
        if net.kind_of.get(t) != "sink":
            rep.add(f"requirement names {t}, which is not a sink")
        if s not in sources:
            rep.add(f"requirement for sink {t} names {s}, which is not a source")

    for v, ops in proto.ops.items():
        kind = net.kind_of.get(v)
        if kind is None:
            rep.add(f"operations given for unknown node {v}")
            continue
        if kind == "source":
            rep.add(f"source {v} carries operations (sources pass their letter through)")
            continue
        indeg = len(net.in_edges(v))
        outdeg = len(net.out_edges(v))
        n_out = 1 if kind == "sink" else outdeg
        seen_out = set()
        for op in ops:
            if not 0 <= op.out_pos < n_out:
                rep.add(f"node {v} has an operation for missing outgoing edge {op.out_pos}")
                continue
            if op.out_pos in seen_out:
                rep.add(f"node {v} has two operations for outgoing edge {op.out_pos}")
            seen_out.add(op.out_pos)
            seen_in = set()
            for term in op.terms:
                if not 0 <= term.in_pos < indeg:
                    rep.add(
                        f"operation on node {v} (out {op.out_pos}) references "
                        f"missing incoming edge {term.in_pos}"
                    )
                    continue
                if term.in_pos in seen_in:
                    rep.add(
                        f"operation on node {v} (out {op.out_pos}) references "
                        f"incoming edge {term.in_pos} twice"
                    )
                seen_in.add(term.in_pos)
                if term.map.try_classify() is None:
                    rep.add(
                        f"operation map {term.map.table} on node {v} (out {op.out_pos}) "
                        "is neither constant, one-to-one nor two-to-one"
                    )

    for n in net.nodes:
        if n.kind == "internal":
            covered = {op.out_pos for op in proto.ops.get(n.id, ())}
            for j in range(len(net.out_edges(n.id))):
                if j not in covered:
                    rep.add(f"outgoing edge {j} of node {n.id} has no operation")
        elif n.kind == "sink":
            if len(net.in_edges(n.id)) > 1 and not proto.ops.get(n.id):
                rep.add(
                    f"sink {n.id} has {len(net.in_edges(n.id))} incoming edges "
                    "but no decode operation"
                )
    return rep


# ---------------------------------------------------------------------------
# degree-3 form


D3_ROLES = ("source", "sink", "fork", "join", "transform")

_ROLE_DEGREES = {
    "source": (0, 1),
    "sink": (1, 0),
    "fork": (1, 2),
    "join": (2, 1),
    "transform": (1, 1),
}


@dataclass
class D3Network:
    """A network in degree-3 form.

    Every node carries a role with a fixed degree signature; the implied
    protocol is: sources pass through, forks copy, joins add in `group`,
    transforms apply their letter map, sinks receive.
    """

    network: Network
    roles: dict[str, str]
    transforms: dict[str, LetterMap]
    group: GroupKind

    def to_protocol(self) -> ClassicalProtocol:
        """The implied edge operations, in ordinary protocol form."""
        ops = {}
        for n in self.network.nodes:
            role = self.roles[n.id]
            if role == "fork":
                ops[n.id] = (
                    node_op(0, [(0, IDENTITY_MAP)]),
                    node_op(1, [(0, IDENTITY_MAP)]),
                )
            elif role == "join":
                ops[n.id] = (node_op(0, [(0, IDENTITY_MAP), (1, IDENTITY_MAP)]),)
            elif role == "transform":
                ops[n.id] = (node_op(0, [(0, self.transforms[n.id])]),)
            elif role == "sink":
                ops[n.id] = (node_op(0, [(0, IDENTITY_MAP)]),)
        return ClassicalProtocol(self.group, ops)

    def to_instance(self) -> tuple[Network, ClassicalProtocol]:
        return self.network, self.to_protocol()


def validate_d3(d3: D3Network) -> ValidationReport:
    rep = ValidationReport()
    net = d3.network
    base = validate_network(net, d3.to_protocol())
    rep.violations.extend(base.violations)
    for n in net.nodes:
        role = d3.roles.get(n.id)
        if role not in D3_ROLES:
            rep.add(f"node {n.id} has unknown role {role!r}")
            continue
        want_kind = role if role in ("source", "sink") else "internal"
        if n.kind != want_kind:
            rep.add(f"node {n.id} has role {role} but kind {n.kind}")
        indeg, outdeg = len(net.in_edges(n.id)), len(net.out_edges(n.id))
        w_in, w_out = _ROLE_DEGREES[role]
        if (indeg, outdeg) != (w_in, w_out):
            rep.add(
                f"{role} {n.id} has degree ({indeg}, {outdeg}), expected ({w_in}, {w_out})"
            )
        if role == "transform":
            m = d3.transforms.get(n.id)
            if m is None:
                rep.add(f"transform {n.id} has no letter map")
            elif m.try_classify() is None:
                rep.add(f"transform {n.id} carries illegal map {m.table}")
    for v in d3.transforms:
        if d3.roles.get(v) != "transform":
            rep.add(f"letter map given for non-transform node {v}")
    return rep


class _Normalizer:
    """Rewrites one validated instance into degree-3 form.

    Nodes already shaped like a degree-3 role are kept under their own id,
    so a degree-3 input is reproduced unchanged.  Everything else is
    decomposed: per-value fork chains make the needed copies, non-identity
    term maps become transform nodes, and multi-term sums become left-leaning
    join chains.  Incoming values that no operation uses are absorbed through
    a constant-00 term, which contributes the group identity.
    """

    def __init__(self, net: Network, proto: ClassicalProtocol):
        self.net = net
        self.proto = proto
        self.used = {n.id for n in net.nodes}
        self.original = set(self.used)
        self.nodes: list[Node] = []
        self.roles: dict[str, str] = {}
        self.transforms: dict[str, LetterMap] = {}
        self.edges: list[tuple[str, str]] = []
        self.corr: dict[str, list[str]] = {n.id: [] for n in net.nodes}
        self.prod: dict[int, str] = {}  # original edge id -> producing new node

    def fresh(self, base: str) -> str:
        nid = base
        while nid in self.used:
            nid += "_"
        self.used.add(nid)
        return nid

    def add_node(self, nid: str, role: str, orig: str, map_: LetterMap | None = None):
        kind = role if role in ("source", "sink") else "internal"
        self.nodes.append(Node(nid, kind))
        self.roles[nid] = role
        if map_ is not None:
            self.transforms[nid] = map_
        self.corr[orig].append(nid)

    def add_edge(self, u: str, v: str):
        self.edges.append((u, v))

    def build(self) -> tuple[D3Network, dict[str, list[str]]]:
        for v in self.net.topo_order:
            kind = self.net.kind_of[v]
            if kind == "source":
                self._emit_source(v)
            elif kind == "sink":
                self._emit_sink(v)
            else:
                self._emit_internal(v)
        d3 = D3Network(
            Network(self.nodes, self.edges, dict(self.net.requirements)),
            self.roles,
            self.transforms,
            self.proto.group,
        )
        rep = validate_d3(d3)
        if not rep.ok:
            raise QncError(
                "normalization produced an invalid degree-3 network: "
                + "; ".join(rep.violations)
            )
        return d3, self.corr

    def _terms_by_out(self, v: str, n_out: int) -> list[list[tuple[int, LetterMap]]]:
        by_out = [[] for _ in range(n_out)]
        for op in self.proto.ops.get(v, ()):
            by_out[op.out_pos] = [(t.in_pos, t.map) for t in op.terms]
        return by_out

    def _emit_source(self, v: str):
        outs = self.net.out_edges(v)
        self.add_node(v, "source", v)
        if len(outs) == 1:
            self.prod[outs[0]] = v
            return
        # copy chain: fork k feeds original out k and the next fork
        prev = v
        forks = []
        for k in range(len(outs) - 1):
            f = self.fresh(f"{v}.f{k}")
            self.add_node(f, "fork", v)
            self.add_edge(prev, f)
            forks.append(f)
            prev = f
        for k, e in enumerate(outs):
            self.prod[e] = forks[min(k, len(forks) - 1)]

    def _emit_internal(self, v: str):
        ins = self.net.in_edges(v)
        outs = self.net.out_edges(v)
        by_out = self._terms_by_out(v, len(outs))

        if len(ins) == 1 and len(outs) == 2:
            if all(t == [(0, IDENTITY_MAP)] for t in by_out):
                self.add_node(v, "fork", v)
                self.add_edge(self.prod[ins[0]], v)
                self.prod[outs[0]] = self.prod[outs[1]] = v
                return
        if len(ins) == 2 and len(outs) == 1:
            if sorted(by_out[0]) == [(0, IDENTITY_MAP), (1, IDENTITY_MAP)]:
                self.add_node(v, "join", v)
                self.add_edge(self.prod[ins[0]], v)
                self.add_edge(self.prod[ins[1]], v)
                self.prod[outs[0]] = v
                return
        if len(ins) == 1 and len(outs) == 1:
            terms = by_out[0]
            m = terms[0][1] if terms else constant_map(0)
            if len(terms) <= 1:
                self.add_node(v, "transform", v, m)
                self.add_edge(self.prod[ins[0]], v)
                self.prod[outs[0]] = v
                return

        producers = self._build_chains(v, ins, by_out)
        for j, e in enumerate(outs):
            self.prod[e] = producers[j]

    def _emit_sink(self, v: str):
        ins = self.net.in_edges(v)
        ops = self.proto.ops.get(v, ())
        if ops:
            # an explicit decode with no terms means the constant 00, which
            # is not the same as the implicit identity of an omitted decode
            terms = [(t.in_pos, t.map) for t in ops[0].terms]
        else:
            terms = [(0, IDENTITY_MAP)]

        if len(ins) == 1 and terms == [(0, IDENTITY_MAP)]:
            p = self.prod[ins[0]]
        else:
            p = self._build_chains(v, ins, [terms])[0]
        # a value copied just before delivery still needs a carrier operation
        if self.roles.get(p) == "fork" and p not in self.original:
            rx = self.fresh(f"{v}.rx")
            self.add_node(rx, "transform", v, IDENTITY_MAP)
            self.add_edge(p, rx)
            p = rx
        self.add_node(v, "sink", v)
        self.add_edge(p, v)

    def _build_chains(self, v, ins, by_out) -> list[str]:
        """Fork, transform and join structure for one decomposed node.
        Returns the producing new node per output position."""
        by_out = [list(t) for t in by_out]
        for terms in by_out:
            if not terms:
                terms.append((0, constant_map(0)))
        used_in = {i for terms in by_out for i, _ in terms}
        for i in range(len(ins)):
            if i not in used_in:
                by_out[-1].append((i, constant_map(0)))

        consumers = {i: [] for i in range(len(ins))}
        for j, terms in enumerate(by_out):
            for t, (i, _) in enumerate(terms):
                consumers[i].append((j, t))

        leaf = {}  # (j, t) -> producing node for that copy of the value
        for i, cons in consumers.items():
            if not cons:
                continue
            if len(cons) == 1:
                leaf[cons[0]] = self.prod[ins[i]]
                continue
            prev = self.prod[ins[i]]
            forks = []
            for k in range(len(cons) - 1):
                f = self.fresh(f"{v}.f{i}.{k}")
                self.add_node(f, "fork", v)
                self.add_edge(prev, f)
                forks.append(f)
                prev = f
            for t, c in enumerate(cons):
                leaf[c] = forks[min(t, len(forks) - 1)]

        producers = []
        for j, terms in enumerate(by_out):
            ports = []
            for t, (i, h) in enumerate(terms):
                p = leaf[(j, t)]
                if not h.is_identity:
                    tr = self.fresh(f"{v}.h{j}.{t}")
                    self.add_node(tr, "transform", v, h)
                    self.add_edge(p, tr)
                    p = tr
                ports.append(p)
            if len(ports) == 1:
                producers.append(ports[0])
                continue
            prev = None
            for t in range(1, len(ports)):
                jn = self.fresh(f"{v}.j{j}.{t - 1}")
                self.add_node(jn, "join", v)
                self.add_edge(prev if prev else ports[0], jn)
                self.add_edge(ports[t], jn)
                prev = jn
            producers.append(prev)
        return producers


def normalize_to_d3(
    net: Network, proto: ClassicalProtocol
) -> tuple[D3Network, dict[str, list[str]]]:
    """Rewrite an instance into degree-3 form.

    Returns the degree-3 network and a correspondence mapping each original
    node id to the new nodes that replace it (empty for nodes that dissolve
    into plain pass-through wiring).  Raises ValidationError when the input
    fails `validate_network`.
    """
    rep = validate_network(net, proto)
    if not rep.ok:
        raise ValidationError(rep)
    return _Normalizer(net, proto).build()


# ---------------------------------------------------------------------------
# JSON layout


def _map_to_json(m: LetterMap) -> list[str]:
    return [letter_to_str(x) for x in m.table]


def _map_from_json(data, where: str) -> LetterMap:
    if not isinstance(data, list) or len(data) != 4:
        raise SchemaError(f"{where}: map must be an array of 4 letters")
    return LetterMap(tuple(letter_from_str(s) for s in data))


def instance_to_json(net: Network, proto: ClassicalProtocol) -> dict:
    ops = {}
    for v, nops in proto.ops.items():
        ops[v] = [
            {
                "out": op.out_pos,
                "terms": [
                    {"in": t.in_pos, "map": _map_to_json(t.map)} for t in op.terms
                ],
            }
            for op in nops
        ]
    return {
        "group": proto.group.value,
        "nodes": [{"id": n.id, "kind": n.kind} for n in net.nodes],
        "edges": [{"from": u, "to": v} for u, v in net.edges],
        "requirements": [
            {"sink": t, "source": s} for t, s in sorted(net.requirements.items())
        ],
        "ops": ops,
    }


def _require(data, key, where, types):
    if not isinstance(data, dict) or key not in data:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = data[key]
    if not isinstance(value, types):
        raise SchemaError(f"{where}.{key}: unexpected type {type(value).__name__}")
    return value


def instance_from_json(data) -> tuple[Network, ClassicalProtocol]:
    if not isinstance(data, dict):
        raise SchemaError("top level: expected an object")
    group = GroupKind.from_name(_require(data, "group", "top level", str))
    nodes = []
    for k, nd in enumerate(_require(data, "nodes", "top level", list)):
        nodes.append(
            Node(
                _require(nd, "id", f"nodes[{k}]", str),
                _require(nd, "kind", f"nodes[{k}]", str),
            )
        )
    edges = []
    for k, ed in enumerate(_require(data, "edges", "top level", list)):
        edges.append(
            (
                _require(ed, "from", f"edges[{k}]", str),
                _require(ed, "to", f"edges[{k}]", str),
            )
        )
    requirements = {}
    for k, rq in enumerate(_require(data, "requirements", "top level", list)):
        requirements[_require(rq, "sink", f"requirements[{k}]", str)] = _require(
            rq, "source", f"requirements[{k}]", str
        )
    ops = {}
    for v, nops in _require(data, "ops", "top level", dict).items():
        if not isinstance(nops, list):
            raise SchemaError(f"ops.{v}: expected an array of operations")
        parsed = []
        for k, op in enumerate(nops):
            out = _require(op, "out", f"ops.{v}[{k}]", int)
            terms = []
            for t, term in enumerate(_require(op, "terms", f"ops.{v}[{k}]", list)):
                terms.append(
                    Term(
                        _require(term, "in", f"ops.{v}[{k}].terms[{t}]", int),
                        _map_from_json(
                            _require(term, "map", f"ops.{v}[{k}].terms[{t}]", list),
                            f"ops.{v}[{k}].terms[{t}]",
                        ),
                    )
                )
            parsed.append(NodeOp(out, tuple(terms)))
        ops[v] = tuple(parsed)
    return Network(nodes, edges, requirements), ClassicalProtocol(group, ops)


def d3_to_json(d3: D3Network) -> dict:
    net = d3.network
    return {
        "group": d3.group.value,
        "nodes": [
            {"id": n.id, "kind": n.kind, "role": d3.roles[n.id]} for n in net.nodes
        ],
        "edges": [{"from": u, "to": v} for u, v in net.edges],
        "requirements": [
            {"sink": t, "source": s} for t, s in sorted(net.requirements.items())
        ],
        "transforms": {v: _map_to_json(m) for v, m in sorted(d3.transforms.items())},
    }


def d3_from_json(data) -> D3Network:
    if not isinstance(data, dict):
        raise SchemaError("top level: expected an object")
    group = GroupKind.from_name(_require(data, "group", "top level", str))
    nodes, roles = [], {}
    for k, nd in enumerate(_require(data, "nodes", "top level", list)):
        nid = _require(nd, "id", f"nodes[{k}]", str)
        nodes.append(Node(nid, _require(nd, "kind", f"nodes[{k}]", str)))
        roles[nid] = _require(nd, "role", f"nodes[{k}]", str)
    edges = []
    for k, ed in enumerate(_require(data, "edges", "top level", list)):
        edges.append(
            (
                _require(ed, "from", f"edges[{k}]", str),
                _require(ed, "to", f"edges[{k}]", str),
            )
        )
    requirements = {}
    for k, rq in enumerate(_require(data, "requirements", "top level", list)):
        requirements[_require(rq, "sink", f"requirements[{k}]", str)] = _require(
            rq, "source", f"requirements[{k}]", str
        )
    transforms = {}
    for v, m in _require(data, "transforms", "top level", dict).items():
        transforms[v] = _map_from_json(m, f"transforms.{v}")
    return D3Network(Network(nodes, edges, requirements), roles, transforms, group)


def is_d3_json(data) -> bool:
    return isinstance(data, dict) and "transforms" in data
