"""Compile a normal-form classical network into a quantum protocol.

Each node becomes one prepare-and-measure op, and every edge carries a
tetra state shrunk by a factor that the compiler tracks exactly:

    source            1
    join              a1 * a2 / 9
    constant map      1
    one-to-one map    a / 3
    two-to-one map    a / (6 - a)
    fork              a / 9
    sink              a (unchanged)

where a is the shrink factor of the incoming edge.  The sampling laws of
fork and two-to-one nodes are parameterized by the incoming shrink factor;
`compile_protocol` re-derives both laws at the state level for every such
node and fails loudly if the table does not reproduce the claimed output.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CompileError, VerificationError
from .netgraph import (
    LETTERS,
    D3Network,
    Letter,
    LetterMap,
    MapClass,
    letter_to_str,
    validate_d3,
)
from . import efc, qmath
from .qmath import ShrunkState

SOURCE_TTR = "SourceTTR"
JOIN = "Join"
TRANSFORM_CONSTANT = "TransformConstant"
TRANSFORM_ONE_TO_ONE = "TransformOneToOne"
TRANSFORM_TWO_TO_ONE = "TransformTwoToOne"
FORK_EFC = "ForkEFC"
SINK_NOOP = "SinkNoop"


def two_to_one_emission(letter: Letter, map_: LetterMap, param: Fraction) -> dict:
    """Output letter distribution of a two-to-one node on one input letter.

    Prepares the mapped letter with weight 3/(6-param) and each of the two
    letters outside the map's image with weight (3-param)/(2(6-param)); the
    unmapped image letter is never produced.  Exact in the parameter.
    """
    if not isinstance(param, Fraction):
        param = Fraction(param)
    if not 0 < param <= 1:
        raise ValueError(f"parameter must lie in (0, 1], got {param}")
    image = map_.image()
    if len(image) != 2:
        raise ValueError("emission law only applies to two-to-one maps")
    own = Fraction(3, 1) / (6 - param)
    off = (3 - param) / (2 * (6 - param))
    dist = {z: Fraction(0) for z in LETTERS}
    dist[map_(letter)] = own
    for z in LETTERS:
        if z not in image:
            dist[z] = off
    return dist


@dataclass(frozen=True)
class QuantumOp:
    """One compiled node: its sampling law and exact shrink bookkeeping.

    alpha is the shrink factor of the states this node emits; input_alpha
    is the incoming shrink factor that parameterizes the node's law (None
    for sources and joins).
    """

    node: str
    tag: str
    alpha: Fraction
    input_alpha: Fraction | None = None
    map: LetterMap | None = None
    letter: Letter | None = None


@dataclass(frozen=True)
class CompiledProtocol:
    d3: D3Network
    ops: dict[str, QuantumOp]
    order: tuple[str, ...]  # processing order: by longest-path depth, then id
    depths: dict[str, int]
    notes: tuple[str, ...] = field(default_factory=tuple)

    def edge_alpha(self, e: int) -> Fraction:
        """Shrink factor carried by the state on edge index e."""
        return self.ops[self.d3.network.edges[e][0]].alpha

    @property
    def sink_alphas(self) -> dict[str, Fraction]:
        return {
            v: self.ops[v].alpha
            for v in self.d3.network.sink_ids
        }


def _check_two_to_one_law(map_: LetterMap, a: Fraction) -> None:
    # state-level: mixing the emission law over the measurement statistics of
    # a shrunk input must land exactly on the shrunk mapped letter at a/(6-a)
    for z in LETTERS:
        probs = qmath.ttr_probabilities(ShrunkState(z, a))
        out = {y: Fraction(0) for y in LETTERS}
        for x in LETTERS:
            for y, w in two_to_one_emission(x, map_, a).items():
                out[y] += probs[x] * w
        expect = qmath.tetra_weights(ShrunkState(map_(z), a / (6 - a)))
        if out != expect:
            raise VerificationError(
                f"two-to-one law at incoming shrink {a} misses its target"
            )


def compile_protocol(d3: D3Network) -> CompiledProtocol:
    """Assign a quantum op and an exact shrink factor to every node.

    Raises CompileError if the network is not in normal form.  Fork and
    two-to-one laws are re-verified at the state level for the exact
    shrink factors occurring in this network.
    """
    report = validate_d3(d3)
    if not report.ok:
        raise CompileError(
            "network is not a valid normal form: " + "; ".join(report.violations)
        )
    net = d3.network
    depths: dict[str, int] = {}
    for v in net.topo_order:
        parents = [net.edges[e][0] for e in net.in_edges(v)]
        depths[v] = 0 if not parents else 1 + max(depths[u] for u in parents)
    order = tuple(sorted((n.id for n in net.nodes), key=lambda v: (depths[v], v)))

    ops: dict[str, QuantumOp] = {}
    notes: list[str] = []
    checked: set = set()
    for v in order:
        role = d3.roles[v]
        if role == "source":
            ops[v] = QuantumOp(v, SOURCE_TTR, Fraction(1))
            continue
        a_in = [ops[net.edges[e][0]].alpha for e in net.in_edges(v)]
        if role == "join":
            ops[v] = QuantumOp(v, JOIN, a_in[0] * a_in[1] / 9)
        elif role == "sink":
            ops[v] = QuantumOp(v, SINK_NOOP, a_in[0], input_alpha=a_in[0])
        elif role == "fork":
            a = a_in[0]
            if a not in checked:
                for z in LETTERS:
                    efc.efc_apply(ShrunkState(z, a))
                checked.add(a)
                notes.append(f"fork law verified at incoming shrink {a}")
            ops[v] = QuantumOp(v, FORK_EFC, a / 9, input_alpha=a)
        else:
            a = a_in[0]
            m = d3.transforms[v]
            cls = m.try_classify()
            if cls is MapClass.CONSTANT:
                ops[v] = QuantumOp(
                    v, TRANSFORM_CONSTANT, Fraction(1), input_alpha=a, map=m,
                    letter=m(0),
                )
            elif cls is MapClass.ONE_TO_ONE:
                ops[v] = QuantumOp(
                    v, TRANSFORM_ONE_TO_ONE, a / 3, input_alpha=a, map=m
                )
            elif cls is MapClass.TWO_TO_ONE:
                key = (m.table, a)
                if key not in checked:
                    _check_two_to_one_law(m, a)
                    checked.add(key)
                    notes.append(
                        f"two-to-one law verified at incoming shrink {a}"
                    )
                ops[v] = QuantumOp(
                    v, TRANSFORM_TWO_TO_ONE, a / (6 - a), input_alpha=a, map=m
                )
            else:
                raise CompileError(f"node {v} carries an unusable letter map")
        if ops[v].alpha <= 0:
            raise CompileError(f"nonpositive shrink factor at node {v}")
    return CompiledProtocol(d3, ops, order, depths, tuple(notes))


def protocol_to_json(compiled: CompiledProtocol) -> dict:
    """JSON-friendly summary of a compiled protocol, in processing order."""
    out = {}
    for v in compiled.order:
        op = compiled.ops[v]
        entry: dict = {"op": op.tag, "alpha": str(op.alpha)}
        if op.input_alpha is not None:
            entry["input_alpha"] = str(op.input_alpha)
        if op.map is not None:
            entry["map"] = [letter_to_str(z) for z in op.map.table]
        if op.letter is not None:
            entry["letter"] = letter_to_str(op.letter)
        out[v] = entry
    return out
