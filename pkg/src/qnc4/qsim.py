"""Simulate compiled protocols three ways.

All three entry points agree on the semantics: every node measures its
incoming qubit(s) with the tetra measurement and prepares fresh tetra
states according to its sampling law, so a protocol run is a distribution
over letter assignments to edges.

`simulate_oracle` computes that distribution exactly (rational weights for
letter inputs) by sweeping the network once and keeping the joint
distribution over the currently live edges only, merging histories that
agree there.  It makes no independence assumptions across edges, which is
what lets its per-edge marginals serve as ground truth.
`enumerate_branches` keeps the full joint over all edges instead; it is
exponential and only for tiny networks.  `simulate_analytic` skips
enumeration entirely and reads sink mixtures off the compiled shrink
factors.  `simulate_montecarlo` samples trials in vectorized chunks with
deterministic, chunk-indexed substreams.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import SizeError
from .netgraph import LETTERS, GroupKind, Letter
from .classical_eval import evaluate
from .qcompiler import (
    FORK_EFC,
    JOIN,
    SINK_NOOP,
    SOURCE_TTR,
    TRANSFORM_CONSTANT,
    TRANSFORM_ONE_TO_ONE,
    TRANSFORM_TWO_TO_ONE,
    CompiledProtocol,
    QuantumOp,
    two_to_one_emission,
)
from . import efc, qmath
from .qmath import ShrunkState

MAX_ORACLE_BRANCHES = 10**7
MAX_FULL_BRANCHES = 10**6


# ---------------------------------------------------------------------------
# per-node sampling laws, conditioned on the letters of the incoming states


def source_distribution(value) -> dict[Letter, object]:
    """Letter distribution a source emits for one input.

    A plain letter means the conditioned process that prepares exactly that
    tetra state; a ShrunkState yields its exact measurement statistics; a
    density matrix yields float measurement statistics.
    """
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        if value not in LETTERS:
            raise ValueError(f"not a letter: {value!r}")
        return {int(value): Fraction(1)}
    if isinstance(value, ShrunkState) or isinstance(value, np.ndarray):
        if isinstance(value, np.ndarray):
            value = np.outer(value, value.conj()) if value.ndim == 1 else value
        probs = qmath.ttr_probabilities(value)
        return {z: probs[z] for z in LETTERS}
    raise TypeError(f"unsupported source input: {value!r}")


def transform_branch_law(op: QuantumOp, u: Letter) -> dict[Letter, Fraction]:
    """Output letter distribution of a transform given the incoming letter."""
    if op.tag == TRANSFORM_CONSTANT:
        return {op.letter: Fraction(1)}
    out: dict[Letter, Fraction] = {}
    for x, t in qmath.ttr_outcome_weights(u).items():
        if op.tag == TRANSFORM_ONE_TO_ONE:
            y = op.map(x)
            out[y] = out.get(y, Fraction(0)) + t
        else:
            for y, w in two_to_one_emission(x, op.map, op.input_alpha).items():
                if w:
                    out[y] = out.get(y, Fraction(0)) + t * w
    return out


def join_branch_law(group: GroupKind, u1: Letter, u2: Letter) -> dict[Letter, Fraction]:
    """Output letter distribution of a join given the two incoming letters."""
    out: dict[Letter, Fraction] = {}
    for x1, t1 in qmath.ttr_outcome_weights(u1).items():
        for x2, t2 in qmath.ttr_outcome_weights(u2).items():
            y = group.add(x1, x2)
            out[y] = out.get(y, Fraction(0)) + t1 * t2
    return out


def fork_branch_law(op: QuantumOp, u: Letter) -> dict[tuple, Fraction]:
    """Joint distribution of the two letters a fork emits, given the
    incoming letter."""
    out: dict[tuple, Fraction] = {}
    for x, t in qmath.ttr_outcome_weights(u).items():
        for pair, w in efc.efc_pair_distribution(op.input_alpha, x).items():
            out[pair] = out.get(pair, Fraction(0)) + t * w
    return out


def _resolve_inputs(compiled: CompiledProtocol, inputs) -> dict[str, object]:
    sources = compiled.d3.network.source_ids
    if len(inputs) != len(sources):
        raise ValueError(f"expected {len(sources)} inputs, got {len(inputs)}")
    return dict(zip(sources, inputs))


# ---------------------------------------------------------------------------
# exact sweep over the live-edge joint distribution


@dataclass
class OracleResult:
    compiled: CompiledProtocol
    edge_marginals: dict[int, dict[Letter, object]]
    fork_joints: dict[str, dict[tuple, object]]
    sink_mixtures: dict[str, dict[Letter, object]]

    def sink_state(self, sink: str) -> np.ndarray:
        return qmath.mixture_matrix(self.sink_mixtures[sink])


def simulate_oracle(
    compiled: CompiledProtocol, inputs, max_branches: int = MAX_ORACLE_BRANCHES
) -> OracleResult:
    """Exact distribution sweep; ground truth for the other two modes.

    Tracks the joint distribution of letters on live edges (created, not
    yet consumed), so memory scales with 4^(frontier width), not network
    size.  Raises SizeError beyond max_branches; Monte Carlo still works
    there.
    """
    net = compiled.d3.network
    by_source = _resolve_inputs(compiled, inputs)
    group = compiled.d3.group

    live: list[int] = []
    dist: dict[tuple, object] = {(): Fraction(1)}
    marginals: dict[int, dict] = {}
    fork_joints: dict[str, dict] = {}
    sink_mixtures: dict[str, dict] = {}

    for v in compiled.order:
        op = compiled.ops[v]
        in_pos = [live.index(e) for e in net.in_edges(v)]
        out_edges = net.out_edges(v)
        if len(dist) * 16 > max_branches:
            raise SizeError(
                f"oracle frontier would exceed {max_branches} branches; "
                "use Monte Carlo for this network"
            )
        src_law = None
        if op.tag == SOURCE_TTR:
            src_law = [((z,), w) for z, w in source_distribution(by_source[v]).items()]
        new_dist: dict[tuple, object] = {}
        for key, p in dist.items():
            if op.tag == SOURCE_TTR:
                law = src_law
            elif op.tag == JOIN:
                u1, u2 = key[in_pos[0]], key[in_pos[1]]
                law = [((y,), w) for y, w in join_branch_law(group, u1, u2).items()]
            elif op.tag == FORK_EFC:
                law = [
                    (pair, w) for pair, w in fork_branch_law(op, key[in_pos[0]]).items()
                ]
            elif op.tag == SINK_NOOP:
                u = key[in_pos[0]]
                mix = sink_mixtures.setdefault(v, {})
                mix[u] = mix.get(u, Fraction(0)) + p
                law = [((), Fraction(1))]
            else:
                law = [
                    ((y,), w)
                    for y, w in transform_branch_law(op, key[in_pos[0]]).items()
                ]
            base = tuple(x for i, x in enumerate(key) if i not in in_pos)
            for out_letters, w in law:
                nk = base + out_letters
                q = p * w
                new_dist[nk] = new_dist.get(nk, Fraction(0)) + q
        dist = new_dist
        live = [e for e in live if e not in net.in_edges(v)] + list(out_edges)
        for e in out_edges:
            pos = live.index(e)
            marg: dict = {}
            for key, p in dist.items():
                marg[key[pos]] = marg.get(key[pos], Fraction(0)) + p
            marginals[e] = marg
        if op.tag == FORK_EFC:
            p1, p2 = live.index(out_edges[0]), live.index(out_edges[1])
            joint: dict = {}
            for key, p in dist.items():
                pair = (key[p1], key[p2])
                joint[pair] = joint.get(pair, Fraction(0)) + p
            fork_joints[v] = joint
    return OracleResult(compiled, marginals, fork_joints, sink_mixtures)


def enumerate_branches(
    compiled: CompiledProtocol, inputs, max_branches: int = MAX_FULL_BRANCHES
) -> dict[tuple, object]:
    """Full joint distribution over all edge letters, keyed by edge index.

    Exponential in the edge count; use only on tiny networks, as a
    cross-check of the live-edge sweep.
    """
    net = compiled.d3.network
    by_source = _resolve_inputs(compiled, inputs)
    group = compiled.d3.group
    seen: list[int] = []  # edge ids in creation order
    dist: dict[tuple, object] = {(): Fraction(1)}
    for v in compiled.order:
        op = compiled.ops[v]
        in_pos = [seen.index(e) for e in net.in_edges(v)]
        out_edges = net.out_edges(v)
        if len(dist) * 16 > max_branches:
            raise SizeError(f"branch count would exceed {max_branches}")
        new_dist: dict[tuple, object] = {}
        for key, p in dist.items():
            if op.tag == SOURCE_TTR:
                law = [((z,), w) for z, w in source_distribution(by_source[v]).items()]
            elif op.tag == JOIN:
                law = [
                    ((y,), w)
                    for y, w in join_branch_law(
                        group, key[in_pos[0]], key[in_pos[1]]
                    ).items()
                ]
            elif op.tag == FORK_EFC:
                law = list(fork_branch_law(op, key[in_pos[0]]).items())
            elif op.tag == SINK_NOOP:
                law = [((), Fraction(1))]
            else:
                law = [
                    ((y,), w)
                    for y, w in transform_branch_law(op, key[in_pos[0]]).items()
                ]
            for out_letters, w in law:
                nk = key + out_letters
                q = p * w
                new_dist[nk] = new_dist.get(nk, Fraction(0)) + q
        dist = new_dist
        seen.extend(out_edges)
    reorder = [seen.index(e) for e in range(len(net.edges))]
    return {tuple(key[i] for i in reorder): p for key, p in dist.items()}


# ---------------------------------------------------------------------------
# analytic shortcut


@dataclass(frozen=True)
class AnalyticReport:
    """Per-sink predictions read directly off the compiled shrink factors.

    fidelity_floor is the guessing fidelity against an arbitrary unknown
    input state, 1/2 + alpha/6; fidelity_tetra applies when the tracked
    source is fed a tetra label (conditioned process), 1/2 + alpha/2, and
    is only present for all-letter inputs.
    """

    sink_alphas: dict[str, Fraction]
    fidelity_floor: dict[str, Fraction]
    decoded: dict[str, Letter] | None
    sink_mixtures: dict[str, dict] | None
    fidelity_tetra: dict[str, Fraction] | None


def simulate_analytic(compiled: CompiledProtocol, inputs=None) -> AnalyticReport:
    """Sink mixtures and fidelities without enumeration.

    Valid for networks that satisfy their delivery requirement; the letter
    mixtures additionally need letter inputs.
    """
    net = compiled.d3.network
    alphas = compiled.sink_alphas
    floor = {t: Fraction(1, 2) + a / 6 for t, a in alphas.items()}
    decoded = mixtures = tetra = None
    if inputs is not None and all(
        isinstance(x, (int, np.integer)) and not isinstance(x, bool) for x in inputs
    ):
        letters = evaluate(compiled.d3, None, [int(x) for x in inputs])
        by_sink = dict(zip(net.sink_ids, letters))
        by_source = dict(zip(net.source_ids, [int(x) for x in inputs]))
        decoded, mixtures, tetra = {}, {}, {}
        for t in net.sink_ids:
            a = alphas[t]
            decoded[t] = by_sink[t]
            mixtures[t] = qmath.tetra_weights(ShrunkState(by_sink[t], a))
            want = by_source[net.requirements[t]]
            hit = Fraction(1) if by_sink[t] == want else Fraction(1, 3)
            tetra[t] = a * hit + (1 - a) / 2
    return AnalyticReport(alphas, floor, decoded, mixtures, tetra)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass
class MonteCarloResult:
    compiled: CompiledProtocol
    trials: int
    seed: int
    sink_counts: dict[str, np.ndarray]

    def sink_probs(self, sink: str) -> np.ndarray:
        return self.sink_counts[sink] / self.trials


def _ttr_sample(rng, letters: np.ndarray) -> np.ndarray:
    # outcome equals the prepared letter w.p. 1/2, each other letter 1/6;
    # xor with a nonzero offset enumerates exactly the three others
    r = rng.random(letters.shape[0])
    off = np.zeros(letters.shape[0], dtype=letters.dtype)
    wrong = r >= 0.5
    off[wrong] = 1 + np.minimum(((r[wrong] - 0.5) * 6).astype(letters.dtype), 2)
    return letters ^ off


def _sample_categorical(rng, cum: np.ndarray, n: int) -> np.ndarray:
    r = rng.random(n)
    return np.minimum((r[:, None] >= cum[None, :]).sum(axis=1), len(cum) - 1).astype(
        np.int8
    )


def simulate_montecarlo(
    compiled: CompiledProtocol,
    inputs,
    trials: int,
    seed: int = 0,
    chunk_size: int = 1 << 16,
) -> MonteCarloResult:
    """Sample full protocol runs and tally the letters reaching each sink.

    Trials are processed in chunks; chunk c uses the substream spawned from
    (seed, c), so a given (seed, chunk_size) pair reproduces exactly.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    net = compiled.d3.network
    by_source = _resolve_inputs(compiled, inputs)
    group = compiled.d3.group

    # precomputed float tables per node
    src_cum: dict[str, np.ndarray] = {}
    for s, value in by_source.items():
        probs = np.array(
            [float(w) for w in (source_distribution(value).get(z, 0) for z in LETTERS)]
        )
        src_cum[s] = np.cumsum(probs)
    fork_cum: dict[str, np.ndarray] = {}
    two1_tab: dict[str, tuple] = {}
    for v in compiled.order:
        op = compiled.ops[v]
        if op.tag == FORK_EFC:
            table = np.zeros((4, 16))
            for x in LETTERS:
                d = efc.efc_pair_distribution(op.input_alpha, x)
                for (z1, z2), w in d.items():
                    table[x, 4 * z1 + z2] = float(w)
            fork_cum[v] = np.cumsum(table, axis=1)
        elif op.tag == TRANSFORM_TWO_TO_ONE:
            image = op.map.image()
            off = [z for z in LETTERS if z not in image]
            keep = float(Fraction(3, 1) / (6 - op.input_alpha))
            two1_tab[v] = (np.array(op.map.table, dtype=np.int8), keep, off[0], off[1])

    counts = {t: np.zeros(4, dtype=np.int64) for t in net.sink_ids}
    n_chunks = (trials + chunk_size - 1) // chunk_size
    for c in range(n_chunks):
        n = min(chunk_size, trials - c * chunk_size)
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(c,)))
        edge_vals: dict[int, np.ndarray] = {}
        for v in compiled.order:
            op = compiled.ops[v]
            ins = [edge_vals[e] for e in net.in_edges(v)]
            outs = net.out_edges(v)
            if op.tag == SOURCE_TTR:
                edge_vals[outs[0]] = _sample_categorical(rng, src_cum[v], n)
            elif op.tag == JOIN:
                x1, x2 = _ttr_sample(rng, ins[0]), _ttr_sample(rng, ins[1])
                if group is GroupKind.Z4:
                    out = (x1 + x2) & 3
                else:
                    out = x1 ^ x2
                edge_vals[outs[0]] = out.astype(np.int8)
            elif op.tag == FORK_EFC:
                x = _ttr_sample(rng, ins[0])
                r = rng.random(n)
                idx = np.minimum((r[:, None] >= fork_cum[v][x]).sum(axis=1), 15)
                edge_vals[outs[0]] = (idx >> 2).astype(np.int8)
                edge_vals[outs[1]] = (idx & 3).astype(np.int8)
            elif op.tag == TRANSFORM_CONSTANT:
                edge_vals[outs[0]] = np.full(n, op.letter, dtype=np.int8)
            elif op.tag == TRANSFORM_ONE_TO_ONE:
                table = np.array(op.map.table, dtype=np.int8)
                edge_vals[outs[0]] = table[_ttr_sample(rng, ins[0])]
            elif op.tag == TRANSFORM_TWO_TO_ONE:
                table, keep, off0, off1 = two1_tab[v]
                x = _ttr_sample(rng, ins[0])
                kept = rng.random(n) < keep
                half = rng.random(n) < 0.5
                edge_vals[outs[0]] = np.where(
                    kept, table[x], np.where(half, off0, off1)
                ).astype(np.int8)
            else:
                counts[v] += np.bincount(ins[0], minlength=4)
    return MonteCarloResult(compiled, trials, seed, counts)


# ---------------------------------------------------------------------------
# figures of merit


def guess_fidelities(target) -> np.ndarray:
    """Fidelity of each prepared tetra state against the delivery target.

    The target is a letter (fidelity 1 on the matching state, 1/3 on the
    others) or a pure state vector.
    """
    if isinstance(target, (int, np.integer)) and not isinstance(target, bool):
        return np.array([1.0 if z == target else 1 / 3 for z in LETTERS])
    vec = np.asarray(target, dtype=complex)
    return np.array(
        [qmath.fidelity(vec, qmath.tetra_matrix(z)) for z in LETTERS]
    )


def mixture_fidelity(mixture: dict, target) -> object:
    """Fidelity of a letter mixture against a delivery target; exact when
    both the mixture and the target are exact."""
    if isinstance(target, (int, np.integer)) and not isinstance(target, bool):
        hit = {z: (Fraction(1) if z == target else Fraction(1, 3)) for z in LETTERS}
        return sum(p * hit[z] for z, p in mixture.items())
    f = guess_fidelities(target)
    return float(sum(float(p) * f[z] for z, p in mixture.items()))


def estimate_fidelity(counts: np.ndarray, trials: int, target) -> tuple[float, float]:
    """Point estimate and standard error of the sink fidelity from sampled
    letter counts."""
    f = guess_fidelities(target)
    p = counts / trials
    est = float(p @ f)
    var = max(float(p @ (f * f)) - est * est, 0.0)
    return est, (var / trials) ** 0.5


def chi_square_statistic(counts: np.ndarray, probs) -> float:
    """Pearson statistic of observed letter counts against exact weights."""
    n = counts.sum()
    stat = 0.0
    for z in LETTERS:
        p = float(probs[z])
        if p == 0.0:
            if counts[z]:
                return float("inf")
            continue
        stat += (counts[z] - n * p) ** 2 / (n * p)
    return stat
