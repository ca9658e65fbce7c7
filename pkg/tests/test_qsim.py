import random
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from qnc4 import classical_eval, instances, netgraph, qmath
from qnc4.errors import SizeError
from qnc4.netgraph import GroupKind, LetterMap, normalize_to_d3
from qnc4.qcompiler import compile_protocol
from qnc4.qmath import ShrunkState
from qnc4.qsim import (
    chi_square_statistic,
    enumerate_branches,
    estimate_fidelity,
    fork_branch_law,
    guess_fidelities,
    join_branch_law,
    mixture_fidelity,
    simulate_analytic,
    simulate_montecarlo,
    simulate_oracle,
    source_distribution,
    transform_branch_law,
)

from _generators import random_d3_instance

SWAP01 = LetterMap((1, 0, 2, 3))


@pytest.fixture(scope="module")
def single_compiled():
    net, proto = instances.single_edge()
    d3, _ = normalize_to_d3(net, proto)
    return compile_protocol(d3)


def _swap_chain_compiled():
    net = netgraph.make_network(
        nodes=[("s", "source"), ("h", "internal"), ("t", "sink")],
        edges=[("s", "h"), ("h", "t")],
        requirements={"t": "s"},
    )
    d3 = netgraph.D3Network(
        net,
        {"s": "source", "h": "transform", "t": "sink"},
        {"h": SWAP01},
        GroupKind.Z2xZ2,
    )
    return compile_protocol(d3)


# ---------------------------------------------------------------------------
# per-node laws


def test_source_distribution_kinds():
    assert source_distribution(2) == {2: Fraction(1)}
    exact = source_distribution(ShrunkState(1, Fraction(1, 2)))
    assert exact[1] == Fraction(3, 8)
    assert exact[0] == exact[2] == exact[3] == Fraction(5, 24)
    vec = source_distribution(np.array([1.0, 0.0]))
    assert abs(sum(vec.values()) - 1) < 1e-12
    assert abs(vec[0] - (1 + 1 / np.sqrt(3)) / 4) < 1e-12
    mat = source_distribution(np.eye(2) / 2)
    assert all(abs(w - 0.25) < 1e-12 for w in mat.values())
    with pytest.raises(ValueError):
        source_distribution(7)
    with pytest.raises(TypeError):
        source_distribution("00")
    with pytest.raises(TypeError):
        source_distribution(True)


def test_transform_law_one_to_one():
    comp = _swap_chain_compiled()
    law = transform_branch_law(comp.ops["h"], 0)
    assert law == {1: Fraction(1, 2), 0: Fraction(1, 6), 2: Fraction(1, 6), 3: Fraction(1, 6)}


def test_join_law_is_outcome_convolution():
    law = join_branch_law(GroupKind.Z2xZ2, 0, 0)
    assert law[0] == Fraction(1, 3)
    assert law[1] == law[2] == law[3] == Fraction(2, 9)
    for u1, u2 in product(range(4), repeat=2):
        for g in (GroupKind.Z2xZ2, GroupKind.Z4):
            law = join_branch_law(g, u1, u2)
            assert sum(law.values()) == 1
            # the modal output is the group sum of the two inputs
            assert max(law, key=law.get) == g.add(u1, u2)


def test_fork_law_marginals(butterfly_compiled):
    # conditioned on the incoming letter, each clone's letter marginal is the
    # 1/9-shrunk pattern whatever the incoming shrink; that shrink only shapes
    # the correlations between the two clones
    for node in ("s1.f0", "t0"):
        op = butterfly_compiled.ops[node]
        for u in range(4):
            law = fork_branch_law(op, u)
            assert sum(law.values()) == 1
            left = {z: Fraction(0) for z in range(4)}
            right = {z: Fraction(0) for z in range(4)}
            for (z1, z2), w in law.items():
                left[z1] += w
                right[z2] += w
            expect = qmath.tetra_weights(ShrunkState(u, Fraction(1, 9)))
            assert left == expect and right == expect


# ---------------------------------------------------------------------------
# exact modes against each other


def test_oracle_matches_full_enumeration(diamond_compiled):
    net = diamond_compiled.d3.network
    for x in (0, 3):
        oracle = simulate_oracle(diamond_compiled, [x])
        full = enumerate_branches(diamond_compiled, [x])
        assert sum(full.values()) == 1
        for e in range(len(net.edges)):
            marg: dict = {}
            for key, p in full.items():
                marg[key[e]] = marg.get(key[e], Fraction(0)) + p
            for z in range(4):
                assert marg.get(z, 0) == oracle.edge_marginals[e].get(z, 0)
        # the fork's pair joint, cross-checked against the full joint
        fork_out = net.out_edges("d")
        joint: dict = {}
        for key, p in full.items():
            pair = (key[fork_out[0]], key[fork_out[1]])
            joint[pair] = joint.get(pair, Fraction(0)) + p
        assert joint == oracle.fork_joints["d"]


def test_oracle_accepts_shrunk_and_vector_inputs(single_compiled):
    res = simulate_oracle(single_compiled, [ShrunkState(0, Fraction(1, 2))])
    assert res.edge_marginals[0][0] == Fraction(3, 8)
    res = simulate_oracle(single_compiled, [np.array([1.0, 0.0])])
    total = sum(res.edge_marginals[0].values())
    assert abs(total - 1) < 1e-12
    rho = res.sink_state("t")
    assert qmath.is_density_matrix(rho)


def test_oracle_matches_analytic_on_butterfly(butterfly_compiled):
    for x, y in ((0, 0), (1, 3), (2, 1)):
        oracle = simulate_oracle(butterfly_compiled, [x, y])
        report = simulate_analytic(butterfly_compiled, [x, y])
        for t in ("t1", "t2"):
            assert oracle.sink_mixtures[t] == report.sink_mixtures[t]


def test_random_networks_hit_compiled_shrinks():
    # every edge marginal is exactly the compiled shrink of the classical letter
    rng = random.Random(97)
    for _ in range(6):
        d3 = random_d3_instance(rng, max_nodes=9, max_sources=2)
        comp = compile_protocol(d3)
        n_src = len(d3.network.source_ids)
        inputs = tuple(rng.randrange(4) for _ in range(n_src))
        classical = classical_eval.edge_values(d3, None, inputs)
        oracle = simulate_oracle(comp, list(inputs))
        for e in range(len(d3.network.edges)):
            want = qmath.tetra_weights(ShrunkState(classical[e], comp.edge_alpha(e)))
            for z in range(4):
                assert oracle.edge_marginals[e].get(z, 0) == want[z]


def test_size_guards(diamond_compiled):
    with pytest.raises(SizeError):
        simulate_oracle(diamond_compiled, [0], max_branches=10)
    with pytest.raises(SizeError):
        enumerate_branches(diamond_compiled, [0], max_branches=10)


# ---------------------------------------------------------------------------
# analytic report


def test_analytic_floor_only_without_inputs(butterfly_compiled):
    report = simulate_analytic(butterfly_compiled)
    a = Fraction(1, 531441)
    assert report.fidelity_floor["t1"] == Fraction(1, 2) + a / 6
    assert report.decoded is None and report.sink_mixtures is None
    assert report.fidelity_tetra is None


def test_analytic_delivery_and_mismatch():
    comp = _swap_chain_compiled()
    report = simulate_analytic(comp, [0])
    a = Fraction(1, 3)
    # the chain swaps the letter, so the sink misses its target
    assert report.decoded["t"] == 1
    assert report.fidelity_tetra["t"] == a / 3 + (1 - a) / 2
    assert report.fidelity_floor["t"] == Fraction(1, 2) + a / 6


def test_analytic_butterfly_delivers(butterfly_compiled):
    report = simulate_analytic(butterfly_compiled, [2, 3])
    a = Fraction(1, 531441)
    assert report.decoded == {"t1": 2, "t2": 3}
    for t in ("t1", "t2"):
        assert report.fidelity_tetra[t] == Fraction(1, 2) + a / 2
        peak = (1 + 3 * a) / 4
        assert report.sink_mixtures[t][report.decoded[t]] == peak


# ---------------------------------------------------------------------------
# Monte Carlo


def test_montecarlo_reproducible(diamond_compiled):
    a = simulate_montecarlo(diamond_compiled, [2], trials=20000, seed=5)
    b = simulate_montecarlo(diamond_compiled, [2], trials=20000, seed=5)
    c = simulate_montecarlo(diamond_compiled, [2], trials=20000, seed=6)
    assert all(np.array_equal(a.sink_counts[t], b.sink_counts[t]) for t in a.sink_counts)
    assert any(not np.array_equal(a.sink_counts[t], c.sink_counts[t]) for t in a.sink_counts)
    assert a.sink_counts["t"].sum() == 20000
    assert abs(a.sink_probs("t").sum() - 1) < 1e-12


def test_montecarlo_tracks_oracle(diamond_compiled):
    trials = 200000
    mc = simulate_montecarlo(diamond_compiled, [1], trials=trials, seed=11)
    oracle = simulate_oracle(diamond_compiled, [1])
    stat = chi_square_statistic(mc.sink_counts["t"], oracle.sink_mixtures["t"])
    assert stat < 16.266  # chi-square df=3 at the 0.001 level


def test_montecarlo_vector_input(single_compiled):
    trials = 100000
    mc = simulate_montecarlo(single_compiled, [np.array([1.0, 0.0])], trials=trials, seed=3)
    probs = qmath.ttr_probabilities(np.diag([1.0, 0.0]))
    stat = chi_square_statistic(mc.sink_counts["t"], probs)
    assert stat < 16.266


def test_montecarlo_rejects_bad_trials(diamond_compiled):
    with pytest.raises(ValueError):
        simulate_montecarlo(diamond_compiled, [0], trials=0)
    with pytest.raises(ValueError):
        simulate_montecarlo(diamond_compiled, [0, 1], trials=10)


# ---------------------------------------------------------------------------
# figures of merit


def test_guess_fidelities():
    f = guess_fidelities(0)
    assert f[0] == 1.0 and f[1] == f[2] == f[3] == pytest.approx(1 / 3)
    f = guess_fidelities(np.array([1.0, 0.0]))
    assert f.sum() == pytest.approx(2.0)  # tetra states resolve the identity


def test_mixture_fidelity_exact():
    mix = {2: Fraction(3, 5), 0: Fraction(2, 5)}
    assert mixture_fidelity(mix, 2) == Fraction(11, 15)
    approx = mixture_fidelity(mix, np.array([0.0, 1.0]))
    assert isinstance(approx, float)


def test_estimate_fidelity_closed_form():
    counts = np.array([600, 200, 100, 100])
    est, se = estimate_fidelity(counts, 1000, 2)
    assert est == pytest.approx(0.4)
    assert se == pytest.approx((0.04 / 1000) ** 0.5)


def test_chi_square_zero_prob_bucket():
    probs = {0: Fraction(1, 2), 1: Fraction(1, 2), 2: Fraction(0), 3: Fraction(0)}
    assert chi_square_statistic(np.array([5, 5, 0, 0]), probs) == pytest.approx(0.0)
    assert chi_square_statistic(np.array([5, 4, 1, 0]), probs) == float("inf")
