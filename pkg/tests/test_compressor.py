import itertools
from fractions import Fraction

import numpy as np
import pytest

from qudit_compress.circuit import Circuit, Gate, WireSpec, gate_matrix, nonlocal_count
from qudit_compress.compressor import (
    CompressionError,
    DegenerateBoundsError,
    PipelineOptions,
    compress,
    compression_bounds,
    embed_two_qubit_gate,
    full_pipeline,
    make_encoding,
    merge_pass,
    qubit_operator,
)
from qudit_compress.graph import WeightedGraph, build_interaction_graph, contract_graph
from qudit_compress.library import (
    cluster_state_circuit,
    controlled_on_level_gate,
    cpf4_barenco_circuit,
    cpf_unitary,
    graph_state_circuit,
)
from qudit_compress.partition import enumerate_balanced_partitions
from qudit_compress.simulator import (
    circuit_unitary,
    operator_schmidt_rank,
    phase_aligned_residual,
    verify_circuits,
)

from conftest import random_circuit, random_unitary

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
CT = np.diag([1, 1, 1, np.exp(1j * np.pi / 4)])


def permutation_oracle(n, fn):
    """Permutation matrix of a classical bit map on n qubits (qubit 0 most significant)."""
    out = np.zeros((2**n, 2**n))
    for x in range(2**n):
        bits = [(x >> (n - 1 - q)) & 1 for q in range(n)]
        y = fn(list(bits))
        out[sum(b << (n - 1 - q) for q, b in enumerate(y)), x] = 1
    return out


# -- bounds --------------------------------------------------------------------


def test_bounds_cpf4():
    g = build_interaction_graph(cpf4_barenco_circuit().circuit)
    b = compression_bounds(g, [[0, 1], [2, 3]])
    assert (b.lower, b.upper) == (Fraction(1, 13), Fraction(7, 13))


def test_bounds_cluster_2x2():
    g = build_interaction_graph(cluster_state_circuit(2, 2))
    b = compression_bounds(g, [[0, 1], [2, 3]])
    assert (b.lower, b.upper) == (Fraction(1, 4), Fraction(2, 4))


def test_bounds_cluster_3x3():
    g = build_interaction_graph(cluster_state_circuit(3, 3))
    b = compression_bounds(g, [[0, 1, 2], [3, 4, 5], [6, 7, 8]])
    assert (b.lower, b.upper) == (Fraction(2, 12), Fraction(6, 12))
    assert b.to_json() == {"lower": [1, 6], "upper": [1, 2]}


def test_bounds_degenerate():
    with pytest.raises(DegenerateBoundsError):
        compression_bounds(WeightedGraph(4), [[0, 1], [2, 3]])


def test_bounds_scale_consistency(rng):
    for _ in range(20):
        n = 6
        edges = {e: int(rng.integers(1, 4)) for e in itertools.combinations(range(n), 2) if rng.random() < 0.5}
        g = WeightedGraph(n, edges)
        if g.total_weight == 0:
            continue
        for p in enumerate_balanced_partitions(n, 3):
            b, b2 = compression_bounds(g, p), compression_bounds(g.scaled(2), p)
            assert b2.upper == b.upper
            assert b2.lower == b.lower / 2
            assert b.lower <= b.upper


# -- encodings -----------------------------------------------------------------


def test_encoding_defaults():
    assert make_encoding([[0, 1], [2, 3]]).qudit_dims == (4, 4)
    assert make_encoding([[0, 1, 2], [3, 4, 5]]).qudit_dims == (8, 8)


def test_encoding_aux_levels():
    e = make_encoding([[0, 1], [2, 3]], [5, 5])
    assert e.qudit_dims == (5, 5)
    assert [e.basis_map(0, bits) for bits in itertools.product((0, 1), repeat=2)] == [0, 1, 2, 3]


def test_encoding_big_endian():
    e = make_encoding([[0, 1]])
    assert e.basis_map(0, [1, 0]) == 2


def test_encoding_dim_too_small():
    with pytest.raises(CompressionError):
        make_encoding([[0, 1], [2, 3]], [3, 4])


def test_encoding_group_order_is_ascending():
    e = make_encoding([[3, 1], [2, 0]])
    assert e.groups == ((0, 2), (1, 3))


# -- embedded gates ------------------------------------------------------------


def test_embed_cnot_matches_explicit_construction():
    # CNOT from qubit 2 (second of ququart A) to qubit 3 (first of ququart B)
    def fn(b):
        b[2] ^= b[1]
        return b

    u = embed_two_qubit_gate(CNOT, 1, 2, 0, 2)
    np.testing.assert_array_equal(u, permutation_oracle(4, fn))
    np.testing.assert_array_equal(u, np.kron(np.kron(np.eye(2), CNOT), np.eye(2)))


def test_embed_identity():
    np.testing.assert_array_equal(embed_two_qubit_gate(np.eye(4), 0, 2, 1, 3), np.eye(32))


@pytest.mark.parametrize("u", [CNOT, CZ, CT, CNOT[[0, 1, 3, 2]][:, [0, 1, 3, 2]]])
@pytest.mark.parametrize("m_a,m_b", [(1, 1), (2, 2), (3, 2), (2, 3)])
def test_embedded_schmidt_rank_two(u, m_a, m_b):
    for pa, pb in itertools.product(range(m_a), range(m_b)):
        e = embed_two_qubit_gate(u, pa, m_a, pb, m_b)
        assert operator_schmidt_rank(e, (2**m_a, 2**m_b)) == 2


def test_embedded_rank_matches_underlying(rng):
    for _ in range(5):
        u = random_unitary(rng, 4)
        base = operator_schmidt_rank(u, (2, 2))
        assert operator_schmidt_rank(embed_two_qubit_gate(u, 1, 2, 1, 2), (4, 4)) == base <= 4


def test_embedded_gate_is_subspace_agnostic(rng):
    u = random_unitary(rng, 4)
    m_a, m_b, pa, pb = 3, 2, 1, 0
    e = embed_two_qubit_gate(u, pa, m_a, pb, m_b)
    spectators = [0, 2, 4]  # qubits of the 5-qubit register not touched by u
    for _ in range(5):
        perm = rng.permutation(8)
        p = np.zeros((8, 8))
        p[perm, np.arange(8)] = 1
        big = qubit_operator(p, spectators, m_a + m_b)
        np.testing.assert_allclose(big @ e @ big.T, e, atol=1e-12)


def test_embed_position_errors():
    with pytest.raises(CompressionError):
        embed_two_qubit_gate(CZ, 2, 2, 0, 2)


# -- compress ------------------------------------------------------------------


def test_compress_cpf4():
    c = cpf4_barenco_circuit().circuit
    out = compress(c, make_encoding([[0, 1], [2, 3]]))
    assert out.dims == (4, 4)
    assert nonlocal_count(out) == 7
    assert len(out.gates) - nonlocal_count(out) == 6


def test_compress_cluster_rows():
    out = compress(cluster_state_circuit(2, 2), make_encoding([[0, 1], [2, 3]]))
    assert nonlocal_count(out) == 2


def test_compress_local_only():
    c = Circuit.qubits(4, [Gate("H", (q,)) for q in range(4)] + [Gate("T", (2,))])
    assert nonlocal_count(compress(c, make_encoding([[0, 1], [2, 3]]))) == 0


def test_compress_count_equals_l1(rng):
    for _ in range(10):
        c = random_circuit(rng, 6, 20, local_kinds=("H",))
        for p in enumerate_balanced_partitions(6, 2):
            assert nonlocal_count(compress(c, make_encoding(p))) == contract_graph(build_interaction_graph(c), p).l1


def test_compress_rejects_mismatch():
    with pytest.raises(CompressionError):
        compress(Circuit.qubits(3), make_encoding([[0, 1], [2, 3]]))
    qudits = Circuit((WireSpec(0, 4),))
    with pytest.raises(CompressionError):
        compress(qudits, make_encoding([[0, 1]]))


@pytest.mark.parametrize("dims", [None, [5, 4], [5, 5], [6, 7]])
def test_compress_preserves_unitary(rng, dims):
    for _ in range(8):
        c = random_circuit(rng, 4, 15, kinds=("CZ", "CNOT", "CT", "CTdag"), local_kinds=("H", "T", "X"))
        p = enumerate_balanced_partitions(4, 2)[int(rng.integers(3))]
        e = make_encoding(p, dims)
        out = compress(c, e)
        assert verify_circuits(c, out, e).residual < 1e-9
        merged = merge_pass(out)
        assert verify_circuits(c, merged, e).residual < 1e-9
        assert verify_circuits(c, merge_pass(out, absorb_local=True), e).residual < 1e-9


# -- merge pass ----------------------------------------------------------------


def test_merge_cluster_2x2():
    e = make_encoding([[0, 1], [2, 3]])
    out = merge_pass(compress(cluster_state_circuit(2, 2), e))
    two = [g for g in out.gates if g.is_nonlocal]
    assert len(two) == 1
    assert operator_schmidt_rank(gate_matrix(two[0], out.dims), (4, 4)) == 4


def test_merge_cpf4():
    e = make_encoding([[0, 1], [2, 3]])
    c = cpf4_barenco_circuit().circuit
    compressed = compress(c, e)
    out = merge_pass(compressed)
    assert nonlocal_count(out) == 1
    target = controlled_on_level_gate(4, 3, cpf_unitary(2))
    assert phase_aligned_residual(circuit_unitary(out), target) < 1e-9

    folded = merge_pass(compressed, absorb_local=True)
    assert len(folded.gates) == 1
    assert phase_aligned_residual(gate_matrix(folded.gates[0], folded.dims), target) < 1e-9
    assert operator_schmidt_rank(folded.gates[0].matrix, (4, 4)) == 2


def test_merge_blocked_by_noncommuting_gate():
    # A-B, then B-C (non-diagonal), then A-B: the middle gate blocks the merge
    wires = tuple(WireSpec(i, 2) for i in range(3))
    cnot = lambda a, b: Gate("custom-matrix", (a, b), matrix=CNOT)  # noqa: E731
    c = Circuit(wires, (cnot(0, 1), cnot(1, 2), cnot(0, 1)))
    assert nonlocal_count(merge_pass(c)) == 3


def test_merge_through_disjoint_gate():
    wires = tuple(WireSpec(i, 2) for i in range(4))
    cnot = lambda a, b: Gate("custom-matrix", (a, b), matrix=CNOT)  # noqa: E731
    c = Circuit(wires, (cnot(0, 1), cnot(2, 3), Gate("H", (3,)), cnot(1, 0)))
    out = merge_pass(c)
    assert nonlocal_count(out) == 2
    np.testing.assert_allclose(circuit_unitary(out), circuit_unitary(c), atol=1e-12)


def test_merge_keeps_trailing_locals_unless_asked():
    wires = (WireSpec(0, 2), WireSpec(1, 2))
    c = Circuit(wires, (Gate("CZ", (0, 1)), Gate("H", (0,)), Gate("CNOT", (0, 1)), Gate("H", (1,))))
    out = merge_pass(c)
    assert [len(g.wires) for g in out.gates] == [2, 1]
    assert len(merge_pass(c, absorb_local=True).gates) == 1
    np.testing.assert_allclose(circuit_unitary(out), circuit_unitary(c), atol=1e-12)


def test_merge_sandwich_random(rng):
    for _ in range(25):
        n = int(rng.choice([4, 6]))
        c = random_circuit(rng, n, 20, local_kinds=("H", "T"))
        k = int(rng.choice([2, n // 2]))
        for p in enumerate_balanced_partitions(n, k)[:5]:
            e = make_encoding(p)
            cg = contract_graph(build_interaction_graph(c), p)
            compressed = compress(c, e)
            merged = merge_pass(compressed)
            assert cg.l0 <= nonlocal_count(merged) <= nonlocal_count(compressed) == cg.l1


def test_merge_saturates_l0_for_diagonal_circuits(rng):
    for _ in range(20):
        n = 6
        edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.5]
        graph_c = graph_state_circuit(n, edges)
        diag_c = random_circuit(rng, n, 20, kinds=("CZ", "CT", "CTdag"))
        for c in (graph_c, diag_c):
            g = build_interaction_graph(c)
            for p in enumerate_balanced_partitions(n, 3):
                e = make_encoding(p)
                merged = merge_pass(compress(c, e))
                assert nonlocal_count(merged) == contract_graph(g, p).l0
                assert verify_circuits(c, merged, e).residual < 1e-9


# -- pipeline ------------------------------------------------------------------


def test_pipeline_cpf4():
    report, out = full_pipeline(cpf4_barenco_circuit().circuit, 2)
    assert (report.original_nonlocal, report.compressed_nonlocal, report.merged_nonlocal) == (13, 7, 1)
    assert report.checked and report.max_residual < 1e-9
    assert nonlocal_count(out) == 1


def test_pipeline_cluster_3x3():
    report, _ = full_pipeline(cluster_state_circuit(3, 3), 3)
    assert (report.original_nonlocal, report.compressed_nonlocal, report.merged_nonlocal) == (12, 6, 2)
    assert report.contracted.dropped_weight == 6


def test_pipeline_empty_circuit():
    report, out = full_pipeline(Circuit.qubits(4), 2)
    assert report.degenerate
    doc = report.to_json()
    assert doc["bounds"] is None and doc["degenerate"] is True
    assert nonlocal_count(out) == 0


def test_pipeline_without_merge():
    report, out = full_pipeline(cpf4_barenco_circuit().circuit, 2, PipelineOptions(merge=False))
    assert report.merged_nonlocal is None
    assert nonlocal_count(out) == 7


def test_pipeline_aux_dims():
    report, out = full_pipeline(cpf4_barenco_circuit().circuit, 2, PipelineOptions(dims=[5, 5]))
    assert out.dims == (5, 5)
    assert report.merged_nonlocal == 1
    assert report.max_residual < 1e-9


def test_report_schema():
    report, _ = full_pipeline(cluster_state_circuit(2, 2), 2)
    doc = report.to_json()
    assert doc["original"]["nonlocal"] == 4
    assert doc["partition"] == {"groups": [[0, 1], [2, 3]]}
    assert doc["tilde"]["l0"] == 1 and doc["tilde"]["l1"] == 2
    assert doc["bounds"] == {"lower": [1, 4], "upper": [1, 2]}
    assert doc["merged_nonlocal"] == 1
    assert doc["verification"]["checked"] is True
    assert doc["two_qudit_gates"] == [{"wires": [0, 1], "schmidt_rank": 4}]


def test_report_ranks_cpf4():
    report, _ = full_pipeline(cpf4_barenco_circuit().circuit, 2)
    assert report.to_json()["two_qudit_gates"] == [{"wires": [0, 1], "schmidt_rank": 2}]
