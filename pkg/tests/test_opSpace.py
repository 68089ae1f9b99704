# tests/test_opSpace.py - Operator subspaces, quantum graph construction, products, powers, commutants, compressions
import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from qgraph_logic.a_matrix.matCore import Projection, dagger, haar_unitary, random_complex_matrix
from qgraph_logic.a_matrix.opSpace import (
    OperatorSubspace, QuantumGraph, commutant, compress, conjugate_space, contains, cross_space, diagonal_space,
    full_space, generated_algebra, hamming_cube, is_operator_system, is_subspace_of, make_quantum_graph,
    matrix_unit, power, product, scalar_space)
from qgraph_logic.b_connect.connectDecide import is_connected, witness_residual
from qgraph_logic.e_cli.instanceGen import random_operator_system
from qgraph_logic.qgraphErrors import DegenerateInputError, DimensionError, ValidationError


# === Construction ===
def test_make_quantum_graph_adds_identity_and_adjoints():
    S = make_quantum_graph([matrix_unit(2, 0, 1)])
    assert S.dim == 3
    assert contains(S, np.eye(2))
    assert contains(S, matrix_unit(2, 1, 0))


def test_make_quantum_graph_without_generators():
    S = make_quantum_graph([], n=3)
    assert S.dim == 1
    with pytest.raises(DimensionError):
        make_quantum_graph([])


def test_strict_mode_names_failing_invariant():
    with pytest.raises(ValidationError, match="contains_identity"):
        make_quantum_graph([matrix_unit(2, 0, 1), matrix_unit(2, 1, 0)], strict=True)
    S = make_quantum_graph([np.eye(2), matrix_unit(2, 0, 1), matrix_unit(2, 1, 0)], strict=True)
    assert S.dim == 3


def test_quantum_graph_validates():
    with pytest.raises(ValidationError):
        QuantumGraph(matrix_unit(2, 0, 1)[None], 2)
    ok, failures = is_operator_system(OperatorSubspace(matrix_unit(2, 0, 1)[None], 2))
    assert not ok
    assert set(failures) == {"contains_identity", "adjoint_closed"}


def test_ambient_dimension_cap():
    with pytest.raises(DimensionError):
        make_quantum_graph([], n=33)


def test_basis_is_readonly_and_orthonormal(offdiag3):
    with pytest.raises(ValueError):
        offdiag3.basis[0, 0, 0] = 1.0
    V = offdiag3.vectorized()
    assert np.allclose(V.conj() @ V.T, np.eye(offdiag3.dim), atol=1e-12)


def test_standard_spaces():
    assert full_space(3).is_full
    assert scalar_space(3).dim == 1
    assert diagonal_space(3).dim == 3
    assert is_subspace_of(diagonal_space(3), full_space(3))
    assert not is_subspace_of(full_space(3), diagonal_space(3))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_hamming_cube_dimension(m):
    C = hamming_cube(m)
    assert C.n == 2 ** m
    assert C.dim == 1 + 3 * m


# === Products and Powers ===
def test_product_of_diagonal_and_unit():
    U = diagonal_space(2)
    V = OperatorSubspace(matrix_unit(2, 0, 1)[None], 2)
    P = product(U, V)
    assert P.dim == 1
    assert contains(P, matrix_unit(2, 0, 1))


@seed(20240601)
@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 4))
def test_product_is_associative(draw_seed, n):
    r = np.random.default_rng(draw_seed)
    U, V, W = (OperatorSubspace.from_generators([random_complex_matrix(n, 1, r) @ random_complex_matrix(1, n, r)], n)
               for _ in range(3))
    left = product(product(U, V), W)
    right = product(U, product(V, W))
    assert left.dim == right.dim
    assert is_subspace_of(left, right) and is_subspace_of(right, left)


def test_power_bounds_and_zero(lifted_p3):
    assert power(lifted_p3, 0).dim == 1
    assert power(lifted_p3, 1).dim == lifted_p3.dim
    assert power(lifted_p3, 2).is_full
    with pytest.raises(ValidationError):
        power(lifted_p3, -1)
    with pytest.raises(ValidationError):
        power(lifted_p3, 11)


def test_generated_algebra(lifted_p3):
    T, m = generated_algebra(lifted_p3)
    assert T.is_full and m == 2
    D, m = generated_algebra(diagonal_space(3))
    assert D.dim == 3 and m == 1


# === Commutant ===
def test_commutant_dimensions(offdiag3):
    assert commutant(full_space(3)).dim == 1
    assert commutant(diagonal_space(3)).dim == 3
    assert commutant(scalar_space(3)).dim == 9
    assert commutant(offdiag3).dim == 1


def test_commutant_elements_commute(rng):
    U = haar_unitary(4, rng)
    blocks = [np.kron(np.eye(2), random_complex_matrix(2, 2, rng))]
    S = make_quantum_graph([U @ B @ dagger(U) for B in blocks])
    C = commutant(S)
    assert C.dim == 4
    for X in C.basis:
        for B in S.basis:
            assert np.allclose(X @ B, B @ X, atol=1e-9)


# === Compression ===
def test_compress_drops_missing_edges(lifted_p3):
    compressed = compress(lifted_p3, Projection.coordinate(3, [0, 2]))
    assert compressed.dim == 2
    assert isinstance(compressed.space, QuantumGraph)
    lifted = compressed.lift_projection(Projection.coordinate(2, [1]))
    assert np.allclose(lifted.matrix, np.diag([0, 0, 1]))


def test_compress_rank_zero(lifted_p3):
    with pytest.raises(DegenerateInputError):
        compress(lifted_p3, Projection.zero(3))


def test_cross_space(lifted_p3):
    P, Q = Projection.coordinate(3, [0]), Projection.coordinate(3, [1, 2])
    assert cross_space(lifted_p3, P, Q).dim == 1
    assert cross_space(lifted_p3, Projection.coordinate(3, [0]), Projection.coordinate(3, [2])).dim == 0


def test_cross_space_of_commuting_projection_is_zero():
    S = scalar_space(2)
    P = Projection.coordinate(2, [0]).conjugated(haar_unitary(2, np.random.default_rng(7)))
    assert cross_space(S, P, P.complement()).dim == 0
    assert cross_space(diagonal_space(3), Projection.coordinate(3, [0]), Projection.coordinate(3, [1, 2])).dim == 0


# === Unitary Covariance ===
def test_conjugate_space_preserves_structure(rng, offdiag3):
    U = haar_unitary(3, rng)
    T = conjugate_space(offdiag3, U)
    assert isinstance(T, QuantumGraph)
    assert T.dim == offdiag3.dim
    assert all(contains(T, U @ B @ dagger(U)) for B in offdiag3.basis)
    assert commutant(T).dim == commutant(offdiag3).dim


@pytest.mark.parametrize("blocks", [None, [1, 2], [2, 2], [1, 1, 2]])
def test_conjugation_preserves_connectivity_and_witness(rng, blocks):
    n = 4 if blocks is None else sum(blocks)
    S = random_operator_system(n, 2, rng, blocks=blocks)
    U = haar_unitary(n, rng)
    T = conjugate_space(S, U)
    cert, moved = is_connected(S), is_connected(T)
    assert moved.verdict == cert.verdict
    assert moved.stabilization_power == cert.stabilization_power
    if cert.witness is not None:
        assert witness_residual(T, cert.witness.conjugated(U)) <= S.tol.residual_abs
        assert 0 < moved.witness.rank < n


def test_conjugate_space_rejects_non_unitary(offdiag3):
    with pytest.raises(ValidationError):
        conjugate_space(offdiag3, 2 * np.eye(3))
