# tests/test_matCore.py - Tolerances, spans, ranks, null spaces, projections and seeded randomness
import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from qgraph_logic.a_matrix.matCore import (
    MAX_AMBIENT_DIM, Projection, Tolerance, check_ambient_dim, dagger, gram_schmidt_hs, haar_unitary,
    hermitian_eig, hs_inner, hs_norm, null_space_basis, null_space_of_blocks, numerical_rank, orthogonal_complement,
    projector_onto, random_complex_matrix, span_rows, spawn_rngs, vectorize)
from qgraph_logic.qgraphErrors import ContractViolationError, DegenerateInputError, DimensionError, ValidationError


# === Tolerance ===
def test_tolerance_defaults():
    tol = Tolerance()
    assert tol.rank_rel == 1e-9
    assert tol.residual_abs == 1e-8


def test_tolerance_parse_pair_and_single():
    assert Tolerance.parse("1e-10, 1e-9") == Tolerance(1e-10, 1e-9)
    assert Tolerance.parse("1e-7") == Tolerance(residual_abs=1e-7)


@pytest.mark.parametrize("text", ["abc", "1e-9,1e-8,1e-7", "0.5"])
def test_tolerance_parse_rejects(text):
    with pytest.raises(ValidationError):
        Tolerance.parse(text)


def test_tolerance_from_env(monkeypatch):
    monkeypatch.setenv("QGRAPH_TOL", "1e-11,1e-10")
    assert Tolerance.from_env() == Tolerance(1e-11, 1e-10)
    monkeypatch.delenv("QGRAPH_TOL")
    assert Tolerance.from_env() == Tolerance()


def test_tightened_divides_both():
    tight = Tolerance().tightened()
    assert tight.rank_rel == pytest.approx(1e-10)
    assert tight.residual_abs == pytest.approx(1e-9)


# === Helpers ===
def test_ambient_dimension_cap():
    assert check_ambient_dim(MAX_AMBIENT_DIM) == MAX_AMBIENT_DIM
    with pytest.raises(DimensionError):
        check_ambient_dim(MAX_AMBIENT_DIM + 1)
    with pytest.raises(DimensionError):
        check_ambient_dim(0)


def test_hs_inner_is_trace_form(rng):
    X, Y = random_complex_matrix(3, 3, rng), random_complex_matrix(3, 3, rng)
    assert hs_inner(X, Y) == pytest.approx(np.trace(dagger(X) @ Y))
    with pytest.raises(DimensionError):
        hs_inner(X, np.eye(2))


@seed(20240601)
@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 5))
def test_row_major_vec_identity(draw_seed, n):
    r = np.random.default_rng(draw_seed)
    A, X, B = (random_complex_matrix(n, n, r) for _ in range(3))
    lhs = vectorize([A @ X @ B])[0]
    rhs = np.kron(A, B.T) @ vectorize([X])[0]
    assert np.allclose(lhs, rhs, atol=1e-10)


# === Spans and Ranks ===
def test_span_rows_drops_dependent_rows():
    rows = np.array([[1, 0, 0], [2, 0, 0], [0, 1, 1]], dtype=complex)
    basis = span_rows(rows)
    assert basis.shape == (2, 3)
    assert np.allclose(basis @ dagger(basis), np.eye(2), atol=1e-12)


def test_span_rows_near_cutoff_goes_to_svd():
    rows = np.array([[1, 0], [1, 1e-7]], dtype=complex)
    assert span_rows(rows).shape[0] == 2
    assert span_rows(rows, Tolerance(rank_rel=1e-6)).shape[0] == 1


def test_gram_schmidt_hs_orthonormal(rng):
    mats = [random_complex_matrix(3, 3, rng) for _ in range(4)]
    mats.append(mats[0] + 2 * mats[1])
    basis = gram_schmidt_hs(mats)
    assert len(basis) == 4
    gram = np.array([[hs_inner(X, Y) for Y in basis] for X in basis])
    assert np.allclose(gram, np.eye(4), atol=1e-10)


def test_numerical_rank():
    assert numerical_rank(np.diag([1.0, 1e-12, 0.0])) == 1
    assert numerical_rank(np.eye(4)) == 4
    assert numerical_rank(np.zeros((0, 3))) == 0


@pytest.mark.parametrize("size", [1e-16, 1e-12, 1e-10])
def test_span_rows_and_rank_agree_on_near_zero_rows(size):
    rows = np.full((2, 4), size, dtype=complex)
    rows[1, 0] = -size
    assert span_rows(rows).shape[0] == 0
    assert numerical_rank(rows) == 0
    assert gram_schmidt_hs([np.full((2, 2), size)]) == []


def test_span_rows_keeps_small_but_resolved_rows():
    rows = np.array([[1e-6, 0, 0], [0, 1e-6, 0]], dtype=complex)
    assert span_rows(rows).shape[0] == numerical_rank(rows) == 2


@seed(20240601)
@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 6), st.data())
def test_numerical_rank_invariant_under_unitaries(draw_seed, n, data):
    r = np.random.default_rng(draw_seed)
    k = data.draw(st.integers(0, n))
    X = random_complex_matrix(n, k, r) @ random_complex_matrix(k, n, r) if k else np.zeros((n, n))
    U, V = haar_unitary(n, r), haar_unitary(n, r)
    assert numerical_rank(X) == k
    assert numerical_rank(U @ X @ V) == k
    assert span_rows(U @ X @ V).shape[0] == k
    tiny = 1e-14 * X
    assert numerical_rank(U @ tiny @ V) == numerical_rank(tiny) == 0


def test_null_space_basis(rng):
    A = random_complex_matrix(2, 5, rng)
    N = null_space_basis(A)
    assert N.shape == (5, 3)
    assert hs_norm(A @ N) < 1e-10
    assert np.allclose(dagger(N) @ N, np.eye(3), atol=1e-10)


def test_null_space_of_blocks_matches_stacked(rng):
    blocks = [random_complex_matrix(3, 6, rng) for _ in range(1)] + [np.zeros((4, 6))]
    N = null_space_of_blocks(blocks, 6)
    assert N.shape == (6, 3)
    assert hs_norm(blocks[0] @ N) < 1e-10


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(ContractViolationError):
        hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))
    w, _ = hermitian_eig(np.diag([3.0, 1.0]))
    assert np.allclose(w, [1.0, 3.0])


def test_hermitian_eig_asymmetry_bound_is_absolute(rng):
    A = random_complex_matrix(3, 3, rng)
    H = 1e4 * (A + dagger(A))
    skew = np.zeros((3, 3), dtype=complex)
    skew[0, 1] = 5e-8
    with pytest.raises(ContractViolationError):
        hermitian_eig(H + skew)
    w, _ = hermitian_eig(H + skew / 100)
    assert w.shape == (3,)


# === Projections ===
def test_projection_from_matrix_and_complement():
    P = Projection.from_matrix(np.diag([1.0, 0.0, 1.0]))
    assert P.rank == 2
    Pc = P.complement()
    assert Pc.rank == 1
    assert np.allclose(P.matrix + Pc.matrix, np.eye(3))
    assert P.verify() and Pc.verify()


def test_projection_from_matrix_rejects():
    with pytest.raises(ValidationError):
        Projection.from_matrix(np.array([[1.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValidationError):
        Projection.from_matrix(0.5 * np.eye(2))


def test_projection_trivial_and_coordinate():
    assert Projection.zero(3).is_trivial
    assert Projection.identity(3).is_trivial
    P = Projection.coordinate(4, [3, 1, 1])
    assert P.rank == 2
    assert np.allclose(np.diag(P.matrix), [0, 1, 0, 1])
    assert Projection.zero(2).complement().rank == 2


def test_projection_matrix_is_readonly():
    P = Projection.coordinate(2, [0])
    with pytest.raises(ValueError):
        P.matrix[0, 0] = 5


def test_projector_onto(rng):
    x = random_complex_matrix(4, 1, rng)[:, 0]
    P = projector_onto([x, 2j * x])
    assert P.rank == 1
    assert np.allclose(P.matrix @ x, x)
    with pytest.raises(DegenerateInputError):
        projector_onto([np.zeros(3)])
    with pytest.raises(DegenerateInputError):
        projector_onto([])


def test_conjugated_projection_stays_projection(rng):
    U = haar_unitary(4, rng)
    P = Projection.coordinate(4, [0, 2]).conjugated(U)
    assert P.verify()
    assert np.allclose(P.matrix, U @ np.diag([1, 0, 1, 0]) @ dagger(U), atol=1e-10)


def test_orthogonal_complement(rng):
    V = random_complex_matrix(5, 2, rng)
    C = orthogonal_complement(V, 5)
    assert C.shape == (5, 3)
    assert hs_norm(dagger(C) @ V) < 1e-10
    assert orthogonal_complement(np.zeros((3, 0)), 3).shape == (3, 3)


# === Randomness ===
@pytest.mark.parametrize("n", [1, 2, 5])
def test_haar_unitary_is_unitary(rng, n):
    U = haar_unitary(n, rng)
    assert np.allclose(dagger(U) @ U, np.eye(n), atol=1e-10)


def test_spawn_rngs_reproducible():
    first = [g.random() for g in spawn_rngs(7, 3)]
    again = [g.random() for g in spawn_rngs(7, 3)]
    assert first == again
    assert len(set(first)) == 3
