# qgraph_logic/a_matrix/opSpace.py - Matrix subspaces, quantum graphs and their products, powers, commutants and compressions
import copy
import logging
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple
import numpy as np
from qgraph_logic.a_matrix.matCore import (
    DEFAULT_TOL, Projection, Tolerance, as_matrix, check_ambient_dim, dagger, hs_norm,
    null_space_of_blocks, readonly, span_rows, vectorize)
from qgraph_logic.qgraphErrors import DegenerateInputError, DimensionError, ValidationError
logger = logging.getLogger(__name__)


# === Subspace Model ===
class OperatorSubspace:
    """Subspace of M_n held as a Hilbert-Schmidt orthonormal basis (k x n x n array)."""

    def __init__(self, basis, n: int, tol: Tolerance = DEFAULT_TOL):
        self.n = check_ambient_dim(int(n))
        self.tol = tol
        arr = np.asarray(basis, dtype=np.complex128).reshape(-1, self.n, self.n)
        if arr.shape[0] > self.n ** 2:
            raise DimensionError(f"Basis of {arr.shape[0]} elements exceeds n^2 = {self.n ** 2}")
        self._basis = readonly(arr)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, dim={self.dim})"

    def __len__(self):
        return self.dim

    @property
    def dim(self) -> int:
        return int(self._basis.shape[0])

    @property
    def basis(self) -> np.ndarray:
        return self._basis

    @property
    def is_full(self) -> bool:
        return self.dim == self.n ** 2

    # Rows are the row-major vectorizations of the basis
    def vectorized(self) -> np.ndarray:
        return self._basis.reshape(self.dim, self.n * self.n)

    # Orthogonal projection of X onto the subspace
    def project(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.complex128)
        if self.dim == 0:
            return np.zeros_like(X)
        coeffs = self._basis.reshape(self.dim, -1).conj() @ X.reshape(-1)
        return (coeffs @ self._basis.reshape(self.dim, -1)).reshape(self.n, self.n)

    def adjoint_space(self) -> "OperatorSubspace":
        return OperatorSubspace(dagger(self._basis), self.n, self.tol)

    # Same basis judged under another tolerance
    def with_tolerance(self, tol: Tolerance) -> "OperatorSubspace":
        clone = copy.copy(self)
        clone.tol = tol
        return clone

    # Orthonormalized span of arbitrary n x n matrices
    @classmethod
    def from_generators(cls, generators: Sequence, n: Optional[int] = None,
                        tol: Tolerance = DEFAULT_TOL) -> "OperatorSubspace":
        mats = _check_square_family(generators, n)
        size = n if n is not None else mats[0].shape[0]
        if not mats:
            return OperatorSubspace(np.zeros((0, size, size)), size, tol)
        return OperatorSubspace(_orthonormal_basis(mats, size, tol), size, tol)


class QuantumGraph(OperatorSubspace):
    """Operator system: an OperatorSubspace that contains I_n and is closed under adjoints."""

    def __init__(self, basis, n: int, tol: Tolerance = DEFAULT_TOL, validate: bool = True):
        super().__init__(basis, n, tol)
        if validate:
            failures = operator_system_failures(self)
            if failures:
                raise ValidationError(f"Not a quantum graph: {', '.join(failures)} "
                                      f"({', '.join(f'{k}={v:.3e}' for k, v in failures.items())})")

    @classmethod
    def from_subspace(cls, space: OperatorSubspace) -> "QuantumGraph":
        return cls(space.basis, space.n, space.tol)


class CompressedSubspace:
    def __init__(self, parent: OperatorSubspace, compressor: Projection, space: OperatorSubspace):
        self.parent = parent
        self.compressor = compressor
        self.space = space
        self.isometry = compressor.range_basis

    def __repr__(self):
        return f"CompressedSubspace(n={self.parent.n}, rank={self.compressor.rank}, dim={self.space.dim})"

    @property
    def dim(self) -> int:
        return self.space.dim

    # Embed an r x r matrix back into M_n as V X V^dagger
    def lift_matrix(self, X) -> np.ndarray:
        return self.isometry @ np.asarray(X, dtype=np.complex128) @ dagger(self.isometry)

    # Projection of M_r pushed forward to a projection of M_n under the isometry
    def lift_projection(self, W: Projection) -> Projection:
        return Projection(self.isometry @ W.range_basis, self.parent.n)


# === Internal Helpers ===
def _check_square_family(generators: Sequence, n: Optional[int]) -> List[np.ndarray]:
    mats = [as_matrix(G, f"generator[{i}]") for i, G in enumerate(generators)]
    if not mats and n is None:
        raise DimensionError("Ambient dimension is required when no generators are given")
    size = n if n is not None else mats[0].shape[0]
    for i, M in enumerate(mats):
        if M.shape != (size, size):
            raise DimensionError(f"generator[{i}] has shape {M.shape}, expected {(size, size)}")
    return mats


def _orthonormal_basis(mats, n: int, tol: Tolerance) -> np.ndarray:
    rows = span_rows(vectorize(list(mats)), tol)
    return rows.reshape(-1, n, n)


def _same_ambient(U: OperatorSubspace, V: OperatorSubspace, op: str):
    if U.n != V.n:
        raise DimensionError(f"{op}: ambient dimensions differ ({U.n} vs {V.n})")


# Residual of each operator-system invariant that fails; empty dict means valid
def operator_system_failures(space: OperatorSubspace) -> Dict[str, float]:
    failures = {}
    tol, n = space.tol, space.n
    identity = np.eye(n, dtype=np.complex128)
    id_residual = hs_norm(identity - space.project(identity))
    if id_residual > tol.residual_abs * np.sqrt(n):
        failures["contains_identity"] = id_residual
    adj_residual = max((hs_norm(dagger(B) - space.project(dagger(B))) for B in space.basis), default=0.0)
    if adj_residual > tol.residual_abs:
        failures["adjoint_closed"] = adj_residual
    return failures


# Diagnostic form: (is operator system, failing invariants with residuals)
def is_operator_system(space: OperatorSubspace) -> Tuple[bool, Dict[str, float]]:
    failures = operator_system_failures(space)
    return not failures, failures


# === Construction ===
# Span of generators, I_n and generator adjoints; strict mode validates the raw span instead
def make_quantum_graph(generators: Sequence, tol: Tolerance = DEFAULT_TOL, strict: bool = False,
                       n: Optional[int] = None) -> QuantumGraph:
    mats = _check_square_family(generators, n)
    size = n if n is not None else mats[0].shape[0]
    check_ambient_dim(size)
    if strict:
        raw = OperatorSubspace.from_generators(mats, size, tol)
        failures = operator_system_failures(raw)
        if failures:
            raise ValidationError(f"Generators do not span a quantum graph: failing invariant(s) {sorted(failures)}")
        return QuantumGraph(raw.basis, size, tol, validate=False)
    family = [np.eye(size, dtype=np.complex128)] + mats + [dagger(M) for M in mats]
    graph = QuantumGraph(_orthonormal_basis(family, size, tol), size, tol)
    logger.debug(f"[make_quantum_graph] {len(mats)} generators -> dim {graph.dim} in M_{size}")
    return graph


def full_space(n: int, tol: Tolerance = DEFAULT_TOL) -> QuantumGraph:
    return QuantumGraph(np.eye(n * n, dtype=np.complex128).reshape(n * n, n, n), n, tol, validate=False)


def scalar_space(n: int, tol: Tolerance = DEFAULT_TOL) -> QuantumGraph:
    return QuantumGraph(np.eye(n, dtype=np.complex128)[None] / np.sqrt(n), n, tol, validate=False)


def diagonal_space(n: int, tol: Tolerance = DEFAULT_TOL) -> QuantumGraph:
    units = np.zeros((n, n, n), dtype=np.complex128)
    units[np.arange(n), np.arange(n), np.arange(n)] = 1.0
    return QuantumGraph(units, n, tol, validate=False)


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((n, n), dtype=np.complex128)
    E[i, j] = 1.0
    return E


# Quantum Hamming cube C_m in M_{2^m}: tensors with all but one factor equal to I_2
def hamming_cube(m: int, tol: Tolerance = DEFAULT_TOL) -> QuantumGraph:
    if m < 1:
        raise DimensionError(f"Hamming cube needs m >= 1, got {m}")
    n = 2 ** m
    check_ambient_dim(n)
    I2 = np.eye(2, dtype=np.complex128)
    family = [np.eye(n, dtype=np.complex128)]
    for site in range(m):
        for a in range(2):
            for b in range(2):
                factors = [I2] * m
                factors[site] = matrix_unit(2, a, b)
                family.append(reduce(np.kron, factors))
    return QuantumGraph(_orthonormal_basis(family, n, tol), n, tol)


# === Membership ===
def contains(space: OperatorSubspace, X) -> bool:
    X = as_matrix(X, "X")
    if X.shape != (space.n, space.n):
        raise DimensionError(f"contains: X has shape {X.shape}, space lives in M_{space.n}")
    residual = hs_norm(X - space.project(X))
    return residual <= space.tol.residual_abs * max(hs_norm(X), 1.0)


# Every basis element of U lies in V
def is_subspace_of(U: OperatorSubspace, V: OperatorSubspace) -> bool:
    _same_ambient(U, V, "is_subspace_of")
    return all(contains(V, B) for B in U.basis)


# === Products and Powers ===
# span{A B : A in U, B in V}, accumulated one U element at a time
def product(U: OperatorSubspace, V: OperatorSubspace) -> OperatorSubspace:
    _same_ambient(U, V, "product")
    n, tol = U.n, U.tol
    N = n * n
    rows = np.zeros((0, N), dtype=np.complex128)
    if U.dim and V.dim:
        for A in U.basis:
            block = np.matmul(A, V.basis).reshape(V.dim, N)
            rows = span_rows(np.vstack([rows, block]), tol)
            if rows.shape[0] == N:
                break
    return OperatorSubspace(rows.reshape(-1, n, n), n, tol)


# S^m with S^0 = C I_n; stops early once the powers fill M_n
def power(S: QuantumGraph, m: int) -> OperatorSubspace:
    n = S.n
    if m < 0 or m > n * n + 1:
        raise ValidationError(f"power: m must lie in [0, {n * n + 1}], got {m}")
    T: OperatorSubspace = scalar_space(n, S.tol)
    for _ in range(m):
        if T.is_full:
            break
        T = product(T, S)
    return T


# Algebra generated by S and the first m with S^m = S^{m+1}
def generated_algebra(S: QuantumGraph) -> Tuple[OperatorSubspace, int]:
    T: OperatorSubspace = OperatorSubspace(S.basis, S.n, S.tol)
    m = 1
    while True:
        if T.is_full:
            return T, m
        nxt = product(T, S)
        if nxt.dim == T.dim:
            logger.debug(f"[generated_algebra] Stabilized at dim {T.dim} with power {m}")
            return T, m
        T = nxt
        m += 1


# === Commutant ===
# {X : XB = BX for every basis B}; vec(XB - BX) = (I kron B^T - B kron I) vec(X)
def commutant(S: OperatorSubspace) -> OperatorSubspace:
    n = S.n
    identity = np.eye(n, dtype=np.complex128)
    blocks = (np.kron(identity, B.T) - np.kron(B, identity) for B in S.basis)
    null = null_space_of_blocks(blocks, n * n, S.tol)
    return OperatorSubspace(null.T.reshape(-1, n, n), n, S.tol)


# === Compression ===
# span{V^dagger B V} in M_r, V the range basis of P
def compress(S: OperatorSubspace, P: Projection) -> CompressedSubspace:
    if P.n != S.n:
        raise DimensionError(f"compress: projection lives in M_{P.n}, space in M_{S.n}")
    if P.rank == 0:
        raise DegenerateInputError("compress: projection has rank 0")
    V = P.range_basis
    r = P.rank
    mats = dagger(V)[None] @ S.basis @ V[None] if S.dim else np.zeros((0, r, r))
    basis = _orthonormal_basis(list(mats), r, S.tol) if S.dim else np.zeros((0, r, r))
    if isinstance(S, QuantumGraph):
        space: OperatorSubspace = QuantumGraph(basis, r, S.tol)
    else:
        space = OperatorSubspace(basis, r, S.tol)
    return CompressedSubspace(S, P, space)


# span{P B Q} kept inside M_n
def cross_space(S: OperatorSubspace, P: Projection, Q: Projection) -> OperatorSubspace:
    if P.n != S.n or Q.n != S.n:
        raise DimensionError("cross_space: projections and space must share the ambient dimension")
    if S.dim == 0 or P.rank == 0 or Q.rank == 0:
        return OperatorSubspace(np.zeros((0, S.n, S.n)), S.n, S.tol)
    mats = P.matrix[None] @ S.basis @ Q.matrix[None]
    return OperatorSubspace.from_generators(list(mats), S.n, S.tol)


# U S U^dagger; quantum graphs stay quantum graphs
def conjugate_space(S: OperatorSubspace, U) -> OperatorSubspace:
    U = as_matrix(U, "U")
    if U.shape != (S.n, S.n):
        raise DimensionError(f"conjugate_space: U has shape {U.shape}, expected {(S.n, S.n)}")
    if hs_norm(dagger(U) @ U - np.eye(S.n)) > S.tol.residual_abs * S.n:
        raise ValidationError("conjugate_space: U is not unitary")
    mats = U[None] @ S.basis @ dagger(U)[None]
    basis = _orthonormal_basis(list(mats), S.n, S.tol) if S.dim else np.zeros((0, S.n, S.n))
    if isinstance(S, QuantumGraph):
        return QuantumGraph(basis, S.n, S.tol)
    return OperatorSubspace(basis, S.n, S.tol)
