# qgraph_logic/a_matrix/matCore.py - Dense complex linear algebra: inner products, spans, ranks, spectra, projections
import os
import logging
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Sequence, Tuple
import numpy as np
import scipy.linalg as linalg
from scipy.stats import unitary_group
from qgraph_logic.qgraphErrors import (
    ContractViolationError, DegenerateInputError, DimensionError, ValidationError)
logger = logging.getLogger(__name__)

# === Configuration ===
DEFAULT_RANK_REL = 1e-9
DEFAULT_RESIDUAL_ABS = 1e-8
MAX_AMBIENT_DIM = 32
# Gram-Schmidt residual ratios inside this band (in units of the cutoff) get the SVD arbiter
DISPUTE_BAND = 1e3
TOLERANCE_ENV = "QGRAPH_TOL"


# === Tolerance ===
@dataclass(frozen=True)
class Tolerance:
    rank_rel: float = DEFAULT_RANK_REL
    residual_abs: float = DEFAULT_RESIDUAL_ABS

    def __post_init__(self):
        if not 0 < self.rank_rel < 1e-2:
            raise ValidationError(f"rank_rel must lie in (0, 1e-2), got {self.rank_rel}")
        if not 0 < self.residual_abs < 1e-2:
            raise ValidationError(f"residual_abs must lie in (0, 1e-2), got {self.residual_abs}")

    # Same tolerance divided by factor, used when certificates re-verify themselves
    def tightened(self, factor: float = 10.0) -> "Tolerance":
        return replace(self, rank_rel=self.rank_rel / factor, residual_abs=self.residual_abs / factor)

    def to_dict(self):
        return {"rank_rel": self.rank_rel, "residual_abs": self.residual_abs}

    # Parse "rank_rel,residual_abs" or a single residual_abs value
    @classmethod
    def parse(cls, text: str) -> "Tolerance":
        parts = [p.strip() for p in text.split(",") if p.strip()]
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise ValidationError(f"Cannot parse tolerance '{text}'")
        if len(values) == 1:
            return cls(residual_abs=values[0])
        if len(values) == 2:
            return cls(rank_rel=values[0], residual_abs=values[1])
        raise ValidationError(f"Tolerance needs one or two numbers, got '{text}'")

    @classmethod
    def from_env(cls) -> "Tolerance":
        raw = os.environ.get(TOLERANCE_ENV)
        if not raw:
            return cls()
        tol = cls.parse(raw)
        logger.debug(f"[Tolerance.from_env] Using {TOLERANCE_ENV}={raw} -> {tol}")
        return tol


DEFAULT_TOL = Tolerance()


# === Matrix Helpers ===
# Coerce to a finite complex128 2-D array (the ComplexMatrix value type)
def as_matrix(X, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(X, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must be a nonempty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains NaN or Inf entries")
    return arr


def as_vector(x, name: str = "vector") -> np.ndarray:
    arr = np.asarray(x, dtype=np.complex128).reshape(-1)
    if arr.size == 0:
        raise DimensionError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains NaN or Inf entries")
    return arr


def check_ambient_dim(n: int) -> int:
    if n < 1 or n > MAX_AMBIENT_DIM:
        raise DimensionError(f"Ambient dimension must lie in [1, {MAX_AMBIENT_DIM}], got {n}")
    return n


def dagger(X: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(X, -1, -2))


def hs_norm(X: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(X).reshape(-1)))


def readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.flags.writeable = False
    return arr


# Hilbert-Schmidt inner product <X, Y> = tr(X^dagger Y)
def hs_inner(X, Y) -> complex:
    X, Y = np.asarray(X, dtype=np.complex128), np.asarray(Y, dtype=np.complex128)
    if X.shape != Y.shape:
        raise DimensionError(f"hs_inner shape mismatch: {X.shape} vs {Y.shape}")
    return complex(np.vdot(X, Y))


# Row-major vectorization; vec(A X B) = kron(A, B^T) vec(X)
def vectorize(mats: Sequence[np.ndarray]) -> np.ndarray:
    if len(mats) == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    return np.stack([np.asarray(M, dtype=np.complex128).reshape(-1) for M in mats])


def unvectorize(rows: np.ndarray, shape: Tuple[int, int]) -> np.ndarray:
    return np.asarray(rows).reshape((-1,) + tuple(shape))


# === Spans and Ranks ===
# Orthonormal rows spanning the row space, decided by SVD (the arbiter); same cutoff as numerical_rank
def _svd_row_basis(rows: np.ndarray, tol: Tolerance) -> np.ndarray:
    _, s, Vh = linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((0, rows.shape[1]), dtype=np.complex128)
    rank = int(np.sum(s >= tol.rank_rel * max(float(s[0]), 1.0)))
    return Vh[:rank]


# Gram-Schmidt over rows with one full re-orthogonalization pass (CGS2)
# Returns the basis rows and whether any residual landed near the cutoff
def _gram_schmidt_rows(rows: np.ndarray, tol: Tolerance) -> Tuple[np.ndarray, bool]:
    m, N = rows.shape
    norms = np.linalg.norm(rows, axis=1)
    scale = float(norms.max()) if m else 0.0
    if scale == 0.0:
        return np.zeros((0, N), dtype=np.complex128), False
    cutoff = tol.rank_rel * max(scale, 1.0)
    basis = np.zeros((min(m, N), N), dtype=np.complex128)
    k = 0
    disputed = False
    for row in rows:
        if k == N:
            break
        r = np.array(row, dtype=np.complex128)
        for _ in range(2):
            if k:
                r -= (basis[:k].conj() @ r) @ basis[:k]
        res = float(np.linalg.norm(r))
        if cutoff / DISPUTE_BAND <= res < cutoff * DISPUTE_BAND:
            disputed = True
        if res < cutoff:
            continue
        basis[k] = r / res
        k += 1
    return basis[:k], disputed


# Orthonormal row basis of span(rows): Gram-Schmidt fast path, SVD when disputed
def span_rows(rows: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.complex128)
    if rows.size == 0:
        return np.zeros((0, rows.shape[1] if rows.ndim == 2 else 0), dtype=np.complex128)
    basis, disputed = _gram_schmidt_rows(rows, tol)
    if disputed:
        arbiter = _svd_row_basis(rows, tol)
        if arbiter.shape[0] != basis.shape[0]:
            logger.debug(f"[span_rows] SVD arbiter overrode Gram-Schmidt: {basis.shape[0]} -> {arbiter.shape[0]}")
        basis = arbiter
    return basis


# Hilbert-Schmidt orthonormal basis of span(mats)
def gram_schmidt_hs(mats: Sequence, tol: Tolerance = DEFAULT_TOL) -> List[np.ndarray]:
    if len(mats) == 0:
        return []
    arrs = [np.asarray(M, dtype=np.complex128) for M in mats]
    shape = arrs[0].shape
    for M in arrs:
        if M.shape != shape:
            raise DimensionError(f"gram_schmidt_hs shape mismatch: {M.shape} vs {shape}")
    basis = span_rows(vectorize(arrs), tol)
    return [row.reshape(shape) for row in basis]


# Count of singular values >= rank_rel * max(sigma_max, 1)
def numerical_rank(X, tol: Tolerance = DEFAULT_TOL) -> int:
    X = np.asarray(X, dtype=np.complex128)
    if X.size == 0:
        return 0
    s = linalg.svd(X, compute_uv=False)
    return int(np.sum(s >= tol.rank_rel * max(float(s[0]), 1.0)))


# Null space (orthonormal columns) of the rows of A under the numerical_rank rule
def null_space_basis(A, tol: Tolerance = DEFAULT_TOL, ncols: Optional[int] = None) -> np.ndarray:
    A = np.asarray(A, dtype=np.complex128)
    N = A.shape[1] if A.ndim == 2 and A.shape[1] else (ncols or 0)
    if A.size == 0:
        return np.eye(N, dtype=np.complex128)
    if A.shape[0] > N:
        A = linalg.qr(A, mode="r")[0][:N]
    _, s, Vh = linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s >= tol.rank_rel * max(float(s[0]) if s.size else 0.0, 1.0)))
    return Vh[rank:].conj().T


# Null space of a tall system delivered block by block; QR keeps at most N rows alive
def null_space_of_blocks(blocks: Iterable[np.ndarray], N: int, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    R = np.zeros((0, N), dtype=np.complex128)
    for block in blocks:
        stacked = np.vstack([R, np.asarray(block, dtype=np.complex128)])
        R = linalg.qr(stacked, mode="r")[0][:N] if stacked.shape[0] > N else stacked
    return null_space_basis(R, tol, ncols=N)


# === Spectra ===
# Hermitian eigendecomposition of the symmetrized input, eigenvalues ascending
def hermitian_eig(H, tol: Tolerance = DEFAULT_TOL) -> Tuple[np.ndarray, np.ndarray]:
    H = as_matrix(H, "H")
    if H.shape[0] != H.shape[1]:
        raise DimensionError(f"hermitian_eig needs a square matrix, got {H.shape}")
    asym = hs_norm(H - dagger(H))
    if asym > tol.residual_abs:
        raise ContractViolationError(f"Matrix is not Hermitian: ||H - H^dagger|| = {asym:.3e}")
    w, V = linalg.eigh((H + dagger(H)) / 2)
    return w, V


# === Projections ===
class Projection:
    """Orthogonal projection P = V V^dagger stored through an orthonormal range basis V (n x rank)."""

    def __init__(self, range_basis: np.ndarray, n: Optional[int] = None):
        V = np.asarray(range_basis, dtype=np.complex128)
        if V.ndim != 2:
            V = V.reshape(n or V.size, -1)
        self.n = int(V.shape[0] if n is None else n)
        if V.shape[0] != self.n:
            raise DimensionError(f"Range basis has {V.shape[0]} rows, expected {self.n}")
        self.range_basis = readonly(V)
        self.rank = int(V.shape[1])
        self.matrix = readonly(V @ dagger(V)) if self.rank else readonly(np.zeros((self.n, self.n)))

    def __repr__(self):
        return f"Projection(n={self.n}, rank={self.rank})"

    @property
    def isometry(self) -> np.ndarray:
        return self.range_basis

    @property
    def is_trivial(self) -> bool:
        return self.rank in (0, self.n)

    @classmethod
    def zero(cls, n: int) -> "Projection":
        return cls(np.zeros((n, 0), dtype=np.complex128), n)

    @classmethod
    def identity(cls, n: int) -> "Projection":
        return cls(np.eye(n, dtype=np.complex128), n)

    # Projection onto span{e_i : i in indices} (0-indexed)
    @classmethod
    def coordinate(cls, n: int, indices: Iterable[int]) -> "Projection":
        idx = sorted(set(int(i) for i in indices))
        return cls(np.eye(n, dtype=np.complex128)[:, idx], n)

    # Validating constructor from a raw matrix
    @classmethod
    def from_matrix(cls, P, tol: Tolerance = DEFAULT_TOL) -> "Projection":
        P = as_matrix(P, "projection")
        n = P.shape[0]
        if P.shape != (n, n):
            raise DimensionError(f"Projection must be square, got {P.shape}")
        herm = hs_norm(P - dagger(P))
        idem = hs_norm(P @ P - P)
        if herm > tol.residual_abs or idem > tol.residual_abs:
            raise ValidationError(f"Not a projection: ||P-P^dagger||={herm:.3e}, ||P^2-P||={idem:.3e}")
        w, V = linalg.eigh((P + dagger(P)) / 2)
        if np.any(np.minimum(np.abs(w), np.abs(w - 1)) > tol.residual_abs):
            raise ValidationError(f"Projection eigenvalues stray from {{0, 1}}: {np.round(w, 12).tolist()}")
        return cls(V[:, np.abs(w - 1) <= tol.residual_abs], n)

    def complement(self) -> "Projection":
        if self.rank == 0:
            return Projection.identity(self.n)
        _, _, Vh = linalg.svd(dagger(self.range_basis), full_matrices=True)
        return Projection(Vh[self.rank:].conj().T, self.n)

    def conjugated(self, U) -> "Projection":
        return Projection(np.asarray(U, dtype=np.complex128) @ self.range_basis, self.n)

    # Residuals of the Projection invariants; all must sit below residual_abs
    def residuals(self) -> dict:
        P = self.matrix
        gram = dagger(self.range_basis) @ self.range_basis if self.rank else np.zeros((0, 0))
        return {
            "hermitian": hs_norm(P - dagger(P)),
            "idempotent": hs_norm(P @ P - P),
            "range_orthonormal": hs_norm(gram - np.eye(self.rank)),
        }

    def verify(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return all(r <= tol.residual_abs for r in self.residuals().values())


# Projection onto span(vectors) after orthonormalizing them
def projector_onto(vectors: Sequence, tol: Tolerance = DEFAULT_TOL) -> Projection:
    if len(vectors) == 0:
        raise DegenerateInputError("projector_onto needs at least one vector")
    rows = np.stack([as_vector(v, "vector") for v in vectors])
    n = rows.shape[1]
    if float(np.linalg.norm(rows, axis=1).max()) <= tol.residual_abs:
        raise DegenerateInputError("All vectors are numerically zero")
    basis = span_rows(rows, tol)
    return Projection(basis.T, n)


# Orthonormal columns spanning the orthogonal complement of span(columns of V)
def orthogonal_complement(V: np.ndarray, n: int, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    V = np.asarray(V, dtype=np.complex128).reshape(n, -1)
    if V.shape[1] == 0:
        return np.eye(n, dtype=np.complex128)
    return null_space_basis(dagger(V), tol, ncols=n)


# === Randomness ===
# Independent generators for parallel tasks, all derived from one root seed
def spawn_rngs(seed: int, count: int) -> List[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1), dtype=np.complex128)
    return np.asarray(unitary_group.rvs(n, random_state=rng), dtype=np.complex128)


def random_unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return x / np.linalg.norm(x)


def random_complex_matrix(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    G = random_complex_matrix(n, n, rng)
    return (G + dagger(G)) / 2
