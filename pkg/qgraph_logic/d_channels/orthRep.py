# qgraph_logic/d_channels/orthRep.py - Orthogonal representations of quantum graphs, locally general position and the (n-d) bound
import logging
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple
import numpy as np
from qgraph_logic.a_matrix.matCore import (
    DEFAULT_TOL, Projection, Tolerance, as_matrix, dagger, hermitian_eig, haar_unitary, hs_norm,
    null_space_basis, null_space_of_blocks, numerical_rank, random_unit_vector)
from qgraph_logic.a_matrix.opSpace import QuantumGraph, matrix_unit, scalar_space
from qgraph_logic.c_classical.classicalGraph import (
    ClassicalGraph, ClassicalOrthRep, OrthonormalBasisCn, validate_orth_rep)
from qgraph_logic.d_channels.krausMap import KrausMap, apply
from qgraph_logic.qgraphErrors import (
    ContractViolationError, DegenerateInputError, DimensionError, ValidationError)
logger = logging.getLogger(__name__)

# === Configuration ===
# A pair counts as a violation only when its worst product exceeds this multiple of residual_abs
VIOLATION_FACTOR = 10.0
LGP_SUBSPACES_PER_RANK = 20
MAX_PAIRS_PER_A = 4


class SampledVerdict(str, Enum):
    PASS_SAMPLED = "PassSampled"
    VIOLATED = "Violated"


# === C*-Orthogonality ===
# Largest of ||XY||, ||YX||, ||X^dagger Y||, ||X Y^dagger|| relative to max(||X|| ||Y||, 1)
def cstar_residual(X, Y) -> float:
    X, Y = as_matrix(X, "X"), as_matrix(Y, "Y")
    if X.shape != Y.shape:
        raise DimensionError(f"cstar_orthogonal shape mismatch: {X.shape} vs {Y.shape}")
    worst = max(hs_norm(X @ Y), hs_norm(Y @ X), hs_norm(dagger(X) @ Y), hs_norm(X @ dagger(Y)))
    return worst / max(hs_norm(X) * hs_norm(Y), 1.0)


def cstar_orthogonal(X, Y, tol: Tolerance = DEFAULT_TOL) -> bool:
    return cstar_residual(X, Y) <= tol.residual_abs


# === Annihilating Pairs ===
# Orthonormal basis of {B : A S B = B S A = A^dagger S B = A S B^dagger = 0}
# The last condition is linear in B because S is adjoint-closed: it equals B S A^dagger = 0
def annihilator_basis(S: QuantumGraph, A, tol: Optional[Tolerance] = None) -> np.ndarray:
    tol = tol or S.tol
    n = S.n
    A = as_matrix(A, "A")
    if A.shape != (n, n):
        raise DimensionError(f"A has shape {A.shape}, graph lives in M_{n}")
    I = np.eye(n, dtype=np.complex128)
    Ad = dagger(A)

    def blocks():
        for Sk in S.basis:
            yield np.kron(A @ Sk, I)
            yield np.kron(I, (Sk @ A).T)
            yield np.kron(Ad @ Sk, I)
            yield np.kron(I, (Sk @ Ad).T)

    null = null_space_of_blocks(blocks(), n * n, tol)
    return null.T.reshape(-1, n, n)


# Residual of the four annihilation conditions for a concrete pair
def annihilation_residual(S: QuantumGraph, A, B) -> float:
    A, B = np.asarray(A, dtype=np.complex128), np.asarray(B, dtype=np.complex128)
    scale = max(hs_norm(A) * hs_norm(B), 1e-300)
    worst = 0.0
    for Sk in S.basis:
        worst = max(worst, hs_norm(A @ Sk @ B), hs_norm(B @ Sk @ A),
                    hs_norm(dagger(A) @ Sk @ B), hs_norm(A @ Sk @ dagger(B)))
    return worst / scale


def _structured_left_factors(n: int) -> List[np.ndarray]:
    units = [matrix_unit(n, i, i) for i in range(n)]
    units += [matrix_unit(n, i, j) for i in range(n) for j in range(n) if i != j]
    return units


# Pairs (A, B) satisfying all four annihilation conditions; A from structured, supplied and random draws
def annihilating_pairs(S: QuantumGraph, samples: int = 32, seed: int = 0,
                       extra: Sequence = ()) -> List[Tuple[np.ndarray, np.ndarray]]:
    rng = np.random.default_rng(seed)
    n = S.n
    structured = [np.asarray(A, dtype=np.complex128) for A in extra] + _structured_left_factors(n)
    candidates = list(structured)
    for _ in range(samples):
        x, y = random_unit_vector(n, rng), random_unit_vector(n, rng)
        candidates.append(np.outer(x, y.conj()))
    pairs = []
    for A in candidates:
        null = annihilator_basis(S, A)
        if null.shape[0] == 0:
            continue
        picks = [B for B in structured if annihilation_residual(S, A, B) <= S.tol.residual_abs]
        picks += list(null[:MAX_PAIRS_PER_A - 1])
        coeffs = rng.standard_normal(null.shape[0]) + 1j * rng.standard_normal(null.shape[0])
        picks.append(np.tensordot(coeffs / np.linalg.norm(coeffs), null, axes=1))
        for B in picks:
            if annihilation_residual(S, A, B) <= S.tol.residual_abs:
                pairs.append((A, B))
    logger.debug(f"[annihilating_pairs] {len(pairs)} pair(s) from {len(candidates)} left factor(s)")
    return pairs


# === Orthogonal Representation Check ===
class OrthRepViolation(NamedTuple):
    A: np.ndarray
    B: np.ndarray
    product: str
    residual: float


class OrthRepReport:
    def __init__(self, pairs_tested: int, violations: List[OrthRepViolation], borderline: int = 0):
        self.pairs_tested = pairs_tested
        self.violations = violations
        self.borderline = borderline
        self.verdict = SampledVerdict.VIOLATED if violations else SampledVerdict.PASS_SAMPLED

    def __repr__(self):
        return f"OrthRepReport({self.verdict.value}, pairs={self.pairs_tested}, violations={len(self.violations)})"

    @property
    def passed(self) -> bool:
        return self.verdict == SampledVerdict.PASS_SAMPLED


def _worst_product(X: np.ndarray, Y: np.ndarray) -> Tuple[str, float]:
    scale = max(hs_norm(X) * hs_norm(Y), 1.0)
    products = {"XY": X @ Y, "YX": Y @ X, "X*Y": dagger(X) @ Y, "XY*": X @ dagger(Y)}
    name = max(products, key=lambda key: hs_norm(products[key]))
    return name, hs_norm(products[name]) / scale


def _unit(M: np.ndarray) -> np.ndarray:
    return M / hs_norm(M)


# Sampled check that Phi sends annihilating pairs of S to C*-orthogonal pairs
def check_orth_rep(phi: KrausMap, S: QuantumGraph, samples: int = 32, seed: int = 0,
                   extra: Sequence = ()) -> OrthRepReport:
    if phi.in_dim != S.n:
        raise DimensionError(f"Map acts on M_{phi.in_dim}, graph lives in M_{S.n}")
    tol = S.tol
    pairs = annihilating_pairs(S, samples, seed, extra)
    violations, borderline = [], 0
    for A, B in pairs:
        X, Y = apply(phi, _unit(A)), apply(phi, _unit(B))
        name, residual = _worst_product(X, Y)
        if residual <= tol.residual_abs:
            continue
        if residual > VIOLATION_FACTOR * tol.residual_abs and \
                annihilation_residual(S, A, B) <= tol.tightened().residual_abs:
            violations.append(OrthRepViolation(A, B, name, residual))
        else:
            borderline += 1
    if borderline:
        logger.warning(f"[check_orth_rep] {borderline} pair(s) sit between the orthogonality and violation thresholds")
    report = OrthRepReport(len(pairs), violations, borderline)
    logger.info(f"[check_orth_rep] {report}")
    return report


# Orthogonal representation of the scalar graph C I_n
def check_order_zero(phi: KrausMap, samples: int = 32, seed: int = 0) -> OrthRepReport:
    return check_orth_rep(phi, scalar_space(phi.in_dim), samples, seed)


# === Classical Bridges ===
# Kraus {|f(i)><e_i|}
def classical_to_quantum_rep(G: ClassicalGraph, f: ClassicalOrthRep, tol: Tolerance = DEFAULT_TOL) -> KrausMap:
    check = validate_orth_rep(G, f, tol)
    if not check.valid:
        i, j, overlap = check.violations[0]
        raise ValidationError(f"Not an orthogonal representation: vertices {i}, {j} non-adjacent with overlap {overlap:.3e}")
    kraus = [np.outer(f[i], np.eye(G.n)[i]) for i in range(G.n)]
    return KrausMap(kraus, tol)


# Deterministic range vector of a PSD matrix: top eigenvector times its eigenvalue, phase-fixed
def _range_vector(M: np.ndarray, tol: Tolerance) -> np.ndarray:
    w, V = hermitian_eig(M, tol)
    top = float(w[-1])
    cluster = V[:, w >= top - tol.residual_abs * max(top, 1.0)]
    if cluster.shape[1] == 1:
        x = cluster[:, 0]
    else:
        Pi = cluster @ dagger(cluster)
        weights = np.linalg.norm(Pi, axis=0)
        j = int(np.flatnonzero(weights >= weights.max() - 1e-12)[0])
        x = Pi[:, j] / weights[j]
    mags = np.abs(x)
    k = int(np.flatnonzero(mags >= mags.max() - 1e-12)[0])
    return top * x * (np.conj(x[k]) / mags[k])


# f(i) from the range of Phi(|v_i><v_i|); v defaults to the standard basis
def quantum_to_classical_rep(phi: KrausMap, G: ClassicalGraph,
                             basis: Optional[OrthonormalBasisCn] = None) -> ClassicalOrthRep:
    if phi.in_dim != G.n:
        raise DimensionError(f"Map acts on M_{phi.in_dim}, graph has {G.n} vertices")
    tol = phi.tol
    basis = basis or OrthonormalBasisCn.standard(G.n)
    vectors = []
    for i in range(G.n):
        v = basis.vector(i)
        image = apply(phi, np.outer(v, v.conj()))
        if hs_norm(image) <= tol.residual_abs:
            raise DegenerateInputError(f"Phi(|v_{i}><v_{i}|) vanishes, no range vector for vertex {i}")
        vectors.append(_range_vector(image, tol))
    f = ClassicalOrthRep(phi.out_dim, vectors)
    if not validate_orth_rep(G, f, tol).valid:
        raise ContractViolationError("Range vectors are not an orthogonal representation of G; "
                                     "Phi is not an orthogonal representation of the lifted graph")
    return f


# === Locally General Position ===
class LgpReport:
    def __init__(self, tested: int, violation: Optional[Tuple[np.ndarray, Projection]] = None):
        self.tested = tested
        self.violation = violation
        self.verdict = SampledVerdict.VIOLATED if violation else SampledVerdict.PASS_SAMPLED

    def __repr__(self):
        return f"LgpReport({self.verdict.value}, projections_tested={self.tested})"

    @property
    def passed(self) -> bool:
        return self.verdict == SampledVerdict.PASS_SAMPLED


# N_u = {x : <u|B x> = 0 for every basis B}
def admissible_subspace(S: QuantumGraph, u: np.ndarray, tol: Optional[Tolerance] = None) -> np.ndarray:
    rows = np.einsum("j,kji->ki", np.conj(u), S.basis)
    return null_space_basis(rows, tol or S.tol, ncols=S.n)


def _lgp_fails(phi: KrausMap, S: QuantumGraph, u: np.ndarray, P: Projection, tol: Tolerance) -> bool:
    Q = np.outer(u, u.conj())
    annihilated = max(hs_norm(Q @ B @ P.matrix) for B in S.basis) <= tol.residual_abs
    return annihilated and numerical_rank(apply(phi, P.matrix), tol) < P.rank


# rank Phi(P) >= rank P for P under rank-one Q = |u><u| with Q S P = 0, sampled over u and P
def check_lgp(phi: KrausMap, S: QuantumGraph, samples: int = 16, seed: int = 0) -> LgpReport:
    if phi.in_dim != S.n:
        raise DimensionError(f"Map acts on M_{phi.in_dim}, graph lives in M_{S.n}")
    n, tol = S.n, S.tol
    rng = np.random.default_rng(seed)
    pool = [np.eye(n, dtype=np.complex128)[i] for i in range(n)]
    pool += [random_unit_vector(n, rng) for _ in range(samples)]
    tested = 0
    for u in pool:
        N = admissible_subspace(S, u, tol)
        m = N.shape[1]
        if m == 0:
            continue
        candidates = [Projection(N, n)]
        for r in range(1, m):
            for _ in range(LGP_SUBSPACES_PER_RANK):
                candidates.append(Projection(N @ haar_unitary(m, rng)[:, :r], n))
        for P in candidates:
            tested += 1
            if _lgp_fails(phi, S, u, P, tol) and _lgp_fails(phi, S, u, P, tol.tightened()):
                logger.info(f"[check_lgp] Violation: rank {P.rank} projection maps to lower rank")
                return LgpReport(tested, (np.outer(u, u.conj()), P))
    return LgpReport(tested)


class LgpBound(NamedTuple):
    bound: int
    conditional: str
    orth_report: OrthRepReport
    lgp_report: LgpReport


# max(n - d, 0) once both sampled checks pass; None (with a warning) otherwise
def lgp_connectivity_bound(phi: KrausMap, S: QuantumGraph, samples: int = 16, seed: int = 0) -> Optional[LgpBound]:
    orth = check_orth_rep(phi, S, samples, seed)
    lgp = check_lgp(phi, S, samples, seed)
    if not orth.passed or not lgp.passed:
        logger.warning(f"[lgp_connectivity_bound] No bound emitted: orth_rep={orth.verdict.value}, lgp={lgp.verdict.value}")
        return None
    bound = max(S.n - phi.out_dim, 0)
    return LgpBound(bound, "conditional on sampled LGP verification", orth, lgp)
