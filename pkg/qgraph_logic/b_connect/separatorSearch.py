# qgraph_logic/b_connect/separatorSearch.py - Separator hunting for k-connectivity bounds and the maximal connectivity check
import os
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple
import numpy as np
import scipy.linalg as linalg
from joblib import Parallel, delayed
from qgraph_logic.a_matrix.matCore import (
    Projection, dagger, haar_unitary, hermitian_eig, null_space_basis, orthogonal_complement,
    projector_onto, random_hermitian, random_unit_vector)
from qgraph_logic.a_matrix.opSpace import QuantumGraph
from qgraph_logic.b_connect.connectDecide import SeparatorReport, is_connected, is_separator
from qgraph_logic.c_classical.classicalGraph import (
    OrthonormalBasisCn, confusability, cut_projection, minimum_vertex_cuts)
from qgraph_logic.qgraphErrors import QGraphError
logger = logging.getLogger(__name__)

# === Configuration ===
SEED_ENV = "QGRAPH_SEED"
JOBS_ENV = "QGRAPH_JOBS"
DEFAULT_SEED = 20240601
REFUTE_SIGMA = 1e-10
VERIFY_SIGMA = 1e-4
EXACT_CANDIDATE_SIGMA = 1e-5
EXACT_MAX_DIM = 3
MAX_COORDINATE_CUTS = 64


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, DEFAULT_SEED))


def default_jobs() -> int:
    return int(os.environ.get(JOBS_ENV, 1))


@dataclass(frozen=True)
class SearchBudget:
    restarts: int = 16
    refine_steps: int = 60
    pool_random: int = 8
    maximal_restarts: int = 16
    seed: int = field(default_factory=default_seed)
    n_jobs: int = field(default_factory=default_jobs)
    exact_small: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {"restarts": self.restarts, "refine_steps": self.refine_steps, "pool_random": self.pool_random,
                "maximal_restarts": self.maximal_restarts, "seed": self.seed, "exact_small": self.exact_small}


# === Result Models ===
class MaximalVerdict(str, Enum):
    VERIFIED = "Verified"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"


class MaximalResult:
    def __init__(self, verdict: MaximalVerdict, sigma_min: float, exact: bool, starts: int,
                 u: Optional[np.ndarray] = None, v: Optional[np.ndarray] = None,
                 separator: Optional[SeparatorReport] = None):
        self.verdict = verdict
        self.sigma_min = sigma_min
        self.exact = exact
        self.starts = starts
        self.u = u
        self.v = v
        self.separator = separator

    def __repr__(self):
        label = "exact" if self.exact else "heuristic"
        return f"MaximalResult({self.verdict.value}, sigma_min={self.sigma_min:.3e}, {label})"


class ConnectivityBounds:
    def __init__(self, lower: int, upper: int, best_separator: Optional[SeparatorReport],
                 method_log: List[Dict[str, Any]], is_m_n: bool = False):
        self.lower = lower
        self.upper = upper
        self.best_separator = best_separator
        self.method_log = method_log
        self.is_m_n = is_m_n
        self.lower_heuristic = False
        self.lower_conditional = False
        self.maximal: Optional[MaximalResult] = None

    def __repr__(self):
        return f"ConnectivityBounds(lower={self.lower}, upper={self.upper})"

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


# The connectivity as an integer only when the bounds meet
def connectivity_exact(bounds: ConnectivityBounds) -> Optional[int]:
    return bounds.upper if bounds.exact else None


# === Candidate Verification ===
class CandidateCounter:
    """Counts verified candidates per search and logs the summary once."""

    def __init__(self, S: QuantumGraph):
        self.S = S
        self.tight = S.with_tolerance(S.tol.tightened())
        self.checked = 0
        self.accepted = 0

    # Separator report when P passes at both the working and the tightened tolerance
    def try_projection(self, P: Projection) -> Optional[SeparatorReport]:
        if P.rank >= self.S.n:
            return None
        self.checked += 1
        try:
            report = is_separator(self.S, P)
            if report is None or is_separator(self.tight, P) is None:
                return None
        except QGraphError as exc:
            logger.debug(f"[CandidateCounter.try_projection] Candidate rejected: {exc}")
            return None
        self.accepted += 1
        return report

    # Separator P = I - Q1 - Q2 from block bases X (Q1) and Y (Q2)
    def try_blocks(self, X: np.ndarray, Y: np.ndarray) -> Optional[SeparatorReport]:
        if X.shape[1] == 0 or Y.shape[1] == 0:
            return None
        rest = orthogonal_complement(np.hstack([X, Y]), self.S.n, self.S.tol)
        return self.try_projection(Projection(rest, self.S.n))

    def log_summary(self, phase: str):
        logger.info(f"[separator_search] {phase}: {self.accepted} of {self.checked} candidates verified")
        self.checked = 0
        self.accepted = 0


def _better(current: Optional[SeparatorReport], found: Optional[SeparatorReport]) -> bool:
    return found is not None and (current is None or found.rank < current.rank)


# === Phase 1: Algebraic Closure ===
# Structured and random unit vectors: standard basis, eigenvectors of Hermitian parts, Haar draws
def _vector_pool(S: QuantumGraph, rng: np.random.Generator, count: int) -> List[np.ndarray]:
    n = S.n
    pool = [np.eye(n, dtype=np.complex128)[i] for i in range(n)]
    for B in S.basis[:n]:
        _, V = hermitian_eig((B + dagger(B)) / 2, S.tol)
        pool.extend(V.T)
    pool.extend(random_unit_vector(n, rng) for _ in range(count))
    return pool


# Q2 = N_u (all y with <u|S y> = 0) and Q1 = complement of span(S N_u), which contains u
def closure_blocks(S: QuantumGraph, u: np.ndarray) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    rows = np.einsum("j,kji->ki", np.conj(u), S.basis)
    N = null_space_basis(rows, S.tol, ncols=S.n)
    if N.shape[1] == 0:
        return None
    image = np.concatenate(list(S.basis @ N[None]), axis=1)
    Q1 = orthogonal_complement(image, S.n, S.tol)
    if Q1.shape[1] == 0:
        return None
    return Q1, N


def _algebraic_phase(S: QuantumGraph, counter: CandidateCounter, rng: np.random.Generator,
                     budget: SearchBudget, best: SeparatorReport) -> SeparatorReport:
    for u in _vector_pool(S, rng, budget.pool_random):
        blocks = closure_blocks(S, u)
        if blocks is None:
            continue
        X, Y = blocks
        if S.n - X.shape[1] - Y.shape[1] < best.rank:
            found = counter.try_blocks(X, Y)
            if _better(best, found):
                best = found
        if best.rank > S.n - 2:
            found = counter.try_blocks(u.reshape(-1, 1) / np.linalg.norm(u), Y[:, :1])
            if _better(best, found):
                best = found
    counter.log_summary("algebraic closure")
    return best


# === Phase 2: Coordinate Cuts ===
def _coordinate_phase(S: QuantumGraph, counter: CandidateCounter, rng: np.random.Generator,
                      best: SeparatorReport) -> SeparatorReport:
    bases = [OrthonormalBasisCn.standard(S.n)]
    H = np.tensordot(rng.standard_normal(S.dim), (S.basis + dagger(S.basis)) / 2, axes=1)
    bases.append(OrthonormalBasisCn(hermitian_eig(H, S.tol)[1]))
    for basis in bases:
        graph = confusability(S, basis)
        for cut in minimum_vertex_cuts(graph)[:MAX_COORDINATE_CUTS]:
            if len(cut) >= best.rank:
                break
            found = counter.try_projection(cut_projection(basis, cut))
            if _better(best, found):
                best = found
    counter.log_summary("coordinate cuts")
    return best


# === Phase 3: Local Refinement ===
# f(X, Y) = sum over basis B of ||X^dagger B Y||^2
def block_objective(basis: np.ndarray, X: np.ndarray, Y: np.ndarray) -> float:
    return float(np.sum(np.abs(dagger(X)[None] @ basis @ Y[None]) ** 2))


def _complement_columns(X: np.ndarray) -> np.ndarray:
    _, _, Vh = linalg.svd(dagger(X), full_matrices=True)
    return Vh[X.shape[1]:].conj().T


# Best r columns orthogonal to F minimizing sum ||G_k^dagger Z||^2 with G_k the given factors
def _lowest_block(factors: np.ndarray, F: np.ndarray, r: int) -> np.ndarray:
    C = _complement_columns(F)
    M = np.einsum("kai,kbi->ab", factors, factors.conj())
    _, vecs = linalg.eigh(dagger(C) @ M @ C)
    return C @ vecs[:, :r]


# One round of alternating minimization: Y given X, then X given Y
def _alternate(basis: np.ndarray, X: np.ndarray, Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    Y = _lowest_block(dagger(basis) @ X[None], X, Y.shape[1])
    X = _lowest_block(basis @ Y[None], Y, X.shape[1])
    return X, Y


def _refine_task(basis: np.ndarray, n: int, r1: int, r2: int, seed_seq: np.random.SeedSequence,
                 steps: int, accept: float) -> Tuple[float, np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed_seq)
    U = haar_unitary(n, rng)
    X, Y = U[:, :r1], U[:, r1:r1 + r2]
    value = block_objective(basis, X, Y)
    step = 0.5
    for _ in range(steps):
        X, Y = _alternate(basis, X, Y)
        current = block_objective(basis, X, Y)
        if current <= accept:
            return current, X, Y
        if current > value * (1 - 1e-6):
            kick = linalg.expm(1j * step * random_hermitian(n, rng))
            trial = block_objective(basis, kick @ X, kick @ Y)
            if trial < current:
                X, Y, current = kick @ X, kick @ Y, trial
            step *= 0.7
        value = current
    return value, X, Y


def _refinement_phase(S: QuantumGraph, counter: CandidateCounter, budget: SearchBudget,
                      lower: int, best: SeparatorReport) -> SeparatorReport:
    n = S.n
    accept = S.tol.residual_abs ** 2
    for k in range(max(lower, 1), best.rank):
        for r1 in range(1, (n - k) // 2 + 1):
            r2 = n - k - r1
            seeds = np.random.SeedSequence([budget.seed, k, r1]).spawn(budget.restarts)
            results = Parallel(n_jobs=budget.n_jobs)(
                delayed(_refine_task)(S.basis, n, r1, r2, s, budget.refine_steps, accept) for s in seeds)
            for value, X, Y in results:
                if value > accept:
                    continue
                found = counter.try_blocks(X, Y)
                if _better(best, found):
                    counter.log_summary(f"refinement k={k}")
                    return found
    counter.log_summary("refinement")
    return best


# === Separator Search ===
# Verified upper bound from separator hunting; lower bound from connectivity, LGP and maximality
def separator_search(S: QuantumGraph, budget: Optional[SearchBudget] = None,
                     lgp_bound: Optional[int] = None, run_maximal: bool = True) -> ConnectivityBounds:
    budget = budget or SearchBudget()
    n = S.n
    log: List[Dict[str, Any]] = []
    cert = is_connected(S)
    if not cert.connected:
        report = is_separator(S, Projection.zero(n))
        log.append({"phase": "connectedness", "result": "disconnected, zero projection separates"})
        return ConnectivityBounds(0, 0, report, log)
    counter = CandidateCounter(S)
    if n == 1:
        log.append({"phase": "connectedness", "result": "M_1"})
        return ConnectivityBounds(0, 0, counter.try_projection(Projection.zero(1)), log, is_m_n=True)
    rng = np.random.default_rng(np.random.SeedSequence([budget.seed, n, S.dim]))
    lower = 1
    best = counter.try_projection(Projection.coordinate(n, range(n - 1)))
    log.append({"phase": "connectedness", "result": "connected", "stabilization_power": cert.stabilization_power})
    bounds = ConnectivityBounds(lower, n - 1, best, log, is_m_n=S.is_full)
    if S.is_full:
        bounds.lower = n - 1
        log.append({"phase": "full_algebra", "result": "S = M_n has connectivity n - 1"})
        return bounds
    for phase, run in (("algebraic", lambda b: _algebraic_phase(S, counter, rng, budget, b)),
                       ("coordinate", lambda b: _coordinate_phase(S, counter, rng, b)),
                       ("refinement", lambda b: _refinement_phase(S, counter, budget, bounds.lower, b))):
        if best.rank <= bounds.lower:
            break
        best = run(best)
        log.append({"phase": phase, "upper": best.rank})
    bounds.best_separator = best
    bounds.upper = best.rank
    if lgp_bound is not None:
        if lgp_bound > bounds.upper:
            logger.warning(f"[separator_search] LGP bound {lgp_bound} exceeds verified upper bound {bounds.upper}, dropped")
            log.append({"phase": "lgp", "warning": f"bound {lgp_bound} exceeds upper {bounds.upper}; dropped"})
        elif lgp_bound > bounds.lower:
            bounds.lower = lgp_bound
            bounds.lower_conditional = True
            log.append({"phase": "lgp", "lower": lgp_bound, "note": "conditional on sampled LGP verification"})
    if run_maximal and bounds.lower < n - 1 and bounds.upper == n - 1:
        result = maximal_connectivity_check(S, budget.maximal_restarts, budget.seed, budget.n_jobs, budget.exact_small)
        bounds.maximal = result
        log.append({"phase": "maximal", "verdict": result.verdict.value, "exact": result.exact,
                    "sigma_min": result.sigma_min})
        if result.verdict == MaximalVerdict.VERIFIED:
            bounds.lower = n - 1
            bounds.lower_heuristic = not result.exact
        elif result.verdict == MaximalVerdict.REFUTED and _better(bounds.best_separator, result.separator):
            bounds.best_separator = result.separator
            bounds.upper = result.separator.rank
    logger.info(f"[separator_search] {bounds} after {len(log)} logged phase(s)")
    return bounds


# === Maximal Connectivity ===
# Rows <u|B_k as a (dim S) x n matrix
def _rows_for(basis: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.einsum("j,kji->ki", np.conj(u), basis)


# Smallest singular value of the row matrix of u and its right singular vector
def _best_v(basis: np.ndarray, u: np.ndarray) -> Tuple[float, np.ndarray]:
    _, s, Vh = linalg.svd(_rows_for(basis, u), full_matrices=True)
    sigma = float(s[-1]) if s.size == u.size else 0.0
    return sigma, Vh[-1].conj()


def _best_u(basis: np.ndarray, v: np.ndarray) -> np.ndarray:
    _, _, Vh = linalg.svd(np.conj(basis @ v), full_matrices=True)
    return Vh[-1].conj()


# Alternating descent of sum_k |<u|B_k|v>|^2 on the product of unit spheres
def _descend(basis: np.ndarray, u: np.ndarray, iters: int = 200) -> Tuple[float, np.ndarray, np.ndarray]:
    previous = np.inf
    for _ in range(iters):
        sigma, v = _best_v(basis, u)
        if previous - sigma <= 1e-14 * max(previous, 1e-300) or sigma < REFUTE_SIGMA * 1e-3:
            break
        previous = sigma
        u = _best_u(basis, v)
    sigma, v = _best_v(basis, u)
    return sigma, u, v


def _descend_task(basis: np.ndarray, start: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
    return _descend(basis, start / np.linalg.norm(start))


def _structured_starts(n: int) -> List[np.ndarray]:
    E = np.eye(n, dtype=np.complex128)
    starts = [E[i] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            starts.append((E[i] + E[j]) / np.sqrt(2))
            starts.append((E[i] + 1j * E[j]) / np.sqrt(2))
    return starts


# Separator I - |u><u| - |v><v| after confirming <u|B|v> = 0 on the basis
def _refutation(S: QuantumGraph, u: np.ndarray, v: np.ndarray) -> Optional[SeparatorReport]:
    u = u / np.linalg.norm(u)
    v = v - np.vdot(u, v) * u
    if np.linalg.norm(v) <= S.tol.residual_abs:
        return None
    v = v / np.linalg.norm(v)
    if np.max(np.abs(_rows_for(S.basis, u) @ v)) > S.tol.residual_abs:
        return None
    P = projector_onto([u, v], S.tol).complement()
    try:
        return is_separator(S, P)
    except QGraphError as exc:
        logger.debug(f"[_refutation] Recheck failed: {exc}")
        return None


def _refuted(S: QuantumGraph, u: np.ndarray, v: np.ndarray, sigma: float, exact: bool,
             starts: int) -> Optional[MaximalResult]:
    report = _refutation(S, u, v)
    if report is None:
        return None
    return MaximalResult(MaximalVerdict.REFUTED, sigma, exact, starts, u, v, report)


# Does some pair of unit vectors satisfy <u|B|v> = 0 for all B in S?
def maximal_connectivity_check(S: QuantumGraph, restarts: int = 16, seed: Optional[int] = None,
                               n_jobs: int = 1, exact: bool = True) -> MaximalResult:
    n = S.n
    seed = default_seed() if seed is None else seed
    if S.dim < n:
        u = np.eye(n, dtype=np.complex128)[0]
        v = null_space_basis(_rows_for(S.basis, u), S.tol, ncols=n)[:, 0]
        result = _refuted(S, u, v, 0.0, True, 0)
        if result is not None:
            return result
    starts = _structured_starts(n)
    starts += [random_unit_vector(n, np.random.default_rng(s))
               for s in np.random.SeedSequence([seed, n]).spawn(restarts)]
    minima = Parallel(n_jobs=n_jobs)(delayed(_descend_task)(S.basis, start) for start in starts)
    sigma, u, v = min(minima, key=lambda item: item[0])
    if sigma < REFUTE_SIGMA:
        result = _refuted(S, u, v, sigma, False, len(starts))
        if result is not None:
            return result
    verdict = MaximalVerdict.VERIFIED if all(m[0] > VERIFY_SIGMA for m in minima) else MaximalVerdict.INCONCLUSIVE
    logger.debug(f"[maximal_connectivity_check] Heuristic {verdict.value}, smallest local minimum {sigma:.3e}")
    if exact and n <= EXACT_MAX_DIM:
        outcome, hit = _exact_small(S, seed)
        if outcome == "refuted":
            result = _refuted(S, hit[1], hit[2], hit[0], True, len(starts))
            if result is not None:
                return result
        if outcome == "clear":
            return MaximalResult(MaximalVerdict.VERIFIED, sigma, True, len(starts))
        logger.info(f"[maximal_connectivity_check] Exact mode unresolved ({outcome}), keeping heuristic label")
    return MaximalResult(verdict, sigma, False, len(starts))


# === Exact Mode (n <= 3) ===
# det(G R(w)) with R(w) rows w^T B_k; w = conj(u)
def _det_form(basis: np.ndarray, G: np.ndarray, w: np.ndarray) -> complex:
    R = np.einsum("j,kji->ki", w, basis)
    return complex(np.linalg.det(G @ R))


# Coefficients (ascending) of a polynomial of degree < m sampled at the m-th roots of unity
def _coefficients_from_roots_of_unity(values: Sequence[complex]) -> np.ndarray:
    values = np.asarray(values, dtype=np.complex128)
    return np.fft.fft(values) / len(values)


# Roots of an ascending coefficient vector; None when it is identically zero at zero_level
def _roots_ascending(coeffs: np.ndarray, zero_level: float) -> Optional[np.ndarray]:
    peak = float(np.max(np.abs(coeffs)))
    if peak <= zero_level:
        return None
    significant = np.flatnonzero(np.abs(coeffs) > 1e-10 * peak)
    top = significant[-1]
    if top == 0:
        return np.zeros(0, dtype=np.complex128)
    return np.roots(coeffs[:top + 1][::-1])


def _sylvester(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    # p, q ascending cubic coefficients
    M = np.zeros((6, 6), dtype=np.complex128)
    for shift in range(3):
        M[shift, shift:shift + 4] = p[::-1]
        M[3 + shift, shift:shift + 4] = q[::-1]
    return M


def _candidate_check(S: QuantumGraph, w: np.ndarray) -> Optional[Tuple[float, np.ndarray, np.ndarray]]:
    if not np.all(np.isfinite(w)) or np.linalg.norm(w) == 0:
        return None
    u = np.conj(w) / np.linalg.norm(w)
    sigma, _ = _best_v(S.basis, u)
    if sigma > EXACT_CANDIDATE_SIGMA:
        return None
    return _descend(S.basis, u)


# Candidates from the polynomial system; "clear" means no rank-deficient u exists
def _exact_small(S: QuantumGraph, seed: int) -> Tuple[str, Optional[Tuple[float, np.ndarray, np.ndarray]]]:
    n, d = S.n, S.dim
    rng = np.random.default_rng(np.random.SeedSequence([seed, n, d, 3]))
    A = haar_unitary(n, rng)
    forms = [(rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))) for _ in range(2)]
    scale = max(np.linalg.norm(G) for G in forms) ** n
    unit4 = np.exp(2j * np.pi * np.arange(4) / 4)
    points: List[np.ndarray] = []

    def along(base: np.ndarray, direction: np.ndarray, G: np.ndarray) -> np.ndarray:
        return _coefficients_from_roots_of_unity([_det_form(S.basis, G, base + z * direction) for z in unit4])

    if n == 2:
        base, direction = A[:, 0], A[:, 1]
        for G in forms:
            roots = _roots_ascending(along(base, direction, G), 1e-12 * scale)
            if roots is None:
                return "identically_zero", None
            points.extend(base + s * direction for s in roots)
        points.append(direction)
    elif n == 3:
        a0, a1, a2 = A[:, 0], A[:, 1], A[:, 2]

        def t_coeffs(s: complex, G: np.ndarray) -> np.ndarray:
            return along(a0 + s * a1, a2, G)

        unit16 = np.exp(2j * np.pi * np.arange(16) / 16)
        sampled = [(t_coeffs(s, forms[0]), t_coeffs(s, forms[1])) for s in unit16]
        coeff_scale = max(float(np.max(np.abs(np.concatenate(pair)))) for pair in sampled)
        res_values = [np.linalg.det(_sylvester(p, q)) for p, q in sampled]
        res = _coefficients_from_roots_of_unity(res_values)
        res_scale = max(float(np.max(np.abs(res))), 1e-300)
        if np.max(np.abs(res[10:])) > 1e-6 * res_scale:
            logger.debug("[_exact_small] Resultant interpolation shows aliasing above degree 9")
        s_roots = _roots_ascending(res[:10], 1e-12 * coeff_scale ** 6)
        if s_roots is None:
            return "identically_zero", None
        for s in s_roots:
            for G in forms:
                t_roots = _roots_ascending(t_coeffs(s, G), 1e-12 * scale)
                if t_roots is None:
                    continue
                points.extend(a0 + s * a1 + t * a2 for t in t_roots)
        for G in forms:
            roots = _roots_ascending(along(a1, a2, G), 1e-12 * scale)
            if roots is None:
                return "identically_zero", None
            points.extend(a1 + t * a2 for t in roots)
        points.append(a2)
    else:
        return "unsupported", None
    near_root = False
    for w in points:
        hit = _candidate_check(S, w)
        if hit is None:
            continue
        if hit[0] < REFUTE_SIGMA and _refutation(S, hit[1], hit[2]) is not None:
            return "refuted", hit
        near_root = True
    if near_root:
        return "near_root", None
    logger.debug(f"[_exact_small] {len(points)} candidate point(s), none rank deficient")
    return "clear", None
