# qgraph_logic/b_connect/connectDecide.py - Connectedness decisions, disconnection witnesses, separators and tree packing
import logging
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple
import numpy as np
from qgraph_logic.a_matrix.matCore import (
    DEFAULT_TOL, Projection, Tolerance, dagger, hermitian_eig, hs_norm)
from qgraph_logic.a_matrix.opSpace import (
    OperatorSubspace, QuantumGraph, commutant, compress, cross_space, generated_algebra)
from qgraph_logic.qgraphErrors import DegenerateInputError, InconsistencyError, ValidationError
logger = logging.getLogger(__name__)

# === Configuration ===
WITNESS_SEED = 7
WITNESS_ATTEMPTS = 25
# Eigenvalues closer than this fraction of the spectral spread share a cluster
CLUSTER_GAP_REL = 1e-6


class Verdict(str, Enum):
    CONNECTED = "Connected"
    DISCONNECTED = "Disconnected"


class SeparatorMode(str, Enum):
    DISCONNECTION = "Disconnection"
    ONE_DIMENSIONAL = "OneDimensional"


# === Certificates ===
class ConnectivityCertificate:
    def __init__(self, verdict: Verdict, stabilization_power: int, commutant_dim: int,
                 algebra_dim: int, n: int, witness: Optional[Projection] = None):
        self.verdict = verdict
        self.stabilization_power = stabilization_power
        self.commutant_dim = commutant_dim
        self.algebra_dim = algebra_dim
        self.n = n
        self.witness = witness

    def __repr__(self):
        return (f"ConnectivityCertificate({self.verdict.value}, power={self.stabilization_power}, "
                f"commutant_dim={self.commutant_dim})")

    @property
    def connected(self) -> bool:
        return self.verdict == Verdict.CONNECTED

    # Re-check the certificate against S from scratch
    def verify(self, S: OperatorSubspace, tol: Optional[Tolerance] = None) -> bool:
        tol = tol or S.tol
        space = S.with_tolerance(tol)
        if self.connected:
            algebra, _ = generated_algebra(space)
            return algebra.is_full and commutant(space).dim == 1 and self.commutant_dim == 1
        if self.witness is None or self.witness.is_trivial:
            return False
        return witness_residual(space, self.witness) <= tol.residual_abs


class SeparatorReport:
    def __init__(self, separator: Projection, mode: SeparatorMode, compressed_dim: int,
                 sub_certificate: Optional[ConnectivityCertificate] = None,
                 blocks: Optional[Tuple[Projection, Projection]] = None):
        self.separator = separator
        self.mode = mode
        self.compressed_dim = compressed_dim
        self.sub_certificate = sub_certificate
        self.blocks = blocks

    def __repr__(self):
        return f"SeparatorReport(rank={self.rank}, mode={self.mode.value}, compressed_dim={self.compressed_dim})"

    @property
    def rank(self) -> int:
        return self.separator.rank

    # Largest ||Q1 B Q2|| over the basis; zero for OneDimensional reports
    def block_residual(self, S: OperatorSubspace) -> float:
        if self.blocks is None:
            return 0.0
        Q1, Q2 = self.blocks
        return max((hs_norm(Q1.matrix @ B @ Q2.matrix) for B in S.basis), default=0.0)

    def verify(self, S: QuantumGraph, tol: Optional[Tolerance] = None) -> bool:
        tol = tol or S.tol
        again = is_separator(S.with_tolerance(tol), self.separator)
        return again is not None and again.mode == self.mode


# === Witnesses ===
# max over basis B of ||P B (I - P)||
def witness_residual(S: OperatorSubspace, P: Projection) -> float:
    complement = np.eye(S.n) - P.matrix
    return max((hs_norm(P.matrix @ B @ complement) for B in S.basis), default=0.0)


# Hermitian spanning set of a *-algebra given by an orthonormal basis
def _hermitian_parts(space: OperatorSubspace) -> List[np.ndarray]:
    parts = []
    for C in space.basis:
        parts.append((C + dagger(C)) / 2)
        parts.append((C - dagger(C)) / 2j)
    return parts


# Spectral projection of the lowest eigenvalue cluster of a random Hermitian commutant element
def disconnection_witness(S: OperatorSubspace, comm: OperatorSubspace, seed: int = WITNESS_SEED) -> Projection:
    rng = np.random.default_rng(seed)
    parts = np.stack(_hermitian_parts(comm))
    for attempt in range(WITNESS_ATTEMPTS):
        H = np.tensordot(rng.standard_normal(parts.shape[0]), parts, axes=1)
        w, V = hermitian_eig(H, S.tol)
        spread = w[-1] - w[0]
        if spread <= CLUSTER_GAP_REL * max(hs_norm(H), 1.0):
            continue
        gaps = np.diff(w)
        cluster = int(np.argmax(gaps > CLUSTER_GAP_REL * spread)) + 1
        P = Projection(V[:, :cluster], S.n)
        residual = witness_residual(S, P)
        if residual <= S.tol.residual_abs:
            logger.debug(f"[disconnection_witness] rank {P.rank} witness after {attempt + 1} draw(s), residual {residual:.2e}")
            return P
        logger.debug(f"[disconnection_witness] Draw {attempt + 1} rejected, residual {residual:.2e}")
    raise InconsistencyError("Commutant is nontrivial but no Hermitian element gave a disconnection witness",
                             {"commutant_dim": comm.dim, "attempts": WITNESS_ATTEMPTS})


# === Decisions ===
# Power stabilization and commutant dimension must agree
def is_connected(S: QuantumGraph, seed: int = WITNESS_SEED) -> ConnectivityCertificate:
    algebra, power_m = generated_algebra(S)
    comm = commutant(S)
    by_power = algebra.is_full
    by_commutant = comm.dim == 1
    if by_power != by_commutant:
        details = {"algebra_dim": algebra.dim, "stabilization_power": power_m,
                   "commutant_dim": comm.dim, "n": S.n}
        logger.error(f"[is_connected] Power and commutant tests disagree: {details}")
        raise InconsistencyError("Power stabilization and commutant tests disagree", details)
    if by_power:
        return ConnectivityCertificate(Verdict.CONNECTED, power_m, comm.dim, algebra.dim, S.n)
    witness = disconnection_witness(S, comm, seed)
    return ConnectivityCertificate(Verdict.DISCONNECTED, power_m, comm.dim, algebra.dim, S.n, witness)


# SeparatorReport when (I-P) S (I-P) is disconnected or one-dimensional, else None
def is_separator(S: QuantumGraph, P: Projection) -> Optional[SeparatorReport]:
    if P.n != S.n:
        raise ValidationError(f"Projection lives in M_{P.n}, graph in M_{S.n}")
    if P.rank == S.n:
        raise DegenerateInputError("The identity projection is never a separator")
    compressed = compress(S, P.complement())
    if compressed.dim == 1:
        return SeparatorReport(P, SeparatorMode.ONE_DIMENSIONAL, 1)
    sub = is_connected(compressed.space)
    if sub.connected:
        return None
    Q1 = compressed.lift_projection(sub.witness)
    Q2 = compressed.lift_projection(sub.witness.complement())
    return SeparatorReport(P, SeparatorMode.DISCONNECTION, compressed.dim, sub, (Q1, Q2))


# (True, None) when no candidate of rank < k is a separator, else (False, offending report)
def verify_k_connected_witnesses(S: QuantumGraph, k: int,
                                 candidates: Sequence[Projection]) -> Tuple[bool, Optional[SeparatorReport]]:
    for P in candidates:
        if P.rank >= k:
            continue
        report = is_separator(S, P)
        if report is not None:
            logger.info(f"[verify_k_connected_witnesses] rank-{P.rank} separator refutes {k}-connectedness")
            return False, report
    return True, None


# === Tree Packing ===
class TreePackingResult(NamedTuple):
    total: int
    bound: int
    holds: bool


def validate_partition(parts: Sequence[Projection], n: int, tol: Tolerance = DEFAULT_TOL):
    if not parts:
        raise ValidationError("Partition is empty")
    for i, P in enumerate(parts):
        if P.n != n:
            raise ValidationError(f"parts[{i}] lives in M_{P.n}, expected M_{n}")
        if P.rank == 0:
            raise ValidationError(f"parts[{i}] is the zero projection")
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            overlap = hs_norm(parts[i].matrix @ parts[j].matrix)
            if overlap > tol.residual_abs:
                raise ValidationError(f"parts[{i}] and parts[{j}] are not orthogonal (||P_i P_j|| = {overlap:.3e})")
    total = sum(P.matrix for P in parts)
    gap = hs_norm(total - np.eye(n))
    if gap > tol.residual_abs:
        raise ValidationError(f"Parts do not sum to the identity (residual {gap:.3e})")


# Sum over ordered pairs i != j of dim[P_j S P_i] against the bound 2(m - 1)
def tree_packing_check(S: QuantumGraph, parts: Sequence[Projection]) -> TreePackingResult:
    validate_partition(parts, S.n, S.tol)
    total = 0
    for i, Pi in enumerate(parts):
        for j, Pj in enumerate(parts):
            if i != j:
                total += cross_space(S, Pj, Pi).dim
    bound = 2 * (len(parts) - 1)
    return TreePackingResult(total, bound, total >= bound)


# Two-part partition {P, I - P} from a disconnection witness
def witness_partition(cert: ConnectivityCertificate) -> List[Projection]:
    if cert.witness is None:
        raise ValidationError("Certificate carries no witness")
    return [cert.witness, cert.witness.complement()]
