# qgraph_logic/d_channels/krausMap.py - Completely positive maps in Kraus form, Choi matrices and channel confusability graphs
import logging
from typing import List, Sequence
import numpy as np
import scipy.linalg as linalg
from qgraph_logic.a_matrix.matCore import (
    DEFAULT_TOL, Tolerance, as_matrix, check_ambient_dim, dagger, haar_unitary, hs_norm)
from qgraph_logic.a_matrix.opSpace import OperatorSubspace, QuantumGraph, matrix_unit
from qgraph_logic.qgraphErrors import DimensionError, ValidationError
logger = logging.getLogger(__name__)


# === Kraus Model ===
class KrausMap:
    """Phi(rho) = sum_i K_i rho K_i^dagger with K_i of shape (out_dim, in_dim)."""

    def __init__(self, kraus: Sequence, tol: Tolerance = DEFAULT_TOL):
        if len(kraus) == 0:
            raise ValidationError("Kraus map needs at least one operator")
        mats = [as_matrix(K, f"kraus[{i}]") for i, K in enumerate(kraus)]
        shape = mats[0].shape
        for i, K in enumerate(mats):
            if K.shape != shape:
                raise DimensionError(f"kraus[{i}] has shape {K.shape}, expected {shape}")
        self.out_dim, self.in_dim = shape
        check_ambient_dim(self.in_dim)
        self.kraus = np.stack(mats)
        self.kraus.flags.writeable = False
        self.tol = tol
        self.trace_preserving = self.trace_defect() <= tol.residual_abs

    def __repr__(self):
        return f"KrausMap(in_dim={self.in_dim}, out_dim={self.out_dim}, ops={len(self)}, tp={self.trace_preserving})"

    def __len__(self):
        return int(self.kraus.shape[0])

    # ||sum K_i^dagger K_i - I_n||
    def trace_defect(self) -> float:
        gram = np.einsum("kai,kaj->ij", self.kraus.conj(), self.kraus)
        return hs_norm(gram - np.eye(self.in_dim))

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)


# === Action ===
def apply(phi: KrausMap, rho) -> np.ndarray:
    rho = as_matrix(rho, "rho")
    if rho.shape != (phi.in_dim, phi.in_dim):
        raise DimensionError(f"apply: input has shape {rho.shape}, map expects {(phi.in_dim, phi.in_dim)}")
    return np.einsum("kai,ij,kbj->ab", phi.kraus, rho, phi.kraus.conj())


# Largest deviation between two maps over all n^2 matrix units
def max_unit_deviation(phi: KrausMap, psi: KrausMap) -> float:
    if (phi.in_dim, phi.out_dim) != (psi.in_dim, psi.out_dim):
        raise DimensionError("max_unit_deviation: maps have different shapes")
    n = phi.in_dim
    return max(hs_norm(apply(phi, matrix_unit(n, i, j)) - apply(psi, matrix_unit(n, i, j)))
               for i in range(n) for j in range(n))


# === Choi Form ===
# C = sum_ij |e_i><e_j| (x) Phi(|e_i><e_j|); row index is i * d + a
def choi(phi: KrausMap) -> np.ndarray:
    W = np.swapaxes(phi.kraus, 1, 2).reshape(len(phi), -1)
    return W.T @ W.conj()


# Spectral factorization of a Choi matrix back into Kraus operators
def kraus_from_choi(C, in_dim: int, out_dim: int, tol: Tolerance = DEFAULT_TOL) -> KrausMap:
    C = as_matrix(C, "choi")
    size = in_dim * out_dim
    if C.shape != (size, size):
        raise DimensionError(f"Choi matrix has shape {C.shape}, expected {(size, size)}")
    scale = max(hs_norm(C), 1.0)
    if hs_norm(C - dagger(C)) > tol.residual_abs * scale:
        raise ValidationError("Choi matrix is not Hermitian")
    w, V = linalg.eigh((C + dagger(C)) / 2)
    if w[0] < -tol.residual_abs * scale:
        raise ValidationError(f"Choi matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    keep = w > tol.rank_rel * max(float(w[-1]), 1.0)
    if not np.any(keep):
        logger.warning("[kraus_from_choi] Choi matrix is numerically zero, returning the zero map")
        return KrausMap([np.zeros((out_dim, in_dim))], tol)
    kraus = [np.sqrt(lam) * vec.reshape(in_dim, out_dim).T for lam, vec in zip(w[keep], V[:, keep].T)]
    return KrausMap(kraus[::-1], tol)


# === Confusability ===
# span{K_i^dagger K_j}, required to be a quantum graph
def channel_confusability(phi: KrausMap) -> QuantumGraph:
    if not phi.trace_preserving:
        raise ValidationError(f"channel_confusability needs a trace-preserving map (defect {phi.trace_defect():.3e})")
    products = np.einsum("iab,jac->ijbc", phi.kraus.conj(), phi.kraus).reshape(-1, phi.in_dim, phi.in_dim)
    space = OperatorSubspace.from_generators(list(products), phi.in_dim, phi.tol)
    return QuantumGraph.from_subspace(space)


# === Standard Maps ===
def identity_map(n: int, tol: Tolerance = DEFAULT_TOL) -> KrausMap:
    return KrausMap([np.eye(n)], tol)


def dephasing_map(n: int, tol: Tolerance = DEFAULT_TOL) -> KrausMap:
    return KrausMap([matrix_unit(n, i, i) for i in range(n)], tol)


# Kraus {|e_i><e_j| / sqrt(n)}: rho -> tr(rho) I_n / n
def depolarizing_map(n: int, tol: Tolerance = DEFAULT_TOL) -> KrausMap:
    return KrausMap([matrix_unit(n, i, j) / np.sqrt(n) for i in range(n) for j in range(n)], tol)


# Kraus {<e_i|}: rho -> tr(rho) in M_1
def trace_map(n: int, tol: Tolerance = DEFAULT_TOL) -> KrausMap:
    return KrausMap([np.eye(n)[i:i + 1] for i in range(n)], tol)


# Haar isometry C^n -> C^d (x) C^k read as k Kraus operators of shape d x n
def random_stinespring_channel(n: int, d: int, k: int, rng: np.random.Generator,
                               tol: Tolerance = DEFAULT_TOL) -> KrausMap:
    if d * k < n:
        raise DimensionError(f"Stinespring isometry needs d*k >= n, got d={d}, k={k}, n={n}")
    V = haar_unitary(d * k, rng)[:, :n].reshape(d, k, n)
    kraus: List[np.ndarray] = [V[:, j, :] for j in range(k)]
    return KrausMap(kraus, tol)
