# qgraph_logic/c_classical/classicalGraph.py - Classical graphs, S_G lifting, confusability graphs and orthogonal representations
import logging
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple
import networkx as nx
import numpy as np
from qgraph_logic.a_matrix.matCore import (
    DEFAULT_TOL, Projection, Tolerance, as_matrix, dagger, haar_unitary, hs_norm, numerical_rank)
from qgraph_logic.a_matrix.opSpace import QuantumGraph, matrix_unit
from qgraph_logic.qgraphErrors import DegenerateInputError, DimensionError, ValidationError
logger = logging.getLogger(__name__)

# Vertex-cut enumeration is exhaustive up to this many vertices; networkx flows above
EXHAUSTIVE_CUT_LIMIT = 12


# === Graph Model ===
class ClassicalGraph:
    """Simple undirected graph on vertices 0..n-1; loops are implicit and never stored."""

    def __init__(self, n: int, edges: Iterable[Tuple[int, int]] = ()):
        if n < 1:
            raise DimensionError(f"Graph needs at least one vertex, got n={n}")
        self.n = int(n)
        normalized = set()
        for edge in edges:
            i, j = (int(x) for x in edge)
            if not (0 <= i < n and 0 <= j < n):
                raise ValidationError(f"Edge {edge} has an endpoint outside 0..{n - 1}")
            if i != j:
                normalized.add((min(i, j), max(i, j)))
        self.edges: FrozenSet[Tuple[int, int]] = frozenset(normalized)

    def __repr__(self):
        return f"ClassicalGraph(n={self.n}, edges={sorted(self.edges)})"

    def __eq__(self, other):
        return isinstance(other, ClassicalGraph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def adjacent(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def neighbors(self, i: int) -> List[int]:
        return [j for j in range(self.n) if j != i and self.adjacent(i, j)]

    def is_complete(self) -> bool:
        return len(self.edges) == self.n * (self.n - 1) // 2

    def to_networkx(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(range(self.n))
        G.add_edges_from(self.edges)
        return G

    # Relabels nodes to 0..n-1 in sorted order
    @classmethod
    def from_networkx(cls, G: nx.Graph) -> "ClassicalGraph":
        index = {node: k for k, node in enumerate(sorted(G.nodes()))}
        return cls(len(index), [(index[a], index[b]) for a, b in G.edges()])

    @classmethod
    def complete(cls, n: int) -> "ClassicalGraph":
        return cls(n, combinations(range(n), 2))

    @classmethod
    def empty(cls, n: int) -> "ClassicalGraph":
        return cls(n)

    @classmethod
    def path(cls, n: int) -> "ClassicalGraph":
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def cycle(cls, n: int) -> "ClassicalGraph":
        return cls(n, [(i, (i + 1) % n) for i in range(n)])


class OrthonormalBasisCn:
    """Orthonormal basis of C^n stored as the columns of a unitary matrix."""

    def __init__(self, vectors, tol: Tolerance = DEFAULT_TOL):
        V = as_matrix(vectors, "basis")
        n = V.shape[0]
        if V.shape != (n, n):
            raise DimensionError(f"Basis needs n vectors of length n, got shape {V.shape}")
        gram_gap = hs_norm(dagger(V) @ V - np.eye(n))
        if gram_gap > tol.residual_abs:
            raise ValidationError(f"Basis vectors are not orthonormal (Gram residual {gram_gap:.3e})")
        self.n = n
        self.vectors = V.copy()
        self.vectors.flags.writeable = False

    def __repr__(self):
        return f"OrthonormalBasisCn(n={self.n})"

    def vector(self, k: int) -> np.ndarray:
        return self.vectors[:, k]

    @classmethod
    def standard(cls, n: int) -> "OrthonormalBasisCn":
        return cls(np.eye(n, dtype=np.complex128))

    @classmethod
    def haar(cls, n: int, rng: np.random.Generator) -> "OrthonormalBasisCn":
        return cls(haar_unitary(n, rng))

    # First rank(P) vectors span range(P), the rest span its complement
    @classmethod
    def aligned_with(cls, P: Projection) -> "OrthonormalBasisCn":
        return cls(np.hstack([P.range_basis, P.complement().range_basis]))


class ClassicalOrthRep:
    """Vertex i -> nonzero vector f(i) in C^d, stored as rows of an n x d array."""

    def __init__(self, d: int, assignment):
        if isinstance(assignment, dict):
            rows = [assignment[i] for i in sorted(assignment)]
        else:
            rows = list(assignment)
        F = np.asarray(rows, dtype=np.complex128)
        if F.ndim != 2 or F.shape[1] != d:
            raise DimensionError(f"Orthogonal representation vectors must have length d={d}, got shape {F.shape}")
        if not np.all(np.isfinite(F)):
            raise ValidationError("Orthogonal representation contains NaN or Inf entries")
        self.d = int(d)
        self.vectors = F

    def __repr__(self):
        return f"ClassicalOrthRep(n={self.n}, d={self.d})"

    @property
    def n(self) -> int:
        return int(self.vectors.shape[0])

    def __getitem__(self, i: int) -> np.ndarray:
        return self.vectors[i]


# === Lifting and Confusability ===
# S_G = span{|e_i><e_j| : i = j or i ~ j}
def lift(G: ClassicalGraph, tol: Tolerance = DEFAULT_TOL) -> QuantumGraph:
    units = [matrix_unit(G.n, i, i) for i in range(G.n)]
    for i, j in sorted(G.edges):
        units.append(matrix_unit(G.n, i, j))
        units.append(matrix_unit(G.n, j, i))
    return QuantumGraph(np.stack(units), G.n, tol)


# i ~ j when some basis element has a coefficient above residual_abs at (v_i, v_j)
def confusability(S: QuantumGraph, v: OrthonormalBasisCn) -> ClassicalGraph:
    if v.n != S.n:
        raise DimensionError(f"Basis lives in C^{v.n}, graph in M_{S.n}")
    V = v.vectors
    coeffs = np.abs(dagger(V)[None] @ S.basis @ V[None]).max(axis=0)
    strength = np.maximum(coeffs, coeffs.T)
    edges = [(i, j) for i, j in combinations(range(S.n), 2) if strength[i, j] > S.tol.residual_abs]
    return ClassicalGraph(S.n, edges)


# === Connectivity Oracles ===
def classical_connected(G: ClassicalGraph) -> bool:
    return nx.is_connected(G.to_networkx())


def _disconnects(G: nx.Graph, removed: Sequence[int]) -> bool:
    gone = set(removed)
    rest = G.subgraph(v for v in G.nodes if v not in gone)
    return rest.number_of_nodes() >= 2 and not nx.is_connected(rest)


# Minimum size of a vertex set whose removal disconnects G or leaves one vertex
def classical_vertex_connectivity(G: ClassicalGraph) -> int:
    if G.n < 2:
        raise DegenerateInputError("Vertex connectivity needs at least two vertices")
    if G.is_complete():
        return G.n - 1
    graph = G.to_networkx()
    if G.n > EXHAUSTIVE_CUT_LIMIT:
        return int(nx.node_connectivity(graph))
    for size in range(G.n - 1):
        if any(_disconnects(graph, cut) for cut in combinations(range(G.n), size)):
            return size
    return G.n - 1


# Every vertex cut of minimum size; for K_n these are the (n-1)-sets leaving one vertex
def minimum_vertex_cuts(G: ClassicalGraph) -> List[FrozenSet[int]]:
    kappa = classical_vertex_connectivity(G)
    if G.is_complete():
        return [frozenset(c) for c in combinations(range(G.n), G.n - 1)]
    graph = G.to_networkx()
    if kappa == 0:
        return [frozenset()]
    if G.n > EXHAUSTIVE_CUT_LIMIT:
        cuts = {frozenset(c) for c in nx.all_node_cuts(graph, k=kappa)}
    else:
        cuts = {frozenset(c) for c in combinations(range(G.n), kappa) if _disconnects(graph, c)}
    return sorted(cuts, key=sorted)


def classical_is_k_connected(G: ClassicalGraph, k: int) -> bool:
    return classical_vertex_connectivity(G) >= k


# === Tree Packing Base Case ===
class CrossEdgeCount(NamedTuple):
    cross_edges: int
    holds: bool


def classical_tree_packing_base(G: ClassicalGraph, partition: Sequence[Iterable[int]]) -> CrossEdgeCount:
    parts = [frozenset(int(v) for v in part) for part in partition]
    if any(not part for part in parts):
        raise ValidationError("Partition has an empty part")
    seen: Dict[int, int] = {}
    for k, part in enumerate(parts):
        for v in part:
            if not 0 <= v < G.n:
                raise ValidationError(f"Vertex {v} outside 0..{G.n - 1}")
            if v in seen:
                raise ValidationError(f"Vertex {v} appears in parts {seen[v]} and {k}")
            seen[v] = k
    if len(seen) != G.n:
        raise ValidationError(f"Partition covers {len(seen)} of {G.n} vertices")
    crossing = sum(1 for i, j in G.edges if seen[i] != seen[j])
    return CrossEdgeCount(crossing, crossing >= len(parts) - 1)


# === Orthogonal Representations ===
class OrthRepValidation(NamedTuple):
    valid: bool
    locally_general_position: bool
    general_position: Optional[bool]
    violations: List[Tuple[int, int, float]]


def _general_position(F: np.ndarray, tol: Tolerance) -> Optional[bool]:
    n, d = F.shape
    if n > EXHAUSTIVE_CUT_LIMIT:
        return None
    size = min(n, d)
    return all(numerical_rank(F[list(rows)].T, tol) == size for rows in combinations(range(n), size))


# Orthogonality on non-adjacent pairs, plus LGP and general-position flags
def validate_orth_rep(G: ClassicalGraph, f: ClassicalOrthRep, tol: Tolerance = DEFAULT_TOL) -> OrthRepValidation:
    if f.n != G.n:
        raise DimensionError(f"Representation covers {f.n} vertices, graph has {G.n}")
    F = f.vectors
    norms = np.linalg.norm(F, axis=1)
    for i, norm in enumerate(norms):
        if norm <= tol.residual_abs:
            raise ValidationError(f"Vertex {i} is assigned the zero vector")
    violations = []
    for i, j in combinations(range(G.n), 2):
        if G.adjacent(i, j):
            continue
        overlap = abs(np.vdot(F[i], F[j]))
        if overlap > tol.residual_abs * norms[i] * norms[j]:
            violations.append((i, j, float(overlap)))
    lgp = True
    for i in range(G.n):
        others = [j for j in range(G.n) if j != i and not G.adjacent(i, j)]
        if others and numerical_rank(F[others].T, tol) != len(others):
            lgp = False
            break
    if violations:
        logger.debug(f"[validate_orth_rep] {len(violations)} non-adjacent pair(s) not orthogonal")
    return OrthRepValidation(not violations, lgp, _general_position(F, tol), violations)


# Projection onto span{v_k : k in vertices} for a basis v
def cut_projection(basis: OrthonormalBasisCn, vertices: Iterable[int]) -> Projection:
    idx = sorted(set(int(k) for k in vertices))
    return Projection(basis.vectors[:, idx], basis.n)
