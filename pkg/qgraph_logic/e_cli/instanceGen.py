# qgraph_logic/e_cli/instanceGen.py - Seeded random instances: graphs, bases, channels and operator systems
import zlib
import logging
from typing import Any, Dict, Optional, Sequence
import networkx as nx
import numpy as np
from qgraph_logic.a_matrix.matCore import DEFAULT_TOL, Tolerance, haar_unitary, random_complex_matrix
from qgraph_logic.a_matrix.opSpace import QuantumGraph, hamming_cube, make_quantum_graph
from qgraph_logic.c_classical.classicalGraph import ClassicalGraph, OrthonormalBasisCn
from qgraph_logic.d_channels.krausMap import KrausMap, random_stinespring_channel
from qgraph_logic.e_cli.instanceFiles import (
    InstanceFile, basis_instance, classical_graph_instance, kraus_instance, quantum_graph_instance)
from qgraph_logic.qgraphErrors import ValidationError
logger = logging.getLogger(__name__)

GENERATOR_KINDS = ("gnp", "operator_system", "haar_basis", "channel", "hamming")


# === Seed Streams ===
# One independent stream per purpose name, all derived from the root seed
def named_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([int(seed), zlib.crc32(name.encode("utf-8"))])


# === Generators ===
def random_classical_graph(n: int, p: float, rng: np.random.Generator) -> ClassicalGraph:
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"Edge probability must lie in [0, 1], got {p}")
    seed = int(rng.integers(0, 2 ** 31 - 1))
    return ClassicalGraph.from_networkx(nx.gnp_random_graph(n, p, seed=seed))


# Span{I, G_k, G_k^dagger}; rank-limited generators keep the span small, blocks force disconnection
def random_operator_system(n: int, count: int, rng: np.random.Generator, rank: Optional[int] = None,
                           blocks: Optional[Sequence[int]] = None, tol: Tolerance = DEFAULT_TOL) -> QuantumGraph:
    if count < 0:
        raise ValidationError(f"Generator count must be nonnegative, got {count}")
    if blocks is not None and sum(blocks) != n:
        raise ValidationError(f"Block sizes {list(blocks)} do not add up to n={n}")
    r = n if rank is None else max(1, min(rank, n))
    generators = []
    for _ in range(count):
        G = random_complex_matrix(n, r, rng) @ random_complex_matrix(r, n, rng)
        if blocks is not None:
            mask = np.zeros((n, n), dtype=bool)
            start = 0
            for size in blocks:
                mask[start:start + size, start:start + size] = True
                start += size
            G = np.where(mask, G, 0)
        generators.append(G)
    if blocks is not None:
        U = haar_unitary(n, rng)
        generators = [U @ G @ U.conj().T for G in generators]
    return make_quantum_graph(generators, tol, n=n)


def random_basis(n: int, rng: np.random.Generator) -> OrthonormalBasisCn:
    return OrthonormalBasisCn.haar(n, rng)


def random_channel(n: int, d: int, k: int, rng: np.random.Generator, tol: Tolerance = DEFAULT_TOL) -> KrausMap:
    return random_stinespring_channel(n, d, k, rng, tol)


# === Instance Files ===
# Builds one instance of the named generator kind and records how it was made
def generate_instance(kind: str, seed: int, params: Dict[str, Any], tol: Tolerance = DEFAULT_TOL) -> InstanceFile:
    if kind not in GENERATOR_KINDS:
        raise ValidationError(f"Unknown generator '{kind}', expected one of {list(GENERATOR_KINDS)}")
    rng = named_rng(seed, f"generate/{kind}")
    n = int(params.get("n", 2))
    meta = {"name": kind, "seed": int(seed), "params": dict(sorted(params.items()))}
    if kind == "gnp":
        inst = classical_graph_instance(random_classical_graph(n, float(params.get("p", 0.5)), rng), meta)
    elif kind == "operator_system":
        S = random_operator_system(n, int(params.get("count", 2)), rng, params.get("rank"), params.get("blocks"), tol)
        inst = quantum_graph_instance(S, meta)
    elif kind == "haar_basis":
        inst = basis_instance(random_basis(n, rng), meta)
    elif kind == "channel":
        phi = random_channel(n, int(params.get("d", n)), int(params.get("k", 2)), rng, tol)
        inst = kraus_instance(phi, meta)
    else:
        inst = quantum_graph_instance(hamming_cube(int(params.get("m", 2)), tol), meta)
    logger.info(f"[generate_instance] Generated {inst.kind} via {kind} (seed={seed})")
    return inst
