# qgraph_logic/e_cli/instanceFiles.py - Instance file schemas and the JSON codec for complex matrices
import os
import json
import logging
from numbers import Real
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import numpy as np
from qgraph_logic.a_matrix.matCore import Projection, Tolerance
from qgraph_logic.a_matrix.opSpace import OperatorSubspace, QuantumGraph, make_quantum_graph
from qgraph_logic.c_classical.classicalGraph import ClassicalGraph, ClassicalOrthRep, OrthonormalBasisCn
from qgraph_logic.d_channels.krausMap import KrausMap
from qgraph_logic.qgraphErrors import QGraphError, SchemaError
logger = logging.getLogger(__name__)

KINDS = ("quantum_graph", "classical_graph", "kraus_map", "basis", "partition", "classical_orth_rep")
PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', '..'))
FIXTURE_DIR = os.path.join(PROJECT_ROOT, 'static', 'fixtures')


# === Complex Codec ===
# Complex entries travel as [re, im] pairs
def encode_complex(z: complex) -> List[float]:
    z = complex(z)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def encode_vector(x) -> List[List[float]]:
    return [encode_complex(z) for z in np.asarray(x).reshape(-1)]


def encode_matrix(M) -> List[List[List[float]]]:
    return [encode_vector(row) for row in np.atleast_2d(np.asarray(M))]


def _is_number(x: Any) -> bool:
    return isinstance(x, Real) and not isinstance(x, bool)


def decode_complex(obj: Any, path: str) -> complex:
    if not isinstance(obj, list) or len(obj) != 2 or not all(_is_number(x) for x in obj):
        raise SchemaError("expected a [re, im] pair of numbers", path)
    z = complex(obj[0], obj[1])
    if not np.isfinite(z):
        raise SchemaError("entry is not finite", path)
    return z


def decode_vector(obj: Any, path: str, length: Optional[int] = None) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise SchemaError("expected a nonempty list of [re, im] pairs", path)
    if length is not None and len(obj) != length:
        raise SchemaError(f"expected {length} entries, got {len(obj)}", path)
    return np.array([decode_complex(z, f"{path}[{k}]") for k, z in enumerate(obj)], dtype=np.complex128)


def decode_matrix(obj: Any, path: str, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise SchemaError("expected a nonempty list of rows", path)
    rows = shape[0] if shape else len(obj)
    if len(obj) != rows:
        raise SchemaError(f"expected {rows} rows, got {len(obj)}", path)
    cols = shape[1] if shape else (len(obj[0]) if isinstance(obj[0], list) else None)
    return np.stack([decode_vector(row, f"{path}[{i}]", cols) for i, row in enumerate(obj)])


# === Field Helpers ===
def _require(payload: Dict[str, Any], key: str, path: str) -> Any:
    if not isinstance(payload, dict):
        raise SchemaError("expected an object", path)
    if key not in payload:
        raise SchemaError(f"missing required field '{key}'", path)
    return payload[key]


def _positive_int(value: Any, path: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise SchemaError("expected a positive integer", path)
    return value


def _matrix_list(obj: Any, path: str, shape: Tuple[int, int], allow_empty: bool = False) -> List[np.ndarray]:
    if not isinstance(obj, list) or (not obj and not allow_empty):
        raise SchemaError("expected a list of matrices", path)
    return [decode_matrix(M, f"{path}[{k}]", shape) for k, M in enumerate(obj)]


# === Instance Model ===
class InstanceFile:
    def __init__(self, kind: str, payload: Dict[str, Any], meta: Optional[Dict[str, Any]] = None):
        if kind not in KINDS:
            raise SchemaError(f"unknown kind '{kind}', expected one of {list(KINDS)}", "$.kind")
        self.kind = kind
        self.payload = payload
        self.meta = meta or {}

    def __repr__(self):
        return f"InstanceFile(kind={self.kind}, name={self.meta.get('name')})"

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "payload": self.payload, "meta": self.meta}

    @classmethod
    def from_dict(cls, data: Any) -> "InstanceFile":
        if not isinstance(data, dict):
            raise SchemaError("instance file must be a JSON object", "$")
        kind = _require(data, "kind", "$")
        payload = _require(data, "payload", "$")
        meta = data.get("meta", {})
        if not isinstance(meta, dict):
            raise SchemaError("expected an object", "$.meta")
        return cls(kind, payload, meta)

    # Tolerance override recorded in meta, else the fallback
    def tolerance(self, fallback: Tolerance) -> Tolerance:
        raw = self.meta.get("tolerance")
        if raw is None:
            return fallback
        try:
            return Tolerance(float(raw.get("rank_rel", fallback.rank_rel)),
                             float(raw.get("residual_abs", fallback.residual_abs)))
        except (AttributeError, TypeError, ValueError, QGraphError) as exc:
            raise SchemaError(f"invalid tolerance override: {exc}", "$.meta.tolerance")


# === File I/O ===
def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True)


def load_instance(path: str, expected: Union[str, Sequence[str], None] = None) -> InstanceFile:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON in {path}: {e.msg} (line {e.lineno})", "$")
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e.strerror}", "$")
    inst = InstanceFile.from_dict(data)
    allowed = (expected,) if isinstance(expected, str) else tuple(expected or KINDS)
    if inst.kind not in allowed:
        raise SchemaError(f"expected kind {' or '.join(allowed)}, got '{inst.kind}'", "$.kind")
    logger.debug(f"[load_instance] Loaded {inst} from {path}")
    return inst


def save_instance(inst: InstanceFile, path: str):
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(dumps(inst.to_dict()) + "\n")
    logger.info(f"[save_instance] ✅ Wrote {inst.kind} to {path}")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURE_DIR, name if name.endswith(".json") else f"{name}.json")


# === Payload Parsers ===
# quantum_graph: {"n": n, "generators": [matrix, ...], "strict": bool}
def parse_quantum_graph(inst: InstanceFile, tol: Tolerance) -> QuantumGraph:
    payload = inst.payload
    n = _positive_int(_require(payload, "n", "$.payload"), "$.payload.n")
    generators = _matrix_list(_require(payload, "generators", "$.payload"), "$.payload.generators", (n, n),
                              allow_empty=True)
    strict = bool(payload.get("strict", False))
    return make_quantum_graph(generators, inst.tolerance(tol), strict=strict, n=n)


# classical_graph: {"n": n, "edges": [[i, j], ...]} with 1-indexed vertices
def parse_classical_graph(payload: Any, path: str = "$.payload") -> ClassicalGraph:
    n = _positive_int(_require(payload, "n", path), f"{path}.n")
    edges = _require(payload, "edges", path)
    if not isinstance(edges, list):
        raise SchemaError("expected a list of edges", f"{path}.edges")
    parsed = []
    for k, edge in enumerate(edges):
        where = f"{path}.edges[{k}]"
        if not isinstance(edge, list) or len(edge) != 2 or not all(isinstance(v, int) and not isinstance(v, bool) for v in edge):
            raise SchemaError("expected a pair of vertex numbers", where)
        if not all(1 <= v <= n for v in edge):
            raise SchemaError(f"vertex outside 1..{n}", where)
        if edge[0] == edge[1]:
            raise SchemaError("self-loops are implicit and may not be listed", where)
        parsed.append((edge[0] - 1, edge[1] - 1))
    return ClassicalGraph(n, parsed)


# kraus_map: {"in_dim": n, "out_dim": d, "kraus": [matrix d x n, ...]}
def parse_kraus_map(inst: InstanceFile, tol: Tolerance) -> KrausMap:
    payload = inst.payload
    n = _positive_int(_require(payload, "in_dim", "$.payload"), "$.payload.in_dim")
    d = _positive_int(_require(payload, "out_dim", "$.payload"), "$.payload.out_dim")
    kraus = _matrix_list(_require(payload, "kraus", "$.payload"), "$.payload.kraus", (d, n))
    return KrausMap(kraus, inst.tolerance(tol))


# basis: {"n": n, "vectors": [vector, ...]}
def parse_basis(inst: InstanceFile, tol: Tolerance) -> OrthonormalBasisCn:
    payload = inst.payload
    n = _positive_int(_require(payload, "n", "$.payload"), "$.payload.n")
    vectors = _require(payload, "vectors", "$.payload")
    if not isinstance(vectors, list) or len(vectors) != n:
        raise SchemaError(f"expected {n} vectors", "$.payload.vectors")
    columns = [decode_vector(v, f"$.payload.vectors[{k}]", n) for k, v in enumerate(vectors)]
    return OrthonormalBasisCn(np.stack(columns, axis=1), inst.tolerance(tol))


# partition: {"n": n, "vertex_sets": [[1, 2], [3]]} or {"n": n, "projections": [matrix, ...]}
def parse_partition(inst: InstanceFile, tol: Tolerance) -> Tuple[Optional[List[List[int]]], List[Projection]]:
    payload = inst.payload
    n = _positive_int(_require(payload, "n", "$.payload"), "$.payload.n")
    if "vertex_sets" in payload:
        sets = payload["vertex_sets"]
        if not isinstance(sets, list) or not sets:
            raise SchemaError("expected a nonempty list of vertex sets", "$.payload.vertex_sets")
        parts = []
        for k, part in enumerate(sets):
            where = f"$.payload.vertex_sets[{k}]"
            if not isinstance(part, list) or not all(isinstance(v, int) and not isinstance(v, bool) and 1 <= v <= n for v in part):
                raise SchemaError(f"expected a list of vertices in 1..{n}", where)
            parts.append([v - 1 for v in part])
        projections = [Projection.coordinate(n, part) for part in parts]
        return parts, projections
    mats = _matrix_list(_require(payload, "projections", "$.payload"), "$.payload.projections", (n, n))
    projections = []
    for k, M in enumerate(mats):
        try:
            projections.append(Projection.from_matrix(M, inst.tolerance(tol)))
        except QGraphError as exc:
            raise SchemaError(str(exc), f"$.payload.projections[{k}]")
    return None, projections


# classical_orth_rep: {"graph": {...}, "d": d, "vectors": [vector of length d, ...]}
def parse_orth_rep(inst: InstanceFile) -> Tuple[ClassicalGraph, ClassicalOrthRep]:
    payload = inst.payload
    G = parse_classical_graph(_require(payload, "graph", "$.payload"), "$.payload.graph")
    d = _positive_int(_require(payload, "d", "$.payload"), "$.payload.d")
    vectors = _require(payload, "vectors", "$.payload")
    if not isinstance(vectors, list) or len(vectors) != G.n:
        raise SchemaError(f"expected {G.n} vectors", "$.payload.vectors")
    rows = [decode_vector(v, f"$.payload.vectors[{k}]", d) for k, v in enumerate(vectors)]
    return G, ClassicalOrthRep(d, rows)


# === Instance Builders ===
def quantum_graph_instance(S: OperatorSubspace, meta: Optional[Dict[str, Any]] = None) -> InstanceFile:
    return InstanceFile("quantum_graph", {"n": S.n, "generators": [encode_matrix(B) for B in S.basis]}, meta)


def classical_graph_payload(G: ClassicalGraph) -> Dict[str, Any]:
    return {"n": G.n, "edges": [[i + 1, j + 1] for i, j in sorted(G.edges)]}


def classical_graph_instance(G: ClassicalGraph, meta: Optional[Dict[str, Any]] = None) -> InstanceFile:
    return InstanceFile("classical_graph", classical_graph_payload(G), meta)


def kraus_instance(phi: KrausMap, meta: Optional[Dict[str, Any]] = None) -> InstanceFile:
    payload = {"in_dim": phi.in_dim, "out_dim": phi.out_dim, "kraus": [encode_matrix(K) for K in phi.kraus]}
    return InstanceFile("kraus_map", payload, meta)


def basis_instance(v: OrthonormalBasisCn, meta: Optional[Dict[str, Any]] = None) -> InstanceFile:
    return InstanceFile("basis", {"n": v.n, "vectors": [encode_vector(v.vector(k)) for k in range(v.n)]}, meta)


def orth_rep_instance(G: ClassicalGraph, f: ClassicalOrthRep, meta: Optional[Dict[str, Any]] = None) -> InstanceFile:
    payload = {"graph": classical_graph_payload(G), "d": f.d, "vectors": [encode_vector(f[i]) for i in range(f.n)]}
    return InstanceFile("classical_orth_rep", payload, meta)


def partition_instance(n: int, vertex_sets: Sequence[Sequence[int]], meta: Optional[Dict[str, Any]] = None) -> InstanceFile:
    return InstanceFile("partition", {"n": n, "vertex_sets": [[v + 1 for v in sorted(part)] for part in vertex_sets]}, meta)
