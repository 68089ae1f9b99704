# qgraph_logic/e_cli/reportWriter.py - Self-checking JSON reports: serializers for results and certificate re-verification
import logging
from typing import Any, Callable, Dict, List, Optional, Tuple
import numpy as np
from qgraph_logic.a_matrix.matCore import Projection, Tolerance, hs_norm, numerical_rank
from qgraph_logic.a_matrix.opSpace import is_operator_system
from qgraph_logic.b_connect.connectDecide import (
    ConnectivityCertificate, SeparatorMode, SeparatorReport, Verdict, is_separator, tree_packing_check)
from qgraph_logic.b_connect.separatorSearch import ConnectivityBounds, MaximalResult
from qgraph_logic.c_classical.classicalGraph import confusability, validate_orth_rep
from qgraph_logic.d_channels.krausMap import apply
from qgraph_logic.d_channels.orthRep import (
    LgpBound, LgpReport, OrthRepReport, annihilation_residual, cstar_residual)
from qgraph_logic.e_cli.instanceFiles import (
    InstanceFile, decode_matrix, decode_vector, dumps, encode_matrix, encode_vector, parse_basis,
    parse_classical_graph, parse_kraus_map, parse_orth_rep, parse_quantum_graph)
from qgraph_logic.qgraphErrors import QGraphError, SchemaError
logger = logging.getLogger(__name__)

REPORT_FORMAT = "qgraph-report/1"


# === Serializers ===
def projection_to_dict(P: Projection) -> Dict[str, Any]:
    return {"n": P.n, "rank": P.rank, "matrix": encode_matrix(P.matrix)}


def certificate_to_dict(cert: ConnectivityCertificate) -> Dict[str, Any]:
    return {
        "verdict": cert.verdict.value,
        "stabilization_power": int(cert.stabilization_power),
        "commutant_dim": int(cert.commutant_dim),
        "algebra_dim": int(cert.algebra_dim),
        "n": int(cert.n),
        "witness": projection_to_dict(cert.witness) if cert.witness is not None else None,
    }


def separator_to_dict(report: Optional[SeparatorReport]) -> Optional[Dict[str, Any]]:
    if report is None:
        return None
    data = {"rank": report.rank, "mode": report.mode.value, "compressed_dim": int(report.compressed_dim),
            "separator": projection_to_dict(report.separator)}
    if report.blocks is not None:
        data["blocks"] = [projection_to_dict(Q) for Q in report.blocks]
    return data


def maximal_to_dict(result: Optional[MaximalResult]) -> Optional[Dict[str, Any]]:
    if result is None:
        return None
    data = {"verdict": result.verdict.value, "sigma_min": float(result.sigma_min), "exact": result.exact,
            "starts": int(result.starts)}
    if result.u is not None:
        data["u"] = encode_vector(result.u)
        data["v"] = encode_vector(result.v)
        data["separator"] = separator_to_dict(result.separator)
    return data


def bounds_to_dict(bounds: ConnectivityBounds) -> Dict[str, Any]:
    return {
        "lower": int(bounds.lower),
        "upper": int(bounds.upper),
        "exact": bounds.exact,
        "is_m_n": bounds.is_m_n,
        "lower_heuristic": bounds.lower_heuristic,
        "lower_conditional": bounds.lower_conditional,
        "best_separator": separator_to_dict(bounds.best_separator),
        "maximal": maximal_to_dict(bounds.maximal),
        "method_log": [{k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in entry.items()}
                       for entry in bounds.method_log],
    }


def orth_report_to_dict(report: OrthRepReport) -> Dict[str, Any]:
    return {
        "verdict": report.verdict.value,
        "pairs_tested": int(report.pairs_tested),
        "borderline": int(report.borderline),
        "violations": [{"A": encode_matrix(v.A), "B": encode_matrix(v.B), "product": v.product,
                        "residual": float(v.residual)} for v in report.violations],
    }


def lgp_report_to_dict(report: LgpReport) -> Dict[str, Any]:
    data = {"verdict": report.verdict.value, "projections_tested": int(report.tested)}
    if report.violation is not None:
        Q, P = report.violation
        data["violation"] = {"Q": encode_matrix(Q), "P": projection_to_dict(P)}
    return data


def lgp_bound_to_dict(bound: Optional[LgpBound]) -> Optional[Dict[str, Any]]:
    if bound is None:
        return None
    return {"bound": int(bound.bound), "conditional": bound.conditional,
            "orth_rep": orth_report_to_dict(bound.orth_report), "lgp": lgp_report_to_dict(bound.lgp_report)}


# === Report Model ===
class Report:
    """Command echo, results, certificates and the embedded instances they refer to."""

    def __init__(self, command: str, args: Dict[str, Any], tol: Tolerance, seed: Optional[int] = None):
        self.command = command
        self.args = {k: v for k, v in sorted(args.items()) if v is not None}
        self.tol = tol
        self.seed = seed
        self.inputs: Dict[str, Dict[str, Any]] = {}
        self.outputs: Dict[str, Dict[str, Any]] = {}
        self.results: Dict[str, Any] = {}
        self.certificates: List[Dict[str, Any]] = []
        self.summary: List[str] = []
        self.negative = False

    def __repr__(self):
        return f"Report({self.command}, certificates={len(self.certificates)}, negative={self.negative})"

    def add_input(self, name: str, inst: InstanceFile):
        self.inputs[name] = inst.to_dict()

    def add_output(self, name: str, inst: InstanceFile):
        self.outputs[name] = inst.to_dict()

    def add_certificate(self, kind: str, subject: str, body: Dict[str, Any], **refs: str):
        self.certificates.append({"type": kind, "subject": subject, **refs, "body": body})

    def note(self, line: str):
        self.summary.append(line)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "format": REPORT_FORMAT,
            "command": {"name": self.command, "args": self.args},
            "seed": self.seed,
            "tolerance": self.tol.to_dict(),
            "inputs": self.inputs,
            "outputs": self.outputs,
            "results": self.results,
            "certificates": self.certificates,
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict()) + "\n"


# === Re-verification ===
class _Resolver:
    """Rebuilds embedded instances on demand under the report's tolerance."""

    def __init__(self, data: Dict[str, Any], tol: Tolerance):
        self.tol = tol
        self.instances = {**data.get("inputs", {}), **data.get("outputs", {})}
        self._cache: Dict[str, Any] = {}

    def instance(self, name: str) -> InstanceFile:
        if name not in self.instances:
            raise SchemaError(f"certificate refers to unknown instance '{name}'", "$.certificates")
        return InstanceFile.from_dict(self.instances[name])

    def get(self, name: str):
        if name not in self._cache:
            inst = self.instance(name)
            parsers: Dict[str, Callable[[InstanceFile], Any]] = {
                "quantum_graph": lambda i: parse_quantum_graph(i, self.tol),
                "kraus_map": lambda i: parse_kraus_map(i, self.tol),
                "basis": lambda i: parse_basis(i, self.tol),
                "classical_graph": lambda i: parse_classical_graph(i.payload),
                "classical_orth_rep": parse_orth_rep,
            }
            if inst.kind not in parsers:
                raise SchemaError(f"instance '{name}' of kind {inst.kind} cannot be a certificate subject", "$")
            self._cache[name] = parsers[inst.kind](inst)
        return self._cache[name]

    def projection(self, data: Dict[str, Any], path: str) -> Projection:
        n = int(data["n"])
        return Projection.from_matrix(decode_matrix(data["matrix"], f"{path}.matrix", (n, n)), self.tol)


def _verify_connectivity(cert: Dict[str, Any], ctx: _Resolver) -> bool:
    S = ctx.get(cert["subject"])
    body = cert["body"]
    witness = ctx.projection(body["witness"], "$.body.witness") if body.get("witness") else None
    again = ConnectivityCertificate(Verdict(body["verdict"]), body["stabilization_power"], body["commutant_dim"],
                                    body["algebra_dim"], body["n"], witness)
    return again.verify(S, ctx.tol)


def _verify_separator(cert: Dict[str, Any], ctx: _Resolver) -> bool:
    S = ctx.get(cert["subject"])
    body = cert["body"]
    P = ctx.projection(body["separator"], "$.body.separator")
    if P.rank != body["rank"]:
        return False
    report = SeparatorReport(P, SeparatorMode(body["mode"]), body["compressed_dim"])
    return report.verify(S, ctx.tol)


# <u|B|v> = 0 on the basis, and I - |u><u| - |v><v| separates
def _verify_annihilating_vectors(cert: Dict[str, Any], ctx: _Resolver) -> bool:
    S = ctx.get(cert["subject"])
    u = decode_vector(cert["body"]["u"], "$.body.u", S.n)
    v = decode_vector(cert["body"]["v"], "$.body.v", S.n)
    u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
    if abs(np.vdot(u, v)) > ctx.tol.residual_abs:
        return False
    if max(abs(np.vdot(u, B @ v)) for B in S.basis) > ctx.tol.residual_abs:
        return False
    P = Projection(np.stack([u, v], axis=1), S.n).complement()
    return is_separator(S, P) is not None


def _verify_tree_packing(cert: Dict[str, Any], ctx: _Resolver) -> bool:
    S = ctx.get(cert["subject"])
    parts = [ctx.projection(p, f"$.body.parts[{k}]") for k, p in enumerate(cert["body"]["parts"])]
    result = tree_packing_check(S, parts)
    return result.total == cert["body"]["total"] and result.holds == cert["body"]["holds"]


def _verify_operator_system(cert: Dict[str, Any], ctx: _Resolver) -> bool:
    S = ctx.get(cert["subject"])
    ok, _ = is_operator_system(S)
    return ok and S.dim == cert["body"]["dim"]


def _verify_confusability(cert: Dict[str, Any], ctx: _Resolver) -> bool:
    S = ctx.get(cert["subject"])
    return confusability(S, ctx.get(cert["basis"])) == ctx.get(cert["graph"])


# Pair annihilated by S whose images under Phi fail C*-orthogonality
def _verify_orth_rep_violation(cert: Dict[str, Any], ctx: _Resolver) -> bool:
    S, phi = ctx.get(cert["subject"]), ctx.get(cert["map"])
    A = decode_matrix(cert["body"]["A"], "$.body.A", (S.n, S.n))
    B = decode_matrix(cert["body"]["B"], "$.body.B", (S.n, S.n))
    if annihilation_residual(S, A, B) > ctx.tol.residual_abs:
        return False
    X, Y = apply(phi, A / hs_norm(A)), apply(phi, B / hs_norm(B))
    return cstar_residual(X, Y) > ctx.tol.residual_abs


# Q S P = 0 but rank Phi(P) < rank P
def _verify_lgp_violation(cert: Dict[str, Any], ctx: _Resolver) -> bool:
    S, phi = ctx.get(cert["subject"]), ctx.get(cert["map"])
    Q = decode_matrix(cert["body"]["Q"], "$.body.Q", (S.n, S.n))
    P = ctx.projection(cert["body"]["P"], "$.body.P")
    if max(hs_norm(Q @ B @ P.matrix) for B in S.basis) > ctx.tol.residual_abs:
        return False
    return numerical_rank(apply(phi, P.matrix), ctx.tol) < P.rank


def _verify_classical_orth_rep(cert: Dict[str, Any], ctx: _Resolver) -> bool:
    G, f = ctx.get(cert["subject"])
    return validate_orth_rep(G, f, ctx.tol).valid


VERIFIERS: Dict[str, Callable[[Dict[str, Any], _Resolver], bool]] = {
    "connectivity": _verify_connectivity,
    "separator": _verify_separator,
    "annihilating_vectors": _verify_annihilating_vectors,
    "tree_packing": _verify_tree_packing,
    "operator_system": _verify_operator_system,
    "confusability": _verify_confusability,
    "orth_rep_violation": _verify_orth_rep_violation,
    "lgp_violation": _verify_lgp_violation,
    "classical_orth_rep": _verify_classical_orth_rep,
}


# (type, subject, passed, detail) for every certificate in a loaded report
def verify_report(data: Any) -> List[Tuple[str, str, bool, str]]:
    if not isinstance(data, dict) or data.get("format") != REPORT_FORMAT:
        raise SchemaError(f"not a {REPORT_FORMAT} document", "$.format")
    raw_tol = data.get("tolerance") or {}
    try:
        tol = Tolerance(float(raw_tol["rank_rel"]), float(raw_tol["residual_abs"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"invalid tolerance record: {exc}", "$.tolerance")
    ctx = _Resolver(data, tol)
    outcomes = []
    for k, cert in enumerate(data.get("certificates", [])):
        kind = cert.get("type") if isinstance(cert, dict) else None
        if kind not in VERIFIERS:
            raise SchemaError(f"unknown certificate type '{kind}'", f"$.certificates[{k}].type")
        try:
            passed, detail = VERIFIERS[kind](cert, ctx), ""
        except SchemaError:
            raise
        except (QGraphError, KeyError, TypeError, ValueError) as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        if not passed:
            logger.warning(f"[verify_report] Certificate {k} ({kind} on {cert.get('subject')}) failed {detail}")
        outcomes.append((kind, cert.get("subject", ""), passed, detail))
    logger.info(f"[verify_report] {sum(o[2] for o in outcomes)} of {len(outcomes)} certificate(s) re-verified")
    return outcomes
