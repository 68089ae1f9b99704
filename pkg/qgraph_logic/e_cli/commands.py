# qgraph_logic/e_cli/commands.py - The qgraph command line: one subcommand per toolkit operation, JSON reports out
import json
import logging
from functools import wraps
from typing import Any, Dict, Optional
import click
from qgraph_logic.a_matrix.matCore import Tolerance
from qgraph_logic.a_matrix.opSpace import QuantumGraph, scalar_space
from qgraph_logic.b_connect.connectDecide import is_connected, tree_packing_check, witness_partition
from qgraph_logic.b_connect.separatorSearch import (
    MaximalVerdict, SearchBudget, connectivity_exact, default_jobs, default_seed, maximal_connectivity_check,
    separator_search)
from qgraph_logic.c_classical.classicalGraph import (
    OrthonormalBasisCn, classical_connected, confusability, lift)
from qgraph_logic.d_channels.krausMap import channel_confusability
from qgraph_logic.d_channels.orthRep import (
    OrthRepReport, check_lgp, check_order_zero, check_orth_rep, classical_to_quantum_rep, lgp_connectivity_bound,
    quantum_to_classical_rep)
from qgraph_logic.e_cli.instanceFiles import (
    basis_instance, classical_graph_instance, encode_matrix, kraus_instance, load_instance, orth_rep_instance, parse_basis,
    parse_classical_graph, parse_kraus_map, parse_orth_rep, parse_partition, parse_quantum_graph,
    quantum_graph_instance, save_instance)
from qgraph_logic.e_cli.instanceGen import GENERATOR_KINDS, generate_instance, named_rng
from qgraph_logic.e_cli.reportWriter import (
    Report, bounds_to_dict, certificate_to_dict, lgp_bound_to_dict, lgp_report_to_dict, maximal_to_dict,
    orth_report_to_dict, projection_to_dict, separator_to_dict, verify_report)
from qgraph_logic.qgraphErrors import QGraphError, ValidationError
logger = logging.getLogger(__name__)

# === Exit Codes ===
EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_VALIDATION = 2
EXIT_INCONSISTENT = 3
# Violations beyond this many are counted but not embedded as certificates
MAX_EMBEDDED_VIOLATIONS = 5

SEED_OPTION = click.option("--seed", type=int, default=None, help="Root seed (default: QGRAPH_SEED or 20240601).")
REPORT_OPTION = click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None,
                             help="Write the JSON report here instead of stdout.")
OUTPUT_OPTION = click.option("-o", "--output", "output_path", type=click.Path(dir_okay=False), default=None,
                             help="Write the produced instance file here.")
INSTANCE = click.Path(exists=True, dir_okay=False)


# === Shared Plumbing ===
# Maps QGraphError to its exit code; everything else stays a crash
def handles_errors(func):
    @wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            code = func(*args, **kwargs)
        except QGraphError as exc:
            logger.error(f"[{func.__name__}] {type(exc).__name__}: {exc}")
            click.echo(json.dumps(exc.to_dict(), indent=2, sort_keys=True, default=str), err=True)
            ctx.exit(exc.exit_code)
        ctx.exit(code or EXIT_OK)
    return wrapper


def _tol(ctx: click.Context) -> Tolerance:
    return ctx.obj["tol"]


def _seed(seed: Optional[int]) -> int:
    return default_seed() if seed is None else seed


def _load_graph(path: str, tol: Tolerance, report: Report, name: str = "graph") -> QuantumGraph:
    inst = load_instance(path, "quantum_graph")
    report.add_input(name, inst)
    return parse_quantum_graph(inst, tol)


def _load_map(path: str, tol: Tolerance, report: Report, name: str = "map"):
    inst = load_instance(path, "kraus_map")
    report.add_input(name, inst)
    return parse_kraus_map(inst, tol)


# Borderline pairs do not flip a PassSampled verdict but belong in the summary
def _note_borderline(report: Report, orth: OrthRepReport):
    if orth.borderline:
        report.note(f"{orth.borderline} annihilating pair(s) sit between the orthogonality and violation "
                    f"thresholds; verdict {orth.verdict.value} stands")


def _emit(report: Report, report_path: Optional[str]):
    text = report.to_json()
    if report_path:
        with open(report_path, 'w', encoding='utf-8') as f:
            f.write(text)
        logger.info(f"[_emit] Report written to {report_path}")
    else:
        click.echo(text, nl=False)


# Parses --param key=value with JSON values where possible
def _params(pairs) -> Dict[str, Any]:
    params = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValidationError(f"--param expects key=value, got '{pair}'")
        key, raw = pair.split("=", 1)
        try:
            params[key.strip()] = json.loads(raw)
        except json.JSONDecodeError:
            params[key.strip()] = raw
    return params


# === Command Group ===
@click.group()
@click.option("--tol", "tol_text", default=None, help="rank_rel,residual_abs or a single residual_abs (default: QGRAPH_TOL).")
@click.option("--log-level", default=None, type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.option("--jobs", type=int, default=None, help="Parallel workers for searches (default: QGRAPH_JOBS or 1).")
@click.pass_context
def qgraph_cli(ctx: click.Context, tol_text: Optional[str], log_level: Optional[str], jobs: Optional[int]):
    """Connectivity toolkit for quantum graphs (operator systems in M_n)."""
    if log_level:
        logging.getLogger().setLevel(log_level.upper())
    try:
        tol = Tolerance.parse(tol_text) if tol_text else Tolerance.from_env()
    except QGraphError as exc:
        raise click.BadParameter(str(exc), param_hint="--tol")
    ctx.obj = {"tol": tol, "jobs": default_jobs() if jobs is None else jobs}


# === Connectivity ===
@qgraph_cli.command("connectedness")
@click.argument("graph_file", type=INSTANCE)
@REPORT_OPTION
@click.pass_context
@handles_errors
def cmd_connectedness(ctx, graph_file, report_path):
    """Decide whether a quantum graph is connected."""
    tol = _tol(ctx)
    report = Report("connectedness", {"graph": graph_file}, tol)
    S = _load_graph(graph_file, tol, report)
    cert = is_connected(S)
    report.results["connectivity"] = certificate_to_dict(cert)
    report.add_certificate("connectivity", "graph", certificate_to_dict(cert))
    report.note(f"{cert.verdict.value}: stabilization power {cert.stabilization_power}, "
                f"commutant dimension {cert.commutant_dim}, dim S = {S.dim} in M_{S.n}")
    if cert.witness is not None:
        report.note(f"Witness projection of rank {cert.witness.rank} commutes with every element of S")
    report.negative = not cert.connected
    _emit(report, report_path)
    return EXIT_NEGATIVE if report.negative else EXIT_OK


@qgraph_cli.command("k-bounds")
@click.argument("graph_file", type=INSTANCE)
@click.option("--restarts", type=int, default=16, show_default=True)
@SEED_OPTION
@click.option("--lgp-rep", "lgp_file", type=INSTANCE, default=None,
              help="Kraus map whose LGP orthogonal representation gives a lower bound n - d.")
@click.option("--samples", type=int, default=16, show_default=True, help="Sample budget for the LGP checks.")
@click.option("--no-maximal", is_flag=True, help="Skip the maximal connectivity check.")
@REPORT_OPTION
@click.pass_context
@handles_errors
def cmd_k_bounds(ctx, graph_file, restarts, seed, lgp_file, samples, no_maximal, report_path):
    """Bound the vertex connectivity of a quantum graph by separator search."""
    tol, seed = _tol(ctx), _seed(seed)
    report = Report("k-bounds", {"graph": graph_file, "restarts": restarts, "lgp_rep": lgp_file,
                                 "samples": samples, "no_maximal": no_maximal}, tol, seed)
    S = _load_graph(graph_file, tol, report)
    lgp_value = None
    if lgp_file:
        phi = _load_map(lgp_file, tol, report)
        bound = lgp_connectivity_bound(phi, S, samples, seed)
        report.results["lgp"] = lgp_bound_to_dict(bound)
        if bound is None:
            report.note("LGP representation failed its sampled checks; no lower bound taken from it")
        else:
            lgp_value = bound.bound
            _note_borderline(report, bound.orth_report)
    budget = SearchBudget(restarts=restarts, maximal_restarts=restarts, seed=seed, n_jobs=ctx.obj["jobs"])
    bounds = separator_search(S, budget, lgp_value, run_maximal=not no_maximal)
    report.results["budget"] = budget.to_dict()
    report.results["bounds"] = bounds_to_dict(bounds)
    report.add_certificate("connectivity", "graph", certificate_to_dict(is_connected(S)))
    if bounds.best_separator is not None:
        report.add_certificate("separator", "graph", separator_to_dict(bounds.best_separator))
    if bounds.maximal is not None and bounds.maximal.u is not None:
        report.add_certificate("annihilating_vectors", "graph", maximal_to_dict(bounds.maximal))
    exact = connectivity_exact(bounds)
    label = f"exactly {exact}" if exact is not None else f"between {bounds.lower} and {bounds.upper}"
    flags = [name for name, on in (("heuristic", bounds.lower_heuristic), ("conditional", bounds.lower_conditional)) if on]
    report.note(f"Vertex connectivity {label}" + (f" (lower bound {', '.join(flags)})" if flags else ""))
    _emit(report, report_path)
    return EXIT_OK


@qgraph_cli.command("maximal")
@click.argument("graph_file", type=INSTANCE)
@click.option("--restarts", type=int, default=16, show_default=True)
@SEED_OPTION
@click.option("--no-exact", is_flag=True, help="Skip the exact mode for n <= 3.")
@REPORT_OPTION
@click.pass_context
@handles_errors
def cmd_maximal(ctx, graph_file, restarts, seed, no_exact, report_path):
    """Check (n-1)-connectivity: no unit u, v with <u|B|v> = 0 for every B in S."""
    tol, seed = _tol(ctx), _seed(seed)
    report = Report("maximal", {"graph": graph_file, "restarts": restarts, "no_exact": no_exact}, tol, seed)
    S = _load_graph(graph_file, tol, report)
    result = maximal_connectivity_check(S, restarts, seed, ctx.obj["jobs"], exact=not no_exact)
    report.results["maximal"] = maximal_to_dict(result)
    if result.u is not None:
        report.add_certificate("annihilating_vectors", "graph", maximal_to_dict(result))
    report.note(f"Maximal connectivity {result.verdict.value} ({'exact' if result.exact else 'heuristic'}), "
                f"smallest sigma {result.sigma_min:.3e}")
    report.negative = result.verdict != MaximalVerdict.VERIFIED
    _emit(report, report_path)
    return EXIT_NEGATIVE if report.negative else EXIT_OK


@qgraph_cli.command("tree-packing")
@click.argument("graph_file", type=INSTANCE)
@click.argument("partition_file", type=INSTANCE, required=False)
@click.option("--witness", is_flag=True, help="Use the disconnection witness partition {P, I - P}.")
@REPORT_OPTION
@click.pass_context
@handles_errors
def cmd_tree_packing(ctx, graph_file, partition_file, witness, report_path):
    """Sum of cross dimensions against the bound 2(m - 1) for a partition of unity."""
    tol = _tol(ctx)
    report = Report("tree-packing", {"graph": graph_file, "partition": partition_file, "witness": witness}, tol)
    S = _load_graph(graph_file, tol, report)
    if witness == bool(partition_file):
        raise ValidationError("Give exactly one of PARTITION_FILE or --witness")
    if witness:
        parts = witness_partition(is_connected(S))
    else:
        inst = load_instance(partition_file, "partition")
        report.add_input("partition", inst)
        _, parts = parse_partition(inst, tol)
    result = tree_packing_check(S, parts)
    body = {"parts": [projection_to_dict(P) for P in parts], "total": result.total, "bound": result.bound,
            "holds": result.holds}
    report.results["tree_packing"] = {"total": result.total, "bound": result.bound, "holds": result.holds,
                                      "parts": len(parts)}
    report.add_certificate("tree_packing", "graph", body)
    report.note(f"Cross dimension sum {result.total} {'>=' if result.holds else '<'} {result.bound} over {len(parts)} parts")
    report.negative = not result.holds
    _emit(report, report_path)
    return EXIT_NEGATIVE if report.negative else EXIT_OK


# === Constructions ===
@qgraph_cli.command("lift")
@click.argument("classical_file", type=INSTANCE)
@OUTPUT_OPTION
@REPORT_OPTION
@click.pass_context
@handles_errors
def cmd_lift(ctx, classical_file, output_path, report_path):
    """Lift a classical graph G to S_G = span{|e_i><e_j| : i = j or i ~ j}."""
    tol = _tol(ctx)
    report = Report("lift", {"graph": classical_file, "output": output_path}, tol)
    inst = load_instance(classical_file, "classical_graph")
    report.add_input("classical", inst)
    G = parse_classical_graph(inst.payload)
    S = lift(G, tol)
    out = quantum_graph_instance(S, {"name": f"lift({inst.meta.get('name', 'G')})"})
    report.add_output("lifted", out)
    report.add_certificate("operator_system", "lifted", {"dim": S.dim})
    report.results.update({"dim": S.dim, "n": S.n, "classically_connected": classical_connected(G)})
    report.note(f"S_G has dimension {S.dim} = n + 2|E| in M_{S.n}")
    if output_path:
        save_instance(out, output_path)
    _emit(report, report_path)
    return EXIT_OK


@qgraph_cli.command("confusability")
@click.argument("graph_file", type=INSTANCE)
@click.option("--basis", "basis_file", type=INSTANCE, default=None, help="Basis instance file.")
@click.option("--haar", is_flag=True, help="Draw a Haar-random basis from the seed.")
@SEED_OPTION
@OUTPUT_OPTION
@REPORT_OPTION
@click.pass_context
@handles_errors
def cmd_confusability(ctx, graph_file, basis_file, haar, seed, output_path, report_path):
    """Classical confusability graph C_v(S) in an orthonormal basis (standard by default)."""
    tol, seed = _tol(ctx), _seed(seed)
    if basis_file and haar:
        raise ValidationError("--basis and --haar are mutually exclusive")
    report = Report("confusability", {"graph": graph_file, "basis": basis_file, "haar": haar,
                                      "output": output_path}, tol, seed if haar else None)
    S = _load_graph(graph_file, tol, report)
    if basis_file:
        inst = load_instance(basis_file, "basis")
        v = parse_basis(inst, tol)
        report.add_input("basis", inst)
    else:
        v = OrthonormalBasisCn.haar(S.n, named_rng(seed, "confusability/haar")) if haar else OrthonormalBasisCn.standard(S.n)
        report.add_output("basis", basis_instance(v, {"name": "haar" if haar else "standard"}))
    G = confusability(S, v)
    out = classical_graph_instance(G, {"name": "confusability"})
    report.add_output("confusability", out)
    report.add_certificate("confusability", "graph", {"edges": len(G.edges)}, basis="basis", graph="confusability")
    report.results.update({"edges": len(G.edges), "classically_connected": classical_connected(G)})
    report.note(f"C_v(S) has {len(G.edges)} edge(s) on {G.n} vertices")
    if output_path:
        save_instance(out, output_path)
    _emit(report, report_path)
    return EXIT_OK


@qgraph_cli.command("channel-graph")
@click.argument("map_file", type=INSTANCE)
@OUTPUT_OPTION
@REPORT_OPTION
@click.pass_context
@handles_errors
def cmd_channel_graph(ctx, map_file, output_path, report_path):
    """Confusability quantum graph span{K_i^dagger K_j} of a channel."""
    tol = _tol(ctx)
    report = Report("channel-graph", {"map": map_file, "output": output_path}, tol)
    phi = _load_map(map_file, tol, report)
    S = channel_confusability(phi)
    cert = is_connected(S)
    out = quantum_graph_instance(S, {"name": "channel_graph"})
    report.add_output("channel_graph", out)
    report.add_certificate("operator_system", "channel_graph", {"dim": S.dim})
    report.add_certificate("connectivity", "channel_graph", certificate_to_dict(cert))
    report.results.update({"dim": S.dim, "n": S.n, "connectivity": cert.verdict.value})
    report.note(f"Channel graph has dimension {S.dim} in M_{S.n} and is {cert.verdict.value}")
    if output_path:
        save_instance(out, output_path)
    _emit(report, report_path)
    return EXIT_OK


@qgraph_cli.command("generate")
@click.argument("kind", type=click.Choice(GENERATOR_KINDS))
@click.option("--param", "param_pairs", multiple=True, help="Generator parameter key=value (repeatable).")
@SEED_OPTION
@OUTPUT_OPTION
@REPORT_OPTION
@click.pass_context
@handles_errors
def cmd_generate(ctx, kind, param_pairs, seed, output_path, report_path):
    """Random instances: gnp, operator_system, haar_basis, channel, hamming."""
    tol, seed = _tol(ctx), _seed(seed)
    params = _params(param_pairs)
    report = Report("generate", {"kind": kind, "params": params, "output": output_path}, tol, seed)
    out = generate_instance(kind, seed, params, tol)
    report.add_output("generated", out)
    report.results.update({"kind": out.kind})
    report.note(f"Generated a {out.kind} instance with seed {seed}")
    if output_path:
        save_instance(out, output_path)
    _emit(report, report_path)
    return EXIT_OK


# === Orthogonal Representations ===
@qgraph_cli.command("check-orth-rep")
@click.argument("map_file", type=INSTANCE)
@click.argument("graph_file", type=INSTANCE, required=False)
@click.option("--samples", type=int, default=32, show_default=True)
@SEED_OPTION
@REPORT_OPTION
@click.pass_context
@handles_errors
def cmd_check_orth_rep(ctx, map_file, graph_file, samples, seed, report_path):
    """Sampled check that a CP map is an orthogonal representation (of C I_n without GRAPH_FILE)."""
    tol, seed = _tol(ctx), _seed(seed)
    report = Report("check-orth-rep", {"map": map_file, "graph": graph_file, "samples": samples}, tol, seed)
    phi = _load_map(map_file, tol, report)
    if graph_file:
        S = _load_graph(graph_file, tol, report)
        result = check_orth_rep(phi, S, samples, seed)
        subject = "graph"
    else:
        result = check_order_zero(phi, samples, seed)
        report.add_input("scalar", quantum_graph_instance(scalar_space(phi.in_dim, tol), {"name": "scalar"}))
        subject = "scalar"
    report.results["orth_rep"] = orth_report_to_dict(result)
    for v in result.violations[:MAX_EMBEDDED_VIOLATIONS]:
        report.add_certificate("orth_rep_violation", subject, {"A": encode_matrix(v.A), "B": encode_matrix(v.B)}, map="map")
    report.note(f"{result.verdict.value}: {result.pairs_tested} annihilating pair(s) tested, "
                f"{len(result.violations)} violation(s), {result.borderline} borderline")
    _note_borderline(report, result)
    report.negative = not result.passed
    _emit(report, report_path)
    return EXIT_NEGATIVE if report.negative else EXIT_OK


@qgraph_cli.command("check-lgp")
@click.argument("map_file", type=INSTANCE)
@click.argument("graph_file", type=INSTANCE)
@click.option("--samples", type=int, default=16, show_default=True)
@SEED_OPTION
@REPORT_OPTION
@click.pass_context
@handles_errors
def cmd_check_lgp(ctx, map_file, graph_file, samples, seed, report_path):
    """Sampled locally-general-position check, with the n - d bound when everything passes."""
    tol, seed = _tol(ctx), _seed(seed)
    report = Report("check-lgp", {"map": map_file, "graph": graph_file, "samples": samples}, tol, seed)
    phi = _load_map(map_file, tol, report)
    S = _load_graph(graph_file, tol, report)
    result = check_lgp(phi, S, samples, seed)
    report.results["lgp"] = lgp_report_to_dict(result)
    if result.violation is not None:
        report.add_certificate("lgp_violation", "graph", lgp_report_to_dict(result)["violation"], map="map")
        report.note(f"Violated after {result.tested} projection(s)")
    else:
        bound = lgp_connectivity_bound(phi, S, samples, seed)
        report.results["bound"] = lgp_bound_to_dict(bound)
        tail = f"; S is {bound.bound}-connected ({bound.conditional})" if bound else "; orthogonality check failed"
        report.note(f"{result.verdict.value} over {result.tested} projection(s){tail}")
        if bound is not None:
            _note_borderline(report, bound.orth_report)
    report.negative = not result.passed
    _emit(report, report_path)
    return EXIT_NEGATIVE if report.negative else EXIT_OK


@qgraph_cli.command("to-quantum-rep")
@click.argument("orth_rep_file", type=INSTANCE)
@OUTPUT_OPTION
@REPORT_OPTION
@click.pass_context
@handles_errors
def cmd_to_quantum_rep(ctx, orth_rep_file, output_path, report_path):
    """Kraus map {|f(i)><e_i|} from a classical orthogonal representation."""
    tol = _tol(ctx)
    report = Report("to-quantum-rep", {"orth_rep": orth_rep_file, "output": output_path}, tol)
    inst = load_instance(orth_rep_file, "classical_orth_rep")
    report.add_input("orth_rep", inst)
    G, f = parse_orth_rep(inst)
    phi = classical_to_quantum_rep(G, f, tol)
    out = kraus_instance(phi, {"name": "quantum_rep"})
    report.add_output("quantum_rep", out)
    report.add_certificate("classical_orth_rep", "orth_rep", {"n": G.n, "d": f.d})
    report.results.update({"in_dim": phi.in_dim, "out_dim": phi.out_dim, "kraus_count": len(phi)})
    report.note(f"Built a {len(phi)}-operator map M_{phi.in_dim} -> M_{phi.out_dim}")
    if output_path:
        save_instance(out, output_path)
    _emit(report, report_path)
    return EXIT_OK


@qgraph_cli.command("to-classical-rep")
@click.argument("map_file", type=INSTANCE)
@click.argument("classical_file", type=INSTANCE)
@click.option("--basis", "basis_file", type=INSTANCE, default=None, help="Read f(i) off Phi(|v_i><v_i|) in this basis.")
@OUTPUT_OPTION
@REPORT_OPTION
@click.pass_context
@handles_errors
def cmd_to_classical_rep(ctx, map_file, classical_file, basis_file, output_path, report_path):
    """Classical orthogonal representation from the ranges of Phi(|e_i><e_i|)."""
    tol = _tol(ctx)
    report = Report("to-classical-rep", {"map": map_file, "graph": classical_file, "basis": basis_file,
                                         "output": output_path}, tol)
    phi = _load_map(map_file, tol, report)
    inst = load_instance(classical_file, "classical_graph")
    report.add_input("classical", inst)
    G = parse_classical_graph(inst.payload)
    basis = None
    if basis_file:
        binst = load_instance(basis_file, "basis")
        report.add_input("basis", binst)
        basis = parse_basis(binst, tol)
    f = quantum_to_classical_rep(phi, G, basis)
    out = orth_rep_instance(G, f, {"name": "classical_rep"})
    report.add_output("classical_rep", out)
    report.add_certificate("classical_orth_rep", "classical_rep", {"n": G.n, "d": f.d})
    report.results.update({"n": G.n, "d": f.d})
    report.note(f"Orthogonal representation of a {G.n}-vertex graph in C^{f.d}")
    if output_path:
        save_instance(out, output_path)
    _emit(report, report_path)
    return EXIT_OK


# === Verification ===
@qgraph_cli.command("verify")
@click.argument("report_file", type=INSTANCE)
@handles_errors
def cmd_verify(report_file):
    """Re-check every certificate embedded in a saved report."""
    try:
        with open(report_file, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"invalid JSON in {report_file}: {e.msg}")
    outcomes = verify_report(data)
    for kind, subject, passed, detail in outcomes:
        click.echo(f"{'ok  ' if passed else 'FAIL'} {kind} [{subject}] {detail}".rstrip())
    failed = sum(1 for o in outcomes if not o[2])
    click.echo(f"{len(outcomes) - failed}/{len(outcomes)} certificate(s) verified")
    return EXIT_NEGATIVE if failed else EXIT_OK

