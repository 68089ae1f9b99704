# tests/test_separatorSearch.py - Connectivity bounds, candidate verification and the maximal connectivity check
import networkx as nx
import numpy as np
import pytest
from qgraph_logic.a_matrix.matCore import Projection
from qgraph_logic.a_matrix.opSpace import diagonal_space, full_space, scalar_space
from qgraph_logic.b_connect import separatorSearch
from qgraph_logic.b_connect.separatorSearch import (
    CandidateCounter, MaximalVerdict, SearchBudget, block_objective, closure_blocks, connectivity_exact,
    maximal_connectivity_check, separator_search)
from qgraph_logic.b_connect.connectDecide import is_separator
from qgraph_logic.c_classical.classicalGraph import (
    ClassicalGraph, OrthonormalBasisCn, classical_vertex_connectivity, cut_projection, lift, minimum_vertex_cuts)
from conftest import atlas_graphs

FAST = SearchBudget(restarts=4, refine_steps=30, pool_random=4, maximal_restarts=8, seed=7, n_jobs=1)


# === Bounds ===
def test_full_algebra_bounds():
    bounds = separator_search(lift(ClassicalGraph.complete(4)), FAST)
    assert (bounds.lower, bounds.upper) == (3, 3)
    assert bounds.is_m_n
    assert connectivity_exact(bounds) == 3


def test_lifted_path_has_rank_one_separator(lifted_p3):
    bounds = separator_search(lifted_p3, FAST)
    assert (bounds.lower, bounds.upper) == (1, 1)
    assert bounds.best_separator.verify(lifted_p3)
    assert bounds.maximal is None


def test_offdiagonal_system_is_maximally_connected(offdiag3):
    bounds = separator_search(offdiag3, FAST)
    assert (bounds.lower, bounds.upper) == (2, 2)
    assert bounds.maximal.verdict == MaximalVerdict.VERIFIED
    assert bounds.lower_heuristic == (not bounds.maximal.exact)


def test_disconnected_graph_bounds():
    bounds = separator_search(diagonal_space(3), FAST)
    assert (bounds.lower, bounds.upper) == (0, 0)
    assert bounds.best_separator.rank == 0
    assert bounds.method_log[0]["phase"] == "connectedness"


def test_one_dimensional_ambient_space():
    bounds = separator_search(full_space(1), FAST)
    assert (bounds.lower, bounds.upper) == (0, 0)
    assert bounds.is_m_n


def test_inexact_bounds_report_none():
    bounds = separator_search(lift(ClassicalGraph.path(3)), FAST)
    bounds.lower = 0
    assert connectivity_exact(bounds) is None


def test_search_is_deterministic_for_a_seed():
    S = lift(ClassicalGraph.cycle(5))
    first = separator_search(S, FAST)
    again = separator_search(S, FAST)
    assert (first.lower, first.upper) == (again.lower, again.upper) == (1, 2)
    assert np.allclose(first.best_separator.separator.matrix, again.best_separator.separator.matrix)


# === LGP Lower Bounds ===
def test_lgp_bound_raises_lower_conditionally(offdiag3):
    bounds = separator_search(offdiag3, FAST, lgp_bound=2, run_maximal=False)
    assert bounds.lower == 2 and bounds.lower_conditional
    assert bounds.maximal is None


def test_lgp_bound_above_upper_is_dropped(lifted_p3):
    bounds = separator_search(lifted_p3, FAST, lgp_bound=2)
    assert (bounds.lower, bounds.upper) == (1, 1)
    assert not bounds.lower_conditional
    assert any("warning" in entry for entry in bounds.method_log)


# === Candidates ===
def test_candidate_counter_skips_full_rank(lifted_p3):
    counter = CandidateCounter(lifted_p3)
    assert counter.try_projection(Projection.identity(3)) is None
    assert counter.checked == 0
    assert counter.try_projection(Projection.coordinate(3, [1])) is not None
    assert (counter.checked, counter.accepted) == (1, 1)
    counter.log_summary("test")
    assert counter.checked == 0


def test_candidate_counter_rejects_non_separator(lifted_p3):
    counter = CandidateCounter(lifted_p3)
    assert counter.try_projection(Projection.coordinate(3, [0])) is None
    assert counter.accepted == 0


def test_closure_blocks_on_path_endpoint(lifted_p3):
    X, Y = closure_blocks(lifted_p3, np.eye(3, dtype=complex)[0])
    assert X.shape == (3, 1) and Y.shape == (3, 1)
    assert abs(abs(X[0, 0]) - 1) < 1e-10
    assert abs(abs(Y[2, 0]) - 1) < 1e-10


def test_block_objective_vanishes_on_exact_blocks(lifted_p3):
    E = np.eye(3, dtype=complex)
    assert block_objective(lifted_p3.basis, E[:, :1], E[:, 2:]) == pytest.approx(0.0, abs=1e-20)
    assert block_objective(lifted_p3.basis, E[:, :1], E[:, 1:2]) > 0.5


# === Maximal Connectivity ===
def test_scalar_graph_is_refuted():
    result = maximal_connectivity_check(scalar_space(2), restarts=2, seed=3)
    assert result.verdict == MaximalVerdict.REFUTED
    assert result.exact
    assert abs(np.vdot(result.u, result.v)) < 1e-10
    assert result.separator.rank == 0


def test_lifted_path_is_refuted(lifted_p3):
    result = maximal_connectivity_check(lifted_p3, restarts=4, seed=3)
    assert result.verdict == MaximalVerdict.REFUTED
    assert result.separator.rank == 1
    assert result.separator.verify(lifted_p3)


def test_offdiagonal_system_passes_check(offdiag3):
    result = maximal_connectivity_check(offdiag3, restarts=4, seed=3)
    assert result.verdict == MaximalVerdict.VERIFIED
    assert result.sigma_min > separatorSearch.VERIFY_SIGMA


def test_heuristic_only_when_exact_disabled(offdiag3):
    result = maximal_connectivity_check(offdiag3, restarts=4, seed=3, exact=False)
    assert result.verdict == MaximalVerdict.VERIFIED
    assert not result.exact


# === Configuration ===
def test_seed_and_jobs_from_environment(monkeypatch):
    monkeypatch.setenv("QGRAPH_SEED", "99")
    monkeypatch.setenv("QGRAPH_JOBS", "2")
    budget = SearchBudget()
    assert budget.seed == 99 and budget.n_jobs == 2
    assert budget.to_dict()["seed"] == 99
    assert "n_jobs" not in budget.to_dict()


# === Acceptance Scale ===
@pytest.mark.slow
def test_no_separator_below_vertex_connectivity():
    graphs = atlas_graphs(5, min_n=2)
    for k, rng in enumerate(np.random.default_rng(20240601).spawn(100)):
        g = nx.gnp_random_graph(2 + k % 7, float(rng.uniform(0.3, 0.9)), seed=int(rng.integers(2 ** 31)))
        graphs.append(ClassicalGraph.from_networkx(g))
    budget = SearchBudget(restarts=200, refine_steps=60, pool_random=16, maximal_restarts=16, seed=11, n_jobs=1)
    for G in graphs:
        S = lift(G)
        kappa = classical_vertex_connectivity(G)
        standard = OrthonormalBasisCn.standard(G.n)
        for cut in minimum_vertex_cuts(G):
            assert is_separator(S, cut_projection(standard, cut)) is not None, (G, cut)
        bounds = separator_search(S, budget)
        assert bounds.best_separator.rank >= kappa, G
        assert bounds.best_separator.verify(S)
