# tests/conftest.py - Shared fixtures: tolerances, seeded generators, shipped instance files and small graphs
import networkx as nx
import numpy as np
import pytest
from qgraph_logic.a_matrix.matCore import Tolerance
from qgraph_logic.a_matrix.opSpace import make_quantum_graph, matrix_unit
from qgraph_logic.c_classical.classicalGraph import ClassicalGraph, lift
from qgraph_logic.e_cli.instanceFiles import fixture_path

TEST_SEED = 20240601


@pytest.fixture
def tol():
    return Tolerance()


@pytest.fixture
def rng():
    return np.random.default_rng(TEST_SEED)


@pytest.fixture
def fixture_file():
    return fixture_path


@pytest.fixture
def path3():
    return ClassicalGraph.path(3)


@pytest.fixture
def lifted_p3(path3):
    return lift(path3)


# span{I_3, |e_i><e_j| : i != j}
@pytest.fixture
def offdiag3():
    return make_quantum_graph([matrix_unit(3, i, j) for i in range(3) for j in range(3) if i != j], n=3)


# Every graph on 1..max_n vertices from the networkx atlas
def atlas_graphs(max_n: int, min_n: int = 1):
    return [ClassicalGraph.from_networkx(g) for g in nx.graph_atlas_g() if min_n <= g.number_of_nodes() <= max_n]
