"""Laplacian assembly, walk operator, Dirichlet solves, and the comb recursion."""

import math

import numpy as np
import pytest

from resnet.graphs import ConductanceGraph, GraphError, generate, truncate
from resnet.laplacian import (
    assemble_laplacian,
    comb_forward_recursion,
    defect_recursion_comb,
    harmonic_extension,
    interior_laplacian,
    l2_symmetry_check,
    transition_operator,
    write_coordinate_format,
)

from conftest import dense_laplacian, random_connected_graph


def test_assembly_matches_dense_oracle(rng):
    for n, extra in [(2, 0), (5, 3), (17, 10), (40, 25)]:
        g = random_connected_graph(rng, n, extra)
        lap = assemble_laplacian(g)
        assert np.allclose(lap.as_csr().toarray(), dense_laplacian(g), atol=1e-13)


def test_apply_and_quadratic_form(rng):
    g = random_connected_graph(rng, 12, 6)
    lap = assemble_laplacian(g)
    dense = dense_laplacian(g)
    u = rng.standard_normal(g.n)
    assert np.allclose(lap.apply(u), dense @ u)
    assert lap.quadratic_form(u) == pytest.approx(float(u @ dense @ u))
    # constants are in the kernel
    assert np.max(np.abs(lap.apply(np.ones(g.n)))) < 1e-12
    with pytest.raises(GraphError):
        lap.apply(np.zeros(g.n + 1))


def test_assembly_is_cached(rng):
    g = random_connected_graph(rng, 6)
    assert assemble_laplacian(g) is assemble_laplacian(g)
    assert transition_operator(g) is transition_operator(g)


def test_transition_rows_and_reversibility(rng):
    g = random_connected_graph(rng, 15, 8)
    p = transition_operator(g).matrix.toarray()
    assert np.allclose(p.sum(axis=1), 1.0)
    assert np.all(p >= 0.0)
    # detailed balance: c(x) p_xy = c_xy = c(y) p_yx
    deg = np.asarray(g.degrees)
    balanced = deg[:, None] * p
    assert np.allclose(balanced, balanced.T)
    assert np.allclose(balanced, g.adjacency().toarray())


def test_transition_rejects_zero_degree():
    g = ConductanceGraph.from_edges([(0, 1, 1.0)], 0, vertices=[0, 1, 2])
    with pytest.raises(GraphError, match="zero-degree"):
        transition_operator(g)


def test_l2_symmetry_of_laplacian(rng):
    g = random_connected_graph(rng, 20, 12)
    assert l2_symmetry_check(assemble_laplacian(g), trials=25) < 1e-10


def test_interior_block_requires_truncation(rng):
    g = random_connected_graph(rng, 6)
    with pytest.raises(GraphError, match="TruncatedGraph"):
        interior_laplacian(g)


def test_harmonic_extension_solves_dirichlet_problem(rng):
    trunc = truncate(generate("lattice", radius=4, d=2), 4)
    f = rng.standard_normal(len(trunc.frontier))
    h = harmonic_extension(trunc, f)
    assert np.allclose(h[trunc.frontier], f)
    residual = assemble_laplacian(trunc).apply(h)[trunc.interior]
    assert np.max(np.abs(residual)) < 1e-10
    # maximum principle: interior values lie strictly inside the boundary range
    assert h[trunc.interior].min() > f.min() - 1e-12
    assert h[trunc.interior].max() < f.max() + 1e-12


def test_harmonic_extension_of_constants_is_constant():
    trunc = generate("binary-tree", radius=3, b_plus=2.0)
    h = harmonic_extension(trunc, np.full(len(trunc.frontier), 7.5))
    assert np.allclose(h, 7.5)


def test_harmonic_extension_validates_input():
    trunc = truncate(generate("halfline", radius=5), 5)
    with pytest.raises(GraphError, match="boundary values"):
        harmonic_extension(trunc, np.zeros(len(trunc.frontier) + 1))


def test_harmonic_extension_needs_frontier():
    g = generate("wye", r1=1.0, r2=2.0, r3=3.0)
    trunc = truncate(g, 10)  # radius beyond the graph: empty frontier
    assert len(trunc.frontier) == 0
    with pytest.raises(GraphError, match="frontier"):
        harmonic_extension(trunc, np.zeros(0))


# -- comb defect recursion ------------------------------------------------------


def test_defect_recursion_frozen_values():
    report = defect_recursion_comb(60)
    assert report.values[0] == 1.0
    assert report.values[1] == pytest.approx(0.37875945356992763, rel=1e-9)
    assert report.limit == pytest.approx(0.5544269345922387, rel=1e-9)
    assert report.energy_sum == pytest.approx(0.5325662552463691, rel=1e-9)
    assert report.max_residual <= 1e-12
    assert report.stabilized


def test_defect_recursion_is_decreasing_and_scaled_tail_flat():
    report = defect_recursion_comb(50)
    assert np.all(np.diff(report.values) < 0)
    assert np.all(report.values > 0)
    tail = report.scaled[-10:]
    assert np.max(np.abs(tail - tail[-1])) < 1e-8


def test_defect_recursion_guards():
    with pytest.raises(GraphError):
        defect_recursion_comb(9)
    with pytest.raises(GraphError):
        defect_recursion_comb(401)
    with pytest.raises(GraphError):
        defect_recursion_comb(12.0)


def test_forward_recursion_locks_onto_unit_root():
    out = comb_forward_recursion(1.0, 2.0, 30)
    ratios = out[1:] / out[:-1]
    assert abs(ratios[28] - 1.0) < 1e-7
    # the decaying branch instead keeps ratios near 1/2 for many levels
    decaying = defect_recursion_comb(30).values
    dratios = decaying[1:] / decaying[:-1]
    assert abs(dratios[28] - 0.5) < 1e-3


def test_write_coordinate_format_round_trip(tmp_path, rng):
    g = random_connected_graph(rng, 9, 4)
    path = tmp_path / "lap.txt"
    write_coordinate_format(g, "laplacian", path)
    dense = np.zeros((g.n, g.n))
    for line in path.read_text().splitlines():
        i, j, v = line.split()
        dense[int(i), int(j)] = float(v)
    assert np.allclose(dense, dense_laplacian(g), atol=1e-13)
    with pytest.raises(GraphError, match="unknown operator"):
        write_coordinate_format(g, "resolvent", tmp_path / "x.txt")


def test_write_coordinate_format_transition_rows(tmp_path):
    g = generate("halfline", radius=4)
    path = tmp_path / "p.txt"
    write_coordinate_format(g, "transition", path)
    rows = {}
    for line in path.read_text().splitlines():
        i, _, v = line.split()
        rows[int(i)] = rows.get(int(i), 0.0) + float(v)
    assert all(math.isclose(s, 1.0, abs_tol=1e-12) for s in rows.values())
