"""Orthogonal splitting, kernel projection, interpolation, energy bookkeeping."""

import numpy as np
import pytest

from resnet.energy import energy_inner, gauged
from resnet.graphs import GraphError, generate, truncate
from resnet.greens import greens_gram, walk_greens
from resnet.decomposition import (
    energy_split,
    harmonic_basis,
    harmonic_gram,
    interpolate,
    project_finite,
    royden_split,
)

from conftest import random_connected_graph


def lattice_case(rng):
    trunc = generate("lattice", radius=3, d=2)
    f = rng.standard_normal(trunc.graph.n)
    return trunc, f


def test_split_reassembles_and_is_orthogonal(rng):
    trunc, f = lattice_case(rng)
    split = royden_split(trunc, f)
    total = gauged(trunc.graph, f)
    assert np.allclose(
        split.finite_part.values + split.harmonic_part.values, total.values
    )
    assert split.orthogonality_residual < 1e-10
    assert abs(energy_inner(split.finite_part, split.harmonic_part)) < 1e-10
    # the finite part carries no boundary data (up to the shared gauge shift)
    boundary_vals = split.finite_part.values[trunc.frontier]
    assert np.allclose(boundary_vals, boundary_vals[0])
    # the harmonic part is killed by the Laplacian inside
    from resnet.laplacian import assemble_laplacian

    lap = assemble_laplacian(trunc.graph).apply(split.harmonic_part.values)
    assert np.max(np.abs(lap[trunc.interior])) < 1e-10


def test_split_pythagoras(rng):
    trunc, f = lattice_case(rng)
    split = royden_split(trunc, f)
    total = gauged(trunc.graph, f).energy
    parts = split.finite_part.energy + split.harmonic_part.energy
    assert parts == pytest.approx(total, rel=1e-10)


def test_split_with_empty_frontier_is_all_finite(rng):
    g = random_connected_graph(rng, 8, 4)
    trunc = truncate(g, 99)
    assert len(trunc.frontier) == 0
    f = rng.standard_normal(8)
    split = royden_split(trunc, f)
    assert np.allclose(split.harmonic_part.values, 0.0)
    assert np.allclose(split.finite_part.values, gauged(g, f).values)


def test_split_requires_truncation(rng):
    g = random_connected_graph(rng, 6)
    with pytest.raises(GraphError, match="truncation"):
        royden_split(g, np.zeros(6))
    trunc = truncate(g, 2)
    with pytest.raises(GraphError, match="different graph"):
        royden_split(trunc, gauged(random_connected_graph(rng, 6), np.zeros(6)))


def test_project_finite_agrees_with_split(rng):
    trunc, f = lattice_case(rng)
    kernel = greens_gram(trunc.graph, tol=1e-13)
    via_kernel = project_finite(trunc, kernel, f)
    via_split = royden_split(trunc, f).finite_part
    assert np.allclose(via_kernel.values, via_split.values, atol=1e-8)


def test_project_finite_accepts_walk_kernel(rng):
    trunc = generate("comb", radius=3)
    f = rng.standard_normal(trunc.graph.n)
    kernel = walk_greens(trunc, tail_tol=1e-13, absorb="base").to_kernel()
    via_kernel = project_finite(trunc, kernel, f)
    via_split = royden_split(trunc, f).finite_part
    assert np.allclose(via_kernel.values, via_split.values, atol=1e-7)


def test_project_finite_rejects_partial_kernel(rng):
    trunc = generate("comb", radius=3)
    frontier_kernel = walk_greens(trunc, absorb="frontier").to_kernel()
    with pytest.raises(GraphError, match="except the base point"):
        project_finite(trunc, frontier_kernel, np.zeros(trunc.graph.n))


def test_interpolation_reconstructs_pointwise(rng):
    trunc, f = lattice_case(rng)
    kernel = greens_gram(trunc.graph, tol=1e-13)
    gauged_f = gauged(trunc.graph, f)
    for x in map(int, trunc.interior):
        report = interpolate(trunc, kernel, f, x)
        assert report["residual"] < 1e-8
        assert report["value"] == pytest.approx(
            float(gauged_f.values[x]), abs=1e-8
        )
    at_base = interpolate(trunc, kernel, f, trunc.graph.base_point)
    assert at_base["green_term"] == 0.0
    assert at_base["residual"] < 1e-10


def test_interpolation_reuses_supplied_measure(rng):
    trunc, f = lattice_case(rng)
    kernel = greens_gram(trunc.graph, tol=1e-13)
    from resnet.markov import harmonic_measure_exact

    x = int(trunc.interior[1])
    mu = harmonic_measure_exact(trunc, x)
    direct = interpolate(trunc, kernel, f, x)
    reused = interpolate(trunc, kernel, f, x, measure=mu)
    assert reused["value"] == direct["value"]


def test_interpolation_guards(rng):
    trunc, f = lattice_case(rng)
    kernel = greens_gram(trunc.graph, tol=1e-13)
    with pytest.raises(GraphError, match="interior"):
        interpolate(trunc, kernel, f, int(trunc.frontier[0]))
    with pytest.raises(GraphError, match="out of range"):
        interpolate(trunc, kernel, f, trunc.graph.n)


def test_energy_split_identity(rng):
    for trunc in [generate("lattice", radius=3, d=2), generate("comb", radius=4)]:
        f = rng.standard_normal(trunc.graph.n)
        report = energy_split(trunc, f)
        assert report["identity_residual"] < 1e-9 * max(1.0, report["total"])
        assert report["dirichlet_term"] + report["boundary_term"] == pytest.approx(
            report["total"], rel=1e-9
        )
        assert report["boundary_term"] >= 0.0
        assert report["dirichlet_term"] >= -1e-12


def test_energy_split_of_harmonic_function_is_all_boundary(rng):
    trunc = generate("binary-tree", radius=4)
    from resnet.laplacian import harmonic_extension

    h = harmonic_extension(trunc, rng.standard_normal(len(trunc.frontier)))
    report = energy_split(trunc, h)
    assert report["dirichlet_term"] == pytest.approx(0.0, abs=1e-10)
    assert report["boundary_term"] == pytest.approx(report["total"], rel=1e-10)


def test_harmonic_basis_spans_with_one_null_direction():
    trunc = generate("binary-tree", radius=4)
    basis = harmonic_basis(trunc)
    assert len(basis) == len(trunc.frontier)
    gram = harmonic_gram(basis)
    assert np.allclose(gram, gram.T)
    eigs = np.sort(np.linalg.eigvalsh(gram))
    # exactly one null direction: the indicators sum to the constant function
    assert abs(eigs[0]) < 1e-10
    assert eigs[1] > 1e-6
    coeffs = np.ones(len(basis))
    combined = sum(c * b.values for c, b in zip(coeffs, basis))
    assert float(coeffs @ gram @ coeffs) < 1e-10
    assert np.allclose(combined, combined[0])  # constant, gauged to zero


def test_harmonic_basis_guards(rng):
    g = random_connected_graph(rng, 6)
    with pytest.raises(GraphError, match="truncation"):
        harmonic_basis(g)
    with pytest.raises(GraphError, match="empty frontier"):
        harmonic_basis(truncate(g, 99))


def test_split_csv(tmp_path, rng):
    trunc = generate("comb", radius=3)
    split = royden_split(trunc, rng.standard_normal(trunc.graph.n))
    path = tmp_path / "split.csv"
    split.to_csv(path)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "vertex_index,label,value,finite,harmonic"
    assert len(rows) == trunc.graph.n + 1
    first = rows[1].split(",")
    got = float(first[-2]) + float(first[-1])
    assert got == pytest.approx(
        float(split.finite_part.values[0] + split.harmonic_part.values[0])
    )
