"""The reversible chain of a conductance graph: paths, absorption, boundary data.

The walk steps from x to a neighbor y with probability c_xy / c(x).  On a
truncation the frontier absorbs, and where a walk lands is the harmonic
measure seen from its start; averaging boundary data against that measure
reproduces harmonic functions pointwise.  Both an exact linear-algebra route
and a seeded Monte Carlo route are provided so each can audit the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import GraphError, TruncatedGraph, underlying
from .laplacian import (
    assemble_laplacian,
    harmonic_extension,
    interior_laplacian,
    transition_operator,
)

__all__ = [
    "PathSample",
    "cylinder_probability",
    "sample_paths",
    "power_iterate",
    "BoundaryEstimate",
    "harmonic_measure_exact",
    "estimate_from_samples",
    "measure_z_scores",
    "poisson_reproduce",
    "martin_kernel",
    "shift_invariant_correspondence_demo",
]


def cylinder_probability(g, word):
    """Probability that the chain traces the given vertex-index word."""
    graph = underlying(g)
    word = [int(w) for w in word]
    if not word:
        raise GraphError("cylinder word must contain at least the starting vertex")
    for v in word:
        if not 0 <= v < graph.n:
            raise GraphError(f"vertex index {v} out of range [0, {graph.n})")
    prob = 1.0
    degrees = graph.degrees
    for a, b in zip(word, word[1:]):
        c = graph.conductance(a, b)
        if c == 0.0:
            raise GraphError(
                f"word steps between non-adjacent vertices {graph.labels[a]!r} "
                f"and {graph.labels[b]!r}"
            )
        prob *= c / degrees[a]
    return prob


def _row_cdfs(graph):
    if "row_cdf" not in graph._cache:
        cdf = np.empty_like(graph.weights)
        degrees = graph.degrees
        for x in range(graph.n):
            lo, hi = graph.indptr[x], graph.indptr[x + 1]
            if hi > lo:
                cdf[lo:hi] = np.cumsum(graph.weights[lo:hi]) / degrees[x]
                cdf[hi - 1] = 1.0  # guard against rounding shortfall
        graph._cache["row_cdf"] = cdf
    return graph._cache["row_cdf"]


@dataclass
class PathSample:
    start: int
    vertices: np.ndarray
    log_probability: float
    absorbed_at: int | None
    length: int


def sample_paths(trunc, x, n_samples, max_steps, seed):
    """Run seeded chains from interior vertex x until frontier absorption.

    Each sample gets its own counter-based bit stream keyed by (seed, index),
    so results do not depend on sampling order.  Walks still unabsorbed after
    max_steps are returned with absorbed_at=None; they are never silently
    dropped or redistributed.
    """
    if not isinstance(trunc, TruncatedGraph):
        raise GraphError("path sampling needs a truncation carrying a frontier")
    if len(trunc.frontier) == 0:
        raise GraphError("truncation has an empty frontier; walks cannot absorb")
    graph = trunc.graph
    if not 0 <= x < graph.n:
        raise GraphError(f"vertex index {x} out of range [0, {graph.n})")
    if trunc.frontier_mask[x]:
        raise GraphError(f"start vertex {graph.labels[x]!r} lies on the frontier")
    cdf = _row_cdfs(graph)
    degrees = graph.degrees
    indptr, indices, weights = graph.indptr, graph.indices, graph.weights
    mask = trunc.frontier_mask
    out = []
    for i in range(int(n_samples)):
        rng = np.random.Generator(np.random.Philox(key=[int(seed), i]))
        cur = x
        verts = [x]
        log_p = 0.0
        absorbed = None
        for _ in range(int(max_steps)):
            lo, hi = indptr[cur], indptr[cur + 1]
            u = rng.random()
            k = lo + int(np.searchsorted(cdf[lo:hi], u, side="right"))
            log_p += math.log(weights[k] / degrees[cur])
            cur = int(indices[k])
            verts.append(cur)
            if mask[cur]:
                absorbed = cur
                break
        out.append(
            PathSample(
                start=x,
                vertices=np.array(verts, dtype=np.int64),
                log_probability=log_p,
                absorbed_at=absorbed,
                length=len(verts) - 1,
            )
        )
    return out


def power_iterate(trunc, boundary_values, n):
    """n steps of u <- P u with the frontier pinned to the boundary data.

    Converges to the harmonic extension as n grows; useful as a slow but
    independent check on the direct interior solve.
    """
    if not isinstance(trunc, TruncatedGraph):
        raise GraphError("power iteration needs a truncation carrying a frontier")
    f = np.asarray(boundary_values, dtype=float)
    if f.shape != (len(trunc.frontier),):
        raise GraphError(
            f"expected {len(trunc.frontier)} boundary values, got shape {f.shape}"
        )
    p = transition_operator(trunc.graph).matrix
    h = np.zeros(trunc.graph.n)
    h[trunc.frontier] = f
    for _ in range(int(n)):
        h = p @ h
        h[trunc.frontier] = f
    return h


@dataclass
class BoundaryEstimate:
    """Harmonic measure on the frontier, exact or sampled."""

    frontier: np.ndarray
    weights: np.ndarray
    counts: np.ndarray | None
    total_samples: int
    unabsorbed: int
    std_error: np.ndarray | None
    kind: str

    def weight_of(self, vertex_index):
        pos = np.nonzero(self.frontier == vertex_index)[0]
        if len(pos) == 0:
            raise GraphError(f"vertex index {vertex_index} is not on the frontier")
        return float(self.weights[pos[0]])


def _interior_position(trunc, x):
    if "interior_pos" not in trunc._cache:
        trunc._cache["interior_pos"] = {int(v): k for k, v in enumerate(trunc.interior)}
    pos = trunc._cache["interior_pos"].get(int(x))
    if pos is None:
        raise GraphError(f"vertex index {x} is not interior to the truncation")
    return pos


def _frontier_adjacency(trunc):
    if "a_if" not in trunc._cache:
        adj = trunc.graph.adjacency()
        trunc._cache["a_if"] = adj[trunc.interior][:, trunc.frontier].toarray()
    return trunc._cache["a_if"]


def harmonic_measure_exact(trunc, x):
    """Harmonic measure from x by the adjoint solve: one factorized system.

    h_I = L_II^-1 A_IF f, so evaluating at x against every boundary vector at
    once means solving L_II z = e_x and reading off z^T A_IF.
    """
    pos = _interior_position(trunc, x)
    _, lu = interior_laplacian(trunc)
    rhs = np.zeros(len(trunc.interior))
    rhs[pos] = 1.0
    z = lu.solve(rhs)
    mu = _frontier_adjacency(trunc).T @ z
    mu = np.maximum(mu, 0.0)  # clip the solver's negative dust
    return BoundaryEstimate(
        frontier=np.array(trunc.frontier, dtype=np.int64),
        weights=mu,
        counts=None,
        total_samples=0,
        unabsorbed=0,
        std_error=None,
        kind="exact",
    )


def estimate_from_samples(trunc, samples):
    """Empirical harmonic measure with per-component binomial errors."""
    frontier = np.array(trunc.frontier, dtype=np.int64)
    index = {int(v): k for k, v in enumerate(frontier)}
    counts = np.zeros(len(frontier), dtype=np.int64)
    unabsorbed = 0
    for s in samples:
        if s.absorbed_at is None:
            unabsorbed += 1
        else:
            counts[index[s.absorbed_at]] += 1
    total = len(samples)
    weights = counts / total if total else counts.astype(float)
    se = np.sqrt(weights * (1.0 - weights) / total) if total else None
    return BoundaryEstimate(
        frontier=frontier,
        weights=weights,
        counts=counts,
        total_samples=total,
        unabsorbed=unabsorbed,
        std_error=se,
        kind="monte-carlo",
    )


def measure_z_scores(sampled, exact):
    """(mu_hat - mu) / sqrt(mu (1 - mu) / n), using the exact mu in the scale.

    Components whose exact weight is 0 or 1 have zero binomial spread; they
    come back as 0 when the sample agrees exactly and +-inf when it does not.
    """
    if sampled.total_samples <= 0:
        raise GraphError("sampled estimate holds no samples")
    mu = exact.weights
    n = sampled.total_samples
    scale = np.sqrt(mu * (1.0 - mu) / n)
    diff = sampled.weights - mu
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(scale > 0.0, diff / scale, np.where(diff == 0.0, 0.0, np.inf))
    return z


def poisson_reproduce(trunc, h_values, x, n_samples, seed, max_steps=None):
    """Reproduce a harmonic function at x by averaging it over absorbed walks.

    Rejects inputs that are not harmonic on the interior (the representation
    only holds for those), reporting the offending residual.  Unabsorbed
    walks contribute nothing to the average and are returned in the report
    rather than being reweighted away.
    """
    if not isinstance(trunc, TruncatedGraph):
        raise GraphError("boundary representation needs a truncation")
    h = np.asarray(getattr(h_values, "values", h_values), dtype=float)
    graph = trunc.graph
    if h.shape != (graph.n,):
        raise GraphError(f"expected {graph.n} vertex values, got shape {h.shape}")
    lap = assemble_laplacian(graph)
    residual = float(np.max(np.abs(lap.apply(h)[trunc.interior])))
    if residual > 1e-8 * max(1.0, float(np.max(np.abs(h)))):
        raise GraphError(
            f"input is not harmonic on the interior (max |Laplacian| = {residual:.3e}); "
            "the boundary average only reproduces harmonic functions"
        )
    exact_measure = harmonic_measure_exact(trunc, x)
    exact_value = float(exact_measure.weights @ h[exact_measure.frontier])
    if max_steps is None:
        max_steps = 100 * graph.n
    samples = sample_paths(trunc, x, n_samples, max_steps, seed)
    contributions = np.array(
        [h[s.absorbed_at] if s.absorbed_at is not None else 0.0 for s in samples]
    )
    unabsorbed = sum(1 for s in samples if s.absorbed_at is None)
    mc = float(contributions.mean())
    se = float(contributions.std(ddof=1) / math.sqrt(len(samples))) if len(samples) > 1 else 0.0
    return {
        "point_value": float(h[x]),
        "exact_measure_value": exact_value,
        "mc_estimate": mc,
        "std_error": se,
        "n_samples": len(samples),
        "unabsorbed": unabsorbed,
        "harmonic_residual": residual,
    }


def martin_kernel(trunc, walk_g, x, y):
    """Kernel ratio G(x, y) / G(base, y) for the frontier-absorbed walk."""
    if walk_g.absorb != "frontier":
        raise GraphError(
            'Martin ratios need the frontier-absorbed series; pass absorb="frontier"'
        )
    base = trunc.graph.base_point
    denom = walk_g.value(base, y)
    if denom == 0.0:
        raise GraphError(
            f"G(base, {trunc.graph.labels[y]!r}) = 0; the ratio is undefined"
        )
    return walk_g.value(x, y) / denom


def shift_invariant_correspondence_demo(trunc, boundary_function, n_samples=2000, seed=0, max_steps=None):
    """Where-the-walk-ends data <-> harmonic functions, demonstrated both ways.

    Evaluating `boundary_function` at each frontier vertex and extending
    harmonically gives a function killed by the Laplacian on the interior;
    conversely the expectation of the function at the absorption site,
    estimated by Monte Carlo at the base point, recovers the same values.
    """
    if not isinstance(trunc, TruncatedGraph):
        raise GraphError("the correspondence demo needs a truncation")
    f = np.array([float(boundary_function(int(b))) for b in trunc.frontier])
    h = harmonic_extension(trunc, f)
    lap = assemble_laplacian(trunc.graph)
    residual = float(np.max(np.abs(lap.apply(h)[trunc.interior])))
    report = poisson_reproduce(
        trunc, h, trunc.graph.base_point, n_samples, seed, max_steps
    )
    return {
        "values": h,
        "harmonic_residual": residual,
        "base_value": report["point_value"],
        "mc_estimate": report["mc_estimate"],
        "std_error": report["std_error"],
        "unabsorbed": report["unabsorbed"],
    }
