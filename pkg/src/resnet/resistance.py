"""Effective resistance between vertices, by several independent routes.

The resistance metric d(x, y) is the voltage drop when one amp enters at x
and leaves at y.  Implemented routes:

  M1  dipole increment v(x) - v(y)
  M2  dipole energy ||v||^2
  M3  minimum dissipation over unit flows (least-norm flow solve)
  M4  grounded dense solve (the quadratic form of the pseudo-inverse)
  M7  normalized increment (v(x) - v(y))^2 / ||v||^2, the variational
      maximizer evaluated explicitly

M5 and M6 (the two constrained variational forms) are analytically the duals
of M7 and M2; they are accepted as aliases and computed through their twins.
Disagreement between routes is the primary correctness signal, so each route
shares as little code with the others as possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import lsqr

from .energy import SolverError, energy_inner, solve_dipole
from .graphs import GraphError, generate, underlying
from .laplacian import assemble_laplacian

__all__ = [
    "METHODS",
    "resistance",
    "CurrentFlow",
    "current_of_dipole",
    "ResistanceMatrix",
    "resistance_matrix",
    "boundedness_diagnostic",
    "type_a_diagnostic",
    "continuum_reference",
]

METHODS = ("M1", "M2", "M3", "M4", "M7")
_ALIASES = {"M5": "M7", "M6": "M2"}


def _check_pair(graph, x, y):
    for v in (x, y):
        if not 0 <= v < graph.n:
            raise GraphError(f"vertex index {v} out of range [0, {graph.n})")


def resistance(g, x, y, method="M2", tol=1e-10):
    """Effective resistance between vertex indices x and y by one route.

    `method` is one of M1, M2, M3, M4, M7 (M5/M6 are dual aliases of M7/M2),
    or "all" for a dict of every route plus their max pairwise relative
    disagreement.
    """
    graph = underlying(g)
    _check_pair(graph, x, y)
    if x == y:
        return 0.0
    if method == "all":
        values = {m: resistance(graph, x, y, m, tol) for m in METHODS}
        lo, hi = min(values.values()), max(values.values())
        values["max_rel_disagreement"] = (hi - lo) / hi if hi > 0 else 0.0
        return values
    method = _ALIASES.get(method, method)
    if method == "M1":
        v = solve_dipole(graph, x, y, tol)
        return float(v.values[x] - v.values[y])
    if method == "M2":
        return solve_dipole(graph, x, y, tol).energy
    if method == "M3":
        return _min_dissipation(graph, x, y, tol)
    if method == "M4":
        return _grounded_quadratic_form(graph, x, y)
    if method == "M7":
        v = solve_dipole(graph, x, y, tol)
        return float(v.values[x] - v.values[y]) ** 2 / v.energy
    raise GraphError(f"unknown method {method!r}; choose from {METHODS} or 'all'")


def _flow_system(graph):
    # Signed incidence scaled by sqrt(c): with flow variables J_e = I_e/sqrt(c_e)
    # the node law reads A J = source vector and the dissipation is |J|^2.
    if "flow_system" not in graph._cache:
        edges = graph.edge_list()
        m = len(edges)
        rows = np.empty(2 * m, dtype=np.int64)
        cols = np.empty(2 * m, dtype=np.int64)
        vals = np.empty(2 * m)
        for k, (i, j, c) in enumerate(edges):
            s = math.sqrt(c)
            rows[2 * k], cols[2 * k], vals[2 * k] = i, k, s
            rows[2 * k + 1], cols[2 * k + 1], vals[2 * k + 1] = j, k, -s
        mat = sparse.csr_matrix((vals, (rows, cols)), shape=(graph.n, m))
        graph._cache["flow_system"] = mat
    return graph._cache["flow_system"]


def _min_dissipation(graph, x, y, tol):
    mat = _flow_system(graph)
    b = np.zeros(graph.n)
    b[x], b[y] = 1.0, -1.0
    # LSQR started from zero converges to the least-norm solution of the
    # consistent underdetermined node-law system: Thomson's principle made
    # computational.
    out = lsqr(mat, b, atol=min(tol, 1e-12), btol=min(tol, 1e-12),
               iter_lim=40 * (graph.n + mat.shape[1]))
    flow, istop, itn, r1norm = out[0], out[1], out[2], out[3]
    if istop not in (1, 2) or r1norm > 1e-8:
        raise SolverError(
            f"least-norm flow solve failed (istop={istop}, residual={r1norm:.3e})",
            residual=r1norm,
            iterations=itn,
        )
    return float(np.dot(flow, flow))


def _grounded_dense(graph, ground):
    lap = assemble_laplacian(graph).as_csr().toarray()
    keep = [i for i in range(graph.n) if i != ground]
    return lap[np.ix_(keep, keep)], keep


def _grounded_quadratic_form(graph, x, y, size_cap=2000):
    if graph.n > size_cap:
        raise GraphError(
            f"dense route capped at {size_cap} vertices (graph has {graph.n}); "
            "use an iterative method for larger graphs"
        )
    reduced, keep = _grounded_dense(graph, y)
    rhs = np.zeros(graph.n - 1)
    pos = keep.index(x)
    rhs[pos] = 1.0
    sol = np.linalg.solve(reduced, rhs)
    return float(sol[pos])


# -- current flows ------------------------------------------------------------


@dataclass
class CurrentFlow:
    """Edge currents induced by a potential; orientation low index -> high."""

    graph: object
    edges: list
    currents: np.ndarray
    dissipation: float

    def divergence(self):
        """Net current out of each vertex; a unit dipole flow gives +-1 at the poles."""
        div = np.zeros(self.graph.n)
        for (i, j, _), cur in zip(self.edges, self.currents):
            div[i] += cur
            div[j] -= cur
        return div

    def current_between(self, x, y):
        for (i, j, _), cur in zip(self.edges, self.currents):
            if (i, j) == (min(x, y), max(x, y)):
                return cur if i == x else -cur
        return 0.0


def current_of_dipole(dipole):
    """Ohm's law edge by edge: I_(xy) = c_xy (v(x) - v(y))."""
    graph = dipole.graph
    edges = graph.edge_list()
    vals = dipole.values
    currents = np.array([c * (vals[i] - vals[j]) for i, j, c in edges])
    dissipation = math.fsum(
        cur * cur / c for (_, _, c), cur in zip(edges, currents)
    )
    return CurrentFlow(graph, edges, currents, dissipation)


# -- full matrices -------------------------------------------------------------


@dataclass
class ResistanceMatrix:
    graph: object
    matrix: np.ndarray
    method: str
    tol: float
    sym_residual: float = 0.0

    def triangle_slack(self):
        """min over triples of d(x,z) + d(z,y) - d(x,y); negative = violation."""
        d = self.matrix
        worst = np.inf
        for z in range(d.shape[0]):
            slack = d[:, z, None] + d[None, z, :] - d
            np.fill_diagonal(slack, np.inf)
            slack[z, :] = np.inf
            slack[:, z] = np.inf
            worst = min(worst, float(slack.min()))
        return worst

    def to_csv(self, path):
        import csv

        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["label"] + [str(l) for l in self.graph.labels])
            for i, row in enumerate(self.matrix):
                writer.writerow([str(self.graph.labels[i])] + [repr(float(v)) for v in row])


def resistance_matrix(g, method="M2", tol=1e-10, size_cap=2000):
    """All pairwise resistances as a symmetric matrix with zero diagonal.

    M2 builds the dipole Gram structure in n-1 conjugate-gradient solves; M4
    is the dense grounded-inverse route.  The remaining methods fall back to
    pairwise queries (quadratic in n; meant for small graphs).
    """
    graph = underlying(g)
    if graph.n > size_cap:
        raise GraphError(
            f"matrix capped at {size_cap} vertices (graph has {graph.n}); "
            "query pairwise resistances instead"
        )
    method = _ALIASES.get(method, method)
    base = graph.base_point
    if method in ("M2", "M4"):
        k = np.zeros((graph.n, graph.n))
        if method == "M2":
            for x in range(graph.n):
                if x != base:
                    k[:, x] = solve_dipole(graph, x, base, tol).values
        else:
            reduced, keep = _grounded_dense(graph, base)
            k[np.ix_(keep, keep)] = np.linalg.inv(reduced)
        sym_residual = float(np.max(np.abs(k - k.T)))
        k = 0.5 * (k + k.T)
        diag = np.diag(k)
        d = diag[:, None] + diag[None, :] - 2.0 * k
        np.fill_diagonal(d, 0.0)
        return ResistanceMatrix(graph, d, method, tol, sym_residual)
    if method in METHODS:
        d = np.zeros((graph.n, graph.n))
        for x in range(graph.n):
            for y in range(x + 1, graph.n):
                d[x, y] = d[y, x] = resistance(graph, x, y, method, tol)
        return ResistanceMatrix(graph, d, method, tol, 0.0)
    raise GraphError(f"unknown method {method!r}; choose from {METHODS}")


# -- family diagnostics --------------------------------------------------------


def _base_distances(graph):
    """d(base, x) for every x, via one dense grounded inverse."""
    reduced, keep = _grounded_dense(graph, graph.base_point)
    inv = np.linalg.inv(reduced)
    out = np.zeros(graph.n)
    out[keep] = np.diag(inv)
    return out


def _geodesic_ray(graph):
    """Hop-geodesic from the base to a deepest vertex (ties broken by label)."""
    from .graphs import _label_sort_key

    hop = graph.hop_distance
    deepest = max(
        (i for i in range(graph.n) if hop[i] == hop.max()),
        key=lambda i: _label_sort_key(graph.labels[i]),
    )
    path = [deepest]
    while hop[path[-1]] > 0:
        nbrs, _ = graph.neighbors(path[-1])
        parents = [int(j) for j in nbrs if hop[j] == hop[path[-1]] - 1]
        path.append(min(parents, key=lambda i: _label_sort_key(graph.labels[i])))
    return list(reversed(path))


def boundedness_diagnostic(family, radii, params=None):
    """Track max_x d(base, x) across radii to see whether the metric stays bounded.

    Also reports the plain resistance sum (sum of 1/c) along a hop geodesic,
    the series whose convergence controls the one-ray picture.
    """
    if len(radii) < 2:
        raise GraphError("boundedness diagnostic needs at least two radii")
    params = dict(params or {})
    rows = []
    for radius in sorted(radii):
        trunc = generate(family, radius=radius, **params)
        graph = trunc.graph
        dists = _base_distances(graph)
        ray = _geodesic_ray(graph)
        ray_sum = math.fsum(
            1.0 / graph.conductance(a, b) for a, b in zip(ray, ray[1:])
        )
        rows.append(
            {
                "radius": radius,
                "vertices": graph.n,
                "max_distance": float(dists.max()),
                "ray_resistance_sum": ray_sum,
                "ray_tip": str(graph.labels[ray[-1]]),
            }
        )
    maxima = [row["max_distance"] for row in rows]
    diffs = np.diff(maxima)
    if len(diffs) and np.all(diffs[1:] <= diffs[:-1] + 1e-12) and diffs[-1] <= 0.75 * diffs[0] + 1e-12:
        trend = "bounded"
    elif len(diffs) and diffs[-1] >= 0.9 * diffs[0] - 1e-12:
        trend = "growing"
    else:
        trend = "inconclusive"
    return {
        "family": family,
        "params": params,
        "per_radius": rows,
        "max_distance_diffs": diffs.tolist(),
        "trend": trend,
    }


_RAY_FAMILIES = ("comb", "binary-tree", "nary-tree", "halfline")


def _pinv_distances(graph):
    lap = assemble_laplacian(graph).as_csr().toarray()
    pinv = np.linalg.pinv(lap)
    diag = np.diag(pinv)
    return diag[:, None] + diag[None, :] - pinv - pinv.T


def type_a_diagnostic(family, radius, params=None, max_depth=None):
    """Sample distances along and across the labeled rays of a family.

    Distinct comb teeth keep a positive distance floor however deep one goes
    (the completion is not totally bounded there); tree rays with summable
    edge resistances collapse; the half-line has a single Cauchy ray.
    Reports signatures, not certificates.
    """
    if family not in _RAY_FAMILIES:
        raise GraphError(
            f"type-A diagnostic unsupported for family {family!r}: no labeled rays"
        )
    params = dict(params or {})
    trunc = generate(family, radius=radius, **params)
    graph = trunc.graph
    d = _pinv_distances(graph)
    idx = graph.index_of
    report = {"family": family, "radius": radius, "params": params}
    if family == "comb":
        depth = radius - 2 if max_depth is None else min(max_depth, radius - 2)
        cross = []
        for k in range(1, depth + 1):
            cross.append(
                {
                    "k": k,
                    "d01": float(d[idx((0, k)), idx((1, k))]),
                    "d02": float(d[idx((0, k)), idx((2, k))]),
                    "d12": float(d[idx((1, k)), idx((2, k))]),
                }
            )
        floor = min(min(row["d01"], row["d02"], row["d12"]) for row in cross)
        report.update(
            cross_teeth=cross,
            distance_floor=floor,
            signature="separated" if floor > 1e-2 else "collapsing",
        )
        return report
    if family in ("binary-tree", "nary-tree"):
        word = (lambda n: "+" * n) if family == "binary-tree" else (lambda n: (0,) * n)
        depth = radius - 1 if max_depth is None else min(max_depth, radius - 1)
        steps = [
            {"level": n, "step": float(d[idx(word(n)), idx(word(n + 1))])}
            for n in range(depth)
        ]
        vals = [s["step"] for s in steps]
        collapsing = all(b < a for a, b in zip(vals, vals[1:])) and vals[-1] < 0.25 * vals[0]
        report.update(
            within_ray=steps, signature="collapsing" if collapsing else "separated"
        )
        return report
    depth = radius if max_depth is None else min(max_depth, radius)
    steps = [
        {"level": n, "step": float(d[idx(n), idx(n + 1)])} for n in range(depth)
    ]
    vals = [s["step"] for s in steps]
    cauchy = all(b <= a for a, b in zip(vals, vals[1:]))
    report.update(within_ray=steps, signature="cauchy-ray" if cauchy else "growing")
    return report


def continuum_reference(x, y):
    """Closed forms of the continuous one-dimensional model.

    Kernel exp(-|x-y|) and distance 2(1 - exp(-|x-y|)); the distance never
    reaches 2, so the continuum metric is bounded.
    """
    gap = abs(float(x) - float(y))
    kernel = math.exp(-gap)
    return kernel, 2.0 * (1.0 - kernel)
