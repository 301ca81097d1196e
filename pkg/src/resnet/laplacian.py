"""Graph Laplacian, random-walk transition operator, and the comb defect
recursion.

The Laplacian acts by (Lu)(x) = sum_{y~x} c_xy (u(x) - u(y)); in matrix form
L = C - A with C = diag(weighted degrees) and A the weighted adjacency.  The
transition operator P = C^{-1} A is row-stochastic and reversible with
respect to the degree weights: c(x) p_xy = c(y) p_yx = c_xy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .graphs import GraphError, TruncatedGraph, underlying

__all__ = [
    "LaplacianOperator",
    "TransitionOperator",
    "assemble_laplacian",
    "transition_operator",
    "apply",
    "l2_symmetry_check",
    "harmonic_extension",
    "interior_laplacian",
    "CombDefectReport",
    "defect_recursion_comb",
    "comb_forward_recursion",
    "write_coordinate_format",
]


@dataclass
class LaplacianOperator:
    """L = C - A for one graph: `diagonal` holds c(x), `offdiag` holds A."""

    graph: object
    diagonal: np.ndarray
    offdiag: sparse.csr_matrix

    def apply(self, u):
        u = np.asarray(u, dtype=np.float64)
        if u.shape != (self.graph.n,):
            raise GraphError(f"expected a vector of length {self.graph.n}, got {u.shape}")
        return self.diagonal * u - self.offdiag @ u

    def as_csr(self):
        return sparse.diags(self.diagonal) - self.offdiag

    def quadratic_form(self, u):
        return float(np.dot(u, self.apply(u)))


@dataclass
class TransitionOperator:
    """Row-stochastic walk operator P with p_xy = c_xy / c(x)."""

    graph: object
    matrix: sparse.csr_matrix

    def apply(self, u):
        u = np.asarray(u, dtype=np.float64)
        if u.shape != (self.graph.n,):
            raise GraphError(f"expected a vector of length {self.graph.n}, got {u.shape}")
        return self.matrix @ u


def assemble_laplacian(g):
    """Assemble (and cache) the Laplacian of a graph or truncation."""
    graph = underlying(g)
    if "laplacian" not in graph._cache:
        graph._cache["laplacian"] = LaplacianOperator(
            graph, np.asarray(graph.degrees, dtype=np.float64), graph.adjacency()
        )
    return graph._cache["laplacian"]


def transition_operator(g):
    """Assemble (and cache) the walk operator; zero-degree vertices have no rows."""
    graph = underlying(g)
    if "transition" not in graph._cache:
        deg = np.asarray(graph.degrees, dtype=np.float64)
        if np.any(deg <= 0):
            raise GraphError("transition operator undefined: zero-degree vertex present")
        inv = sparse.diags(1.0 / deg)
        graph._cache["transition"] = TransitionOperator(graph, (inv @ graph.adjacency()).tocsr())
    return graph._cache["transition"]


def apply(op, u):
    """Apply a Laplacian or transition operator to a vertex function."""
    return op.apply(u)


def l2_symmetry_check(op, trials=100, seed=0):
    """Max |<Lu, v> - <u, Lv>| over random pairs; zero up to roundoff."""
    rng = np.random.default_rng(seed)
    n = op.graph.n
    worst = 0.0
    for _ in range(trials):
        u = rng.standard_normal(n)
        v = rng.standard_normal(n)
        worst = max(worst, abs(np.dot(op.apply(u), v) - np.dot(u, op.apply(v))))
    return worst


# -- Dirichlet problems on a truncation ---------------------------------------


def interior_laplacian(trunc):
    """The interior block L_II with a cached sparse LU factorization.

    Returns (L_II, lu_solver).  The block is symmetric positive definite
    whenever the frontier is nonempty and reachable, which truncation
    guarantees.
    """
    if not isinstance(trunc, TruncatedGraph):
        raise GraphError("interior solves need a TruncatedGraph")
    if "interior_lu" not in trunc._cache:
        graph = trunc.graph
        lap = assemble_laplacian(graph).as_csr()
        block = lap[trunc.interior][:, trunc.interior].tocsc()
        trunc._cache["interior_lu"] = (block, splu(block))
    return trunc._cache["interior_lu"]


def harmonic_extension(trunc, boundary_values):
    """Solve the Dirichlet problem: Lh = 0 on the interior, h = f on the frontier.

    `boundary_values` is aligned with ``trunc.frontier``.  Returns the full
    vertex vector.
    """
    if len(trunc.frontier) == 0:
        raise GraphError("harmonic extension needs a nonempty frontier")
    f = np.asarray(boundary_values, dtype=np.float64)
    if f.shape != (len(trunc.frontier),):
        raise GraphError(
            f"expected {len(trunc.frontier)} boundary values, got shape {f.shape}"
        )
    graph = trunc.graph
    out = np.zeros(graph.n)
    out[trunc.frontier] = f
    if len(trunc.interior):
        adj = graph.adjacency()
        rhs = adj[trunc.interior][:, trunc.frontier] @ f
        _, lu = interior_laplacian(trunc)
        out[trunc.interior] = lu.solve(rhs)
    return out


# -- comb defect recursion -----------------------------------------------------


@dataclass
class CombDefectReport:
    """Decaying solution of the comb tooth recursion, normalized to l_0 = 1."""

    levels: int
    values: np.ndarray          # l_0 .. l_levels
    scaled: np.ndarray          # l_k * 2^k
    limit: float                # tail estimate of l_k * 2^k
    stabilized: bool            # False when `levels` was too small to settle
    energy_sum: float           # sum over k of 2^k (l_k - l_{k+1})^2
    max_residual: float         # worst recursion defect over the returned range


def defect_recursion_comb(levels):
    """Solve (1/3) l_{k-1} + (2/3) l_{k+1} = (1 + 1/(3*2^k)) l_k for the
    decaying branch.

    Recursing backward from far out keeps the decaying mode: forward shooting
    amplifies it away.  Seeds are planted hundreds of levels beyond the
    requested range, so the returned values carry no seeding bias at double
    precision.  `stabilized` is False (never an exception) when the scaled
    tail still moves by more than 1e-6.
    """
    if not isinstance(levels, int) or levels < 10:
        raise GraphError("defect recursion needs integer levels >= 10")
    if levels > 400:
        raise GraphError("levels > 400 would overflow the backward recursion")
    start = levels + 400
    hi, lo = 0.5, 1.0  # l_{start+1}, l_start, any decaying-scale seed pair works
    tail = np.empty(start + 2)
    tail[start + 1], tail[start] = hi, lo
    for k in range(start, 0, -1):
        tail[k - 1] = 3.0 * (1.0 + 1.0 / (3.0 * 2.0 ** k)) * tail[k] - 2.0 * tail[k + 1]
    values = tail[: levels + 2] / tail[0]
    scaled = values[: levels + 1] * np.exp2(np.arange(levels + 1))
    tail_moves = np.abs(np.diff(scaled[-6:]))
    stabilized = bool(np.all(tail_moves <= 1e-6))
    energy = math.fsum(
        2.0 ** k * (values[k] - values[k + 1]) ** 2 for k in range(levels + 1)
    )
    residual = max(
        abs(
            values[k - 1] / 3.0
            + 2.0 * values[k + 1] / 3.0
            - (1.0 + 1.0 / (3.0 * 2.0 ** k)) * values[k]
        )
        for k in range(1, levels + 1)
    )
    return CombDefectReport(
        levels=levels,
        values=values[: levels + 1],
        scaled=scaled,
        limit=float(scaled[-1]),
        stabilized=stabilized,
        energy_sum=energy,
        max_residual=residual,
    )


def comb_forward_recursion(l0, l1, levels):
    """Iterate the comb recursion forward from (l_0, l_1).

    Generic seeds excite the non-decaying branch; the characteristic roots of
    the constant-coefficient limit are 1 and 1/2, so forward iterates settle
    toward the root-1 branch (successive ratios tend to 1).
    """
    out = np.empty(levels + 1)
    out[0], out[1] = l0, l1
    for k in range(1, levels):
        out[k + 1] = (3.0 * (1.0 + 1.0 / (3.0 * 2.0 ** k)) * out[k] - out[k - 1]) / 2.0
    return out


# -- export --------------------------------------------------------------------

_EXPORTABLE = ("laplacian", "degree", "adjacency", "transition")


def write_coordinate_format(g, which, path):
    """Write one operator as text lines "row col value" (sorted by row, col)."""
    graph = underlying(g)
    if which not in _EXPORTABLE:
        raise GraphError(f"unknown operator {which!r}; choose from {_EXPORTABLE}")
    if which == "degree":
        mat = sparse.diags(np.asarray(graph.degrees, dtype=np.float64)).tocoo()
    elif which == "adjacency":
        mat = graph.adjacency().tocoo()
    elif which == "transition":
        mat = transition_operator(graph).matrix.tocoo()
    else:
        mat = assemble_laplacian(graph).as_csr().tocoo()
    order = np.lexsort((mat.col, mat.row))
    with open(path, "w") as fh:
        for k in order:
            fh.write(f"{mat.row[k]} {mat.col[k]} {float(mat.data[k])!r}\n")
