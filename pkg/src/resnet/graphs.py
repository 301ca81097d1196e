"""Conductance networks: validated weighted graphs, family generators, and
finite truncations with a marked absorbing frontier.

A conductance network is an undirected graph with strictly positive symmetric
edge weights (siemens; the reciprocal of each weight is the edge resistance in
ohms) and a distinguished base vertex.  Vertices are indexed breadth-first
from the base point, ties within a distance shell broken by label, so the
radius-R ball of any generated family is an index prefix of the
radius-(R+1) ball.  Graphs are immutable once built and safe to share
across threads.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

__all__ = [
    "GraphError",
    "ValidationIssue",
    "ValidationReport",
    "ConductanceGraph",
    "TruncatedGraph",
    "validate",
    "validate_edge_data",
    "generate",
    "truncate",
    "with_frontier",
    "load_graph",
    "underlying",
    "as_truncated",
    "FAMILIES",
]

_WEIGHT_MATCH_RTOL = 1e-12


class GraphError(Exception):
    """Structurally unusable graph input or invalid generator parameters.

    Carries an optional `report` attribute with the validation issues that
    triggered the failure, when raised from a loading/validation path.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    detail: str

    def __str__(self):
        return f"{self.code}: {self.detail}"


@dataclass
class ValidationReport:
    """Outcome of a structural check.  Empty `issues` means the input is valid."""

    issues: list

    @property
    def ok(self):
        return not self.issues

    def codes(self):
        return sorted({issue.code for issue in self.issues})

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(str(issue) for issue in self.issues)


def _label_sort_key(label):
    # Total order over heterogeneous labels: numbers, strings, tuples, then
    # anything else by its repr.  Only used for deterministic tie-breaking.
    if isinstance(label, bool):
        return (3, str(label), "")
    if isinstance(label, (int, float, np.integer, np.floating)):
        return (0, float(label), "")
    if isinstance(label, str):
        return (1, label, "")
    if isinstance(label, tuple):
        return (2, tuple(_label_sort_key(part) for part in label), "")
    return (3, repr(label), "")


def _label_to_json(label):
    if isinstance(label, tuple):
        return [_label_to_json(part) for part in label]
    if isinstance(label, (np.integer,)):
        return int(label)
    if isinstance(label, (np.floating,)):
        return float(label)
    return label


def _label_from_json(obj):
    if isinstance(obj, list):
        return tuple(_label_from_json(part) for part in obj)
    return obj


class ConductanceGraph:
    """Immutable weighted graph in compressed sparse row form.

    Attributes
    ----------
    n : int
        Number of vertices.
    base_point : int
        Index of the gauge vertex (potentials are pinned to 0 there).
    labels : list
        Vertex labels, indexed by vertex.  Labels are the stable identity of
        a vertex; indices are an implementation detail of one build.
    indptr, indices, weights : ndarray
        CSR neighbor structure; each undirected edge is stored in both
        directions with the same weight.
    hop_distance : ndarray of int
        Unweighted graph distance from the base point (-1 if unreachable).
    """

    def __init__(self, base_point, labels, indptr, indices, weights, hop_distance):
        self.base_point = int(base_point)
        self.labels = list(labels)
        self.indptr = indptr
        self.indices = indices
        self.weights = weights
        self.hop_distance = hop_distance
        self.n = len(self.labels)
        self.label_index = {label: i for i, label in enumerate(self.labels)}
        for arr in (self.indptr, self.indices, self.weights, self.hop_distance):
            arr.flags.writeable = False
        self._cache = {}

    # -- construction ------------------------------------------------------

    @classmethod
    def from_edges(cls, edges, base_point, vertices=None):
        """Build a graph from an iterable of (u, v, weight) triples.

        Vertex identities are the labels `u`, `v` themselves (ints, strings,
        or tuples).  `vertices` may declare additional isolated vertices.
        Listing an edge twice is allowed when the weights agree; conflicting
        duplicates, self-loops, and nonpositive or nonfinite weights are
        rejected.  Disconnected input is accepted here and reported by
        :func:`validate` (unreachable vertices are indexed last).
        """
        adjacency = {}
        if vertices is not None:
            for v in vertices:
                adjacency.setdefault(v, {})
        for u, v, w in edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u!r}")
            w = float(w)
            if not math.isfinite(w) or w <= 0.0:
                raise GraphError(f"edge ({u!r}, {v!r}) has invalid weight {w!r}")
            row = adjacency.setdefault(u, {})
            prev = row.get(v)
            if prev is not None and not math.isclose(prev, w, rel_tol=_WEIGHT_MATCH_RTOL):
                raise GraphError(
                    f"conflicting weights for edge ({u!r}, {v!r}): {prev!r} vs {w!r}"
                )
            row[v] = w
            adjacency.setdefault(v, {})[u] = w
        if base_point not in adjacency:
            raise GraphError(f"base point {base_point!r} not among the vertices")

        # Breadth-first distances from the base point.
        dist = {base_point: 0}
        queue = deque([base_point])
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        reached = sorted(dist, key=lambda l: (dist[l], _label_sort_key(l)))
        unreached = sorted((l for l in adjacency if l not in dist), key=_label_sort_key)
        order = reached + unreached

        index = {label: i for i, label in enumerate(order)}
        indptr = np.zeros(len(order) + 1, dtype=np.int64)
        cols, vals = [], []
        for i, label in enumerate(order):
            row = sorted((index[v], w) for v, w in adjacency[label].items())
            indptr[i + 1] = indptr[i] + len(row)
            cols.extend(c for c, _ in row)
            vals.extend(w for _, w in row)
        hop = np.array([dist.get(l, -1) for l in order], dtype=np.int64)
        return cls(
            index[base_point],
            order,
            indptr,
            np.asarray(cols, dtype=np.int64),
            np.asarray(vals, dtype=np.float64),
            hop,
        )

    # -- queries -----------------------------------------------------------

    @property
    def num_edges(self):
        return len(self.indices) // 2

    def neighbors(self, x):
        """Neighbor indices and weights of vertex index `x` as array views."""
        if not 0 <= x < self.n:
            raise GraphError(f"vertex index {x} out of range [0, {self.n})")
        lo, hi = self.indptr[x], self.indptr[x + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def weighted_degree(self, x):
        """c(x): the sum of the weights of the edges incident to `x`."""
        _, w = self.neighbors(x)
        return float(w.sum())

    @property
    def degrees(self):
        """Vector of weighted degrees c(x), cached."""
        if "degrees" not in self._cache:
            deg = np.add.reduceat(
                np.append(self.weights, 0.0), self.indptr[:-1]
            ) * (np.diff(self.indptr) > 0)
            deg.flags.writeable = False
            self._cache["degrees"] = deg
        return self._cache["degrees"]

    def conductance(self, x, y):
        """Weight of edge (x, y), or 0.0 when not adjacent."""
        nbrs, w = self.neighbors(x)
        pos = np.searchsorted(nbrs, y)
        if pos < len(nbrs) and nbrs[pos] == y:
            return float(w[pos])
        return 0.0

    def adjacency(self):
        """Weights as a scipy CSR matrix (cached, do not mutate)."""
        if "adjacency" not in self._cache:
            mat = sparse.csr_matrix(
                (self.weights, self.indices, self.indptr), shape=(self.n, self.n)
            )
            self._cache["adjacency"] = mat
        return self._cache["adjacency"]

    def index_of(self, label):
        try:
            return self.label_index[label]
        except KeyError:
            raise GraphError(f"unknown vertex label {label!r}") from None

    def edge_list(self):
        """Undirected edges as (i, j, w) with i < j, ordered by (i, j)."""
        out = []
        for i in range(self.n):
            nbrs, w = self.neighbors(i)
            for j, wij in zip(nbrs, w):
                if i < j:
                    out.append((i, int(j), float(wij)))
        return out

    def __repr__(self):
        return (
            f"ConductanceGraph(n={self.n}, edges={self.num_edges}, "
            f"base={self.labels[self.base_point]!r})"
        )

    # -- serialization -----------------------------------------------------

    def to_data(self):
        return {
            "vertices": self.n,
            "base_point": self.base_point,
            "edges": [[i, j, w] for i, j, w in self.edge_list()],
            "labels": [_label_to_json(l) for l in self.labels],
        }

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_data(), fh, indent=1)
            fh.write("\n")


@dataclass
class TruncatedGraph:
    """A finite graph with an interior/frontier split.

    The frontier is the absorbing boundary: a stand-in, at one finite radius,
    for the ideal boundary of the infinite graph the ball was cut from.
    Finite families have an empty frontier.
    """

    graph: ConductanceGraph
    radius: int
    interior: np.ndarray
    frontier: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.interior = np.asarray(self.interior, dtype=np.int64)
        self.frontier = np.asarray(self.frontier, dtype=np.int64)
        for arr in (self.interior, self.frontier):
            arr.flags.writeable = False

    @property
    def frontier_mask(self):
        mask = np.zeros(self.graph.n, dtype=bool)
        mask[self.frontier] = True
        return mask

    @property
    def frontier_labels(self):
        return [self.graph.labels[i] for i in self.frontier]

    def to_data(self):
        data = self.graph.to_data()
        data["radius"] = int(self.radius)
        data["frontier"] = [_label_to_json(self.graph.labels[i]) for i in self.frontier]
        return data

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_data(), fh, indent=1)
            fh.write("\n")


def underlying(g):
    """The ConductanceGraph beneath either graph type."""
    return g.graph if isinstance(g, TruncatedGraph) else g


def as_truncated(g):
    """Wrap a plain graph as a truncation with empty frontier (all interior)."""
    if isinstance(g, TruncatedGraph):
        return g
    radius = int(g.hop_distance.max())
    return TruncatedGraph(g, radius, np.arange(g.n), np.empty(0, dtype=np.int64))


# -- validation --------------------------------------------------------------


def validate(graph):
    """Check the built graph against the structural invariants.

    Never raises: every violation (stored asymmetry, nonpositive weight,
    self-loop, disconnection, zero-degree vertex) becomes an issue in the
    returned report.  An empty report means the graph is valid.
    """
    issues = []
    adj = graph.adjacency()
    asym = abs(adj - adj.T)
    if asym.nnz and asym.max() > 0:
        rows, cols = asym.nonzero()
        i, j = int(rows[0]), int(cols[0])
        issues.append(
            ValidationIssue(
                "asymmetric",
                f"stored weights differ across orientations, e.g. edge ({i}, {j})",
            )
        )
    if adj.diagonal().any():
        loops = np.flatnonzero(adj.diagonal())
        issues.append(
            ValidationIssue("self-loop", f"diagonal entries at vertices {loops.tolist()[:5]}")
        )
    bad = np.flatnonzero(~np.isfinite(graph.weights) | (graph.weights <= 0))
    if len(bad):
        issues.append(
            ValidationIssue(
                "nonpositive-weight",
                f"{len(bad)} stored weights are nonpositive or nonfinite",
            )
        )
    isolated = np.flatnonzero(np.diff(graph.indptr) == 0)
    if len(isolated):
        issues.append(
            ValidationIssue(
                "zero-degree",
                f"vertices without edges: {[graph.labels[i] for i in isolated[:5]]}",
            )
        )
    unreachable = np.flatnonzero(graph.hop_distance < 0)
    if len(unreachable):
        issues.append(
            ValidationIssue(
                "disconnected",
                f"{len(unreachable)} vertices unreachable from the base point, "
                f"e.g. {[graph.labels[i] for i in unreachable[:5]]}",
            )
        )
    return ValidationReport(issues)


def validate_edge_data(num_vertices, base_point, edges):
    """Validate a raw indexed edge list before any graph is built.

    This is the loader-side check: it sees directed duplicates, so it can
    report asymmetric weights that :meth:`ConductanceGraph.from_edges` would
    refuse to store.  Never raises.
    """
    issues = []
    if not isinstance(num_vertices, int) or num_vertices < 1:
        issues.append(ValidationIssue("bad-count", f"vertices must be a positive int, got {num_vertices!r}"))
        return ValidationReport(issues)
    if not isinstance(base_point, int) or not 0 <= base_point < num_vertices:
        issues.append(
            ValidationIssue("bad-base", f"base_point {base_point!r} not in [0, {num_vertices})")
        )
    seen = {}
    adjacency = {v: set() for v in range(num_vertices)}
    for e in edges:
        try:
            x, y, w = e
            x, y, w = int(x), int(y), float(w)
        except (TypeError, ValueError):
            issues.append(ValidationIssue("bad-edge", f"malformed edge entry {e!r}"))
            continue
        if not (0 <= x < num_vertices and 0 <= y < num_vertices):
            issues.append(ValidationIssue("bad-index", f"edge ({x}, {y}) out of range"))
            continue
        if x == y:
            issues.append(ValidationIssue("self-loop", f"edge ({x}, {x})"))
            continue
        if not math.isfinite(w) or w <= 0.0:
            issues.append(ValidationIssue("nonpositive-weight", f"edge ({x}, {y}) weight {w!r}"))
            continue
        key = (min(x, y), max(x, y))
        if key in seen and not math.isclose(seen[key], w, rel_tol=_WEIGHT_MATCH_RTOL):
            issues.append(
                ValidationIssue(
                    "asymmetric",
                    f"edge {key} listed with weights {seen[key]!r} and {w!r}",
                )
            )
            continue
        seen[key] = w
        adjacency[x].add(y)
        adjacency[y].add(x)
    for v in range(num_vertices):
        if not adjacency[v]:
            issues.append(ValidationIssue("zero-degree", f"vertex {v} has no edges"))
    if isinstance(base_point, int) and 0 <= base_point < num_vertices:
        dist = {base_point}
        queue = deque([base_point])
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                if v not in dist:
                    dist.add(v)
                    queue.append(v)
        if len(dist) < num_vertices:
            missing = sorted(set(range(num_vertices)) - dist)
            issues.append(
                ValidationIssue(
                    "disconnected",
                    f"{len(missing)} vertices unreachable from base, e.g. {missing[:5]}",
                )
            )
    return ValidationReport(issues)


# -- truncation ---------------------------------------------------------------


def truncate(g, radius):
    """Closed ball of hop radius `radius` around the base point.

    The ball is the induced subgraph on vertices at distance <= radius;
    vertices at distance exactly `radius` form the absorbing frontier.
    Because vertex order is (distance, label), the radius-R ball is an index
    prefix of the radius-(R+1) ball of the same graph.
    """
    graph = underlying(g)
    if radius < 1:
        raise GraphError("truncation radius must be >= 1")
    hop = graph.hop_distance
    keep = (hop >= 0) & (hop <= radius)
    keep_labels = {graph.labels[i] for i in np.flatnonzero(keep)}
    edges = [
        (graph.labels[i], graph.labels[j], w)
        for i, j, w in graph.edge_list()
        if graph.labels[i] in keep_labels and graph.labels[j] in keep_labels
    ]
    sub = ConductanceGraph.from_edges(
        edges, graph.labels[graph.base_point], vertices=keep_labels
    )
    return _ball_result(sub, radius)


def _ball_result(graph, radius):
    hop = graph.hop_distance
    interior = np.flatnonzero((hop >= 0) & (hop < radius))
    frontier = np.flatnonzero(hop == radius)
    return TruncatedGraph(graph, int(radius), interior, frontier)


def with_frontier(graph, frontier_labels):
    """Designate an explicit absorbing frontier on a finite graph by label."""
    graph = underlying(graph)
    idx = sorted(graph.index_of(l) for l in frontier_labels)
    if graph.base_point in idx:
        raise GraphError("base point cannot be on the frontier")
    mask = np.zeros(graph.n, dtype=bool)
    mask[idx] = True
    return TruncatedGraph(
        graph,
        int(graph.hop_distance.max()),
        np.flatnonzero(~mask),
        np.asarray(idx, dtype=np.int64),
    )


# -- generator families -------------------------------------------------------


def _require(cond, message):
    if not cond:
        raise GraphError(message)


def _check_radius(radius):
    _require(
        isinstance(radius, int) and radius >= 1,
        "infinite families need an integer truncation radius >= 1",
    )
    return radius


def _finite_weight(w, context):
    _require(math.isfinite(w), f"{context} overflows double precision; reduce the radius")
    return w


def _gen_explicit(radius=None, *, edges, base_point, vertices=None):
    graph = ConductanceGraph.from_edges(edges, base_point, vertices=vertices)
    if radius is not None:
        return truncate(graph, radius)
    return as_truncated(graph)


def _gen_wye(radius=None, *, r1=1.0, r2=1.0, r3=1.0):
    # Two terminals joined through a middle node: a series resistor r1 into a
    # parallel pair (r2, r3), realized with the pair merged into one edge.
    for name, r in (("r1", r1), ("r2", r2), ("r3", r3)):
        _require(math.isfinite(r) and r > 0, f"wye requires {name} > 0")
    edges = [("a", "m", 1.0 / r1), ("m", "b", 1.0 / r2 + 1.0 / r3)]
    return as_truncated(ConductanceGraph.from_edges(edges, "a"))


def _gen_halfline(radius=None, *, growth=math.e):
    radius = _check_radius(radius)
    _require(math.isfinite(growth) and growth > 0, "halfline requires growth > 0")
    _finite_weight(growth ** radius, f"growth**{radius}")
    edges = [(k, k + 1, growth ** k) for k in range(radius)]
    return _ball_result(ConductanceGraph.from_edges(edges, 0), radius)


def _gen_lattice(radius=None, *, d=2):
    radius = _check_radius(radius)
    _require(isinstance(d, int) and d >= 1, "lattice requires integer dimension d >= 1")
    _finite_weight(math.exp(radius), f"exp({radius})")
    points = [
        x for x in itertools.product(range(radius + 1), repeat=d) if sum(x) <= radius
    ]
    edges = []
    for x in points:
        if sum(x) >= radius:
            continue
        for i in range(d):
            y = x[:i] + (x[i] + 1,) + x[i + 1 :]
            edges.append((x, y, math.exp(math.hypot(*y))))
    base = (0,) * d
    return _ball_result(ConductanceGraph.from_edges(edges, base, vertices=points), radius)


def _tree_edges(radius, root, children_of, weight_of):
    edges = []
    level = [root]
    for depth in range(radius):
        nxt = []
        for word in level:
            for child in children_of(word):
                edges.append((word, child, weight_of(depth, child)))
                nxt.append(child)
        level = nxt
    return edges


def _gen_binary_tree(radius=None, *, b_plus=2.0, b_minus=2.0):
    radius = _check_radius(radius)
    for name, b in (("b_plus", b_plus), ("b_minus", b_minus)):
        _require(math.isfinite(b) and b > 0, f"binary-tree requires {name} > 0")
    _finite_weight(max(b_plus, b_minus) ** radius, "level weight")

    def children(word):
        return (word + "+", word + "-")

    def weight(depth, child):
        return (b_plus if child.endswith("+") else b_minus) ** depth

    edges = _tree_edges(radius, "", children, weight)
    return _ball_result(ConductanceGraph.from_edges(edges, ""), radius)


def _gen_nary_tree(radius=None, *, branching=2, b=2.0):
    radius = _check_radius(radius)
    _require(isinstance(branching, int) and branching >= 2, "nary-tree requires branching >= 2")
    _require(math.isfinite(b) and b > 1, "nary-tree requires b > 1")
    _finite_weight(b ** radius, "level weight")

    def children(word):
        return tuple(word + (c,) for c in range(branching))

    edges = _tree_edges(radius, (), children, lambda depth, child: b ** depth)
    return _ball_result(ConductanceGraph.from_edges(edges, ()), radius)


def _gen_comb(radius=None):
    # Spine vertices (n, 0) with teeth climbing in k; tooth edges double with
    # every step, so the walk along a tooth moves outward with probability 2/3.
    radius = _check_radius(radius)
    edges = []
    for n in range(radius):
        edges.append(((n, 0), (n + 1, 0), 2.0 ** (n + 1)))
    for n in range(radius + 1):
        for k in range(radius - n):
            edges.append(((n, k), (n, k + 1), 2.0 ** (k + 1)))
    return _ball_result(ConductanceGraph.from_edges(edges, (0, 0)), radius)


def _gen_bratteli(radius=None, *, level_sizes, level_weights):
    _require(len(level_sizes) >= 2, "bratteli requires at least two levels")
    _require(
        len(level_weights) == len(level_sizes) - 1,
        "bratteli requires one weight per adjacent level pair",
    )
    for m in level_sizes:
        _require(isinstance(m, int) and m >= 1, "bratteli level sizes must be ints >= 1")
    for w in level_weights:
        _require(math.isfinite(w) and w > 0, "bratteli level weights must be > 0")
    if radius is None:
        radius = len(level_sizes) - 1
    _check_radius(radius)
    _require(radius <= len(level_sizes) - 1, "radius exceeds the number of levels")
    edges = []
    for n in range(radius):
        for j in range(level_sizes[n]):
            for i in range(level_sizes[n + 1]):
                edges.append(((n, j), (n + 1, i), level_weights[n]))
    vertices = [(n, j) for n in range(radius + 1) for j in range(level_sizes[n])]
    return _ball_result(ConductanceGraph.from_edges(edges, (0, 0), vertices=vertices), radius)


def _gen_chain(radius=None, *, width, growth=2.0):
    # Finite cut of the two-sided geometric chain; both cut ends absorb, the
    # base sits at the middle.  With growth g the walk steps up with constant
    # probability g/(1+g) at every interior vertex.
    _require(radius is None, "chain takes width, not a radius")
    _require(isinstance(width, int) and width >= 3, "chain requires integer width >= 3")
    _require(math.isfinite(growth) and growth > 0, "chain requires growth > 0")
    _finite_weight(growth ** (width - 2), "chain weight")
    edges = [(i, i + 1, growth ** i) for i in range(width - 1)]
    graph = ConductanceGraph.from_edges(edges, width // 2)
    return with_frontier(graph, [0, width - 1])


FAMILIES = {
    "explicit": _gen_explicit,
    "wye": _gen_wye,
    "halfline": _gen_halfline,
    "lattice": _gen_lattice,
    "binary-tree": _gen_binary_tree,
    "nary-tree": _gen_nary_tree,
    "comb": _gen_comb,
    "bratteli": _gen_bratteli,
    "chain": _gen_chain,
}


def generate(family, radius=None, **params):
    """Build a named example family, truncated to `radius` where infinite.

    Families: explicit, wye, halfline, lattice, binary-tree, nary-tree, comb,
    bratteli, chain.  Returns a TruncatedGraph; finite families come back
    with an empty frontier.  Deterministic: the same arguments yield the
    same graph, indices included.
    """
    try:
        builder = FAMILIES[family]
    except KeyError:
        known = ", ".join(sorted(FAMILIES))
        raise GraphError(f"unknown family {family!r}; known families: {known}") from None
    try:
        result = builder(radius, **params)
    except TypeError as exc:
        raise GraphError(f"bad parameters for family {family!r}: {exc}") from None
    report = validate(result.graph)
    if not report.ok:
        raise GraphError(f"generator produced an invalid graph:\n{report}", report)
    return result


# -- JSON loading -------------------------------------------------------------

_FATAL_LOAD_CODES = {
    "bad-count",
    "bad-base",
    "bad-edge",
    "bad-index",
    "self-loop",
    "nonpositive-weight",
    "asymmetric",
}


def load_graph(path):
    """Load a graph JSON file, returning a TruncatedGraph.

    The format is ``{"vertices": N, "base_point": i, "edges": [[x, y, c],
    ...]}`` with each undirected edge stored once (both orientations are
    accepted when the weights agree), plus optional ``labels``, ``radius``
    and ``frontier`` (a list of labels).  Corrupt structure raises
    GraphError carrying the validation report; disconnection and isolated
    vertices load fine and are left to :func:`validate`.
    """
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise GraphError(f"cannot read graph file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise GraphError(f"not valid JSON: {exc}") from None
    for key in ("vertices", "base_point", "edges"):
        if key not in data:
            raise GraphError(f"graph file is missing the {key!r} field")
    report = validate_edge_data(data["vertices"], data["base_point"], data["edges"])
    fatal = [issue for issue in report.issues if issue.code in _FATAL_LOAD_CODES]
    if fatal:
        raise GraphError(
            "graph file failed validation:\n" + "\n".join(map(str, fatal)),
            ValidationReport(fatal),
        )
    n = data["vertices"]
    labels = data.get("labels")
    if labels is None:
        labels = list(range(n))
    else:
        if len(labels) != n:
            raise GraphError("labels length does not match vertex count")
        labels = [_label_from_json(l) for l in labels]
    edges = [(labels[int(x)], labels[int(y)], float(w)) for x, y, w in data["edges"]]
    graph = ConductanceGraph.from_edges(
        edges, labels[data["base_point"]], vertices=labels
    )
    if "frontier" in data:
        frontier = [_label_from_json(l) for l in data["frontier"]]
        trunc = with_frontier(graph, frontier)
        if "radius" in data:
            trunc.radius = int(data["radius"])
        return trunc
    return as_truncated(graph)
