"""Immutable graph snapshots with exact metric combinatorics.

A :class:`Graph` is a finite snapshot of an (in general infinite) connected
graph: all vertices within ``core_radius`` of a base point carry their full
neighbourhoods, plus a designated base ray, a maximal geodesic starting at the
base point.  All distances are exact integers computed by BFS; Gromov products
and hyperbolicity constants are exact half-integers represented as
:class:`fractions.Fraction`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np


class GraphError(ValueError):
    """Malformed graph input or out-of-range vertex."""


class RayConstructionError(GraphError):
    """No geodesic from the given vertex merges into the base ray."""


class DistanceOracle:
    """Memoized per-source BFS distances for one graph."""

    def __init__(self, adjacency: tuple[tuple[int, ...], ...]):
        self._adjacency = adjacency
        self._rows: dict[int, np.ndarray] = {}
        self._matrix: np.ndarray | None = None

    def distances(self, source: int) -> np.ndarray:
        n = len(self._adjacency)
        if not 0 <= source < n:
            raise GraphError(f"unknown vertex id {source}")
        row = self._rows.get(source)
        if row is None:
            row = _bfs_row(self._adjacency, source)
            row.setflags(write=False)
            self._rows[source] = row
        return row

    def distance(self, x: int, y: int) -> int:
        return int(self.distances(x)[y])

    def matrix(self) -> np.ndarray:
        """Full all-pairs distance matrix (int32, read-only)."""
        if self._matrix is None:
            n = len(self._adjacency)
            m = np.vstack([self.distances(v) for v in range(n)])
            m.setflags(write=False)
            self._matrix = m
        return self._matrix


def _bfs_row(adjacency, source: int) -> np.ndarray:
    n = len(adjacency)
    dist = np.full(n, -1, dtype=np.int32)
    dist[source] = 0
    frontier = [source]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for v in frontier:
            for w in adjacency[v]:
                if dist[w] < 0:
                    dist[w] = d
                    nxt.append(w)
        frontier = nxt
    return dist


class Graph:
    """Immutable connected graph snapshot with base point and base ray.

    Parameters
    ----------
    adjacency:
        Sequence of neighbour lists; must be symmetric, irreflexive and
        connected.  Vertex ids are ``0..n-1``.
    base_point:
        Distinguished vertex (identity for Cayley-type providers).
    core_radius:
        Radius within which the snapshot is complete.  Defaults to the
        eccentricity of the base point.
    base_ray:
        Vertex sequence of a maximal geodesic starting at ``base_point``.
    labels:
        Optional human-readable vertex labels (group words, file ids).
    """

    def __init__(self, adjacency, base_point: int = 0, core_radius: int | None = None,
                 base_ray=None, labels=None, provider: str | None = None,
                 validate: bool = True):
        self.adjacency = tuple(tuple(sorted(set(nbrs))) for nbrs in adjacency)
        self.n = len(self.adjacency)
        self.base_point = int(base_point)
        self.labels = tuple(labels) if labels is not None else None
        self.provider = provider
        self._oracle = DistanceOracle(self.adjacency)
        self._rays: dict[int, Ray] = {}
        if validate:
            self._validate()
        ecc = int(self._oracle.distances(self.base_point).max())
        self.core_radius = ecc if core_radius is None else int(core_radius)
        if base_ray is None:
            base_ray = _longest_geodesic_from(self, self.base_point)
        self.base_ray = tuple(int(v) for v in base_ray)
        if validate:
            _check_geodesic_sequence(self, self.base_ray, "base ray")
            if self.base_ray[0] != self.base_point:
                raise GraphError("base ray must start at the base point")

    # -- basic accessors ---------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return self.n

    def vertices(self) -> range:
        return range(self.n)

    def neighbors(self, v: int) -> tuple[int, ...]:
        if not 0 <= v < self.n:
            raise GraphError(f"unknown vertex id {v}")
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    @property
    def oracle(self) -> DistanceOracle:
        return self._oracle

    def distances(self, source: int) -> np.ndarray:
        return self._oracle.distances(source)

    def distance(self, x: int, y: int) -> int:
        return self._oracle.distance(x, y)

    def distance_matrix(self) -> np.ndarray:
        return self._oracle.matrix()

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def label(self, v: int) -> str:
        if self.labels is None:
            return str(v)
        return self.labels[v]

    def vertex_by_label(self, label: str) -> int:
        if self.labels is None:
            raise GraphError("graph carries no label table")
        try:
            return self.labels.index(label)
        except ValueError:
            raise GraphError(f"no vertex labelled {label!r}") from None

    def ray(self, x: int) -> "Ray":
        """Memoized ray from x merging into the base ray (see build_ray)."""
        r = self._rays.get(x)
        if r is None:
            r = build_ray(self, x)
            self._rays[x] = r
        return r

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        tag = self.provider or "graph"
        return f"<Graph {tag}: {self.n} vertices, base {self.base_point}, core radius {self.core_radius}>"

    # -- validation --------------------------------------------------------

    def _validate(self) -> None:
        for v, nbrs in enumerate(self.adjacency):
            for w in nbrs:
                if not 0 <= w < self.n:
                    raise GraphError(f"edge ({v},{w}) leaves vertex range")
                if w == v:
                    raise GraphError(f"self-loop at vertex {v}")
                if v not in self.adjacency[w]:
                    raise GraphError(f"edge ({v},{w}) is not symmetric")
        if self.n and not 0 <= self.base_point < self.n:
            raise GraphError(f"base point {self.base_point} out of range")
        if (self._oracle.distances(self.base_point) < 0).any():
            raise GraphError("graph is not connected")


def bfs_distances(graph: Graph, source: int) -> np.ndarray:
    """Exact BFS distances from ``source`` to every vertex (memoized)."""
    return graph.distances(source)


def gromov_product(graph: Graph, x: int, y: int, w: int) -> Fraction:
    """Gromov product (x|y)_w = (d(x,w) + d(y,w) - d(x,y)) / 2, exact."""
    d = graph.distance
    return Fraction(d(x, w) + d(y, w) - d(x, y), 2)


# -- geodesics ---------------------------------------------------------------


@dataclass(frozen=True)
class GeodesicSet:
    """Enumerated geodesic vertex sequences between two vertices."""

    source: int
    target: int
    paths: tuple[tuple[int, ...], ...]
    truncated: bool

    def __iter__(self):
        return iter(self.paths)

    def __len__(self) -> int:
        return len(self.paths)


def enumerate_geodesics(graph: Graph, x: int, y: int, cap: int | None = None) -> GeodesicSet:
    """All geodesic vertex sequences from x to y, lexicographically ordered.

    With ``cap`` set, at most ``cap`` paths are returned and the result is
    flagged truncated.  Enumeration walks the BFS gradient towards y, visiting
    neighbours in ascending id order, so the output order is deterministic.
    """
    dist_to_y = graph.distances(y)
    if dist_to_y[x] < 0:
        raise GraphError(f"vertices {x} and {y} are disconnected")
    paths: list[tuple[int, ...]] = []
    truncated = False
    stack = [(x, (x,))]
    while stack:
        v, path = stack.pop()
        if v == y:
            paths.append(path)
            if cap is not None and len(paths) >= cap:
                truncated = bool(stack)
                break
            continue
        dv = dist_to_y[v]
        # push in reverse so ascending ids pop first
        for w in reversed(graph.neighbors(v)):
            if dist_to_y[w] == dv - 1:
                stack.append((w, path + (w,)))
    return GeodesicSet(x, y, tuple(paths), truncated)


def _check_geodesic_sequence(graph: Graph, path, what: str) -> None:
    if len(path) == 0:
        raise GraphError(f"{what} is empty")
    idx = np.asarray(path, dtype=np.int64)
    sub = graph.distance_matrix()[np.ix_(idx, idx)]
    span = np.abs(np.arange(len(path))[:, None] - np.arange(len(path))[None, :])
    if not (sub == span).all():
        raise GraphError(f"{what} is not a geodesic vertex sequence")


def _longest_geodesic_from(graph: Graph, source: int) -> tuple[int, ...]:
    """Longest geodesic from source; ties broken lexicographically."""
    dist = graph.distances(source)
    far = int(dist.max())
    target = int(min(v for v in graph.vertices() if dist[v] == far))
    return enumerate_geodesics(graph, source, target, cap=1).paths[0]


# -- rays --------------------------------------------------------------------


@dataclass(frozen=True)
class Ray:
    """Finite geodesic from ``origin`` merging into the base ray.

    ``path[merge_index:]`` is a suffix of the base ray, so the symmetric
    difference with the base ray is finite by construction.
    """

    origin: int
    path: tuple[int, ...]
    merge_index: int

    @property
    def length(self) -> int:
        """Number of edges."""
        return len(self.path) - 1

    def vertex_at(self, k: int) -> int:
        if not 0 <= k < len(self.path):
            raise GraphError(f"ray from {self.origin} has length {self.length}, no vertex at {k}")
        return self.path[k]

    def __contains__(self, v: int) -> bool:
        return v in self.path


def build_base_ray(graph: Graph) -> Ray:
    """The designated base ray as a :class:`Ray` (merge index 0)."""
    return Ray(origin=graph.base_ray[0], path=graph.base_ray, merge_index=0)


def build_ray(graph: Graph, x: int, geodesic_cap: int = 64) -> Ray:
    """Geodesic from x that flows into the base ray p.

    Candidates are ``g + p[t+1:]`` where g is a geodesic from x to p(t); a
    candidate survives iff the concatenation is globally geodesic within the
    snapshot.  Among survivors the lexicographically smallest vertex sequence
    wins.  ``t = len(p) - 1`` always yields a candidate on a connected graph,
    so construction fails only on malformed input.
    """
    if not 0 <= x < graph.n:
        raise GraphError(f"unknown vertex id {x}")
    p = graph.base_ray
    dist_from_x = graph.distances(x)
    candidates: set[tuple[int, ...]] = set()
    for t in range(len(p)):
        # cheap prefilter: x -> p(t) -> tail must be distance-additive
        base = int(dist_from_x[p[t]])
        ok = True
        for m in range(t + 1, len(p)):
            if int(dist_from_x[p[m]]) != base + (m - t):
                ok = False
                break
        if not ok:
            continue
        tail = p[t + 1:]
        for g in enumerate_geodesics(graph, x, p[t], cap=geodesic_cap):
            candidates.add(g + tail)
    valid = []
    for q in sorted(candidates):
        idx = np.asarray(q, dtype=np.int64)
        sub = graph.distance_matrix()[np.ix_(idx, idx)]
        span = np.abs(np.arange(len(q))[:, None] - np.arange(len(q))[None, :])
        if (sub == span).all():
            valid.append(q)
    if not valid:
        raise RayConstructionError(f"no geodesic from vertex {x} merges into the base ray")
    path = min(valid)
    merge_index = _merge_index(path, p)
    return Ray(origin=x, path=path, merge_index=merge_index)


def _merge_index(path: tuple[int, ...], base: tuple[int, ...]) -> int:
    """Smallest i such that path[i:] is a suffix of base."""
    for i in range(len(path)):
        suffix = path[i:]
        if suffix == base[len(base) - len(suffix):]:
            return i
    # single-vertex overlap at the end is guaranteed by construction
    return len(path) - 1


# -- hyperbolicity profile -----------------------------------------------------


@dataclass(frozen=True)
class HyperbolicityProfile:
    """Measured thinness and four-point constants of a snapshot.

    ``delta_impl`` is the constant handed to corridor constructions; by
    default it is ``max(delta_thin, 1)`` so that downstream strict-inequality
    neighbourhoods never degenerate on trees.
    """

    delta_thin: Fraction
    delta_four_point: Fraction
    delta_impl: Fraction
    sampled: bool
    triangles_checked: int
    quadruples_checked: int
    exhaustive_geodesics: bool


def hyperbolicity_profile(graph: Graph, mode: str = "exact", sample_budget: int = 20000,
                          seed: int = 0, delta_override=None,
                          geodesic_cap: int = 16) -> HyperbolicityProfile:
    """Compute delta_thin and delta_four_point, exactly or by sampling.

    Exact mode enumerates all triples/quadruples of vertices (O(n^3)/O(n^4));
    sampled mode draws ``sample_budget`` random instances of each kind with a
    seeded generator and flags the profile as sampled.
    """
    if mode not in ("exact", "sampled"):
        raise GraphError(f"unknown profile mode {mode!r}")
    D = graph.distance_matrix().astype(np.int64)
    n = graph.n
    exhaustive = True

    if mode == "exact":
        four2, quads = _four_point_exact(D)
        thin, tris, exhaustive = _thin_exact(graph, D, geodesic_cap)
    else:
        rng = random.Random(seed)
        four2, quads = _four_point_sampled(D, rng, sample_budget)
        thin, tris, exhaustive = _thin_sampled(graph, D, rng, sample_budget, geodesic_cap)

    delta_thin = Fraction(int(thin))
    delta_four = Fraction(max(int(four2), 0), 2)
    if delta_override is not None:
        delta_impl = Fraction(delta_override)
    else:
        delta_impl = max(delta_thin, Fraction(1))
    return HyperbolicityProfile(
        delta_thin=delta_thin,
        delta_four_point=delta_four,
        delta_impl=delta_impl,
        sampled=(mode == "sampled"),
        triangles_checked=tris,
        quadruples_checked=quads,
        exhaustive_geodesics=exhaustive,
    )


def _four_point_exact(D: np.ndarray) -> tuple[int, int]:
    """max over ordered quadruples of min((x|y)_w, (y|z)_w) - (x|z)_w, doubled."""
    n = D.shape[0]
    best = 0
    for w in range(n):
        M = D[:, w][:, None] + D[:, w][None, :] - D  # doubled Gromov products at w
        for y in range(n):
            gap = np.minimum.outer(M[:, y], M[y, :]) - M
            v = int(gap.max())
            if v > best:
                best = v
    return best, n ** 4


def _four_point_sampled(D: np.ndarray, rng: random.Random, budget: int) -> tuple[int, int]:
    n = D.shape[0]
    best = 0
    for _ in range(budget):
        x, y, z, w = (rng.randrange(n) for _ in range(4))
        gap = min(D[x, w] + D[y, w] - D[x, y], D[y, w] + D[z, w] - D[y, z]) \
            - (D[x, w] + D[z, w] - D[x, z])
        if gap > best:
            best = int(gap)
    return best, budget


def _triangle_thinness(graph: Graph, D: np.ndarray, x: int, y: int, z: int,
                       cap: int) -> tuple[int, bool]:
    """Worst thinness over all geodesic triangles on (x, y, z)."""
    sides = []
    truncated = False
    for (a, b) in ((x, y), (y, z), (x, z)):
        gs = enumerate_geodesics(graph, a, b, cap=cap)
        truncated = truncated or gs.truncated
        sides.append(gs.paths)
    worst = 0
    for gxy in sides[0]:
        for gyz in sides[1]:
            for gxz in sides[2]:
                tri = (np.asarray(gxy), np.asarray(gyz), np.asarray(gxz))
                for i in range(3):
                    others = np.concatenate([tri[j] for j in range(3) if j != i])
                    far = int(D[np.ix_(tri[i], others)].min(axis=1).max())
                    if far > worst:
                        worst = far
    return worst, truncated


def _thin_exact(graph: Graph, D: np.ndarray, cap: int) -> tuple[int, int, bool]:
    best = 0
    count = 0
    exhaustive = True
    for x, y, z in combinations(range(graph.n), 3):
        worst, truncated = _triangle_thinness(graph, D, x, y, z, cap)
        exhaustive = exhaustive and not truncated
        if worst > best:
            best = worst
        count += 1
    return best, count, exhaustive


def _thin_sampled(graph: Graph, D: np.ndarray, rng: random.Random, budget: int,
                  cap: int) -> tuple[int, int, bool]:
    best = 0
    exhaustive = True
    n = graph.n
    for _ in range(budget):
        x, y, z = rng.randrange(n), rng.randrange(n), rng.randrange(n)
        worst, truncated = _triangle_thinness(graph, D, x, y, z, cap)
        exhaustive = exhaustive and not truncated
        if worst > best:
            best = worst
    return best, budget, exhaustive


# -- thin-triangle inequality check --------------------------------------------


@dataclass(frozen=True)
class ThinnessReport:
    """Outcome of checking d(w, [x,y]) <= (x|y)_w + 10*delta over triples."""

    delta: Fraction
    checked: int
    passed: bool
    worst_slack: Fraction
    worst_witness: tuple[int, int, int] | None
    violations: tuple[tuple[int, int, int], ...]


def thinness_check(graph: Graph, delta, sample_budget: int = 4000, seed: int = 0,
                   geodesic_cap: int = 16) -> ThinnessReport:
    """Check the geodesic-approximation inequality on vertex triples.

    For each enumerated (or sampled) triple (x, y, w) and every geodesic
    [x, y], assert d(w, [x,y]) <= (x|y)_w + 10*delta.  Slack is the bound
    minus the actual distance; the report carries the worst (smallest) slack
    and its witness triple.
    """
    delta = Fraction(delta)
    if delta < 0:
        raise GraphError("delta must be non-negative")
    D = graph.distance_matrix()
    n = graph.n
    if n ** 3 <= sample_budget:
        triples = [(x, y, w) for x in range(n) for y in range(n) for w in range(n)]
    else:
        rng = random.Random(seed)
        triples = [(rng.randrange(n), rng.randrange(n), rng.randrange(n))
                   for _ in range(sample_budget)]
    bound_extra = 10 * delta
    worst: Fraction | None = None
    witness = None
    violations = []
    for x, y, w in triples:
        prod = gromov_product(graph, x, y, w)
        limit = prod + bound_extra
        for path in enumerate_geodesics(graph, x, y, cap=geodesic_cap):
            dw = int(D[w, np.asarray(path)].min())
            slack = limit - dw
            if worst is None or slack < worst:
                worst, witness = slack, (x, y, w)
            if slack < 0 and len(violations) < 32:
                violations.append((x, y, w))
    if worst is None:
        raise GraphError("no triples checked")
    return ThinnessReport(
        delta=delta,
        checked=len(triples),
        passed=not violations,
        worst_slack=worst,
        worst_witness=witness,
        violations=tuple(violations),
    )
