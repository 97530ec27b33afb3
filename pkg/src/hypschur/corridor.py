"""Corridor sets along rays and the pair relations they induce.

For a vertex x with ray p_x, the corridor set at level k is

    T(x, k) = { w : d(w, p_x) < rho and d(w, x) in {k-1, k} },

empty for k < 0.  Two vertices are W(k, l)-related when their corridors
meet, T(x,k) n T(y,l) != 0, and Z(k, l) refines W(k, l) by removing pairs
that are still related at a higher split (k+j, l-j) for some 1 <= j <= R1.
Summed over k+l = n, the Z relations partition the set of pairs at distance
at most n; this module computes the relations exactly and verifies both the
covering and the partition identities on a snapshot.

Two parameter modes exist.  Paper mode takes rho = 100*delta, R0 =
200*delta + 1, R1 = 2*R0, which on desk-scale snapshots makes every corridor
the whole ball; empirical mode measures the minimal usable width and the
exact R1 on the snapshot instead.  Membership uses strict inequality
d(w, p_x) < rho throughout, so at integer distances a width of 100*delta
acts as <= 100*delta - 1; half-integer widths select between the strict and
non-strict readings.

Relation construction is row-parallel (BLAS-threaded matrix products over
the core rows); all returned objects are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from weakref import WeakKeyDictionary

import numpy as np

from hypschur.graphs import Graph, GraphError


class TruncationError(GraphError):
    """Corridor level runs past the snapshot ray in strict mode."""


@dataclass(frozen=True)
class CorridorParams:
    """Corridor width and offset constants, plus the mode that produced them.

    ``rho`` is the corridor width (strict threshold), ``r0`` the enclosing
    ball radius, ``r1`` the Z-relation look-ahead.  ``mode`` is "paper" or
    "empirical"; empirical parameters are only constructed through
    :func:`empirical_params`, which measures r1 on the snapshot.
    """

    rho: float
    r0: int
    r1: int
    mode: str
    delta: Fraction | None = None
    scanned_n_max: int | None = None

    def __post_init__(self):
        if not self.rho > 0:
            raise GraphError(f"corridor width rho={self.rho} must be positive")
        if self.r0 < 0 or self.r1 < 0:
            raise GraphError("r0 and r1 must be non-negative")
        if self.mode not in ("paper", "empirical"):
            raise GraphError(f"unknown corridor mode {self.mode!r}")


def paper_params(delta) -> CorridorParams:
    """rho = 100*delta, r0 = 200*delta + 1, r1 = 2*r0, from a half-integer delta."""
    delta = Fraction(delta)
    if delta < 0:
        raise GraphError("delta must be non-negative")
    r0 = 200 * delta + 1
    if r0.denominator != 1:
        raise GraphError(f"200*delta+1 = {r0} is not an integer; delta must be a half-integer")
    rho = 100 * delta
    if rho == 0:
        # degenerate trees: keep the strict threshold meaningful
        rho = Fraction(1, 2)
    return CorridorParams(rho=float(rho), r0=int(r0), r1=2 * int(r0),
                          mode="paper", delta=delta)


@dataclass(frozen=True)
class CorridorSet:
    """One corridor T(x, k) with its enclosing-ball diagnostics.

    ``center`` is the ray point p_x(k) when the ray is long enough, else
    None with ``ray_exhausted`` set; ``enclosing_radius`` is the smallest
    radius around the center containing every member, and ``within_r0``
    records whether that radius is at most r0 (None without a center).
    """

    owner: int
    level: int
    members: tuple[int, ...]
    center: int | None
    enclosing_radius: int | None
    within_r0: bool | None
    ray_exhausted: bool

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v: int) -> bool:
        return v in self.members


@dataclass(frozen=True)
class PairRelation:
    """Boolean pair matrix over the core vertices for one (k, l) relation."""

    kind: str
    k: int
    l: int
    vertices: tuple[int, ...]
    pairs: np.ndarray

    def pair(self, x: int, y: int) -> bool:
        try:
            i = self.vertices.index(x)
            j = self.vertices.index(y)
        except ValueError:
            raise GraphError(f"vertex pair ({x},{y}) is not in the core") from None
        return bool(self.pairs[i, j])

    def count(self) -> int:
        return int(self.pairs.sum())


@dataclass(frozen=True)
class EmpiricalScan:
    """Result of scanning for the largest W-offset actually realized."""

    r1: int
    n_max: int
    rho: float
    witness: tuple[int, int, int] | None  # (x, y, n) achieving the max span
    paper_bound_ok: bool | None

    def __int__(self) -> int:
        return self.r1


@dataclass(frozen=True)
class PartitionReport:
    """Outcome of checking sum_k chi_Z(k, n-k) == chi[d <= n] pairwise."""

    n_max: int
    core_size: int
    checked_pairs: int
    passed: bool
    violations: tuple[tuple, ...]  # (x, y, n, z_count, w_levels)


@dataclass(frozen=True)
class CoveringReport:
    """Outcome of checking that the W(k, n-k) union covers {d <= n}."""

    n_max: int
    core_size: int
    checked_pairs: int
    passed: bool
    violations: tuple[tuple, ...]  # (x, y, n)
    minimal_rho: float | None


@dataclass(frozen=True)
class CorridorStats:
    """Measured corridor extremes over all core owners and levels."""

    c1: int
    max_enclosing_radius: int
    levels_scanned: int
    all_within_r0: bool


# -- engine ---------------------------------------------------------------


class CorridorEngine:
    """Vectorized corridor membership for one graph and one width.

    Row x of the level matrix A_k flags the members of T(x, k); the W
    relation at (k, l) is the boolean support of A_k @ A_l^T restricted to
    core rows and columns.
    """

    def __init__(self, graph: Graph, rho: float, ray_dist: np.ndarray):
        self.graph = graph
        self.rho = float(rho)
        self._D = graph.distance_matrix()
        self._near = ray_dist < self.rho  # near[x, w]: d(w, p_x) < rho
        base_dist = graph.distances(graph.base_point)
        self.core = np.flatnonzero(base_dist <= graph.core_radius)
        self._levels: dict[int, np.ndarray] = {}
        self._member_sets: dict[tuple[int, int], frozenset[int]] = {}
        self._ray_len = np.array([graph.ray(x).length for x in range(graph.n)])
        self.max_level = int(self._ray_len.max() + math.floor(self.rho)) + 2
        self._c1: int | None = None

    def c1(self) -> int:
        """Largest corridor cardinality sup |T(x, k)| over core x, all levels."""
        if self._c1 is None:
            best = 0
            for k in range(self.max_level + 1):
                counts = self.level_matrix(k).sum(axis=1)
                if counts.size:
                    best = max(best, int(counts.max()))
            self._c1 = best
        return self._c1

    def distance_row(self, x: int) -> np.ndarray:
        """Read-only graph distances from x (index = vertex id)."""
        return self._D[x]

    def members_row(self, x: int, k: int) -> np.ndarray:
        if k < 0:
            return np.zeros(self.graph.n, dtype=bool)
        dx = self._D[x]
        on_level = (dx == k) if k == 0 else ((dx == k - 1) | (dx == k))
        return self._near[x] & on_level

    def level_matrix(self, k: int) -> np.ndarray:
        """A_k over core rows, float32 for exact small-count products."""
        m = self._levels.get(k)
        if m is None:
            if k < 0 or k > self.max_level:
                m = np.zeros((len(self.core), self.graph.n), dtype=np.float32)
            else:
                m = np.stack([self.members_row(int(x), k) for x in self.core]) \
                    .astype(np.float32)
            m.setflags(write=False)
            self._levels[k] = m
        return m

    def w_bool(self, k: int, l: int) -> np.ndarray:
        """chi_W(k, l) over core x core, computed, not cached."""
        if k < 0 or l < 0 or k > self.max_level or l > self.max_level:
            m = len(self.core)
            return np.zeros((m, m), dtype=bool)
        return (self.level_matrix(k) @ self.level_matrix(l).T) > 0

    def members_set(self, x: int, k: int) -> frozenset[int]:
        """T(x, k) as a frozenset, cached for tensor-factor construction."""
        key = (x, k)
        s = self._member_sets.get(key)
        if s is None:
            s = frozenset(int(v) for v in np.flatnonzero(self.members_row(x, k)))
            self._member_sets[key] = s
        return s

    def level_profile(self, w: int) -> tuple[np.ndarray, np.ndarray]:
        """(sizes, cons) per level for owner w: |T(w,k)| and |T(w,k) n T(w,k+1)|.

        Members at exact distance a from w are counted once (cnt), so
        sizes[k] = cnt[k-1] + cnt[k] and the consecutive-level intersections
        are cons[k] = cnt[k] (the shared distance-k shell).
        """
        d = self._D[w][self._near[w]]
        cnt = np.bincount(d, minlength=self.max_level + 2)
        sizes = np.zeros(self.max_level + 2, dtype=np.int64)
        sizes[0] = cnt[0]
        sizes[1:] = cnt[1: self.max_level + 2] + cnt[: self.max_level + 1]
        cons = cnt[: self.max_level + 2].astype(np.int64)
        return sizes, cons


_RAY_DIST: WeakKeyDictionary = WeakKeyDictionary()
_ENGINES: WeakKeyDictionary = WeakKeyDictionary()


def _ray_distances(graph: Graph) -> np.ndarray:
    """ray_dist[x, w] = d(w, p_x), memoized per graph."""
    rd = _RAY_DIST.get(graph)
    if rd is None:
        D = graph.distance_matrix()
        n = graph.n
        rd = np.empty((n, n), dtype=np.int32)
        for x in range(n):
            idx = np.asarray(graph.ray(x).path, dtype=np.int64)
            rd[x] = D[:, idx].min(axis=1)
        rd.setflags(write=False)
        _RAY_DIST[graph] = rd
    return rd


def get_engine(graph: Graph, params: CorridorParams) -> CorridorEngine:
    engines = _ENGINES.get(graph)
    if engines is None:
        engines = {}
        _ENGINES[graph] = engines
    eng = engines.get(params.rho)
    if eng is None:
        eng = CorridorEngine(graph, params.rho, _ray_distances(graph))
        engines[params.rho] = eng
    return eng


# -- operations -------------------------------------------------------------


def corridor_set(graph: Graph, x: int, k: int, params: CorridorParams,
                 strict: bool = False) -> CorridorSet:
    """The corridor T(x, k) with enclosing-ball diagnostics.

    Levels past the snapshot ray are truncated relative to the infinite
    object; by default the truncated set is returned with ``ray_exhausted``
    set, and ``strict=True`` turns that situation into an error.
    """
    eng = get_engine(graph, params)
    ray = graph.ray(x)
    exhausted = k > ray.length
    if strict and exhausted and k >= 0:
        raise TruncationError(
            f"level {k} runs past the ray of vertex {x} (length {ray.length})")
    row = eng.members_row(x, k)
    members = tuple(int(v) for v in np.flatnonzero(row))
    center = ray.path[k] if 0 <= k <= ray.length else None
    radius = None
    within = None
    if center is not None:
        radius = int(graph.distances(center)[list(members)].max()) if members else 0
        within = radius <= params.r0
    return CorridorSet(owner=x, level=k, members=members, center=center,
                       enclosing_radius=radius, within_r0=within,
                       ray_exhausted=exhausted)


def relation_W(graph: Graph, k: int, l: int, params: CorridorParams) -> PairRelation:
    """chi_W(k, l) over core pairs: corridors T(x,k) and T(y,l) intersect."""
    eng = get_engine(graph, params)
    pairs = eng.w_bool(k, l)
    pairs.setflags(write=False)
    return PairRelation(kind="W", k=k, l=l,
                        vertices=tuple(int(v) for v in eng.core), pairs=pairs)


def relation_Z(graph: Graph, k: int, l: int, params: CorridorParams) -> PairRelation:
    """chi_Z(k, l): in W(k, l) but in no W(k+j, l-j) for 1 <= j <= r1."""
    eng = get_engine(graph, params)
    z = eng.w_bool(k, l)
    for j in range(1, params.r1 + 1):
        if l - j < 0:
            break
        z &= ~eng.w_bool(k + j, l - j)
    z.setflags(write=False)
    return PairRelation(kind="Z", k=k, l=l,
                        vertices=tuple(int(v) for v in eng.core), pairs=z)


def empirical_R1(graph: Graph, params: CorridorParams, n_max: int,
                 method: str = "auto") -> EmpiricalScan:
    """Smallest R such that no pair sits in both W(k, l) and W(k+j, l-j), j > R.

    Equivalently the largest spread max(K) - min(K) over pairs and n <= n_max,
    where K = { k : (x,y) in W(k, n-k) }.  Two equivalent routes exist: the
    level-stack route materializes every W(k, n-k) as a matrix product, the
    pair-scan route sweeps witnesses once per pair; "auto" picks the stack for
    shallow scans and the pair scan for deep ones.  In paper mode the result
    also checks the configured bound r1 against the measured value.
    """
    if method == "auto":
        method = "stack" if n_max <= 16 else "pairscan"
    if method == "pairscan":
        scan = pair_level_scan(graph, params, n_max)
        best, witness = scan.max_span, scan.span_witness
    elif method == "stack":
        best, witness = _r1_by_stack(graph, params, n_max)
    else:
        raise GraphError(f"unknown empirical_R1 method {method!r}")
    paper_ok = (best <= params.r1) if params.mode == "paper" else None
    return EmpiricalScan(r1=best, n_max=n_max, rho=params.rho,
                         witness=witness, paper_bound_ok=paper_ok)


def _r1_by_stack(graph: Graph, params: CorridorParams, n_max: int):
    eng = get_engine(graph, params)
    best = 0
    witness = None
    for n in range(n_max + 1):
        stack = np.stack([eng.w_bool(k, n - k) for k in range(n + 1)])
        any_k = stack.any(axis=0)
        if not any_k.any():
            continue
        first = np.argmax(stack, axis=0)
        last = n - np.argmax(stack[::-1], axis=0)
        span = np.where(any_k, last - first, 0)
        local = int(span.max())
        if local > best:
            best = local
            i, j = np.unravel_index(int(span.argmax()), span.shape)
            witness = (int(eng.core[i]), int(eng.core[j]), n)
    return best, witness


@dataclass(frozen=True)
class PairScan:
    """Per-pair occupancy of the W(k, n-k) relations over all n <= n_limit.

    ``live[i, j, n]`` says some k has (x_i, x_j) in W(k, n-k); ``max_span``
    is the largest max(K)-min(K) over pairs and levels, i.e. the empirical
    R1 over the scanned range.  When r1 >= max_span, the Z-partition count
    at (pair, n) is exactly ``live[i, j, n]``.
    """

    vertices: tuple[int, ...]
    n_limit: int
    live: np.ndarray
    max_span: int
    span_witness: tuple[int, int, int] | None


def pair_level_scan(graph: Graph, params: CorridorParams, n_limit: int) -> PairScan:
    """Sweep all corridor witnesses once per core pair.

    A witness w with a = d(w,x), b = d(w,y), within rho of both rays, puts
    (x,y) into W(k, l) exactly for (k, l) in {a, a+1} x {b, b+1}, i.e. at
    n = a+b it contributes k = a, at n = a+b+1 both k and k+1, and at
    n = a+b+2 the single k = a+1.  Scanning witnesses therefore yields, per
    pair and per n, the full occupied k-range without forming any W matrix.
    """
    eng = get_engine(graph, params)
    core = eng.core
    m = len(core)
    nv = graph.n
    D = eng._D
    near = eng._near
    width = n_limit + 3  # room for the s+2 shift
    sentinel = np.iinfo(np.int32).max
    live = np.zeros((m, m, n_limit + 1), dtype=bool)
    max_span = 0
    witness = None
    rows = np.repeat(np.arange(m), nv)
    for xi, x in enumerate(core):
        a = D[x].astype(np.int64)
        # s_eff parks out-of-range or non-near witnesses on a sentinel column
        s = a[None, :] + D[core].astype(np.int64)
        ok = near[x][None, :] & near[core] & (s <= n_limit)
        s_eff = np.where(ok, s, width).ravel()
        a_flat = np.broadcast_to(a, (m, nv)).ravel()
        amin = np.full((m, width + 1), sentinel, dtype=np.int64)
        amax = np.full((m, width + 1), -1, dtype=np.int64)
        np.minimum.at(amin, (rows, s_eff), a_flat)
        np.maximum.at(amax, (rows, s_eff), a_flat)
        occ = amax >= 0
        # K_n gathers k = a at s in {n-1, n} and k = a+1 at s in {n-2, n-1}
        cols = n_limit + 1
        pad_min = np.full((m, 1), sentinel, dtype=np.int64)
        pad_max = np.full((m, 1), -1, dtype=np.int64)
        pad_occ = np.zeros((m, 1), dtype=bool)
        amin_n = amin[:, :cols]
        amax_n = amax[:, :cols]
        amin_n1 = np.concatenate([pad_min, amin[:, : cols - 1]], axis=1)
        amax_n1 = np.concatenate([pad_max, amax[:, : cols - 1]], axis=1)
        occ_n1 = np.concatenate([pad_occ, occ[:, : cols - 1]], axis=1)
        amin_n2 = np.concatenate([pad_min, pad_min, amin[:, : cols - 2]], axis=1)
        amax_n2 = np.concatenate([pad_max, pad_max, amax[:, : cols - 2]], axis=1)
        occ_n2 = np.concatenate([pad_occ, pad_occ, occ[:, : cols - 2]], axis=1)
        lo = np.minimum(np.minimum(amin_n, amin_n1),
                        np.where(occ_n2, amin_n2 + 1, sentinel))
        hi = np.maximum(np.maximum(amax_n, np.where(occ_n1, amax_n1 + 1, -1)),
                        np.where(occ_n2, amax_n2 + 1, -1))
        has = hi >= 0
        live[xi] = has
        if has.any():
            span = np.where(has, hi - lo, 0)
            local = int(span.max())
            if local > max_span:
                max_span = local
                j, n_at = np.unravel_index(int(span.argmax()), span.shape)
                witness = (int(x), int(core[int(j)]), int(n_at))
    live.setflags(write=False)
    return PairScan(vertices=tuple(int(v) for v in core), n_limit=n_limit,
                    live=live, max_span=max_span, span_witness=witness)


def verify_partition(graph: Graph, params: CorridorParams, n_max: int,
                     max_violations: int = 32) -> PartitionReport:
    """Check sum_k chi_Z(k, n-k) == chi[d(x,y) <= n] for every core pair, n <= n_max."""
    eng = get_engine(graph, params)
    core = eng.core
    D = graph.distance_matrix()[np.ix_(core, core)]
    violations: list[tuple] = []
    checked = 0
    for n in range(n_max + 1):
        zsum = np.zeros((len(core), len(core)), dtype=np.int16)
        w_stack = []
        for k in range(n + 1):
            w_stack.append(eng.w_bool(k, n - k))
        for k in range(n + 1):
            z = w_stack[k].copy()
            for j in range(1, params.r1 + 1):
                if k + j <= n:
                    z &= ~w_stack[k + j]
                else:
                    z &= ~eng.w_bool(k + j, n - k - j)
            zsum += z
        expected = (D <= n).astype(np.int16)
        checked += zsum.size
        bad = np.argwhere(zsum != expected)
        for i, j in bad[: max(0, max_violations - len(violations))]:
            w_levels = tuple(k for k in range(n + 1) if w_stack[k][i, j])
            violations.append((int(core[i]), int(core[j]), n,
                               int(zsum[i, j]), w_levels))
        if len(violations) >= max_violations:
            break
    return PartitionReport(n_max=n_max, core_size=len(core), checked_pairs=checked,
                           passed=not violations, violations=tuple(violations))


def covering_check(graph: Graph, params: CorridorParams, n_max: int,
                   minimize_rho: bool = False,
                   max_violations: int = 32) -> CoveringReport:
    """Check that every pair with d(x,y) <= n lies in some W(k, n-k), n <= n_max.

    With ``minimize_rho`` the minimal passing width on a half-integer grid is
    found by bisection (covering is monotone in rho) and reported alongside.
    """
    eng = get_engine(graph, params)
    core = eng.core
    D = graph.distance_matrix()[np.ix_(core, core)]
    violations: list[tuple] = []
    checked = 0
    for n in range(n_max + 1):
        covered = np.zeros((len(core), len(core)), dtype=bool)
        for k in range(n + 1):
            covered |= eng.w_bool(k, n - k)
        expected = D <= n
        checked += covered.size
        bad = np.argwhere(expected & ~covered)
        for i, j in bad[: max(0, max_violations - len(violations))]:
            violations.append((int(core[i]), int(core[j]), n))
        if len(violations) >= max_violations:
            break
    minimal = _minimal_covering_rho(graph, params, n_max) if minimize_rho else None
    return CoveringReport(n_max=n_max, core_size=len(core), checked_pairs=checked,
                          passed=not violations, violations=tuple(violations),
                          minimal_rho=minimal)


def _covering_holds(graph: Graph, rho: float, n_max: int) -> bool:
    eng = CorridorEngine(graph, rho, _ray_distances(graph))
    core = eng.core
    D = graph.distance_matrix()[np.ix_(core, core)]
    for n in range(n_max + 1):
        covered = np.zeros((len(core), len(core)), dtype=bool)
        for k in range(n + 1):
            covered |= eng.w_bool(k, n - k)
        if (np.asarray(D <= n) & ~covered).any():
            return False
    return True


def _minimal_covering_rho(graph: Graph, params: CorridorParams, n_max: int) -> float | None:
    diam = int(graph.distance_matrix().max())
    grid = [0.5 * s for s in range(1, 2 * (diam + 1) + 1)]
    if not _covering_holds(graph, grid[-1], n_max):
        return None
    lo, hi = -1, len(grid) - 1  # grid[hi] passes, grid[lo] fails (virtual -1)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _covering_holds(graph, grid[mid], n_max):
            hi = mid
        else:
            lo = mid
    return grid[hi]


def empirical_params(graph: Graph, n_max: int, rho: float | None = None) -> CorridorParams:
    """Measure corridor constants on the snapshot.

    rho defaults to the minimal width passing the covering check up to
    ``n_max``; r1 is the exact largest W-offset realized; r0 is the largest
    enclosing radius observed over all corridors with a live center.
    """
    if rho is None:
        seed = CorridorParams(rho=0.5, r0=0, r1=0, mode="empirical")
        rho = _minimal_covering_rho(graph, seed, n_max)
        if rho is None:
            raise GraphError(
                f"no corridor width covers all pairs up to n={n_max} on this snapshot")
    provisional = CorridorParams(rho=float(rho), r0=0, r1=0, mode="empirical")
    scan = empirical_R1(graph, provisional, n_max)
    stats = corridor_stats(graph, provisional)
    return CorridorParams(rho=float(rho), r0=stats.max_enclosing_radius,
                          r1=scan.r1, mode="empirical", scanned_n_max=n_max)


def corridor_stats(graph: Graph, params: CorridorParams) -> CorridorStats:
    """C1 (largest corridor) and enclosing-radius extremes over all levels."""
    eng = get_engine(graph, params)
    c1 = 0
    max_rad = 0
    all_within = True
    for k in range(eng.max_level + 1):
        counts = eng.level_matrix(k).sum(axis=1)
        c1 = max(c1, int(counts.max()) if counts.size else 0)
        for xi, x in enumerate(eng.core):
            if counts[xi] == 0:
                continue
            ray = graph.ray(int(x))
            if k > ray.length:
                continue
            center = ray.path[k]
            members = np.flatnonzero(eng.members_row(int(x), k))
            rad = int(graph.distances(center)[members].max())
            if rad > max_rad:
                max_rad = rad
            if rad > params.r0:
                all_within = False
    return CorridorStats(c1=c1, max_enclosing_radius=max_rad,
                         levels_scanned=eng.max_level + 1, all_within_r0=all_within)


# -- bit-matrix export ---------------------------------------------------------


def write_bit_matrix(relation: PairRelation, path) -> None:
    """One text row of '0'/'1' per core vertex, for differential testing."""
    lines = ["".join("1" if v else "0" for v in row) for row in relation.pairs]
    Path(path).write_text("\n".join(lines) + "\n")


def read_bit_matrix(path) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if set(line) - {"0", "1"}:
            raise GraphError(f"{Path(path).name}:{lineno}: not a bit row")
        rows.append([c == "1" for c in line])
    if not rows or len({len(r) for r in rows}) != 1:
        raise GraphError(f"{Path(path).name}: ragged or empty bit matrix")
    return np.asarray(rows, dtype=bool)
