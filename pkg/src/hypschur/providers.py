"""Graph providers: generators and edge-list ingestion.

Every provider returns an immutable :class:`~hypschur.graphs.Graph` whose
base ray is a genuine maximal geodesic, so downstream corridor constructions
can rely on exact prefix geodesics.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from hypschur.graphs import Graph, GraphError

DEFAULT_VERTEX_CAP = 100_000

PROVIDER_KINDS = ("edge_list_file", "free_group", "regular_tree", "line", "cycle")


class EdgeListParseError(GraphError):
    """Edge-list file rejected; message carries the offending line number."""


class SizeCapError(GraphError):
    """Generator would exceed the configured vertex cap."""


@dataclass(frozen=True)
class ProviderSpec:
    """Declarative recipe for a graph snapshot.

    ``kind`` selects the provider; ``parameters`` holds the applicable sizes
    (rank/radius, branching/depth, length, path); ``base_ray_hint`` optionally
    pins the base ray for file inputs.
    """

    kind: str
    parameters: Mapping = field(default_factory=dict)
    base_ray_hint: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in PROVIDER_KINDS:
            raise GraphError(f"unknown provider kind {self.kind!r}")
        for key, value in self.parameters.items():
            if key in ("rank", "radius", "branching", "depth", "length") and int(value) < 1:
                raise GraphError(f"provider parameter {key}={value} must be positive")
        if self.kind == "cycle" and int(self.parameters.get("length", 3)) < 3:
            raise GraphError("cycle length must be at least 3")


def build_graph(spec: ProviderSpec, vertex_cap: int = DEFAULT_VERTEX_CAP) -> Graph:
    """Materialize a :class:`ProviderSpec`."""
    p = spec.parameters
    if spec.kind == "free_group":
        return gen_free_group_ball(int(p["rank"]), int(p["radius"]), vertex_cap=vertex_cap)
    if spec.kind == "regular_tree":
        return gen_regular_tree(int(p["branching"]), int(p["depth"]), vertex_cap=vertex_cap)
    if spec.kind == "line":
        return gen_line(int(p["length"]), vertex_cap=vertex_cap)
    if spec.kind == "cycle":
        return gen_cycle(int(p["length"]), vertex_cap=vertex_cap)
    return load_edge_list(p["path"], base_ray_hint=spec.base_ray_hint,
                          require_ray=bool(p.get("require_ray", False)))


# -- generators ---------------------------------------------------------------


def _letter_name(code: int) -> str:
    gen, inverse = divmod(code, 2)
    name = chr(ord("a") + gen) if gen < 26 else f"x{gen}"
    return name.upper() if inverse else name


def free_group_ball_size(rank: int, radius: int) -> int:
    """1 + sum_{k=1..radius} 2*rank*(2*rank-1)^(k-1), the reduced-word count."""
    return 1 + sum(2 * rank * (2 * rank - 1) ** (k - 1) for k in range(1, radius + 1))


def gen_free_group_ball(rank: int, radius: int,
                        vertex_cap: int = DEFAULT_VERTEX_CAP) -> Graph:
    """Ball of the free group of the given rank in its word metric.

    Vertices are reduced words over the generators and their inverses,
    ordered by (length, letter sequence); edges are right multiplication by a
    single letter.  Letter codes pair generator 2i with inverse 2i+1, so a
    word is reduced iff no letter is followed by its xor-1 partner.  The base
    ray is the powers of the first generator.
    """
    if rank < 1 or radius < 1:
        raise GraphError("free group ball needs rank >= 1 and radius >= 1")
    size = free_group_ball_size(rank, radius)
    if size > vertex_cap:
        raise SizeCapError(f"free group ball has {size} vertices, cap is {vertex_cap}")
    words: list[tuple[int, ...]] = [()]
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for letter in range(2 * rank):
                if w and letter == (w[-1] ^ 1):
                    continue
                nxt.append(w + (letter,))
        frontier = nxt
        words.extend(frontier)
    words.sort(key=lambda w: (len(w), w))
    index = {w: i for i, w in enumerate(words)}
    adjacency: list[list[int]] = [[] for _ in words]
    for w, i in index.items():
        for letter in range(2 * rank):
            nw = w[:-1] if (w and letter == (w[-1] ^ 1)) else w + (letter,)
            j = index.get(nw)
            if j is not None:
                adjacency[i].append(j)
    labels = ["".join(_letter_name(c) for c in w) or "e" for w in words]
    ray = tuple(index[(0,) * k] for k in range(radius + 1))
    return Graph(adjacency, base_point=index[()], core_radius=radius, base_ray=ray,
                 labels=labels, provider=f"free_group(rank={rank},radius={radius})")


def gen_regular_tree(branching: int, depth: int,
                     vertex_cap: int = DEFAULT_VERTEX_CAP) -> Graph:
    """Rooted portion of the regular tree of vertex degree ``branching``.

    The root has ``branching`` children and every other internal vertex has
    ``branching - 1``, so all interior vertices reach the full degree.  The
    base ray follows first children down to depth ``depth``.
    """
    if branching < 1 or depth < 1:
        raise GraphError("regular tree needs branching >= 1 and depth >= 1")
    adjacency: list[list[int]] = [[]]
    parents = [0]
    for level in range(depth):
        children_per = branching if level == 0 else branching - 1
        nxt = []
        for parent in parents:
            for _ in range(children_per):
                child = len(adjacency)
                if child >= vertex_cap:
                    raise SizeCapError(f"regular tree exceeds vertex cap {vertex_cap}")
                adjacency.append([parent])
                adjacency[parent].append(child)
                nxt.append(child)
        if not nxt:
            break
        parents = nxt
    # base ray follows the first child at every level
    ray = [0]
    v = 0
    for _ in range(depth):
        children = [w for w in adjacency[v] if w > v]
        if not children:
            break
        v = min(children)
        ray.append(v)
    return Graph(adjacency, base_point=0, core_radius=depth, base_ray=tuple(ray),
                 provider=f"regular_tree(branching={branching},depth={depth})")


def gen_line(length: int, vertex_cap: int = DEFAULT_VERTEX_CAP) -> Graph:
    """Path with ``length`` edges; base point 0, ray the whole path."""
    if length < 1:
        raise GraphError("line needs length >= 1")
    if length + 1 > vertex_cap:
        raise SizeCapError(f"line exceeds vertex cap {vertex_cap}")
    adjacency = [[j for j in (i - 1, i + 1) if 0 <= j <= length] for i in range(length + 1)]
    return Graph(adjacency, base_point=0, core_radius=length,
                 base_ray=tuple(range(length + 1)), provider=f"line({length})")


def gen_cycle(length: int, vertex_cap: int = DEFAULT_VERTEX_CAP) -> Graph:
    """Cycle on ``length`` vertices; base ray a maximal geodesic arc."""
    if length < 3:
        raise GraphError("cycle needs length >= 3")
    if length > vertex_cap:
        raise SizeCapError(f"cycle exceeds vertex cap {vertex_cap}")
    adjacency = [sorted(((i - 1) % length, (i + 1) % length)) for i in range(length)]
    ray = tuple(range(length // 2 + 1))
    return Graph(adjacency, base_point=0, core_radius=length // 2, base_ray=ray,
                 provider=f"cycle({length})")


# -- edge-list ingestion -------------------------------------------------------


def load_edge_list(path, base_ray_hint=None, require_ray: bool = False) -> Graph:
    """Read a graph from an edge-list text file.

    Format: one edge per line as two whitespace-separated non-negative
    integers; ``#`` starts a comment line; optional ``base <id>`` selects the
    base point (default: smallest declared id); optional ``ray <id> ...``
    declares the base ray.  Duplicate edge declarations are merged with a
    warning.  Only the connected component of the base point is kept, and
    core_radius is the base point's eccentricity in it.

    ``require_ray`` rejects files without a ray declaration, for inputs where
    the longest-geodesic fallback would be a guess rather than a choice.
    """
    path = Path(path)
    edges: set[tuple[int, int]] = set()
    duplicates = 0
    declared: set[int] = set()
    base_decl: int | None = None
    ray_decl: list[int] | None = None
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "base":
            if len(parts) != 2 or not parts[1].isdigit():
                raise EdgeListParseError(f"{path.name}:{lineno}: malformed base line {raw!r}")
            base_decl = int(parts[1])
            declared.add(base_decl)
            continue
        if parts[0] == "ray":
            if len(parts) < 2 or not all(t.isdigit() for t in parts[1:]):
                raise EdgeListParseError(f"{path.name}:{lineno}: malformed ray line {raw!r}")
            ray_decl = [int(t) for t in parts[1:]]
            declared.update(ray_decl)
            continue
        if len(parts) != 2 or not all(t.isdigit() for t in parts):
            raise EdgeListParseError(f"{path.name}:{lineno}: expected two vertex ids, got {raw!r}")
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise EdgeListParseError(f"{path.name}:{lineno}: self-loop {u}")
        key = (min(u, v), max(u, v))
        if key in edges:
            duplicates += 1
        edges.add(key)
        declared.update(key)
    if not declared:
        raise EdgeListParseError(f"{path.name}: no vertices declared")
    if duplicates:
        warnings.warn(f"{path.name}: merged {duplicates} duplicate edge declaration(s)",
                      stacklevel=2)
    base = base_decl if base_decl is not None else min(declared)
    if base not in declared:
        raise EdgeListParseError(f"{path.name}: base vertex {base} never declared")

    # connected component of the base point, original ids
    nbrs: dict[int, set[int]] = {v: set() for v in declared}
    for u, v in edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    component = {base}
    frontier = [base]
    while frontier:
        v = frontier.pop()
        for w in nbrs[v]:
            if w not in component:
                component.add(w)
                frontier.append(w)
    dropped = len(declared) - len(component)
    if dropped:
        warnings.warn(f"{path.name}: dropped {dropped} vertex(es) outside the base component",
                      stacklevel=2)

    order = sorted(component)
    remap = {orig: i for i, orig in enumerate(order)}
    adjacency = [sorted(remap[w] for w in nbrs[orig] if w in component) for orig in order]
    labels = [str(orig) for orig in order]

    hint = base_ray_hint if base_ray_hint is not None else ray_decl
    if require_ray and hint is None:
        raise GraphError(f"{path.name}: no ray declared and require_ray is set")
    ray = None
    if hint is not None:
        missing = [v for v in hint if v not in remap]
        if missing:
            raise GraphError(f"{path.name}: ray vertices {missing} not in the base component")
        ray = tuple(remap[v] for v in hint)
    return Graph(adjacency, base_point=remap[base], base_ray=ray, labels=labels,
                 provider=f"edge_list({path.name})")
