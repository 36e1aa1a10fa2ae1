"""Undirected dependency graphs, cliques, covers, and instance generators.

Vertices are 0-indexed everywhere, including in the text formats. Adjacency
is stored as one integer bitmask per vertex (bit ``j`` of ``row_masks[i]``
set iff ``i`` and ``j`` are adjacent), which keeps clique enumeration and
edge-cover bookkeeping cheap. Graphs are immutable after construction and
safe to share between workers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "UndirectedDependencyGraph",
    "Clique",
    "EdgeCliqueCover",
    "Objective",
    "InstanceKind",
    "FragilePair",
    "from_edge_list",
    "from_adjacency",
    "is_clique",
    "maximal_cliques",
    "generate_instance",
    "parse_graph",
    "load_graph",
    "format_edge_list",
    "format_dense",
]


def _mask_to_tuple(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class UndirectedDependencyGraph:
    """Symmetric, loop-free graph over measurement variables.

    An edge means the two variables were found (or are assumed) to be
    statistically dependent.
    """

    num_vertices: int
    row_masks: tuple[int, ...]
    vertex_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        n = self.num_vertices
        if n < 0:
            raise ValueError("num_vertices must be nonnegative")
        if len(self.row_masks) != n:
            raise ValueError("row_masks must have one entry per vertex")
        full = (1 << n) - 1
        for i, row in enumerate(self.row_masks):
            if row & ~full:
                raise ValueError(f"row {i} references vertices >= {n}")
            if row >> i & 1:
                raise ValueError(f"self-loop at vertex {i}")
        for i in range(n):
            for j in _iter_bits(self.row_masks[i]):
                if not self.row_masks[j] >> i & 1:
                    raise ValueError(f"adjacency not symmetric at ({i}, {j})")
        if self.vertex_labels is not None:
            if len(self.vertex_labels) != n:
                raise ValueError("vertex_labels must have length num_vertices")
            if len(set(self.vertex_labels)) != n:
                raise ValueError("vertex_labels must be unique")

    # -- queries ---------------------------------------------------------

    def has_edge(self, u: int, v: int) -> bool:
        self._check_vertex(u)
        self._check_vertex(v)
        return bool(self.row_masks[u] >> v & 1)

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check_vertex(v)
        return _mask_to_tuple(self.row_masks[v])

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return self.row_masks[v].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        """All edges as (u, v) pairs with u < v, in lexicographic order."""
        out = []
        for u in range(self.num_vertices):
            rest = self.row_masks[u] >> (u + 1) << (u + 1)
            for v in _iter_bits(rest):
                out.append((u, v))
        return out

    @property
    def num_edges(self) -> int:
        return sum(m.bit_count() for m in self.row_masks) // 2

    def adjacency_matrix(self) -> np.ndarray:
        """Dense boolean adjacency matrix (a fresh copy)."""
        n = self.num_vertices
        a = np.zeros((n, n), dtype=bool)
        for i, row in enumerate(self.row_masks):
            for j in _iter_bits(row):
                a[i, j] = True
        return a

    def label(self, v: int) -> str:
        if self.vertex_labels is not None:
            return self.vertex_labels[v]
        return str(v)

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.num_vertices:
            raise ValueError(f"vertex {v} out of range for n={self.num_vertices}")

    def __repr__(self) -> str:
        return (
            f"UndirectedDependencyGraph(n={self.num_vertices}, "
            f"m={self.num_edges})"
        )


def from_edge_list(
    num_vertices: int,
    edges: Iterable[tuple[int, int]],
    vertex_labels: Sequence[str] | None = None,
) -> UndirectedDependencyGraph:
    """Build a graph from an edge list; duplicate edges collapse.

    Raises ValueError for out-of-range endpoints or self-loops.
    """
    rows = [0] * num_vertices
    for u, v in edges:
        if not (0 <= u < num_vertices and 0 <= v < num_vertices):
            raise ValueError(f"edge ({u}, {v}) out of range for n={num_vertices}")
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    labels = tuple(vertex_labels) if vertex_labels is not None else None
    return UndirectedDependencyGraph(num_vertices, tuple(rows), labels)


def from_adjacency(matrix) -> UndirectedDependencyGraph:
    """Build a graph from a 0/1 (or boolean) square adjacency matrix."""
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("adjacency matrix must be square")
    if not np.array_equal(a, a.T):
        raise ValueError("adjacency matrix must be symmetric")
    if np.any(np.diagonal(a)):
        raise ValueError("adjacency matrix must have a zero diagonal")
    n = a.shape[0]
    rows = [0] * n
    for i in range(n):
        for j in range(n):
            if a[i, j]:
                rows[i] |= 1 << j
    return UndirectedDependencyGraph(n, tuple(rows))


# -- cliques and covers ----------------------------------------------------


@dataclass(frozen=True)
class Clique:
    """A set of pairwise-adjacent vertices, kept sorted ascending."""

    members: tuple[int, ...]

    def __post_init__(self) -> None:
        m = self.members
        if len(m) < 1:
            raise ValueError("a clique has at least one member")
        if any(b <= a for a, b in zip(m, m[1:])):
            raise ValueError("clique members must be sorted and distinct")

    @property
    def size(self) -> int:
        return len(self.members)

    def mask(self) -> int:
        out = 0
        for v in self.members:
            out |= 1 << v
        return out

    def pairs(self) -> list[tuple[int, int]]:
        m = self.members
        return [(m[i], m[j]) for i in range(len(m)) for j in range(i + 1, len(m))]

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


class Objective(enum.Enum):
    """What a minimum edge clique cover minimizes."""

    CLIQUE_COUNT = "clique_count"
    ASSIGNMENT_COUNT = "assignment_count"


@dataclass(frozen=True)
class EdgeCliqueCover:
    """A set of cliques covering every edge of a host graph.

    ``objective_value`` is the clique count or the total number of
    vertex-to-clique assignments, depending on ``objective``. Structural
    validity against a host graph is checked by ``ecc.verify_cover``.
    """

    cliques: tuple[Clique, ...]
    objective: Objective
    objective_value: int

    @property
    def num_cliques(self) -> int:
        return len(self.cliques)

    @property
    def total_assignments(self) -> int:
        return sum(c.size for c in self.cliques)

    def to_json_dict(self) -> dict:
        return {
            "objective": self.objective.value,
            "objective_value": self.objective_value,
            "cliques": [list(c.members) for c in self.cliques],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "EdgeCliqueCover":
        objective = Objective(data["objective"])
        cliques = tuple(Clique(tuple(sorted(c))) for c in data["cliques"])
        return cls(cliques, objective, int(data["objective_value"]))


def canonical_cover(masks: Iterable[int], objective: Objective) -> EdgeCliqueCover:
    """Wrap raw clique bitmasks into a canonically ordered cover."""
    tuples = sorted(_mask_to_tuple(m) for m in masks)
    cliques = tuple(Clique(t) for t in tuples)
    if objective is Objective.CLIQUE_COUNT:
        value = len(cliques)
    else:
        value = sum(len(c) for c in cliques)
    return EdgeCliqueCover(cliques, objective, value)


def is_clique(g: UndirectedDependencyGraph, vertices: Iterable[int]) -> bool:
    """True iff every pair in ``vertices`` is adjacent (empty/singleton: True)."""
    vs = sorted(set(vertices))
    for v in vs:
        g._check_vertex(v)
    for i, u in enumerate(vs):
        for v in vs[i + 1 :]:
            if not g.row_masks[u] >> v & 1:
                return False
    return True


def mask_is_clique(row_masks: Sequence[int], mask: int) -> bool:
    """Bitmask form of the clique test, used by the solvers."""
    rest = mask
    while rest:
        low = rest & -rest
        v = low.bit_length() - 1
        rest ^= low
        if mask & ~low & ~row_masks[v]:
            return False
    return True


def maximal_cliques(g: UndirectedDependencyGraph) -> list[Clique]:
    """All inclusion-maximal cliques, each sorted, in lexicographic order.

    Pivoted Bron-Kerbosch over bitmasks. Isolated vertices come out as
    singleton maximal cliques.
    """
    masks = maximal_clique_masks(g.row_masks, g.num_vertices)
    return [Clique(t) for t in sorted(_mask_to_tuple(m) for m in masks)]


def maximal_clique_masks(row_masks: Sequence[int], n: int) -> list[int]:
    """Maximal cliques as bitmasks, in no particular order."""
    out: list[int] = []
    if n == 0:
        return out

    def expand(r: int, p: int, x: int) -> None:
        if p == 0 and x == 0:
            out.append(r)
            return
        # pivot on the vertex of P|X with most neighbours in P
        pivot_best = -1
        pivot_u = -1
        scan = p | x
        while scan:
            low = scan & -scan
            u = low.bit_length() - 1
            scan ^= low
            cnt = (p & row_masks[u]).bit_count()
            if cnt > pivot_best:
                pivot_best = cnt
                pivot_u = u
        cand = p & ~row_masks[pivot_u]
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            expand(r | low, p & row_masks[v], x & row_masks[v])
            p ^= low
            x |= low

    expand(0, (1 << n) - 1, 0)
    return out


# -- instance generators ---------------------------------------------------


class InstanceKind(enum.Enum):
    ERDOS_RENYI = "erdos_renyi"
    TRIANGLE_FREE = "triangle_free"
    FRAGILE_FOOTNOTE = "fragile_footnote"


class FragilePair(NamedTuple):
    """Twin instances whose minimum covers differ by a factor of two.

    ``with_edge`` contains the hub-hub edge and is covered by n-2 triangles;
    ``without_edge`` omits it and needs 2(n-2) edge cliques. One edge flips
    the cover size, which is the worst case for a misestimated dependency.
    """

    with_edge: UndirectedDependencyGraph
    without_edge: UndirectedDependencyGraph


def generate_instance(
    kind: InstanceKind,
    n: int,
    p: float | None = None,
    seed: int = 0,
):
    """Deterministic test-instance generator.

    Returns a graph, or a ``FragilePair`` for ``FRAGILE_FOOTNOTE``.
    """
    if kind is InstanceKind.ERDOS_RENYI:
        if p is None or not 0.0 <= p <= 1.0:
            raise ValueError("erdos_renyi needs edge probability p in [0, 1]")
        if n < 0:
            raise ValueError("n must be nonnegative")
        rng = np.random.default_rng(np.random.SeedSequence([seed, n]))
        edges = []
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < p:
                    edges.append((u, v))
        return from_edge_list(n, edges)

    if kind is InstanceKind.TRIANGLE_FREE:
        if p is None or not 0.0 <= p <= 1.0:
            raise ValueError("triangle_free needs edge probability p in [0, 1]")
        if n < 0:
            raise ValueError("n must be nonnegative")
        rng = np.random.default_rng(np.random.SeedSequence([seed, n, 1]))
        rows = [0] * n
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < p and not rows[u] & rows[v]:
                    rows[u] |= 1 << v
                    rows[v] |= 1 << u
        return UndirectedDependencyGraph(n, tuple(rows))

    if kind is InstanceKind.FRAGILE_FOOTNOTE:
        if n < 3:
            raise ValueError("fragile_footnote needs n >= 3")
        spokes = [(hub, leaf) for leaf in range(2, n) for hub in (0, 1)]
        without = from_edge_list(n, spokes)
        with_edge = from_edge_list(n, spokes + [(0, 1)])
        return FragilePair(with_edge=with_edge, without_edge=without)

    raise ValueError(f"unknown instance kind: {kind!r}")


# -- text formats -----------------------------------------------------------

# Edge-list format: first line "n <num_vertices>", then one "u v" pair per
# line. Dense format: n comma-separated 0/1 rows. Both are accepted anywhere
# a graph file is read.


def format_edge_list(g: UndirectedDependencyGraph) -> str:
    lines = [f"n {g.num_vertices}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def format_dense(g: UndirectedDependencyGraph) -> str:
    a = g.adjacency_matrix().astype(int)
    return "\n".join(",".join(str(x) for x in row) for row in a) + "\n"


def parse_graph(text: str) -> UndirectedDependencyGraph:
    """Parse either text format, sniffing by the first non-blank line."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty graph file")
    first = lines[0]
    if first.startswith("n ") or first == "n":
        parts = first.split()
        if len(parts) != 2:
            raise ValueError(f"bad header line: {first!r}")
        try:
            n = int(parts[1])
        except ValueError as exc:
            raise ValueError(f"bad vertex count: {parts[1]!r}") from exc
        edges = []
        for lineno, ln in enumerate(lines[1:], start=2):
            parts = ln.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'u v', got {ln!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: non-integer endpoint") from exc
            edges.append((u, v))
        return from_edge_list(n, edges)
    # dense 0/1 matrix
    rows = []
    for lineno, ln in enumerate(lines, start=1):
        cells = [c.strip() for c in ln.split(",")]
        try:
            row = [int(c) for c in cells]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: non-integer matrix entry") from exc
        if any(c not in (0, 1) for c in row):
            raise ValueError(f"line {lineno}: matrix entries must be 0 or 1")
        rows.append(row)
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("dense matrix must be square")
    return from_adjacency(np.array(rows, dtype=int))


def load_graph(path) -> UndirectedDependencyGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())
