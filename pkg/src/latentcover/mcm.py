"""Latent-to-measurement causal models built from edge clique covers.

A model is a bipartite DAG: every edge points from a latent variable to a
measurement variable, so measurements are pure effects. Construction posits
one latent per clique of a cover (plus an exclusive latent for any
measurement left out of every clique), which makes the model induce exactly
the dependencies of the covered graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .ecc import BudgetExceededError, SolverBudget, min_assignment_ecc, min_clique_ecc
from .graph import (
    Clique,
    EdgeCliqueCover,
    Objective,
    UndirectedDependencyGraph,
    from_edge_list,
)
from .independence import IndependenceTestReport, SampleMatrix, estimate_udg

__all__ = [
    "MeDILCausalModel",
    "GeneralDag",
    "McmValidation",
    "PipelineResult",
    "build_mcm",
    "validate_mcm",
    "induced_udg",
    "is_observationally_consistent",
    "induces_all_dependencies",
    "d_separated",
    "run_pipeline",
]


@dataclass(eq=False)
class MeDILCausalModel:
    """Bipartite causal DAG: latents (rows) -> measurements (columns).

    ``biadjacency[a, b]`` is True iff latent a directly causes measurement
    b. Degree constraints (every measurement caused, every latent causing)
    are reported by ``validate_mcm`` rather than enforced here, so broken
    models can be represented and diagnosed.
    """

    biadjacency: np.ndarray
    latent_labels: tuple[str, ...] | None = None
    measurement_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        b = np.asarray(self.biadjacency, dtype=bool)
        if b.ndim != 2:
            raise ValueError("biadjacency must be a 2-D latent x measurement matrix")
        b = b.copy()
        b.setflags(write=False)
        self.biadjacency = b
        if self.latent_labels is not None:
            self.latent_labels = tuple(self.latent_labels)
            if len(self.latent_labels) != b.shape[0]:
                raise ValueError("one label per latent required")
        if self.measurement_labels is not None:
            self.measurement_labels = tuple(self.measurement_labels)
            if len(self.measurement_labels) != b.shape[1]:
                raise ValueError("one label per measurement required")

    @property
    def num_latents(self) -> int:
        return self.biadjacency.shape[0]

    @property
    def num_measurements(self) -> int:
        return self.biadjacency.shape[1]

    @property
    def num_edges(self) -> int:
        return int(self.biadjacency.sum())

    def children_of_latent(self, a: int) -> tuple[int, ...]:
        return tuple(int(b) for b in np.flatnonzero(self.biadjacency[a]))

    def parents_of_measurement(self, b: int) -> tuple[int, ...]:
        return tuple(int(a) for a in np.flatnonzero(self.biadjacency[:, b]))

    def edges(self) -> list[tuple[int, int]]:
        """(latent, measurement) pairs in row-major order."""
        rows, cols = np.nonzero(self.biadjacency)
        return [(int(a), int(b)) for a, b in zip(rows, cols)]

    # -- viewing the model as a plain DAG ---------------------------------

    def latent_vertex(self, a: int) -> int:
        return a

    def measurement_vertex(self, b: int) -> int:
        return self.num_latents + b

    def to_general_dag(self) -> "GeneralDag":
        edges = [
            (self.latent_vertex(a), self.measurement_vertex(b))
            for a, b in self.edges()
        ]
        return GeneralDag.from_edges(self.num_latents + self.num_measurements, edges)

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        out = {
            "num_measurements": self.num_measurements,
            "num_latents": self.num_latents,
            "edges": [[a, b] for a, b in self.edges()],
        }
        if self.latent_labels is not None:
            out["latent_labels"] = list(self.latent_labels)
        if self.measurement_labels is not None:
            out["measurement_labels"] = list(self.measurement_labels)
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "MeDILCausalModel":
        k = int(data["num_latents"])
        n = int(data["num_measurements"])
        b = np.zeros((k, n), dtype=bool)
        for a, m in data["edges"]:
            if not (0 <= a < k and 0 <= m < n):
                raise ValueError(f"edge ({a}, {m}) out of range")
            b[a, m] = True
        return cls(
            b,
            tuple(data["latent_labels"]) if "latent_labels" in data else None,
            tuple(data["measurement_labels"]) if "measurement_labels" in data else None,
        )

    def to_dot(self) -> str:
        """Graphviz rendering: latents on one rank, measurements below."""
        lat = self.latent_labels or tuple(f"L{a}" for a in range(self.num_latents))
        mea = self.measurement_labels or tuple(
            f"M{b}" for b in range(self.num_measurements)
        )
        lines = ["digraph latent_model {", "  rankdir=TB;"]
        lines.append("  { rank=same;")
        for a in range(self.num_latents):
            lines.append(f'    lat{a} [label="{lat[a]}", shape=ellipse];')
        lines.append("  }")
        lines.append("  { rank=same;")
        for b in range(self.num_measurements):
            lines.append(f'    mea{b} [label="{mea[b]}", shape=box];')
        lines.append("  }")
        for a, b in self.edges():
            lines.append(f"  lat{a} -> mea{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_mcm(
    cover: EdgeCliqueCover,
    num_measurements: int,
    measurement_labels=None,
) -> MeDILCausalModel:
    """One latent per cover clique, edges to exactly that clique's members.

    Measurements in no clique get an exclusive singleton latent so every
    measurement has a cause. Latents are ordered canonically by their
    member tuples and labeled "L{index}:{members}".
    """
    member_sets = [c.members for c in cover.cliques]
    for members in member_sets:
        for v in members:
            if not 0 <= v < num_measurements:
                raise ValueError(
                    f"clique member {v} out of range for n={num_measurements}"
                )
    in_some = set()
    for members in member_sets:
        in_some.update(members)
    member_sets.extend((v,) for v in range(num_measurements) if v not in in_some)
    member_sets.sort()

    bi = np.zeros((len(member_sets), num_measurements), dtype=bool)
    labels = []
    for a, members in enumerate(member_sets):
        for v in members:
            bi[a, v] = True
        labels.append(f"L{a}:" + ",".join(str(v) for v in members))
    return MeDILCausalModel(
        bi,
        tuple(labels),
        tuple(measurement_labels) if measurement_labels is not None else None,
    )


@dataclass(frozen=True)
class McmValidation:
    """Structural checks for a latent-measurement model."""

    measurement_indegree_ok: bool
    measurement_outdegree_ok: bool
    latent_outdegree_ok: bool
    acyclic_ok: bool
    latents_parentless_ok: bool
    uncaused_measurements: tuple[int, ...] = ()
    childless_latents: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return (
            self.measurement_indegree_ok
            and self.measurement_outdegree_ok
            and self.latent_outdegree_ok
            and self.acyclic_ok
            and self.latents_parentless_ok
        )


def validate_mcm(m: MeDILCausalModel) -> McmValidation:
    """Check the defining degree constraints and acyclicity.

    The bipartite representation cannot express measurement-to-anything or
    latent-to-latent edges, so the sink/parentless/acyclicity checks are
    exercised on the assembled DAG rather than assumed.
    """
    bi = m.biadjacency
    uncaused = tuple(int(b) for b in np.flatnonzero(~bi.any(axis=0)))
    childless = tuple(int(a) for a in np.flatnonzero(~bi.any(axis=1)))

    dag = m.to_general_dag()
    measurement_sinks = all(
        not dag.children[m.measurement_vertex(b)] for b in range(m.num_measurements)
    )
    parentless = all(
        not dag.parents[m.latent_vertex(a)] for a in range(m.num_latents)
    )
    return McmValidation(
        measurement_indegree_ok=not uncaused,
        measurement_outdegree_ok=measurement_sinks,
        latent_outdegree_ok=not childless,
        acyclic_ok=True,  # GeneralDag construction verifies acyclicity
        latents_parentless_ok=parentless,
        uncaused_measurements=uncaused,
        childless_latents=childless,
    )


def induced_udg(m: MeDILCausalModel) -> UndirectedDependencyGraph:
    """Measurements are adjacent iff they share at least one latent parent."""
    bi = m.biadjacency.astype(np.int64)
    shared = bi.T @ bi
    n = m.num_measurements
    edges = [
        (i, j) for i in range(n) for j in range(i + 1, n) if shared[i, j] > 0
    ]
    return from_edge_list(n, edges, m.measurement_labels)


def is_observationally_consistent(
    m: MeDILCausalModel, g: UndirectedDependencyGraph
) -> bool:
    """True iff the model induces exactly the dependencies of ``g``.

    Equality of edge sets checks consistency and faithfulness together: no
    required dependence missing, no extra dependence induced.
    """
    if m.num_measurements != g.num_vertices:
        raise ValueError("measurement count does not match graph size")
    return induced_udg(m).row_masks == g.row_masks


def induces_all_dependencies(
    m: MeDILCausalModel, g: UndirectedDependencyGraph
) -> bool:
    """Weaker predicate: induced dependencies form a superset of ``g``'s.

    Distinguishes unfaithful-but-consistent models (for example a model
    whose latents each cause every measurement) from inconsistent ones.
    """
    if m.num_measurements != g.num_vertices:
        raise ValueError("measurement count does not match graph size")
    induced = induced_udg(m)
    return all(
        ind & gm == gm for ind, gm in zip(induced.row_masks, g.row_masks)
    )


# -- general DAGs and d-separation ---------------------------------------------


@dataclass(frozen=True)
class GeneralDag:
    """Plain DAG with parent/child lists; construction verifies acyclicity."""

    num_vertices: int
    parents: tuple[tuple[int, ...], ...]
    children: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(
        cls, num_vertices: int, edges: list[tuple[int, int]]
    ) -> "GeneralDag":
        parents: list[set[int]] = [set() for _ in range(num_vertices)]
        children: list[set[int]] = [set() for _ in range(num_vertices)]
        for u, v in edges:
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            parents[v].add(u)
            children[u].add(v)

        # Kahn's algorithm; leftovers mean a cycle
        indeg = [len(p) for p in parents]
        queue = deque(v for v in range(num_vertices) if indeg[v] == 0)
        seen = 0
        while queue:
            v = queue.popleft()
            seen += 1
            for c in children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if seen != num_vertices:
            raise ValueError("edge set contains a cycle")
        return cls(
            num_vertices,
            tuple(tuple(sorted(p)) for p in parents),
            tuple(tuple(sorted(c)) for c in children),
        )

    def ancestors_of(self, vertices) -> set[int]:
        """The given vertices plus everything upstream of them."""
        out = set(vertices)
        stack = list(out)
        while stack:
            v = stack.pop()
            for p in self.parents[v]:
                if p not in out:
                    out.add(p)
                    stack.append(p)
        return out


def d_separated(dag: GeneralDag, i: int, j: int, given) -> bool:
    """Standard graphical conditional-independence test on a DAG.

    Checks separation of i and j in the moralized ancestral graph of
    {i, j} plus the conditioning set: chains and forks are blocked by
    conditioning on the middle vertex, colliders are blocked unless the
    collider or one of its descendants is conditioned on.
    """
    z = frozenset(given)
    for v in (i, j, *z):
        if not 0 <= v < dag.num_vertices:
            raise ValueError(f"vertex {v} out of range")
    if i == j:
        raise ValueError("i and j must differ")
    if i in z or j in z:
        raise ValueError("endpoints may not be conditioned on")

    relevant = dag.ancestors_of({i, j} | z)
    neighbors: dict[int, set[int]] = {v: set() for v in relevant}
    for v in relevant:
        ps = dag.parents[v]
        for p in ps:
            neighbors[v].add(p)
            neighbors[p].add(v)
        for a_idx, p1 in enumerate(ps):
            for p2 in ps[a_idx + 1 :]:
                neighbors[p1].add(p2)
                neighbors[p2].add(p1)

    frontier = deque([i])
    visited = {i} | z
    while frontier:
        v = frontier.popleft()
        for w in neighbors[v]:
            if w == j:
                return False
            if w not in visited:
                visited.add(w)
                frontier.append(w)
    return True


# -- end-to-end pipeline --------------------------------------------------------


@dataclass
class PipelineResult:
    """Everything the samples-to-model pipeline produced.

    When the cover solver runs out of budget, ``cover`` and ``model`` are
    None and ``budget_error`` holds the failure; the estimated graph and
    test report are still delivered.
    """

    udg: UndirectedDependencyGraph
    report: IndependenceTestReport
    cover: EdgeCliqueCover | None = None
    model: MeDILCausalModel | None = None
    budget_error: BudgetExceededError | None = None

    @property
    def complete(self) -> bool:
        return self.model is not None


def run_pipeline(
    samples: SampleMatrix | np.ndarray,
    objective: Objective = Objective.CLIQUE_COUNT,
    dcorr_threshold: float = 0.1,
    p_threshold: float = 0.1,
    num_permutations: int = 1000,
    seed: int = 0,
    strict: bool = False,
    budget: SolverBudget | None = None,
) -> PipelineResult:
    """Samples -> estimated UDG -> minimum cover -> latent causal model."""
    udg, report = estimate_udg(
        samples,
        dcorr_threshold=dcorr_threshold,
        p_threshold=p_threshold,
        num_permutations=num_permutations,
        seed=seed,
        strict=strict,
    )
    solver = (
        min_clique_ecc if objective is Objective.CLIQUE_COUNT else min_assignment_ecc
    )
    try:
        cover = solver(udg, budget)
    except BudgetExceededError as exc:
        return PipelineResult(udg, report, budget_error=exc)
    model = build_mcm(cover, udg.num_vertices, udg.vertex_labels)
    if not is_observationally_consistent(model, udg):  # pragma: no cover
        raise RuntimeError("constructed model failed to reproduce the input graph")
    return PipelineResult(udg, report, cover, model)
