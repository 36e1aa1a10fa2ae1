"""Exact minimum edge clique cover solvers.

Two minimality objectives are supported: fewest cliques (the graph's
intersection number) and fewest total vertex-to-clique assignments. Both
solvers are exact and deterministic: iterative deepening over a
budget-limited feasibility search proves the optimal objective value, then
the lexicographically least cover attaining it is reconstructed one clique
at a time (cliques as sorted tuples, covers compared as sorted tuple
lists). ``brute_force_ecc`` is a separate, deliberately plain exhaustive
solver used to gate the main ones in tests.
"""

from __future__ import annotations

import time
from bisect import bisect_right
from dataclasses import dataclass

from .graph import (
    Clique,
    EdgeCliqueCover,
    Objective,
    UndirectedDependencyGraph,
    _iter_bits,
    _mask_to_tuple,
    canonical_cover,
    maximal_clique_masks,
)

__all__ = [
    "SolverBudget",
    "BudgetExceededError",
    "min_clique_ecc",
    "min_assignment_ecc",
    "brute_force_ecc",
    "verify_cover",
    "CoverVerification",
]


@dataclass(frozen=True)
class SolverBudget:
    """Optional resource guard for the exact solvers.

    When either limit is hit the solver raises ``BudgetExceededError``
    instead of returning an unproven cover.
    """

    max_seconds: float | None = None
    max_nodes: int | None = None


class BudgetExceededError(RuntimeError):
    """Raised when a solver runs out of budget before proving optimality."""

    def __init__(
        self,
        objective: Objective,
        lower_bound: int,
        best_known: int | None,
        nodes: int,
        elapsed: float,
    ) -> None:
        self.objective = objective
        self.lower_bound = lower_bound
        self.best_known = best_known
        self.nodes = nodes
        self.elapsed = elapsed
        known = "none" if best_known is None else str(best_known)
        super().__init__(
            f"budget exceeded after {nodes} nodes / {elapsed:.1f}s "
            f"({objective.value}: lower bound {lower_bound}, "
            f"best cover found {known})"
        )


class _Budget:
    """Node/time accounting shared by all passes of one solve."""

    __slots__ = ("max_nodes", "max_seconds", "nodes", "start")

    def __init__(self, budget: SolverBudget | None) -> None:
        self.max_nodes = budget.max_nodes if budget else None
        self.max_seconds = budget.max_seconds if budget else None
        self.nodes = 0
        self.start = time.monotonic()

    def tick(self) -> bool:
        """Count one search node; True when the budget is exhausted."""
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            return True
        if self.max_seconds is not None and self.nodes % 256 == 0:
            if time.monotonic() - self.start > self.max_seconds:
                return True
        return False

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self.start


class _BudgetStop(Exception):
    pass


class _CoverContext:
    """Precomputed per-graph tables shared by both solvers."""

    def __init__(self, g: UndirectedDependencyGraph) -> None:
        self.g = g
        self.n = g.num_vertices
        self.rows = g.row_masks
        self.edges = g.edges()
        self.m = len(self.edges)
        self.edge_index = {e: i for i, e in enumerate(self.edges)}
        self.all_edges_mask = (1 << self.m) - 1

        self.maximal = sorted(
            maximal_clique_masks(self.rows, self.n), key=_mask_to_tuple
        )
        # maximal cliques containing each edge, canonical order
        self.edge_maximal: list[list[int]] = [[] for _ in range(self.m)]
        for cmask in self.maximal:
            for e in _iter_bits(self._edge_mask_of(cmask)):
                self.edge_maximal[e].append(cmask)

        # largest clique through each vertex (assignment lower bound)
        self.omega = [1] * self.n
        for cmask in self.maximal:
            size = cmask.bit_count()
            for v in _iter_bits(cmask):
                self.omega[v] = max(self.omega[v], size)

        # edges co-coverable with each edge, self included (clique-count
        # lower bound: greedily pick edges no single clique can pair up)
        self.compat = [0] * self.m
        for i, (u, v) in enumerate(self.edges):
            mask_i = (1 << u) | (1 << v)
            for j in range(i, self.m):
                x, y = self.edges[j]
                union = mask_i | (1 << x) | (1 << y)
                if self._mask_is_clique(union):
                    self.compat[i] |= 1 << j
                    self.compat[j] |= 1 << i

        # edge scan order for branching: most constrained first
        self.edge_order = sorted(
            range(self.m), key=lambda e: (len(self.edge_maximal[e]), e)
        )
        # greedy order for the conflict lower bound: fewest partners first
        self.lb_order = sorted(
            range(self.m), key=lambda e: (self.compat[e].bit_count(), e)
        )

        self._edge_mask_cache: dict[int, int] = {}
        self._cliques_at_edge: dict[int, list[int]] = {}
        # canonical ranks over the full clique universe, built lazily for
        # the lexicographic pass
        self._rank: dict[int, int] | None = None
        self._edge_pool_ranks: list[list[int]] | None = None

    # -- small helpers ----------------------------------------------------

    def _mask_is_clique(self, mask: int) -> bool:
        rest = mask
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            if mask & ~low & ~self.rows[v]:
                return False
        return True

    def _edge_mask_of(self, cmask: int) -> int:
        verts = _mask_to_tuple(cmask)
        out = 0
        for i, a in enumerate(verts):
            for b in verts[i + 1 :]:
                out |= 1 << self.edge_index[(a, b)]
        return out

    def edge_mask_of(self, cmask: int) -> int:
        got = self._edge_mask_cache.get(cmask)
        if got is None:
            got = self._edge_mask_of(cmask)
            self._edge_mask_cache[cmask] = got
        return got

    def cliques_at_edge(self, e: int) -> list[int]:
        """Every clique of the graph containing edge e, canonical order."""
        got = self._cliques_at_edge.get(e)
        if got is not None:
            return got
        u, v = self.edges[e]
        base = (1 << u) | (1 << v)
        common = self.rows[u] & self.rows[v]
        out = [base]

        def extend(cur: int, cand: int) -> None:
            rest = cand
            while rest:
                low = rest & -rest
                w = low.bit_length() - 1
                rest ^= low
                nxt = cur | low
                out.append(nxt)
                extend(nxt, rest & self.rows[w])

        extend(base, common)
        out.sort(key=_mask_to_tuple)
        self._cliques_at_edge[e] = out
        return out

    def ensure_ranks(self) -> None:
        """Assign each clique its position in the canonical global order."""
        if self._rank is not None:
            return
        universe: set[int] = set()
        for e in range(self.m):
            universe.update(self.cliques_at_edge(e))
        ordered = sorted(universe, key=_mask_to_tuple)
        self._rank = {cm: i for i, cm in enumerate(ordered)}
        self._edge_pool_ranks = [
            [self._rank[cm] for cm in self.cliques_at_edge(e)]
            for e in range(self.m)
        ]

    def rank_of(self, cmask: int) -> int:
        return self._rank[cmask]

    def pool_above(self, e: int, floor_rank: int) -> list[int]:
        """Cliques containing edge e with canonical rank above the floor."""
        pool = self.cliques_at_edge(e)
        if floor_rank < 0:
            return pool
        start = bisect_right(self._edge_pool_ranks[e], floor_rank)
        return pool[start:]

    # -- lower bounds ------------------------------------------------------

    def lb_cliques(self, uncovered: int) -> int:
        count = 0
        rest = uncovered
        for e in self.lb_order:
            if rest >> e & 1:
                count += 1
                rest &= ~self.compat[e]
                if not rest:
                    break
        return count

    def lb_assignments(self, uncovered: int) -> int:
        if uncovered == 0:
            return 0
        udeg = [0] * self.n
        for e in _iter_bits(uncovered):
            u, v = self.edges[e]
            udeg[u] += 1
            udeg[v] += 1
        total = 0
        for v in range(self.n):
            if udeg[v]:
                cap = self.omega[v] - 1
                total += -(-udeg[v] // cap)
        return max(total, 2 * self.lb_cliques(uncovered))


def _filter_dominated(
    cands: list[tuple[int, int]], by_size: bool
) -> list[tuple[int, int]]:
    """Drop candidates whose uncovered coverage another candidate subsumes.

    ``cands`` holds (clique_mask, coverage) pairs. With ``by_size`` a
    dominator must also be no larger (assignment objective). Exact ties
    keep the canonically first clique.
    """
    kept: list[tuple[int, int]] = []
    for cm, cov in cands:
        dominated = False
        for om, ocov in cands:
            if om == cm:
                continue
            if cov & ~ocov:
                continue
            if by_size and om.bit_count() > cm.bit_count():
                continue
            if ocov == cov and (not by_size or om.bit_count() == cm.bit_count()):
                if _mask_to_tuple(om) > _mask_to_tuple(cm):
                    continue
            dominated = True
            break
        if not dominated:
            kept.append((cm, cov))
    return kept


class _CoverSearch:
    """Budget-limited cover search shared by the value and lex passes.

    ``feasible`` answers "can the uncovered edges be covered within this
    budget using cliques canonically above the floor". The optimal value
    is found by iterative deepening from the root lower bound; the
    lexicographically least optimal cover is then grown one clique at a
    time, each step validated by a feasibility probe. Proven-infeasible
    states are memoized; entries stay valid as the floor grows because
    the candidate pool only shrinks.
    """

    def __init__(self, ctx: _CoverContext, objective: Objective, budget: _Budget):
        self.ctx = ctx
        self.objective = objective
        self.budget = budget
        self.count_cliques = objective is Objective.CLIQUE_COUNT
        # uncovered-state -> largest budget proven infeasible
        self.infeasible: dict[int, int] = {}

    def _lb(self, uncovered: int) -> int:
        if self.count_cliques:
            return self.ctx.lb_cliques(uncovered)
        return self.ctx.lb_assignments(uncovered)

    def greedy_cost(self) -> int:
        """Cost of a greedy cover; a valid upper bound for the optimum."""
        ctx = self.ctx
        uncovered = ctx.all_edges_mask
        total = 0
        while uncovered:
            best = None
            best_gain = None
            for cmask in ctx.maximal:
                cov = ctx.edge_mask_of(cmask) & uncovered
                k = cov.bit_count()
                if k == 0:
                    continue
                cost = 1 if self.count_cliques else cmask.bit_count()
                gain = (k / cost, k)
                if best_gain is None or gain > best_gain:
                    best_gain = gain
                    best = (cov, cost)
            cov, cost = best
            uncovered &= ~cov
            total += cost
        if not self.count_cliques:
            # covering every edge by itself sometimes beats the greedy
            total = min(total, 2 * self.ctx.m)
        return total

    def optimum(self) -> int:
        ctx = self.ctx
        if ctx.m == 0:
            return 0
        ub = self.greedy_cost()
        level = self._lb(ctx.all_edges_mask)
        try:
            while level < ub:
                if self.feasible(ctx.all_edges_mask, level, -1):
                    return level
                level += 1
        except _BudgetStop:
            raise BudgetExceededError(
                self.objective, level, ub, self.budget.nodes, self.budget.elapsed
            ) from None
        return ub

    def lex_least(self, optimum: int) -> list[int]:
        ctx = self.ctx
        ctx.ensure_ranks()
        uncovered = ctx.all_edges_mask
        remaining = optimum
        floor = -1
        chosen: list[int] = []
        while uncovered:
            placed = False
            # coverage/cost pairs of probed-and-rejected candidates; a
            # candidate dominated by one of them cannot succeed either
            rejected: list[tuple[int, int]] = []
            for cm, cov in self._frontier(uncovered, floor):
                step = 1 if self.count_cliques else cm.bit_count()
                if step > remaining:
                    continue
                if any(
                    not cov & ~rcov and rstep <= step for rcov, rstep in rejected
                ):
                    continue
                if self.feasible(uncovered & ~cov, remaining - step, ctx.rank_of(cm)):
                    chosen.append(cm)
                    uncovered &= ~cov
                    remaining -= step
                    floor = ctx.rank_of(cm)
                    placed = True
                    break
                rejected.append((cov, step))
            if not placed:  # pragma: no cover - optimum guarantees progress
                raise AssertionError("lexicographic reconstruction lost the optimum")
        return chosen

    def _frontier(self, uncovered: int, floor_rank: int):
        """Cliques above the floor covering something, canonical order."""
        ctx = self.ctx
        seen: set[int] = set()
        items: list[tuple[int, int, int]] = []
        for e in _iter_bits(uncovered):
            for cm in ctx.pool_above(e, floor_rank):
                if cm in seen:
                    continue
                seen.add(cm)
                items.append((ctx.rank_of(cm), cm, ctx.edge_mask_of(cm) & uncovered))
        items.sort()
        return [(cm, cov) for _, cm, cov in items]

    def _pool(self, e: int, floor_rank: int) -> list[int]:
        ctx = self.ctx
        if floor_rank < 0 and self.count_cliques:
            # without a floor, maximal cliques suffice for the count
            # objective: any cover clique extends to a maximal one
            return ctx.edge_maximal[e]
        return ctx.pool_above(e, floor_rank)

    def feasible(self, uncovered: int, budget: int, floor_rank: int) -> bool:
        """True iff cliques above the floor can cover ``uncovered`` in budget."""
        ctx = self.ctx
        while True:
            if self.budget.tick():
                raise _BudgetStop
            if uncovered == 0:
                return True
            if budget <= 0:
                return False
            known = self.infeasible.get(uncovered)
            if known is not None and budget <= known:
                return False
            if self._lb(uncovered) > budget:
                self._note_infeasible(uncovered, budget)
                return False

            entry_uncovered = uncovered
            entry_budget = budget
            best_cands: list[tuple[int, int]] | None = None
            scanned = 0
            forced = False
            for e in ctx.edge_order:
                if not uncovered >> e & 1:
                    continue
                pool = self._pool(e, floor_rank)
                if not pool:
                    self._note_infeasible(uncovered, budget)
                    return False
                cands = _filter_dominated(
                    [(cm, ctx.edge_mask_of(cm) & uncovered) for cm in pool],
                    by_size=not self.count_cliques,
                )
                if len(cands) == 1:
                    cm, cov = cands[0]
                    uncovered &= ~cov
                    budget -= 1 if self.count_cliques else cm.bit_count()
                    forced = True
                    break
                if best_cands is None or len(cands) < len(best_cands):
                    best_cands = cands
                scanned += 1
                if scanned >= 8:
                    break
            if forced:
                if uncovered and budget <= 0:
                    self._note_infeasible(entry_uncovered, entry_budget)
                    return False
                continue

            cands = best_cands
            if self.count_cliques:
                cands.sort(key=lambda t: (-t[1].bit_count(), _mask_to_tuple(t[0])))
            else:
                cands.sort(
                    key=lambda t: (
                        t[0].bit_count() / t[1].bit_count(),
                        _mask_to_tuple(t[0]),
                    )
                )
            for cm, cov in cands:
                step = 1 if self.count_cliques else cm.bit_count()
                if step > budget:
                    continue
                if self.feasible(uncovered & ~cov, budget - step, floor_rank):
                    return True
            self._note_infeasible(uncovered, budget)
            return False

    def _note_infeasible(self, uncovered: int, budget: int) -> None:
        if len(self.infeasible) > 2_000_000:
            self.infeasible.clear()
        prev = self.infeasible.get(uncovered)
        if prev is None or budget > prev:
            self.infeasible[uncovered] = budget


def _solve(
    g: UndirectedDependencyGraph,
    objective: Objective,
    budget: SolverBudget | None,
) -> EdgeCliqueCover:
    ctx = _CoverContext(g)
    tracker = _Budget(budget)
    search = _CoverSearch(ctx, objective, tracker)
    optimum = search.optimum()
    if ctx.m == 0:
        return EdgeCliqueCover((), objective, 0)
    try:
        masks = search.lex_least(optimum)
    except _BudgetStop:
        raise BudgetExceededError(
            objective, optimum, optimum, tracker.nodes, tracker.elapsed
        ) from None
    cover = canonical_cover(masks, objective)
    if cover.objective_value != optimum:  # pragma: no cover - internal check
        raise AssertionError("reconstructed cover does not match proven optimum")
    return cover


def min_clique_ecc(
    g: UndirectedDependencyGraph, budget: SolverBudget | None = None
) -> EdgeCliqueCover:
    """Cover every edge with provably as few cliques as possible.

    The returned value is the graph's intersection number. Among all
    optimal covers the lexicographically least one is returned, so the
    output is reproducible even when many optima exist. An edgeless graph
    gets the empty cover. With a ``budget``, running out raises
    ``BudgetExceededError`` rather than returning an unproven answer.
    """
    return _solve(g, Objective.CLIQUE_COUNT, budget)


def min_assignment_ecc(
    g: UndirectedDependencyGraph, budget: SolverBudget | None = None
) -> EdgeCliqueCover:
    """Cover every edge minimizing total vertex-to-clique assignments.

    Minimizes the sum of clique sizes (equivalently, the number of directed
    edges in the latent model built from the cover). Same determinism and
    budget contract as ``min_clique_ecc``.
    """
    return _solve(g, Objective.ASSIGNMENT_COUNT, budget)


# -- brute force oracle ------------------------------------------------------


def brute_force_ecc(
    g: UndirectedDependencyGraph,
    objective: Objective,
    max_vertices: int = 10,
) -> EdgeCliqueCover:
    """Exhaustive reference solver for small graphs (tests only).

    Enumerates every clique, searches all covers of every edge with plain
    depth-first search plus an elementary admissible bound, collects all
    optimal covers, and returns the lexicographically least. Refuses graphs
    with more than ``max_vertices`` vertices.
    """
    n = g.num_vertices
    if n > max_vertices:
        raise ValueError(f"brute force capped at n={max_vertices}, got n={n}")
    edges = g.edges()
    m = len(edges)
    if m == 0:
        return EdgeCliqueCover((), objective, 0)
    edge_index = {e: i for i, e in enumerate(edges)}
    rows = g.row_masks

    # every clique with >= 2 vertices, as (vertex_mask, edge_mask, size)
    cliques: list[tuple[int, int, int]] = []
    for mask in range(1, 1 << n):
        size = mask.bit_count()
        if size < 2:
            continue
        verts = _mask_to_tuple(mask)
        ok = True
        emask = 0
        for i, a in enumerate(verts):
            for b in verts[i + 1 :]:
                if not rows[a] >> b & 1:
                    ok = False
                    break
                emask |= 1 << edge_index[(a, b)]
            if not ok:
                break
        if ok:
            cliques.append((mask, emask, size))

    at_edge: list[list[int]] = [[] for _ in range(m)]
    for idx, (_, emask, _) in enumerate(cliques):
        for e in _iter_bits(emask):
            at_edge[e].append(idx)

    count_objective = objective is Objective.CLIQUE_COUNT
    max_edges_per_clique = max(c[2] * (c[2] - 1) // 2 for c in cliques)
    best: list[int | None] = [None]
    optima: set[frozenset[int]] = set()

    def bound(uncovered_count: int) -> int:
        per_clique = -(-uncovered_count // max_edges_per_clique)
        return per_clique if count_objective else 2 * per_clique

    def rec(uncovered: int, cost: int, chosen: tuple[int, ...]) -> None:
        if uncovered == 0:
            if best[0] is None or cost < best[0]:
                best[0] = cost
                optima.clear()
            if cost == best[0]:
                optima.add(frozenset(chosen))
            return
        if best[0] is not None and cost + bound(uncovered.bit_count()) > best[0]:
            return
        e = (uncovered & -uncovered).bit_length() - 1
        for idx in at_edge[e]:
            vmask, emask, size = cliques[idx]
            step = 1 if count_objective else size
            rec(uncovered & ~emask, cost + step, chosen + (idx,))

    rec((1 << m) - 1, 0, ())
    assert best[0] is not None
    covers = [
        sorted(_mask_to_tuple(cliques[idx][0]) for idx in member_set)
        for member_set in optima
    ]
    least = min(covers)
    return EdgeCliqueCover(tuple(Clique(t) for t in least), objective, best[0])


# -- verification -------------------------------------------------------------


@dataclass(frozen=True)
class CoverVerification:
    """Per-check outcome of validating a cover against its host graph."""

    cliques_valid: bool
    all_edges_covered: bool
    no_non_edges_covered: bool
    no_subset_redundancy: bool
    objective_consistent: bool
    uncovered_edges: tuple[tuple[int, int], ...] = ()
    invalid_cliques: tuple[tuple[int, ...], ...] = ()

    @property
    def ok(self) -> bool:
        return (
            self.cliques_valid
            and self.all_edges_covered
            and self.no_non_edges_covered
            and self.no_subset_redundancy
            and self.objective_consistent
        )


def verify_cover(
    g: UndirectedDependencyGraph, cover: EdgeCliqueCover
) -> CoverVerification:
    """Check a cover structurally; failures are report entries, not errors."""
    n = g.num_vertices
    cliques_valid = True
    no_non_edges = True
    invalid: list[tuple[int, ...]] = []
    covered = set()
    for c in cover.cliques:
        members = c.members
        good = all(0 <= v < n for v in members)
        if good:
            for i, a in enumerate(members):
                for b in members[i + 1 :]:
                    if g.has_edge(a, b):
                        covered.add((a, b))
                    else:
                        good = False
                        no_non_edges = False
        if not good:
            cliques_valid = False
            invalid.append(members)

    edge_set = set(g.edges())
    missing = tuple(sorted(edge_set - covered))
    all_covered = not missing

    sets = [frozenset(c.members) for c in cover.cliques]
    no_subset = True
    for i, a in enumerate(sets):
        for j, b in enumerate(sets):
            if i != j and a <= b:
                no_subset = False

    if cover.objective is Objective.CLIQUE_COUNT:
        recomputed = len(cover.cliques)
    else:
        recomputed = sum(c.size for c in cover.cliques)
    objective_ok = recomputed == cover.objective_value

    return CoverVerification(
        cliques_valid=cliques_valid,
        all_edges_covered=all_covered,
        no_non_edges_covered=no_non_edges,
        no_subset_redundancy=no_subset,
        objective_consistent=objective_ok,
        uncovered_edges=missing,
        invalid_cliques=tuple(invalid),
    )
