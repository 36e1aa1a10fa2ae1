"""Nonparametric pairwise independence testing and UDG estimation.

The dependence statistic is the classical double-centered distance
correlation, tested against a permutation null: the p-value is the
fraction of seeded random permutations of one variable whose statistic
reaches the observed one. A pair is declared independent when the
distance correlation falls below one threshold and the p-value rises
above another (defaults 0.1 / 0.1 with 1000 permutations), and the
estimated undirected dependency graph has an edge exactly where a pair
is not independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .graph import UndirectedDependencyGraph, from_edge_list

__all__ = [
    "SampleMatrix",
    "PairResult",
    "IndependenceTestReport",
    "ConditionalRelation",
    "distance_correlation",
    "permutation_pvalue",
    "estimate_udg",
    "derive_conditional_relations",
]


# -- data ---------------------------------------------------------------------


@dataclass
class SampleMatrix:
    """Observations (rows) of jointly sampled variables (columns)."""

    values: np.ndarray
    column_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError("sample matrix must be two-dimensional")
        if v.shape[0] < 2:
            raise ValueError("need at least two observations")
        if not np.all(np.isfinite(v)):
            raise ValueError("sample matrix contains non-finite values")
        self.values = v
        if self.column_labels is not None:
            self.column_labels = tuple(self.column_labels)
            if len(self.column_labels) != v.shape[1]:
                raise ValueError("one label per column required")

    @property
    def num_observations(self) -> int:
        return self.values.shape[0]

    @property
    def num_variables(self) -> int:
        return self.values.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.values[:, j]

    def to_csv(self, include_header: bool = False) -> str:
        lines = []
        if include_header:
            labels = self.column_labels or tuple(
                f"x{j}" for j in range(self.num_variables)
            )
            lines.append(",".join(labels))
        for row in self.values:
            lines.append(",".join(repr(float(x)) for x in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, has_header: bool = False) -> "SampleMatrix":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty sample file")
        labels: tuple[str, ...] | None = None
        if has_header:
            labels = tuple(cell.strip() for cell in lines[0].split(","))
            lines = lines[1:]
        rows = []
        offset = 2 if has_header else 1
        for lineno, ln in enumerate(lines, start=offset):
            cells = ln.split(",")
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: non-numeric sample value") from exc
            if len(rows[-1]) != len(rows[0]):
                raise ValueError(f"line {lineno}: ragged row")
        return cls(np.array(rows, dtype=np.float64), labels)

    @classmethod
    def load(cls, path, has_header: bool = False) -> "SampleMatrix":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_csv(fh.read(), has_header)


@dataclass(frozen=True)
class PairResult:
    """Test outcome for one unordered variable pair."""

    i: int
    j: int
    dcorr: float
    p_value: float
    independent: bool


@dataclass(frozen=True)
class IndependenceTestReport:
    """All pairwise test outcomes plus the decision parameters used."""

    results: tuple[PairResult, ...]
    dcorr_threshold: float
    p_threshold: float
    num_permutations: int
    seed: int

    def result_for(self, i: int, j: int) -> PairResult:
        a, b = (i, j) if i < j else (j, i)
        for r in self.results:
            if r.i == a and r.j == b:
                return r
        raise KeyError(f"no result for pair ({i}, {j})")

    def to_json_dict(self) -> dict:
        return {
            "dcorr_threshold": self.dcorr_threshold,
            "p_threshold": self.p_threshold,
            "num_permutations": self.num_permutations,
            "seed": self.seed,
            "pairs": [
                {
                    "i": r.i,
                    "j": r.j,
                    "dcorr": r.dcorr,
                    "p_value": r.p_value,
                    "independent": r.independent,
                }
                for r in self.results
            ],
        }


@dataclass(frozen=True)
class ConditionalRelation:
    """Whether variables i and j are dependent given a third variable."""

    i: int
    j: int
    given: int
    dependent: bool

    def __post_init__(self) -> None:
        if len({self.i, self.j, self.given}) != 3:
            raise ValueError("i, j and the conditioning variable must differ")


# -- distance correlation ------------------------------------------------------


def _as_vector(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64).ravel()
    if v.size < 2:
        raise ValueError(f"{name} needs at least two observations")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite values")
    return v


def _centered_distances(x: np.ndarray) -> np.ndarray:
    d = np.abs(x[:, None] - x[None, :])
    row = d.mean(axis=1, keepdims=True)
    col = d.mean(axis=0, keepdims=True)
    return d - row - col + d.mean()


@njit(cache=True)
def _permuted_dcov2(a: np.ndarray, b: np.ndarray, p: np.ndarray) -> float:
    # upper triangle only (both matrices are symmetric); four running
    # sums keep the gather pipeline from stalling on one accumulator
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        pi = p[i]
        arow = a[i]
        brow = b[pi]
        a0 = 0.0
        a1 = 0.0
        a2 = 0.0
        a3 = 0.0
        j = i + 1
        while j + 3 < n:
            a0 += arow[j] * brow[p[j]]
            a1 += arow[j + 1] * brow[p[j + 1]]
            a2 += arow[j + 2] * brow[p[j + 2]]
            a3 += arow[j + 3] * brow[p[j + 3]]
            j += 4
        acc = (a0 + a1) + (a2 + a3)
        while j < n:
            acc += arow[j] * brow[p[j]]
            j += 1
        s += 2.0 * acc + a[i, i] * b[pi, pi]
    return s / (n * n)


@njit(cache=True)
def _count_exceedances(
    a: np.ndarray,
    b: np.ndarray,
    perms: np.ndarray,
    observed: float,
    strict: bool,
) -> int:
    count = 0
    for t in range(perms.shape[0]):
        stat = _permuted_dcov2(a, b, perms[t])
        if stat > observed or (not strict and stat == observed):
            count += 1
    return count


def distance_correlation(x, y) -> float:
    """Distance correlation of two equal-length sample vectors, in [0, 1].

    Double-centered pairwise-distance estimator; a constant vector has
    zero distance variance and yields 0 by definition.
    """
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    if xv.size != yv.size:
        raise ValueError("x and y must have the same length")
    a = _centered_distances(xv)
    b = _centered_distances(yv)
    dvar_x = float((a * a).mean())
    dvar_y = float((b * b).mean())
    if dvar_x <= 0.0 or dvar_y <= 0.0:
        return 0.0
    dcov2 = float((a * b).mean())
    r2 = max(dcov2, 0.0) / np.sqrt(dvar_x * dvar_y)
    return float(min(np.sqrt(r2), 1.0))


def _pvalue_from_matrices(
    a: np.ndarray,
    b: np.ndarray,
    dvar_x: float,
    dvar_y: float,
    num_permutations: int,
    rng: np.random.Generator,
    strict: bool,
) -> float:
    n = a.shape[0]
    if dvar_x <= 0.0 or dvar_y <= 0.0:
        # every permuted statistic ties the observed zero
        return 0.0 if strict else 1.0
    identity = np.arange(n, dtype=np.int64)
    observed = _permuted_dcov2(a, b, identity)
    perms = np.empty((num_permutations, n), dtype=np.int64)
    for t in range(num_permutations):
        perms[t] = rng.permutation(n)
    count = _count_exceedances(a, b, perms, observed, strict)
    return count / num_permutations


def permutation_pvalue(
    x,
    y,
    num_permutations: int = 1000,
    seed: int = 0,
    strict: bool = False,
) -> float:
    """Permutation p-value for dependence between x and y.

    Shuffles y, recomputes the distance correlation per shuffle, and
    returns the fraction of shuffles reaching the observed value
    (``strict`` counts only strict exceedances). Deterministic for a
    fixed seed.
    """
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    if xv.size != yv.size:
        raise ValueError("x and y must have the same length")
    if num_permutations < 1:
        raise ValueError("num_permutations must be >= 1")
    a = _centered_distances(xv)
    b = _centered_distances(yv)
    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF]))
    return _pvalue_from_matrices(
        a,
        b,
        float((a * a).mean()),
        float((b * b).mean()),
        num_permutations,
        rng,
        strict,
    )


def _pair_rng(seed: int, i: int, j: int) -> np.random.Generator:
    # independent stream per pair so parallel and sequential runs agree
    return np.random.default_rng(
        np.random.SeedSequence([seed & 0xFFFFFFFF, i, j])
    )


def estimate_udg(
    samples: SampleMatrix | np.ndarray,
    dcorr_threshold: float = 0.1,
    p_threshold: float = 0.1,
    num_permutations: int = 1000,
    seed: int = 0,
    strict: bool = False,
) -> tuple[UndirectedDependencyGraph, IndependenceTestReport]:
    """Estimate the undirected dependency graph from raw samples.

    Tests every unordered column pair; pair (i, j) is independent iff its
    distance correlation is below ``dcorr_threshold`` and its permutation
    p-value is above ``p_threshold``, and the graph has edge (i, j) iff
    the pair is not independent.
    """
    if not isinstance(samples, SampleMatrix):
        samples = SampleMatrix(np.asarray(samples))
    n = samples.num_variables
    if n < 2:
        raise ValueError("need at least two variables")

    # cache centered distance matrices up to ~256 MB
    nobs = samples.num_observations
    cache_cap = max(2, 256_000_000 // (nobs * nobs * 8))
    denom_cache: dict[int, tuple[np.ndarray, float]] = {}

    def centered(j: int) -> tuple[np.ndarray, float]:
        got = denom_cache.get(j)
        if got is None:
            mat = _centered_distances(samples.column(j))
            got = (mat, float((mat * mat).mean()))
            if len(denom_cache) < cache_cap:
                denom_cache[j] = got
        return got

    results = []
    edges = []
    for i in range(n):
        a, dvar_x = centered(i)
        for j in range(i + 1, n):
            b, dvar_y = centered(j)
            if dvar_x <= 0.0 or dvar_y <= 0.0:
                dcorr = 0.0
            else:
                dcov2 = float((a * b).mean())
                dcorr = float(
                    min(np.sqrt(max(dcov2, 0.0) / np.sqrt(dvar_x * dvar_y)), 1.0)
                )
            p = _pvalue_from_matrices(
                a, b, dvar_x, dvar_y, num_permutations, _pair_rng(seed, i, j), strict
            )
            independent = dcorr < dcorr_threshold and p > p_threshold
            results.append(PairResult(i, j, dcorr, p, independent))
            if not independent:
                edges.append((i, j))

    labels = samples.column_labels
    graph = from_edge_list(n, edges, labels)
    report = IndependenceTestReport(
        tuple(results), dcorr_threshold, p_threshold, num_permutations, seed
    )
    return graph, report


# -- conditional relations -------------------------------------------------------


def derive_conditional_relations(
    g: UndirectedDependencyGraph,
) -> list[ConditionalRelation]:
    """Single-variable conditional (in)dependencies implied by the graph.

    When every dependence among the measured variables is induced by
    latent causes, the unconditional pattern fixes all conditional ones:
    adjacent pairs stay dependent given any third variable; a non-adjacent
    pair stays independent given a variable not adjacent to both, and
    becomes dependent given a common neighbour (the third variable is a
    collider between them).
    """
    out = []
    n = g.num_vertices
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = g.has_edge(i, j)
            for k in range(n):
                if k == i or k == j:
                    continue
                if adjacent:
                    dependent = True
                elif g.has_edge(i, k) and g.has_edge(j, k):
                    dependent = True
                else:
                    dependent = False
                out.append(ConditionalRelation(i, j, k, dependent))
    return out
