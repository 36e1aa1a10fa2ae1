"""Structural analyses of latent models and synthetic data generation.

The analyses summarize how latents and measurements share each other
(degree histograms and co-parent / co-child count matrices). The sampler
draws from a linear-Gaussian (or quadratic-link) functional model over a
given structure, which is enough to exercise the full estimation pipeline
end to end.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .ecc import min_clique_ecc
from .graph import from_edge_list
from .independence import SampleMatrix
from .mcm import MeDILCausalModel, build_mcm

__all__ = [
    "SyntheticModel",
    "indegree_histogram",
    "outdegree_histogram",
    "shared_latents_matrix",
    "shared_measurements_matrix",
    "simulate",
    "synthetic_from_mcm",
    "triangle_tail_structure",
    "cycle_chord_structure",
    "histogram_to_csv",
    "matrix_to_csv",
    "structure_stats_dict",
]


def indegree_histogram(m: MeDILCausalModel) -> dict[int, int]:
    """How many measurements have each number of latent parents."""
    return dict(sorted(Counter(int(x) for x in m.biadjacency.sum(axis=0)).items()))


def outdegree_histogram(m: MeDILCausalModel) -> dict[int, int]:
    """How many latents have each number of measurement children."""
    return dict(sorted(Counter(int(x) for x in m.biadjacency.sum(axis=1)).items()))


def shared_latents_matrix(m: MeDILCausalModel) -> np.ndarray:
    """Counts of common latent parents per measurement pair.

    Entry (i, j) is the number of latents causing both measurements; the
    diagonal holds each measurement's in-degree. Positive off-diagonal
    entries correspond exactly to edges of the induced dependency graph.
    """
    bi = m.biadjacency.astype(np.int64)
    return bi.T @ bi


def shared_measurements_matrix(m: MeDILCausalModel) -> np.ndarray:
    """Counts of common measurement children per latent pair.

    Entry (a, b) is the number of measurements caused by both latents; the
    diagonal holds each latent's out-degree.
    """
    bi = m.biadjacency.astype(np.int64)
    return bi @ bi.T


# -- synthetic data ------------------------------------------------------------


@dataclass
class SyntheticModel:
    """Functional model over a latent structure, for generating test data.

    Latents are independent standard normals; measurement b is the weighted
    sum of its parents (optionally squared, for a nonlinear link) plus
    independent Gaussian noise. Weights must be nonzero exactly on the
    structure's edges and noise levels strictly positive.
    """

    structure: MeDILCausalModel
    weights: np.ndarray
    noise_sd: np.ndarray
    link: str = "linear"

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != self.structure.biadjacency.shape:
            raise ValueError("weights must align with the structure's biadjacency")
        if np.any((w != 0.0) != self.structure.biadjacency):
            raise ValueError("weights must be nonzero exactly on structure edges")
        sd = np.asarray(self.noise_sd, dtype=np.float64)
        if sd.shape != (self.structure.num_measurements,):
            raise ValueError("one noise level per measurement required")
        if np.any(sd <= 0.0) or not np.all(np.isfinite(sd)):
            raise ValueError("noise levels must be positive and finite")
        if self.link not in ("linear", "quadratic"):
            raise ValueError(f"unknown link {self.link!r}")
        self.weights = w
        self.noise_sd = sd


def synthetic_from_mcm(
    structure: MeDILCausalModel,
    weight: float = 1.0,
    noise_sd: float = 0.1,
    link: str = "linear",
) -> SyntheticModel:
    """Uniform-weight synthetic model over an existing structure."""
    if weight == 0.0:
        raise ValueError("weight must be nonzero")
    w = structure.biadjacency.astype(np.float64) * weight
    sd = np.full(structure.num_measurements, float(noise_sd))
    return SyntheticModel(structure, w, sd, link)


def simulate(model: SyntheticModel, num_samples: int, seed: int = 0) -> SampleMatrix:
    """Draw joint samples of the measurement variables.

    Each row draws fresh independent standard-normal latents and noises;
    deterministic for a fixed seed.
    """
    if num_samples < 2:
        raise ValueError("num_samples must be >= 2")
    k = model.structure.num_latents
    n = model.structure.num_measurements
    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF]))
    latents = rng.standard_normal((num_samples, k))
    noise = rng.standard_normal((num_samples, n))
    drive = latents if model.link == "linear" else latents**2
    values = drive @ model.weights + noise * model.noise_sd
    return SampleMatrix(values, model.structure.measurement_labels)


# -- reference structures --------------------------------------------------------


def triangle_tail_structure() -> MeDILCausalModel:
    """Two latents over four measurements: a triangle plus a tail edge.

    The dependency graph is a triangle {0,1,2} with pendant edge (2,3);
    its unique minimum cover is {{0,1,2},{2,3}}, so one latent drives the
    triangle and a second drives the tail pair.
    """
    g = from_edge_list(4, [(0, 1), (0, 2), (1, 2), (2, 3)])
    return build_mcm(min_clique_ecc(g), 4)


def cycle_chord_structure() -> MeDILCausalModel:
    """Seven edge latents over six measurements: a 6-cycle plus one chord.

    The graph is triangle-free, so every minimum cover consists of all
    seven edges and the model has more latents than measurements.
    """
    g = from_edge_list(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)])
    return build_mcm(min_clique_ecc(g), 6)


# -- exports ---------------------------------------------------------------------


def histogram_to_csv(hist: dict[int, int], value_name: str) -> str:
    lines = [f"{value_name},count"]
    lines.extend(f"{k},{v}" for k, v in sorted(hist.items()))
    return "\n".join(lines) + "\n"


def matrix_to_csv(matrix: np.ndarray) -> str:
    m = np.asarray(matrix)
    header = "index," + ",".join(str(j) for j in range(m.shape[1]))
    lines = [header]
    for i, row in enumerate(m):
        lines.append(f"{i}," + ",".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


def structure_stats_dict(m: MeDILCausalModel) -> dict:
    """All structural statistics bundled for programmatic use."""
    return {
        "num_latents": m.num_latents,
        "num_measurements": m.num_measurements,
        "num_edges": m.num_edges,
        "indegree_histogram": {str(k): v for k, v in indegree_histogram(m).items()},
        "outdegree_histogram": {str(k): v for k, v in outdegree_histogram(m).items()},
        "shared_latents": shared_latents_matrix(m).tolist(),
        "shared_measurements": shared_measurements_matrix(m).tolist(),
    }
