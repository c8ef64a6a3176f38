"""Synthetic Gaussian-cluster datasets for demos, tests, and benchmarks."""

from __future__ import annotations

import numpy as np

from .data import Dataset
from .errors import InvalidArgumentError


def gaussian_clusters(centers, sigmas, counts, seed) -> Dataset:
    """Isotropic Gaussian blobs, one class per center, labels 1..K."""
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    sigmas = np.asarray(sigmas, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.int64)
    k = centers.shape[0]
    if sigmas.shape != (k,) or counts.shape != (k,):
        raise InvalidArgumentError("need one sigma and one count per center")
    if np.any(counts < 1):
        raise InvalidArgumentError("counts must be positive")
    rng = np.random.default_rng(seed)
    xs, labels = [], []
    for c in range(k):
        xs.append(rng.normal(centers[c], sigmas[c], size=(counts[c], centers.shape[1])))
        labels.append(np.full(counts[c], c + 1))
    return Dataset(np.vstack(xs), np.concatenate(labels), class_count=k)


def two_gaussians(n_per_class: int, seed) -> Dataset:
    """Two 2-d classes sqrt(2) apart: sigma 4/5 for class 1, 1/2 for class 2."""
    return gaussian_clusters(
        centers=[[0.0, 0.0], [1.0, 1.0]],
        sigmas=[0.8, 0.5],
        counts=[n_per_class, n_per_class],
        seed=seed,
    )


def three_clusters(counts=(50, 50, 50), seed=0, spread: float = 0.6) -> Dataset:
    """Three 2-d classes on a triangle, equal isotropic spread."""
    return gaussian_clusters(
        centers=[[0.0, 0.0], [2.0, 0.0], [1.0, 1.8]],
        sigmas=[spread, spread, spread],
        counts=counts,
        seed=seed,
    )
