"""k-means++ clustering of chunk vectors and representative selection.

The RNG is numpy's PCG64 (``np.random.default_rng``), so partitions are
reproducible for a given seed.  Distances are Euclidean; on the unit
vectors produced by the embeddings module that ordering is equivalent to
cosine similarity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError

K_HARD_CAP = 22


@dataclass
class ClusterAssignment:
    """Labels in chunk order (the transition sequence), centroids, inertia."""

    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    k: int
    seed: int
    inertia_history: list[float] = field(default_factory=list)


def _squared_distances(vectors: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """(n, k) matrix of squared Euclidean distances."""
    diff = vectors[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def distinct_count(vectors: np.ndarray) -> int:
    return np.unique(vectors, axis=0).shape[0]


def _seed_centroids(vectors: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = vectors.shape[0]
    centroids = np.empty((k, vectors.shape[1]), dtype=np.float64)
    centroids[0] = vectors[int(rng.integers(n))]
    if k == 1:
        return centroids
    d2 = ((vectors - centroids[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        probs = d2 / d2.sum()
        idx = int(rng.choice(n, p=probs))
        centroids[i] = vectors[idx]
        d2 = np.minimum(d2, ((vectors - centroids[i]) ** 2).sum(axis=1))
    return centroids


def _check_feasible(vectors: np.ndarray, k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > distinct_count(vectors):
        raise InfeasibleError(
            f"k={k} exceeds the {distinct_count(vectors)} distinct vectors available"
        )


def kmeanspp_seed(vectors: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Arthur-Vassilvitskii seeding: first centroid uniform, the rest D^2-weighted.

    Deterministic for a given seed. Requires k <= number of distinct vectors,
    otherwise some draw would have zero probability mass everywhere.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    _check_feasible(vectors, k)
    return _seed_centroids(vectors, k, np.random.default_rng(seed))


def kmeans(
    vectors: np.ndarray,
    k: int,
    seed: int,
    max_iters: int = 100,
    tol: float = 1e-6,
    init_centroids: np.ndarray | None = None,
    n_init: int = 10,
) -> ClusterAssignment:
    """Best of n_init seeded k-means++ starts, each refined by Lloyd iterations.

    All starts draw from one generator seeded with ``seed``, so the result is
    deterministic; the lowest-inertia run wins (earlier run kept on ties).
    Passing init_centroids runs Lloyd once from exactly those centroids.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    _check_feasible(vectors, k)
    if init_centroids is not None:
        centroids = np.array(init_centroids, dtype=np.float64, copy=True)
        if centroids.shape != (k, vectors.shape[1]):
            raise ValueError("init_centroids shape mismatch")
        return _lloyd(vectors, k, centroids, max_iters, tol, seed)
    if n_init < 1:
        raise ValueError("n_init must be >= 1")
    rng = np.random.default_rng(seed)
    best: ClusterAssignment | None = None
    for _ in range(n_init):
        run = _lloyd(vectors, k, _seed_centroids(vectors, k, rng), max_iters, tol, seed)
        if best is None or run.inertia < best.inertia:
            best = run
    return best


def _lloyd(
    vectors: np.ndarray,
    k: int,
    centroids: np.ndarray,
    max_iters: int,
    tol: float,
    seed: int,
) -> ClusterAssignment:
    """Alternate assignment and centroid update until the centroids settle.

    Ties in nearest-centroid assignment go to the lowest cluster id. If an
    assignment step empties a cluster its centroid is reseeded to the point
    farthest from it (taken from a cluster with >= 2 members), which keeps
    every cluster non-empty and keeps inertia non-increasing.
    """
    n = vectors.shape[0]
    labels = np.zeros(n, dtype=np.int64)
    history: list[float] = []
    for _ in range(max_iters):
        d2 = _squared_distances(vectors, centroids)
        labels = np.argmin(d2, axis=1)  # argmin takes the lowest id on ties

        counts = np.bincount(labels, minlength=k)
        for c in range(k):
            if counts[c] > 0:
                continue
            eligible = counts[labels] >= 2
            candidate = np.where(eligible, d2[:, c], -np.inf)
            p = int(np.argmax(candidate))
            counts[labels[p]] -= 1
            labels[p] = c
            counts[c] = 1

        new_centroids = np.empty_like(centroids)
        for c in range(k):
            new_centroids[c] = vectors[labels == c].mean(axis=0)

        inertia = float(((vectors - new_centroids[labels]) ** 2).sum())
        history.append(inertia)

        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if shift < tol:
            break

    return ClusterAssignment(
        labels=labels,
        centroids=centroids,
        inertia=history[-1],
        k=k,
        seed=seed,
        inertia_history=history,
    )


def representatives(
    assignment: ClusterAssignment, vectors: np.ndarray, top_k: int = 5
) -> dict[int, list[int]]:
    """Per cluster, the min(top_k, size) member indices nearest its centroid.

    Ties break toward the lower chunk index; distances are non-decreasing
    within each list.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    reps: dict[int, list[int]] = {}
    for c in range(assignment.k):
        members = np.flatnonzero(assignment.labels == c)
        dists = ((vectors[members] - assignment.centroids[c]) ** 2).sum(axis=1)
        order = np.argsort(dists, kind="stable")  # stable: lower index wins ties
        reps[c] = [int(members[i]) for i in order[: min(top_k, len(members))]]
    return reps


def choose_k(num_chunks: int, k_override: int | None = None) -> int:
    """Pick the cluster count: an explicit override, else sqrt(n/2) clamped to [2, 22].

    The upper clamp keeps exact pathfinding feasible by default; the result
    never exceeds the number of chunks.
    """
    if num_chunks < 1:
        raise ValueError("num_chunks must be >= 1")
    if k_override is not None:
        if k_override < 1:
            raise ValueError(f"k must be >= 1, got {k_override}")
        return min(k_override, num_chunks)
    k = int(round(math.sqrt(num_chunks / 2)))
    return min(max(2, min(k, K_HARD_CAP)), num_chunks)
