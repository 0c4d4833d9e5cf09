"""k-means++ clustering (D^2 seeding + Lloyd iterations) for unit vectors.

Euclidean distance on unit-normalized embeddings orders pairs the same way
as cosine distance, so plain k-means is appropriate after normalization.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np


@dataclass
class Clustering:
    k: int
    assignments: np.ndarray  # point index -> cluster id
    centroids: np.ndarray    # k x D
    inertia: float


def _check_k(points, k):
    if k < 1:
        raise ValueError("k must be >= 1")
    distinct = np.unique(points, axis=0).shape[0]
    if k > distinct:
        raise ValueError(f"k={k} exceeds the {distinct} distinct points")


def kmeans_pp_seed(points, k, seed):
    """Standard D^2 seeding: first centroid uniform, each next one drawn
    with probability proportional to squared distance to the nearest
    centroid chosen so far."""
    points = np.asarray(points, dtype=float)
    _check_k(points, k)
    rng = np.random.default_rng(seed)
    n = len(points)
    centroids = np.empty((k, points.shape[1]))
    first = rng.integers(n)
    centroids[0] = points[first]
    d2 = np.sum((points - centroids[0]) ** 2, axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0:
            # all mass on already-chosen coordinates cannot happen when
            # k <= distinct points; guard anyway
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=d2 / total)
        centroids[i] = points[idx]
        d2 = np.minimum(d2, np.sum((points - centroids[i]) ** 2, axis=1))
    return centroids


def _assign(points, centroids):
    d2 = np.sum((points[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
    labels = np.argmin(d2, axis=1)  # argmin takes the lowest index on ties
    return labels, d2


def _lloyd(points, centroids, max_iter, tol):
    k = len(centroids)
    centroids = centroids.copy()
    prev_inertia = np.inf
    labels, d2 = _assign(points, centroids)
    for _ in range(max_iter):
        inertia = float(d2[np.arange(len(points)), labels].sum())
        assert inertia <= prev_inertia + 1e-9 * max(1.0, prev_inertia), \
            "inertia increased across a Lloyd iteration"
        prev_inertia = inertia

        new_centroids = centroids.copy()
        for c in range(k):
            members = labels == c
            if members.any():
                new_centroids[c] = points[members].mean(axis=0)
            else:
                # repair: seize the point farthest from its current centroid
                far = np.argmax(d2[np.arange(len(points)), labels])
                new_centroids[c] = points[far]
                labels[far] = c
        shift = np.linalg.norm(new_centroids - centroids, axis=1).max()
        centroids = new_centroids
        labels, d2 = _assign(points, centroids)
        if shift < tol:
            break
    inertia = float(d2[np.arange(len(points)), labels].sum())
    return Clustering(k, labels, centroids, inertia)


def kmeans_fit(points, k, seed, max_iter=300, tol=1e-6, n_init=10):
    """Best of n_init seeded k-means++ runs (lowest inertia wins).

    Restart seeds are derived deterministically from ``seed``.
    """
    points = np.asarray(points, dtype=float)
    _check_k(points, k)
    best = None
    for i in range(n_init):
        centroids = kmeans_pp_seed(points, k, seed=[seed, i])
        result = _lloyd(points, centroids, max_iter, tol)
        if best is None or result.inertia < best.inertia:
            best = result
    return best


def write_clustering(clustering, path_csv, path_json, seed=None):
    """CSV of area_id,cluster_id plus a JSON sidecar with run metadata."""
    with open(path_csv, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["area_id", "cluster_id"])
        for area_id, cid in enumerate(clustering.assignments):
            w.writerow([area_id, int(cid)])
    sidecar = {
        "k": clustering.k,
        "seed": seed,
        "inertia": clustering.inertia,
        "centroids": clustering.centroids.tolist(),
    }
    with open(path_json, "w", encoding="utf-8") as f:
        json.dump(sidecar, f, indent=2)
