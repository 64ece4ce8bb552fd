"""Cross-document grouping: ward agglomeration with multi-stage refinement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels


@dataclass
class ClusterSet:
    clusters: list  # disjoint, exhaustive lists of input indices
    threshold_used: list  # per cluster: threshold of the stage that produced it

    def __post_init__(self):
        seen = set()
        for c in self.clusters:
            if not c:
                raise ValueError("empty cluster")
            if seen & set(c):
                raise ValueError("overlapping clusters")
            seen.update(c)


def _as_matrix(vectors) -> np.ndarray:
    mat = np.asarray(vectors, dtype=np.float64)
    if mat.ndim == 1:
        mat = mat[:, None]
    return mat


def ward_agglomerate(vectors, threshold: float) -> ClusterSet:
    """Merge clusters while the cheapest ward cost stays within the threshold.

    The merge cost is |A||B|/(|A|+|B|) * ||mean_A - mean_B||^2, so two
    singletons merge exactly when their euclidean distance <= threshold
    (cost threshold^2 / 2). Ties go to the smallest member indices.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    mat = _as_matrix(vectors)
    n = mat.shape[0]
    if n == 0:
        raise ValueError("need at least one vector")
    if n == 1:
        return ClusterSet([[0]], [threshold])
    sq = ((mat[:, None, :] - mat[None, :, :]) ** 2).sum(axis=2)
    cost = sq / 2.0
    cost[np.tril_indices(n)] = np.inf
    parent = _kernels.ward_merge(cost, threshold * threshold / 2.0)
    roots = {}
    for i in range(n):
        r = i
        while parent[r] != r:
            r = parent[r]
        roots.setdefault(int(r), []).append(i)
    clusters = [sorted(v) for _, v in sorted(roots.items())]
    return ClusterSet(clusters, [threshold] * len(clusters))


def halving_schedule(tau_initial: float, floor: float) -> list[float]:
    """Thresholds visited by refinement: tau, tau/2, ... down to the floor."""
    if not tau_initial >= floor > 0:
        raise ValueError("need tau_initial >= floor > 0")
    out = [tau_initial]
    while out[-1] / 2.0 >= floor:
        out.append(out[-1] / 2.0)
    return out


def multistage_cluster(sentences, embedder, tau_initial: float = 2.0, floor: float = 0.5) -> ClusterSet:
    """Cluster at the initial threshold, then re-split oversized clusters.

    A cluster holding more than m/n members (m = all sentences, n = cluster
    count in force when it is examined) is re-clustered at half its
    threshold; halving stops once the next threshold would drop below the
    floor.
    """
    sentences = list(sentences)
    m = len(sentences)
    if m == 0:
        raise ValueError("nothing to cluster")
    mat = np.stack([embedder.embed(s) for s in sentences])
    first = ward_agglomerate(mat, tau_initial)
    partition = [(members, tau_initial) for members in first.clusters]
    idx = 0
    while idx < len(partition):
        members, t = partition[idx]
        half = t / 2.0
        if len(members) > m / len(partition) and half >= floor:
            sub = ward_agglomerate(mat[members], half)
            replacement = [([members[i] for i in c], half) for c in sub.clusters]
            partition[idx : idx + 1] = replacement
        else:
            idx += 1
    return ClusterSet([list(mem) for mem, _ in partition], [t for _, t in partition])
