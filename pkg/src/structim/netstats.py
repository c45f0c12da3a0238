"""Classical weighted-network statistics used as benchmarks and diagnostics.

Everything here operates on a single Snapshot. Community structure uses the
weighted modularity

    Q = (1/2m) * sum_ij (A_ij - S_i S_j / 2m) * [c_i == c_j]

with 2m the total weight of all edge ends, and greedy agglomeration that
repeatedly merges the community pair with the largest positive modularity
gain. PageRank and eigenvector centrality are the usual weighted variants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DataError, NumericalError
from .graphs import Snapshot
from .spectral import eig_sym


def modularity(snapshot: Snapshot, labels) -> float:
    """Weighted modularity of a node partition.

    ``labels`` assigns a community id to each node in snapshot order. Raises
    DataError for directed snapshots, empty graphs, or a partition that does
    not cover the nodes.
    """
    if snapshot.directed:
        raise DataError("modularity is defined here for undirected snapshots only")
    labels = np.asarray(labels)
    if labels.shape != (snapshot.n_nodes,):
        raise DataError("partition does not cover the snapshot's nodes")
    a = snapshot.adjacency()
    m2 = a.sum()
    if m2 <= 0:
        raise DataError("modularity undefined for a graph with no edges")
    s = a.sum(axis=1)
    q = 0.0
    for c in np.unique(labels):
        idx = labels == c
        q += a[np.ix_(idx, idx)].sum() - s[idx].sum() ** 2 / m2
    return float(q / m2)


def detect_communities(snapshot: Snapshot, seed: int = 0) -> np.ndarray:
    """Greedy modularity agglomeration.

    Starts from singleton communities and repeatedly merges the pair with the
    largest positive modularity gain 2 * (e_ij - a_i * a_j); ties go to the
    lowest community-id pair. Stops when no merge improves Q; if the result
    somehow falls below the single-community partition's Q it falls back to
    that. Returns dense integer labels from 0 ordered by smallest member.

    The algorithm is deterministic; ``seed`` is accepted for interface
    uniformity with the other analysis entry points and ignored.
    """
    del seed
    if snapshot.directed:
        raise DataError("community detection is defined here for undirected snapshots only")
    n = snapshot.n_nodes
    adj = snapshot.adjacency()
    m2 = adj.sum()
    if m2 <= 0:
        raise DataError("community detection undefined for a graph with no edges")

    members = {i: {i} for i in range(n)}
    a_frac = {i: adj[i].sum() / m2 for i in range(n)}
    e_frac = {}
    for i in range(n):
        for j in range(i + 1, n):
            if adj[i, j] > 0:
                e_frac[(i, j)] = adj[i, j] / m2

    while True:
        best_gain = 0.0
        best_pair = None
        for (ci, cj) in sorted(e_frac):
            gain = 2.0 * (e_frac[(ci, cj)] - a_frac[ci] * a_frac[cj])
            if gain > best_gain + 1e-15:
                best_gain = gain
                best_pair = (ci, cj)
        if best_pair is None:
            break
        ci, cj = best_pair
        members[ci] |= members.pop(cj)
        a_frac[ci] += a_frac.pop(cj)
        del e_frac[(ci, cj)]
        for (x, y) in list(e_frac):
            if cj in (x, y):
                other = y if x == cj else x
                w = e_frac.pop((x, y))
                key = (min(ci, other), max(ci, other))
                e_frac[key] = e_frac.get(key, 0.0) + w

    labels = np.empty(n, dtype=int)
    for new_id, cid in enumerate(sorted(members, key=lambda c: min(members[c]))):
        for node in members[cid]:
            labels[node] = new_id

    if modularity(snapshot, labels) < 0.0:
        labels = np.zeros(n, dtype=int)
    return labels


def eigenvector_centrality(snapshot: Snapshot) -> np.ndarray:
    """Magnitudes of the leading adjacency eigenvector (unit 2-norm)."""
    if snapshot.directed:
        raise DataError("eigenvector centrality is defined here for undirected snapshots only")
    if snapshot.n_edges == 0:
        raise DataError("eigenvector centrality undefined for a graph with no edges")
    spec = eig_sym(snapshot.adjacency())
    return np.abs(spec.eigenvectors[:, 0])


def pagerank(snapshot: Snapshot, damping: float = 0.85, tol: float = 1e-10, max_iter: int = 100000) -> np.ndarray:
    """Weighted PageRank by power iteration.

    Transition weights are out-strength normalized; dangling nodes spread
    their mass uniformly. Iterates until the L1 change drops to ``tol``.
    """
    n = snapshot.n_nodes
    if n == 0:
        raise DataError("pagerank undefined for an empty snapshot")
    a = snapshot.adjacency()
    out_s = a.sum(axis=1)
    dangling = out_s <= 0
    trans = np.zeros_like(a)
    nz = ~dangling
    trans[nz] = a[nz] / out_s[nz, None]

    p = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = damping * (trans.T @ p + p[dangling].sum() / n) + (1.0 - damping) / n
        if np.abs(nxt - p).sum() <= tol:
            return nxt
        p = nxt
    raise NumericalError(f"pagerank did not converge in {max_iter} iterations")


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    dof: float
    p_value: float


def mean_diff_ttest(a, b) -> TTestResult:
    """Welch's two-sided t-test for a difference in means.

    Uses the Welch-Satterthwaite degrees of freedom; each group needs at
    least two samples and nonzero variance.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise DataError("each group needs at least two samples")
    va = a.var(ddof=1) / a.size
    vb = b.var(ddof=1) / b.size
    if va <= 0 or vb <= 0:
        raise DataError("constant group; t statistic undefined")
    denom = va + vb
    t = (a.mean() - b.mean()) / np.sqrt(denom)
    dof = denom**2 / (va**2 / (a.size - 1) + vb**2 / (b.size - 1))
    p = 2.0 * float(special.stdtr(dof, -abs(t)))
    return TTestResult(t_stat=float(t), dof=float(dof), p_value=p)


def pearson(x, y) -> float:
    """Pearson correlation; raises DataError when either input is constant."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson expects two equal-length 1-D arrays")
    if x.size < 2:
        raise DataError("need at least two observations")
    xd = x - x.mean()
    yd = y - y.mean()
    sx = np.sqrt((xd**2).sum())
    sy = np.sqrt((yd**2).sum())
    if sx == 0 or sy == 0:
        raise DataError("correlation undefined for a constant input")
    return float((xd * yd).sum() / (sx * sy))
