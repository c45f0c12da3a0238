"""Deterministic network generators.

``barbell`` builds the static two-clique-plus-path family used throughout the
tests. ``synthetic_temporal`` builds a temporal benchmark whose node presence
is causally coupled to a spectral importance measure, so prediction code has
a ground truth with a known sign: with a negative coupling, structurally
important nodes are more likely to drop out of the next snapshot.
"""

from __future__ import annotations

import math

import numpy as np

from .graphs import Snapshot, TemporalNetwork
from .importance import node_importance

# Keep probability of an average node in the synthetic generator: the
# presence logit starts at logit(0.8) before the importance coupling shifts it.
BASE_PRESENCE = 0.8
_ALPHA = math.log(BASE_PRESENCE / (1.0 - BASE_PRESENCE))

_P_IN = 0.25  # intra-community edge probability
_P_OUT = 0.02  # inter-community edge probability
_P_HUB_OUT = 0.1  # hub to out-of-community node
_NOISE_SIGMA = 0.25  # per-snapshot lognormal weight jitter


def barbell(n_left: int = 4, bridge: int = 2, n_right: int = 5, weight: float = 1.0) -> Snapshot:
    """Two cliques joined by a path of ``bridge`` intermediate nodes.

    Nodes 0..n_left-1 form the left clique, the next ``bridge`` nodes the
    path, the last ``n_right`` the right clique. The path attaches at the
    last left-clique node and the first right-clique node. All weights equal.
    """
    if n_left < 2 or n_right < 2 or bridge < 0:
        raise ValueError("barbell needs n_left >= 2, n_right >= 2, bridge >= 0")
    n = n_left + bridge + n_right
    edges = []
    for i in range(n_left):
        for j in range(i + 1, n_left):
            edges.append((i, j, weight))
    right0 = n_left + bridge
    for i in range(right0, n):
        for j in range(i + 1, n):
            edges.append((i, j, weight))
    chain = [n_left - 1] + list(range(n_left, right0)) + [right0]
    for a, b in zip(chain, chain[1:]):
        edges.append((min(a, b), max(a, b), weight))
    return Snapshot(node_ids=tuple(range(n)), edges=tuple(sorted(set(edges))), directed=False, timestamp=0)


def repeat_snapshot(snapshot: Snapshot, repeats: int) -> TemporalNetwork:
    """A static temporal network: the same snapshot at times 0..repeats-1."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    snaps = tuple(
        Snapshot(node_ids=snapshot.node_ids, edges=snapshot.edges, directed=snapshot.directed, timestamp=t)
        for t in range(repeats)
    )
    return TemporalNetwork(snapshots=snaps, universe=snapshot.node_ids)


def _base_graph(n: int, communities: int, hub_count: int, rng: np.random.Generator):
    block_of = np.array([min(i * communities // n, communities - 1) for i in range(n)])
    members = [np.flatnonzero(block_of == b) for b in range(communities)]
    hubs = set()
    for h in range(hub_count):
        block = members[h % communities]
        hubs.add(int(block[(h // communities) % len(block)]))

    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            same = block_of[i] == block_of[j]
            hub_pair = i in hubs or j in hubs
            if same and hub_pair:
                p = 1.0
            elif same:
                p = _P_IN
            elif hub_pair:
                p = _P_HUB_OUT
            else:
                p = _P_OUT
            if rng.random() < p:
                edges[(i, j)] = float(rng.lognormal(0.0, 1.0))
    return edges


def _snapshot_from_edges(edge_weights: dict, timestamp: int) -> Snapshot:
    nodes = sorted({v for pair in edge_weights for v in pair})
    index = {v: k for k, v in enumerate(nodes)}
    edges = tuple((index[a], index[b], w) for (a, b), w in sorted(edge_weights.items()))
    return Snapshot(node_ids=tuple(nodes), edges=edges, directed=False, timestamp=timestamp)


def synthetic_temporal(
    n: int,
    communities: int,
    hub_count: int,
    dropout_coupling: float,
    horizon: int,
    seed: int = 0,
) -> TemporalNetwork:
    """Temporal network with importance-coupled node dropout.

    Snapshot 0 is a planted-community base graph with hub nodes. Every later
    snapshot resamples from the base graph: node i survives with probability
    sigmoid(logit(0.8) + dropout_coupling * z_i), where z_i is the node's
    standardized mb importance in the previous snapshot (0 when absent), and
    surviving base edges get fresh lognormal weight noise. With
    dropout_coupling = 0 presence is i.i.d. at rate ~0.8.

    Same arguments and seed give an identical network, byte for byte.
    """
    if communities < 1 or n < communities:
        raise ValueError("need n >= communities >= 1")
    if not 0 <= hub_count <= n:
        raise ValueError("hub_count out of range")
    if horizon < 2:
        raise ValueError("horizon must be >= 2")

    base = _base_graph(n, communities, hub_count, np.random.default_rng([seed, 0]))
    snapshots = [_snapshot_from_edges(base, 0)]

    for t in range(1, horizon):
        rng = np.random.default_rng([seed, 1, t])
        prev = snapshots[-1]
        mb = node_importance(prev, "mb").values
        z = np.zeros(n)
        if mb:
            raw = np.array(list(mb.values()))
            std = raw.std()
            mean = raw.mean()
            if std > 0:
                for node, val in mb.items():
                    z[node] = (val - mean) / std
        keep_logit = _ALPHA + dropout_coupling * z
        keep = rng.random(n) < 1.0 / (1.0 + np.exp(-keep_logit))
        survivors = {}
        for (a, b), w in sorted(base.items()):
            if keep[a] and keep[b]:
                survivors[(a, b)] = float(w * rng.lognormal(0.0, _NOISE_SIGMA))
        snapshots.append(_snapshot_from_edges(survivors, t))

    return TemporalNetwork(snapshots=tuple(snapshots), universe=tuple(range(n)))
