"""Immutable weighted snapshots and temporal networks.

A :class:`Snapshot` is one observation window: a set of node ids plus weighted
edges between them. A :class:`TemporalNetwork` is an ordered sequence of
snapshots over a shared node universe. Both are frozen dataclasses; analysis
code builds numpy views (adjacency matrices, strength vectors) on demand and
never mutates the containers.

Node ids are opaque (ints or strings). Edges are stored with local indices
into ``node_ids``; undirected edges are stored once with ``i < j``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DataError

_FORMAT_TAG = "structim-network"
_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Snapshot:
    """One weighted network observation.

    Parameters
    ----------
    node_ids:
        Distinct, hashable ids of the nodes present in this window.
    edges:
        Triples ``(i, j, w)`` of local node indices and a strictly positive
        finite weight. For undirected snapshots each pair appears once with
        ``i < j``; for directed snapshots ``(i, j)`` means an arc i -> j.
    directed:
        Edge orientation flag.
    timestamp:
        Integer time label, unique within a TemporalNetwork.
    """

    node_ids: tuple
    edges: tuple
    directed: bool = False
    timestamp: int = 0

    def __post_init__(self):
        n = len(self.node_ids)
        if len(set(self.node_ids)) != n:
            raise DataError("snapshot has duplicate node ids")
        seen = set()
        for edge in self.edges:
            if len(edge) != 3:
                raise DataError(f"edge record {edge!r} is not an (i, j, w) triple")
            i, j, w = edge
            if not (0 <= i < n) or not (0 <= j < n):
                raise DataError(f"edge ({i}, {j}) references a node outside the snapshot")
            if i == j:
                raise DataError(f"self loop on node {self.node_ids[i]!r}")
            if not self.directed and i > j:
                raise DataError("undirected edges must be stored with i < j")
            if not (isinstance(w, (int, float)) and math.isfinite(w)) or w <= 0:
                raise DataError(f"edge ({i}, {j}) has non-positive or non-finite weight {w!r}")
            if (i, j) in seen:
                raise DataError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def node_index(self) -> dict:
        """Map node id -> local index."""
        return {v: k for k, v in enumerate(self.node_ids)}

    def adjacency(self) -> np.ndarray:
        """Dense weighted adjacency matrix (n x n, float64, zero diagonal).

        Undirected snapshots produce a symmetric matrix.
        """
        a = np.zeros((self.n_nodes, self.n_nodes))
        for i, j, w in self.edges:
            a[i, j] += w
            if not self.directed:
                a[j, i] += w
        return a

    def strength(self, mode: str = "total", node: int | None = None):
        """Per-node strength vector, or a single node's strength.

        Undirected snapshots return adjacency row sums for every mode.
        Directed snapshots honor ``mode``: "out" sums outgoing arc weights,
        "in" incoming, "total" their sum. With ``node`` set, returns that
        node's strength as a float; out-of-range indices raise IndexError.
        """
        if mode not in ("total", "in", "out"):
            raise ValueError(f"unknown strength mode {mode!r}")
        a = self.adjacency()
        if not self.directed:
            s = a.sum(axis=1)
        else:
            out_s = a.sum(axis=1)
            in_s = a.sum(axis=0)
            s = out_s if mode == "out" else in_s if mode == "in" else out_s + in_s
        if node is None:
            return s
        if not 0 <= node < self.n_nodes:
            raise IndexError(f"node index {node} out of range for {self.n_nodes} nodes")
        return float(s[node])

    def degrees(self) -> np.ndarray:
        """Number of incident edges per node (in + out for directed)."""
        d = np.zeros(self.n_nodes, dtype=int)
        for i, j, _ in self.edges:
            d[i] += 1
            d[j] += 1
        return d

    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def to_json_dict(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "nodes": list(self.node_ids),
            "edges": [[i, j, w] for i, j, w in self.edges],
        }

    @classmethod
    def from_json_dict(cls, obj: dict, directed: bool) -> "Snapshot":
        try:
            nodes = tuple(obj["nodes"])
            edges = tuple((int(i), int(j), float(w)) for i, j, w in obj["edges"])
            timestamp = int(obj["timestamp"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed snapshot record: {exc}") from exc
        return cls(node_ids=nodes, edges=edges, directed=directed, timestamp=timestamp)


@dataclass(frozen=True)
class TemporalNetwork:
    """Ordered snapshot sequence over a shared node universe.

    ``universe`` fixes the global node indexing used by feature tables and
    presence masks; every snapshot's node ids must be a subset.
    ``negative_weight_count`` counts aggregated edge weights whose sign was
    flipped during ingestion (kept for provenance, zero for generated data).
    """

    snapshots: tuple
    universe: tuple
    negative_weight_count: int = 0

    def __post_init__(self):
        if len(set(self.universe)) != len(self.universe):
            raise DataError("universe has duplicate node ids")
        uni = set(self.universe)
        last_t = None
        directed = None
        for s in self.snapshots:
            if directed is None:
                directed = s.directed
            elif s.directed != directed:
                raise DataError("snapshots mix directed and undirected")
            if last_t is not None and s.timestamp <= last_t:
                raise DataError("snapshot timestamps must be strictly increasing")
            last_t = s.timestamp
            missing = set(s.node_ids) - uni
            if missing:
                raise DataError(f"snapshot nodes outside universe: {sorted(map(repr, missing))[:5]}")

    @property
    def n_snapshots(self) -> int:
        return len(self.snapshots)

    @property
    def n_nodes(self) -> int:
        return len(self.universe)

    @property
    def directed(self) -> bool:
        return bool(self.snapshots[0].directed) if self.snapshots else False

    @cached_property
    def universe_index(self) -> dict:
        return {v: k for k, v in enumerate(self.universe)}

    def presence_matrix(self) -> np.ndarray:
        """Boolean (T x n_universe) matrix: node appears in snapshot t."""
        out = np.zeros((self.n_snapshots, self.n_nodes), dtype=bool)
        for t, s in enumerate(self.snapshots):
            for v in s.node_ids:
                out[t, self.universe_index[v]] = True
        return out

    def to_json(self) -> str:
        """Serialize to JSON. Floats go through repr, so round-trips are exact."""
        obj = {
            "format": _FORMAT_TAG,
            "version": _FORMAT_VERSION,
            "directed": self.directed,
            "negative_weight_count": self.negative_weight_count,
            "universe": list(self.universe),
            "snapshots": [s.to_json_dict() for s in self.snapshots],
        }
        return json.dumps(obj)

    @classmethod
    def from_json(cls, text: str) -> "TemporalNetwork":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or obj.get("format") != _FORMAT_TAG:
            raise DataError("not a structim network document")
        directed = bool(obj.get("directed", False))
        try:
            universe = tuple(obj["universe"])
            snaps = tuple(Snapshot.from_json_dict(s, directed) for s in obj["snapshots"])
            neg = int(obj.get("negative_weight_count", 0))
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed network document: {exc}") from exc
        return cls(snapshots=snaps, universe=universe, negative_weight_count=neg)
