"""Per-node feature tables for activity prediction.

Features for a prediction anchored at snapshot t are averages of per-snapshot
node measures over snapshots 0..t-1, where the average runs only over the
snapshots in which the node was actually present (measures are undefined for
absent nodes, so absent snapshots are masked out rather than zero-filled).
The presence_count column counts those prior appearances.

Feature rows cover the nodes present in snapshot t that have at least one
prior appearance; a node seen for the first time at t has no history to
average and is excluded (the count is kept in table metadata). Targets that
compare t with t+1 restrict rows further to nodes with positive strength in
both snapshots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .graphs import Snapshot, TemporalNetwork
from .importance import SCHEMES, node_importance
from .netstats import detect_communities, eigenvector_centrality, pagerank, pearson
from .spectral import eig_sym

MEASURE_COLUMNS = (
    "ma",
    "mb",
    "mc",
    "md",
    "eig_centrality",
    "pagerank",
    "degree",
    "community_size",
)
FEATURE_COLUMNS = MEASURE_COLUMNS + ("presence_count",)

TARGETS = ("presence", "change", "sign", "rel_change")

# When correlation pruning has to break a partner-count tie, drop the most
# generic column first and the headline spectral measure last.
_DROP_PRIORITY = (
    "degree",
    "pagerank",
    "eig_centrality",
    "community_size",
    "presence_count",
    "mc",
    "md",
    "ma",
    "mb",
)


@dataclass
class FeatureTable:
    """Feature matrix for one prediction anchor time.

    Rows are keyed by node id (global ids from the network universe);
    ``X[r, c]`` is the value of ``columns[c]`` for ``node_ids[r]``. ``y`` and
    ``target`` are attached by the labeling step.
    """

    columns: tuple
    X: np.ndarray
    node_ids: tuple
    as_of: int
    target: str | None = None
    y: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        return int(self.X.shape[0])

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.columns.index(name)]

    def select_columns(self, names) -> "FeatureTable":
        idx = [self.columns.index(c) for c in names]
        return FeatureTable(
            columns=tuple(names),
            X=self.X[:, idx].copy(),
            node_ids=self.node_ids,
            as_of=self.as_of,
            target=self.target,
            y=None if self.y is None else self.y.copy(),
            meta=dict(self.meta),
        )

    def select_rows(self, mask) -> "FeatureTable":
        mask = np.asarray(mask)
        return FeatureTable(
            columns=self.columns,
            X=self.X[mask].copy(),
            node_ids=tuple(v for v, keep in zip(self.node_ids, mask) if keep),
            as_of=self.as_of,
            target=self.target,
            y=None if self.y is None else self.y[mask].copy(),
            meta=dict(self.meta),
        )


def snapshot_measures(tn: TemporalNetwork, t: int, seed: int = 0) -> dict:
    """All per-snapshot node measures as universe-aligned arrays.

    Returns {measure: array over tn.universe} with NaN for nodes absent from
    snapshot t (and for zero-strength nodes, whose importance is undefined).
    A snapshot with no edges yields all-NaN columns.
    """
    s = tn.snapshots[t]
    n_uni = tn.n_nodes
    out = {name: np.full(n_uni, np.nan) for name in MEASURE_COLUMNS}
    if s.n_edges == 0:
        return out

    gidx = np.array([tn.universe_index[v] for v in s.node_ids])
    spec = eig_sym(s.adjacency())
    for scheme in SCHEMES:
        vec = node_importance(s, scheme, spectrum=spec)
        for node, val in vec.values.items():
            out[scheme][tn.universe_index[node]] = val

    cent = eigenvector_centrality(s)
    pr = pagerank(s)
    deg = s.degrees().astype(float)
    labels = detect_communities(s, seed=seed)
    sizes = np.bincount(labels)
    strength = s.strength()
    present = strength > 0
    out["eig_centrality"][gidx[present]] = cent[present]
    out["pagerank"][gidx[present]] = pr[present]
    out["degree"][gidx[present]] = deg[present]
    out["community_size"][gidx[present]] = sizes[labels[present]].astype(float)
    return out


def build_features(tn: TemporalNetwork, t: int, seed: int = 0, measures_cache: dict | None = None) -> FeatureTable:
    """Historical-mean feature table anchored at snapshot t.

    ``measures_cache`` maps snapshot index -> snapshot_measures output and is
    filled on demand, so sweeping t over a horizon computes each snapshot's
    measures once.
    """
    if not 1 <= t < tn.n_snapshots:
        raise ValueError(f"anchor t={t} needs at least one prior snapshot and must exist")
    cache = measures_cache if measures_cache is not None else {}
    for u in range(t):
        if u not in cache:
            cache[u] = snapshot_measures(tn, u, seed=seed)

    presence = tn.presence_matrix()
    prior_count = presence[:t].sum(axis=0).astype(float)
    now = tn.snapshots[t]
    rows = []
    skipped_new = 0
    for v in now.node_ids:
        g = tn.universe_index[v]
        if prior_count[g] >= 1:
            rows.append((v, g))
        else:
            skipped_new += 1

    x = np.empty((len(rows), len(FEATURE_COLUMNS)))
    for c, name in enumerate(MEASURE_COLUMNS):
        hist = np.stack([cache[u][name] for u in range(t)])
        defined_mask = ~np.isnan(hist)
        counts = defined_mask.sum(axis=0)
        sums = np.where(defined_mask, hist, 0.0).sum(axis=0)
        means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
        for r, (_, g) in enumerate(rows):
            x[r, c] = means[g]
    for r, (_, g) in enumerate(rows):
        x[r, len(MEASURE_COLUMNS)] = prior_count[g]

    # A node can be present without defined importance (zero strength in every
    # prior appearance); such rows cannot be featurized either.
    defined = ~np.isnan(x).any(axis=1)
    skipped_undefined = int((~defined).sum())
    x = x[defined]
    node_ids = tuple(v for (v, _), keep in zip(rows, defined) if keep)

    return FeatureTable(
        columns=FEATURE_COLUMNS,
        X=x,
        node_ids=node_ids,
        as_of=t,
        meta={"skipped_new_nodes": skipped_new, "skipped_undefined": skipped_undefined},
    )


def _strengths_by_node(s: Snapshot) -> dict:
    vals = s.strength()
    return {v: float(x) for v, x in zip(s.node_ids, vals) if x > 0}


def label_presence(tn: TemporalNetwork, t: int) -> dict:
    """1 iff the node carries at least one edge in snapshot t+1.

    Defined for every node present at t.
    """
    _check_horizon(tn, t)
    nxt = _strengths_by_node(tn.snapshots[t + 1])
    return {v: int(v in nxt) for v in _strengths_by_node(tn.snapshots[t])}


def label_change(tn: TemporalNetwork, t: int, threshold: float = 0.05) -> dict:
    """1 iff the relative strength change from t to t+1 exceeds ``threshold``.

    Defined only for nodes with positive strength in both snapshots.
    """
    _check_horizon(tn, t)
    cur = _strengths_by_node(tn.snapshots[t])
    nxt = _strengths_by_node(tn.snapshots[t + 1])
    return {v: int(abs(nxt[v] - s0) / s0 > threshold) for v, s0 in cur.items() if v in nxt}


def label_sign(tn: TemporalNetwork, t: int) -> dict:
    """1 iff strength strictly grows from t to t+1; ties are dropped."""
    _check_horizon(tn, t)
    cur = _strengths_by_node(tn.snapshots[t])
    nxt = _strengths_by_node(tn.snapshots[t + 1])
    return {v: int(nxt[v] > s0) for v, s0 in cur.items() if v in nxt and nxt[v] != s0}


def label_rel_change(tn: TemporalNetwork, t: int) -> dict:
    """Relative strength change (S_{t+1} - S_t) / S_t for nodes in both."""
    _check_horizon(tn, t)
    cur = _strengths_by_node(tn.snapshots[t])
    nxt = _strengths_by_node(tn.snapshots[t + 1])
    return {v: (nxt[v] - s0) / s0 for v, s0 in cur.items() if v in nxt}


def _check_horizon(tn: TemporalNetwork, t: int) -> None:
    if not 0 <= t < tn.n_snapshots - 1:
        raise ValueError(f"labels at t={t} need snapshot t+1 to exist")


def build_table(
    tn: TemporalNetwork,
    t: int,
    target: str,
    change_threshold: float = 0.05,
    seed: int = 0,
    measures_cache: dict | None = None,
) -> FeatureTable:
    """Feature table at t with the requested target attached."""
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}; expected one of {TARGETS}")
    table = build_features(tn, t, seed=seed, measures_cache=measures_cache)
    if target == "presence":
        labels = label_presence(tn, t)
    elif target == "change":
        labels = label_change(tn, t, threshold=change_threshold)
    elif target == "sign":
        labels = label_sign(tn, t)
    else:
        labels = label_rel_change(tn, t)
    mask = np.array([v in labels for v in table.node_ids], dtype=bool)
    table = table.select_rows(mask)
    table.target = target
    table.y = np.array([labels[v] for v in table.node_ids], dtype=float)
    return table


def prune_correlated(table: FeatureTable, threshold: float = 0.8):
    """Drop features until no pair's |Pearson r| exceeds ``threshold``.

    Iteratively removes the column with the most over-threshold partners;
    ties break by a fixed drop priority (generic benchmarks first). Constant
    columns have no defined correlation and are never dropped here; the
    standardization step handles them. Returns (reduced table, dropped names).
    """
    if not 0 < threshold < 1:
        raise ValueError("threshold must be in (0, 1)")
    if table.n_rows < 2:
        raise DataError("correlation pruning needs at least two rows")

    active = [c for c in table.columns]
    variable = [c for c in active if np.std(table.column(c)) > 1e-12]
    corr = {}
    for i, ci in enumerate(variable):
        for cj in variable[i + 1 :]:
            corr[(ci, cj)] = abs(pearson(table.column(ci), table.column(cj)))

    def priority(name):
        return _DROP_PRIORITY.index(name) if name in _DROP_PRIORITY else len(_DROP_PRIORITY)

    dropped = []
    while True:
        partners = {c: 0 for c in variable}
        for (ci, cj), r in corr.items():
            if ci in partners and cj in partners and r > threshold:
                partners[ci] += 1
                partners[cj] += 1
        worst = max(partners.values(), default=0)
        if worst == 0:
            break
        candidates = [c for c, k in partners.items() if k == worst]
        victim = min(candidates, key=lambda c: (priority(c), table.columns.index(c)))
        variable.remove(victim)
        active.remove(victim)
        dropped.append(victim)

    return table.select_columns(active), dropped
