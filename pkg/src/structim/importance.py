"""Structural importance of nodes and edges from spectral sensitivity.

A node's importance under eigenvalue k is the sensitivity of lambda_k to a
uniform relative rescaling of the node's incident weights:

    T[i, k] = (2 / S_i) * lambda_k * x_{k,i}^2

with S_i the node strength and x_k the unit eigenvector. The schemes differ
only in which eigenvalue terms they keep per node:

    ma  rank-1 term (largest eigenvalue) for every node
    mb  the term at the node's selected eigencomponent rank
    mc  the sum over every eigenvalue (identically (2/S_i) * A_ii, hence zero
        for zero-diagonal matrices; kept literal, see importance_components)
    md  the sum over positive eigenvalues only

Edge importance is the sensitivity of the leading eigenvalue to one edge's
weight: 2 * x_{0,i} * x_{0,j}.

The directed variant scores nodes by the leading singular value s of the arc
matrix A through M = A @ A.T: m_i = (1 / (S_i * s)) * x_i * sum_j M_ij * x_j
with x the leading eigenvector of M and S_i the strength under a chosen mode.

Zero-strength nodes have no defined importance; they are excluded from the
result and reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .graphs import Snapshot
from .spectral import Spectrum, eig_sym, leading_singular, select_eigencomponent

SCHEMES = ("ma", "mb", "mc", "md")
DIRECTED_SCHEME = "directed"
STRENGTH_MODES = ("total", "in", "out")


@dataclass(frozen=True)
class ImportanceVector:
    """Per-node importance values for one snapshot and scheme.

    values maps node id -> importance; eig_rank (mb only) maps node id -> the
    1-based eigenvalue rank the value came from; excluded lists zero-strength
    node ids that were skipped.
    """

    scheme: str
    values: dict
    eig_rank: dict | None = None
    excluded: tuple = field(default_factory=tuple)


def importance_components(spectrum: Spectrum, strength: np.ndarray) -> np.ndarray:
    """Per-node, per-eigenvalue importance terms (n x n matrix).

    Rows for zero-strength nodes are NaN. Column k is the term contributed by
    eigenvalue rank k+1. Summing a row reproduces scheme mc for that node,
    which collapses to (2/S_i)*A_ii by the spectral decomposition; the matrix
    is exposed so callers can see the cancellation instead of just a zero.
    """
    strength = np.asarray(strength, dtype=float)
    if strength.shape != (spectrum.n,):
        raise ValueError("strength vector does not match spectrum size")
    terms = spectrum.eigenvalues[None, :] * spectrum.eigenvectors**2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 2.0 * terms / strength[:, None]
    out[strength <= 0] = np.nan
    return out


def node_importance(snapshot: Snapshot, scheme: str, spectrum: Spectrum | None = None) -> ImportanceVector:
    """Importance of every positive-strength node under one scheme.

    The snapshot must be undirected (use node_importance_directed otherwise).
    ``spectrum`` may carry a precomputed decomposition of the snapshot's
    adjacency to avoid repeating it across schemes.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if snapshot.directed:
        raise DataError(f"scheme {scheme!r} requires an undirected snapshot")
    s = snapshot.strength()
    mask = s > 0
    excluded = tuple(v for v, keep in zip(snapshot.node_ids, mask) if not keep)
    if not mask.any():
        return ImportanceVector(scheme=scheme, values={}, excluded=excluded)

    spec = spectrum if spectrum is not None else eig_sym(snapshot.adjacency())
    terms = importance_components(spec, s)

    eig_rank = None
    if scheme == "ma":
        vals = terms[:, 0]
    elif scheme == "mb":
        ranks = select_eigencomponent(spec)
        vals = terms[np.arange(spec.n), ranks - 1]
        eig_rank = {v: int(r) for v, r, keep in zip(snapshot.node_ids, ranks, mask) if keep}
    elif scheme == "mc":
        vals = terms.sum(axis=1)
    else:  # md
        pos = spec.positive_count()
        vals = terms[:, :pos].sum(axis=1)

    values = {v: float(x) for v, x, keep in zip(snapshot.node_ids, vals, mask) if keep}
    return ImportanceVector(scheme=scheme, values=values, eig_rank=eig_rank, excluded=excluded)


def node_importance_directed(snapshot: Snapshot, strength_mode: str = "total") -> ImportanceVector:
    """Directed importance from the leading singular structure of the arc matrix."""
    if strength_mode not in STRENGTH_MODES:
        raise ValueError(f"unknown strength mode {strength_mode!r}")
    if not snapshot.directed:
        raise DataError("directed importance requires a directed snapshot")
    a = snapshot.adjacency()
    s = snapshot.strength(strength_mode)
    mask = s > 0
    excluded = tuple(v for v, keep in zip(snapshot.node_ids, mask) if not keep)
    if not mask.any():
        return ImportanceVector(scheme=DIRECTED_SCHEME, values={}, excluded=excluded)

    trip = leading_singular(a)
    m = a @ a.T
    contrib = trip.vector * (m @ trip.vector)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = contrib / (s * trip.s)
    values = {v: float(x) for v, x, keep in zip(snapshot.node_ids, vals, mask) if keep}
    return ImportanceVector(scheme=DIRECTED_SCHEME, values=values, excluded=excluded)


def edge_importance(spectrum: Spectrum, i: int, j: int) -> float:
    """Sensitivity of the leading eigenvalue to the (i, j) edge weight.

    Equals 2 * x0_i * x0_j where x0 is the leading eigenvector. Indices are
    positions in the spectrum's node order; out-of-range indices raise
    IndexError.
    """
    x0 = spectrum.eigenvectors[:, 0]
    n = x0.shape[0]
    for idx in (i, j):
        if not 0 <= idx < n:
            raise IndexError(f"node index {idx} out of range for {n} nodes")
    return float(2.0 * x0[i] * x0[j])
