"""Spectra of symmetric weighted matrices and tools built on them.

The decomposition itself is delegated to LAPACK via numpy; everything this
package promises about a :class:`Spectrum` (ordering, unit norms, the sign
convention, selection behavior) is enforced here on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Full eigendecomposition of a symmetric real matrix.

    eigenvalues are sorted descending; column k of ``eigenvectors`` is the
    unit-norm eigenvector paired with ``eigenvalues[k]``. Each eigenvector is
    oriented so its largest-magnitude component is positive (exact magnitude
    ties resolve to the lowest index).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return int(self.eigenvalues.shape[0])

    def positive_count(self) -> int:
        return int(np.sum(self.eigenvalues > 0))

    def to_json_dict(self) -> dict:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors": self.eigenvectors.tolist(),
            "positive_count": self.positive_count(),
        }


@dataclass(frozen=True)
class SingularTriplet:
    """Leading singular value of A with the leading eigenvector of A @ A.T."""

    s: float
    vector: np.ndarray


def _orient(column: np.ndarray) -> np.ndarray:
    pivot = int(np.argmax(np.abs(column)))
    return -column if column[pivot] < 0 else column


def eig_sym(a: np.ndarray) -> Spectrum:
    """Eigendecomposition of a symmetric matrix with deterministic orientation.

    Raises ValueError when the input is not square 2-D or not symmetric to
    within an absolute tolerance of 1e-10.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size and np.max(np.abs(a - a.T)) > SYMMETRY_TOL:
        raise ValueError("matrix is not symmetric")
    vals, vecs = np.linalg.eigh(a)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    for k in range(vecs.shape[1]):
        vecs[:, k] = _orient(vecs[:, k])
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return Spectrum(eigenvalues=vals, eigenvectors=vecs)


def leading_singular(a: np.ndarray) -> SingularTriplet:
    """Leading singular value of ``a`` and leading eigenvector of a @ a.T.

    The all-zero matrix maps to s = 0 with the first coordinate vector, so
    callers never see a NaN direction.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.any(a):
        e0 = np.zeros(a.shape[0])
        if e0.shape[0]:
            e0[0] = 1.0
        return SingularTriplet(s=0.0, vector=e0)
    m = a @ a.T
    m = (m + m.T) / 2.0  # clear float asymmetry from the product
    spec = eig_sym(m)
    lam = max(float(spec.eigenvalues[0]), 0.0)
    return SingularTriplet(s=float(np.sqrt(lam)), vector=np.array(spec.eigenvectors[:, 0]))


def select_eigencomponent(spectrum: Spectrum, node: int | None = None):
    """Per-node eigenvalue rank where the node's component magnitude peaks.

    Ranks are 1-based positions in the descending eigenvalue order, and the
    search runs over positive eigenvalues only: the negative end of the
    spectrum carries sign-alternating local modes (a clique's degenerate
    lambda = -1 space, for instance) whose components dominate every clique
    node and would make the selection useless for locating structure. Ties
    resolve to the smallest rank.

    Returns the full rank array, or a single int when ``node`` is given
    (out-of-range indices raise IndexError). Raises DataError when the
    spectrum has no positive eigenvalue.
    """
    n_pos = spectrum.positive_count()
    if n_pos == 0:
        raise DataError("no positive eigenvalues; eigencomponent selection undefined")
    block = np.abs(spectrum.eigenvectors[:, :n_pos])
    ranks = np.argmax(block, axis=1) + 1
    if node is None:
        return ranks
    if not 0 <= node < ranks.shape[0]:
        raise IndexError(f"node index {node} out of range for {ranks.shape[0]} nodes")
    return int(ranks[node])


def _kmeans_once(x: np.ndarray, k: int, rng: np.random.Generator, max_iter: int):
    n = x.shape[0]
    # k-means++ seeding
    centers = np.empty((k, x.shape[1]))
    first = int(rng.integers(n))
    centers[0] = x[first]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[c] = x[int(rng.integers(n))]
        else:
            centers[c] = x[int(rng.choice(n, p=d2 / total))]
        d2 = np.minimum(d2, np.sum((x - centers[c]) ** 2, axis=1))

    labels = np.full(n, -1, dtype=int)
    for _ in range(max_iter):
        dists = np.sum((x[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(dists, axis=1)
        for c in range(k):
            members = new_labels == c
            if members.any():
                centers[c] = x[members].mean(axis=0)
            else:
                # reseed an emptied cluster at the worst-served point
                worst = int(np.argmax(np.min(dists, axis=1)))
                centers[c] = x[worst]
                new_labels[worst] = c
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    inertia = float(np.sum((x - centers[labels]) ** 2))
    return labels, inertia


def kmeans_eigvecs(
    spectrum: Spectrum,
    k: int,
    seed: int = 0,
    which: str = "positive",
    restarts: int = 8,
    max_iter: int = 100,
) -> np.ndarray:
    """Cluster nodes by their rows across selected eigenvectors.

    ``which`` picks the eigenvector columns: "positive" (eigenvalue > 0) or
    "all". Runs k-means++ seeding plus Lloyd iterations ``restarts`` times
    with derived seeds and keeps the lowest-inertia run. Labels are relabeled
    densely from 0 in order of first appearance, so results are deterministic
    for a given seed.
    """
    if which not in ("positive", "all"):
        raise ValueError(f"unknown eigenvector subset {which!r}")
    n = spectrum.n
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for {n} nodes")
    cols = spectrum.positive_count() if which == "positive" else n
    if cols == 0:
        raise DataError("no positive eigenvalues to embed nodes with")
    x = np.array(spectrum.eigenvectors[:, :cols])
    # rows equal up to eigensolver noise count once
    distinct = np.unique(np.round(x, 12), axis=0).shape[0]
    if k > distinct:
        raise DataError(f"k={k} exceeds the {distinct} distinct embedding rows")

    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        labels, inertia = _kmeans_once(x, k, rng, max_iter)
        if best is None or inertia < best[1]:
            best = (labels, inertia)

    labels = best[0]
    remap = {}
    out = np.empty_like(labels)
    for idx, lab in enumerate(labels):
        if lab not in remap:
            remap[lab] = len(remap)
        out[idx] = remap[lab]
    return out
