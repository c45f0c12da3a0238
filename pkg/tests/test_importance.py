import numpy as np
import pytest

from structim import (
    DataError,
    Snapshot,
    barbell,
    edge_importance,
    eig_sym,
    importance_components,
    node_importance,
    node_importance_directed,
)

from conftest import clique, cycle, random_connected


def _as_array(snapshot, vector):
    return np.array([vector.values[v] for v in snapshot.node_ids if v in vector.values])


def test_clique_closed_forms():
    # one positive eigenvalue makes every positive-part scheme equal 2/n
    for n in range(3, 13):
        s = clique(n)
        spec = eig_sym(s.adjacency())
        for scheme in ("ma", "mb", "md"):
            vals = _as_array(s, node_importance(s, scheme, spectrum=spec))
            assert np.allclose(vals, 2.0 / n, atol=1e-10), (scheme, n)
        mc = _as_array(s, node_importance(s, "mc", spectrum=spec))
        assert np.allclose(mc, 0.0, atol=1e-10)


def test_dyad_ma_is_one():
    s = clique(2)
    vals = node_importance(s, "ma").values
    assert vals[0] == pytest.approx(1.0, abs=1e-12)
    assert vals[1] == pytest.approx(1.0, abs=1e-12)


def test_ma_matches_eigenvalue_derivative():
    # m_a(k) is the sensitivity of the top eigenvalue to scaling node k's
    # incident weights: compare against a central finite difference
    eps = 1e-6
    for seed in range(8):
        rng = np.random.default_rng([17, seed])
        snap = random_connected(rng, int(rng.integers(4, 10)))
        a = snap.adjacency()
        strength = snap.strength()
        vals = node_importance(snap, "ma").values
        for k in range(snap.n_nodes):
            v = np.zeros_like(a)
            v[k, :] = a[k, :] / strength[k]
            v[:, k] = a[:, k] / strength[k]
            hi = np.linalg.eigvalsh(a + eps * v)[-1]
            lo = np.linalg.eigvalsh(a - eps * v)[-1]
            fd = (hi - lo) / (2 * eps)
            assert abs(vals[snap.node_ids[k]] - fd) < 1e-6


def test_ma_scale_invariant():
    rng = np.random.default_rng(23)
    snap = random_connected(rng, 9)
    scaled = Snapshot(
        node_ids=snap.node_ids,
        edges=tuple((i, j, 7.5 * w) for i, j, w in snap.edges),
        directed=False,
        timestamp=0,
    )
    a = node_importance(snap, "ma").values
    b = node_importance(scaled, "ma").values
    for v in snap.node_ids:
        assert a[v] == pytest.approx(b[v], rel=1e-10)


def test_mc_vanishes_on_zero_diagonal():
    for seed in range(10):
        rng = np.random.default_rng([29, seed])
        snap = random_connected(rng, int(rng.integers(3, 12)))
        vals = _as_array(snap, node_importance(snap, "mc"))
        assert np.max(np.abs(vals)) < 1e-9


def test_md_dominates_ma():
    # every positive-eigenvalue term is nonnegative, so the positive-part sum
    # is at least the leading term
    for seed in range(10):
        rng = np.random.default_rng([31, seed])
        snap = random_connected(rng, int(rng.integers(3, 12)))
        spec = eig_sym(snap.adjacency())
        ma = node_importance(snap, "ma", spectrum=spec).values
        md = node_importance(snap, "md", spectrum=spec).values
        for v in snap.node_ids:
            assert md[v] >= ma[v] - 1e-12


def test_mb_barbell_ordering_and_ranks():
    s = barbell(4, 2, 5)
    vec = node_importance(s, "mb")
    bridge = min(vec.values[4], vec.values[5])
    right = max(vec.values[v] for v in range(6, 11))
    assert bridge > right
    assert vec.eig_rank[0] == 2 and vec.eig_rank[4] == 3 and vec.eig_rank[6] == 1


def test_importance_components_shape_and_consistency():
    s = barbell(4, 2, 5)
    spec = eig_sym(s.adjacency())
    comp = importance_components(spec, s.strength())
    assert comp.shape == (11, 11)
    ma = node_importance(s, "ma", spectrum=spec).values
    assert np.allclose(comp[:, 0], [ma[v] for v in s.node_ids])
    # row sums collapse to (2/S_i) * A_ii = 0
    assert np.max(np.abs(comp.sum(axis=1))) < 1e-9


def test_zero_strength_nodes_are_excluded():
    s = Snapshot(node_ids=(0, 1, 9), edges=((0, 1, 2.0),), directed=False, timestamp=0)
    vec = node_importance(s, "ma")
    assert vec.excluded == (9,)
    assert set(vec.values) == {0, 1}


def test_values_keyed_by_node_ids():
    s = Snapshot(node_ids=("a", "b", "c"), edges=((0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)),
                 directed=False, timestamp=0)
    vals = node_importance(s, "ma").values
    assert set(vals) == {"a", "b", "c"}
    assert vals["a"] == pytest.approx(2.0 / 3.0)


def test_scheme_validation():
    s = clique(3)
    with pytest.raises(ValueError):
        node_importance(s, "mz")
    d = Snapshot(node_ids=(0, 1), edges=((0, 1, 1.0),), directed=True, timestamp=0)
    with pytest.raises(DataError):
        node_importance(d, "ma")
    with pytest.raises(DataError):
        node_importance_directed(clique(3))
    with pytest.raises(ValueError):
        node_importance_directed(d, strength_mode="elsewhere")


def test_directed_full_triangle_frozen():
    # all six arcs of a 3-node graph with unit weights
    edges = tuple((i, j, 1.0) for i in range(3) for j in range(3) if i != j)
    s = Snapshot(node_ids=(0, 1, 2), edges=edges, directed=True, timestamp=0)
    total = node_importance_directed(s, "total").values
    for v in range(3):
        assert total[v] == pytest.approx(1.0 / 6.0, abs=1e-12)
    for mode in ("in", "out"):
        vals = node_importance_directed(s, mode).values
        for v in range(3):
            assert vals[v] == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_directed_nilpotent_frozen():
    s = Snapshot(node_ids=(0, 1), edges=((0, 1, 2.0),), directed=True, timestamp=0)
    vec = node_importance_directed(s, "total")
    assert vec.values[0] == pytest.approx(1.0, abs=1e-12)
    assert vec.values[1] == pytest.approx(0.0, abs=1e-12)


def test_edge_importance_frozen_values():
    dyad_spec = eig_sym(clique(2).adjacency())
    assert edge_importance(dyad_spec, 0, 1) == pytest.approx(1.0, abs=1e-12)
    tri_spec = eig_sym(clique(3).adjacency())
    assert edge_importance(tri_spec, 0, 2) == pytest.approx(2.0 / 3.0, abs=1e-12)
    with pytest.raises(IndexError):
        edge_importance(tri_spec, 0, 3)


def test_edge_importance_matches_weight_derivative():
    h = 1e-6
    for seed in range(6):
        rng = np.random.default_rng([37, seed])
        snap = random_connected(rng, 8)
        a = snap.adjacency()
        spec = eig_sym(a)
        for i, j, _w in snap.edges[:4]:
            up = a.copy()
            up[i, j] += h
            up[j, i] += h
            dn = a.copy()
            dn[i, j] -= h
            dn[j, i] -= h
            fd = (np.linalg.eigvalsh(up)[-1] - np.linalg.eigvalsh(dn)[-1]) / (2 * h)
            assert edge_importance(spec, i, j) == pytest.approx(fd, abs=1e-6)
