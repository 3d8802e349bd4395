import numpy as np
import pytest

import semaps as sm
from semaps.embedding import from_json, to_json
from oracles import c1_constant, dense_minimizer, random_point_graph

from conftest import ARC_K, ARC_M, ARC_SIGMA, ARC_WIDTH


def test_constraint_suite(arc_points):
    emb = sm.laplacian_eigenmaps(arc_points, k=ARC_K, sigma=ARC_SIGMA, n=2)
    z = np.sqrt(emb.degrees)[:, None] * emb.coords
    assert np.abs(z.T @ z - np.eye(2)).max() < 1e-8
    assert np.abs(z.T @ emb.skipped_vector).max() < 1e-8


def test_alpha_zero_matches_le(arc_graph):
    p = sm.diagonal_on(ARC_M, [10])
    a = sm.embed_graph(arc_graph, None, 0.0, n=2)
    b = sm.embed_graph(arc_graph, p, 0.0, n=2)
    assert np.array_equal(a.coords, b.coords)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)


def test_le_recovers_arc_plane(arc_points):
    emb = sm.laplacian_eigenmaps(arc_points, k=ARC_K, sigma=ARC_SIGMA, n=2)
    assert np.linalg.matrix_rank(emb.coords, tol=1e-10) == 2
    # ring centroids must stay in sweep order along the unrolled strip:
    # the embedded 1st coordinate of ring centroids is strictly monotone
    rings = emb.coords.reshape(ARC_M // ARC_WIDTH, ARC_WIDTH, 2).mean(axis=1)
    first = rings[:, 0]
    assert np.all(np.diff(first) > 0) or np.all(np.diff(first) < 0)


def test_barbell_sign_split():
    # two 5-cliques bridged by one edge: the retained eigenvector
    # separates the cliques by sign
    rng = np.random.default_rng(1)
    a = rng.normal(0.0, 0.05, size=(5, 2))
    b = rng.normal(0.0, 0.05, size=(5, 2)) + np.array([10.0, 0.0])
    pts = np.vstack([a, b])
    emb = sm.laplacian_eigenmaps(pts, k=5, sigma=100.0, n=1)
    signs = np.sign(emb.coords[:, 0])
    assert np.all(signs[:5] == signs[0])
    assert np.all(signs[5:] == -signs[0])


def test_disconnected_graph_raises():
    pts = np.vstack([np.zeros((4, 2)), np.full((4, 2), 100.0)])
    pts += np.arange(8)[:, None] * 0.01
    with pytest.raises(sm.DisconnectedGraphError):
        sm.laplacian_eigenmaps(pts, k=2, sigma=1.0, n=2)


def test_potential_energy_basics(arc_graph):
    emb = sm.embed_graph(arc_graph, None, 0.0, n=2)
    i = 37
    p = sm.diagonal_on(ARC_M, [i])
    assert sm.potential_energy(emb, p) == pytest.approx(
        np.sum(emb.coords[i] ** 2))
    zero = sm.DiagonalPotential(ARC_M, (0,), (0.0,))
    assert sm.potential_energy(emb, zero) == 0.0
    pair = sm.PairwisePotential(ARC_M, ((0, ARC_M - 1),))
    assert sm.potential_energy(emb, pair) == pytest.approx(
        np.sum((emb.coords[0] - emb.coords[-1]) ** 2))


def test_potential_energy_dimension_mismatch(arc_graph):
    emb = sm.embed_graph(arc_graph, None, 0.0, n=2)
    with pytest.raises(ValueError):
        sm.potential_energy(emb, sm.diagonal_on(ARC_M + 1, [0]))


def test_nullmass_empty_labeled_equals_n(arc_graph):
    for n in (1, 2, 3):
        emb = sm.embed_graph(arc_graph, None, 0.0, n=n)
        assert sm.nullmass(emb, []) == pytest.approx(n, abs=1e-10)


def _theorem_instance(rng):
    m = int(rng.integers(5, 13))
    g, _ = random_point_graph(rng, m)
    n = int(rng.integers(1, 3))
    kind = int(rng.integers(0, 3))
    if kind == 0:
        r = int(rng.integers(1, max(2, m - n)))
        idx = sorted(int(i) for i in rng.choice(m, size=r, replace=False))
        vals = tuple(float(v) for v in rng.uniform(0.5, 3.0, r))
        pot = sm.DiagonalPotential(m, tuple(idx), vals)
    elif kind == 1:
        i, j = (int(v) for v in rng.choice(m, size=2, replace=False))
        pot = sm.PairwisePotential(m, ((i, j),))
    else:
        r = int(rng.integers(2, min(m, 4) + 1))
        idx = tuple(int(i) for i in rng.choice(m, size=r, replace=False))
        pot = sm.ChainPotential(m, idx)
    return g, pot, n


def _normalized_dense(g, pot):
    lap = sm.laplacian(g)
    d = g.degrees
    s = 1.0 / np.sqrt(d)
    ln = s[:, None] * lap.dense() * s[None, :]
    vn = s[:, None] * sm.realize_potential(pot).dense() * s[None, :]
    return ln, vn


def test_energy_decay_bound_holds():
    # alpha * trace(y^T V y) <= C1 for the constrained minimizer, over a
    # wide alpha grid, on randomized small instances
    rng = np.random.default_rng(90)
    checked = 0
    while checked < 50:
        g, pot, n = _theorem_instance(rng)
        ln, vn = _normalized_dense(g, pot)
        c1 = c1_constant(ln, vn, n)
        if c1 is None:
            continue
        for alpha in (1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4):
            emb = sm.quadratic_minimizer(g, pot, alpha, n)
            energy = sm.potential_energy(emb, pot)
            assert alpha * energy <= c1 * (1 + 1e-6) + 1e-12, \
                (g.m, type(pot).__name__, n, alpha, alpha * energy, c1)
        checked += 1


def test_pointwise_push_bound_holds():
    # diagonal potentials: v_i ||y_i||^2 <= C1 / alpha for every labeled i
    rng = np.random.default_rng(91)
    checked = 0
    while checked < 25:
        g, pot, n = _theorem_instance(rng)
        if not isinstance(pot, sm.DiagonalPotential):
            continue
        ln, vn = _normalized_dense(g, pot)
        c1 = c1_constant(ln, vn, n)
        if c1 is None:
            continue
        for alpha in (1e-1, 1.0, 1e2, 1e4):
            emb = sm.quadratic_minimizer(g, pot, alpha, n)
            norms2 = np.sum(emb.coords ** 2, axis=1)
            for i, v in zip(pot.indices, pot.values):
                assert v * norms2[i] <= c1 / alpha * (1 + 1e-6) + 1e-12
        checked += 1


def test_pairwise_identification_bound_holds():
    # ||y_i - y_j||^2 <= C1 / alpha for a pairwise barrier on (i, j)
    rng = np.random.default_rng(92)
    checked = 0
    while checked < 25:
        g, pot, n = _theorem_instance(rng)
        if not isinstance(pot, sm.PairwisePotential):
            continue
        ln, vn = _normalized_dense(g, pot)
        c1 = c1_constant(ln, vn, n)
        if c1 is None:
            continue
        (i, j), = pot.pairs
        for alpha in (1e-1, 1.0, 1e2, 1e4):
            emb = sm.quadratic_minimizer(g, pot, alpha, n)
            gap2 = float(np.sum((emb.coords[i] - emb.coords[j]) ** 2))
            assert gap2 <= c1 / alpha * (1 + 1e-6) + 1e-12
        checked += 1


def test_no_collapse_bound_holds():
    # sum over unlabeled of D_ii ||y_i||^2 >= n - max(D_ii/v_i) C1 / alpha,
    # and the v_i = D_ii variant tightens the constant to exactly C1
    rng = np.random.default_rng(93)
    checked = 0
    while checked < 25:
        m = int(rng.integers(5, 13))
        g, _ = random_point_graph(rng, m)
        n = int(rng.integers(1, 3))
        r = int(rng.integers(1, max(2, m - n - 1)))
        idx = sorted(int(i) for i in rng.choice(m, size=r, replace=False))
        use_degree_weights = bool(rng.integers(0, 2))
        if use_degree_weights:
            vals = tuple(float(g.degrees[i]) for i in idx)
        else:
            vals = tuple(float(v) for v in rng.uniform(0.5, 3.0, r))
        pot = sm.DiagonalPotential(m, tuple(idx), vals)
        ln, vn = _normalized_dense(g, pot)
        c1 = c1_constant(ln, vn, n)
        if c1 is None:
            continue
        ratio = 1.0 if use_degree_weights else max(
            g.degrees[i] / v for i, v in zip(idx, vals))
        for alpha in (1.0, 1e2, 1e4):
            emb = sm.quadratic_minimizer(g, pot, alpha, n)
            mass = sm.nullmass(emb, idx)
            bound = n - ratio * c1 / alpha
            assert mass >= bound - 1e-8, (m, n, alpha, mass, bound)
        checked += 1


def test_minimizer_matches_generalized_oracle():
    rng = np.random.default_rng(94)
    for _ in range(10):
        g, pot, n = _theorem_instance(rng)
        alpha = float(10 ** rng.uniform(-1, 2))
        emb = sm.quadratic_minimizer(g, pot, alpha, n)
        y, vals = dense_minimizer(sm.laplacian(g).dense(),
                                  sm.realize_potential(pot).dense(),
                                  g.degrees, alpha, n)
        assert np.allclose(emb.eigenvalues, vals, atol=1e-8)
        # compare trace objectives (subspaces may rotate within clusters)
        op = sm.laplacian(g).dense() + alpha * sm.realize_potential(pot).dense()
        t_pkg = np.trace(emb.coords.T @ op @ emb.coords)
        t_ora = np.trace(y.T @ op @ y)
        assert t_pkg == pytest.approx(t_ora, rel=1e-8, abs=1e-10)


def test_neighbor_drag_on_arc(arc_graph):
    # labeling one mid-arc point also pulls its graph neighbors down
    i0 = ARC_M // 2
    pot = sm.diagonal_on(ARC_M, [i0])
    e0 = sm.embed_graph(arc_graph, pot, 0.0, n=2)
    e5 = sm.embed_graph(arc_graph, pot, 5.0, n=2)
    w = arc_graph.weights
    nbrs = sorted(set(w.cols[w.rows == i0]) | set(w.rows[w.cols == i0]))
    nbrs = [j for j in nbrs if j != i0]
    assert nbrs, "mid-arc point must have neighbors"
    n0 = np.linalg.norm(e0.coords[nbrs], axis=1)
    n5 = np.linalg.norm(e5.coords[nbrs], axis=1)
    assert np.all(n5 < n0)


def test_cluster_warning_recorded():
    # a symmetric 4-cycle has a degenerate eigenvalue pair; cutting inside
    # it must be flagged
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    emb = sm.laplacian_eigenmaps(pts, k=2, sigma=1e12, n=1)
    assert emb.params.get("cluster_warning") is True


def test_serialization_roundtrip(arc_graph):
    pot = sm.diagonal_on(ARC_M, [3, 7])
    emb = sm.embed_graph(arc_graph, pot, 0.5, n=3)
    text = to_json(emb)
    back = from_json(text)
    assert np.array_equal(back.coords, emb.coords)
    assert np.array_equal(back.eigenvalues, emb.eigenvalues)
    assert np.array_equal(back.degrees, emb.degrees)
    assert back.params == emb.params
    assert to_json(back) == text


def test_serialization_rejects_unknown_version():
    with pytest.raises(ValueError):
        from_json('{"version": 99}')
