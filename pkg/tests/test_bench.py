import numpy as np
import pytest

import semaps as sm
from semaps.bench import (PUBLISHED, BenchConfig, build_potential,
                          emit_table, le_rep_error, resolve_grids,
                          run_protocol, se_threshold_curves)


@pytest.fixture(scope="module")
def quick_wbcd(data_dir):
    cfg = BenchConfig(dataset="wbcd", train_sizes=(40,), repetitions=5,
                      seed=7, data_dir=str(data_dir), honest=True)
    return run_protocol(cfg)


def test_protocol_produces_both_methods(quick_wbcd):
    methods = {(c.method, c.train_size) for c in quick_wbcd.cells}
    assert methods == {("se", 40), ("le", 40)}
    for c in quick_wbcd.cells:
        assert 0.0 <= c.mean_error <= 0.5
        assert c.per_rep_errors.shape == (5,)
        assert np.all((c.per_rep_errors >= 0) & (c.per_rep_errors <= 1))


def test_protocol_deterministic(data_dir):
    cfg = BenchConfig(dataset="chdd", train_sizes=(40,), repetitions=3,
                      seed=11, data_dir=str(data_dir))
    a = run_protocol(cfg)
    b = run_protocol(cfg)
    for ca, cb in zip(a.cells, b.cells):
        assert np.array_equal(ca.per_rep_errors, cb.per_rep_errors)
        assert ca.best == cb.best


def test_protocol_worker_pool_matches_serial(data_dir):
    base = dict(dataset="chdd", train_sizes=(40,), repetitions=4, seed=3,
                data_dir=str(data_dir))
    serial = run_protocol(BenchConfig(**base, workers=1))
    pooled = run_protocol(BenchConfig(**base, workers=3))
    for cs, cp in zip(serial.cells, pooled.cells):
        assert np.array_equal(cs.per_rep_errors, cp.per_rep_errors)


def test_sanity_floor_se_not_worse_than_le(quick_wbcd):
    se = quick_wbcd.cell("wbcd", 40, "se")
    le = quick_wbcd.cell("wbcd", 40, "le")
    assert se.mean_error <= le.mean_error + 0.02


def test_honest_variant_reported(quick_wbcd):
    se = quick_wbcd.cell("wbcd", 40, "se")
    assert se.honest is not None
    assert 0.0 <= se.honest["mean_error"] <= 1.0
    # selecting on training error cannot beat selecting on the full error
    assert se.honest["mean_error"] >= se.mean_error - 1e-12


def test_published_reference_attached(quick_wbcd):
    assert quick_wbcd.cell("wbcd", 40, "se").published == 0.04
    assert quick_wbcd.cell("wbcd", 40, "le").published == 0.14


def test_build_potential_shapes(data_dir, manifest):
    ds = sm.load_dataset(manifest["chdd"], base_dir=data_dir)
    train = np.arange(0, 60)
    pot = build_potential(ds, manifest["chdd"], train)
    dense = sm.realize_potential(pot).dense()
    absence_train = [i for i in train if ds.labels[i] == 0]
    disease_train = [i for i in train if ds.labels[i] == 1]
    # diagonal barrier sits exactly on the absence training points
    for i in absence_train:
        assert dense[i, i] >= 1.0
    # chain couples consecutive disease training points
    for a, b in zip(disease_train[:-1], disease_train[1:]):
        assert dense[a, b] == -1.0
    # eigenvalues nonnegative
    assert np.linalg.eigvalsh(dense).min() >= -1e-10


def test_threshold_curve_matches_bruteforce(data_dir, manifest):
    ds = sm.load_dataset(manifest["chdd"], base_dir=data_dir)
    g = sm.build_graph(ds.points, 10, 1.0)
    train = np.arange(0, 40)
    pot = build_potential(ds, manifest["chdd"], train)
    emb = sm.embed_graph(g, pot, 2.0, n=6)
    curves = se_threshold_curves(emb.coords, ds, manifest["chdd"], train)
    # brute force over explicit thresholds must not beat the exact sweep
    pushed = ds.class_names.index("absence")
    norms = np.linalg.norm(emb.coords, axis=1)
    best_curve = min(full.min() for full, _ in curves)
    brute = 1.0
    for q in np.linspace(0, 1, 200):
        delta = np.quantile(norms, q)
        pred = np.where(norms < delta, pushed, 1 - pushed)
        brute = min(brute, float(np.mean(pred != ds.labels)))
    assert best_curve <= brute + 1e-12


def test_le_rep_error_forces_training_correct(data_dir, manifest):
    ds = sm.load_dataset(manifest["wbcd"], base_dir=data_dir)
    g = sm.build_graph(ds.points, 10, 0.5)
    emb = sm.embed_graph(g, None, 0.0, n=6)
    full = np.arange(ds.m)
    assert le_rep_error(emb.coords, ds, full) == 0.0


def test_resolve_grids_defaults_and_heuristic():
    cfg = BenchConfig(dataset="wbcd")
    ks, sigmas, alphas = resolve_grids(cfg, 683)
    assert all(6 <= k <= 20 for k in ks)
    assert len(alphas) >= 3
    cfg2 = BenchConfig(dataset="wbcd", alpha_grid="heuristic")
    _, _, alphas2 = resolve_grids(cfg2, 683)
    assert len(alphas2) == 8
    ratios = np.diff(np.log10(alphas2))
    assert np.allclose(ratios, ratios[0])  # log-spaced


def test_emit_table_formats(quick_wbcd):
    text = emit_table(quick_wbcd, "text")
    assert "wbcd" in text and "SE(pub)" in text and "4%" in text
    csv = emit_table(quick_wbcd, "csv")
    lines = csv.strip().splitlines()
    assert lines[0].startswith("dataset,train")
    assert len(lines) == 2
    with pytest.raises(ValueError):
        emit_table(quick_wbcd, "html")


def test_emit_table_empty():
    from semaps.bench import BenchResult
    empty = BenchResult(cells=[], config=BenchConfig(dataset="wbcd"),
                        elapsed_seconds=0.0)
    text = emit_table(empty, "text")
    assert text.splitlines()[0].startswith("dataset")


def test_published_table_shape():
    # one block per dataset with the published training sizes
    assert sorted(size for d, size in PUBLISHED if d == "wbcd") == \
        [40, 100, 200, 400, 600]
    assert sorted(size for d, size in PUBLISHED if d == "chdd") == \
        [40, 100, 200, 297]
    assert sorted(size for d, size in PUBLISHED if d == "mmd") == \
        [20, 30, 40, 100, 200, 800]
