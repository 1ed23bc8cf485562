import os

import numpy as np
import pytest

from multitile import (
    DimensionMismatch,
    SingularMatrix,
    SpecFormatError,
    build_tree,
    cell_system,
    check,
    coefficient_data,
    find_pair,
    flatten_grid,
    forward_data,
    frequency_vector,
    make_frequency_set,
    make_shifts,
    omega,
    reconstruct_direct,
    reconstruct_grid,
    reconstruct_point,
    sample_grid,
    shift_index_set,
)

from builders import ALL, domain_of
from test_freqtree import M4


def _setup(name, v=None, q=None, n=4):
    dom = ALL[name]()
    cert = find_pair(dom) if v is None else check(dom, v, q)
    sh = make_shifts(dom, cert)
    ids, pts = flatten_grid(sample_grid(dom, n))
    return dom, sh, ids, pts


def test_forward_worked_value():
    dom, sh, ids, pts = _setup("interval_2tile", [1], [2], n=1)
    dat = forward_data(dom, sh, ids, pts, np.array([[1.0, -1.0]]))
    assert np.allclose(dat.values, [[0.0, 2.0]])
    assert dat.provenance == "exact-pointwise"


def test_forward_k1_scales_by_volume():
    dom = domain_of([[4.0]], [([[0, 1]], [[0]])])
    sh = make_shifts(dom, find_pair(dom))
    ids, pts = flatten_grid(sample_grid(dom, 3))
    y = np.array([[1.0], [2.0], [3.0]], dtype=complex)
    dat = forward_data(dom, sh, ids, pts, y)
    assert np.allclose(dat.values, 4.0 * y)
    res = reconstruct_grid(dom, sh, dat)
    assert np.allclose(res.values, y.ravel())


def test_round_trip_random_values():
    rng = np.random.default_rng(21)
    for name in sorted(ALL):
        dom, sh, ids, pts = _setup(name)
        y = rng.normal(size=(len(ids), dom.k)) + 1j * rng.normal(size=(len(ids), dom.k))
        dat = forward_data(dom, sh, ids, pts, y)
        res = reconstruct_grid(dom, sh, dat, oracle=True)
        for i in range(len(res.values)):
            row, r = res.source_rows[i], res.regions[i]
            assert abs(res.values[i] - y[row, r - 1]) <= 1e-9, name
        assert np.nanmax(res.residuals) <= 1e-9
        assert res.skipped == ()


def test_zero_data_gives_zero():
    dom, sh, ids, pts = _setup("strip_3tile_2d")
    dat = forward_data(dom, sh, ids, pts, np.zeros((len(ids), dom.k), dtype=complex))
    res = reconstruct_grid(dom, sh, dat)
    assert np.max(np.abs(res.values)) == 0.0


def test_linearity():
    rng = np.random.default_rng(33)
    dom = ALL["plane_4tile_2d"]()
    sh = make_shifts(dom, find_pair(dom))
    fs = make_frequency_set(dom.cells[0].offsets)
    tree = build_tree(fs)
    mu = 0.7 - 1.3j
    F1 = rng.normal(size=dom.k) + 1j * rng.normal(size=dom.k)
    F2 = rng.normal(size=dom.k) + 1j * rng.normal(size=dom.k)
    a = reconstruct_point(tree, sh.delta, F1 + mu * F2)
    b = reconstruct_point(tree, sh.delta, F1) + mu * reconstruct_point(tree, sh.delta, F2)
    assert np.max(np.abs(a - b)) <= 1e-10


def test_reconstruct_point_mapping_and_order():
    dom, sh, ids, pts = _setup("box_pair_2d")
    fs = make_frequency_set(dom.cells[0].offsets)
    tree = build_tree(fs)
    order = shift_index_set(tree).indices
    F = np.array([1.0 + 0j, 2.0 - 1j])
    a = reconstruct_point(tree, sh.delta, F)
    b = reconstruct_point(tree, sh.delta, {j: F[i] for i, j in enumerate(order)})
    assert np.allclose(a, b)
    with pytest.raises(DimensionMismatch):
        reconstruct_point(tree, sh.delta, np.array([1.0 + 0j]))


def test_worked_ten_vector_recovery():
    """The 4D ten-vector set recovers random coefficients through the
    nested solver and agrees with the dense inverse."""
    rng = np.random.default_rng(41)
    dom = domain_of(np.eye(4).tolist(), [([[0, 1]] * 4, M4.astype(int).tolist())])
    cert = find_pair(dom, q_max=2 * dom.k)
    sh = make_shifts(dom, cert)
    ps = cell_system(dom, sh, 0)
    c = rng.normal(size=10) + 1j * rng.normal(size=10)
    F = ps.V @ c
    tree = build_tree(make_frequency_set(dom.cells[0].offsets))
    got = reconstruct_point(tree, sh.delta, {j: F[i] for i, j in enumerate(sh.index_sets[0])})
    assert np.linalg.norm(got - c) <= 1e-9 * np.linalg.norm(c)
    dense = reconstruct_direct(ps.V, F)
    assert np.linalg.norm(got - dense) <= 1e-10 * max(1.0, np.linalg.norm(dense))


def test_reconstruct_direct_singular():
    with pytest.raises(SingularMatrix):
        reconstruct_direct(np.ones((2, 2)), np.array([1.0, 2.0]))


def test_eta_invariance():
    rng = np.random.default_rng(9)
    dom = ALL["split_2tile"]()
    cert = check(dom, [1], [3])
    plain = make_shifts(dom, cert)
    shifted = make_shifts(dom, cert, np.array([5]))
    ids, pts = flatten_grid(sample_grid(dom, 5))
    y = rng.normal(size=(len(ids), 2)) + 1j * rng.normal(size=(len(ids), 2))
    a = reconstruct_grid(dom, plain, forward_data(dom, plain, ids, pts, y))
    b = reconstruct_grid(dom, shifted, forward_data(dom, shifted, ids, pts, y))
    assert np.max(np.abs(a.values - b.values)) <= 1e-12


def test_coefficient_data_orthogonal_single_term():
    dom, sh, ids, pts = _setup("interval_2tile", [1], [2])
    n0, s0 = (1,), 2
    l0 = frequency_vector(dom, sh, np.array(n0), s0)
    vals = np.empty((len(ids), dom.k), dtype=complex)
    for i in range(len(ids)):
        for r in range(1, dom.k + 1):
            vals[i, r - 1] = np.exp(2j * np.pi * l0 @ omega(dom, r, pts[i]))
    fwd = forward_data(dom, sh, ids, pts, vals)
    for R in (1, 3):
        cof = coefficient_data(dom, sh, {(n0, s0): 1.0}, ids, pts, R)
        assert np.max(np.abs(cof.values - fwd.values)) <= 1e-9, R
        assert cof.provenance == "coefficient-truncated"
        assert cof.radius == R


def test_coefficient_data_zero():
    dom, sh, ids, pts = _setup("split_2tile", [1], [3])
    dat = coefficient_data(dom, sh, {((0,), 1): 0.0}, ids, pts, 2)
    assert np.max(np.abs(dat.values)) == 0.0


def test_coefficient_truncation_converges():
    dom, sh, ids, pts = _setup("split_2tile", [1], [3], n=6)
    n0, s0 = (1,), 2
    l0 = frequency_vector(dom, sh, np.array(n0), s0)
    errs = []
    for R in (2, 4, 8, 16):
        dat = coefficient_data(dom, sh, {(n0, s0): 1.0}, ids, pts, R)
        res = reconstruct_grid(dom, sh, dat)
        err = max(
            abs(res.values[i] - np.exp(2j * np.pi * l0 @ res.points[i]))
            for i in range(len(res.values))
        )
        errs.append(err)
    assert all(errs[i + 1] <= errs[i] * 1.1 for i in range(len(errs) - 1))
    assert errs[-1] < errs[0]


def test_skipped_rows():
    dom, sh, ids, pts = _setup("twocell_2tile_1d", [1], [3])
    ids = ids.copy()
    ids[0] = 1 - ids[0]  # claim the wrong cell for one row
    y = np.ones((len(ids), 2), dtype=complex)
    dat = forward_data(dom, sh, ids, pts, y)
    res = reconstruct_grid(dom, sh, dat)
    assert res.skipped == (0,)
    assert np.isnan(res.residuals[0])
    assert len(res.values) == (len(ids) - 1) * dom.k


def test_thread_workers_agree(monkeypatch):
    rng = np.random.default_rng(55)
    dom, sh, ids, pts = _setup("strip_3tile_2d", n=5)
    y = rng.normal(size=(len(ids), dom.k)) + 1j * rng.normal(size=(len(ids), dom.k))
    dat = forward_data(dom, sh, ids, pts, y)
    seq = reconstruct_grid(dom, sh, dat, workers=1)
    par = reconstruct_grid(dom, sh, dat, workers=3)
    assert np.allclose(seq.values, par.values, atol=1e-14)
    monkeypatch.setenv("MULTITILE_THREADS", "2")
    env = reconstruct_grid(dom, sh, dat)
    assert np.allclose(seq.values, env.values, atol=1e-14)
    monkeypatch.setenv("MULTITILE_THREADS", "soup")
    with pytest.raises(SpecFormatError):
        reconstruct_grid(dom, sh, dat)


def test_block_diagnostics_present():
    dom, sh, ids, pts = _setup("plane_4tile_2d")
    dat = forward_data(dom, sh, ids, pts, np.ones((len(ids), dom.k), dtype=complex))
    res = reconstruct_grid(dom, sh, dat)
    assert 0 in res.blocks
    levels = {lv for lv, _ in res.blocks[0]}
    assert levels == {1, 2}
    for _, kappa in res.blocks[0]:
        assert kappa >= 1.0
