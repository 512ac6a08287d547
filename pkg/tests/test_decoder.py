import numpy as np
import pytest

from ftfn.decoder import (
    build_context,
    decode,
    logical_failure,
    percolation_check,
)
from ftfn.lattice import build_cubic, build_four_qubit, build_ten_qubit
from ftfn.matching import brute_force_min_perfect, scale_weights
from ftfn.noise import (
    NoiseParams,
    NoiseSample,
    collapse_lattice,
    defects_of,
    sample,
)


def make_sample(lat, flipped_ids=(), erased_ids=()):
    flipped = np.zeros(lat.n_edges, dtype=bool)
    erased = np.zeros(lat.n_edges, dtype=bool)
    flipped[list(flipped_ids)] = True
    erased[list(erased_ids)] = True
    return NoiseSample(erased, flipped, defects_of(lat, flipped))


def test_decode_no_defects():
    lat = build_cubic(4)
    ctx = build_context(collapse_lattice(lat, NoiseParams(0.05, 0.0)))
    res = decode(ctx, make_sample(lat))
    assert not res.correction.any()
    assert not res.failed


def test_decode_single_flip_recovers_edge():
    lat = build_ten_qubit(4)
    col = collapse_lattice(lat, NoiseParams(0.01, 0.0))
    ctx = build_context(col)
    # pick a multiplicity-1 edge: unique shortest path is the edge itself
    eid = int(np.nonzero(lat.edges_m == 1)[0][0])
    res = decode(ctx, make_sample(lat, flipped_ids=[eid]))
    assert res.correction[eid]
    assert res.correction.sum() == 1
    assert not res.failed


def test_decode_erased_cluster_zero_weight():
    lat = build_cubic(4)
    col = collapse_lattice(lat, NoiseParams(0.01, 0.2))
    ctx = build_context(col)
    # erase a path of two incident edges and flip one of them
    v = 0
    incident = [i for i in range(lat.n_edges)
                if lat.edges_u[i] == v or lat.edges_v[i] == v][:2]
    res = decode(ctx, make_sample(lat, flipped_ids=[incident[0]],
                                  erased_ids=incident))
    # the residual must be a cycle; with a 2-edge erased tree the decoder
    # either returns the flipped edge or completes a trivial cycle
    residual = res.correction ^ (np.arange(lat.n_edges) == incident[0])
    assert len(defects_of(lat, residual)) == 0
    assert not res.failed


def test_decode_matches_brute_force_small_instances():
    # 200 random instances, <= 8 defects, mixed erasures, both models at L=6
    rng = np.random.default_rng(123)
    checked = 0
    for build in (build_ten_qubit, build_four_qubit):
        lat = build(6)
        col = collapse_lattice(lat, NoiseParams(0.004, 0.01))
        ctx = build_context(col, precompute_static=False)
        while checked < 100 or (build is build_four_qubit and checked < 200):
            s = sample(col, rng)
            if not 2 <= len(s.defects) <= 8:
                continue
            if s.erased.any():
                continue  # pure-flip instances so distances are static
            res = decode(ctx, s)
            # oracle: exact enumeration over pairings of defect distances
            import scipy.sparse as sp
            from scipy.sparse.csgraph import dijkstra
            g = sp.csr_matrix(
                (np.concatenate([col.weight, col.weight]),
                 (np.concatenate([lat.edges_u, lat.edges_v]),
                  np.concatenate([lat.edges_v, lat.edges_u]))),
                shape=(lat.n_vertices, lat.n_vertices))
            dist = dijkstra(g, directed=False, indices=s.defects)[:, s.defects]
            _, best = brute_force_min_perfect(scale_weights(dist))
            assert res.matching_weight == best
            checked += 1
            if checked in (100, 200):
                break
    assert checked == 200


def test_correction_validity_random():
    rng = np.random.default_rng(77)
    lat = build_four_qubit(6)
    col = collapse_lattice(lat, NoiseParams(0.02, 0.08))
    ctx = build_context(col)
    for _ in range(50):
        s = sample(col, rng)
        res = decode(ctx, s)  # raises internally if syndrome survives
        assert res.failure_cause in ("homology", "none")


def test_logical_failure_empty():
    lat = build_cubic(4)
    assert not logical_failure(lat, np.zeros(lat.n_edges, dtype=bool))


def test_logical_failure_straight_loop():
    lat = build_cubic(4)
    loop = np.zeros(lat.n_edges, dtype=bool)
    for x in range(4):
        u = lat.vertex_id(x, 0, 0)
        v = lat.vertex_id(x + 1, 0, 0)
        hits = [i for i in range(lat.n_edges)
                if {int(lat.edges_u[i]), int(lat.edges_v[i])} == {u, v}
                and tuple(lat.edges_disp[i]) == (1, 0, 0)]
        loop[hits[0]] = True
    assert logical_failure(lat, loop)


def test_logical_failure_trivial_face_boundary():
    lat = build_cubic(4)
    cyc = np.zeros(lat.n_edges, dtype=bool)

    def edge_between(a, b, disp):
        for i in range(lat.n_edges):
            if {int(lat.edges_u[i]), int(lat.edges_v[i])} == {a, b} and \
                    tuple(lat.edges_disp[i]) in (disp, tuple(-c for c in disp)):
                return i
        raise AssertionError

    v00 = lat.vertex_id(0, 0, 0)
    v10 = lat.vertex_id(1, 0, 0)
    v01 = lat.vertex_id(0, 1, 0)
    v11 = lat.vertex_id(1, 1, 0)
    cyc[edge_between(v00, v10, (1, 0, 0))] = True
    cyc[edge_between(v10, v11, (0, 1, 0))] = True
    cyc[edge_between(v01, v11, (1, 0, 0))] = True
    cyc[edge_between(v00, v01, (0, 1, 0))] = True
    assert not logical_failure(lat, cyc)


def test_logical_failure_rejects_open_chain():
    lat = build_cubic(4)
    chain = np.zeros(lat.n_edges, dtype=bool)
    chain[0] = True
    with pytest.raises(ValueError, match="boundary"):
        logical_failure(lat, chain)


def test_logical_failure_invariant_under_cell_boundaries():
    # adding the boundary of an elementary cube never changes the verdict
    lat = build_cubic(4)
    rng = np.random.default_rng(5)

    def cube_boundary(cx, cy, cz):
        edges = np.zeros(lat.n_edges, dtype=bool)
        # 4 faces of the cube u-direction... use all 12? boundary of a
        # 3-cell in the edge-chain sense is empty; instead add a face.
        return edges

    # faces are the natural trivial cycles: test 20 random faces
    def face_cycle(x, y, z, plane):
        cyc = np.zeros(lat.n_edges, dtype=bool)
        if plane == "xy":
            corners = [(x, y, z), (x + 1, y, z), (x + 1, y + 1, z), (x, y + 1, z)]
            disps = [(1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, -1, 0)]
        elif plane == "xz":
            corners = [(x, y, z), (x + 1, y, z), (x + 1, y, z + 1), (x, y, z + 1)]
            disps = [(1, 0, 0), (0, 0, 1), (-1, 0, 0), (0, 0, -1)]
        else:
            corners = [(x, y, z), (x, y + 1, z), (x, y + 1, z + 1), (x, y, z + 1)]
            disps = [(0, 1, 0), (0, 0, 1), (0, -1, 0), (0, 0, -1)]
        for (cx, cy, cz), d in zip(corners, disps):
            a = lat.vertex_id(cx, cy, cz)
            b = lat.vertex_id(cx + d[0], cy + d[1], cz + d[2])
            for i in range(lat.n_edges):
                if {int(lat.edges_u[i]), int(lat.edges_v[i])} == {a, b}:
                    cyc[i] ^= True
                    break
        return cyc

    base = np.zeros(lat.n_edges, dtype=bool)
    for x in range(4):
        u, v = lat.vertex_id(x, 0, 0), lat.vertex_id(x + 1, 0, 0)
        for i in range(lat.n_edges):
            if {int(lat.edges_u[i]), int(lat.edges_v[i])} == {u, v} and \
                    tuple(lat.edges_disp[i]) == (1, 0, 0):
                base[i] = True
                break
    verdict = logical_failure(lat, base)
    for _ in range(20):
        x, y, z = rng.integers(0, 4, size=3)
        plane = ("xy", "xz", "yz")[int(rng.integers(0, 3))]
        base ^= face_cycle(int(x), int(y), int(z), plane)
        assert logical_failure(lat, base) == verdict


def test_percolation_empty():
    lat = build_ten_qubit(4)
    assert not percolation_check(lat, np.zeros(lat.n_edges, dtype=bool))


def test_percolation_full_column():
    lat = build_ten_qubit(4)
    erased = np.zeros(lat.n_edges, dtype=bool)
    for z in range(4):
        u = lat.vertex_id(0, 0, z)
        v = lat.vertex_id(0, 0, z + 1)
        for i in range(lat.n_edges):
            if {int(lat.edges_u[i]), int(lat.edges_v[i])} == {u, v} and \
                    int(lat.edges_m[i]) == 4:
                erased[i] = True
                break
    assert erased.sum() == 4
    assert percolation_check(lat, erased)


def test_percolation_trivial_cycle_not_flagged():
    lat = build_cubic(4)
    erased = np.zeros(lat.n_edges, dtype=bool)
    # a contractible square of erased edges
    pairs = [((0, 0, 0), (1, 0, 0)), ((1, 0, 0), (1, 1, 0)),
             ((0, 1, 0), (1, 1, 0)), ((0, 0, 0), (0, 1, 0))]
    for (a, b) in pairs:
        va, vb = lat.vertex_id(*a), lat.vertex_id(*b)
        for i in range(lat.n_edges):
            if {int(lat.edges_u[i]), int(lat.edges_v[i])} == {va, vb}:
                erased[i] = True
                break
    assert erased.sum() == 4
    assert not percolation_check(lat, erased)


def test_percolation_low_rate_is_rare():
    lat = build_ten_qubit(8)
    col = collapse_lattice(lat, NoiseParams(0.0, 0.02))
    rng = np.random.default_rng(3)
    hits = sum(
        percolation_check(lat, sample(col, rng).erased) for _ in range(300)
    )
    assert hits <= 3


def test_static_and_dynamic_paths_agree():
    lat = build_ten_qubit(6)
    col = collapse_lattice(lat, NoiseParams(0.01, 0.0))
    ctx_static = build_context(col, precompute_static=True)
    ctx_dynamic = build_context(col, precompute_static=False)
    rng = np.random.default_rng(21)
    for _ in range(20):
        s = sample(col, rng)
        r1 = decode(ctx_static, s)
        r2 = decode(ctx_dynamic, s)
        assert r1.matching_weight == r2.matching_weight
        assert r1.failed == r2.failed
