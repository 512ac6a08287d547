from collections import Counter

import numpy as np
import pytest

from ftfn.lattice import (
    build_cubic,
    build_four_qubit,
    build_lattice,
    build_ten_qubit,
    cross_validate,
    parse_edge_list,
)


def test_ten_qubit_degree_profiles_l4():
    lat = build_ten_qubit(4)
    profiles = lat.degree_profiles()
    even = lat.vertex_id(0, 0, 0)
    odd = lat.vertex_id(1, 0, 0)
    assert profiles[even] == (1, 1, 1, 1, 4, 4)
    assert profiles[odd] == (1, 1, 1, 1)


def test_ten_qubit_edge_count_l4():
    lat = build_ten_qubit(4)
    # handshake oracle: 2 planar edges emitted per vertex + L^3/2 vertical
    assert lat.n_edges == 2 * 64 + 32 == 160


def test_four_qubit_degree_profiles_l4():
    lat = build_four_qubit(4)
    profiles = lat.degree_profiles()
    even = lat.vertex_id(0, 0, 0)
    odd = lat.vertex_id(1, 0, 0)
    assert profiles[even] == (1, 1, 1, 1, 1, 1, 1, 1, 3, 3, 3, 3, 4, 4)
    assert len(profiles[even]) == 14
    assert profiles[odd] == (1, 1, 1, 1)


def test_four_qubit_translation_invariance_l6():
    lat = build_four_qubit(6)
    profiles = lat.degree_profiles()
    for z in range(6):
        for y in range(6):
            for x in range(6):
                shifted = profiles[lat.vertex_id(x + 2, y, z)]
                assert profiles[lat.vertex_id(x, y, z)] == shifted


def test_cubic_counts():
    lat = build_cubic(3)
    assert lat.n_vertices == 27
    assert lat.n_edges == 81
    assert all(p == (1, 1, 1, 1, 1, 1) for p in lat.degree_profiles())


def test_cubic_bipartite_iff_even():
    # 2-coloring by coordinate parity works exactly when L is even
    for L, expect in ((3, False), (4, True)):
        lat = build_cubic(L)
        color = np.zeros(lat.n_vertices, dtype=np.int8)
        for v in range(lat.n_vertices):
            x, y, z = lat.vertex_xyz(v)
            color[v] = (x + y + z) % 2
        ok = all(color[u] != color[v] for u, v in zip(lat.edges_u, lat.edges_v))
        # for odd L wrap edges join same colors somewhere
        assert ok == expect


def test_handshake_multiplicity():
    for build, L in ((build_ten_qubit, 4), (build_four_qubit, 4), (build_cubic, 3)):
        lat = build(L)
        deg_sum = sum(len(p) for p in lat.degree_profiles())
        assert deg_sum == 2 * lat.n_edges
        mult_sum = sum(sum(p) for p in lat.degree_profiles())
        assert mult_sum == 2 * int(lat.edges_m.sum())


def test_rejects_bad_sizes():
    with pytest.raises(ValueError):
        build_ten_qubit(5)
    with pytest.raises(ValueError):
        build_four_qubit(2)
    with pytest.raises(ValueError):
        build_cubic(2)


def test_crossings_consistent_with_displacement():
    lat = build_four_qubit(4)
    for i in range(lat.n_edges):
        x, y, z = lat.vertex_xyz(int(lat.edges_u[i]))
        d = lat.edges_disp[i]
        for axis, c in enumerate((x, y, z)):
            wraps = not (0 <= c + int(d[axis]) < 4)
            assert bool(lat.crossings[i, axis]) == wraps


def test_edge_list_round_trip():
    lat = build_ten_qubit(4)
    text = lat.export_edge_list()
    assert text.startswith("L 4 MODEL ten_qubit")
    back = parse_edge_list(text)
    assert back.n_edges == lat.n_edges
    assert np.array_equal(back.edges_u, lat.edges_u)
    assert np.array_equal(back.edges_v, lat.edges_v)
    assert np.array_equal(back.edges_m, lat.edges_m)


def test_cross_validate_cubic_vs_itself():
    from ftfn.network import SyndromeGraph, SyndromeEdge
    lat = build_cubic(3)
    edges = tuple(
        SyndromeEdge(int(u), int(v), int(m), ())
        for u, v, m in zip(lat.edges_u, lat.edges_v, lat.edges_m)
    )
    graph = SyndromeGraph(lat.n_vertices, edges)
    report = cross_validate(lat, graph)
    assert report.passed


def test_cross_validate_ten_vs_four_fails_on_m3():
    lat4 = build_four_qubit(4)
    lat10 = build_ten_qubit(4)
    from ftfn.network import SyndromeGraph, SyndromeEdge
    edges = tuple(
        SyndromeEdge(int(u), int(v), int(m), ())
        for u, v, m in zip(lat4.edges_u, lat4.edges_v, lat4.edges_m)
    )
    graph = SyndromeGraph(lat4.n_vertices, edges)
    report = cross_validate(lat10, graph)
    assert not report.passed
    assert 3 in report.class_diff
