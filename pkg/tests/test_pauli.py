import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ftfn.pauli import (
    PauliOperator,
    StabilizerGroup,
    canonicalize,
    commutes,
    fusion_collapse,
    graph_state_group,
    in_span,
    intersect,
    measure_project,
    multiply,
)

P = PauliOperator.from_string


def random_pauli(rng, n):
    x = rng.integers(0, 2, size=n)
    z = rng.integers(0, 2, size=n)
    return PauliOperator.from_support(
        n, xs=np.nonzero(x)[0], zs=np.nonzero(z)[0], phase=int(rng.integers(0, 4))
    )


def test_multiply_involution():
    xi = P("XI")
    prod = multiply(xi, xi)
    assert prod.is_identity_string and prod.phase == 0


def test_multiply_xz_phase_convention():
    # X * Z = -i Y in the Hermitian-string representation: phase 3 on Y.
    prod = multiply(P("X"), P("Z"))
    assert prod.x_bit(0) == 1 and prod.z_bit(0) == 1
    assert prod.phase == 3
    oracle = P("X").to_matrix() @ P("Z").to_matrix()
    assert np.allclose(prod.to_matrix(), oracle)


def test_multiply_two_qubit_oracle():
    a = P("ZX")  # Z1 X2
    b = P("XZ")  # X1 Z2
    prod = multiply(a, b)
    oracle = a.to_matrix() @ b.to_matrix()
    assert np.allclose(prod.to_matrix(), oracle)
    # the pair commutes, so reversed order matches
    prod_rev = multiply(b, a)
    assert np.allclose(prod_rev.to_matrix(), oracle)


def test_multiply_matrix_oracle_randomized():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        p, q = random_pauli(rng, n), random_pauli(rng, n)
        assert np.allclose(
            multiply(p, q).to_matrix(), p.to_matrix() @ q.to_matrix()
        ), (p, q)


def test_multiply_associative():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = int(rng.integers(1, 6))
        a, b, c = (random_pauli(rng, n) for _ in range(3))
        assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


def test_multiply_dimension_mismatch():
    with pytest.raises(ValueError):
        multiply(P("X"), P("XX"))


def test_commutes_cases():
    assert commutes(P("XZ"), P("ZX"))
    assert commutes(P("X"), P("X"))
    assert not commutes(P("X"), P("Z"))


@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
@settings(max_examples=60, deadline=None)
def test_commutes_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    p, q = random_pauli(rng, n), random_pauli(rng, n)
    assert commutes(p, q) == commutes(q, p)
    pm, qm = p.to_matrix(), q.to_matrix()
    assert commutes(p, q) == np.allclose(pm @ qm, qm @ pm)


def test_string_round_trip():
    for s in ("+XIZY", "-ZZ", "iX", "-iY"):
        assert P(s).to_string() == s
    assert P("XIZ").to_string() == "+XIZ"


def test_canonicalize_duplicate():
    g = StabilizerGroup(2, [P("XX"), P("XX")], validate=False)
    got = canonicalize(g)
    assert len(got) == 1 and got.generators[0] == P("XX")


def test_canonicalize_inconsistent():
    g = StabilizerGroup(2, [P("XX"), P("-XX")], validate=False)
    with pytest.raises(ValueError, match="inconsistent group"):
        canonicalize(g)


def test_canonicalize_rank():
    g = StabilizerGroup(3, [P("ZZI"), P("IZZ"), P("ZIZ")], validate=False)
    got = canonicalize(g)
    assert len(got) == 2
    # oracle: GF(2) rank of the 3 rows is 2
    rows = np.array([[0, 0, 1, 1, 0], [0, 0, 0, 1, 1]])
    assert got.rank() == 2


def test_canonicalize_idempotent():
    rng = np.random.default_rng(11)
    for _ in range(25):
        gens = _random_commuting_group(rng, n=5, k=3)
        g = StabilizerGroup(5, gens, validate=False)
        c1 = canonicalize(g)
        c2 = canonicalize(c1)
        assert [op.to_string() for op in c1] == [op.to_string() for op in c2]


def _random_commuting_group(rng, n, k):
    """Random commuting independent generators via rejection sampling."""
    if k > n:
        raise ValueError("an isotropic group on n qubits has at most n generators")
    gens = []
    while len(gens) < k:
        cand = random_pauli(rng, n)
        cand = PauliOperator(cand.n, cand.x, cand.z, int(rng.integers(0, 2)) * 2)
        if cand.is_identity_string:
            continue
        if not all(commutes(cand, g) for g in gens):
            continue
        try:
            StabilizerGroup(n, gens + [cand], validate=True)
        except ValueError:
            continue
        gens.append(cand)
    return gens


def test_in_span_identity():
    g = StabilizerGroup(2, [P("XI"), P("IX")])
    assert in_span(PauliOperator.identity(2), g) == ((), 1)


def test_in_span_direct_product():
    g = StabilizerGroup(2, [P("XI"), P("IX")])
    idx, sign = in_span(P("XX"), g)
    assert set(idx) == {0, 1} and sign == 1
    idx, sign = in_span(P("-XX"), g)
    assert set(idx) == {0, 1} and sign == -1


def test_in_span_outside():
    g = StabilizerGroup(2, [P("XI"), P("IX")])
    assert in_span(P("ZI"), g) is None


def test_in_span_against_enumeration():
    rng = np.random.default_rng(23)
    for _ in range(30):
        gens = _random_commuting_group(rng, n=6, k=4)
        g = StabilizerGroup(6, gens)
        elements = {}
        for bits in itertools.product([0, 1], repeat=4):
            op = PauliOperator.identity(6)
            for j, b in enumerate(bits):
                if b:
                    op = multiply(op, gens[j])
            elements[(op.x.tobytes(), op.z.tobytes(), op.phase)] = bits
        probe = random_pauli(rng, 6)
        probe = PauliOperator(6, probe.x, probe.z, int(rng.integers(0, 2)) * 2)
        got = in_span(probe, g)
        key_plus = (probe.x.tobytes(), probe.z.tobytes(), probe.phase)
        key_minus = (probe.x.tobytes(), probe.z.tobytes(), (probe.phase + 2) & 3)
        if got is None:
            assert key_plus not in elements and key_minus not in elements
        else:
            idx, sign = got
            op = PauliOperator.identity(6)
            for j in idx:
                op = multiply(op, gens[j])
            assert (probe == op and sign == 1) or (probe == op.negate() and sign == -1)


def test_intersect_trivial():
    r = StabilizerGroup(2, [P("ZZ")])
    f = StabilizerGroup(2, [P("ZZ")])
    got = intersect(r, f)
    assert len(got) == 1 and got.generators[0] == P("ZZ")


def test_intersect_bell_example():
    r = StabilizerGroup(2, [P("XX"), P("ZZ")])
    f = StabilizerGroup(2, [P("XI"), P("IX")])
    got = intersect(r, f)
    assert len(got) == 1 and got.generators[0] == P("XX")


def test_intersect_brute_force_random():
    rng = np.random.default_rng(5)
    for _ in range(25):
        n = int(rng.integers(2, 9))
        kmax = min(3, n)
        r = StabilizerGroup(n, _random_commuting_group(rng, n, int(rng.integers(1, kmax + 1))))
        f = StabilizerGroup(n, _random_commuting_group(rng, n, int(rng.integers(1, kmax + 1))))
        got = intersect(r, f)
        # oracle: brute-force element sets, unsigned
        def strings(group):
            return {(e.x.tobytes(), e.z.tobytes()) for e in group.elements()}
        expected = strings(r) & strings(f)
        assert strings(got) <= expected
        assert len(strings(got)) == len(got.elements())
        # dimension check: |intersection| = 2^(rank r + rank f - rank union)
        union = StabilizerGroup(n, list(r.generators) + list(f.generators),
                                validate=False)
        k = r.rank() + f.rank() - union.rank()
        assert len(expected) == 2 ** k
        assert len(got) == k
        for gen in got:
            assert in_span(gen, r) is not None
            sp = in_span(gen, r)
            assert sp is not None and sp[1] == 1  # sign as an r element is baked in


def test_graph_state_single_vertex():
    g = graph_state_group(1, [])
    assert len(g) == 1 and g.generators[0] == P("X")


def test_graph_state_path4_matches_cnot_ancilla():
    g = graph_state_group(4, [(0, 1), (1, 2), (2, 3)])
    expect = [P("XZII"), P("ZXZI"), P("IZXZ"), P("IIZX")]
    assert list(g.generators) == expect


def test_graph_state_bell():
    g = graph_state_group(2, [(0, 1)])
    assert list(g.generators) == [P("XZ"), P("ZX")]


def test_graph_state_commutes():
    rng = np.random.default_rng(2)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        edges = {tuple(sorted(rng.integers(0, n, size=2))) for _ in range(n)}
        edges = [(a, b) for a, b in edges if a != b]
        g = graph_state_group(n, edges)
        StabilizerGroup(n, g.generators, validate=True)  # raises on failure


def test_measure_project_flip():
    # measuring Z on |+> with outcome -1 gives |1>, stabilized by -Z
    g = StabilizerGroup(1, [P("X")])
    got = measure_project(g, P("Z"), sign=-1)
    assert list(got.generators) == [P("-Z")]


def test_fusion_collapse_bell_pair():
    # Two Bell clusters fused along one qubit each leave a Bell cluster.
    # Qubits: 0-1 cluster, 2-3 cluster; fuse (1, 2).
    g = StabilizerGroup(
        4, [P("XZII"), P("ZXII"), P("IIXZ"), P("IIZX")], validate=False
    )
    got = fusion_collapse(g, 1, 2, outcome=(0, 0))
    assert got.n == 2
    assert got.rank() == 2
    # result is a maximal stabilizer group on the two remaining qubits
    assert len(got) == 2
