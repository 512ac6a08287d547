import numpy as np
import pytest

from ftfn.pauli import PauliOperator
from ftfn.statevec import (
    CNOT,
    CZ,
    H,
    T,
    X,
    GateApplication,
    StateVector,
    apply,
    apply_pauli,
    cnot_ancilla,
    expectation,
    fusion_basis_state,
    fusion_project,
    haar_random_unitary,
    single_qubit_ancilla,
    verify_cnot_teleportation,
    verify_single_qubit_teleportation,
)

P = PauliOperator.from_string


def test_apply_h_on_zero():
    state = apply(StateVector.computational(1), GateApplication(H, (0,)))
    assert np.allclose(state.amplitudes, [1 / np.sqrt(2), 1 / np.sqrt(2)])


def test_apply_cnot():
    state = apply(StateVector.computational(2, 0b10), GateApplication(CNOT, (0, 1)))
    assert np.allclose(state.amplitudes, [0, 0, 0, 1])


def test_apply_norm_preserved():
    rng = np.random.default_rng(0)
    state = StateVector.random(3, rng)
    state = apply(state, GateApplication(CZ, (2, 0)))
    assert abs(state.norm() - 1) < 1e-12


def test_apply_rejects_non_unitary():
    with pytest.raises(ValueError, match="unitary"):
        GateApplication(np.array([[1, 1], [0, 1]], dtype=complex), (0,))


def test_apply_rejects_duplicate_targets():
    state = StateVector.computational(2)
    with pytest.raises(ValueError):
        apply(state, GateApplication(CZ, (0, 0)))


def test_cz_plus_plus_is_bell_cluster():
    state = apply(StateVector.plus_state(2), GateApplication(CZ, (0, 1)))
    for s in ("XZ", "ZX"):
        assert expectation(state, P(s)) == pytest.approx(1.0, abs=1e-12)


def test_apply_pauli_matches_matrix():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(1, 5))
        x = rng.integers(0, 2, size=n)
        z = rng.integers(0, 2, size=n)
        p = PauliOperator.from_support(
            n, xs=np.nonzero(x)[0], zs=np.nonzero(z)[0], phase=int(rng.integers(0, 4))
        )
        state = StateVector.random(n, rng)
        got = apply_pauli(state, p)
        want = p.to_matrix() @ state.amplitudes
        assert np.allclose(got.amplitudes, want)


def test_expectation_basics():
    assert expectation(StateVector.computational(1), P("Z")) == pytest.approx(1.0)
    plus = apply(StateVector.computational(1), GateApplication(H, (0,)))
    assert expectation(plus, P("Z")) == pytest.approx(0.0, abs=1e-12)


def test_expectation_linear_cluster_stabilizers():
    # |++++> with CZ along a path is stabilized by the path graph-state group
    state = StateVector.plus_state(4)
    for pair in ((0, 1), (1, 2), (2, 3)):
        state = apply(state, GateApplication(CZ, pair))
    for s in ("XZII", "ZXZI", "IZXZ", "IIZX"):
        assert expectation(state, P(s)) == pytest.approx(1.0, abs=1e-12)


def test_expectation_rejects_non_hermitian():
    with pytest.raises(ValueError, match="Hermitian"):
        expectation(StateVector.computational(1), PauliOperator.from_string("iX"))


def test_fusion_basis_orthonormal():
    basis = np.array([fusion_basis_state(u, v) for u in (0, 1) for v in (0, 1)])
    assert np.allclose(basis @ basis.conj().T, np.eye(4))


def test_fusion_basis_eigenvalues():
    # X_{q1} Z_{q2} |u,v> = (-1)^u |u,v>;  Z_{q1} X_{q2} |u,v> = (-1)^v |u,v>
    xz = P("XZ").to_matrix()
    zx = P("ZX").to_matrix()
    for u in (0, 1):
        for v in (0, 1):
            ket = fusion_basis_state(u, v)
            assert np.allclose(xz @ ket, (-1) ** u * ket)
            assert np.allclose(zx @ ket, (-1) ** v * ket)


def test_fusion_project_bell_cluster_own_basis():
    state = apply(StateVector.plus_state(2), GateApplication(CZ, (0, 1)))
    post, prob = fusion_project(state, 0, 1, (0, 0))
    assert prob == pytest.approx(1.0)
    assert post.n == 0
    with pytest.raises(ValueError, match="impossible outcome"):
        fusion_project(state, 0, 1, (0, 1))


def test_fusion_project_outcomes_on_00():
    # expanding the overlaps by hand: each |<u,v|00>|^2 = 1/4
    state = StateVector.computational(2, 0)
    for u in (0, 1):
        for v in (0, 1):
            _, prob = fusion_project(state, 0, 1, (u, v))
            assert prob == pytest.approx(0.25)


def test_fusion_probabilities_sum_to_one():
    rng = np.random.default_rng(4)
    for _ in range(20):
        state = StateVector.random(4, rng)
        total = sum(
            fusion_project(state, 1, 3, (u, v))[1] for u in (0, 1) for v in (0, 1)
        )
        assert total == pytest.approx(1.0, abs=1e-10)


def test_fusion_equals_cz_then_xx_measurement():
    # fusion (u,v) == CZ followed by projecting q1, q2 on X eigenstates
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng.integers(2, 6))
        q1, q2 = rng.choice(n, size=2, replace=False)
        state = StateVector.random(n, rng)
        u, v = int(rng.integers(0, 2)), int(rng.integers(0, 2))
        post_f, prob_f = fusion_project(state, int(q1), int(q2), (u, v))

        after_cz = apply(state, GateApplication(CZ, (int(q1), int(q2))))
        tensor = after_cz.amplitudes.reshape((2,) * n)
        tensor = np.moveaxis(tensor, (int(q1), int(q2)), (0, 1))
        xu = np.array([1, (-1) ** u], dtype=complex) / np.sqrt(2)
        xv = np.array([1, (-1) ** v], dtype=complex) / np.sqrt(2)
        post = np.tensordot(
            np.outer(xu, xv).conj(), tensor, axes=([0, 1], [0, 1])
        ).reshape(-1)
        prob = float(np.vdot(post, post).real)
        assert prob == pytest.approx(prob_f, abs=1e-10)
        fid = abs(np.vdot(post / np.sqrt(prob), post_f.amplitudes))
        assert fid == pytest.approx(1.0, abs=1e-10)


def test_single_qubit_teleportation_identity_gate():
    report = verify_single_qubit_teleportation(np.eye(2))
    assert set(report) == {(u, v) for u in (0, 1) for v in (0, 1)}
    assert max(report.values()) < 1e-10


def test_single_qubit_teleportation_zero_outcome_returns_input():
    rng = np.random.default_rng(9)
    psi = StateVector.random(1, rng)
    full = single_qubit_ancilla(np.eye(2)).tensor(psi)
    post, _ = fusion_project(full, 1, 2, (0, 0))
    assert post.fidelity(psi) == pytest.approx(1.0, abs=1e-10)


def test_single_qubit_teleportation_t_gate():
    report = verify_single_qubit_teleportation(T)
    assert max(report.values()) < 1e-10


def test_single_qubit_teleportation_haar_random():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(50):
        u = haar_random_unitary(rng)
        report = verify_single_qubit_teleportation(u, rng)
        worst = max(worst, max(report.values()))
    assert worst < 1e-10


def test_cnot_ancilla_stabilizers():
    # ordering (c_a, t_a, c_out, t_out)
    anc = cnot_ancilla()
    for s in ("XIZI", "ZZXI", "IXZZ", "IZIX"):
        assert expectation(anc, P(s)) == pytest.approx(1.0, abs=1e-12), s


def test_cnot_teleportation_zero_outcome_pure_cnot():
    anc = cnot_ancilla()
    psi = StateVector.computational(2, 0b10)  # |10> on (c_in, t_in)
    full = anc.tensor(psi)  # (c_a, t_a, c_out, t_out, c_in, t_in)
    post, _ = fusion_project(full, 0, 4, (0, 0))
    post, _ = fusion_project(post, 0, 3, (0, 0))
    want = StateVector.computational(2, 0b11)
    assert post.fidelity(want) == pytest.approx(1.0, abs=1e-10)


def test_cnot_teleportation_all_outcomes():
    assert verify_cnot_teleportation(n_inputs=20) < 1e-10
