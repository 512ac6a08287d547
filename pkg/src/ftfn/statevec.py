"""Dense state-vector engine for verifying gate-teleportation identities.

Capped at 14 qubits: everything here exists to check the fusion algebra
(single-qubit and CNOT teleportation, fusion bases, cyclization) against
explicit amplitudes, not to simulate full networks.

Qubit 0 is the leftmost tensor factor (most significant index bit).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliOperator

MAX_QUBITS = 14

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
T = np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex)
S = np.diag([1, 1j]).astype(complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
I2 = np.eye(2, dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

# Fusion basis |u,v> on an ordered qubit pair (q1, q2), rows indexed by
# the computational basis |q1 q2>.  |0,0> = (|+0> + |-1>)/sqrt(2); the
# others are X^v_{q1} Z^u_{q1} |0,0>.
_FUSION_KET00 = np.array([1, 1, 1, -1], dtype=complex) / 2.0


def fusion_basis_state(u: int, v: int) -> np.ndarray:
    """4-vector of |u,v> over |q1 q2> in {00,01,10,11}."""
    ket = _FUSION_KET00.reshape(2, 2).copy()
    if u:  # Z on q1
        ket[1, :] *= -1
    if v:  # X on q1
        ket = ket[::-1, :].copy()
    return ket.reshape(4)


@dataclass(frozen=True)
class GateApplication:
    """A k-qubit unitary aimed at an ordered target tuple."""

    unitary: np.ndarray
    targets: tuple[int, ...]

    def __post_init__(self):
        u = np.asarray(self.unitary, dtype=complex)
        k = len(self.targets)
        if u.shape != (2**k, 2**k):
            raise ValueError("unitary shape does not match target count")
        if not np.allclose(u @ u.conj().T, np.eye(2**k), atol=1e-10):
            raise ValueError("matrix is not unitary")
        object.__setattr__(self, "unitary", u)


class StateVector:
    """Normalized dense state on n <= 14 qubits."""

    __slots__ = ("n", "amplitudes")

    def __init__(self, n: int, amplitudes: np.ndarray):
        if n > MAX_QUBITS:
            raise ValueError(f"state-vector engine capped at {MAX_QUBITS} qubits")
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.shape != (2**n,):
            raise ValueError("amplitude vector has wrong length")
        self.n = n
        self.amplitudes = amps

    @classmethod
    def computational(cls, n: int, bits: int = 0) -> "StateVector":
        amps = np.zeros(2**n, dtype=complex)
        amps[bits] = 1.0
        return cls(n, amps)

    @classmethod
    def plus_state(cls, n: int) -> "StateVector":
        amps = np.full(2**n, 2 ** (-n / 2), dtype=complex)
        return cls(n, amps)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "StateVector":
        """Haar-random state via normalized complex Gaussian amplitudes."""
        amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        return cls(n, amps / np.linalg.norm(amps))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.n, self.amplitudes / self.norm())

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        """|<self|other>|, 1 iff equal up to global phase (both normalized)."""
        return abs(self.overlap(other))

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(
            self.n + other.n, np.kron(self.amplitudes, other.amplitudes)
        )


def apply(state: StateVector, gate: GateApplication) -> StateVector:
    """Apply an embedded 1- or 2-qubit unitary."""
    targets = gate.targets
    if len(set(targets)) != len(targets):
        raise ValueError("targets must be distinct")
    for q in targets:
        if not 0 <= q < state.n:
            raise ValueError(f"target {q} out of range")
    n = state.n
    k = len(targets)
    tensor = state.amplitudes.reshape((2,) * n)
    tensor = np.moveaxis(tensor, targets, range(k))
    shape = tensor.shape
    tensor = gate.unitary @ tensor.reshape(2**k, -1)
    tensor = tensor.reshape((2,) * n)
    tensor = np.moveaxis(tensor, range(k), targets)
    return StateVector(n, np.ascontiguousarray(tensor).reshape(-1))


def apply_pauli(state: StateVector, p: PauliOperator) -> StateVector:
    """Apply an n-qubit Pauli operator exactly (phase included)."""
    if p.n != state.n:
        raise ValueError("dimension mismatch")
    n = state.n
    idx = np.arange(2**n)
    xmask = 0
    zmask = 0
    y_count = 0
    for q in range(n):
        bit = 1 << (n - 1 - q)
        if p.x_bit(q):
            xmask |= bit
        if p.z_bit(q):
            zmask |= bit
        if p.x_bit(q) and p.z_bit(q):
            y_count += 1
    # matrix = i^phase * i^{#Y} X^x Z^z ; X^x Z^z |b> = (-1)^{z.b} |b ^ x>
    signs = (-1.0) ** np.bitwise_count(idx & zmask)
    out = np.zeros_like(state.amplitudes)
    out[idx ^ xmask] = signs * state.amplitudes
    return StateVector(n, (1j ** ((p.phase + y_count) % 4)) * out)


def expectation(state: StateVector, p: PauliOperator) -> float:
    """<psi|P|psi>, demanded real (P must carry a +/-1 prefactor)."""
    if p.phase % 2:
        raise ValueError("operator is not Hermitian (imaginary prefactor)")
    val = state.overlap(apply_pauli(state, p))
    if abs(val.imag) > 1e-10:
        raise AssertionError("expectation of Hermitian operator came out complex")
    return float(val.real)


def fusion_project(
    state: StateVector, q1: int, q2: int, outcome: tuple[int, int]
) -> tuple[StateVector, float]:
    """Project (q1, q2) onto the fusion basis state |u,v>, drop both qubits.

    Returns (renormalized post-state on n-2 qubits, outcome probability).
    Remaining qubits keep their relative order.
    """
    if q1 == q2:
        raise ValueError("fusion qubits must differ")
    u, v = outcome
    n = state.n
    tensor = state.amplitudes.reshape((2,) * n)
    tensor = np.moveaxis(tensor, (q1, q2), (0, 1))
    bra = fusion_basis_state(u, v).conj().reshape(2, 2)
    post = np.tensordot(bra, tensor, axes=([0, 1], [0, 1]))
    post = np.ascontiguousarray(post).reshape(-1)
    prob = float(np.vdot(post, post).real)
    if prob < 1e-12:
        raise ValueError("impossible outcome")
    return StateVector(n - 2, post / np.sqrt(prob)), prob


def single_qubit_ancilla(u_matrix: np.ndarray) -> StateVector:
    """|anc> = U_{q_out} CZ |+>_{q_out} |+>_{q_a}, ordered (q_out, q_a)."""
    anc = StateVector.plus_state(2)
    anc = apply(anc, GateApplication(CZ, (0, 1)))
    return apply(anc, GateApplication(np.asarray(u_matrix, dtype=complex), (0,)))


def cnot_ancilla() -> StateVector:
    """4-qubit CNOT-teleportation ancilla, qubit order (c_a, t_a, c_out, t_out).

    |anc> = sum_{k,l} H|k>_{c_a} H|l>_{t_a} CNOT|k l>_{c_out t_out} / 2.
    """
    # Two Bell pairs (c_a, c_out) and (t_a, t_out), then H on ancilla-side
    # qubits and CNOT on the out pair.
    state = StateVector.computational(4, 0)
    state = apply(state, GateApplication(H, (0,)))
    state = apply(state, GateApplication(CNOT, (0, 2)))
    state = apply(state, GateApplication(H, (1,)))
    state = apply(state, GateApplication(CNOT, (1, 3)))
    state = apply(state, GateApplication(H, (0,)))
    state = apply(state, GateApplication(H, (1,)))
    return apply(state, GateApplication(CNOT, (2, 3)))


def verify_single_qubit_teleportation(
    u_matrix: np.ndarray, rng: np.random.Generator | None = None
) -> dict[tuple[int, int], float]:
    """Check the teleported-unitary identity for all four fusion outcomes.

    Builds |anc>, fuses (q_a, q_in) on a random 2-qubit input (one spectator
    qubit exercises index remapping), and compares against
    U Z^v X^u |psi> up to global phase.  Returns per-outcome infidelity.
    """
    rng = rng or np.random.default_rng(0)
    u = np.asarray(u_matrix, dtype=complex)
    psi = StateVector.random(2, rng)  # qubits: (q_in, spectator)
    # Full register order: (q_out, q_a, q_in, spectator)
    full = single_qubit_ancilla(u).tensor(psi)
    report: dict[tuple[int, int], float] = {}
    for uu in (0, 1):
        for vv in (0, 1):
            post, _prob = fusion_project(full, 1, 2, (uu, vv))  # (q_a, q_in)
            # target: U Z^v X^u on the input qubit, spectator untouched
            target = psi
            if uu:
                target = apply(target, GateApplication(X, (0,)))
            if vv:
                target = apply(target, GateApplication(Z, (0,)))
            target = apply(target, GateApplication(u, (0,)))
            report[(uu, vv)] = 1.0 - post.fidelity(target.normalized())
    return report


def verify_cnot_teleportation(
    n_inputs: int = 20, rng: np.random.Generator | None = None
) -> float:
    """Check the CNOT teleportation identity over all 16 outcomes.

    Random 4-qubit inputs (control, target, 2 spectators); returns the max
    infidelity against CNOT Z^{v_c} X^{u_c} Z^{v_t} X^{u_t} |psi>.
    """
    rng = rng or np.random.default_rng(0)
    anc = cnot_ancilla()  # (c_a, t_a, c_out, t_out)
    worst = 0.0
    for _ in range(n_inputs):
        psi = StateVector.random(4, rng)  # (c_in, t_in, s1, s2)
        full = anc.tensor(psi)  # (c_a, t_a, c_out, t_out, c_in, t_in, s1, s2)
        for uc in (0, 1):
            for vc in (0, 1):
                for ut in (0, 1):
                    for vt in (0, 1):
                        post, _ = fusion_project(full, 0, 4, (uc, vc))
                        # now (t_a, c_out, t_out, t_in, s1, s2)
                        post, _ = fusion_project(post, 0, 3, (ut, vt))
                        # now (c_out, t_out, s1, s2)
                        target = psi
                        if uc:
                            target = apply(target, GateApplication(X, (0,)))
                        if vc:
                            target = apply(target, GateApplication(Z, (0,)))
                        if ut:
                            target = apply(target, GateApplication(X, (1,)))
                        if vt:
                            target = apply(target, GateApplication(Z, (1,)))
                        target = apply(target, GateApplication(CNOT, (0, 1)))
                        worst = max(worst, 1.0 - post.fidelity(target.normalized()))
    return worst


def haar_random_unitary(rng: np.random.Generator) -> np.ndarray:
    """2x2 Haar unitary via QR of a complex Gaussian matrix."""
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def state_from_group(group) -> StateVector:
    """The (unique, for n generators) state stabilized by a full group.

    Applies the projectors (I + g)/2 to reference states until one
    survives; works for any consistent stabilizer group on <= 14 qubits.
    """
    n = group.n
    refs = [StateVector.computational(n, 0), StateVector.plus_state(n)]
    rng = np.random.default_rng(12345)
    refs.append(StateVector.random(n, rng))
    for ref in refs:
        amps = ref.amplitudes.copy()
        ok = True
        for g in group:
            projected = 0.5 * (amps + apply_pauli(StateVector(n, amps), g).amplitudes)
            norm = np.linalg.norm(projected)
            if norm < 1e-9:
                ok = False
                break
            amps = projected / norm
        if ok:
            state = StateVector(n, amps)
            for g in group:
                if abs(expectation(state, g) - 1.0) > 1e-9:
                    raise AssertionError("projector product failed to stabilize")
            return state
    raise ValueError("could not realize the stabilizer group as a state")


def measure_single(
    state: StateVector, q: int, basis: str, outcome: int
) -> tuple[StateVector, float]:
    """Project qubit q onto the X- or Z-basis state of sign `outcome` and
    drop the qubit.  Returns (renormalized state, probability)."""
    if basis == "Z":
        ket = np.array([1, 0], dtype=complex) if outcome == 1 else np.array([0, 1], dtype=complex)
    elif basis == "X":
        ket = np.array([1, outcome], dtype=complex) / np.sqrt(2)
    else:
        raise ValueError(f"bad basis {basis!r}")
    n = state.n
    tensor = np.moveaxis(state.amplitudes.reshape((2,) * n), q, 0)
    post = np.tensordot(ket.conj(), tensor, axes=([0], [0])).reshape(-1)
    prob = float(np.vdot(post, post).real)
    if prob < 1e-12:
        raise ValueError("impossible outcome")
    return StateVector(n - 1, post / np.sqrt(prob)), prob


def prepare_network_state(network, overrides: dict | None = None) -> StateVector:
    """Tensor product of a network's resource states in qubit order.

    `overrides` substitutes explicit StateVectors for chosen resource
    indices (used to feed arbitrary register inputs into gadget tests).
    Requires resources to occupy contiguous ascending qubit ranges, which
    the builders guarantee.
    """
    overrides = overrides or {}
    state = StateVector(0, np.array([1.0 + 0j]))
    expected_next = 0
    for i, rs in enumerate(network.resource_states):
        if rs.qubits != tuple(range(expected_next, expected_next + len(rs.qubits))):
            raise ValueError("resource qubits are not contiguous; cannot tensor")
        expected_next += len(rs.qubits)
        if i in overrides:
            factor = overrides[i]
            if factor.n != len(rs.qubits):
                raise ValueError("override state has wrong qubit count")
        else:
            if rs.group is None:
                raise ValueError("cannot prepare a decorated resource state")
            factor = state_from_group(rs.group)
        state = state.tensor(factor)
    return state


def run_network_branch(
    network,
    state: StateVector,
    fusion_outcomes: list[tuple[int, int]],
    measurement_outcomes: list[int] | None = None,
) -> tuple[StateVector, float]:
    """Apply all fusions then single measurements with fixed outcomes.

    Returns (post-state on the surviving qubits in original order, joint
    branch probability).  Raises on impossible branches.
    """
    live = list(range(network.n))
    prob = 1.0
    for (a, b), outcome in zip(network.fusions, fusion_outcomes):
        state, p = fusion_project(state, live.index(a), live.index(b), outcome)
        prob *= p
        live.remove(a)
        live.remove(b)
    meas = measurement_outcomes or []
    for (q, basis), outcome in zip(network.single_measurements, meas):
        state, p = measure_single(state, live.index(q), basis, outcome)
        prob *= p
        live.remove(q)
    return state, prob


def sample_network_run(
    network, state: StateVector, rng: np.random.Generator
) -> tuple[StateVector, list[tuple[int, int]], list[int]]:
    """Sample one noiseless run: every fusion and single measurement gets an
    outcome drawn from the exact quantum distribution."""
    live = list(range(network.n))
    fusion_outcomes: list[tuple[int, int]] = []
    for a, b in network.fusions:
        q1, q2 = live.index(a), live.index(b)
        probs = []
        options = [(u, v) for u in (0, 1) for v in (0, 1)]
        for u, v in options:
            tensor = np.moveaxis(state.amplitudes.reshape((2,) * state.n),
                                 (q1, q2), (0, 1))
            bra = fusion_basis_state(u, v).conj().reshape(2, 2)
            post = np.tensordot(bra, tensor, axes=([0, 1], [0, 1])).reshape(-1)
            probs.append(float(np.vdot(post, post).real))
        probs = np.maximum(np.array(probs), 0)
        probs /= probs.sum()
        choice = int(rng.choice(4, p=probs))
        outcome = options[choice]
        state, _ = fusion_project(state, q1, q2, outcome)
        fusion_outcomes.append(outcome)
        live.remove(a)
        live.remove(b)
    meas_outcomes: list[int] = []
    for q, basis in network.single_measurements:
        pos = live.index(q)
        probs = []
        for outcome in (1, -1):
            try:
                _, p = measure_single(state, pos, basis, outcome)
            except ValueError:
                p = 0.0
            probs.append(p)
        total = probs[0] + probs[1]
        pick = 1 if rng.random() < probs[0] / total else -1
        state, _ = measure_single(state, pos, basis, pick)
        meas_outcomes.append(pick)
        live.remove(q)
    return state, fusion_outcomes, meas_outcomes
