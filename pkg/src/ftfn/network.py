"""Fusion-network data model, gate-gadget transpiler, and check groups.

A fusion network is a set of stabilizer resource states, two-qubit fusion
measurements (each measuring the commuting pair X_a Z_b, Z_a X_b), and
single-qubit X/Z measurements.  The check group is the intersection of
the product of resource groups with the measured-observable group; its
elements have predetermined outcome parities and generate the syndrome
graph used for decoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import gf2
from .pauli import (
    PauliOperator,
    StabilizerGroup,
    in_span,
    intersect,
    multiply,
)

CLUSTER_LOCALS = ("c_a", "t_a", "c_out", "t_out")
# 4-qubit linear-cluster ancilla of the teleported CNOT, local order
# (c_a, t_a, c_out, t_out); path c_a - c_out - t_a - t_out.
CNOT_CLUSTER_STRINGS = ("XIZI", "ZZXI", "IXZZ", "IZIX")


@dataclass(frozen=True)
class ResourceState:
    """One resource state: global qubit ids plus its local stabilizer group.

    `group` is None for non-Clifford-decorated resources (tag says which
    gadget they came from); those are excluded from stabilizer analysis.
    """

    qubits: tuple[int, ...]
    group: Optional[StabilizerGroup]
    tag: Optional[str] = None

    def __post_init__(self):
        if self.group is not None and self.group.n != len(self.qubits):
            raise ValueError("local group size does not match qubit count")


@dataclass(frozen=True)
class FusionNetwork:
    n: int
    resource_states: tuple[ResourceState, ...]
    fusions: tuple[tuple[int, int], ...]
    single_measurements: tuple[tuple[int, str], ...]

    def validate(self) -> None:
        owner = [-1] * self.n
        for i, rs in enumerate(self.resource_states):
            for q in rs.qubits:
                if not 0 <= q < self.n:
                    raise ValueError(f"qubit {q} out of range")
                if owner[q] != -1:
                    raise ValueError(f"qubit {q} belongs to two resource states")
                owner[q] = i
        if any(o == -1 for o in owner):
            raise ValueError("qubit not covered by any resource state")
        used = set()
        for a, b in self.fusions:
            if a == b:
                raise ValueError("fusion must pair distinct qubits")
            for q in (a, b):
                if q in used:
                    raise ValueError(f"qubit {q} measured twice")
                used.add(q)
        for q, basis in self.single_measurements:
            if basis not in ("X", "Z"):
                raise ValueError(f"bad measurement basis {basis!r}")
            if q in used:
                raise ValueError(f"qubit {q} measured twice")
            used.add(q)

    # -- measured observables ------------------------------------------

    def n_observables(self) -> int:
        return 2 * len(self.fusions) + len(self.single_measurements)

    def observables(self) -> list[PauliOperator]:
        """Fusion i contributes observables 2i (X_a Z_b) and 2i+1 (Z_a X_b);
        single measurements follow in order."""
        out = []
        for a, b in self.fusions:
            out.append(PauliOperator.from_support(self.n, xs=[a], zs=[b]))
            out.append(PauliOperator.from_support(self.n, xs=[b], zs=[a]))
        for q, basis in self.single_measurements:
            if basis == "X":
                out.append(PauliOperator.single(self.n, q, "X"))
            else:
                out.append(PauliOperator.single(self.n, q, "Z"))
        return out

    def fusion_group(self) -> StabilizerGroup:
        return StabilizerGroup(self.n, self.observables(), validate=False)

    def resource_group(self) -> StabilizerGroup:
        """Product of all resource groups, embedded on global qubits."""
        gens = []
        for rs in self.resource_states:
            if rs.group is None:
                raise ValueError(
                    f"resource with non-Clifford decoration {rs.tag!r} has no "
                    "stabilizer group"
                )
            for g in rs.group:
                gens.append(g.embed(self.n, rs.qubits))
        return StabilizerGroup(self.n, gens, validate=False)

    def has_decorations(self) -> bool:
        return any(rs.group is None for rs in self.resource_states)

    # -- serialization --------------------------------------------------

    def serialize(self) -> str:
        lines = []
        for i, rs in enumerate(self.resource_states):
            lines.append("RS %d %s" % (i, " ".join(str(q) for q in rs.qubits)))
            if rs.group is None:
                raise ValueError("cannot serialize a decorated resource state")
            for g in rs.group:
                lines.append("GEN %d %s" % (i, g.to_string()))
        for a, b in self.fusions:
            lines.append(f"FUSE {a} {b}")
        for q, basis in self.single_measurements:
            lines.append(f"MEAS {q} {basis}")
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text: str) -> "FusionNetwork":
        qubit_lists: dict[int, tuple[int, ...]] = {}
        gen_strings: dict[int, list[str]] = {}
        fusions: list[tuple[int, int]] = []
        meas: list[tuple[int, str]] = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            kind = parts[0]
            if kind == "RS":
                qubit_lists[int(parts[1])] = tuple(int(p) for p in parts[2:])
            elif kind == "GEN":
                gen_strings.setdefault(int(parts[1]), []).append(parts[2])
            elif kind == "FUSE":
                fusions.append((int(parts[1]), int(parts[2])))
            elif kind == "MEAS":
                meas.append((int(parts[1]), parts[2]))
            else:
                raise ValueError(f"bad line in network file: {raw!r}")
        resources = []
        n = 0
        for i in sorted(qubit_lists):
            qubits = qubit_lists[i]
            n = max(n, max(qubits) + 1 if qubits else 0)
            gens = [PauliOperator.from_string(s) for s in gen_strings.get(i, [])]
            group = StabilizerGroup(len(qubits), gens, validate=False)
            resources.append(ResourceState(qubits, group))
        net = cls(n, tuple(resources), tuple(fusions), tuple(meas))
        net.validate()
        return net


class NetworkBuilder:
    """Mutable accumulator for fusion networks."""

    def __init__(self):
        self.n = 0
        self.resource_states: list[ResourceState] = []
        self.fusions: list[tuple[int, int]] = []
        self.single_measurements: list[tuple[int, str]] = []

    def add_resource(self, k: int, group: Optional[StabilizerGroup],
                     tag: Optional[str] = None) -> tuple[int, ...]:
        qubits = tuple(range(self.n, self.n + k))
        self.n += k
        self.resource_states.append(ResourceState(qubits, group, tag))
        return qubits

    def add_fusion(self, a: int, b: int) -> int:
        self.fusions.append((a, b))
        return len(self.fusions) - 1

    def add_measurement(self, q: int, basis: str) -> int:
        self.single_measurements.append((q, basis))
        return len(self.single_measurements) - 1

    def build(self, validate: bool = True) -> FusionNetwork:
        net = FusionNetwork(
            self.n,
            tuple(self.resource_states),
            tuple(self.fusions),
            tuple(self.single_measurements),
        )
        if validate:
            net.validate()
        return net


def cnot_cluster_group() -> StabilizerGroup:
    gens = [PauliOperator.from_string(s) for s in CNOT_CLUSTER_STRINGS]
    return StabilizerGroup(4, gens, validate=False)


def bell_cluster_group() -> StabilizerGroup:
    """CZ|++>, local order (q_out, q_a)."""
    gens = [PauliOperator.from_string("XZ"), PauliOperator.from_string("ZX")]
    return StabilizerGroup(2, gens, validate=False)


def single_gate_resource_group(tag: str) -> Optional[StabilizerGroup]:
    """Stabilizer group of U CZ|++> on (q_out, q_a); None if non-Clifford."""
    if tag == "H":
        base = bell_cluster_group()
        gens = [g.conjugate_h(0) for g in base]
        return StabilizerGroup(2, gens, validate=False)
    if tag == "I":
        return bell_cluster_group()
    return None  # T or arbitrary matrix: decorated, excluded from analysis


# -- circuit IR and transpiler ------------------------------------------


@dataclass(frozen=True)
class CircuitIR:
    """Tiny instruction list: init / single-qubit gate / cnot / measure."""

    n_wires: int
    instructions: tuple[tuple, ...]

    @classmethod
    def from_list(cls, n_wires: int, instructions: Iterable[tuple]) -> "CircuitIR":
        return cls(n_wires, tuple(instructions))


def transpile(circuit: CircuitIR) -> FusionNetwork:
    """One teleportation gadget per instruction.

    init -> single-qubit resource; single-qubit gate -> 2-qubit ancilla plus
    one fusion; cnot -> 4-qubit linear cluster plus two fusions; measure ->
    single measurement.  Non-Clifford gates leave a decoration tag and an
    analysis-excluded resource.
    """
    builder = NetworkBuilder()
    wire: list[Optional[int]] = [None] * circuit.n_wires

    def need_live(w: int) -> int:
        q = wire[w]
        if q is None:
            raise ValueError(f"instruction references dead/uninitialized wire {w}")
        return q

    for inst in circuit.instructions:
        op = inst[0]
        if op == "init":
            _, w, basis = inst
            if wire[w] is not None:
                raise ValueError(f"wire {w} already initialized")
            if basis == "0":
                group = StabilizerGroup(1, [PauliOperator.single(1, 0, "Z")],
                                        validate=False)
            elif basis == "+":
                group = StabilizerGroup(1, [PauliOperator.single(1, 0, "X")],
                                        validate=False)
            else:
                raise ValueError(f"bad init basis {basis!r}")
            (q,) = builder.add_resource(1, group, tag=None)
            wire[w] = q
        elif op == "gate":
            _, w, tag = inst
            q_in = need_live(w)
            group = single_gate_resource_group(tag) if isinstance(tag, str) else None
            tag_str = tag if isinstance(tag, str) else "U"
            q_out, q_a = builder.add_resource(
                2, group, tag=None if group is not None else tag_str
            )
            builder.add_fusion(q_in, q_a)
            wire[w] = q_out
        elif op == "cnot":
            _, wc, wt = inst
            c_in, t_in = need_live(wc), need_live(wt)
            c_a, t_a, c_out, t_out = builder.add_resource(4, cnot_cluster_group())
            builder.add_fusion(c_in, c_a)
            builder.add_fusion(t_in, t_a)
            wire[wc] = c_out
            wire[wt] = t_out
        elif op == "measure":
            _, w, basis = inst
            q = need_live(w)
            builder.add_measurement(q, basis)
            wire[w] = None
        else:
            raise ValueError(f"unsupported instruction {op!r}")
    return builder.build()


# -- check gadgets -------------------------------------------------------


@dataclass
class CheckGadget:
    """Bookkeeping for one stabilizer-check gadget inside a network."""

    kind: str                       # 'X' or 'Z'
    clusters: list[tuple[int, ...]]  # per corner, (c_a, t_a, c_out, t_out)
    register_entries: list[int]
    register_exits: list[int]
    chain_fusions: list[int]        # fusion indices along the ancilla chain
    register_fusions: list[int]
    ancilla_qubit: Optional[int] = None
    terminal_measurement: Optional[int] = None


def add_check_gadget(
    builder: NetworkBuilder,
    kind: str,
    register_qubits: Sequence[Optional[int]],
    cyclized: bool = True,
) -> CheckGadget:
    """Append a (cyclized or raw) stabilizer-check gadget.

    `register_qubits` are the current wire qubits consumed corner by
    corner (None leaves a dangling input port at a time boundary).
    Z-checks run the register through control wires and chain the ancilla
    along target wires; X-checks swap the roles.
    """
    if kind not in ("X", "Z"):
        raise ValueError("check kind must be 'X' or 'Z'")
    n_corners = len(register_qubits)
    gadget = CheckGadget(kind, [], [], [], [], [])
    for reg in register_qubits:
        cluster = builder.add_resource(4, cnot_cluster_group())
        c_a, t_a, c_out, t_out = cluster
        gadget.clusters.append(cluster)
        if kind == "Z":
            entry, exit_ = c_a, c_out
        else:
            entry, exit_ = t_a, t_out
        gadget.register_entries.append(entry)
        gadget.register_exits.append(exit_)
        if reg is not None:
            gadget.register_fusions.append(builder.add_fusion(reg, entry))
    # ancilla chain: t-wire for Z-checks, c-wire for X-checks
    if kind == "Z":
        chain_in = [cl[1] for cl in gadget.clusters]   # t_a
        chain_out = [cl[3] for cl in gadget.clusters]  # t_out
        anc_basis = "0"
    else:
        chain_in = [cl[0] for cl in gadget.clusters]   # c_a
        chain_out = [cl[2] for cl in gadget.clusters]  # c_out
        anc_basis = "+"
    for j in range(1, n_corners):
        gadget.chain_fusions.append(builder.add_fusion(chain_out[j - 1], chain_in[j]))
    if cyclized:
        gadget.chain_fusions.append(
            builder.add_fusion(chain_out[n_corners - 1], chain_in[0])
        )
    else:
        if anc_basis == "0":
            group = StabilizerGroup(1, [PauliOperator.single(1, 0, "Z")],
                                    validate=False)
            meas_basis = "Z"
        else:
            group = StabilizerGroup(1, [PauliOperator.single(1, 0, "X")],
                                    validate=False)
            meas_basis = "X"
        (anc,) = builder.add_resource(1, group)
        gadget.ancilla_qubit = anc
        gadget.chain_fusions.append(builder.add_fusion(anc, chain_in[0]))
        gadget.terminal_measurement = builder.add_measurement(
            chain_out[n_corners - 1], meas_basis
        )
    return gadget


def check_gadget_network(kind: str, n_corners: int = 4, cyclized: bool = False,
                         register_init: str = "+") -> tuple[FusionNetwork, CheckGadget, list[int]]:
    """Standalone check-measurement network with initialized register inputs.

    Returns (network, gadget bookkeeping, output register qubit ids).
    """
    builder = NetworkBuilder()
    regs = []
    for _ in range(n_corners):
        if register_init == "+":
            group = StabilizerGroup(1, [PauliOperator.single(1, 0, "X")],
                                    validate=False)
        else:
            group = StabilizerGroup(1, [PauliOperator.single(1, 0, "Z")],
                                    validate=False)
        (q,) = builder.add_resource(1, group)
        regs.append(q)
    gadget = add_check_gadget(builder, kind, regs, cyclized=cyclized)
    return builder.build(), gadget, list(gadget.register_exits)


def cyclize(network: FusionNetwork) -> FusionNetwork:
    """Replace one ancilla-init + terminal-measurement check pattern with a
    closing fusion.

    Finds a single-qubit ancilla resource (|0> for Z-checks, |+> for X)
    fused into a chain of 4-qubit clusters that ends in a single-qubit
    measurement of the matching basis, removes both, and fuses the chain
    end back onto the chain start.
    """
    cluster_of: dict[int, tuple[int, tuple[int, ...]]] = {}
    for idx, rs in enumerate(network.resource_states):
        if len(rs.qubits) == 4:
            for q in rs.qubits:
                cluster_of[q] = (idx, rs.qubits)

    single_meas = {q: (i, basis) for i, (q, basis) in
                   enumerate(network.single_measurements)}

    for rs_index, rs in enumerate(network.resource_states):
        if len(rs.qubits) != 1 or rs.group is None or len(rs.group) != 1:
            continue
        gen = rs.group.generators[0]
        if gen.phase != 0:
            continue
        if gen == PauliOperator.single(1, 0, "Z"):
            basis = "Z"
        elif gen == PauliOperator.single(1, 0, "X"):
            basis = "X"
        else:
            continue
        anc = rs.qubits[0]
        fusion_idx = next(
            (i for i, (a, b) in enumerate(network.fusions) if anc in (a, b)), None
        )
        if fusion_idx is None:
            continue
        a, b = network.fusions[fusion_idx]
        chain_start = b if a == anc else a
        # walk the teleportation chain until a measured qubit shows up
        seen = set()
        cur = chain_start
        while True:
            if cur in seen:
                cur = None
                break
            seen.add(cur)
            hit = cluster_of.get(cur)
            if hit is None:
                cur = None
                break
            _, qubits = hit
            c_a, t_a, c_out, t_out = qubits
            if cur == c_a:
                exit_q = c_out
            elif cur == t_a:
                exit_q = t_out
            else:
                cur = None
                break
            if exit_q in single_meas:
                meas_index, meas_basis = single_meas[exit_q]
                if meas_basis != basis:
                    cur = None
                break
            nxt = next(
                ((x, y) for (x, y) in network.fusions if exit_q in (x, y)), None
            )
            if nxt is None:
                cur = None
                break
            x, y = nxt
            cur = y if x == exit_q else x
        if cur is None:
            continue
        # pattern found: ancilla rs_index, fusion fusion_idx, measurement on exit_q
        id_map = {}
        new_id = 0
        for q in range(network.n):
            if q == anc:
                id_map[q] = None
            else:
                id_map[q] = new_id
                new_id += 1
        resources = []
        for i, r in enumerate(network.resource_states):
            if i == rs_index:
                continue
            resources.append(
                ResourceState(tuple(id_map[q] for q in r.qubits), r.group, r.tag)
            )
        fusions = [
            (id_map[x], id_map[y])
            for i, (x, y) in enumerate(network.fusions)
            if i != fusion_idx
        ]
        fusions.append((id_map[exit_q], id_map[chain_start]))
        meas = [
            (id_map[q], bas)
            for i, (q, bas) in enumerate(network.single_measurements)
            if i != single_meas[exit_q][0]
        ]
        out = FusionNetwork(network.n - 1, tuple(resources), tuple(fusions),
                            tuple(meas))
        out.validate()
        return out
    raise ValueError("no cyclizable check pattern found")


# -- check group and syndrome graph --------------------------------------


@dataclass(frozen=True)
class Check:
    """A predetermined-parity observable product.

    operator: the signed element of the resource group;
    expected_sign: parity of the product of decomposed outcomes;
    decomposition: indices into the network's observable list.
    """

    operator: PauliOperator
    expected_sign: int
    decomposition: frozenset[int]


@dataclass(frozen=True)
class CheckGroup:
    n_observables: int
    checks: tuple[Check, ...]

    def __len__(self) -> int:
        return len(self.checks)


def compute_check_group(network: FusionNetwork) -> CheckGroup:
    """C = (resource group) ∩ (measured-observable group), with signs.

    Each intersection generator is reported as the signed element of the
    resource group; its expected sign is the parity its decomposed fusion
    outcomes must multiply to.
    """
    if network.has_decorations():
        raise ValueError("network contains non-Clifford decorations")
    r = network.resource_group()
    f = network.fusion_group()
    c = intersect(r, f, validate=False)
    checks = []
    for op in c:
        dec = in_span(op, f)
        if dec is None:
            raise AssertionError("intersection element failed to decompose over F")
        idx, sign = dec
        checks.append(Check(op, sign, frozenset(idx)))
    return CheckGroup(network.n_observables(), tuple(checks))


def checks_from_operators(network: FusionNetwork,
                          operators: Sequence[PauliOperator],
                          r_group: Optional[StabilizerGroup] = None,
                          f_group: Optional[StabilizerGroup] = None) -> CheckGroup:
    """Wrap explicitly constructed check operators, validating membership."""
    r = r_group if r_group is not None else network.resource_group()
    f = f_group if f_group is not None else network.fusion_group()
    checks = []
    for op in operators:
        mem = in_span(op, r)
        if mem is None:
            raise ValueError("constructed check is not in the resource group span")
        r_sign = mem[1]
        signed = op if r_sign == 1 else op.negate()
        dec = in_span(signed, f)
        if dec is None:
            raise ValueError("constructed check does not decompose over F")
        idx, sign = dec
        checks.append(Check(signed, sign, frozenset(idx)))
    return CheckGroup(network.n_observables(), tuple(checks))


def loop_check_operator(network: FusionNetwork, gadget: CheckGadget
                        ) -> tuple[PauliOperator, list[int]]:
    """The extra check created by cyclization, with its observable indices.

    For Z-check gadgets the loop is the product of the chain fusions'
    X_exit Z_entry observables; for X-check gadgets the cluster end
    generators force the Z_exit X_entry partners instead.
    """
    op = PauliOperator.identity(network.n)
    obs_ids = []
    for fi in gadget.chain_fusions:
        a, b = network.fusions[fi]
        if gadget.kind == "Z":
            op = multiply(op, PauliOperator.from_support(network.n, xs=[a], zs=[b]))
            obs_ids.append(2 * fi)
        else:
            op = multiply(op, PauliOperator.from_support(network.n, xs=[b], zs=[a]))
            obs_ids.append(2 * fi + 1)
    return op, obs_ids


def sample_consistent_outcomes(
    checks: CheckGroup, rng: np.random.Generator, count: int = 1
) -> np.ndarray:
    """Sample outcome-bit vectors consistent with every check parity.

    For commuting measurements on a stabilizer state the joint outcome
    distribution is uniform over the affine GF(2) subspace fixed by the
    check group; rows of the returned (count, n_observables) array are
    draws from it (bit 1 = outcome -1).
    """
    n_obs = checks.n_observables
    n_checks = len(checks.checks)
    mat = gf2.zeros(max(1, n_checks), n_obs)
    rhs = np.zeros(max(1, n_checks), dtype=np.uint8)
    for i, check in enumerate(checks.checks):
        for obs in check.decomposition:
            gf2.set_bit(mat[i], obs)
        rhs[i] = 0 if check.expected_sign == 1 else 1
    # particular solution + null space of the constraint system
    w = gf2.n_words(n_obs)
    aug = np.zeros((max(1, n_checks), w + 1), dtype=np.uint64)
    aug[:, :w] = mat[:, :w]
    for i in range(n_checks):
        if rhs[i]:
            aug[i, w] |= np.uint64(1)
    reduced, pivots = gf2.rref(aug, n_obs)
    particular = np.zeros(n_obs, dtype=np.uint8)
    for i, col in enumerate(pivots):
        if reduced[i, w] & np.uint64(1):
            particular[col] = 1
    # verify consistency (inconsistent check sets cannot happen for valid C)
    for i in range(len(pivots), n_checks):
        if (not np.any(reduced[i, :w])) and (reduced[i, w] & np.uint64(1)):
            raise ValueError("inconsistent check parities")
    free_cols = sorted(set(range(n_obs)) - {int(c) for c in pivots})
    dense = np.zeros((len(pivots), n_obs), dtype=np.uint8)
    for i in range(len(pivots)):
        dense[i] = gf2.unpack_bits(reduced[i, :w], n_obs)
    out = np.zeros((count, n_obs), dtype=np.uint8)
    for s in range(count):
        vec = particular.copy()
        if free_cols:
            free_vals = rng.integers(0, 2, size=len(free_cols)).astype(np.uint8)
            vec[free_cols] ^= free_vals
            # re-satisfy pivot rows
            for i, col in enumerate(pivots):
                acc = 0
                for fc, fv in zip(free_cols, free_vals):
                    if fv and dense[i, fc]:
                        acc ^= 1
                if acc:
                    vec[col] ^= 1
        out[s] = vec
    return out


@dataclass(frozen=True)
class SyndromeEdge:
    u: int
    v: Optional[int]          # None marks a dangling (boundary) edge
    multiplicity: int
    observables: tuple[int, ...]


@dataclass(frozen=True)
class SyndromeGraph:
    n_vertices: int
    edges: tuple[SyndromeEdge, ...]

    def vertex_profiles(self) -> list[tuple[int, ...]]:
        """Per-vertex sorted multiset of incident edge multiplicities."""
        prof: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for e in self.edges:
            prof[e.u].append(e.multiplicity)
            if e.v is not None:
                prof[e.v].append(e.multiplicity)
        return [tuple(sorted(p)) for p in prof]

    def edge_class_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for e in self.edges:
            out[e.multiplicity] = out.get(e.multiplicity, 0) + 1
        return out

    def components(self) -> list[list[int]]:
        parent = list(range(self.n_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            if e.v is not None:
                ra, rb = find(e.u), find(e.v)
                if ra != rb:
                    parent[ra] = rb
        groups: dict[int, list[int]] = {}
        for v in range(self.n_vertices):
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values(), key=lambda g: (len(g), g))


def extract_syndrome_graph(checks: CheckGroup) -> SyndromeGraph:
    """Vertices = checks; observables shared by two checks become edges,
    single-check observables dangle, parallel observables bundle into one
    multi-edge."""
    incidence: dict[int, list[int]] = {}
    for v, check in enumerate(checks.checks):
        for obs in check.decomposition:
            incidence.setdefault(obs, []).append(v)
    for obs, vs in incidence.items():
        if len(vs) > 2:
            raise ValueError(
                "not graph-representable with this generating set: observable "
                f"{obs} appears in {len(vs)} checks"
            )
    bundles: dict[tuple[int, Optional[int]], list[int]] = {}
    for obs, vs in sorted(incidence.items()):
        if len(vs) == 2:
            key = (min(vs), max(vs))
        else:
            key = (vs[0], None)
        bundles.setdefault(key, []).append(obs)
    edges = [
        SyndromeEdge(u, v, len(obs_list), tuple(obs_list))
        for (u, v), obs_list in sorted(
            bundles.items(), key=lambda kv: (kv[0][0], -1 if kv[0][1] is None else kv[0][1])
        )
    ]
    return SyndromeGraph(len(checks.checks), tuple(edges))
