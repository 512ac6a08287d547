"""Foliated surface-code fusion networks and their syndrome graphs.

Builds the four-qubit model (one 4-qubit linear cluster per teleported
CNOT, cyclized check gadgets), the ten-qubit model (the four clusters of
each register-qubit round merged into one 10-qubit resource), and the
layered Raussendorf-equivalent network, then derives the check group
C = R ∩ F and extracts its cell-structure generating set (cyclization
loops plus temporal stabilizer-comparison cells) for the syndrome graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import gf2
from .network import (
    Check,
    CheckGroup,
    FusionNetwork,
    NetworkBuilder,
    SyndromeGraph,
    cnot_cluster_group,
    compute_check_group,
    extract_syndrome_graph,
)
from .pauli import (
    PauliOperator,
    StabilizerGroup,
    fusion_collapse,
    in_span,
    multiply,
)

SUBROUND_ORDER = ("X1", "X2", "Z2", "Z1")  # X@V1, X@V2, Z@V2*, Z@V1*


@dataclass(frozen=True)
class Edge2D:
    """Edge (register qubit) of the periodic surface-code lattice."""

    i: int
    j: int
    o: int  # 0 horizontal (towards +x), 1 vertical (towards +y)


def lattice_edges(lx: int, ly: int) -> list[Edge2D]:
    return [Edge2D(i, j, o) for j in range(ly) for i in range(lx) for o in (0, 1)]


def x_check_edges(i: int, j: int, lx: int, ly: int) -> list[Edge2D]:
    """Edges incident to vertex (i, j), circular order E, N, W, S."""
    return [
        Edge2D(i, j, 0),
        Edge2D(i, j, 1),
        Edge2D((i - 1) % lx, j, 0),
        Edge2D(i, (j - 1) % ly, 1),
    ]


def z_check_edges(i: int, j: int, lx: int, ly: int) -> list[Edge2D]:
    """Boundary edges of face (i, j), circular order bottom, right, top, left."""
    return [
        Edge2D(i, j, 0),
        Edge2D((i + 1) % lx, j, 1),
        Edge2D(i, (j + 1) % ly, 0),
        Edge2D(i, j, 1),
    ]


def subround_positions(kind_class: str, lx: int, ly: int) -> list[tuple[int, int]]:
    if kind_class == "X1":
        return [(i, j) for j in range(ly) for i in range(lx) if (i + j) % 2 == 0]
    if kind_class == "X2":
        return [(i, j) for j in range(ly) for i in range(lx) if (i + j) % 2 == 1]
    if kind_class == "Z2":
        return [(i, j) for j in range(ly) for i in range(lx) if (i + j) % 2 == 1]
    if kind_class == "Z1":
        return [(i, j) for j in range(ly) for i in range(lx) if (i + j) % 2 == 0]
    raise ValueError(kind_class)


@dataclass
class FoliatedGadget:
    kind: str                 # 'X' or 'Z'
    kind_class: str           # subround class 'X1'/'X2'/'Z2'/'Z1'
    pos: tuple[int, int]
    round: int
    corner_edges: list[Edge2D]
    chain_fusions: list[int]


@dataclass
class LineVisit:
    gadget_index: int
    entry_fusion: Optional[int]  # fusion feeding this gadget (None at open start)


@dataclass
class FoliatedNetwork:
    """A foliated network plus the bookkeeping needed for cell extraction."""

    network: FusionNetwork
    model: str
    lx: int
    ly: int
    rounds: int
    periodic_time: bool
    gadgets: list[FoliatedGadget]
    line_visits: dict[tuple[Edge2D, int], list[LineVisit]]


def _gadget_wiring(kind: str, cluster: tuple[int, ...]) -> tuple[int, int, int, int]:
    """(register entry, register exit, chain entry, chain exit) of a cluster."""
    c_a, t_a, c_out, t_out = cluster
    if kind == "Z":
        return c_a, c_out, t_a, t_out
    return t_a, t_out, c_a, c_out


def build_foliated_network(
    lx: int,
    ly: int,
    rounds: int,
    model: str = "four_qubit",
    periodic_time: bool = True,
) -> FoliatedNetwork:
    """Assemble the foliated network for repeated stabilizer measurement.

    Each round runs the four sub-rounds X@V1, X@V2, Z@V2*, Z@V1*, chaining
    every register qubit's output into its next gadget.  With periodic
    time the last outputs fuse back onto the first inputs.
    """
    if lx % 2 or ly % 2:
        raise ValueError("lattice sides must be even")
    if rounds < 1:
        raise ValueError("need at least one round")
    if model == "four_qubit":
        return _build_four_qubit(lx, ly, rounds, periodic_time)
    if model == "ten_qubit":
        return _build_ten_qubit(lx, ly, rounds, periodic_time)
    raise ValueError(f"unknown model {model!r}")


def _build_four_qubit(lx, ly, rounds, periodic_time) -> FoliatedNetwork:
    builder = NetworkBuilder()
    gadgets: list[FoliatedGadget] = []
    line_visits: dict[tuple[Edge2D, int], list[LineVisit]] = {}
    wire: dict[Edge2D, Optional[int]] = {e: None for e in lattice_edges(lx, ly)}
    first_entry: dict[Edge2D, int] = {}

    for r in range(rounds):
        for kind_class in SUBROUND_ORDER:
            kind = kind_class[0]
            for pos in subround_positions(kind_class, lx, ly):
                edges = (x_check_edges(*pos, lx, ly) if kind == "X"
                         else z_check_edges(*pos, lx, ly))
                clusters = [builder.add_resource(4, cnot_cluster_group())
                            for _ in edges]
                gadget = FoliatedGadget(kind, kind_class, pos, r, edges, [])
                g_index = len(gadgets)
                chain_in, chain_out = [], []
                for e, cluster in zip(edges, clusters):
                    entry, exit_, ch_in, ch_out = _gadget_wiring(kind, cluster)
                    chain_in.append(ch_in)
                    chain_out.append(ch_out)
                    fid = None
                    if wire[e] is not None:
                        fid = builder.add_fusion(wire[e], entry)
                    else:
                        first_entry[e] = entry
                    line_visits.setdefault((e, r), []).append(
                        LineVisit(g_index, fid)
                    )
                    wire[e] = exit_
                k = len(edges)
                for j in range(k):
                    gadget.chain_fusions.append(
                        builder.add_fusion(chain_out[j], chain_in[(j + 1) % k])
                    )
                gadgets.append(gadget)
    if periodic_time:
        for e in lattice_edges(lx, ly):
            fid = builder.add_fusion(wire[e], first_entry[e])
            line_visits[(e, 0)][0].entry_fusion = fid
    net = builder.build()
    return FoliatedNetwork(net, "four_qubit", lx, ly, rounds, periodic_time,
                           gadgets, line_visits)


# merged 10-qubit resource: local roles in qubit order
TEN_QUBIT_ROLES = (
    "x1_chain_in",   # C1.c_a   (X@V1 gadget cycle entry)
    "line_in",       # C1.t_a   (inter-round fusion target)
    "x1_chain_out",  # C1.c_out
    "x2_chain_in",   # C2.c_a
    "x2_chain_out",  # C2.c_out
    "z2_chain_in",   # C3.t_a
    "z2_chain_out",  # C3.t_out
    "z1_chain_in",   # C4.t_a
    "line_out",      # C4.c_out (inter-round fusion source)
    "z1_chain_out",  # C4.t_out
)
_ROLE_INDEX = {name: i for i, name in enumerate(TEN_QUBIT_ROLES)}


def ten_qubit_resource_group() -> StabilizerGroup:
    """Four CNOT clusters fused along one register line (outcomes (0,0)).

    Qubit order follows TEN_QUBIT_ROLES.
    """
    gens = []
    for c in range(4):
        for g in cnot_cluster_group():
            gens.append(g.embed(16, tuple(range(4 * c, 4 * c + 4))))
    group = StabilizerGroup(16, gens, validate=False)
    labels = list(range(16))
    # register flow: C1.t_out -> C2.t_a, C2.t_out -> C3.c_a, C3.c_out -> C4.c_a
    for qa, qb in ((3, 5), (7, 8), (10, 12)):
        group = fusion_collapse(group, labels.index(qa), labels.index(qb))
        labels.remove(qa)
        labels.remove(qb)
    assert labels == [0, 1, 2, 4, 6, 9, 11, 13, 14, 15]
    assert group.n == 10 and len(group) == 10
    return group


def _build_ten_qubit(lx, ly, rounds, periodic_time) -> FoliatedNetwork:
    builder = NetworkBuilder()
    template = ten_qubit_resource_group()
    edges = lattice_edges(lx, ly)
    res_qubits: dict[tuple[Edge2D, int], tuple[int, ...]] = {}
    for r in range(rounds):
        for e in edges:
            res_qubits[(e, r)] = builder.add_resource(10, template)

    def role_qubit(e: Edge2D, r: int, role: str) -> int:
        return res_qubits[(e, r)][_ROLE_INDEX[role]]

    gadgets: list[FoliatedGadget] = []
    line_visits: dict[tuple[Edge2D, int], list[LineVisit]] = {}
    for r in range(rounds):
        for kind_class in SUBROUND_ORDER:
            kind = kind_class[0]
            chain_role = {
                "X1": ("x1_chain_in", "x1_chain_out"),
                "X2": ("x2_chain_in", "x2_chain_out"),
                "Z2": ("z2_chain_in", "z2_chain_out"),
                "Z1": ("z1_chain_in", "z1_chain_out"),
            }[kind_class]
            for pos in subround_positions(kind_class, lx, ly):
                es = (x_check_edges(*pos, lx, ly) if kind == "X"
                      else z_check_edges(*pos, lx, ly))
                gadget = FoliatedGadget(kind, kind_class, pos, r, es, [])
                g_index = len(gadgets)
                k = len(es)
                for j in range(k):
                    exit_q = role_qubit(es[j], r, chain_role[1])
                    entry_q = role_qubit(es[(j + 1) % k], r, chain_role[0])
                    gadget.chain_fusions.append(builder.add_fusion(exit_q, entry_q))
                for e in es:
                    line_visits.setdefault((e, r), []).append(
                        LineVisit(g_index, None)
                    )
                gadgets.append(gadget)
    for r in range(rounds):
        if r == rounds - 1 and not periodic_time:
            continue
        r_next = (r + 1) % rounds
        for e in edges:
            fid = builder.add_fusion(role_qubit(e, r, "line_out"),
                                     role_qubit(e, r_next, "line_in"))
            line_visits[(e, r_next)][0].entry_fusion = fid
    net = builder.build()
    return FoliatedNetwork(net, "ten_qubit", lx, ly, rounds, periodic_time,
                           gadgets, line_visits)


# -- cyclization loop checks ---------------------------------------------


def foliated_loop_check(fn: FoliatedNetwork, gadget: FoliatedGadget
                        ) -> tuple[PauliOperator, list[int]]:
    """Loop check of one cyclized gadget with its observable indices."""
    net = fn.network
    op = PauliOperator.identity(net.n)
    obs_ids = []
    for fi in gadget.chain_fusions:
        a, b = net.fusions[fi]
        if gadget.kind == "Z":
            op = multiply(op, PauliOperator.from_support(net.n, xs=[a], zs=[b]))
            obs_ids.append(2 * fi)
        else:
            op = multiply(op, PauliOperator.from_support(net.n, xs=[b], zs=[a]))
            obs_ids.append(2 * fi + 1)
    return op, obs_ids


# -- cell extraction ------------------------------------------------------


def _decomposition_matrix(checks: CheckGroup) -> np.ndarray:
    mat = gf2.zeros(len(checks.checks), checks.n_observables)
    for i, c in enumerate(checks.checks):
        for obs in c.decomposition:
            gf2.set_bit(mat[i], obs)
    return mat


def _fusion_obs_pair(fi: int) -> tuple[int, int]:
    return 2 * fi, 2 * fi + 1


def _gadget_index(fn: FoliatedNetwork, pos, kind_class, r) -> int:
    for i, g in enumerate(fn.gadgets):
        if g.pos == tuple(pos) and g.kind_class == kind_class and g.round == r:
            return i
    raise KeyError((pos, kind_class, r))


def _comparison_window(fn: FoliatedNetwork, pos, kind_class, r) -> set[int]:
    """Observable ids that can appear in the temporal comparison cell of
    check `pos` between rounds r and r+1."""
    rounds = fn.rounds
    r_next = (r + 1) % rounds
    window: set[int] = set()
    gi_here = _gadget_index(fn, pos, kind_class, r)
    gi_next = _gadget_index(fn, pos, kind_class, r_next)
    for gi in (gi_here, gi_next):
        for fi in fn.gadgets[gi].chain_fusions:
            window.update(_fusion_obs_pair(fi))
    sub_index = SUBROUND_ORDER.index(kind_class)
    g_here = fn.gadgets[gi_here]
    for e in g_here.corner_edges:
        # visits strictly between the two consumptions of e by this check
        for rr, keep in ((r, lambda s: s > sub_index),
                         (r_next, lambda s: s < sub_index)):
            for v in fn.line_visits[(e, rr)]:
                gad = fn.gadgets[v.gadget_index]
                if not keep(SUBROUND_ORDER.index(gad.kind_class)):
                    continue
                for fi in gad.chain_fusions:
                    window.update(_fusion_obs_pair(fi))
                if v.entry_fusion is not None:
                    window.update(_fusion_obs_pair(v.entry_fusion))
        # the fusions feeding this check's own consumptions of e
        for rr, gi in ((r, gi_here), (r_next, gi_next)):
            for v in fn.line_visits[(e, rr)]:
                if v.gadget_index == gi and v.entry_fusion is not None:
                    window.update(_fusion_obs_pair(v.entry_fusion))
    return window


def _local_span_elements(decomp: np.ndarray, n_obs: int,
                         window: set[int]) -> list[np.ndarray]:
    """Basis of the sub-span of rowspace(decomp) supported inside window."""
    w = gf2.n_words(n_obs)
    window_mask = np.zeros(w, dtype=np.uint64)
    for obs in window:
        gf2.set_bit(window_mask, obs)
    mask = ~window_mask  # stray high bits are unset in every decomp row
    restricted = decomp[:, :w] & mask
    combos = gf2.null_space_combos(restricted, n_obs)
    out = []
    for combo in combos:
        vec = np.zeros(w, dtype=np.uint64)
        for i in range(decomp.shape[0]):
            if gf2.get_bit(combo, i):
                vec ^= decomp[i, :w]
        if vec.any():
            out.append(vec)
    return out


class CellExtractionError(RuntimeError):
    pass


def extract_cell_checks(fn: FoliatedNetwork,
                        checks: Optional[CheckGroup] = None) -> CheckGroup:
    """Cell-structure generating set: loop checks plus comparison cells.

    Loop checks are built directly from the gadget geometry; each temporal
    comparison cell is recovered as the unique check-group element local
    to the window between two consecutive measurements of one stabilizer
    (after quotienting out in-window loops).  Needs rounds >= 2 so that
    a comparison does not close onto its own gadget.
    """
    if fn.rounds < 2 or not fn.periodic_time:
        raise CellExtractionError(
            "cell extraction needs time-periodic foliation with >= 2 rounds"
        )
    net = fn.network
    if checks is None:
        checks = compute_check_group(net)
    n_obs = checks.n_observables
    decomp = _decomposition_matrix(checks)
    f_group = net.fusion_group()
    r_group = net.resource_group()

    cells: list[Check] = []
    loop_vecs: list[tuple[np.ndarray, set[int]]] = []
    w = gf2.n_words(n_obs)
    for gadget in fn.gadgets:
        op, obs_ids = foliated_loop_check(fn, gadget)
        mem = in_span(op, r_group)
        if mem is None:
            raise CellExtractionError("loop operator not in resource span")
        signed = op if mem[1] == 1 else op.negate()
        dec = in_span(signed, f_group)
        assert dec is not None
        cells.append(Check(signed, dec[1], frozenset(dec[0])))
        vec = np.zeros(w, dtype=np.uint64)
        for obs in dec[0]:
            gf2.set_bit(vec, obs)
        loop_vecs.append((vec, set(dec[0])))

    for kind_class in SUBROUND_ORDER:
        for pos in subround_positions(kind_class, fn.lx, fn.ly):
            for r in range(fn.rounds):
                window = _comparison_window(fn, pos, kind_class, r)
                elements = _local_span_elements(decomp, n_obs, window)
                reduced = []
                for vec in elements:
                    cur = vec.copy()
                    for lvec, lsupp in loop_vecs:
                        if not lsupp <= window:
                            continue
                        inter = int(np.bitwise_count(cur & lvec).sum())
                        if inter >= 3:
                            cur ^= lvec
                    if cur.any():
                        reduced.append(cur)
                # dedupe
                uniq: dict[bytes, np.ndarray] = {}
                for vec in reduced:
                    uniq[vec.tobytes()] = vec
                candidates = list(uniq.values())
                if not candidates:
                    raise CellExtractionError(
                        f"no comparison cell found for {kind_class}@{pos} r{r}"
                    )
                if len(candidates) > 1:
                    # prefer elements touching both rounds' gadget cycles
                    g_here = fn.gadgets[_gadget_index(fn, pos, kind_class, r)]
                    g_next = fn.gadgets[
                        _gadget_index(fn, pos, kind_class, (r + 1) % fn.rounds)
                    ]
                    def touches(vec, gadget):
                        _, obs_ids = foliated_loop_check(fn, gadget)
                        partner = [(o ^ 1) for o in obs_ids]
                        return any(gf2.get_bit(vec, o) for o in partner)
                    filtered = [v for v in candidates
                                if touches(v, g_here) and touches(v, g_next)]
                    if filtered:
                        candidates = filtered
                    candidates.sort(
                        key=lambda v: (int(np.bitwise_count(v).sum()), v.tobytes())
                    )
                    candidates = candidates[:1]
                vec = candidates[0]
                obs_ids = [o for o in range(n_obs) if gf2.get_bit(vec, o)]
                op = PauliOperator.identity(net.n)
                all_obs = f_group.generators
                for o in obs_ids:
                    op = multiply(op, all_obs[o])
                mem = in_span(op, r_group)
                if mem is None:
                    raise CellExtractionError("comparison cell not in R span")
                signed = op if mem[1] == 1 else op.negate()
                dec = in_span(signed, f_group)
                assert dec is not None and frozenset(dec[0]) == frozenset(obs_ids)
                cells.append(Check(signed, dec[1], frozenset(obs_ids)))
    return CheckGroup(n_obs, tuple(cells))


def derived_syndrome_graph(fn: FoliatedNetwork,
                           checks: Optional[CheckGroup] = None) -> SyndromeGraph:
    return extract_syndrome_graph(extract_cell_checks(fn, checks))


# -- Raussendorf-equivalent layered network ------------------------------


@dataclass
class RaussendorfNetwork:
    network: FusionNetwork
    lx: int
    ly: int
    rounds: int
    periodic_time: bool
    qubit_index: dict[tuple, int]
    fusion_index: dict[tuple, int]        # keyed by face label
    measurement_index: dict[tuple, int]   # qubit label -> single-measurement id


def _rl_face_borders(label, lx, ly, rounds):
    """Intra-slab border edges of a face qubit; inter-slab pairs handled
    via fusions."""
    _, orient, x, y, z = label
    if orient == "xy":
        return [("e", "x", x, y, z), ("e", "x", x, (y + 1) % ly, z),
                ("e", "y", x, y, z), ("e", "y", (x + 1) % lx, y, z)]
    if orient == "xz":
        return [("e", "x", x, y, z), ("e", "z", x, y, z),
                ("e", "z", (x + 1) % lx, y, z)]
    if orient == "yz":
        return [("e", "y", x, y, z), ("e", "z", x, y, z),
                ("e", "z", x, (y + 1) % ly, z)]
    raise ValueError(label)


def build_raussendorf_equivalent(lx: int, ly: int, rounds: int,
                                 periodic_time: bool = True) -> RaussendorfNetwork:
    """Layered network: per round one slab of the Raussendorf lattice.

    Uniting fusing pairs with CZ edges reproduces the Raussendorf cluster
    graph; non-fused qubits carry single X measurements, so the fusion
    group is generated by X_q plus the usual fusion observable pairs.
    """
    if rounds < 1:
        raise ValueError("need at least one round")
    builder = NetworkBuilder()
    qubit_index: dict[tuple, int] = {}
    for z in range(rounds):
        labels = []
        for orient in ("xy", "xz", "yz"):
            for y in range(ly):
                for x in range(lx):
                    labels.append(("f", orient, x, y, z))
        for direction in ("x", "y", "z"):
            for y in range(ly):
                for x in range(lx):
                    labels.append(("e", direction, x, y, z))
        local = {lab: i for i, lab in enumerate(labels)}
        edges = []
        for lab in labels:
            if lab[0] != "f":
                continue
            for nb in _rl_face_borders(lab, lx, ly, rounds):
                edges.append((local[lab], local[nb]))
        from .pauli import graph_state_group
        group = graph_state_group(len(labels), edges)
        qubits = builder.add_resource(len(labels), group)
        for lab, q in zip(labels, qubits):
            qubit_index[lab] = q

    fusion_index: dict[tuple, int] = {}
    fused = set()
    for z in range(rounds):
        if z == rounds - 1 and not periodic_time:
            continue
        z_next = (z + 1) % rounds
        for y in range(ly):
            for x in range(lx):
                for orient, direction in (("xz", "x"), ("yz", "y")):
                    f_lab = ("f", orient, x, y, z)
                    e_lab = ("e", direction, x, y, z_next)
                    fid = builder.add_fusion(qubit_index[f_lab],
                                             qubit_index[e_lab])
                    fusion_index[f_lab] = fid
                    fused.add(f_lab)
                    fused.add(e_lab)
    measurement_index: dict[tuple, int] = {}
    for lab, q in qubit_index.items():
        if lab not in fused:
            measurement_index[lab] = builder.add_measurement(q, "X")
    net = builder.build()
    return RaussendorfNetwork(net, lx, ly, rounds, periodic_time,
                              qubit_index, fusion_index, measurement_index)


def raussendorf_cell_checks(rn: RaussendorfNetwork) -> CheckGroup:
    """Elementary-cell checks of the layered network, built from geometry.

    Primal cells sit in the cubic lattice of the slabs; dual cells sit on
    its vertices.  Each check decomposes into two single-qubit X bits and
    four fusion observables.
    """
    net = rn.network
    lx, ly, rounds = rn.lx, rn.ly, rn.rounds
    n_fusions = len(net.fusions)

    def single_obs(lab):
        return 2 * n_fusions + rn.measurement_index[lab]

    def fusion_obs(face_lab, which):
        return 2 * rn.fusion_index[face_lab] + which

    f_group = net.fusion_group()
    r_group = net.resource_group()
    observables = f_group.generators
    cells: list[Check] = []

    def add_cell(obs_ids):
        op = PauliOperator.identity(net.n)
        for o in obs_ids:
            op = multiply(op, observables[o])
        mem = in_span(op, r_group)
        if mem is None:
            raise CellExtractionError("raussendorf cell not in resource span")
        signed = op if mem[1] == 1 else op.negate()
        dec = in_span(signed, f_group)
        cells.append(Check(signed, dec[1], frozenset(dec[0])))

    if rn.periodic_time and rounds >= 2:
        for z in range(rounds):
            z_next = (z + 1) % rounds
            for y in range(ly):
                for x in range(lx):
                    # primal cell (x, y, z): xy faces top/bottom measured,
                    # side faces fused (first observable X_face Z_edge)
                    obs_ids = [
                        single_obs(("f", "xy", x, y, z)),
                        single_obs(("f", "xy", x, y, z_next)),
                        fusion_obs(("f", "xz", x, y, z), 0),
                        fusion_obs(("f", "xz", x, (y + 1) % ly, z), 0),
                        fusion_obs(("f", "yz", x, y, z), 0),
                        fusion_obs(("f", "yz", (x + 1) % lx, y, z), 0),
                    ]
                    add_cell(obs_ids)
        for z in range(rounds):
            z_prev = (z - 1) % rounds
            for y in range(ly):
                for x in range(lx):
                    # dual cell at vertex (x, y, z): z edges measured, x/y
                    # edges are fusion partners (second observable)
                    obs_ids = [
                        single_obs(("e", "z", x, y, z)),
                        single_obs(("e", "z", x, y, z_prev)),
                        fusion_obs(("f", "xz", (x - 1) % lx, y, z_prev), 1),
                        fusion_obs(("f", "xz", x, y, z_prev), 1),
                        fusion_obs(("f", "yz", x, (y - 1) % ly, z_prev), 1),
                        fusion_obs(("f", "yz", x, y, z_prev), 1),
                    ]
                    add_cell(obs_ids)
    return CheckGroup(net.n_observables(), tuple(cells))
