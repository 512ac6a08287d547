"""Explicit L x L x L periodic syndrome lattices with edge multiplicities.

These are the adjacency rules used for the reported threshold
simulations: a simple-cubic planar layer everywhere, multiplicity-4
vertical edges on the even (x+y) sublattice, and, for the four-qubit
model, multiplicity-3 planar diagonals plus single diagonal-vertical
edges whose direction alternates with the parity of y.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .network import SyndromeGraph

MODELS = ("four_qubit", "ten_qubit", "cubic")


@dataclass
class PeriodicSyndromeLattice:
    L: int
    model: str
    edges_u: np.ndarray       # int32 vertex ids
    edges_v: np.ndarray
    edges_m: np.ndarray       # int32 multiplicities
    edges_disp: np.ndarray    # int8 (E, 3) displacement from u to v
    crossings: np.ndarray     # uint8 (E, 3): 1 where the edge wraps an axis

    @property
    def n_vertices(self) -> int:
        return self.L ** 3

    @property
    def n_edges(self) -> int:
        return len(self.edges_u)

    def vertex_id(self, x: int, y: int, z: int) -> int:
        L = self.L
        return (x % L) + L * ((y % L) + L * (z % L))

    def vertex_xyz(self, v: int) -> tuple[int, int, int]:
        L = self.L
        return v % L, (v // L) % L, v // (L * L)

    def degree_profiles(self) -> list[tuple[int, ...]]:
        prof: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v, m in zip(self.edges_u, self.edges_v, self.edges_m):
            prof[u].append(int(m))
            prof[v].append(int(m))
        return [tuple(sorted(p)) for p in prof]

    def edge_class_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for m in self.edges_m:
            out[int(m)] = out.get(int(m), 0) + 1
        return out

    def export_edge_list(self) -> str:
        lines = [f"L {self.L} MODEL {self.model}"]
        for u, v, m in zip(self.edges_u, self.edges_v, self.edges_m):
            x1, y1, z1 = self.vertex_xyz(int(u))
            x2, y2, z2 = self.vertex_xyz(int(v))
            lines.append(f"{x1} {y1} {z1} {x2} {y2} {z2} {int(m)}")
        return "\n".join(lines) + "\n"


def _finish(L: int, model: str, raw_edges: list[tuple[tuple, tuple, int]]
            ) -> PeriodicSyndromeLattice:
    """raw edge = ((x,y,z), displacement, multiplicity); canonicalize and sort."""
    us, vs, ms, disps, crossings = [], [], [], [], []
    seen = set()
    for (x, y, z), d, m in raw_edges:
        u = (x % L) + L * ((y % L) + L * (z % L))
        x2, y2, z2 = x + d[0], y + d[1], z + d[2]
        v = (x2 % L) + L * ((y2 % L) + L * (z2 % L))
        if u == v:
            raise ValueError("self-loop generated; lattice too small")
        key = (min(u, v), max(u, v), d if u <= v else tuple(-c for c in d))
        if key in seen:
            continue
        seen.add(key)
        us.append(u)
        vs.append(v)
        ms.append(m)
        disps.append(d)
        crossings.append(tuple(
            1 if not 0 <= c + dd < L else 0
            for c, dd in zip((x % L, y % L, z % L), d)
        ))
    order = np.lexsort((vs, us))
    return PeriodicSyndromeLattice(
        L, model,
        np.array(us, dtype=np.int32)[order],
        np.array(vs, dtype=np.int32)[order],
        np.array(ms, dtype=np.int32)[order],
        np.array(disps, dtype=np.int8)[order],
        np.array(crossings, dtype=np.uint8)[order],
    )


def _planar_edges(L: int) -> list[tuple[tuple, tuple, int]]:
    out = []
    for z in range(L):
        for y in range(L):
            for x in range(L):
                out.append(((x, y, z), (1, 0, 0), 1))
                out.append(((x, y, z), (0, 1, 0), 1))
    return out


def build_ten_qubit(L: int) -> PeriodicSyndromeLattice:
    """Planar square layers everywhere; even (x+y) vertices additionally get
    multiplicity-4 edges to their two vertical neighbours."""
    if L % 2 or L < 4:
        raise ValueError("ten-qubit lattice needs even L >= 4")
    edges = _planar_edges(L)
    for z in range(L):
        for y in range(L):
            for x in range(L):
                if (x + y) % 2 == 0:
                    edges.append(((x, y, z), (0, 0, 1), 4))
    return _finish(L, "ten_qubit", edges)


def build_four_qubit(L: int) -> PeriodicSyndromeLattice:
    """Ten-qubit rules plus, on even (x+y) vertices, multiplicity-3 planar
    diagonals and single diagonal-vertical edges (up if y even, down if
    y odd)."""
    if L % 2 or L < 4:
        raise ValueError("four-qubit lattice needs even L >= 4")
    edges = _planar_edges(L)
    for z in range(L):
        for y in range(L):
            for x in range(L):
                if (x + y) % 2 != 0:
                    continue
                edges.append(((x, y, z), (0, 0, 1), 4))
                edges.append(((x, y, z), (1, 1, 0), 3))
                edges.append(((x, y, z), (1, -1, 0), 3))
                if y % 2 == 0:
                    for dx in (1, -1):
                        for dy in (1, -1):
                            edges.append(((x, y, z), (dx, dy, 1), 1))
    return _finish(L, "four_qubit", edges)


def build_cubic(L: int) -> PeriodicSyndromeLattice:
    """Simple cubic torus, all multiplicities 1 (layered-model baseline)."""
    if L < 3:
        raise ValueError("cubic lattice needs L >= 3")
    edges = []
    for z in range(L):
        for y in range(L):
            for x in range(L):
                edges.append(((x, y, z), (1, 0, 0), 1))
                edges.append(((x, y, z), (0, 1, 0), 1))
                edges.append(((x, y, z), (0, 0, 1), 1))
    return _finish(L, "cubic", edges)


def build_lattice(model: str, L: int) -> PeriodicSyndromeLattice:
    if model == "four_qubit":
        return build_four_qubit(L)
    if model == "ten_qubit":
        return build_ten_qubit(L)
    if model == "cubic":
        return build_cubic(L)
    raise ValueError(f"unknown model {model!r}")


def parse_edge_list(text: str) -> PeriodicSyndromeLattice:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "L" or head[2] != "MODEL":
        raise ValueError("bad edge-list header")
    L = int(head[1])
    model = head[3]
    raw = []
    for ln in lines[1:]:
        x1, y1, z1, x2, y2, z2, m = (int(t) for t in ln.split())
        d = tuple(((b - a + L // 2) % L) - L // 2 for a, b in
                  ((x1, x2), (y1, y2), (z1, z2)))
        raw.append(((x1, y1, z1), d, m))
    return _finish(L, model, raw)


# -- oracle equivalence ----------------------------------------------------


@dataclass
class CrossValidationReport:
    passed: bool
    message: str
    profile_diff: dict
    class_diff: dict


def cross_validate(lattice: PeriodicSyndromeLattice,
                   derived: SyndromeGraph) -> CrossValidationReport:
    """Compare an explicit lattice against a derived syndrome graph.

    A derived component of matching vertex count is compared on the
    multiset of per-vertex incidence profiles and on global edge-class
    counts; adjacency embedding is deliberately not compared.
    """
    comps = derived.components()
    matching = [c for c in comps if len(c) == lattice.n_vertices]
    if not matching:
        raise ValueError(
            f"size mismatch: lattice has {lattice.n_vertices} vertices, "
            f"derived components are {[len(c) for c in comps]}"
        )
    lat_profiles = sorted(lattice.degree_profiles())
    lat_classes = lattice.edge_class_counts()
    derived_profiles_all = derived.vertex_profiles()
    best: Optional[CrossValidationReport] = None
    for comp in matching:
        comp_set = set(comp)
        der_profiles = sorted(derived_profiles_all[v] for v in comp)
        der_classes: dict[int, int] = {}
        for e in derived.edges:
            if e.u in comp_set or (e.v is not None and e.v in comp_set):
                der_classes[e.multiplicity] = der_classes.get(e.multiplicity, 0) + 1
        profile_diff = _multiset_diff(lat_profiles, der_profiles)
        class_diff = {
            m: (lat_classes.get(m, 0), der_classes.get(m, 0))
            for m in sorted(set(lat_classes) | set(der_classes))
            if lat_classes.get(m, 0) != der_classes.get(m, 0)
        }
        passed = not profile_diff and not class_diff
        msg = ("per-vertex multiplicity multisets identical"
               if passed else
               f"profiles differ for {sum(profile_diff.values())} vertex classes; "
               f"edge-class count diffs {class_diff}")
        report = CrossValidationReport(passed, msg, profile_diff, class_diff)
        if passed:
            return report
        if best is None:
            best = report
    return best


def _multiset_diff(a: list, b: list) -> dict:
    from collections import Counter
    ca, cb = Counter(a), Counter(b)
    out = {}
    for key in set(ca) | set(cb):
        if ca[key] != cb[key]:
            out[key] = cb[key] - ca[key]
    return out
