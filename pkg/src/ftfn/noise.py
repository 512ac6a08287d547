"""Independent erasure/flip noise on collapsed multi-edges.

Every multi-edge of multiplicity m is replaced by a single edge whose
effective probabilities follow the parallel-composition formulas: an
erasure anywhere erases the composite outcome, an odd number of flips
flips it.  Erased outcomes carry no information, so a sampled erased
edge flips with probability 1/2 and decodes at weight zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import PeriodicSyndromeLattice


@dataclass(frozen=True)
class NoiseParams:
    p_error: float
    p_erasure: float

    def __post_init__(self):
        if not 0.0 <= self.p_error <= 0.5:
            raise ValueError("p_error must lie in [0, 0.5]")
        if not 0.0 <= self.p_erasure <= 1.0:
            raise ValueError("p_erasure must lie in [0, 1]")


def collapse(m: int, params: NoiseParams) -> tuple[float, float, float]:
    """(flip probability, erasure probability, weight) of an m-fold edge.

    p_error = 0 gives an infinite weight: the edge never flips and is
    traversable by the decoder only when erased.
    """
    if m < 1:
        raise ValueError("multiplicity must be >= 1")
    p_err_m = 0.5 * (1.0 - (1.0 - 2.0 * params.p_error) ** m)
    p_ers_m = 1.0 - (1.0 - params.p_erasure) ** m
    if p_err_m == 0.0:
        weight = np.inf
    else:
        weight = float(np.log((1.0 - p_err_m) / p_err_m))
    return p_err_m, p_ers_m, weight


@dataclass(frozen=True)
class CollapsedEdge:
    u: int
    v: int
    m: int
    p_err_m: float
    p_ers_m: float
    weight: float


@dataclass
class CollapsedLattice:
    """Per-edge effective noise parameters for one (lattice, params) pair."""

    lattice: PeriodicSyndromeLattice
    params: NoiseParams
    p_err: np.ndarray
    p_ers: np.ndarray
    weight: np.ndarray

    def edge(self, i: int) -> CollapsedEdge:
        return CollapsedEdge(
            int(self.lattice.edges_u[i]), int(self.lattice.edges_v[i]),
            int(self.lattice.edges_m[i]),
            float(self.p_err[i]), float(self.p_ers[i]), float(self.weight[i]),
        )


def collapse_lattice(lattice: PeriodicSyndromeLattice,
                     params: NoiseParams) -> CollapsedLattice:
    p_err = np.empty(lattice.n_edges)
    p_ers = np.empty(lattice.n_edges)
    weight = np.empty(lattice.n_edges)
    by_m: dict[int, tuple[float, float, float]] = {}
    for i, m in enumerate(lattice.edges_m):
        key = int(m)
        if key not in by_m:
            by_m[key] = collapse(key, params)
        p_err[i], p_ers[i], weight[i] = by_m[key]
    return CollapsedLattice(lattice, params, p_err, p_ers, weight)


@dataclass
class NoiseSample:
    erased: np.ndarray   # bool per edge
    flipped: np.ndarray  # bool per edge
    defects: np.ndarray  # vertex ids with odd flip parity


def defects_of(lattice: PeriodicSyndromeLattice,
               flipped: np.ndarray) -> np.ndarray:
    parity = np.zeros(lattice.n_vertices, dtype=np.int64)
    np.add.at(parity, lattice.edges_u[flipped], 1)
    np.add.at(parity, lattice.edges_v[flipped], 1)
    return np.nonzero(parity % 2)[0].astype(np.int32)


def sample(collapsed: CollapsedLattice, rng: np.random.Generator) -> NoiseSample:
    """One draw of erased and flipped composite edges plus their defects."""
    n_edges = collapsed.lattice.n_edges
    u1 = rng.random(n_edges)
    u2 = rng.random(n_edges)
    erased = u1 < collapsed.p_ers
    flipped = np.where(erased, u2 < 0.5, u2 < collapsed.p_err)
    defects = defects_of(collapsed.lattice, flipped)
    return NoiseSample(erased, flipped, defects)
