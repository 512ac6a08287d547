"""Signed n-qubit Pauli strings and stabilizer-group algebra.

An operator is stored as (x bits, z bits, phase mod 4) with matrix

    i^phase * prod_q w_q,   w_q in {I, X, Y, Z},  Y where x and z overlap.

Since every w-string is Hermitian, elements of stabilizer groups carry
phase in {0, 2}, i.e. a plain +/- sign.  Products of individual X/Z
factors pass through +/-i, hence the mod-4 tracking: X*Z = -iY is stored
as (x=1, z=1, phase=3).
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np
from numba import njit

from . import gf2

_PAULI_CHARS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_CHAR_BITS = {v: k for k, v in _PAULI_CHARS.items()}

_I2 = np.eye(2, dtype=complex)
_X2 = np.array([[0, 1], [1, 0]], dtype=complex)
_Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
_CHAR_MATS = {"I": _I2, "X": _X2, "Y": _Y2, "Z": _Z2}


def _popcount(row: np.ndarray) -> int:
    return int(np.bitwise_count(row).sum())


class PauliOperator:
    """Immutable signed Pauli string."""

    __slots__ = ("n", "x", "z", "phase")

    def __init__(self, n: int, x: np.ndarray, z: np.ndarray, phase: int = 0):
        self.n = n
        self.x = np.ascontiguousarray(x, dtype=np.uint64)
        self.z = np.ascontiguousarray(z, dtype=np.uint64)
        self.phase = phase & 3
        self.x.setflags(write=False)
        self.z.setflags(write=False)

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        w = gf2.n_words(n)
        return cls(n, np.zeros(w, dtype=np.uint64), np.zeros(w, dtype=np.uint64), 0)

    @classmethod
    def from_string(cls, s: str) -> "PauliOperator":
        s = s.strip()
        phase = 0
        for prefix, ph in (("-i", 3), ("+i", 1), ("i", 1), ("-", 2), ("+", 0)):
            if s.startswith(prefix):
                phase = ph
                s = s[len(prefix):]
                break
        n = len(s)
        w = gf2.n_words(n)
        x = np.zeros(w, dtype=np.uint64)
        z = np.zeros(w, dtype=np.uint64)
        for q, ch in enumerate(s):
            try:
                xb, zb = _CHAR_BITS[ch.upper()]
            except KeyError:
                raise ValueError(f"bad Pauli character {ch!r}") from None
            if xb:
                gf2.set_bit(x, q)
            if zb:
                gf2.set_bit(z, q)
        return cls(n, x, z, phase)

    @classmethod
    def single(cls, n: int, q: int, kind: str) -> "PauliOperator":
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} out of range for n={n}")
        w = gf2.n_words(n)
        x = np.zeros(w, dtype=np.uint64)
        z = np.zeros(w, dtype=np.uint64)
        xb, zb = _CHAR_BITS[kind.upper()]
        if xb:
            gf2.set_bit(x, q)
        if zb:
            gf2.set_bit(z, q)
        return cls(n, x, z, 0)

    @classmethod
    def from_support(cls, n: int, xs: Iterable[int] = (), zs: Iterable[int] = (),
                     phase: int = 0) -> "PauliOperator":
        """Operator with X on `xs`, Z on `zs` (Y where they overlap)."""
        w = gf2.n_words(n)
        x = np.zeros(w, dtype=np.uint64)
        z = np.zeros(w, dtype=np.uint64)
        for q in xs:
            gf2.set_bit(x, q)
        for q in zs:
            gf2.set_bit(z, q)
        return cls(n, x, z, phase)

    # -- inspection ---------------------------------------------------

    def x_bit(self, q: int) -> int:
        return gf2.get_bit(self.x, q)

    def z_bit(self, q: int) -> int:
        return gf2.get_bit(self.z, q)

    @property
    def is_identity_string(self) -> bool:
        return not (self.x.any() or self.z.any())

    @property
    def sign(self) -> int:
        if self.phase == 0:
            return 1
        if self.phase == 2:
            return -1
        raise ValueError(f"operator has imaginary prefactor (phase={self.phase})")

    def support(self) -> list[int]:
        return [q for q in range(self.n) if self.x_bit(q) or self.z_bit(q)]

    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def negate(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.phase + 2)

    def symplectic(self) -> np.ndarray:
        """Packed [x | z] row of 2n bits (z block starts at word boundary)."""
        return np.concatenate([self.x, self.z])

    def __eq__(self, other) -> bool:
        return (isinstance(other, PauliOperator) and self.n == other.n
                and self.phase == other.phase
                and np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z))

    def __hash__(self) -> int:
        return hash((self.n, self.phase, self.x.tobytes(), self.z.tobytes()))

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __repr__(self) -> str:
        return f"PauliOperator({self.to_string()!r})"

    def to_string(self) -> str:
        prefix = {0: "+", 1: "i", 2: "-", 3: "-i"}[self.phase]
        chars = [_PAULI_CHARS[(self.x_bit(q), self.z_bit(q))] for q in range(self.n)]
        return prefix + "".join(chars)

    def to_matrix(self) -> np.ndarray:
        """Dense 2^n matrix; qubit 0 is the leftmost tensor factor."""
        if self.n > 12:
            raise ValueError("dense matrix limited to 12 qubits")
        m = np.array([[1.0 + 0j]])
        for q in range(self.n):
            m = np.kron(m, _CHAR_MATS[_PAULI_CHARS[(self.x_bit(q), self.z_bit(q))]])
        return (1j ** self.phase) * m

    # -- embeddings ---------------------------------------------------

    def embed(self, n_total: int, qubit_map: Sequence[int]) -> "PauliOperator":
        """Map local qubit q -> global qubit_map[q]."""
        w = gf2.n_words(n_total)
        x = np.zeros(w, dtype=np.uint64)
        z = np.zeros(w, dtype=np.uint64)
        for q in range(self.n):
            if self.x_bit(q):
                gf2.set_bit(x, qubit_map[q])
            if self.z_bit(q):
                gf2.set_bit(z, qubit_map[q])
        return PauliOperator(n_total, x, z, self.phase)

    def restrict(self, keep: Sequence[int]) -> "PauliOperator":
        """Project to the listed qubits (which must carry all support)."""
        keep_set = set(keep)
        for q in self.support():
            if q not in keep_set:
                raise ValueError(f"operator has support on dropped qubit {q}")
        m = len(keep)
        w = gf2.n_words(m)
        x = np.zeros(w, dtype=np.uint64)
        z = np.zeros(w, dtype=np.uint64)
        for new_q, old_q in enumerate(keep):
            if self.x_bit(old_q):
                gf2.set_bit(x, new_q)
            if self.z_bit(old_q):
                gf2.set_bit(z, new_q)
        return PauliOperator(m, x, z, self.phase)

    def conjugate_h(self, q: int) -> "PauliOperator":
        """Conjugate by a Hadamard on qubit q (X<->Z, Y -> -Y)."""
        x = self.x.copy()
        z = self.z.copy()
        xb, zb = self.x_bit(q), self.z_bit(q)
        gf2.set_bit(x, q, zb)
        gf2.set_bit(z, q, xb)
        phase = self.phase + (2 if (xb and zb) else 0)
        return PauliOperator(self.n, x, z, phase)


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Matrix product p·q with exact phase mod 4."""
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: {p.n} != {q.n}")
    x3 = p.x ^ q.x
    z3 = p.z ^ q.z
    phase = (
        p.phase + q.phase
        + _popcount(p.x & p.z) + _popcount(q.x & q.z)
        - _popcount(x3 & z3)
        + 2 * _popcount(p.z & q.x)
    )
    return PauliOperator(p.n, x3, z3, phase)


def commutes(p: PauliOperator, q: PauliOperator) -> bool:
    """True iff the symplectic inner product vanishes mod 2."""
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: {p.n} != {q.n}")
    par = _popcount(p.x & q.z) + _popcount(p.z & q.x)
    return par % 2 == 0


@njit(cache=True)
def _pairwise_commute(xs: np.ndarray, zs: np.ndarray) -> bool:
    k = xs.shape[0]
    w = xs.shape[1]
    for i in range(k):
        for j in range(i + 1, k):
            acc = np.uint64(0)
            for t in range(w):
                acc ^= (xs[i, t] & zs[j, t]) ^ (zs[i, t] & xs[j, t])
            # parity of acc
            acc ^= acc >> np.uint64(32)
            acc ^= acc >> np.uint64(16)
            acc ^= acc >> np.uint64(8)
            acc ^= acc >> np.uint64(4)
            acc ^= acc >> np.uint64(2)
            acc ^= acc >> np.uint64(1)
            if acc & np.uint64(1):
                return False
    return True


class StabilizerGroup:
    """Commutative group given by an ordered list of signed generators."""

    __slots__ = ("n", "generators")

    def __init__(self, n: int, generators: Sequence[PauliOperator],
                 validate: bool = True):
        self.n = n
        self.generators = tuple(generators)
        if validate:
            self._validate()

    def _validate(self) -> None:
        for g in self.generators:
            if g.n != self.n:
                raise ValueError("generator dimension mismatch")
            if g.phase % 2:
                raise ValueError("generator has imaginary prefactor")
            if g.is_identity_string and g.phase == 2:
                raise ValueError("-identity is not a valid generator")
        if self.generators:
            xs = np.vstack([g.x for g in self.generators])
            zs = np.vstack([g.z for g in self.generators])
            if not _pairwise_commute(xs, zs):
                raise ValueError("generators do not commute pairwise")
            if gf2.rank(self.symplectic_matrix(), 2 * gf2.WORD_BITS *
                        gf2.n_words(self.n)) < len(self.generators):
                raise ValueError("generators are GF(2)-dependent")

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def symplectic_matrix(self) -> np.ndarray:
        """Rows [x | z], packed; z block starts at a word boundary."""
        w = gf2.n_words(self.n)
        if not self.generators:
            return np.zeros((0, 2 * w), dtype=np.uint64)
        return np.vstack([g.symplectic() for g in self.generators])

    def rank(self) -> int:
        if not self.generators:
            return 0
        return gf2.rank(self.symplectic_matrix(),
                        2 * gf2.WORD_BITS * gf2.n_words(self.n))

    def elements(self) -> list[PauliOperator]:
        """All 2^k group elements (small groups only; used by oracles)."""
        if len(self.generators) > 16:
            raise ValueError("refusing to enumerate > 2^16 elements")
        out = [PauliOperator.identity(self.n)]
        for g in self.generators:
            out += [multiply(e, g) for e in out]
        return out


def canonicalize(group: StabilizerGroup) -> StabilizerGroup:
    """Reduced row echelon form of the generator matrix over GF(2), with
    phases carried through the row operations.

    Raises ValueError("inconsistent group") if the generators multiply to
    -identity along some dependency.
    """
    gens = list(group.generators)
    if not gens:
        return StabilizerGroup(group.n, [], validate=False)
    n = group.n
    rows = [g for g in gens]
    n_bits = 2 * gf2.WORD_BITS * gf2.n_words(n)

    # Gaussian elimination at operator level; column order = packed [x|z] bits.
    echelon: list[tuple[int, PauliOperator]] = []  # (pivot column, row)
    for op in rows:
        cur = op
        for col, piv in echelon:
            vec = cur.symplectic()
            if gf2.get_bit(vec, col):
                cur = multiply(cur, piv)
        vec = cur.symplectic()
        if not vec.any():
            if cur.phase == 2:
                raise ValueError("inconsistent group")
            continue  # dependent row with consistent sign
        # leading bit
        lead = -1
        for b in range(n_bits):
            if gf2.get_bit(vec, b):
                lead = b
                break
        # back-substitute into existing rows
        new_echelon = []
        for col, piv in echelon:
            if gf2.get_bit(piv.symplectic(), lead):
                piv = multiply(piv, cur)
            new_echelon.append((col, piv))
        new_echelon.append((lead, cur))
        new_echelon.sort(key=lambda t: t[0])
        echelon = new_echelon
    return StabilizerGroup(group.n, [op for _, op in echelon], validate=False)


def in_span(p: PauliOperator, group: StabilizerGroup
            ) -> Optional[tuple[tuple[int, ...], int]]:
    """Decompose p over the group's generators, up to sign.

    Returns (generator indices, sign) with p = sign * prod_{j in idx} g_j,
    or None when p's string is outside the GF(2) span (or the relation
    would need an imaginary unit).
    """
    if p.n != group.n:
        raise ValueError("dimension mismatch")
    solver = _group_solver(group)
    idx = solver.solve(p.symplectic())
    if idx is None:
        return None
    prod = PauliOperator.identity(group.n)
    for j in idx:
        prod = multiply(prod, group.generators[j])
    delta = (p.phase - prod.phase) & 3
    if delta == 0:
        sign = 1
    elif delta == 2:
        sign = -1
    else:
        return None
    return tuple(int(j) for j in idx), sign


_solver_cache: dict[int, tuple[StabilizerGroup, gf2.Solver]] = {}


def _group_solver(group: StabilizerGroup) -> gf2.Solver:
    """Memoized GF(2) solver for a group's symplectic row space."""
    key = id(group)
    hit = _solver_cache.get(key)
    if hit is not None and hit[0] is group:
        return hit[1]
    mat = group.symplectic_matrix()
    n_bits = 2 * gf2.WORD_BITS * gf2.n_words(group.n)
    solver = gf2.Solver(mat, n_bits)
    if len(_solver_cache) > 32:
        _solver_cache.clear()
    _solver_cache[key] = (group, solver)
    return solver


def intersect(r: StabilizerGroup, f: StabilizerGroup,
              validate: bool = True) -> StabilizerGroup:
    """Generators of the subspace intersection of two groups.

    The intersection is taken over unsigned symplectic vectors; each
    returned generator carries the sign it has as an element of r.
    """
    if r.n != f.n:
        raise ValueError("dimension mismatch")
    if validate:
        for grp, name in ((r, "r"), (f, "f")):
            if grp.generators:
                xs = np.vstack([g.x for g in grp.generators])
                zs = np.vstack([g.z for g in grp.generators])
                if not _pairwise_commute(xs, zs):
                    raise ValueError(f"group {name} is not internally commuting")
    n_bits = 2 * gf2.WORD_BITS * gf2.n_words(r.n)
    basis = gf2.intersect_rowspaces(r.symplectic_matrix(), f.symplectic_matrix(),
                                    n_bits)
    out = []
    solver = _group_solver(r)
    for row in basis:
        idx = solver.solve(row)
        if idx is None:  # cannot happen: row lies in r's span by construction
            raise AssertionError("intersection vector not in r span")
        op = PauliOperator.identity(r.n)
        for j in idx:
            op = multiply(op, r.generators[j])
        out.append(op)
    return StabilizerGroup(r.n, out, validate=False)


def graph_state_group(n: int, edges: Iterable[tuple[int, int]]) -> StabilizerGroup:
    """Stabilizer group <X_v prod_{u in N(v)} Z_u> of a graph state."""
    neighbors: list[set[int]] = [set() for _ in range(n)]
    for a, b in edges:
        if a == b:
            raise ValueError("graph must be simple (self-loop found)")
        neighbors[a].add(b)
        neighbors[b].add(a)
    gens = [PauliOperator.from_support(n, xs=[v], zs=sorted(neighbors[v]))
            for v in range(n)]
    return StabilizerGroup(n, gens, validate=False)


def measure_project(group: StabilizerGroup, obs: PauliOperator,
                    sign: int = 1) -> StabilizerGroup:
    """Stabilizer group after projecting onto the `sign` eigenspace of obs."""
    if obs.n != group.n:
        raise ValueError("dimension mismatch")
    target = obs if sign == 1 else obs.negate()
    anti = [i for i, g in enumerate(group.generators) if not commutes(g, obs)]
    if not anti:
        dec = in_span(obs, group)
        if dec is not None and dec[1] != sign:
            raise ValueError("impossible outcome: opposite sign is fixed")
        if dec is None:
            # Observable independent and commuting: outcome random but the
            # post-measurement group gains the measured observable.
            return StabilizerGroup(group.n, list(group.generators) + [target],
                                   validate=False)
        return group
    pivot = group.generators[anti[0]]
    new_gens = []
    for i, g in enumerate(group.generators):
        if i == anti[0]:
            new_gens.append(target)
        elif i in anti:
            new_gens.append(multiply(g, pivot))
        else:
            new_gens.append(g)
    return StabilizerGroup(group.n, new_gens, validate=False)


def fusion_collapse(group: StabilizerGroup, qa: int, qb: int,
                    outcome: tuple[int, int] = (0, 0)) -> StabilizerGroup:
    """Project onto the fusion outcome for qubits (qa, qb), then drop them.

    The fusion measures X_a Z_b (eigenvalue (-1)^u) and Z_a X_b ((-1)^v).
    Returned group lives on the remaining n-2 qubits, original order kept.
    """
    n = group.n
    u, v = outcome
    obs1 = PauliOperator.from_support(n, xs=[qa], zs=[qb])
    obs2 = PauliOperator.from_support(n, xs=[qb], zs=[qa])
    g1 = measure_project(group, obs1, 1 - 2 * u)
    g2 = measure_project(g1, obs2, 1 - 2 * v)
    signed1 = obs1 if u == 0 else obs1.negate()
    signed2 = obs2 if v == 0 else obs2.negate()
    cleared = []
    for g in g2.generators:
        op = g
        if op.x_bit(qa) or op.z_bit(qa) or op.x_bit(qb) or op.z_bit(qb):
            # Restriction to {qa, qb} lies in <X_a Z_b, Z_a X_b>; clear it.
            if op.x_bit(qa):
                op = multiply(op, signed1)
            if op.z_bit(qa):
                op = multiply(op, signed2)
        if op.x_bit(qa) or op.z_bit(qa) or op.x_bit(qb) or op.z_bit(qb):
            raise AssertionError("support on fused qubits did not clear")
        cleared.append(op)
    keep = [q for q in range(n) if q not in (qa, qb)]
    ops = [op.restrict(keep) for op in cleared]
    # The two measured observables became the identity on `keep`; drop them.
    out = [op for op in ops if not op.is_identity_string]
    return StabilizerGroup(n - 2, out, validate=False)
