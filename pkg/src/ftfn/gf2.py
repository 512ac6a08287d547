"""Bit-packed GF(2) linear algebra.

Vectors are stored as rows of uint64 words (bit b of a vector lives in
word b // 64, position b % 64).  Everything here is plain row reduction;
the packing exists so that elimination on a few-thousand-bit foliated
network stays cheap.
"""

from __future__ import annotations

import numpy as np
from numba import njit

WORD_BITS = 64


def n_words(n_bits: int) -> int:
    return max(1, (n_bits + WORD_BITS - 1) // WORD_BITS)


def zeros(n_rows: int, n_bits: int) -> np.ndarray:
    return np.zeros((n_rows, n_words(n_bits)), dtype=np.uint64)


def get_bit(row: np.ndarray, b: int) -> int:
    return int((row[b // WORD_BITS] >> np.uint64(b % WORD_BITS)) & np.uint64(1))


def set_bit(row: np.ndarray, b: int, value: int = 1) -> None:
    mask = np.uint64(1) << np.uint64(b % WORD_BITS)
    if value:
        row[b // WORD_BITS] |= mask
    else:
        row[b // WORD_BITS] &= ~mask


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 vector (length n) into a uint64 word row."""
    bits = np.asarray(bits, dtype=np.uint8)
    row = np.zeros(n_words(len(bits)), dtype=np.uint64)
    for b in np.nonzero(bits)[0]:
        set_bit(row, int(b))
    return row


def unpack_bits(row: np.ndarray, n_bits: int) -> np.ndarray:
    out = np.zeros(n_bits, dtype=np.uint8)
    for b in range(n_bits):
        out[b] = get_bit(row, b)
    return out


def popcount_rows(mat: np.ndarray) -> np.ndarray:
    """Number of set bits per row."""
    return np.bitwise_count(mat).sum(axis=1).astype(np.int64)


@njit(cache=True)
def _rref_inplace(mat: np.ndarray, n_bits: int) -> np.ndarray:
    """Reduced row echelon form over GF(2), in place.

    Returns the pivot column of each of the first `rank` rows; rows are
    permuted so pivot rows come first in column order.
    """
    n_rows = mat.shape[0]
    pivots = np.empty(min(n_rows, n_bits), dtype=np.int64)
    rank = 0
    for col in range(n_bits):
        w = col // WORD_BITS
        mask = np.uint64(1) << np.uint64(col % WORD_BITS)
        pivot = -1
        for r in range(rank, n_rows):
            if mat[r, w] & mask:
                pivot = r
                break
        if pivot < 0:
            continue
        if pivot != rank:
            for k in range(mat.shape[1]):
                tmp = mat[rank, k]
                mat[rank, k] = mat[pivot, k]
                mat[pivot, k] = tmp
        for r in range(n_rows):
            if r != rank and (mat[r, w] & mask):
                for k in range(mat.shape[1]):
                    mat[r, k] ^= mat[rank, k]
        pivots[rank] = col
        rank += 1
        if rank == n_rows:
            break
    return pivots[:rank]


def rref(mat: np.ndarray, n_bits: int) -> tuple[np.ndarray, np.ndarray]:
    """RREF of a packed matrix. Returns (reduced copy, pivot columns)."""
    work = mat.copy()
    pivots = _rref_inplace(work, n_bits)
    return work, pivots


@njit(cache=True)
def _reduce_row(row: np.ndarray, mat: np.ndarray, pivots: np.ndarray) -> None:
    """XOR echelon rows of `mat` into `row` to clear its pivot columns."""
    for i in range(len(pivots)):
        col = pivots[i]
        w = col // WORD_BITS
        mask = np.uint64(1) << np.uint64(col % WORD_BITS)
        if row[w] & mask:
            for k in range(mat.shape[1]):
                row[k] ^= mat[i, k]


class Solver:
    """Factored GF(2) row space of a matrix, for repeated membership solves.

    Keeps an RREF of [A | I] so that `solve(v)` returns the combination of
    original rows of A reproducing v, or None if v is outside the span.
    """

    def __init__(self, mat: np.ndarray, n_bits: int):
        n_rows = mat.shape[0]
        self.n_bits = n_bits
        self.n_rows = n_rows
        self._main_words = n_words(n_bits)
        aug = np.zeros((n_rows, self._main_words + n_words(max(1, n_rows))), dtype=np.uint64)
        aug[:, : mat.shape[1]] = mat
        for r in range(n_rows):
            set_bit(aug[r, self._main_words :], r)
        self._aug = aug
        # Pivot only on the main columns; the tail records row combinations.
        self._pivots = _rref_inplace_cols(aug, n_bits)

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def solve(self, vec: np.ndarray) -> np.ndarray | None:
        """Return sorted indices of original rows XOR-ing to vec, else None."""
        row = np.zeros(self._aug.shape[1], dtype=np.uint64)
        row[: self._main_words] = vec[: self._main_words]
        _reduce_row(row, self._aug, self._pivots)
        if np.any(row[: self._main_words]):
            return None
        combo = row[self._main_words :]
        return np.array(
            [r for r in range(self.n_rows) if get_bit(combo, r)], dtype=np.int64
        )

    def contains(self, vec: np.ndarray) -> bool:
        return self.solve(vec) is not None


@njit(cache=True)
def _rref_inplace_cols(mat: np.ndarray, n_bits: int) -> np.ndarray:
    """RREF restricted to pivoting on the first n_bits columns."""
    n_rows = mat.shape[0]
    pivots = np.empty(min(n_rows, n_bits), dtype=np.int64)
    rank = 0
    for col in range(n_bits):
        w = col // WORD_BITS
        mask = np.uint64(1) << np.uint64(col % WORD_BITS)
        pivot = -1
        for r in range(rank, n_rows):
            if mat[r, w] & mask:
                pivot = r
                break
        if pivot < 0:
            continue
        if pivot != rank:
            for k in range(mat.shape[1]):
                tmp = mat[rank, k]
                mat[rank, k] = mat[pivot, k]
                mat[pivot, k] = tmp
        for r in range(n_rows):
            if r != rank and (mat[r, w] & mask):
                for k in range(mat.shape[1]):
                    mat[r, k] ^= mat[rank, k]
        pivots[rank] = col
        rank += 1
        if rank == n_rows:
            break
    return pivots[:rank]


def rank(mat: np.ndarray, n_bits: int) -> int:
    return len(rref(mat, n_bits)[1])


def intersect_rowspaces(a: np.ndarray, b: np.ndarray, n_bits: int) -> np.ndarray:
    """Basis of rowspace(a) ∩ rowspace(b) via the Zassenhaus block trick.

    Rows of the returned matrix are packed vectors of n_bits.
    """
    w = n_words(n_bits)
    na, nb = a.shape[0], b.shape[0]
    block = np.zeros((na + nb, 2 * w), dtype=np.uint64)
    block[:na, :w] = a[:, :w]
    block[:na, w:] = a[:, :w]
    block[na:, :w] = b[:, :w]
    # Left half spans a+b; rows whose left half vanishes have right half in a∩b.
    work = block.copy()
    # Eliminate using left columns first, then read off pure-right rows.
    _rref_inplace(work, 2 * WORD_BITS * w)
    out = []
    for r in range(work.shape[0]):
        if not np.any(work[r, :w]) and np.any(work[r, w:]):
            out.append(work[r, w:].copy())
    if not out:
        return np.zeros((0, w), dtype=np.uint64)
    return np.vstack(out)


def null_space_combos(mat: np.ndarray, n_bits: int) -> np.ndarray:
    """Combination vectors c (rows, packed over mat's row indices) with
    c·mat = 0.  Used to find dependencies among rows."""
    n_rows = mat.shape[0]
    w = n_words(n_bits)
    wc = n_words(max(1, n_rows))
    aug = np.zeros((n_rows, w + wc), dtype=np.uint64)
    aug[:, :w] = mat[:, :w]
    for r in range(n_rows):
        set_bit(aug[r, w:], r)
    pivots = _rref_inplace_cols(aug, n_bits)
    rank_ = len(pivots)
    out = []
    for r in range(rank_, n_rows):
        if not np.any(aug[r, :w]):
            out.append(aug[r, w:].copy())
    if not out:
        return np.zeros((0, wc), dtype=np.uint64)
    return np.vstack(out)
