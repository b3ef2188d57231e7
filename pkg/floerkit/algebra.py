"""
Floerkit - Algebra Module

Exact linear algebra over F_2. Matrices are stored bit-packed, 64 columns
per machine word, so a row operation is a handful of XORs. Elimination is
deterministic: pivots are taken column by column, first nonzero row first.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from floerkit.config import BRUTE_FORCE_MAX_GENERATORS
from floerkit.errors import CompositionNonzero

logger = logging.getLogger(__name__)

WORD_BITS = 64


def _word_count(cols: int) -> int:
    return max(1, (cols + WORD_BITS - 1) // WORD_BITS)


@dataclass(frozen=True)
class BitMatrix:
    """Row-major bit-packed matrix over F_2"""

    rows: int
    cols: int
    words: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, _word_count(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        arr = np.asarray(dense, dtype=np.uint8) & 1
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {arr.shape}")
        rows, cols = arr.shape
        n_words = _word_count(cols)
        padded = np.zeros((rows, n_words * WORD_BITS), dtype=np.uint8)
        padded[:, :cols] = arr
        packed = np.packbits(padded, axis=1, bitorder="little")
        words = np.ascontiguousarray(packed).view("<u8").astype(np.uint64)
        return cls(rows, cols, words.reshape(rows, n_words))

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable[Tuple[int, int]]) -> "BitMatrix":
        """Builds a matrix from (row, col) positions; repeated positions cancel"""
        dense = np.zeros((rows, cols), dtype=np.uint8)
        for r, c in entries:
            dense[r, c] ^= 1
        return cls.from_dense(dense)

    def to_dense(self) -> np.ndarray:
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=np.uint8)
        raw = np.ascontiguousarray(self.words.astype("<u8")).view(np.uint8)
        bits = np.unpackbits(raw.reshape(self.rows, -1), axis=1, bitorder="little")
        return bits[:, :self.cols].copy()

    def get(self, row: int, col: int) -> int:
        word = self.words[row, col // WORD_BITS]
        return int((int(word) >> (col % WORD_BITS)) & 1)

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def is_zero(self) -> bool:
        return not self.words.any()

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        left = self.to_dense().astype(np.int64)
        right = other.to_dense().astype(np.int64)
        return BitMatrix.from_dense((left @ right) & 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and bool(
            np.array_equal(self.words, other.words)
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))


@dataclass(frozen=True)
class RowReduceResult:
    matrix: BitMatrix
    rank: int
    pivots: Tuple[int, ...]


def row_reduce(m: BitMatrix) -> RowReduceResult:
    """Reduced row echelon form with first-nonzero pivoting"""
    words = m.words.copy()
    pivots = []
    row = 0
    for col in range(m.cols):
        if row == m.rows:
            break
        w, mask = col // WORD_BITS, np.uint64(1 << (col % WORD_BITS))
        hits = np.nonzero(words[row:, w] & mask)[0]
        if hits.size == 0:
            continue
        pivot = row + int(hits[0])
        if pivot != row:
            words[[row, pivot]] = words[[pivot, row]]
        others = (words[:, w] & mask) != 0
        others[row] = False
        words[others] ^= words[row]
        pivots.append(col)
        row += 1
    return RowReduceResult(BitMatrix(m.rows, m.cols, words), len(pivots), tuple(pivots))


def f2_rank(m: BitMatrix) -> int:
    """Rank over F_2"""
    if m.rows == 0 or m.cols == 0:
        return 0
    return row_reduce(m).rank


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Rows span {v : m v = 0}, one row per free column"""
    reduced = row_reduce(m)
    dense = reduced.matrix.to_dense()
    pivot_set = set(reduced.pivots)
    free_cols = [c for c in range(m.cols) if c not in pivot_set]
    basis = np.zeros((len(free_cols), m.cols), dtype=np.uint8)
    for k, free in enumerate(free_cols):
        basis[k, free] = 1
        for r, p in enumerate(reduced.pivots):
            if dense[r, free]:
                basis[k, p] = 1
    return BitMatrix.from_dense(basis)


def image_basis(m: BitMatrix) -> BitMatrix:
    """Rows form a basis of the column space of m"""
    reduced = row_reduce(m.transpose())
    return BitMatrix.from_dense(reduced.matrix.to_dense()[:reduced.rank])


def solve(a: BitMatrix, b: Sequence[int]) -> Optional[np.ndarray]:
    """One solution x of a x = b (free variables set to 0), or None"""
    rhs = np.asarray(b, dtype=np.uint8).reshape(-1, 1) & 1
    if rhs.shape[0] != a.rows:
        raise ValueError(f"right-hand side has {rhs.shape[0]} entries, expected {a.rows}")
    augmented = BitMatrix.from_dense(np.concatenate([a.to_dense(), rhs], axis=1))
    reduced = row_reduce(augmented)
    if a.cols in reduced.pivots:
        return None
    dense = reduced.matrix.to_dense()
    x = np.zeros(a.cols, dtype=np.uint8)
    for r, p in enumerate(reduced.pivots):
        x[p] = dense[r, a.cols]
    return x


def _check_composable(d_in: Optional[BitMatrix], d_out: BitMatrix) -> BitMatrix:
    if d_in is None:
        return BitMatrix.zeros(d_out.cols, 0)
    if d_in.rows != d_out.cols:
        raise ValueError(
            f"d_in lands in dimension {d_in.rows} but d_out starts from {d_out.cols}"
        )
    return d_in


def chain_homology(d_in: Optional[BitMatrix], d_out: BitMatrix) -> int:
    """dim ker(d_out) - rank(d_in); the middle group has dimension d_out.cols"""
    d_in = _check_composable(d_in, d_out)
    if d_out.rows and d_in.cols and not (d_out @ d_in).is_zero():
        raise CompositionNonzero("d_out . d_in != 0 over F_2")
    return d_out.cols - f2_rank(d_out) - f2_rank(d_in)


def _column_masks(m: BitMatrix) -> List[int]:
    dense = m.to_dense()
    return [int(sum(int(bit) << r for r, bit in enumerate(dense[:, c]))) for c in range(m.cols)]


def brute_force_homology(d_in: Optional[BitMatrix], d_out: BitMatrix) -> int:
    """Counts cycles and boundaries by enumerating every chain"""
    d_in = _check_composable(d_in, d_out)
    if max(d_out.cols, d_in.cols) > BRUTE_FORCE_MAX_GENERATORS:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX_GENERATORS} generators")
    out_cols = _column_masks(d_out)
    in_cols = _column_masks(d_in)

    def apply(cols: List[int], bits: Tuple[int, ...]) -> int:
        image = 0
        for col, bit in zip(cols, bits):
            if bit:
                image ^= col
        return image

    cycles = sum(1 for v in product((0, 1), repeat=d_out.cols) if apply(out_cols, v) == 0)
    boundaries = {apply(in_cols, v) for v in product((0, 1), repeat=d_in.cols)}
    # both counts are powers of two
    return (cycles // len(boundaries)).bit_length() - 1


@dataclass
class HomologyBasis:
    """Cycle representatives of a homology group plus a boundary basis"""

    dimension: int
    representatives: np.ndarray
    boundaries: np.ndarray

    @property
    def rank(self) -> int:
        return self.representatives.shape[0]

    def coordinates(self, cycle: Sequence[int]) -> np.ndarray:
        """Coefficients of a cycle's class in terms of the representatives"""
        vec = np.asarray(cycle, dtype=np.uint8) & 1
        if self.rank == 0:
            return np.zeros(0, dtype=np.uint8)
        columns = np.concatenate([self.representatives, self.boundaries], axis=0).T
        x = solve(BitMatrix.from_dense(columns), vec)
        if x is None:
            raise ValueError("vector is not a cycle of this complex")
        return x[:self.rank]


def homology_basis(d_in: Optional[BitMatrix], d_out: BitMatrix) -> HomologyBasis:
    """Deterministic representatives: kernel vectors added in order if new mod boundaries"""
    d_in = _check_composable(d_in, d_out)
    n = d_out.cols
    boundary = image_basis(d_in).to_dense() if d_in.cols else np.zeros((0, n), dtype=np.uint8)
    cycles = kernel_basis(d_out).to_dense() if n else np.zeros((0, 0), dtype=np.uint8)
    chosen: List[np.ndarray] = []
    span = boundary.copy()
    current_rank = boundary.shape[0]
    for z in cycles:
        trial = np.vstack([span, z]) if span.size else z.reshape(1, -1)
        trial_rank = f2_rank(BitMatrix.from_dense(trial))
        if trial_rank > current_rank:
            chosen.append(z)
            span, current_rank = trial, trial_rank
    reps = np.array(chosen, dtype=np.uint8).reshape(len(chosen), n)
    return HomologyBasis(n, reps, boundary.reshape(-1, n))


@dataclass
class GradedHomology:
    """Ranks indexed by Maslov grading; zero ranks are never stored"""

    ranks: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        self.ranks = {int(d): int(r) for d, r in sorted(self.ranks.items()) if r}

    @property
    def total(self) -> int:
        return sum(self.ranks.values())

    def shifted(self, amount: int) -> "GradedHomology":
        return GradedHomology({d + amount: r for d, r in self.ranks.items()})

    def __str__(self) -> str:
        if not self.ranks:
            return "0"
        parts = []
        for d in sorted(self.ranks, reverse=True):
            r = self.ranks[d]
            parts.append(f"F_{d}" + (f"^{r}" if r > 1 else ""))
        return " + ".join(parts)

    def to_dict(self) -> Dict:
        return {str(d): r for d, r in sorted(self.ranks.items())}

    @classmethod
    def from_dict(cls, data: Dict) -> "GradedHomology":
        return cls({int(d): int(r) for d, r in data.items()})


def degree_blocks(
    degrees: Sequence[int], differential: BitMatrix
) -> Dict[int, Tuple[List[int], BitMatrix]]:
    """Splits a square differential (rows = targets) into degree-lowering blocks.

    Returns degree -> (indices of that degree, map to degree - 1).
    """
    by_degree: Dict[int, List[int]] = {}
    for idx, d in enumerate(degrees):
        by_degree.setdefault(d, []).append(idx)
    dense = differential.to_dense() if differential.rows else np.zeros((0, 0), dtype=np.uint8)
    blocks = {}
    for d, cols in by_degree.items():
        rows = by_degree.get(d - 1, [])
        block = dense[np.ix_(rows, cols)] if rows else np.zeros((0, len(cols)), dtype=np.uint8)
        blocks[d] = (cols, BitMatrix.from_dense(block))
    return blocks


def graded_homology(degrees: Sequence[int], differential: BitMatrix) -> GradedHomology:
    """Homology of a graded complex whose differential lowers degree by one"""
    blocks = degree_blocks(degrees, differential)
    ranks = {}
    for d, (_, d_out) in blocks.items():
        d_in = blocks[d + 1][1] if d + 1 in blocks else None
        ranks[d] = chain_homology(d_in, d_out)
    return GradedHomology(ranks)
