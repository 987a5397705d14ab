"""Bit-packed linear algebra over GF(2).

Vectors and matrix rows are Python integers used as bit masks, so xor, and,
popcount are single machine operations per word. Everything here is exact.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence


class BitVec:
    """A fixed-length vector over GF(2), packed into one int."""

    __slots__ = ("bits", "length")

    def __init__(self, bits: int, length: int):
        if length < 0:
            raise ValueError("length must be nonnegative")
        if bits < 0 or bits >> length:
            raise ValueError("bits out of range for length")
        self.bits = bits
        self.length = length

    @classmethod
    def zeros(cls, length: int) -> "BitVec":
        return cls(0, length)

    @classmethod
    def from_indices(cls, length: int, indices: Iterable[int]) -> "BitVec":
        bits = 0
        for i in indices:
            if not 0 <= i < length:
                raise IndexError(f"index {i} out of range for length {length}")
            bits |= 1 << i
        return cls(bits, length)

    @classmethod
    def from_bits(cls, values: Sequence[int]) -> "BitVec":
        bits = 0
        for i, v in enumerate(values):
            if v & 1:
                bits |= 1 << i
        return cls(bits, len(values))

    def _check(self, other: "BitVec") -> None:
        if self.length != other.length:
            raise ValueError(f"length mismatch: {self.length} != {other.length}")

    def __xor__(self, other: "BitVec") -> "BitVec":
        self._check(other)
        return BitVec(self.bits ^ other.bits, self.length)

    def __and__(self, other: "BitVec") -> "BitVec":
        self._check(other)
        return BitVec(self.bits & other.bits, self.length)

    def __or__(self, other: "BitVec") -> "BitVec":
        self._check(other)
        return BitVec(self.bits | other.bits, self.length)

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def overlap(self, other: "BitVec") -> int:
        """Size of the intersection of supports."""
        self._check(other)
        return (self.bits & other.bits).bit_count()

    def bit(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def indices(self) -> list[int]:
        out = []
        b = self.bits
        while b:
            low = b & -b
            out.append(low.bit_length() - 1)
            b ^= low
        return out

    @property
    def is_zero(self) -> bool:
        return self.bits == 0

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVec):
            return NotImplemented
        return self.bits == other.bits and self.length == other.length

    def __hash__(self) -> int:
        return hash((self.bits, self.length))

    def __repr__(self) -> str:
        return f"BitVec({bin(self.bits)}, length={self.length})"

    def to_list(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.length)]


class BitMatrix:
    """A list of GF(2) row vectors of common width."""

    __slots__ = ("rows", "width")

    def __init__(self, rows: Sequence[int], width: int):
        for r in rows:
            if r < 0 or r >> width:
                raise ValueError("row out of range for width")
        self.rows = list(rows)
        self.width = width

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVec]) -> "BitMatrix":
        if not vectors:
            raise ValueError("cannot infer width from an empty vector list")
        width = vectors[0].length
        for v in vectors:
            if v.length != width:
                raise ValueError("mixed vector lengths")
        return cls([v.bits for v in vectors], width)

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        if not rows:
            raise ValueError("cannot infer width from an empty row list")
        width = len(rows[0])
        packed = []
        for row in rows:
            if len(row) != width:
                raise ValueError("ragged rows")
            bits = 0
            for i, v in enumerate(row):
                if v & 1:
                    bits |= 1 << i
            packed.append(bits)
        return cls(packed, width)

    @classmethod
    def empty(cls, width: int) -> "BitMatrix":
        return cls([], width)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def row(self, i: int) -> BitVec:
        return BitVec(self.rows[i], self.width)

    def vectors(self) -> Iterator[BitVec]:
        for r in self.rows:
            yield BitVec(r, self.width)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.width == other.width and self.rows == other.rows

    def __repr__(self) -> str:
        return f"BitMatrix({self.n_rows} x {self.width})"


def _reduce_rows(rows: Sequence[int]) -> tuple[list[int], list[int]]:
    """Gaussian elimination to reduced row echelon form on int rows.

    Returns (nonzero reduced rows, pivot columns), both sorted so the row with
    the highest pivot bit comes first. Column i is bit i.
    """
    basis: list[int] = []
    for r in rows:
        for b in basis:
            h = 1 << (b.bit_length() - 1)
            if r & h:
                r ^= b
        if r:
            h = 1 << (r.bit_length() - 1)
            for i, b in enumerate(basis):
                if b & h:
                    basis[i] = b ^ r
            basis.append(r)
    basis.sort(reverse=True)
    pivots = [b.bit_length() - 1 for b in basis]
    return basis, pivots


def row_reduce(m: BitMatrix) -> BitMatrix:
    """Reduced row echelon form; zero rows dropped. Idempotent."""
    basis, _ = _reduce_rows(m.rows)
    return BitMatrix(basis, m.width)


def rank(m: BitMatrix) -> int:
    return len(_reduce_rows(m.rows)[0])


def in_span(m: BitMatrix, v: BitVec) -> bool:
    if v.length != m.width:
        raise ValueError("vector length does not match matrix width")
    basis, _ = _reduce_rows(m.rows)
    r = v.bits
    for b in basis:
        h = 1 << (b.bit_length() - 1)
        if r & h:
            r ^= b
    return r == 0


def solve(m: BitMatrix, b: BitVec) -> BitVec | None:
    """Find x with x . m = b (a GF(2) combination of the rows of m), or None.

    Free coefficients are set to 0, so the answer is canonical for a given
    row order. x has one bit per row of m.
    """
    if b.length != m.width:
        raise ValueError("target length does not match matrix width")
    n = m.n_rows
    # Augment each row with a tag recording which original rows produced it.
    w = m.width
    aug = [(m.rows[i] << n) | (1 << i) for i in range(n)]
    basis: list[int] = []
    for r in aug:
        for bb in basis:
            h = 1 << (bb.bit_length() - 1)
            if r & h:
                r ^= bb
        if r >> n:  # nonzero in the matrix part
            h = 1 << (r.bit_length() - 1)
            for i, bb in enumerate(basis):
                if bb & h:
                    basis[i] = bb ^ r
            basis.append(r)
    t = b.bits << n
    for bb in basis:
        h = 1 << (bb.bit_length() - 1)
        if t & h:
            t ^= bb
    if t >> n:
        return None
    return BitVec(t & ((1 << n) - 1), n)


class LinSolver:
    """Repeated solves against one matrix: the augmented reduction is built
    once and each query is a single elimination sweep.

    Solves x . m = b like :func:`solve`, with the same canonical answer.
    """

    __slots__ = ("n_rows", "width", "_basis")

    def __init__(self, m: BitMatrix):
        self.n_rows = m.n_rows
        self.width = m.width
        n = m.n_rows
        basis: list[int] = []
        for i in range(n):
            r = (m.rows[i] << n) | (1 << i)
            for bb in basis:
                h = 1 << (bb.bit_length() - 1)
                if r & h:
                    r ^= bb
            if r >> n:
                h = 1 << (r.bit_length() - 1)
                for j, bb in enumerate(basis):
                    if bb & h:
                        basis[j] = bb ^ r
                basis.append(r)
        self._basis = basis

    @property
    def rank(self) -> int:
        return len(self._basis)

    def solve(self, b: BitVec) -> BitVec | None:
        if b.length != self.width:
            raise ValueError("target length does not match matrix width")
        n = self.n_rows
        t = b.bits << n
        for bb in self._basis:
            h = 1 << (bb.bit_length() - 1)
            if t & h:
                t ^= bb
        if t >> n:
            return None
        return BitVec(t & ((1 << n) - 1), n)

    def in_rowspace(self, b: BitVec) -> bool:
        return self.solve(b) is not None


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Basis of the right kernel: all v with (row . v) = 0 for every row.

    Equivalently the orthocomplement of the row space under the dot product.
    """
    w = m.width
    basis, pivots = _reduce_rows(m.rows)
    pivot_set = set(pivots)
    free = [i for i in range(w) if i not in pivot_set]
    out = []
    for f in free:
        v = 1 << f
        for brow, p in zip(basis, pivots):
            if (brow >> f) & 1:
                v |= 1 << p
        out.append(v)
    out.sort(reverse=True)
    return BitMatrix(out, w)


def transpose(m: BitMatrix) -> BitMatrix:
    cols = []
    for j in range(m.width):
        c = 0
        for i, r in enumerate(m.rows):
            if (r >> j) & 1:
                c |= 1 << i
        cols.append(c)
    return BitMatrix(cols, m.n_rows)


def symplectic_commutator(x: BitVec, z: BitVec) -> int:
    """+1 if the X-type and Z-type operators commute, -1 if they anticommute."""
    if x.length != z.length:
        raise ValueError("length mismatch")
    return -1 if (x.bits & z.bits).bit_count() & 1 else 1


def span_equal(a: BitMatrix, b: BitMatrix) -> bool:
    if a.width != b.width:
        raise ValueError("width mismatch")
    return _reduce_rows(a.rows)[0] == _reduce_rows(b.rows)[0]


def intersection_basis(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Basis of rowspace(a) & rowspace(b) via the kernel of the stacked system."""
    if a.width != b.width:
        raise ValueError("width mismatch")
    ra, _ = _reduce_rows(a.rows)
    rb, _ = _reduce_rows(b.rows)
    na, nb = len(ra), len(rb)
    if na == 0 or nb == 0:
        return BitMatrix.empty(a.width)
    # Coefficient vectors (u, v) with u.a = v.b live in the kernel of the
    # transpose of [a; b] stacked as columns; extract u.a for each.
    stacked = BitMatrix(ra + rb, a.width)
    ker = kernel_basis(transpose(stacked))
    out = []
    for kv in ker.rows:
        u = kv & ((1 << na) - 1)
        vec = 0
        for i in range(na):
            if (u >> i) & 1:
                vec ^= ra[i]
        if vec:
            out.append(vec)
    basis, _ = _reduce_rows(out)
    return BitMatrix(basis, a.width)
