"""Tests for the bit-packed GF(2) layer against a plain list-of-lists oracle."""

from __future__ import annotations

import random

import pytest

from colexkit.gf2 import (
    BitMatrix,
    BitVec,
    LinSolver,
    in_span,
    intersection_basis,
    kernel_basis,
    rank,
    row_reduce,
    solve,
    span_equal,
    symplectic_commutator,
    transpose,
)


def oracle_rref(rows: list[list[int]]) -> list[list[int]]:
    """Reduced row echelon form by textbook elimination on dense lists."""
    m = [row[:] for row in rows]
    if not m:
        return []
    n_rows, n_cols = len(m), len(m[0])
    pivot_row = 0
    for col in range(n_cols - 1, -1, -1):  # high bit first, matching column order
        src = None
        for r in range(pivot_row, n_rows):
            if m[r][col]:
                src = r
                break
        if src is None:
            continue
        m[pivot_row], m[src] = m[src], m[pivot_row]
        for r in range(n_rows):
            if r != pivot_row and m[r][col]:
                m[r] = [a ^ b for a, b in zip(m[r], m[pivot_row])]
        pivot_row += 1
    return [row for row in m[:pivot_row] if any(row)]


def oracle_rank(rows: list[list[int]]) -> int:
    return len(oracle_rref(rows))


def as_matrix(rows: list[list[int]]) -> BitMatrix:
    return BitMatrix.from_lists(rows)


def random_rows(rng: random.Random, n: int, w: int) -> list[list[int]]:
    return [[rng.randint(0, 1) for _ in range(w)] for _ in range(n)]


def test_bitvec_basics():
    v = BitVec.from_indices(8, [0, 3, 7])
    assert v.weight == 3
    assert v.indices() == [0, 3, 7]
    assert v.bit(3) == 1 and v.bit(4) == 0
    assert len(v) == 8
    w = BitVec.from_bits([1, 1, 0, 0, 0, 0, 0, 1])
    assert (v ^ w).indices() == [1, 3]
    assert (v & w).indices() == [0, 7]
    assert v.overlap(w) == 2
    assert BitVec.zeros(5).is_zero


def test_bitvec_length_checks():
    with pytest.raises(ValueError):
        BitVec(0b100, 2)
    with pytest.raises(ValueError):
        BitVec.zeros(3) ^ BitVec.zeros(4)
    with pytest.raises(IndexError):
        BitVec.from_indices(4, [4])


def test_row_reduce_matches_oracle():
    rng = random.Random(11)
    for _ in range(300):
        n = rng.randint(0, 8)
        w = rng.randint(1, 12)
        rows = random_rows(rng, n, w)
        got = row_reduce(as_matrix(rows) if rows else BitMatrix.empty(w))
        want = oracle_rref(rows)
        got_lists = [got.row(i).to_list() for i in range(got.n_rows)]
        assert sorted(got_lists) == sorted(want)
        assert row_reduce(got) == got  # idempotent


def test_rank_nullity():
    rng = random.Random(12)
    for _ in range(200):
        n = rng.randint(1, 9)
        w = rng.randint(1, 12)
        m = as_matrix(random_rows(rng, n, w))
        r = rank(m)
        assert r == oracle_rank([m.row(i).to_list() for i in range(n)])
        assert r + kernel_basis(m).n_rows == w


def test_kernel_is_orthogonal_complement():
    rng = random.Random(13)
    for _ in range(200):
        m = as_matrix(random_rows(rng, rng.randint(1, 8), rng.randint(1, 12)))
        ker = kernel_basis(m)
        for kv in ker.vectors():
            for row in m.vectors():
                assert row.overlap(kv) % 2 == 0
        assert rank(ker) == ker.n_rows


def test_solve_tiny_example():
    m = BitMatrix.from_lists([[1, 0], [0, 1]])
    x = solve(m, BitVec.from_bits([1, 1]))
    assert x is not None and x.to_list() == [1, 1]


def test_symplectic_examples():
    x = BitVec.from_bits([1, 1, 0])
    z = BitVec.from_bits([1, 1, 1])
    assert symplectic_commutator(x, z) == 1
    assert symplectic_commutator(x, BitVec.from_bits([1, 0, 0])) == -1


def test_solve_roundtrip_and_infeasible():
    rng = random.Random(14)
    n_solved = n_failed = 0
    for _ in range(400):
        n = rng.randint(1, 9)
        w = rng.randint(1, 12)
        m = as_matrix(random_rows(rng, n, w))
        b = BitVec(rng.getrandbits(w), w)
        x = solve(m, b)
        if x is None:
            assert not in_span(m, b)
            n_failed += 1
        else:
            acc = BitVec.zeros(w)
            for i in x.indices():
                acc = acc ^ m.row(i)
            assert acc == b
            assert in_span(m, b)
            n_solved += 1
    assert n_solved > 50 and n_failed > 50


def test_solve_canonical():
    # Dependent rows: the canonical solution must be reproducible.
    m = BitMatrix.from_lists([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    b = BitVec.from_bits([1, 0, 1])
    x1 = solve(m, b)
    x2 = solve(m, b)
    assert x1 == x2 and x1 is not None


def test_symplectic_bilinearity():
    rng = random.Random(15)
    for _ in range(200):
        w = rng.randint(1, 16)
        x1 = BitVec(rng.getrandbits(w), w)
        x2 = BitVec(rng.getrandbits(w), w)
        z = BitVec(rng.getrandbits(w), w)
        lhs = symplectic_commutator(x1 ^ x2, z)
        rhs = symplectic_commutator(x1, z) * symplectic_commutator(x2, z)
        assert lhs == rhs


def test_transpose_involution():
    rng = random.Random(16)
    for _ in range(50):
        m = as_matrix(random_rows(rng, rng.randint(1, 6), rng.randint(1, 9)))
        tt = transpose(transpose(m))
        assert tt == m


def test_span_equal():
    a = BitMatrix.from_lists([[1, 1, 0], [0, 1, 1]])
    b = BitMatrix.from_lists([[1, 0, 1], [0, 1, 1], [1, 1, 0]])
    assert span_equal(a, b)
    c = BitMatrix.from_lists([[1, 0, 0]])
    assert not span_equal(a, c)


def test_intersection_basis():
    rng = random.Random(17)
    for _ in range(120):
        w = rng.randint(2, 10)
        a = as_matrix(random_rows(rng, rng.randint(1, 6), w))
        b = as_matrix(random_rows(rng, rng.randint(1, 6), w))
        inter = intersection_basis(a, b)
        for v in inter.vectors():
            assert in_span(a, v) and in_span(b, v)
        # Dimension check: dim(A) + dim(B) = dim(A+B) + dim(A & B).
        stacked = BitMatrix(list(a.rows) + list(b.rows), w)
        assert rank(a) + rank(b) == rank(stacked) + inter.n_rows


def test_linsolver_matches_solve():
    rng = random.Random(18)
    for _ in range(100):
        n = rng.randint(1, 9)
        w = rng.randint(1, 12)
        m = as_matrix(random_rows(rng, n, w))
        sv = LinSolver(m)
        assert sv.rank == rank(m)
        for _ in range(10):
            b = BitVec(rng.getrandbits(w), w)
            assert sv.solve(b) == solve(m, b)
            assert sv.in_rowspace(b) == in_span(m, b)


def test_in_span_exhaustive_small():
    m = BitMatrix.from_lists([[1, 1, 0, 0], [0, 0, 1, 1]])
    members = {0b0000, 0b0011, 0b1100, 0b1111}
    for bits in range(16):
        assert in_span(m, BitVec(bits, 4)) == (bits in members)
