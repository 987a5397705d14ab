"""Clifford propagation maps checked against conjugation and the statevector oracle."""

from __future__ import annotations

import random

import numpy as np
import pytest

from colexkit import statevec as sv
from colexkit import tga
from colexkit.cliffprop import (
    CNot,
    FacetCP,
    FacetP,
    FacetSystem,
    PropagationError,
    StandardP,
    conjugate_pauli,
    joint_syndrome,
    reconstruct_propagated,
    syndrome_map,
)
from colexkit.code import (
    CssCode,
    PauliOp,
    branching_points,
    endpoints_on_facet,
    syndrome,
)
from colexkit.colex import Color, build_tetra15, build_torus_colex
from colexkit.gf2 import BitVec, in_span

CODE_A = CssCode(build_tetra15())
CODE_B = CssCode(build_tetra15())
PAT = tga.tetra15_pattern()
N = CODE_A.n

STD = StandardP(CODE_A, PAT)
FAC = FacetP(CODE_A, Color.K2, PAT)
CP = FacetCP(CODE_A, CODE_B, Color.K1, Color.K1)
CN = CNot(CODE_A, CODE_B)


def rand_op(rng: random.Random, n: int) -> PauliOp:
    return PauliOp(BitVec(rng.getrandbits(n), n), BitVec(rng.getrandbits(n), n))


def test_standard_p_conjugation_rule():
    for face in CODE_A.colex.faces:
        p = PauliOp.x_op(N, face.qubits)
        out = conjugate_pauli(STD, p)
        assert out.x.bits == p.x.bits
        assert out.z.bits == p.x.bits
    rng = random.Random(11)
    for _ in range(100):
        p = rand_op(rng, N)
        out = conjugate_pauli(STD, p)
        assert out.x.bits == p.x.bits
        assert out.z.bits == p.z.bits ^ p.x.bits


def test_facet_p_conjugation_rule():
    mask = FAC.facet.mask
    rng = random.Random(12)
    for _ in range(100):
        p = rand_op(rng, N)
        out = conjugate_pauli(FAC, p)
        assert out.x.bits == p.x.bits
        assert out.z.bits == p.z.bits ^ (p.x.bits & mask)
    away = PauliOp.x_op(N, [q for q in range(N) if not mask >> q & 1][:3])
    assert conjugate_pauli(FAC, away) == away


def test_diagonal_gates_leave_z_errors_alone():
    rng = random.Random(13)
    for _ in range(50):
        p = PauliOp(BitVec.zeros(N), BitVec(rng.getrandbits(N), N))
        assert conjugate_pauli(STD, p) == p
        assert conjugate_pauli(FAC, p) == p
        pj = PauliOp(BitVec.zeros(2 * N), BitVec(rng.getrandbits(2 * N), 2 * N))
        assert conjugate_pauli(CP, pj) == pj


def test_cnot_copies_both_ways():
    p = PauliOp.x_op(2 * N, [3])
    out = conjugate_pauli(CN, p)
    assert out.x.bits == (1 << 3) | (1 << (N + 3))
    assert out.z.is_zero
    p = PauliOp.z_op(2 * N, [N + 5])
    out = conjugate_pauli(CN, p)
    assert out.z.bits == (1 << (N + 5)) | (1 << 5)
    assert out.x.is_zero
    p = rand_op(random.Random(14), 2 * N)
    assert conjugate_pauli(CN, conjugate_pauli(CN, p)) == p


def test_facet_cp_adds_z_on_partner_facet():
    mask_a = CP.facet_a.mask
    p = PauliOp.x_op(2 * N, [next(iter(CP.facet_a.qubits))])
    out = conjugate_pauli(CP, p)
    assert out.x.bits == p.x.bits
    partner = dict(CP.qubit_pairs)[next(iter(CP.facet_a.qubits))]
    assert out.z.bits == 1 << (N + partner)
    off = PauliOp.x_op(2 * N, [q for q in range(N) if not mask_a >> q & 1][:2])
    assert conjugate_pauli(CP, off) == off


def test_syndrome_map_formulas():
    rng = random.Random(21)
    for _ in range(60):
        p = PauliOp(BitVec(rng.getrandbits(N), N), BitVec(rng.getrandbits(N), N))
        s = syndrome(CODE_A, p)
        br = branching_points(CODE_A, s.flux)
        ends = endpoints_on_facet(CODE_A, s.flux, FAC.facet)
        mapped = syndrome_map(STD, s)
        assert mapped.flux == s.flux and mapped.charge == s.charge ^ br
        mapped = syndrome_map(FAC, s)
        assert mapped.flux == s.flux and mapped.charge == s.charge ^ ends


def test_syndrome_map_matches_conjugation_single_code():
    ops = [PauliOp.x_op(N, [q]) for q in range(N)]
    ops += [PauliOp.z_op(N, [q]) for q in range(N)]
    rng = random.Random(22)
    ops += [rand_op(rng, N) for _ in range(300)]
    for gate in (STD, FAC):
        for p in ops:
            want = syndrome(gate.code, conjugate_pauli(gate, p))
            assert syndrome_map(gate, syndrome(gate.code, p)) == want


def test_syndrome_map_matches_conjugation_joint():
    ops = [PauliOp.x_op(2 * N, [q]) for q in range(2 * N)]
    ops += [PauliOp.z_op(2 * N, [q]) for q in range(2 * N)]
    rng = random.Random(23)
    ops += [rand_op(rng, 2 * N) for _ in range(300)]
    for gate in (CP, CN):
        for p in ops:
            want = joint_syndrome(gate, conjugate_pauli(gate, p))
            assert syndrome_map(gate, joint_syndrome(gate, p)) == want


def test_standard_p_is_logical_p():
    report = sv.diagonal_logical_action(CODE_A, STD.t_exponents())
    assert report.name == "P"
    assert report.deviation < 1e-10
    assert report.leakage < 1e-12


def test_facet_p_is_logical_p_on_every_facet():
    for color in Color:
        gate = FacetP(CODE_A, color, PAT)
        report = sv.diagonal_logical_action(CODE_A, gate.t_exponents())
        assert report.name == "P", f"facet {color}: got {report.name}"
        assert report.deviation < 1e-10
        assert report.leakage < 1e-12


def test_facet_p_exponents_live_on_facet():
    for color in Color:
        gate = FacetP(CODE_A, color, PAT)
        mask = gate.facet.mask
        for q, e in enumerate(gate.t_exponents()):
            assert (e != 0) == bool(mask >> q & 1)
            assert e % 2 == 0


def test_facet_cp_is_logical_cp_on_facet_codes():
    fs_a = FacetSystem(CODE_A, Color.K1)
    fs_b = FacetSystem(CODE_B, Color.K1)
    assert fs_a.n == 7 and fs_a.n_logical == 1
    a0, a1 = sv.logical_basis(fs_a)
    b0, b1 = sv.logical_basis(fs_b)
    loc_a = {pq: i for i, pq in enumerate(fs_a.qubit_map)}
    loc_b = {pq: i for i, pq in enumerate(fs_b.qubit_map)}
    pairs = [(loc_a[qa], fs_a.n + loc_b[qb]) for qa, qb in CP.qubit_pairs]
    basis = [sv.tensor(a0, b0), sv.tensor(a1, b0), sv.tensor(a0, b1), sv.tensor(a1, b1)]
    mat = np.zeros((4, 4), dtype=complex)
    for j, inp in enumerate(basis):
        out = sv.apply_cz_pairs(inp, pairs)
        for i, ref in enumerate(basis):
            mat[i, j] = np.vdot(ref, out)
    mat /= mat[0, 0]
    assert np.max(np.abs(mat - np.diag([1, 1, 1, -1]))) < 1e-12


def test_reconstruct_single_qubit_agrees_up_to_stabilizer():
    for gate in (STD, FAC):
        for q in range(N):
            p = PauliOp.x_op(N, [q])
            rec = reconstruct_propagated(gate, p)
            conj = conjugate_pauli(gate, p)
            assert in_span(gate.code.sx, rec.x ^ conj.x)
            assert in_span(gate.code.sz, rec.z ^ conj.z)


def test_reconstruct_stabilizer_returns_stabilizer():
    for p in (
        PauliOp(BitVec(CODE_A.sx.rows[0], N), BitVec.zeros(N)),
        PauliOp(BitVec.zeros(N), BitVec(CODE_A.sz.rows[0], N)),
    ):
        rec = reconstruct_propagated(STD, p)
        assert in_span(CODE_A.sx, rec.x)
        assert in_span(CODE_A.sz, rec.z)


def test_reconstruct_joint_gates():
    rng = random.Random(31)
    for gate in (CP, CN):
        for _ in range(25):
            qs = rng.sample(range(2 * N), 2)
            p = PauliOp.x_op(2 * N, qs)
            rec = reconstruct_propagated(gate, p)
            assert joint_syndrome(gate, rec) == syndrome_map(gate, joint_syndrome(gate, p))


def test_reconstruct_is_additive_up_to_stabilizer():
    p1 = PauliOp.x_op(N, [0])
    p2 = PauliOp.x_op(N, [9])
    whole = reconstruct_propagated(STD, p1.compose(p2))
    parts = reconstruct_propagated(STD, p1).compose(reconstruct_propagated(STD, p2))
    assert in_span(CODE_A.sx, whole.x ^ parts.x)
    assert in_span(CODE_A.sz, whole.z ^ parts.z)


def test_reconstruct_rejects_logical_support():
    facet = CODE_A.colex.facets[0]
    p = PauliOp.x_op(N, facet.qubits)
    with pytest.raises(PropagationError):
        reconstruct_propagated(STD, p)


def test_gates_reject_malformed_inputs():
    with pytest.raises(PropagationError):
        conjugate_pauli(STD, PauliOp.x_op(2 * N, [0]))
    with pytest.raises(PropagationError):
        conjugate_pauli(CN, PauliOp.x_op(N, [0]))
    with pytest.raises(PropagationError):
        reconstruct_propagated(CN, PauliOp.x_op(N, [0]))


def test_cnot_requires_identical_structure():
    torus = CssCode(build_torus_colex(2))
    with pytest.raises(PropagationError):
        CNot(CODE_A, torus)


def test_facet_cp_rejects_bad_pairing():
    qubits = sorted(CODE_A.colex.facet_of_color(Color.K1).qubits)
    swapped = list(zip(qubits, qubits))
    swapped[0] = (qubits[0], qubits[1])
    swapped[1] = (qubits[1], qubits[0])
    with pytest.raises(PropagationError):
        FacetCP(CODE_A, CODE_B, Color.K1, Color.K1, qubit_pairs=tuple(swapped))
    short = tuple(zip(qubits[:-1], qubits[:-1]))
    with pytest.raises(PropagationError):
        FacetCP(CODE_A, CODE_B, Color.K1, Color.K1, qubit_pairs=short)


def test_gate_kinds():
    assert STD.kind == "standard-P"
    assert FAC.kind == "facet-P"
    assert CP.kind == "facet-CP"
    assert CN.kind == "CNot"
