"""Statevector oracle: gates, logical basis, channels, check expectations."""

from __future__ import annotations

import random

import numpy as np
import pytest

from colexkit.code import CssCode, PauliOp, syndrome
from colexkit.colex import build_tetra15
from colexkit.gf2 import BitVec, row_reduce
from colexkit.statevec import (
    Mixture,
    StatevecError,
    apply_cnot,
    apply_cz_pairs,
    apply_diagonal,
    apply_transversal_T,
    apply_x_mask,
    apply_z_mask,
    basis_state,
    conjugated_check_expectation,
    depolarize_sx,
    diagonal_leakage,
    diagonal_logical_action,
    encoded_inputs,
    logical_action_check,
    logical_basis,
    mixture_trace_distance,
    residual_diagonal_fit,
    tensor,
    theorem1_check,
)
from colexkit.tga import TPattern, group_G, is_tolerable, tetra15_pattern

CODE = CssCode(build_tetra15())
PAT = tetra15_pattern()
N = CODE.n


def rand_state(rng: random.Random, n: int) -> np.ndarray:
    re = np.array([rng.gauss(0, 1) for _ in range(1 << n)])
    im = np.array([rng.gauss(0, 1) for _ in range(1 << n)])
    psi = re + 1j * im
    return psi / np.linalg.norm(psi)


def test_small_system_gate_semantics():
    # qubit 0 is the least significant index bit
    s = basis_state(2, 0b00)
    assert np.argmax(np.abs(apply_x_mask(s, 0b01))) == 0b01
    assert np.argmax(np.abs(apply_x_mask(s, 0b10))) == 0b10
    # Z phases only set bits
    t = apply_z_mask(basis_state(2, 0b01), 0b01)
    assert t[0b01] == -1
    t = apply_z_mask(basis_state(2, 0b01), 0b10)
    assert t[0b01] == 1
    # CZ flips the sign only on |11>
    for v in range(4):
        out = apply_cz_pairs(basis_state(2, v), [(0, 1)])
        assert out[v] == (-1 if v == 0b11 else 1)
    # CNOT control 0 target 1
    for v, want in [(0b00, 0b00), (0b01, 0b11), (0b10, 0b10), (0b11, 0b01)]:
        assert np.argmax(np.abs(apply_cnot(basis_state(2, v), 0, 1))) == want
    # tensor puts the first factor at the low bits
    joint = tensor(basis_state(1, 1), basis_state(1, 0))
    assert np.argmax(np.abs(joint)) == 0b01


def test_diagonal_phase_table():
    rng = random.Random(3)
    exps = tuple(rng.randrange(8) for _ in range(8))
    omega = np.exp(1j * np.pi / 4)
    for _ in range(40):
        v = rng.randrange(1 << 8)
        out = apply_diagonal(basis_state(8, v), exps)
        want = omega ** (sum(exps[q] for q in range(8) if v >> q & 1) % 8)
        assert abs(out[v] - want) < 1e-12


def test_unitarity():
    rng = random.Random(9)
    psi = rand_state(rng, 6)
    for out in (
        apply_diagonal(psi, tuple(rng.randrange(8) for _ in range(6))),
        apply_x_mask(psi, 0b101010),
        apply_z_mask(psi, 0b011001),
        apply_cz_pairs(psi, [(0, 3), (2, 5)]),
        apply_cnot(psi, 1, 4),
        apply_transversal_T(TPattern(tuple([1] * 6)), psi),
    ):
        assert abs(np.linalg.norm(out) - 1) < 1e-12


def test_logical_basis_structure():
    v0, v1 = logical_basis(CODE)
    assert abs(np.linalg.norm(v0) - 1) < 1e-12
    assert abs(np.vdot(v0, v1)) < 1e-12
    support = np.flatnonzero(np.abs(v0) > 1e-12)
    assert len(support) == 16
    assert np.allclose(v0[support], 0.25)
    # every stabilizer generator has expectation +1 on both basis states
    for psi in (v0, v1):
        for m in CODE.sx.rows:
            assert abs(np.vdot(psi, apply_x_mask(psi, m)) - 1) < 1e-12
        for m in CODE.sz.rows:
            assert abs(np.vdot(psi, apply_z_mask(psi, m)) - 1) < 1e-12
    # and the logical Z distinguishes them
    zl = CODE.logical_z.z.bits
    assert abs(np.vdot(v0, apply_z_mask(v0, zl)) - 1) < 1e-12
    assert abs(np.vdot(v1, apply_z_mask(v1, zl)) + 1) < 1e-12


def test_logical_action_identification():
    r = logical_action_check(CODE, PAT)
    assert r.name == "T"
    assert r.deviation < 1e-10
    assert r.leakage < 1e-12
    r2 = logical_action_check(CODE, PAT, power=2)
    assert r2.name == "P"
    assert r2.deviation < 1e-10
    r8 = logical_action_check(CODE, PAT, power=8)
    assert r8.name == "I"
    neg = TPattern(tuple(-b for b in PAT.b))
    assert logical_action_check(CODE, neg).name == "Tdag"


def test_flipped_pattern_leaks():
    flipped = list(PAT.b)
    flipped[0] = -flipped[0]
    bad = TPattern(tuple(flipped))
    assert diagonal_leakage(CODE, bad.u_exponents()) > 0.01
    report = logical_action_check(CODE, bad)
    assert report.leakage > 0.01
    assert not report.ok


def test_theorem1_identity_exact_zero():
    report = theorem1_check(CODE, PAT, PauliOp.identity(N))
    assert report.tolerable
    assert report.max_distance == 0.0


def test_theorem1_single_qubit_cases():
    for q in (0, 7, 14):
        report = theorem1_check(CODE, PAT, PauliOp.x_op(N, [q]))
        assert report.tolerable
        assert report.max_distance < 1e-9


def test_theorem1_nontolerable_needs_w():
    lam = PauliOp(CODE.logical_x.x, BitVec.zeros(N))
    with_w = theorem1_check(CODE, PAT, lam)
    assert not with_w.tolerable
    assert with_w.max_distance < 1e-9
    without = theorem1_check(CODE, PAT, lam, omit_w=True)
    assert without.max_distance > 0.1


def test_theorem1_rejects_z_errors():
    with pytest.raises(StatevecError):
        theorem1_check(CODE, PAT, PauliOp.z_op(N, [0]))


def test_depolarize_idempotent():
    rng = random.Random(21)
    _, psi = encoded_inputs(CODE)[2]
    noisy = apply_x_mask(psi, rng.getrandbits(N))
    once = depolarize_sx(CODE, noisy)
    twice = depolarize_sx(CODE, once)
    assert mixture_trace_distance(once, twice) < 1e-12


def dense_density(mix: Mixture) -> np.ndarray:
    dim = len(mix.states[0])
    rho = np.zeros((dim, dim), dtype=np.complex128)
    for psi, w in zip(mix.states, mix.weights):
        rho += w * np.outer(psi, psi.conj())
    return rho


def test_mixture_trace_distance_against_dense_oracle():
    rng = random.Random(33)
    for n in (2, 3, 4):
        a = Mixture(
            tuple(rand_state(rng, n) for _ in range(3)), (0.5, 0.25, 0.25)
        )
        b = Mixture(tuple(rand_state(rng, n) for _ in range(2)), (0.75, 0.25))
        d = rho = dense_density(a) - dense_density(b)
        eig = np.linalg.eigvalsh((d + d.conj().T) / 2)
        want = 0.5 * np.abs(eig).sum()
        got = mixture_trace_distance(a, b)
        assert abs(got - want) < 1e-12
        assert mixture_trace_distance(a, a) == 0.0
        assert abs(mixture_trace_distance(a, b) - mixture_trace_distance(b, a)) < 1e-12


def test_residual_coset_diagonal_fit():
    rng = random.Random(41)
    cases = [BitVec.from_indices(N, [q]) for q in (0, 4, 11)]
    cases += [BitVec(rng.getrandbits(N), N) for _ in range(10)]
    for alpha in cases:
        assert residual_diagonal_fit(CODE, PAT, alpha) < 1e-10


def test_conjugated_check_expectations():
    """Central X stabilizers see the half-exponent sign, the rest average
    to zero, on any encoded state."""
    rng = random.Random(55)
    elems = []
    sx_rows = row_reduce(CODE.sx).rows
    for bits in range(1 << len(sx_rows)):
        m = 0
        for i, r in enumerate(sx_rows):
            if bits >> i & 1:
                m ^= r
        elems.append(m)
    states = [psi for _, psi in encoded_inputs(CODE)[:3]]
    checked_central = 0
    for _ in range(6):
        alpha = BitVec(rng.getrandbits(N), N)
        if not is_tolerable(CODE, alpha):
            alpha = alpha ^ CODE.logical_x.x
        g = group_G(CODE, alpha)
        for beta in elems:
            central = all((beta & h).bit_count() % 2 == 0 for h in g.basis.rows)
            for psi in states:
                got = conjugated_check_expectation(CODE, PAT, alpha, beta, psi)
                if central:
                    checked_central += 1
                    gv = sum(PAT.exponent(q) for q in range(N) if (beta & alpha.bits) >> q & 1)
                    assert gv % 2 == 0
                    want = (-1) ** ((gv // 2) % 2)
                    assert abs(got - want) < 1e-10
                else:
                    assert abs(got) < 1e-10
    assert checked_central >= 3


def test_size_guard():
    with pytest.raises(StatevecError):
        basis_state(21)


def test_encoded_inputs_are_normalized():
    for label, psi in encoded_inputs(CODE):
        assert abs(np.linalg.norm(psi) - 1) < 1e-12
    assert [l for l, _ in encoded_inputs(CODE)] == ["0", "1", "+", "+i"]
