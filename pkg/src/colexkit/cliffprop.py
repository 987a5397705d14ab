"""Clifford gates on colex codes and their error-propagation maps.

Four gates matter here: the standard P gate (the transversal T pattern
applied twice), the facet P gate (the same thing restricted to one facet),
the facet-to-facet CP gate between two codes, and the transversal CNot
between two structurally identical codes.

All the diagonal gates share one conjugation engine that tracks per-qubit
phase exponents mod 4; the accumulated global phase is discarded at the
boundary since every statement downstream is phase-insensitive. Pauli masks
in and Pauli masks out.

Two-code gates act on a joint system with code A at qubit indices
0..n_a-1 and code B shifted up by n_a.
"""

from __future__ import annotations

from dataclasses import dataclass

from .code import (
    CssCode,
    PauliOp,
    SyndromePair,
    branching_points,
    endpoints_on_facet,
    support_constrained_solve,
    syndrome,
)
from .colex import Color, ColexError, Container, facet_code
from .gf2 import BitMatrix, BitVec, in_span, intersection_basis, kernel_basis, rank
from .tga import TPattern


class PropagationError(ValueError):
    pass


def _diag_conjugate(
    x_bits: int, exps: tuple[int, ...], cz_pairs: tuple[tuple[int, int], ...]
) -> tuple[int, int]:
    """Conjugate X_x through per-qubit P^exps[q] plus CZ pairs.

    Returns the Z-mask increment and the global phase exponent (powers of
    i, mod 4); callers discard the phase.
    """
    z = 0
    phase = 0
    for q, c in enumerate(exps):
        if x_bits >> q & 1:
            phase += c
            if c % 2:
                z ^= 1 << q
    for i, j in cz_pairs:
        if x_bits >> i & 1:
            z ^= 1 << j
        if x_bits >> j & 1:
            z ^= 1 << i
        if x_bits >> i & 1 and x_bits >> j & 1:
            phase += 2
    return z, phase % 4


class StandardP:
    """Transversal P^(k b_q) on every qubit; the square of the T pattern."""

    kind = "standard-P"

    def __init__(self, code: CssCode, pattern: TPattern):
        if pattern.n != code.n:
            raise PropagationError("pattern length does not match code")
        self.code = code
        self.exponents = tuple(pattern.exponent(q) % 4 for q in range(code.n))

    @property
    def n_total(self) -> int:
        return self.code.n

    def t_exponents(self) -> tuple[int, ...]:
        return tuple(2 * c % 8 for c in self.exponents)


class FacetP:
    """The standard P pattern restricted to the qubits of one facet."""

    kind = "facet-P"

    def __init__(self, code: CssCode, r: Container | Color, pattern: TPattern):
        if pattern.n != code.n:
            raise PropagationError("pattern length does not match code")
        facet = code.colex.facet_of_color(r) if isinstance(r, Color) else r
        if not facet.is_facet:
            raise PropagationError("facet-P needs a facet")
        self.code = code
        self.facet = facet
        self.exponents = tuple(
            pattern.exponent(q) % 4 if q in facet.qubits else 0 for q in range(code.n)
        )

    @property
    def n_total(self) -> int:
        return self.code.n

    def t_exponents(self) -> tuple[int, ...]:
        return tuple(2 * c % 8 for c in self.exponents)


def _same_structure(code_a: CssCode, code_b: CssCode) -> bool:
    ca, cb = code_a.colex, code_b.colex
    return (
        ca.n_qubits == cb.n_qubits
        and [(c.color, c.qubits) for c in ca.containers]
        == [(c.color, c.qubits) for c in cb.containers]
        and [(f.label, f.qubits) for f in ca.faces] == [(f.label, f.qubits) for f in cb.faces]
    )


class FacetCP:
    """CZ on corresponding qubit pairs of two facets with equal geometry.

    The pairing may be given explicitly as (qubit of A, qubit of B) pairs
    covering both facets; by default the facets must have identical qubit
    sets and the identity pairing is used. Construction derives the
    cell-to-cell map across the facet so syndromes can be transported.
    """

    kind = "facet-CP"

    def __init__(
        self,
        code_a: CssCode,
        code_b: CssCode,
        r_a: Container | Color,
        r_b: Container | Color,
        qubit_pairs: tuple[tuple[int, int], ...] | None = None,
    ):
        self.code_a = code_a
        self.code_b = code_b
        self.facet_a = (
            code_a.colex.facet_of_color(r_a) if isinstance(r_a, Color) else r_a
        )
        self.facet_b = (
            code_b.colex.facet_of_color(r_b) if isinstance(r_b, Color) else r_b
        )
        if not (self.facet_a.is_facet and self.facet_b.is_facet):
            raise PropagationError("facet-CP needs facets on both codes")
        if qubit_pairs is None:
            if self.facet_a.qubits != self.facet_b.qubits:
                raise PropagationError(
                    "facets differ; pass explicit qubit_pairs for the correspondence"
                )
            qubit_pairs = tuple((q, q) for q in sorted(self.facet_a.qubits))
        self.qubit_pairs = tuple(qubit_pairs)
        self.ab = {a: b for a, b in self.qubit_pairs}
        self.ba = {b: a for a, b in self.qubit_pairs}
        if set(self.ab) != self.facet_a.qubits or set(self.ba) != self.facet_b.qubits:
            raise PropagationError("qubit_pairs must cover both facets exactly")
        self.cell_ab = self._cell_map(code_a, self.facet_a, code_b, self.facet_b, self.ab)
        self.cell_ba = self._cell_map(code_b, self.facet_b, code_a, self.facet_a, self.ba)

    @staticmethod
    def _cell_map(
        src: CssCode, facet_src: Container, dst: CssCode, facet_dst: Container, qmap: dict
    ) -> dict[int, int]:
        by_qubits = {
            f.qubits: f
            for f in dst.colex.faces
            if facet_dst.index in f.containers
        }
        out: dict[int, int] = {}
        for f in src.colex.faces:
            if facet_src.index not in f.containers:
                continue
            cell = next(c for c in f.containers if c != facet_src.index)
            image = frozenset(qmap[q] for q in f.qubits)
            g = by_qubits.get(image)
            if g is None:
                raise PropagationError(
                    "facet geometries do not match under the given pairing"
                )
            out[cell] = next(c for c in g.containers if c != facet_dst.index)
        return out

    @property
    def n_total(self) -> int:
        return self.code_a.n + self.code_b.n

    @property
    def cz_pairs(self) -> tuple[tuple[int, int], ...]:
        na = self.code_a.n
        return tuple((a, na + b) for a, b in self.qubit_pairs)


class CNot:
    """Transversal CNot, code A controlling code B, qubit by qubit."""

    kind = "CNot"

    def __init__(self, code_a: CssCode, code_b: CssCode):
        if not _same_structure(code_a, code_b):
            raise PropagationError("transversal CNot needs structurally identical codes")
        self.code_a = code_a
        self.code_b = code_b

    @property
    def n_total(self) -> int:
        return self.code_a.n + self.code_b.n


CliffordGate = StandardP | FacetP | FacetCP | CNot


def _split(gate: FacetCP | CNot, p: PauliOp) -> tuple[PauliOp, PauliOp]:
    na = gate.code_a.n
    nb = gate.code_b.n
    mask_a = (1 << na) - 1
    pa = PauliOp(BitVec(p.x.bits & mask_a, na), BitVec(p.z.bits & mask_a, na))
    pb = PauliOp(BitVec(p.x.bits >> na, nb), BitVec(p.z.bits >> na, nb))
    return pa, pb


def _join(na: int, pa: PauliOp, pb: PauliOp) -> PauliOp:
    n = na + pb.n
    return PauliOp(
        BitVec(pa.x.bits | pb.x.bits << na, n), BitVec(pa.z.bits | pb.z.bits << na, n)
    )


def conjugate_pauli(gate: CliffordGate, p: PauliOp) -> PauliOp:
    """Exact Clifford conjugation U p U'; the internal phase is tracked and
    then dropped, only masks leave this function."""
    if p.n != gate.n_total:
        raise PropagationError("operator length does not match the gate's system")
    if isinstance(gate, (StandardP, FacetP)):
        z_inc, _ = _diag_conjugate(p.x.bits, gate.exponents, ())
        return PauliOp(p.x, p.z ^ BitVec(z_inc, p.n))
    if isinstance(gate, FacetCP):
        exps = tuple(0 for _ in range(gate.n_total))
        z_inc, _ = _diag_conjugate(p.x.bits, exps, gate.cz_pairs)
        return PauliOp(p.x, p.z ^ BitVec(z_inc, p.n))
    pa, pb = _split(gate, p)
    out_a = PauliOp(pa.x, pa.z ^ pb.z)
    out_b = PauliOp(pb.x ^ pa.x, pb.z)
    return _join(gate.code_a.n, out_a, out_b)


@dataclass(frozen=True)
class JointSyndrome:
    a: SyndromePair
    b: SyndromePair


def joint_syndrome(gate: FacetCP | CNot, p: PauliOp) -> JointSyndrome:
    pa, pb = _split(gate, p)
    return JointSyndrome(syndrome(gate.code_a, pa), syndrome(gate.code_b, pb))


def syndrome_map(
    gate: CliffordGate, s: SyndromePair | JointSyndrome
) -> SyndromePair | JointSyndrome:
    """Push an error syndrome through the gate without knowing the error."""
    if isinstance(gate, StandardP):
        if not isinstance(s, SyndromePair):
            raise PropagationError("standard-P maps a single-code syndrome")
        return SyndromePair(s.charge ^ branching_points(gate.code, s.flux), s.flux)
    if isinstance(gate, FacetP):
        if not isinstance(s, SyndromePair):
            raise PropagationError("facet-P maps a single-code syndrome")
        ends = endpoints_on_facet(gate.code, s.flux, gate.facet)
        return SyndromePair(s.charge ^ ends, s.flux)
    if not isinstance(s, JointSyndrome):
        raise PropagationError("two-code gates map a joint syndrome")
    if isinstance(gate, FacetCP):
        ends_a = endpoints_on_facet(gate.code_a, s.a.flux, gate.facet_a)
        ends_b = endpoints_on_facet(gate.code_b, s.b.flux, gate.facet_b)
        to_b = frozenset(gate.cell_ab[c] for c in ends_a)
        to_a = frozenset(gate.cell_ba[c] for c in ends_b)
        return JointSyndrome(
            SyndromePair(s.a.charge ^ to_a, s.a.flux),
            SyndromePair(s.b.charge ^ to_b, s.b.flux),
        )
    return JointSyndrome(
        SyndromePair(s.a.charge ^ s.b.charge, s.a.flux),
        SyndromePair(s.b.charge, s.b.flux ^ s.a.flux),
    )


def _support_closure(gate: CliffordGate, p: PauliOp) -> int:
    sup = p.x.bits | p.z.bits
    if isinstance(gate, (StandardP, FacetP)):
        return sup
    na = gate.code_a.n
    if isinstance(gate, FacetCP):
        out = sup
        for a, b in gate.qubit_pairs:
            if sup >> a & 1:
                out |= 1 << (na + b)
            if sup >> (na + b) & 1:
                out |= 1 << a
        return out
    low = sup & ((1 << na) - 1)
    high = sup >> na
    both = low | high
    return both | both << na


def _logical_free(code: CssCode, allowed: BitVec) -> bool:
    """No logical operator of either type fits inside the allowed support."""
    sup_rows = BitMatrix([1 << q for q in allowed.indices()], code.n)
    for kernel, stab in (
        (kernel_basis(code.sz), code.sx),
        (kernel_basis(code.sx), code.sz),
    ):
        meet = intersection_basis(kernel, sup_rows)
        for r in meet.rows:
            if not in_span(stab, BitVec(r, code.n)):
                return False
    return True


def _solve_one(code: CssCode, target: SyndromePair, allowed: BitVec) -> PauliOp:
    sol = support_constrained_solve(code, target, allowed)
    if sol is None:
        raise PropagationError("mapped syndrome is not solvable within the support")
    return sol


def _check_stabilizer_equal(code: CssCode, got: PauliOp, want: PauliOp) -> None:
    if not in_span(code.sx, got.x ^ want.x) or not in_span(code.sz, got.z ^ want.z):
        raise PropagationError(
            "reconstruction disagrees with direct conjugation beyond a stabilizer"
        )


def reconstruct_propagated(gate: CliffordGate, p: PauliOp) -> PauliOp:
    """Recover the propagated error from the mapped syndrome alone.

    The support must be too small to hide a logical operator (checked),
    making the answer unique up to stabilizers; the result is verified
    against direct conjugation before being returned.
    """
    if p.n != gate.n_total:
        raise PropagationError("operator length does not match the gate's system")
    conj = conjugate_pauli(gate, p)
    closure = _support_closure(gate, p)
    if isinstance(gate, (StandardP, FacetP)):
        allowed = BitVec(closure, gate.code.n)
        if not _logical_free(gate.code, allowed):
            raise PropagationError("support could hide a logical operator")
        target = syndrome_map(gate, syndrome(gate.code, p))
        sol = _solve_one(gate.code, target, allowed)
        _check_stabilizer_equal(gate.code, sol, conj)
        return sol
    na = gate.code_a.n
    allowed_a = BitVec(closure & ((1 << na) - 1), na)
    allowed_b = BitVec(closure >> na, gate.code_b.n)
    if not (_logical_free(gate.code_a, allowed_a) and _logical_free(gate.code_b, allowed_b)):
        raise PropagationError("support could hide a logical operator")
    mapped = syndrome_map(gate, joint_syndrome(gate, p))
    sol_a = _solve_one(gate.code_a, mapped.a, allowed_a)
    sol_b = _solve_one(gate.code_b, mapped.b, allowed_b)
    conj_a, conj_b = _split(gate, conj)
    _check_stabilizer_equal(gate.code_a, sol_a, conj_a)
    _check_stabilizer_equal(gate.code_b, sol_b, conj_b)
    return _join(na, sol_a, sol_b)


class FacetSystem:
    """Stabilizer view of the 2-colex on a facet, in local qubit indices.

    Plaquettes generate both the X and Z checks (the facet code is
    self-dual) and the whole-facet operators are the logicals. Shaped to
    feed the statevector oracle directly.
    """

    def __init__(self, code: CssCode, r: Container | Color):
        fc = facet_code(code.colex, r)
        report = fc.validate()
        if not report.ok:
            raise ColexError(f"facet restriction is not a valid 2-colex: {report}")
        n = len(fc.qubit_map)
        masks = []
        for p in fc.plaquettes:
            m = 0
            for q in p.qubits:
                m |= 1 << q
            masks.append(m)
        self.n = n
        self.sx = BitMatrix(masks, n)
        self.sz = BitMatrix(masks, n)
        full = BitVec((1 << n) - 1, n)
        self.logical_x = PauliOp(full, BitVec.zeros(n))
        self.logical_z = PauliOp(BitVec.zeros(n), full)
        self.qubit_map = fc.qubit_map

    @property
    def n_logical(self) -> int:
        return self.n - rank(self.sx) - rank(self.sz)
