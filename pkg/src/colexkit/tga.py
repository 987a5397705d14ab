"""The transversal-T propagation algebra.

For an X error alpha on a code with a transversal gate U = prod_q T^(k b_q),
the objects below describe what the gate does to the error: the Z-type groups
G_alpha and H_alpha, the exponent sum g, the residual coset E_alpha, and the
derived notions of tolerability, separation, factorization and check erasure.

Everything is exact GF(2) and integer arithmetic. The statevector module is
the independent ground truth for the claims made here; this module never
imports from it except to delegate the code-space invariance axiom.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .code import CssCode, PauliOp, connected_components, endpoints_on_facet, has_preimage, syndrome
from .colex import ALL_COLORS, ColorPair
from .gf2 import (
    BitMatrix,
    BitVec,
    in_span,
    kernel_basis,
    rank,
    row_reduce,
    solve,
    span_equal,
    transpose,
)


class TgaError(ValueError):
    pass


@dataclass(frozen=True)
class TPattern:
    """Per-qubit odd exponents b_q and a global odd factor, U = prod T^(k b_q)."""

    b: tuple[int, ...]
    t_exponent: int = 1

    def __post_init__(self):
        if self.t_exponent % 2 == 0:
            raise TgaError("t_exponent must be odd")
        if any(x % 2 == 0 for x in self.b):
            raise TgaError("every b_q must be odd")

    @property
    def n(self) -> int:
        return len(self.b)

    def exponent(self, q: int) -> int:
        return self.t_exponent * self.b[q]

    def u_exponents(self) -> tuple[int, ...]:
        """Per-qubit T exponents of U, mod 8."""
        return tuple(self.exponent(q) % 8 for q in range(self.n))


def tetra15_pattern() -> TPattern:
    """b_q = +1 on odd-size subsets, -1 on even; the exponent sum is 1 mod 8."""
    b = []
    for q in range(15):
        size = (q + 1).bit_count()
        b.append(1 if size % 2 else -1)
    return TPattern(tuple(b))


@dataclass(frozen=True)
class GroupBasis:
    """A reduced basis for an X-type or Z-type Pauli subgroup."""

    kind: str
    basis: BitMatrix

    def __post_init__(self):
        if self.kind not in ("X", "Z"):
            raise TgaError("kind must be X or Z")

    @property
    def rank(self) -> int:
        return self.basis.n_rows

    def contains(self, v: BitVec) -> bool:
        return in_span(self.basis, v)

    def span_equals(self, other: "GroupBasis") -> bool:
        return self.kind == other.kind and span_equal(self.basis, other.basis)


@dataclass(frozen=True)
class Coset:
    """representative * subgroup; membership is an XOR-and-span test."""

    representative: BitVec
    subgroup: GroupBasis

    def contains(self, v: BitVec) -> bool:
        return self.subgroup.contains(v ^ self.representative)

    def same_coset(self, other: "Coset") -> bool:
        return self.subgroup.span_equals(other.subgroup) and self.subgroup.contains(
            self.representative ^ other.representative
        )


def x_centralizer(code: CssCode) -> BitMatrix:
    """Basis of the X masks commuting with the full stabilizer group."""
    return kernel_basis(code.sz)


def z_centralizer(code: CssCode) -> BitMatrix:
    return kernel_basis(code.sx)


def _logical_x_mask(code: CssCode) -> BitVec:
    if code.logical_x is None:
        raise TgaError("code has no facet logical; the algebra needs one logical qubit")
    if code.n_logical != 1:
        raise TgaError(f"code has {code.n_logical} logical qubits, need exactly 1")
    return code.logical_x.x


def group_G(code: CssCode, alpha: BitVec) -> GroupBasis:
    """G_alpha: face stabilizers together with alpha cut against every
    undetectable X mask. Intersection is bilinear, so basis elements suffice."""
    rows = list(code.sz.rows)
    a = alpha.bits
    for beta in x_centralizer(code).rows:
        rows.append(a & beta)
    return GroupBasis("Z", row_reduce(BitMatrix(rows, code.n)))


def group_H(code: CssCode, alpha: BitVec) -> GroupBasis:
    """H_alpha: like G_alpha but cutting only against X stabilizers."""
    rows = list(code.sz.rows)
    a = alpha.bits
    for beta in code.sx.rows:
        rows.append(a & beta)
    return GroupBasis("Z", row_reduce(BitMatrix(rows, code.n)))


def _g_int(pattern: TPattern, mask: int) -> int:
    g = 0
    m = mask
    while m:
        low = m & -m
        g += pattern.exponent(low.bit_length() - 1)
        m ^= low
    return g


def g_sum(pattern: TPattern, alpha: BitVec) -> int:
    """Exponent sum over the support, mod 8."""
    return _g_int(pattern, alpha.bits) % 8


def is_tolerable(code: CssCode, alpha: BitVec) -> bool:
    """One GF(2) solve: some logical X mask lambda has Z_(alpha cut lambda)
    in the stabilizer, i.e. alpha cut lambda0 is reachable from the cuts
    against X stabilizers plus face stabilizers."""
    lam = _logical_x_mask(code)
    a = alpha.bits
    rows = [a & r for r in code.sx.rows] + list(code.sz.rows)
    target = BitVec(a & lam.bits, code.n)
    return solve(BitMatrix(rows, code.n), target) is not None


def is_tolerable_by_rank(code: CssCode, alpha: BitVec) -> bool:
    """Cross-check variant: H_alpha and G_alpha coincide."""
    _logical_x_mask(code)
    return group_H(code, alpha).rank == group_G(code, alpha).rank


def is_tolerable_by_centralizer(code: CssCode, alpha: BitVec) -> bool:
    """Cross-check variant: some logical X mask commutes with all of G_alpha."""
    lam = _logical_x_mask(code)
    g = group_G(code, alpha)
    width = g.rank
    cols = []
    for r in code.sx.rows:
        m = 0
        for j, h in enumerate(g.basis.rows):
            if (r & h).bit_count() % 2:
                m |= 1 << j
        cols.append(m)
    b = 0
    for j, h in enumerate(g.basis.rows):
        if (lam.bits & h).bit_count() % 2:
            b |= 1 << j
    return solve(BitMatrix(cols, width), BitVec(b, width)) is not None


def e_coset(code: CssCode, pattern: TPattern, alpha: BitVec) -> Coset:
    """The coset E_alpha of P_Z / G_alpha.

    Its members z satisfy, for every X mask gamma commuting with G_alpha,
    (z, X_gamma) = (-1)^(g(gamma cut alpha)/2). The exponent parity being odd
    would contradict the axioms, so it is a fatal error, not a wraparound.
    """
    if pattern.n != code.n:
        raise TgaError("pattern length does not match code")
    g = group_G(code, alpha)
    gamma = kernel_basis(g.basis)
    signs = 0
    for i, row in enumerate(gamma.rows):
        gv = _g_int(pattern, row & alpha.bits)
        if gv % 2:
            raise TgaError(
                f"g(gamma cut alpha) = {gv} is odd; axiom violation for this code/pattern"
            )
        if gv % 4 == 2:
            signs |= 1 << i
    z = solve(transpose(gamma), BitVec(signs, gamma.n_rows))
    if z is None:
        raise TgaError("inconsistent coset constraints; axiom violation")
    return Coset(z, g)


def h_of(code: CssCode, flux: Iterable[int]) -> GroupBasis:
    """H of a syndrome: computed from any preimage, which is enough because
    H is invariant under shifts by undetectable X masks."""
    p = has_preimage(code, flux)
    if p is None:
        raise TgaError("not a valid flux syndrome")
    return group_H(code, p.x)


def tolerable_representative(code: CssCode, flux: Iterable[int]) -> BitVec:
    """A tolerable X mask with the given flux syndrome. Exactly one of the
    two logical classes is tolerable, so flip by the logical if needed."""
    p = has_preimage(code, flux)
    if p is None:
        raise TgaError("not a valid flux syndrome")
    if is_tolerable(code, p.x):
        return p.x
    lam = _logical_x_mask(code)
    flipped = p.x ^ lam
    if not is_tolerable(code, flipped):
        raise TgaError("neither error class is tolerable; axiom violation")
    return flipped


def e_of(code: CssCode, pattern: TPattern, flux: Iterable[int]) -> Coset:
    """E of a syndrome: requires the tolerable representative."""
    return e_coset(code, pattern, tolerable_representative(code, flux))


def separated(code: CssCode, fluxes: Sequence[Iterable[int]]) -> bool:
    """Syndromes are separated when H of the sum is the product of the
    individual H groups (as one span)."""
    sets = [frozenset(f) for f in fluxes]
    total: frozenset[int] = frozenset()
    rows: list[int] = []
    for f in sets:
        total = total ^ f
        rows.extend(h_of(code, f).basis.rows)
    h_total = h_of(code, total)
    return span_equal(h_total.basis, BitMatrix(rows, code.n))


def factor_e(
    code: CssCode,
    pattern: TPattern,
    parts: Sequence[tuple[BitVec, BitVec]],
) -> BitVec:
    """Combine per-part residuals z_i for separated tolerable errors:
    prod z_i times Z on every pairwise overlap lands in E of the summed
    syndrome. The overlap product runs over unordered pairs once."""
    alphas = [a for a, _ in parts]
    fluxes = []
    for a in alphas:
        if not is_tolerable(code, a):
            raise TgaError("factor_e needs tolerable parts")
        fluxes.append(syndrome(code, PauliOp(a, BitVec.zeros(code.n))).flux)
    if not separated(code, fluxes):
        raise TgaError("factor_e needs separated syndromes")
    out = BitVec.zeros(code.n)
    for a, z in parts:
        if not e_coset(code, pattern, a).contains(z):
            raise TgaError("z_i is not in the residual coset of alpha_i")
        out = out ^ z
    for (a1, _), (a2, _) in combinations(parts, 2):
        out = out ^ (a1 & a2)
    total = alphas[0]
    for a in alphas[1:]:
        total = total ^ a
    if not e_coset(code, pattern, total).contains(out):
        raise TgaError("factorization left the expected coset; internal inconsistency")
    return out


def erasure_identity_check(
    code: CssCode, pattern: TPattern, alpha: BitVec, omega: BitVec
) -> bool:
    """Coset identity relating the residuals of alpha, omega and their sum:
    e_a e_(a+w) G_a G_(a+w) = e_w Z_(a cut w) G_a G_w."""
    e_a = e_coset(code, pattern, alpha)
    e_aw = e_coset(code, pattern, alpha ^ omega)
    e_w = e_coset(code, pattern, omega)
    left_rows = list(e_a.subgroup.basis.rows) + list(e_aw.subgroup.basis.rows)
    right_rows = list(e_a.subgroup.basis.rows) + list(e_w.subgroup.basis.rows)
    left = BitMatrix(left_rows, code.n)
    right = BitMatrix(right_rows, code.n)
    if not span_equal(left, right):
        return False
    diff = (
        e_a.representative
        ^ e_aw.representative
        ^ e_w.representative
        ^ (alpha & omega)
    )
    return in_span(left, diff)


def erased_checks(code: CssCode, flux: Iterable[int]) -> list[PauliOp]:
    """X-type check operators that survive the residual randomness of a
    syndrome: cells untouched by the flux, plus per-component products of
    same-color-pair touched cells when the component has no endpoints on
    either facet of the pair. Every generator is verified to commute with
    H of the syndrome."""
    flux = frozenset(flux)
    p = has_preimage(code, flux)
    if p is None:
        raise TgaError("invalid syndrome")
    h = group_H(code, p.x)
    colex = code.colex
    faces = colex.faces
    touched: dict[int, set[int]] = {}
    for fi in flux:
        for ci in faces[fi].containers:
            if ci < code.n_cells:
                touched.setdefault(ci, set()).add(fi)
    gens: list[PauliOp] = []
    for c in colex.cells:
        if c.index not in touched:
            gens.append(PauliOp(BitVec(c.mask, code.n), BitVec.zeros(code.n)))
    comps = connected_components(code, flux)
    has_facets = bool(colex.facets)
    for comp in comps:
        comp_cells = {
            ci
            for fi in comp
            for ci in faces[fi].containers
            if ci < code.n_cells
        }
        for a, b in combinations(ALL_COLORS, 2):
            if has_facets:
                if endpoints_on_facet(code, comp, a) or endpoints_on_facet(code, comp, b):
                    continue
            m = 0
            for ci in comp_cells:
                if colex.containers[ci].color in (a, b):
                    m ^= colex.containers[ci].mask
            if m:
                gens.append(PauliOp(BitVec(m, code.n), BitVec.zeros(code.n)))
    for g in gens:
        for hrow in h.basis.rows:
            if (g.x.bits & hrow).bit_count() % 2:
                raise TgaError(
                    "erased-check generator fails to commute with H; internal inconsistency"
                )
    return gens


@dataclass
class AxiomResult:
    name: str
    status: str  # pass | fail | skipped
    detail: str


@dataclass
class AxiomReport:
    results: list[AxiomResult]

    @property
    def ok(self) -> bool:
        return all(r.status == "pass" for r in self.results)

    def __str__(self) -> str:
        return "\n".join(f"axiom {r.name}: {r.status} ({r.detail})" for r in self.results)


def check_axioms(code: CssCode, pattern: TPattern) -> AxiomReport:
    """Verify the four assumptions behind the propagation algebra.

    The code-space invariance check is exhaustive (statevector) and is
    skipped with a note for codes too large to simulate.
    """
    out: list[AxiomResult] = []

    bad = sum(
        1
        for cm in code.sx.rows
        for fm in code.sz.rows
        if (cm & fm).bit_count() % 2
    )
    out.append(
        AxiomResult("1 (CSS split)", "pass" if bad == 0 else "fail", f"{bad} anticommuting pairs")
    )

    if pattern.n != code.n:
        out.append(AxiomResult("2 (invariant code space)", "fail", "pattern length mismatch"))
    elif code.n <= 20:
        from .statevec import diagonal_leakage

        leak = diagonal_leakage(code, pattern.u_exponents())
        ok = leak < 1e-12
        out.append(
            AxiomResult(
                "2 (invariant code space)",
                "pass" if ok else "fail",
                f"leakage {leak:.2e}",
            )
        )
    else:
        out.append(
            AxiomResult("2 (invariant code space)", "skipped", f"n={code.n} too large for the statevector oracle")
        )

    k = code.n_logical
    out.append(
        AxiomResult("3 (single logical qubit)", "pass" if k == 1 else "fail", f"k={k}")
    )

    zx = x_centralizer(code)
    rows = list(code.sz.rows)
    for i in range(zx.n_rows):
        for j in range(i, zx.n_rows):
            rows.append(zx.rows[i] & zx.rows[j])
    lhs = BitMatrix(rows, code.n)
    rhs = kernel_basis(code.sx)
    ok4 = span_equal(lhs, rhs)
    out.append(
        AxiomResult(
            "4 (undetectable X cuts span undetectable Z)",
            "pass" if ok4 else "fail",
            f"span ranks {rank(lhs)} vs {rank(rhs)}",
        )
    )
    return AxiomReport(out)
