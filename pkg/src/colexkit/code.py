"""CSS codes on colexes: Pauli operators, syndromes, charge and flux algebra.

Cells give the X stabilizer generators, faces the Z generators. The charge
syndrome of a Pauli lives on cells (from its Z part), the flux syndrome on
faces (from its X part). Charge labels form Z2^4 modulo the all-colors
element; flux labels are the even-weight subgroup of Z2^4, generated by the
color pairs.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .colex import ALL_COLORS, Color, ColorPair, Colex, ColexError, Container
from .gf2 import BitMatrix, BitVec, LinSolver, symplectic_commutator


@dataclass(frozen=True)
class PauliOp:
    """An n-qubit Pauli with phases dropped: X support and Z support masks."""

    x: BitVec
    z: BitVec

    def __post_init__(self):
        if self.x.length != self.z.length:
            raise ValueError("x and z masks must have equal length")

    @classmethod
    def identity(cls, n: int) -> "PauliOp":
        return cls(BitVec.zeros(n), BitVec.zeros(n))

    @classmethod
    def x_op(cls, n: int, qubits: Iterable[int]) -> "PauliOp":
        return cls(BitVec.from_indices(n, qubits), BitVec.zeros(n))

    @classmethod
    def z_op(cls, n: int, qubits: Iterable[int]) -> "PauliOp":
        return cls(BitVec.zeros(n), BitVec.from_indices(n, qubits))

    @property
    def n(self) -> int:
        return self.x.length

    @property
    def is_identity(self) -> bool:
        return self.x.is_zero and self.z.is_zero

    @property
    def weight(self) -> int:
        return (self.x.bits | self.z.bits).bit_count()

    def compose(self, other: "PauliOp") -> "PauliOp":
        return PauliOp(self.x ^ other.x, self.z ^ other.z)

    def commutes_with(self, other: "PauliOp") -> bool:
        s = symplectic_commutator(self.x, other.z) * symplectic_commutator(
            other.x, self.z
        )
        return s == 1

    def __str__(self) -> str:
        return format_pauli(self)


def parse_pauli(text: str, n_qubits: int) -> PauliOp:
    """Read the line format ``X <indices>`` / ``Z <indices>``.

    Repeated lines toggle (everything is mod 2). Blank lines and lines
    starting with ``#`` are skipped.
    """
    x = BitVec.zeros(n_qubits)
    z = BitVec.zeros(n_qubits)
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0].upper()
        try:
            idx = [int(p) for p in parts[1:]]
        except ValueError as err:
            raise ValueError(f"line {ln}: bad qubit index") from err
        mask = BitVec.from_indices(n_qubits, idx)
        if kind == "X":
            x = x ^ mask
        elif kind == "Z":
            z = z ^ mask
        else:
            raise ValueError(f"line {ln}: expected X or Z, got {parts[0]!r}")
    return PauliOp(x, z)


def format_pauli(p: PauliOp) -> str:
    lines = []
    if not p.x.is_zero:
        lines.append("X " + " ".join(str(i) for i in p.x.indices()))
    if not p.z.is_zero:
        lines.append("Z " + " ".join(str(i) for i in p.z.indices()))
    return "\n".join(lines) if lines else "# identity"


@dataclass(frozen=True)
class SyndromePair:
    """Charge on cells (from the Z part), flux on faces (from the X part)."""

    charge: frozenset[int]
    flux: frozenset[int]

    @classmethod
    def empty(cls) -> "SyndromePair":
        return cls(frozenset(), frozenset())

    def __add__(self, other: "SyndromePair") -> "SyndromePair":
        return SyndromePair(self.charge ^ other.charge, self.flux ^ other.flux)

    @property
    def is_zero(self) -> bool:
        return not self.charge and not self.flux


class FluxLabel:
    """Element of the flux group: even-weight subsets of the four colors.

    Generated by the color pairs; k1k2 + k2k3 + k3k1 = 0 holds because the
    three masks xor to zero.
    """

    __slots__ = ("bits",)

    def __init__(self, bits: int):
        if bits & ~0b1111 or bits.bit_count() % 2:
            raise ValueError(f"not a flux label: {bits:#06b}")
        self.bits = bits

    @classmethod
    def zero(cls) -> "FluxLabel":
        return cls(0)

    @classmethod
    def from_pair(cls, pair: ColorPair) -> "FluxLabel":
        return cls(pair.mask)

    def __add__(self, other: "FluxLabel") -> "FluxLabel":
        return FluxLabel(self.bits ^ other.bits)

    @property
    def is_zero(self) -> bool:
        return self.bits == 0

    def contains(self, color: Color) -> bool:
        return bool(self.bits & color.mask)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FluxLabel) and other.bits == self.bits

    def __hash__(self) -> int:
        return hash(("FluxLabel", self.bits))

    def __str__(self) -> str:
        if self.bits == 0:
            return "0"
        cs = [str(c) for c in ALL_COLORS if self.bits & c.mask]
        if len(cs) == 2:
            return "".join(cs)
        return "eps"  # all four colors: the k1k2 + k3k4 element

    def __repr__(self) -> str:
        return f"FluxLabel({self})"


class ChargeLabel:
    """Element of the charge group: Z2^4 generated by the colors with the
    relation k1 + k2 + k3 + k4 = 0; stored as the lower of the two masks."""

    __slots__ = ("bits",)

    def __init__(self, bits: int):
        if bits & ~0b1111:
            raise ValueError(f"not a charge label: {bits:#06b}")
        self.bits = min(bits, bits ^ 0b1111)

    @classmethod
    def zero(cls) -> "ChargeLabel":
        return cls(0)

    @classmethod
    def from_color(cls, color: Color) -> "ChargeLabel":
        return cls(color.mask)

    def __add__(self, other: "ChargeLabel") -> "ChargeLabel":
        return ChargeLabel(self.bits ^ other.bits)

    @property
    def is_zero(self) -> bool:
        return self.bits == 0

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ChargeLabel) and other.bits == self.bits

    def __hash__(self) -> int:
        return hash(("ChargeLabel", self.bits))

    def __str__(self) -> str:
        if self.bits == 0:
            return "0"
        best = min(self.bits, self.bits ^ 0b1111,
                   key=lambda m: (m.bit_count(), m))
        return "+".join(str(c) for c in ALL_COLORS if best & c.mask)

    def __repr__(self) -> str:
        return f"ChargeLabel({self})"


def pairing(charge: ChargeLabel, flux: FluxLabel) -> int:
    """The braiding sign between a charge and a flux label, +1 or -1.

    Well defined on charge classes because flux labels have even weight.
    """
    return -1 if (charge.bits & flux.bits).bit_count() % 2 else 1


class CssCode:
    """Stabilizer data for a colex: X generators from cells, Z from faces.

    Immutable; solver reductions are built lazily under a lock so concurrent
    queries match serial results.
    """

    def __init__(self, colex: Colex):
        self.colex = colex
        n = colex.n_qubits
        self.n = n
        self.sx = BitMatrix([c.mask for c in colex.cells], n)
        self.sz = BitMatrix([f.mask for f in colex.faces], n)
        for cm in self.sx.rows:
            for fm in self.sz.rows:
                if (cm & fm).bit_count() % 2:
                    raise ColexError("cell and face stabilizers do not commute")
        if colex.facets:
            r = colex.facets[0]
            self.logical_x: PauliOp | None = PauliOp.x_op(n, r.qubits)
            self.logical_z: PauliOp | None = PauliOp.z_op(n, r.qubits)
        else:
            self.logical_x = None
            self.logical_z = None
        # Per-qubit incidence masks: bit f of qubit_flux_masks[q] says face f
        # contains q; likewise cells for the charge part.
        self.qubit_flux_masks: tuple[int, ...] = tuple(
            sum(1 << f for f in colex.incident_faces(q)) for q in range(n)
        )
        cell_sets = [c.qubits for c in colex.cells]
        self.qubit_charge_masks: tuple[int, ...] = tuple(
            sum(1 << i for i, qs in enumerate(cell_sets) if q in qs)
            for q in range(n)
        )
        self.n_cells = len(colex.cells)
        self.n_faces = len(colex.faces)
        self._lock = threading.Lock()
        self._flux_solver: LinSolver | None = None
        self._charge_solver: LinSolver | None = None

    @classmethod
    def from_colex(cls, colex: Colex) -> "CssCode":
        return cls(colex)

    @property
    def n_logical(self) -> int:
        from .gf2 import rank

        return self.n - rank(self.sx) - rank(self.sz)

    def flux_solver(self) -> LinSolver:
        with self._lock:
            if self._flux_solver is None:
                self._flux_solver = LinSolver(
                    BitMatrix(list(self.qubit_flux_masks), self.n_faces)
                )
            return self._flux_solver

    def charge_solver(self) -> LinSolver:
        with self._lock:
            if self._charge_solver is None:
                self._charge_solver = LinSolver(
                    BitMatrix(list(self.qubit_charge_masks), self.n_cells)
                )
            return self._charge_solver


def syndrome(code: CssCode, p: PauliOp) -> SyndromePair:
    """Cells seeing the Z part oddly often, faces seeing the X part."""
    if p.n != code.n:
        raise ValueError("operator length does not match code")
    charge = frozenset(
        c.index
        for c in code.colex.cells
        if (c.mask & p.z.bits).bit_count() % 2
    )
    flux = frozenset(
        f.index
        for f in code.colex.faces
        if (f.mask & p.x.bits).bit_count() % 2
    )
    return SyndromePair(charge, flux)


def flux_vec(code: CssCode, flux: Iterable[int]) -> BitVec:
    return BitVec.from_indices(code.n_faces, flux)


def charge_vec(code: CssCode, charge: Iterable[int]) -> BitVec:
    return BitVec.from_indices(code.n_cells, charge)


def monopole(code: CssCode, flux: Iterable[int]) -> dict[int, FluxLabel]:
    """Per cell, the flux-group sum of the labels of its faces in ``flux``.

    Cells with zero sum are omitted, so an empty dict means Gauss's law
    holds. Faces against a facet contribute only at their one cell end.
    """
    acc: dict[int, int] = {}
    faces = code.colex.faces
    cells = {c.index for c in code.colex.cells}
    for fi in flux:
        f = faces[fi]
        for ci in f.containers:
            if ci in cells:
                acc[ci] = acc.get(ci, 0) ^ f.label.mask
    return {ci: FluxLabel(m) for ci, m in sorted(acc.items()) if m}


def gauss_ok(code: CssCode, flux: Iterable[int]) -> bool:
    return not monopole(code, flux)


def has_preimage(code: CssCode, flux: Iterable[int]) -> PauliOp | None:
    """An X operator whose flux syndrome is ``flux``, if one exists."""
    sol = code.flux_solver().solve(flux_vec(code, flux))
    if sol is None:
        return None
    return PauliOp(sol, BitVec.zeros(code.n))


def connected_components(code: CssCode, flux: Iterable[int]) -> list[frozenset[int]]:
    """Partition a face set by connectivity through shared cells.

    Dangling ends on facets do not connect anything: two strings that only
    meet at a facet stay separate components.
    """
    faces = code.colex.faces
    cells = {c.index for c in code.colex.cells}
    flux = sorted(set(flux))
    parent = {f: f for f in flux}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    by_cell: dict[int, int] = {}
    for fi in flux:
        for ci in faces[fi].containers:
            if ci not in cells:
                continue
            if ci in by_cell:
                parent[find(by_cell[ci])] = find(fi)
            else:
                by_cell[ci] = fi
    comps: dict[int, set[int]] = {}
    for fi in flux:
        comps.setdefault(find(fi), set()).add(fi)
    return [frozenset(c) for _, c in sorted((min(c), c) for c in comps.values())]


def string_operator(code: CssCode, path: Sequence[int], color: Color) -> PauliOp:
    """Z on the qubits of the path's edges of the given color.

    ``path`` is a sequence of distinct edge indices in which consecutive
    edges share a vertex.
    """
    edges = code.colex.edges
    if len(set(path)) != len(path):
        raise ValueError("path repeats an edge")
    for a, b in zip(path, path[1:]):
        if not set(edges[a].vertices) & set(edges[b].vertices):
            raise ValueError(f"edges {a} and {b} do not meet")
    z = 0
    for ei in path:
        e = edges[ei]
        if e.color == color:
            z ^= (1 << e.vertices[0]) | (1 << e.vertices[1])
    return PauliOp(BitVec.zeros(code.n), BitVec(z, code.n))


def membrane_operator(code: CssCode, surface: Iterable[int], pair: ColorPair) -> PauliOp:
    """X on those faces of ``surface`` whose label is complementary to
    ``pair``; other faces of the surface carry no support."""
    want = pair.complement
    x = 0
    for fi in surface:
        f = code.colex.faces[fi]
        if f.label == want:
            x ^= f.mask
    return PauliOp(BitVec(x, code.n), BitVec.zeros(code.n))


def charge_conservation_check(code: CssCode) -> bool:
    """Products of cell/facet X operators of one color agree across colors."""
    prods = []
    for color in ALL_COLORS:
        m = 0
        for cont in code.colex.containers:
            if cont.color == color:
                m ^= cont.mask
        prods.append(m)
    return all(m == prods[0] for m in prods)


def total_charge(code: CssCode, cells: Iterable[int]) -> ChargeLabel:
    out = ChargeLabel.zero()
    for ci in cells:
        out = out + ChargeLabel.from_color(code.colex.containers[ci].color)
    return out


def branching_points(code: CssCode, flux: Iterable[int]) -> frozenset[int]:
    """Cells at which some single label occurs an odd number of times among
    their faces in ``flux``."""
    faces = code.colex.faces
    cells = {c.index for c in code.colex.cells}
    par: dict[int, int] = {}
    label_bit = {p: i for i, p in enumerate(sorted({f.label for f in faces}))}
    for fi in flux:
        f = faces[fi]
        for ci in f.containers:
            if ci in cells:
                par[ci] = par.get(ci, 0) ^ (1 << label_bit[f.label])
    return frozenset(ci for ci, v in par.items() if v)


def endpoints_on_facet(code: CssCode, flux: Iterable[int], r: Container | Color) -> frozenset[int]:
    """Cells sharing an odd number of ``flux`` faces with the facet ``r``."""
    facet = code.colex.facet_of_color(r) if isinstance(r, Color) else r
    if not facet.is_facet:
        raise ValueError("endpoints_on_facet needs a facet")
    faces = code.colex.faces
    par: dict[int, int] = {}
    for fi in flux:
        f = faces[fi]
        if facet.index in f.containers:
            other = f.containers[0] if f.containers[1] == facet.index else f.containers[1]
            par[other] = par.get(other, 0) ^ 1
    return frozenset(ci for ci, v in par.items() if v)


def _restrict_rows(rows: Sequence[int], cols: Sequence[int]) -> list[int]:
    out = []
    for r in rows:
        m = 0
        for i, c in enumerate(cols):
            if (r >> c) & 1:
                m |= 1 << i
        out.append(m)
    return out


def support_constrained_solve(
    code: CssCode,
    target: SyndromePair | PauliOp,
    allowed: BitVec,
) -> PauliOp | None:
    """Find an operator meeting ``target`` with support inside ``allowed``.

    A SyndromePair target asks for an X part with the given flux and a Z part
    with the given charge. A PauliOp target must be Z-type and asks for a Z
    operator in the same S_Z class (equal up to face stabilizers). Returns
    None when no such operator exists.
    """
    if allowed.length != code.n:
        raise ValueError("allowed mask length mismatch")
    qubits = allowed.indices()
    if isinstance(target, SyndromePair):
        x = BitVec.zeros(code.n)
        z = BitVec.zeros(code.n)
        if target.flux:
            rows = [code.qubit_flux_masks[q] for q in qubits]
            sol = LinSolver(BitMatrix(rows, code.n_faces)).solve(
                flux_vec(code, target.flux)
            )
            if sol is None:
                return None
            x = BitVec.from_indices(code.n, (qubits[i] for i in sol.indices()))
        if target.charge:
            rows = [code.qubit_charge_masks[q] for q in qubits]
            sol = LinSolver(BitMatrix(rows, code.n_cells)).solve(
                charge_vec(code, target.charge)
            )
            if sol is None:
                return None
            z = BitVec.from_indices(code.n, (qubits[i] for i in sol.indices()))
        return PauliOp(x, z)
    if not target.x.is_zero:
        raise ValueError("Z-class targets must be Z-type")
    forbidden = [q for q in range(code.n) if not allowed.bit(q)]
    rows = _restrict_rows(code.sz.rows, forbidden)
    b = BitVec(
        sum(1 << i for i, q in enumerate(forbidden) if target.z.bit(q)),
        len(forbidden),
    )
    sol = LinSolver(BitMatrix(rows, len(forbidden))).solve(b)
    if sol is None:
        return None
    z = target.z.bits
    for i in sol.indices():
        z ^= code.sz.rows[i]
    assert z & ~allowed.bits == 0
    return PauliOp(BitVec.zeros(code.n), BitVec(z, code.n))
