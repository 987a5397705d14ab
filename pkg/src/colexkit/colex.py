"""Colored cell complexes in three dimensions.

A 3-colex is described here by its vertex set (the qubits) together with its
3-cells, each labeled by one of four colors. Open complexes additionally carry
facets (boundary 3-cells, also color-labeled). Faces and edges are not stored
independently: they are derived from the container incidence structure and
cross-checked by the validator.

Derivation rules:
  - An edge is a vertex pair lying in exactly 3 common containers; its color
    is the one color missing from those containers.
  - A face is an edge-connected component of the intersection of two
    distinct-colored containers (cell-cell or cell-facet), labeled by the
    color pair complementary to the containers' colors. Periodic complexes
    can have two faces between the same container pair, which is why the
    components are not merged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum
from itertools import combinations, permutations, product
from typing import Iterable, Sequence


class ColexError(ValueError):
    pass


class Color(IntEnum):
    K1 = 0
    K2 = 1
    K3 = 2
    K4 = 3

    @property
    def mask(self) -> int:
        return 1 << self.value

    def __str__(self) -> str:
        return f"k{self.value + 1}"

    @classmethod
    def parse(cls, s: str) -> "Color":
        s = s.strip().lower()
        if len(s) == 2 and s[0] == "k" and s[1] in "1234":
            return cls(int(s[1]) - 1)
        raise ColexError(f"not a color: {s!r}")


ALL_COLORS: tuple[Color, ...] = tuple(Color)


class ColorPair:
    """Unordered pair of distinct colors. Six values, interned."""

    __slots__ = ("mask",)
    _cache: dict[int, "ColorPair"] = {}

    def __new__(cls, mask: int) -> "ColorPair":
        if mask.bit_count() != 2 or mask & ~0b1111:
            raise ColexError(f"not a color pair mask: {mask:#06b}")
        hit = cls._cache.get(mask)
        if hit is None:
            hit = super().__new__(cls)
            hit.mask = mask
            cls._cache[mask] = hit
        return hit

    @classmethod
    def of(cls, a: Color, b: Color) -> "ColorPair":
        if a == b:
            raise ColexError("color pair needs distinct colors")
        return cls(a.mask | b.mask)

    @property
    def colors(self) -> tuple[Color, Color]:
        return tuple(c for c in ALL_COLORS if self.mask & c.mask)  # type: ignore[return-value]

    @property
    def complement(self) -> "ColorPair":
        return ColorPair(0b1111 ^ self.mask)

    def contains(self, c: Color) -> bool:
        return bool(self.mask & c.mask)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ColorPair) and other.mask == self.mask

    def __hash__(self) -> int:
        return hash(("ColorPair", self.mask))

    def __lt__(self, other: "ColorPair") -> bool:
        return self.mask < other.mask

    def __str__(self) -> str:
        a, b = self.colors
        return f"{a}{b}"

    def __repr__(self) -> str:
        return f"ColorPair({self})"

    @classmethod
    def parse(cls, s: str) -> "ColorPair":
        s = s.strip().lower()
        if len(s) == 4:
            return cls.of(Color.parse(s[:2]), Color.parse(s[2:]))
        raise ColexError(f"not a color pair: {s!r}")


ALL_PAIRS: tuple[ColorPair, ...] = tuple(
    sorted(ColorPair.of(a, b) for a, b in combinations(ALL_COLORS, 2))
)


@dataclass(frozen=True)
class Container:
    """A 3-cell or a facet. ``index`` is global across cells then facets."""

    index: int
    color: Color
    qubits: frozenset[int]
    mask: int
    is_facet: bool


@dataclass(frozen=True)
class Face:
    index: int
    label: ColorPair
    qubits: frozenset[int]
    mask: int
    containers: tuple[int, int]


@dataclass(frozen=True)
class Edge:
    index: int
    color: Color
    vertices: tuple[int, int]
    containers: tuple[int, int, int]


@dataclass(frozen=True)
class TorusGeometry:
    """Integer coordinates for periodic complexes, period 4L per axis."""

    L: int
    period: int
    cell_sites: tuple[tuple[int, int, int], ...]
    vertex_coords: tuple[tuple[int, int, int], ...]


class Colex:
    """Immutable after construction; faces and edges are derived, not given.

    ``containers`` lists cells first and facets after; ``Face.containers``
    and ``Edge.containers`` index into that list.
    """

    def __init__(
        self,
        n_qubits: int,
        cell_specs: Sequence[tuple[Color, Iterable[int]]],
        facet_specs: Sequence[tuple[Color, Iterable[int]]] = (),
        geometry: TorusGeometry | None = None,
    ):
        self.n_qubits = n_qubits
        containers: list[Container] = []
        for is_facet, specs in ((False, cell_specs), (True, facet_specs)):
            for color, qubits in specs:
                qs = frozenset(qubits)
                if any(not 0 <= q < n_qubits for q in qs):
                    raise ColexError("container qubit out of range")
                mask = 0
                for q in qs:
                    mask |= 1 << q
                containers.append(
                    Container(len(containers), color, qs, mask, is_facet)
                )
        self.containers: tuple[Container, ...] = tuple(containers)
        self.cells: tuple[Container, ...] = tuple(
            c for c in containers if not c.is_facet
        )
        self.facets: tuple[Container, ...] = tuple(
            c for c in containers if c.is_facet
        )
        self.geometry = geometry
        self._vertex_containers: tuple[tuple[int, ...], ...] = tuple(
            tuple(c.index for c in containers if q in c.qubits)
            for q in range(n_qubits)
        )
        self.edges: tuple[Edge, ...] = self._derive_edges()
        self.faces: tuple[Face, ...] = self._derive_faces()
        self._incident_faces: tuple[tuple[int, ...], ...] = tuple(
            tuple(f.index for f in self.faces if q in f.qubits)
            for q in range(n_qubits)
        )

    @property
    def is_closed(self) -> bool:
        return not self.facets

    def vertex_containers(self, q: int) -> tuple[int, ...]:
        return self._vertex_containers[q]

    def incident_faces(self, q: int) -> tuple[int, ...]:
        return self._incident_faces[q]

    def facet_of_color(self, color: Color) -> Container:
        for f in self.facets:
            if f.color == color:
                return f
        raise ColexError(f"no facet of color {color}")

    def faces_of_label(self, label: ColorPair) -> tuple[Face, ...]:
        return tuple(f for f in self.faces if f.label == label)

    def faces_between(self, i: int, j: int) -> tuple[Face, ...]:
        key = (min(i, j), max(i, j))
        return tuple(f for f in self.faces if f.containers == key)

    def _derive_edges(self) -> tuple[Edge, ...]:
        shared: dict[tuple[int, int], int] = {}
        for cont in self.containers:
            qs = sorted(cont.qubits)
            for a, b in combinations(qs, 2):
                shared[(a, b)] = shared.get((a, b), 0) + 1
        out = []
        for (a, b), k in shared.items():
            if k != 3:
                continue
            trip = tuple(
                sorted(set(self._vertex_containers[a]) & set(self._vertex_containers[b]))
            )
            present = 0
            for ci in trip:
                present |= self.containers[ci].color.mask
            missing = 0b1111 ^ present
            if missing.bit_count() != 1:
                # Color-degenerate container triple; no edge color exists.
                # The validator reports this through the incidence checks.
                continue
            color = Color(missing.bit_length() - 1)
            out.append((color, (a, b), trip))
        out.sort(key=lambda t: (t[0], t[1]))
        return tuple(
            Edge(i, color, verts, trip) for i, (color, verts, trip) in enumerate(out)
        )

    def _derive_faces(self) -> tuple[Face, ...]:
        edges_by_pair: dict[tuple[int, int], list[Edge]] = {}
        for e in self.edges:
            for i, j in combinations(e.containers, 2):
                edges_by_pair.setdefault((i, j), []).append(e)
        # Container pairs sharing at least one vertex.
        adjacent: set[tuple[int, int]] = set()
        for conts in self._vertex_containers:
            for i, j in combinations(sorted(conts), 2):
                adjacent.add((i, j))
        raw: list[tuple[ColorPair, tuple[int, ...], tuple[int, int]]] = []
        for i, j in sorted(adjacent):
            ci, cj = self.containers[i], self.containers[j]
            if ci.is_facet and cj.is_facet:
                continue
            if ci.color == cj.color:
                continue
            label = ColorPair.of(ci.color, cj.color).complement
            common = ci.qubits & cj.qubits
            parent = {q: q for q in common}

            def find(q: int) -> int:
                while parent[q] != q:
                    parent[q] = parent[parent[q]]
                    q = parent[q]
                return q

            for e in edges_by_pair.get((i, j), ()):
                a, b = e.vertices
                if a in parent and b in parent:
                    parent[find(a)] = find(b)
            comps: dict[int, list[int]] = {}
            for q in common:
                comps.setdefault(find(q), []).append(q)
            for comp in comps.values():
                raw.append((label, tuple(sorted(comp)), (i, j)))
        raw.sort(key=lambda t: (t[0].mask, t[1]))
        faces = []
        for idx, (label, qs, pair) in enumerate(raw):
            mask = 0
            for q in qs:
                mask |= 1 << q
            faces.append(Face(idx, label, frozenset(qs), mask, pair))
        return tuple(faces)

    def __repr__(self) -> str:
        kind = "closed" if self.is_closed else f"{len(self.facets)} facets"
        return (
            f"Colex({self.n_qubits} qubits, {len(self.cells)} cells, "
            f"{len(self.faces)} faces, {len(self.edges)} edges, {kind})"
        )


@dataclass
class ValidationReport:
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "pass"
        head = f"{len(self.violations)} violation(s)"
        return "\n".join([head] + [f"  - {v}" for v in self.violations])


def validate(colex: Colex) -> ValidationReport:
    """Check the 3-colex axioms and return a report, never raise.

    Violations carry witnesses (vertex or container indices). Two containers
    may legitimately share more than one face on a periodic complex; the
    incidence axiom is therefore checked per shared vertex.
    """
    v: list[str] = []
    for q in range(colex.n_qubits):
        conts = colex.vertex_containers(q)
        census: dict[Color, int] = {}
        for ci in conts:
            c = colex.containers[ci].color
            census[c] = census.get(c, 0) + 1
        bad = [str(c) for c in ALL_COLORS if census.get(c, 0) != 1]
        if bad:
            v.append(f"vertex {q}: not exactly one container of color(s) {','.join(bad)}")

    face_key: dict[tuple[int, int, int], int] = {}
    for f in colex.faces:
        i, j = f.containers
        for q in f.qubits:
            key = (q, i, j)
            face_key[key] = face_key.get(key, 0) + 1
    for q in range(colex.n_qubits):
        conts = colex.vertex_containers(q)
        for i, j in combinations(sorted(conts), 2):
            ci, cj = colex.containers[i], colex.containers[j]
            if ci.is_facet and cj.is_facet:
                continue
            if ci.color == cj.color:
                continue
            k = face_key.get((q, i, j), 0)
            if k != 1:
                v.append(
                    f"vertex {q}: containers {i},{j} share {k} faces through it, want 1"
                )

    for f in colex.faces:
        i, j = f.containers
        want = ColorPair.of(
            colex.containers[i].color, colex.containers[j].color
        ).complement
        if f.label != want:
            v.append(f"face {f.index}: label {f.label} not complementary to containers")

    incident_edges: dict[int, list[Edge]] = {}
    for e in colex.edges:
        present = 0
        for ci in e.containers:
            present |= colex.containers[ci].color.mask
        if present | e.color.mask != 0b1111 or present & e.color.mask:
            v.append(f"edge {e.index}: color {e.color} not the missing container color")
        for q in e.vertices:
            incident_edges.setdefault(q, []).append(e)
    for q in range(colex.n_qubits):
        es = incident_edges.get(q, [])
        colors = [e.color for e in es]
        if len(set(colors)) != len(colors):
            v.append(f"vertex {q}: repeated incident edge color")
        if len(es) > 4:
            v.append(f"vertex {q}: {len(es)} incident edges")
        if colex.is_closed and len(es) != 4:
            v.append(f"vertex {q}: {len(es)} incident edges on a closed colex, want 4")

    if colex.facets:
        colors = sorted(f.color for f in colex.facets)
        if len(colex.facets) != 4 or colors != list(ALL_COLORS):
            v.append("facets: want exactly 4, one per color")
        else:
            for a, b in combinations(colex.facets, 2):
                if not a.qubits & b.qubits:
                    v.append(f"facets {a.index},{b.index}: not adjacent")
    return ValidationReport(v)


def build_tetra15() -> Colex:
    """The 15-qubit tetrahedral colex.

    Qubit i stands for the nonempty subset of {1,2,3,4} with bit mask i+1.
    Cell of color ki holds the subsets containing i, the facet of color ki
    the subsets avoiding i.
    """
    cells = []
    facets = []
    for c in ALL_COLORS:
        bit = 1 << c.value
        cells.append((c, [m - 1 for m in range(1, 16) if m & bit]))
        facets.append((c, [m - 1 for m in range(1, 16) if not m & bit]))
    return Colex(15, cells, facets)


_TO_OFFSETS: tuple[tuple[int, int, int], ...] = tuple(
    sorted(
        {
            (sa * a, sb * b, sc * c)
            for a, b, c in permutations((0, 1, 2))
            for sa in (1, -1)
            for sb in (1, -1)
            for sc in (1, -1)
        }
    )
)


def build_torus_colex(L: int) -> Colex:
    """Closed colex from truncated octahedra tiling the 3-torus.

    Cells sit on the BCC sites of a box of side 4L with periodic wrapping;
    the four colors are the two parity classes of each BCC sublattice. L must
    be even or the coloring would not close up.
    """
    if L < 2 or L % 2:
        raise ColexError("L must be even and at least 2")
    P = 4 * L
    sites: list[tuple[tuple[int, int, int], Color]] = []
    for a, b, c in product(range(L), repeat=3):
        color = Color.K1 if (a + b + c) % 2 == 0 else Color.K2
        sites.append(((4 * a, 4 * b, 4 * c), color))
    for a, b, c in product(range(L), repeat=3):
        color = Color.K3 if (a + b + c) % 2 == 0 else Color.K4
        sites.append(((4 * a + 2, 4 * b + 2, 4 * c + 2), color))

    coords: set[tuple[int, int, int]] = set()
    for (x, y, z), _ in sites:
        for dx, dy, dz in _TO_OFFSETS:
            coords.add(((x + dx) % P, (y + dy) % P, (z + dz) % P))
    ordered = sorted(coords)
    vid = {xyz: i for i, xyz in enumerate(ordered)}

    cell_specs = []
    for (x, y, z), color in sites:
        qs = [vid[((x + dx) % P, (y + dy) % P, (z + dz) % P)] for dx, dy, dz in _TO_OFFSETS]
        cell_specs.append((color, qs))
    geo = TorusGeometry(
        L=L,
        period=P,
        cell_sites=tuple(s for s, _ in sites),
        vertex_coords=tuple(ordered),
    )
    return Colex(len(ordered), cell_specs, geometry=geo)


def spherical_closure(colex: Colex) -> Colex:
    """Close a tetrahedral colex with one extra qubit and four cells.

    Each new cell is an old facet plus the new qubit, keeping the facet's
    color, so every old vertex keeps its container census and the new vertex
    sees all four colors.
    """
    if len(colex.facets) != 4:
        raise ColexError("spherical closure needs a tetrahedral colex")
    new_q = colex.n_qubits
    cell_specs = [(c.color, sorted(c.qubits)) for c in colex.cells]
    for f in colex.facets:
        cell_specs.append((f.color, sorted(f.qubits) + [new_q]))
    return Colex(colex.n_qubits + 1, cell_specs)


@dataclass(frozen=True)
class Plaquette:
    color: Color
    container_index: int
    qubits: frozenset[int]


@dataclass(frozen=True)
class FacetCode:
    """The 2-colex living on one facet of a tetrahedral colex.

    Local qubit i is parent qubit ``qubit_map[i]``. Plaquettes come from
    cells meeting the facet, sides from the other facets; together they tile
    the facet one per remaining color around each local qubit.
    """

    facet_color: Color
    facet_index: int
    qubit_map: tuple[int, ...]
    plaquettes: tuple[Plaquette, ...]
    sides: tuple[Plaquette, ...]

    def validate(self) -> ValidationReport:
        v = []
        n = len(self.qubit_map)
        for q in range(n):
            census: dict[Color, int] = {}
            for p in self.plaquettes + self.sides:
                if q in p.qubits:
                    census[p.color] = census.get(p.color, 0) + 1
            for c in ALL_COLORS:
                if c == self.facet_color:
                    continue
                if census.get(c, 0) != 1:
                    v.append(f"local qubit {q}: color {c} covered {census.get(c, 0)} times")
        return ValidationReport(v)


def facet_code(colex: Colex, r: Container | Color) -> FacetCode:
    """Restrict the colex to facet ``r``: plaquette masks are cell/facet
    intersections with r, re-indexed to local qubits."""
    facet = colex.facet_of_color(r) if isinstance(r, Color) else r
    if not facet.is_facet:
        raise ColexError("facet_code needs a facet")
    qubit_map = tuple(sorted(facet.qubits))
    local = {q: i for i, q in enumerate(qubit_map)}
    plaquettes = []
    sides = []
    for cont in colex.containers:
        if cont.index == facet.index:
            continue
        inter = cont.qubits & facet.qubits
        if not inter:
            continue
        p = Plaquette(cont.color, cont.index, frozenset(local[q] for q in inter))
        (sides if cont.is_facet else plaquettes).append(p)
    return FacetCode(facet.color, facet.index, qubit_map, tuple(plaquettes), tuple(sides))


@dataclass(frozen=True)
class DualVertex:
    index: int
    color: Color
    cell_index: int


@dataclass(frozen=True)
class DualEdge:
    index: int
    label: ColorPair
    endpoints: tuple[int, ...]
    face_index: int

    @property
    def dangling(self) -> bool:
        return len(self.endpoints) == 1


@dataclass(frozen=True)
class DualGraph:
    vertices: tuple[DualVertex, ...]
    edges: tuple[DualEdge, ...]

    @property
    def n_dangling(self) -> int:
        return sum(1 for e in self.edges if e.dangling)


def dual_graph(colex: Colex) -> DualGraph:
    """One dual vertex per cell, one dual edge per face; faces against a
    facet dangle with a single endpoint."""
    cell_to_dual = {c.index: i for i, c in enumerate(colex.cells)}
    vertices = tuple(
        DualVertex(i, c.color, c.index) for i, c in enumerate(colex.cells)
    )
    edges = []
    for f in colex.faces:
        eps = tuple(
            cell_to_dual[ci] for ci in f.containers if ci in cell_to_dual
        )
        edges.append(DualEdge(f.index, f.label, eps, f.index))
    return DualGraph(vertices, tuple(edges))


FORMAT_NAME = "colex"
FORMAT_VERSION = 1


def to_json(colex: Colex) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "n_qubits": colex.n_qubits,
        "cells": [
            {"color": str(c.color), "qubits": sorted(c.qubits)} for c in colex.cells
        ],
        "facets": [
            {"color": str(c.color), "qubits": sorted(c.qubits)} for c in colex.facets
        ],
        "faces": [
            {
                "label": str(f.label),
                "qubits": sorted(f.qubits),
                "containers": list(f.containers),
            }
            for f in colex.faces
        ],
        "edges": [
            {"color": str(e.color), "vertices": list(e.vertices)} for e in colex.edges
        ],
    }


def from_json(doc: dict) -> Colex:
    """Rebuild from cells and facets; stored faces/edges are only a cache and
    are cross-checked against the derivation."""
    if doc.get("format") != FORMAT_NAME:
        raise ColexError("not a colex document")
    if doc.get("version") != FORMAT_VERSION:
        raise ColexError(f"unsupported version {doc.get('version')!r}")
    cells = [(Color.parse(c["color"]), c["qubits"]) for c in doc["cells"]]
    facets = [(Color.parse(c["color"]), c["qubits"]) for c in doc.get("facets", [])]
    colex = Colex(int(doc["n_qubits"]), cells, facets)
    if "faces" in doc:
        stored = sorted(
            (f["label"], tuple(sorted(f["qubits"]))) for f in doc["faces"]
        )
        derived = sorted((str(f.label), tuple(sorted(f.qubits))) for f in colex.faces)
        if stored != derived:
            raise ColexError("stored faces disagree with derivation")
    if "edges" in doc:
        stored = sorted(
            (e["color"], tuple(sorted(e["vertices"]))) for e in doc["edges"]
        )
        derived = sorted((str(e.color), tuple(sorted(e.vertices))) for e in colex.edges)
        if stored != derived:
            raise ColexError("stored edges disagree with derivation")
    return colex


def save_colex(colex: Colex, path: str) -> None:
    import os
    import tempfile

    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(to_json(colex), fh, indent=1, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_colex(path: str) -> Colex:
    with open(path) as fh:
        return from_json(json.load(fh))


def build_tetra_family(size: int) -> Colex:
    """Best-effort tetrahedral family: size 1 is the 15-qubit complex; larger
    sizes cut a corner tetrahedron out of the truncated-octahedra tiling and
    are accepted only if the validator passes."""
    if size < 1:
        raise ColexError("size must be positive")
    if size == 1:
        return build_tetra15()
    # Keep cells whose sites satisfy x,y,z >= 0 and x+y+z <= 4(size-1)+2,
    # then group exposed vertices into four planar facets.
    bound = 4 * (size - 1) + 2
    cells: list[tuple[Color, set[tuple[int, int, int]]]] = []
    span = range(0, bound + 1, 2)
    for x, y, z in product(span, repeat=3):
        on_even = x % 4 == 0 and y % 4 == 0 and z % 4 == 0
        on_odd = x % 4 == 2 and y % 4 == 2 and z % 4 == 2
        if not (on_even or on_odd):
            continue
        if x + y + z > bound:
            continue
        a, b, c = x // 4, y // 4, z // 4
        if on_even:
            color = Color.K1 if (a + b + c) % 2 == 0 else Color.K2
        else:
            color = Color.K3 if (a + b + c) % 2 == 0 else Color.K4
        verts = {(x + dx, y + dy, z + dz) for dx, dy, dz in _TO_OFFSETS}
        cells.append((color, verts))
    used = sorted(set().union(*(v for _, v in cells)))
    vid = {xyz: i for i, xyz in enumerate(used)}
    cell_specs = [(color, [vid[p] for p in verts]) for color, verts in cells]
    # Facet guesses: the four cutting planes.
    planes = {
        Color.K1: lambda p: p[0] <= 0,
        Color.K2: lambda p: p[1] <= 0,
        Color.K3: lambda p: p[2] <= 0,
        Color.K4: lambda p: p[0] + p[1] + p[2] >= bound,
    }
    facet_specs = []
    for color, pred in planes.items():
        facet_specs.append((color, [vid[p] for p in used if pred(p)]))
    out = Colex(len(used), cell_specs, facet_specs)
    report = validate(out)
    if not report.ok:
        raise ColexError(f"family builder failed validation for size {size}:\n{report}")
    return out
