"""Linked flux loops on a closed torus colex and the charge they exchange.

A membrane for a flux label h is the set of faces carrying the complementary
label whose cell-cell bond crosses a flat disc template. The X product over
those faces excites a closed loop of h-labeled faces along the disc boundary.
When two such discs interlock, the membrane operators overlap on a string of
qubits; the Z operator on that string carries a point charge, read off by
commutation signs against probe surfaces built for all six flux labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .code import ChargeLabel, CssCode, PauliOp, syndrome
from .colex import ALL_PAIRS, Colex, ColorPair, TorusGeometry
from .gf2 import BitVec


class LinkingError(ValueError):
    pass


def linking_charge(h1: ColorPair, h2: ColorPair) -> ChargeLabel:
    """Charge exchanged by two flux loops of odd linking number.

    Equal labels exchange nothing; labels sharing one color exchange the
    missing color; disjoint labels exchange the class of either label.
    """
    if h1 == h2:
        return ChargeLabel.zero()
    if h1.mask & h2.mask:
        return ChargeLabel(0b1111 ^ (h1.mask | h2.mask))
    return ChargeLabel(h1.mask)


def net_exchange(links: Iterable[tuple[ColorPair, ColorPair, int]]) -> ChargeLabel:
    """Total charge over a loop decomposition with pairwise linking numbers.

    Even-linking pairs contribute nothing; the rest sum in the charge group.
    """
    total = ChargeLabel.zero()
    for h1, h2, linking in links:
        if linking & 1:
            total = total + linking_charge(h1, h2)
    return total


Window = tuple[tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class Membrane:
    """Disc-shaped face set; the X product over ``faces`` is its operator."""

    label: ColorPair
    axis: int
    level: float
    window: Window
    faces: tuple[int, ...]
    support: BitVec
    flux: frozenset[int]


@dataclass(frozen=True)
class Probe:
    """Closed test surface: a full lattice cross-section or a box boundary."""

    kind: str
    axis: int = 0
    level: float = 0.0
    box: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind not in ("plane", "box"):
            raise LinkingError(f"unknown probe kind: {self.kind!r}")
        if self.kind == "box" and (self.box is None or len(self.box) != 3):
            raise LinkingError("box probe needs three coordinate ranges")


@dataclass(frozen=True)
class LinkedPairSetup:
    code: CssCode
    m1: Membrane
    m2: Membrane
    string: BitVec
    linking_number: int
    probes: tuple[Probe, ...] = field(compare=False)


# Disc templates in lattice coordinates, valid for every L >= 4. The first
# disc lies in a z plane; the second threads it through a y plane, with one
# leg piercing the first window and the other passing outside. The control
# variant is a parallel z-plane disc, trivially unlinked with the first.
_DISC1 = (2, 5.0, ((0.5, 10.5), (0.5, 10.5)))
_DISC2 = (1, 5.0, ((4.5, 14.5), (0.5, 9.5)))
_DISC2_APART = (2, 11.0, ((0.5, 8.5), (0.5, 8.5)))
_PLANE_LEVEL = 7.0
_BOX = ((1.0, 7.0), (1.0, 9.0), (1.0, 9.0))


def _mi(d: float, period: int) -> float:
    """Minimum-image displacement on the periodic axis."""
    return (d + period / 2) % period - period / 2


def _torus(code: CssCode) -> tuple[Colex, TorusGeometry]:
    colex = code.colex
    geo = colex.geometry
    if geo is None or not colex.is_closed:
        raise LinkingError("linked loops need a closed torus colex")
    if geo.L < 4:
        raise LinkingError("lattice too small to separate loops; need L >= 4")
    return colex, geo


def _check_shift(shift: Sequence[int]) -> tuple[int, int, int]:
    sx, sy, sz = shift
    if any(s % 4 for s in (sx, sy, sz)) or (sx + sy + sz) % 8:
        raise LinkingError(
            "shift components must be multiples of 4 with sum a multiple of 8"
        )
    return sx, sy, sz


def _placed(template, shift: tuple[int, int, int]):
    axis, level, window = template
    axes = tuple(a for a in range(3) if a != axis)
    win = tuple(
        (lo + shift[axes[k]], hi + shift[axes[k]])
        for k, (lo, hi) in enumerate(window)
    )
    return axis, level + shift[axis], (win[0], win[1])


def _crossing_faces(colex: Colex, geo: TorusGeometry, h: ColorPair, axis: int,
                    level: float, window: Window | None):
    """Faces between h-colored cells whose bond crosses the disc."""
    want = h.complement
    P = geo.period
    axes = tuple(a for a in range(3) if a != axis)
    if window is not None:
        (umin, umax), (vmin, vmax) = window
        cu, cv = (umin + umax) / 2, (vmin + vmax) / 2
    out = []
    for f in colex.faces:
        if f.label != want:
            continue
        i, j = f.containers
        p, q = geo.cell_sites[i], geo.cell_sites[j]
        d = tuple(_mi(q[k] - p[k], P) for k in range(3))
        if d[axis] == 0:
            continue
        lev = p[axis] + _mi(level - p[axis], P)
        t = (lev - p[axis]) / d[axis]
        if not 0.0 < t < 1.0:
            continue
        if window is not None:
            u = cu + _mi(p[axes[0]] + t * d[axes[0]] - cu, P)
            v = cv + _mi(p[axes[1]] + t * d[axes[1]] - cv, P)
            if not (umin < u < umax and vmin < v < vmax):
                continue
        out.append(f)
    return tuple(out)


def _membrane(code: CssCode, colex: Colex, geo: TorusGeometry, h: ColorPair,
              axis: int, level: float, window: Window) -> Membrane:
    faces = _crossing_faces(colex, geo, h, axis, level, window)
    if not faces:
        raise LinkingError(f"empty membrane for label {h} at the given disc")
    mask = 0
    for f in faces:
        mask ^= f.mask
    support = BitVec(mask, code.n)
    s = syndrome(code, PauliOp(support, BitVec.zeros(code.n)))
    if s.charge:
        raise LinkingError("membrane operator excited cells")
    labels = {colex.faces[fi].label for fi in s.flux}
    if labels != {h}:
        raise LinkingError(f"membrane boundary carries labels {labels}, not {h}")
    return Membrane(h, axis, level, window, tuple(f.index for f in faces),
                    support, s.flux)


def _loop_path(colex: Colex, geo: TorusGeometry, flux: frozenset[int]):
    """Order loop faces into a closed contractible cell path, unwrapped."""
    P = geo.period
    by_cell: dict[int, list[int]] = {}
    for fi in flux:
        for c in colex.faces[fi].containers:
            by_cell.setdefault(c, []).append(fi)
    if any(len(v) != 2 for v in by_cell.values()):
        raise LinkingError("membrane boundary is not a simple loop")
    start_face = min(flux)
    start_cell = colex.faces[start_face].containers[0]
    pos = [tuple(float(x) for x in geo.cell_sites[start_cell])]
    cur_face, cur_cell = start_face, colex.faces[start_face].containers[1]
    seen = {start_face}
    while True:
        prev = pos[-1]
        site = geo.cell_sites[cur_cell]
        pos.append(tuple(
            prev[k] + _mi(site[k] - (prev[k] % P), P) for k in range(3)
        ))
        a, b = by_cell[cur_cell]
        nxt = b if a == cur_face else a
        if nxt == start_face:
            break
        seen.add(nxt)
        f = colex.faces[nxt]
        cur_face = nxt
        cur_cell = f.containers[1] if f.containers[0] == cur_cell else f.containers[0]
    if len(seen) != len(flux):
        raise LinkingError("membrane boundary has more than one loop")
    net = tuple(pos[-1][k] - pos[0][k] for k in range(3))
    if any(net):
        raise LinkingError(f"boundary loop is not contractible, winding {net}")
    return pos


def _disc_crossings(path, axis: int, level: float, window: Window,
                    period: int) -> int:
    """Crossing count of a closed cell path through a disc template."""
    (umin, umax), (vmin, vmax) = window
    cu, cv = (umin + umax) / 2, (vmin + vmax) / 2
    axes = tuple(a for a in range(3) if a != axis)
    count = 0
    for p, q in zip(path, path[1:]):
        d = tuple(q[k] - p[k] for k in range(3))
        if d[axis] == 0:
            continue
        lev = p[axis] + _mi(level - p[axis], period)
        t = (lev - p[axis]) / d[axis]
        if not 0.0 < t < 1.0:
            continue
        u = cu + _mi(p[axes[0]] + t * d[axes[0]] - cu, period)
        v = cv + _mi(p[axes[1]] + t * d[axes[1]] - cv, period)
        if umin < u < umax and vmin < v < vmax:
            count += 1
    return count


def _string_like(colex: Colex, mask: int) -> bool:
    """Whether the qubit set chains together through shared cells."""
    qs = [q for q in range(colex.n_qubits) if mask >> q & 1]
    if not qs:
        return True
    qset = set(qs)
    seen = {qs[0]}
    todo = [qs[0]]
    while todo:
        q = todo.pop()
        for ci in colex.vertex_containers(q):
            for r in colex.containers[ci].qubits:
                if r in qset and r not in seen:
                    seen.add(r)
                    todo.append(r)
    return len(seen) == len(qs)


def build_linked_pair(code: CssCode, h1: ColorPair, h2: ColorPair, *,
                      linked: bool = True,
                      shift: Sequence[int] = (0, 0, 0)) -> LinkedPairSetup:
    """Two disc membranes with linking number 1 (or 0 for the control).

    ``shift`` translates the whole arrangement; components must be multiples
    of 4 with sum a multiple of 8 so every cell keeps its color.
    """
    colex, geo = _torus(code)
    sh = _check_shift(shift)
    m1 = _membrane(code, colex, geo, h1, *_placed(_DISC1, sh))
    template2 = _DISC2 if linked else _DISC2_APART
    m2 = _membrane(code, colex, geo, h2, *_placed(template2, sh))
    path1 = _loop_path(colex, geo, m1.flux)
    path2 = _loop_path(colex, geo, m2.flux)
    lk = _disc_crossings(path2, m1.axis, m1.level, m1.window, geo.period)
    lk_back = _disc_crossings(path1, m2.axis, m2.level, m2.window, geo.period)
    want = 1 if linked else 0
    if lk != want or lk_back != want:
        raise LinkingError(
            f"loops have crossing counts ({lk}, {lk_back}), expected {want}"
        )
    string = BitVec(m1.support.bits & m2.support.bits, code.n)
    if not linked and not string.is_zero:
        raise LinkingError("control membranes overlap")
    if not _string_like(colex, string.bits):
        raise LinkingError("membrane overlap is not a single string-like region")
    probes = (
        Probe("plane", axis=0, level=_PLANE_LEVEL + sh[0]),
        Probe("box", box=tuple(
            (lo + sh[k], hi + sh[k]) for k, (lo, hi) in enumerate(_BOX)
        )),
    )
    return LinkedPairSetup(code, m1, m2, string, lk, probes)


def _box_contains(site, box, period: int) -> bool:
    for k in range(3):
        ctr = (box[k][0] + box[k][1]) / 2
        x = ctr + _mi(site[k] - ctr, period)
        if not box[k][0] < x < box[k][1]:
            return False
    return True


def _probe_support(colex: Colex, geo: TorusGeometry, h3: ColorPair,
                   probe: Probe) -> int:
    if probe.kind == "plane":
        faces = _crossing_faces(colex, geo, h3, probe.axis, probe.level, None)
        mask = 0
        for f in faces:
            mask ^= f.mask
        return mask
    want = h3.complement
    mask = 0
    for f in colex.faces:
        if f.label != want:
            continue
        i, j = f.containers
        if _box_contains(geo.cell_sites[i], probe.box, geo.period) != \
                _box_contains(geo.cell_sites[j], probe.box, geo.period):
            mask ^= f.mask
    return mask


def _centroid(coords, period: int):
    ref = coords[0]
    return tuple(
        ref[k] + sum(_mi(c[k] - ref[k], period) for c in coords) / len(coords)
        for k in range(3)
    )


def _pierced_once(qubit_coords, cell_coords, probe: Probe,
                  period: int) -> bool:
    """Whether the probe surface passes between the string's excited cells.

    Necessary for an odd crossing count: the surface must split the charge
    cells within the string's own neighborhood. All coordinates are
    unwrapped around the string's qubit centroid, so a probe on the far
    side of the torus does not pass by wrapping around.
    """
    ref = _centroid(qubit_coords, period)
    cells = [
        tuple(ref[k] + _mi(c[k] - ref[k], period) for k in range(3))
        for c in cell_coords
    ]
    if probe.kind == "box":
        inside = {_box_contains(c, probe.box, period) for c in cells}
        return len(inside) == 2
    a = probe.axis
    qs = [ref[a] + _mi(q[a] - ref[a], period) for q in qubit_coords]
    xs = [c[a] for c in cells]
    lev = ref[a] + _mi(probe.level - ref[a], period)
    if not min(qs + xs) < lev < max(qs + xs):
        return False
    return any(x < lev for x in xs) and any(x > lev for x in xs)


def transferred_charge(setup: LinkedPairSetup,
                       probe: Probe | None = None) -> ChargeLabel:
    """Charge carried by the membranes' overlap string, read through a probe.

    The commutation sign against probe operators for all six flux labels is
    a character of the flux group exactly when the probe surface is pierced
    once; the matching charge class is returned.
    """
    code = setup.code
    colex, geo = _torus(code)
    if probe is None:
        probe = setup.probes[0]
    z_string = PauliOp(BitVec.zeros(code.n), setup.string)
    endpoint_cells = sorted(syndrome(code, z_string).charge)
    if endpoint_cells:
        qubit_coords = [geo.vertex_coords[q] for q in setup.string.indices()]
        cell_coords = [geo.cell_sites[c] for c in endpoint_cells]
        if not _pierced_once(qubit_coords, cell_coords, probe, geo.period):
            raise LinkingError("probe does not pierce the string exactly once")
    signs = {}
    for h3 in ALL_PAIRS:
        overlap = setup.string.bits & _probe_support(colex, geo, h3, probe)
        signs[h3] = -1 if overlap.bit_count() & 1 else 1
    hits = [
        m for m in range(8)
        if all(
            (-1 if (m & h.mask).bit_count() & 1 else 1) == s
            for h, s in signs.items()
        )
    ]
    if len(hits) != 1:
        raise LinkingError("probe does not pierce the string exactly once")
    return ChargeLabel(hits[0])


def lambda_table(code: CssCode, *, linked: bool = True, probe_index: int = 0,
                 shift: Sequence[int] = (0, 0, 0)):
    """Measured charge for every ordered pair of flux labels."""
    out: dict[tuple[ColorPair, ColorPair], ChargeLabel] = {}
    for h1 in ALL_PAIRS:
        for h2 in ALL_PAIRS:
            setup = build_linked_pair(code, h1, h2, linked=linked, shift=shift)
            out[(h1, h2)] = transferred_charge(setup, setup.probes[probe_index])
    return out
