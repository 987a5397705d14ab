"""Local X noise, confined-syndrome statistics, and cluster decompositions.

Sampling is counter-based: every trial draws from a Philox stream keyed by
(master seed, trial index), so any subset of trials can be reproduced in any
order. The decoder works per connected component of the flux, preferring a
representative that stays off some facet the component does not touch.
"""

from __future__ import annotations

import csv
import logging
import os
import tempfile
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .code import (
    CssCode,
    PauliOp,
    SyndromePair,
    connected_components,
    support_constrained_solve,
    syndrome,
)
from .gf2 import BitVec
from .tga import TPattern, e_coset, h_of

logger = logging.getLogger(__name__)


class NoiseError(ValueError):
    """Invalid noise model or an unsatisfiable decoding request."""


@dataclass(frozen=True)
class NoiseModel:
    """Independent X flips at rate p, seeded for counter-based replay."""

    p: float
    seed: int
    kind: str = "iid-X"

    def __post_init__(self) -> None:
        if self.kind != "iid-X":
            raise NoiseError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.p < 1.0:
            raise NoiseError("rate must satisfy 0 <= p < 1")
        if not 0 <= self.seed < 2**64:
            raise NoiseError("seed must fit in 64 bits")


def _trial_rng(model: NoiseModel, trial: int) -> np.random.Generator:
    key = np.array([model.seed, trial], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_one(code: CssCode, model: NoiseModel, trial: int) -> PauliOp:
    """The X error of a single trial, a pure function of (seed, trial)."""
    rng = _trial_rng(model, trial)
    flips = np.flatnonzero(rng.random(code.n) < model.p)
    mask = 0
    for q in flips:
        mask |= 1 << int(q)
    return PauliOp(BitVec(mask, code.n), BitVec.zeros(code.n))


def sample_error(code: CssCode, model: NoiseModel, trials: int) -> Iterator[PauliOp]:
    for t in range(trials):
        yield sample_one(code, model, t)


@dataclass(frozen=True)
class ComponentDecode:
    flux: frozenset[int]
    representative: PauliOp
    avoided_facet: int | None
    atypical: bool


@dataclass(frozen=True)
class DecodeResult:
    components: tuple[ComponentDecode, ...]
    operator: PauliOp


def _facets_touched(code: CssCode, comp: frozenset[int]) -> set[int]:
    faces = code.colex.faces
    facet_ids = {r.index for r in code.colex.facets}
    out: set[int] = set()
    for fi in comp:
        out.update(ci for ci in faces[fi].containers if ci in facet_ids)
    return out


def _decode_component(code: CssCode, comp: frozenset[int]) -> ComponentDecode:
    target = SyndromePair(frozenset(), comp)
    full = BitVec((1 << code.n) - 1, code.n)
    touched = _facets_touched(code, comp)
    for r in code.colex.facets:
        if r.index in touched:
            continue
        allowed = BitVec(full.bits & ~r.mask, code.n)
        rep = support_constrained_solve(code, target, allowed)
        if rep is not None:
            return ComponentDecode(comp, rep, r.index, False)
    atypical = bool(code.colex.facets)
    if atypical:
        logger.warning(
            "flux component of size %d touches every facet; falling back to an "
            "unconstrained preimage",
            len(comp),
        )
    rep = support_constrained_solve(code, target, full)
    if rep is None:
        raise NoiseError("flux component has no X preimage")
    return ComponentDecode(comp, rep, None, atypical)


def decode_components(code: CssCode, flux: Iterable[int]) -> DecodeResult:
    """Per-component representatives and their product.

    Each connected component is solved on its own, off an untouched facet
    when one exists. The product always reproduces the input flux.
    """
    flux = frozenset(flux)
    parts = tuple(
        _decode_component(code, comp) for comp in connected_components(code, flux)
    )
    total = PauliOp(BitVec.zeros(code.n), BitVec.zeros(code.n))
    for part in parts:
        total = total.compose(part.representative)
    if syndrome(code, total).flux != flux:
        raise NoiseError("decoded product does not reproduce the flux")
    return DecodeResult(parts, total)


def component_decoder(code: CssCode, flux: Iterable[int]) -> PauliOp:
    return decode_components(code, flux).operator


@dataclass(frozen=True)
class QSet:
    """Connected 1-skeleton subgraph touching every container with flux."""

    qubits: frozenset[int]
    containers: frozenset[int]


def _skeleton_adjacency(code: CssCode) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {q: [] for q in range(code.n)}
    for e in code.colex.edges:
        a, b = e.vertices
        adj[a].append(b)
        adj[b].append(a)
    return adj


def _bfs_join(
    tree: set[int],
    goal: set[int],
    adj: dict[int, list[int]],
    allowed: set[int] | None,
) -> list[int] | None:
    prev: dict[int, int | None] = {q: None for q in tree}
    frontier = list(tree)
    while frontier:
        nxt: list[int] = []
        for q in frontier:
            for nb in adj[q]:
                if nb in prev or (allowed is not None and nb not in allowed):
                    continue
                prev[nb] = q
                if nb in goal:
                    path = [nb]
                    back = q
                    while back is not None and back not in tree:
                        path.append(back)
                        back = prev[back]
                    return path
                nxt.append(nb)
        frontier = nxt
    return None


def build_qset(code: CssCode, flux: Iterable[int]) -> QSet:
    """Steiner-style join of all containers touched by the flux.

    Growth prefers qubits inside the touched containers, so a connected flux
    yields a QSet inside the touched region; disconnected pieces are joined
    through the shortest available skeleton path.
    """
    flux = sorted(set(flux))
    if not flux:
        return QSet(frozenset(), frozenset())
    colex = code.colex
    touched = sorted({ci for fi in flux for ci in colex.faces[fi].containers})
    membership: dict[int, set[int]] = {}
    region: set[int] = set()
    for ci in touched:
        for q in colex.containers[ci].qubits:
            membership.setdefault(q, set()).add(ci)
            region.add(q)
    adj = _skeleton_adjacency(code)
    start = min(colex.containers[touched[0]].qubits)
    tree = {start}
    covered = set(membership.get(start, ()))
    while covered != set(touched):
        goal = {
            q
            for q, owners in membership.items()
            if owners - covered and q not in tree
        }
        path = _bfs_join(tree, goal, adj, region)
        if path is None:
            path = _bfs_join(tree, goal, adj, None)
        if path is None:
            raise NoiseError("skeleton is disconnected; cannot join flux containers")
        tree.update(path)
        for q in path:
            covered |= membership.get(q, set())
    return QSet(frozenset(tree), frozenset(touched))


def validate_qset(code: CssCode, qset: QSet, flux: Iterable[int]) -> bool:
    """Direct check of both invariants: connectivity and coverage."""
    flux = set(flux)
    touched = {ci for fi in flux for ci in code.colex.faces[fi].containers}
    if qset.containers != touched:
        return False
    for ci in touched:
        if not qset.qubits & code.colex.containers[ci].qubits:
            return False
    if not qset.qubits:
        return not touched
    adj = _skeleton_adjacency(code)
    seen = {min(qset.qubits)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for q in frontier:
            for nb in adj[q]:
                if nb in qset.qubits and nb not in seen:
                    seen.add(nb)
                    nxt.append(nb)
        frontier = nxt
    return seen == set(qset.qubits)


@dataclass(frozen=True)
class ClusterReport:
    """Pairwise interaction classes between flux components.

    z(i, j) is the Z operator on the overlap of the two representatives; the
    pair interacts when that operator is outside the H group of the joint
    flux. Clusters are the transitive closure of interacting pairs, and
    e_parts carries one E-coset representative per cluster when a pattern
    is supplied on a single-logical code.
    """

    components: tuple[frozenset[int], ...]
    representatives: tuple[PauliOp, ...]
    nontrivial_pairs: frozenset[tuple[int, int]]
    clusters: tuple[tuple[int, ...], ...]
    e_parts: tuple[BitVec, ...] | None


def cluster_partition(
    code: CssCode,
    pattern: TPattern | None,
    components: Sequence[Iterable[int]],
) -> ClusterReport:
    comps = tuple(frozenset(c) for c in components)
    reps = tuple(component_decoder(code, c) for c in comps)
    nontrivial: set[tuple[int, int]] = set()
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            overlap = BitVec(reps[i].x.bits & reps[j].x.bits, code.n)
            if not h_of(code, comps[i] | comps[j]).contains(overlap):
                nontrivial.add((i, j))
    parent = list(range(len(comps)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in nontrivial:
        parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(comps)):
        groups.setdefault(find(i), []).append(i)
    clusters = tuple(tuple(sorted(g)) for g in sorted(groups.values()))
    e_parts: tuple[BitVec, ...] | None = None
    if pattern is not None and code.n_logical == 1:
        parts = []
        for cluster in clusters:
            alpha = BitVec.zeros(code.n)
            for i in cluster:
                alpha ^= reps[i].x
            parts.append(e_coset(code, pattern, alpha).representative)
        e_parts = tuple(parts)
    return ClusterReport(comps, reps, frozenset(nontrivial), clusters, e_parts)


@dataclass(frozen=True)
class TrialRow:
    trial: int
    error_weight: int
    flux_weight: int
    component_count: int
    largest_component: int


@dataclass(frozen=True)
class ConfinementStats:
    model: NoiseModel
    trials: int
    rows: tuple[TrialRow, ...]
    size_histogram: dict[int, int]

    @property
    def mean_flux_weight(self) -> float:
        if not self.rows:
            return 0.0
        return sum(r.flux_weight for r in self.rows) / len(self.rows)


def _incident_faces(code: CssCode) -> list[list[int]]:
    table: list[list[int]] = [[] for _ in range(code.n)]
    for f in code.colex.faces:
        for q in f.qubits:
            table[q].append(f.index)
    return table


def confinement_stats(code: CssCode, model: NoiseModel, trials: int) -> ConfinementStats:
    """Component-count and component-size statistics over sampled errors."""
    incident = _incident_faces(code)
    hist: Counter[int] = Counter()
    rows = []
    for t in range(trials):
        rng = _trial_rng(model, t)
        flips = np.flatnonzero(rng.random(code.n) < model.p)
        parity: Counter[int] = Counter()
        for q in flips:
            for fi in incident[int(q)]:
                parity[fi] ^= 1
        flux = frozenset(fi for fi, v in parity.items() if v)
        comps = connected_components(code, flux) if flux else []
        sizes = [len(c) for c in comps]
        for s in sizes:
            hist[s] += 1
        rows.append(
            TrialRow(
                trial=t,
                error_weight=len(flips),
                flux_weight=len(flux),
                component_count=len(sizes),
                largest_component=max(sizes, default=0),
            )
        )
    return ConfinementStats(model, trials, tuple(rows), dict(hist))


CSV_COLUMNS = (
    "trial",
    "master_seed",
    "error_weight",
    "flux_weight",
    "component_count",
    "largest_component",
)


def write_stats_csv(stats: ConfinementStats, path: str) -> None:
    """Atomic CSV dump, one row per trial, seeds recorded per row."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for r in stats.rows:
                writer.writerow(
                    [
                        r.trial,
                        stats.model.seed,
                        r.error_weight,
                        r.flux_weight,
                        r.component_count,
                        r.largest_component,
                    ]
                )
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass(frozen=True)
class LocalityRecord:
    flux_size: int
    touched_qubits: int
    e_support: int


@dataclass(frozen=True)
class LocalityReport:
    records: tuple[LocalityRecord, ...]
    geo_constant: float


def locality_report(
    code: CssCode,
    pattern: TPattern,
    model: NoiseModel,
    trials: int,
) -> LocalityReport:
    """Measured support overhead of per-cluster E representatives.

    For each sampled cluster, compares the E-coset representative support
    against the total size of the touched containers; the reported constant
    is the largest per-face slack seen, an empirical figure rather than an
    assumed bound.
    """
    records = []
    worst = 0.0
    for err in sample_error(code, model, trials):
        flux = syndrome(code, err).flux
        if not flux:
            continue
        comps = connected_components(code, flux)
        report = cluster_partition(code, pattern, comps)
        assert report.e_parts is not None
        for cluster, z in zip(report.clusters, report.e_parts):
            cflux: set[int] = set()
            for i in cluster:
                cflux |= report.components[i]
            touched = {ci for fi in cflux for ci in code.colex.faces[fi].containers}
            touched_qubits = sum(len(code.colex.containers[ci].qubits) for ci in touched)
            rec = LocalityRecord(len(cflux), touched_qubits, z.weight)
            records.append(rec)
            if rec.flux_size:
                worst = max(worst, (rec.e_support - rec.touched_qubits) / rec.flux_size)
    return LocalityReport(tuple(records), max(0.0, worst))
