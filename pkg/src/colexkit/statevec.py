"""Dense statevector oracle for small codes.

States are numpy complex arrays of length 2^n with qubit q at bit q of the
index. Everything here is exact up to float rounding, which makes this
module the ground truth the GF(2) algebra is tested against: transversal
diagonal gates, code-space projectors, group-averaged channels and trace
distances.

The only phases that ever appear are eighth roots of unity, so diagonal
gates are tracked as per-qubit T exponents mod 8.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .code import CssCode, PauliOp, syndrome
from .gf2 import BitMatrix, BitVec, in_span, kernel_basis, row_reduce
from .tga import Coset, TPattern, e_coset, e_of, is_tolerable

MAX_QUBITS = 20

_HALF_SQRT2 = np.sqrt(0.5)
# exact eighth roots of unity: the even powers are exact, the odd ones
# carry only the sqrt(1/2) rounding
_PHASES = np.array(
    [
        1,
        _HALF_SQRT2 * (1 + 1j),
        1j,
        _HALF_SQRT2 * (-1 + 1j),
        -1,
        _HALF_SQRT2 * (-1 - 1j),
        -1j,
        _HALF_SQRT2 * (1 - 1j),
    ],
    dtype=np.complex128,
)
_OMEGA = _PHASES[1]


class StatevecError(ValueError):
    pass


def _check_n(n: int) -> None:
    if n > MAX_QUBITS:
        raise StatevecError(f"{n} qubits exceeds the dense-simulation limit {MAX_QUBITS}")


@lru_cache(maxsize=512)
def _exp_table(n: int, exps: tuple[int, ...]) -> np.ndarray:
    """E[v] = sum of exps[q] over set bits of v, mod 8."""
    e = np.zeros(1, dtype=np.int64)
    for q in range(n):
        e = np.concatenate([e, e + exps[q]])
    return np.mod(e, 8).astype(np.int8)


def basis_state(n: int, v: int = 0) -> np.ndarray:
    _check_n(n)
    state = np.zeros(1 << n, dtype=np.complex128)
    state[v] = 1.0
    return state


def _n_of(state: np.ndarray) -> int:
    return int(len(state)).bit_length() - 1


def apply_diagonal(state: np.ndarray, exps: Sequence[int]) -> np.ndarray:
    """Per-qubit T^exps[q], all diagonal, exponents mod 8."""
    n = _n_of(state)
    table = _exp_table(n, tuple(int(e) % 8 for e in exps))
    return state * _PHASES[table]


def apply_x_mask(state: np.ndarray, mask: int) -> np.ndarray:
    idx = np.arange(len(state)) ^ mask
    return state[idx]


def apply_z_mask(state: np.ndarray, mask: int) -> np.ndarray:
    n = _n_of(state)
    exps = tuple(4 if mask >> q & 1 else 0 for q in range(n))
    return apply_diagonal(state, exps)


def apply_cz_pairs(state: np.ndarray, pairs: Iterable[tuple[int, int]]) -> np.ndarray:
    idx = np.arange(len(state))
    parity = np.zeros(len(state), dtype=np.int64)
    for i, j in pairs:
        parity ^= (idx >> i) & (idx >> j) & 1
    return np.where(parity, -state, state)


def apply_cnot(state: np.ndarray, control: int, target: int) -> np.ndarray:
    idx = np.arange(len(state))
    src = idx ^ (((idx >> control) & 1) << target)
    return state[src]


def tensor(state_a: np.ndarray, state_b: np.ndarray) -> np.ndarray:
    """Joint state with system A at the low bits."""
    _check_n(_n_of(state_a) + _n_of(state_b))
    return np.kron(state_b, state_a)


def apply_transversal_T(pattern: TPattern, state: np.ndarray, power: int = 1) -> np.ndarray:
    exps = tuple(e * power for e in pattern.u_exponents())
    return apply_diagonal(state, exps)


def _a_alpha_exps(pattern: TPattern, alpha: BitVec) -> tuple[int, ...]:
    """The diagonal remnant of conjugating X_alpha through the gate:
    T^(2 k b_q) on the support of alpha."""
    return tuple(
        (2 * pattern.exponent(q)) % 8 if alpha.bit(q) else 0 for q in range(pattern.n)
    )


def _span_ints(rows: Sequence[int]) -> list[int]:
    out = [0]
    for r in rows:
        out.extend(v ^ r for v in list(out))
    return out


def logical_basis(code: CssCode) -> tuple[np.ndarray, np.ndarray]:
    """Encoded Z basis: project a computational seed onto the code space
    with (1+s)/2 over all generators plus Z_logical, retrying seeds in
    order until the projection survives; then |1> = X_logical |0>."""
    cached = getattr(code, "_sv_logical_basis", None)
    if cached is not None:
        return cached
    n = code.n
    _check_n(n)
    if code.logical_x is None or code.n_logical != 1:
        raise StatevecError("logical basis needs exactly one facet logical qubit")
    x_rows = row_reduce(code.sx).rows
    z_rows = list(row_reduce(code.sz).rows) + [code.logical_z.z.bits]
    for seed in range(1 << n):
        state = basis_state(n, seed)
        for m in x_rows:
            state = (state + apply_x_mask(state, m)) / 2
        for m in z_rows:
            state = (state + apply_z_mask(state, m)) / 2
        norm = np.linalg.norm(state)
        if norm > 1e-9:
            v0 = state / norm
            v1 = apply_x_mask(v0, code.logical_x.x.bits)
            code._sv_logical_basis = (v0, v1)
            return v0, v1
    raise StatevecError("no seed survives the code-space projection")


def encoded_inputs(code: CssCode) -> list[tuple[str, np.ndarray]]:
    """The four tomographic inputs for single-logical-qubit channel checks."""
    v0, v1 = logical_basis(code)
    s = 1 / np.sqrt(2)
    return [
        ("0", v0),
        ("1", v1),
        ("+", s * (v0 + v1)),
        ("+i", s * (v0 + 1j * v1)),
    ]


def diagonal_leakage(code: CssCode, exps: Sequence[int]) -> float:
    """How far the diagonal gate takes the code space out of itself:
    max over the logical basis of 1 - |P psi|^2."""
    v0, v1 = logical_basis(code)
    worst = 0.0
    for psi in (v0, v1):
        out = apply_diagonal(psi, exps)
        kept = abs(np.vdot(v0, out)) ** 2 + abs(np.vdot(v1, out)) ** 2
        worst = max(worst, 1.0 - float(kept))
    return worst


@dataclass(frozen=True)
class Mixture:
    """A uniform-or-weighted ensemble of pure states standing in for a
    density matrix; channels act on it state by state."""

    states: tuple[np.ndarray, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.states) != len(self.weights):
            raise StatevecError("states and weights must align")

    @classmethod
    def pure(cls, state: np.ndarray) -> "Mixture":
        return cls((state,), (1.0,))


def depolarize_sx(code: CssCode, mix: Mixture | np.ndarray) -> Mixture:
    """Average over the X stabilizer group, enumerated from a reduced basis."""
    if isinstance(mix, np.ndarray):
        mix = Mixture.pure(mix)
    elems = _span_ints(row_reduce(code.sx).rows)
    states = []
    weights = []
    for psi, w in zip(mix.states, mix.weights):
        for s in elems:
            states.append(apply_x_mask(psi, s))
            weights.append(w / len(elems))
    return Mixture(tuple(states), tuple(weights))


def _quotient_reps(coset: Coset, sz: BitMatrix) -> list[int]:
    """Distinct coset elements modulo the Z stabilizers. Z stabilizers act
    trivially on encoded states, so averaging over these realizes the full
    subgroup average exactly."""
    acc = list(row_reduce(sz).rows)
    quotient: list[int] = []
    for r in coset.subgroup.basis.rows:
        m = BitMatrix(acc, coset.subgroup.basis.width)
        v = BitVec(r, coset.subgroup.basis.width)
        if not in_span(m, v):
            acc.append(r)
            quotient.append(r)
    rep = coset.representative.bits
    return [rep ^ c for c in _span_ints(quotient)]


def depolarize_coset(code: CssCode, coset: Coset, mix: Mixture | np.ndarray) -> Mixture:
    """Average Z_z over a Z-mask coset; exact on encoded states via the
    stabilizer quotient."""
    if isinstance(mix, np.ndarray):
        mix = Mixture.pure(mix)
    reps = _quotient_reps(coset, code.sz)
    states = []
    weights = []
    for psi, w in zip(mix.states, mix.weights):
        for z in reps:
            states.append(apply_z_mask(psi, z))
            weights.append(w / len(reps))
    return Mixture(tuple(states), tuple(weights))


def mixture_trace_distance(a: Mixture, b: Mixture) -> float:
    """Exact trace distance via the span of all involved pure states.

    States appearing on both sides cancel by net weight before any linear
    algebra runs, so comparing a mixture against itself is exactly zero.
    """
    order: dict[bytes, int] = {}
    states: list[np.ndarray] = []
    nets: list[float] = []
    for mix, sign in ((a, 1.0), (b, -1.0)):
        for psi, w in zip(mix.states, mix.weights):
            key = (psi + 0.0).tobytes()  # normalizes -0.0 so equal states match
            if key not in order:
                order[key] = len(states)
                states.append(psi)
                nets.append(0.0)
            nets[order[key]] += sign * w
    keep = [i for i, w in enumerate(nets) if w != 0.0]
    if not keep:
        return 0.0
    cols = np.stack([states[i] for i in keep], axis=1)
    q, _ = np.linalg.qr(cols)
    c = q.conj().T @ cols
    d = np.zeros((c.shape[0], c.shape[0]), dtype=np.complex128)
    for j, i in enumerate(keep):
        v = c[:, j]
        d += nets[i] * np.outer(v, v.conj())
    eig = np.linalg.eigvalsh((d + d.conj().T) / 2)
    return float(0.5 * np.abs(eig).sum())


@dataclass
class Theorem1Report:
    labels: tuple[str, ...]
    distances: tuple[float, ...]
    tolerable: bool
    omit_w: bool

    @property
    def max_distance(self) -> float:
        return max(self.distances)

    def __str__(self) -> str:
        rows = ", ".join(f"|{l}>: {d:.3e}" for l, d in zip(self.labels, self.distances))
        kind = "tolerable" if self.tolerable else "non-tolerable"
        return f"{kind}, max {self.max_distance:.3e} ({rows})"


def theorem1_check(
    code: CssCode, pattern: TPattern, x: PauliOp, omit_w: bool = False
) -> Theorem1Report:
    """Compare both sides of the propagation identity on the tomographic
    inputs. Left: average U x rho x U' over the X stabilizers. Right:
    x after the residual-coset average of U w rho w' U', where w is the
    identity for tolerable errors and the gate-logical commutator of
    X_logical otherwise. Setting omit_w exposes the non-tolerable
    correction by dropping w.
    """
    if not x.z.is_zero:
        raise StatevecError("theorem1_check takes an X-type error")
    exps = pattern.u_exponents()
    neg = tuple(-e % 8 for e in exps)
    tol = is_tolerable(code, x.x)
    coset = e_of(code, pattern, syndrome(code, x).flux)
    lam = code.logical_x.x.bits
    labels = []
    dists = []
    for label, psi in encoded_inputs(code):
        lhs_seed = apply_diagonal(apply_x_mask(psi, x.x.bits), exps)
        lhs = depolarize_sx(code, lhs_seed)
        if tol or omit_w:
            psi_w = psi
        else:
            psi_w = apply_diagonal(
                apply_x_mask(apply_diagonal(apply_x_mask(psi, lam), exps), lam), neg
            )
        rhs_mix = depolarize_coset(code, coset, apply_diagonal(psi_w, exps))
        rhs = Mixture(
            tuple(apply_x_mask(s, x.x.bits) for s in rhs_mix.states), rhs_mix.weights
        )
        labels.append(label)
        dists.append(mixture_trace_distance(lhs, rhs))
    return Theorem1Report(tuple(labels), tuple(dists), tol, omit_w)


_GATE_NAMES = {0: "I", 1: "T", 2: "P", 3: "PT", 4: "Z", 5: "ZT", 6: "Pdag", 7: "Tdag"}


@dataclass
class LogicalActionReport:
    name: str | None
    theta: float
    deviation: float
    leakage: float
    matrix: np.ndarray

    @property
    def ok(self) -> bool:
        return self.name is not None and self.deviation < 1e-8


def diagonal_logical_action(
    code: CssCode,
    exps: Sequence[int],
    cz_pairs: Sequence[tuple[int, int]] = (),
) -> LogicalActionReport:
    """Identify the encoded action of a physical diagonal circuit as a
    logical diagonal gate up to global phase, with a leakage figure."""
    v0, v1 = logical_basis(code)

    def run(state: np.ndarray) -> np.ndarray:
        out = apply_diagonal(state, exps)
        if cz_pairs:
            out = apply_cz_pairs(out, cz_pairs)
        return out

    u0, u1 = run(v0), run(v1)
    m = np.array(
        [[np.vdot(v0, u0), np.vdot(v0, u1)], [np.vdot(v1, u0), np.vdot(v1, u1)]]
    )
    leakage = max(
        1.0 - float(abs(m[0, 0]) ** 2 + abs(m[1, 0]) ** 2),
        1.0 - float(abs(m[0, 1]) ** 2 + abs(m[1, 1]) ** 2),
    )
    dev = max(abs(m[0, 1]), abs(m[1, 0]), abs(abs(m[0, 0]) - 1), abs(abs(m[1, 1]) - 1))
    name = None
    theta = float(np.angle(m[0, 0]))
    if abs(m[0, 0]) > 0.5 and abs(m[1, 1]) > 0.5:
        ratio = m[1, 1] / m[0, 0]
        j = int(np.argmin([abs(ratio - _PHASES[k]) for k in range(8)]))
        dev = max(dev, float(abs(ratio - _PHASES[j])))
        name = _GATE_NAMES[j]
        s = 1 / np.sqrt(2)
        plus = s * (v0 + v1)
        predicted = s * (m[0, 0] * v0 + m[1, 1] * v1)
        dev = max(dev, 1.0 - float(abs(np.vdot(predicted, run(plus)))))
    dev = max(dev, leakage)
    return LogicalActionReport(name, theta, float(dev), float(leakage), m)


def logical_action_check(code: CssCode, pattern: TPattern, power: int = 1) -> LogicalActionReport:
    exps = tuple(e * power for e in pattern.u_exponents())
    return diagonal_logical_action(code, exps)


def residual_diagonal_fit(code: CssCode, pattern: TPattern, alpha: BitVec) -> float:
    """Relative misfit of the conjugation remnant against the residual
    coset's Z operators, both restricted to the Z-stabilizer-fixed
    subspace where the projector lives. Near zero means the remnant times
    the projector lies in the coset's operator span."""
    n = code.n
    _check_n(n)
    points = _span_ints(kernel_basis(code.sz).rows)
    exps = _a_alpha_exps(pattern, alpha)
    table = {v: 0 for v in points}
    for v in points:
        acc = 0
        m = v & alpha.bits
        while m:
            low = m & -m
            acc += exps[low.bit_length() - 1]
            m ^= low
        table[v] = (-acc) % 8
    d = np.array([_PHASES[table[v]] for v in points])
    coset = e_coset(code, pattern, alpha)
    reps = _quotient_reps(coset, code.sz)
    chi = np.array(
        [[-1.0 if (z & v).bit_count() % 2 else 1.0 for z in reps] for v in points]
    )
    coeffs = chi.conj().T @ d / len(points)
    recon = chi @ coeffs
    return float(np.linalg.norm(d - recon) / np.linalg.norm(d))


def conjugated_check_expectation(
    code: CssCode, pattern: TPattern, alpha: BitVec, beta: int, state: np.ndarray
) -> complex:
    """<A X_beta A'> on the given state, A being the conjugation remnant
    of alpha under the transversal gate."""
    exps = _a_alpha_exps(pattern, alpha)
    neg = tuple(-e % 8 for e in exps)
    out = apply_diagonal(state, neg)
    out = apply_x_mask(out, beta)
    out = apply_diagonal(out, exps)
    return complex(np.vdot(state, out))
