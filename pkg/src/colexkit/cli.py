"""One executable binding the toolkit: complex validation, syndrome queries,
tolerability and residue cosets, Clifford propagation, statevector oracles,
noise Monte Carlo, and the linking-charge table.

Exit codes: 0 success or all checks passed, 1 a check failed, 2 usage error.
Stochastic subcommands require an explicit seed and print byte-identical
reports when rerun with the same one.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .cliffprop import (
    CNot,
    FacetCP,
    FacetP,
    PropagationError,
    StandardP,
    conjugate_pauli,
    joint_syndrome,
    syndrome_map,
)
from .code import CssCode, PauliOp, parse_pauli, syndrome
from .colex import (
    ALL_COLORS,
    ALL_PAIRS,
    Colex,
    ColexError,
    build_tetra15,
    build_torus_colex,
    validate,
)
from .gf2 import BitVec, rank
from .linking import LinkingError, lambda_table, linking_charge
from .noise import NoiseError, NoiseModel, confinement_stats, write_stats_csv
from .statevec import StatevecError, logical_action_check, theorem1_check
from .tga import TgaError, check_axioms, e_coset, is_tolerable, tetra15_pattern


class UsageError(ValueError):
    pass


_STOCHASTIC = ("noise mc",)


@dataclass(frozen=True)
class RunConfig:
    """One parsed invocation; stochastic subcommands must carry a seed."""

    subcommand: str
    colex_name: str
    paths: tuple[str, ...] = ()
    seed: int | None = None
    trials: int | None = None
    tolerance: float | None = None
    out: str | None = None
    fmt: str = "text"

    def __post_init__(self):
        if self.subcommand in _STOCHASTIC and self.seed is None:
            raise UsageError(f"{self.subcommand} requires --seed")


def _build_colex(name: str) -> Colex:
    if name == "tetra15":
        return build_tetra15()
    if name.startswith("torus:"):
        try:
            size = int(name.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad torus size in {name!r}") from None
        if size < 1:
            raise UsageError("torus size must be positive")
        return build_torus_colex(size)
    raise UsageError(f"unknown colex {name!r}; use tetra15 or torus:<L>")


def _csv_ints(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")


def _pauli_of(cfg: RunConfig, args: argparse.Namespace, n: int) -> PauliOp:
    if args.pauli is not None:
        text = args.pauli.replace(";", "\n")
    else:
        with open(args.pauli_file) as fh:
            text = fh.read()
    return parse_pauli(text, n)


def _need_tetra15(cfg: RunConfig, what: str) -> None:
    if cfg.colex_name != "tetra15":
        raise UsageError(f"{what} needs the tetra15 T pattern; got {cfg.colex_name!r}")


def _cmd_colex_validate(cfg: RunConfig, args) -> int:
    report = validate(_build_colex(cfg.colex_name))
    print(f"colex {cfg.colex_name}: {report}")
    return 0 if report.ok else 1


def _cmd_colex_info(cfg: RunConfig, args) -> int:
    colex = _build_colex(cfg.colex_name)
    code = CssCode(colex)
    print(colex)
    kind = "closed" if colex.is_closed else "with facets"
    print(f"kind: {kind}; logical qubits: {code.n_logical}")
    if colex.facets:
        names = ", ".join(str(f.color) for f in colex.facets)
        print(f"facets: {names}")
    census = {h: 0 for h in ALL_PAIRS}
    for f in colex.faces:
        census[f.label] += 1
    print("faces by label: " + ", ".join(f"{h}={census[h]}" for h in ALL_PAIRS))
    return 0


def _cmd_code_syndrome(cfg: RunConfig, args) -> int:
    code = CssCode(_build_colex(cfg.colex_name))
    p = _pauli_of(cfg, args, code.n)
    s = syndrome(code, p)
    cells = ", ".join(
        f"{c}({code.colex.containers[c].color})" for c in sorted(s.charge)
    )
    faces = ", ".join(
        f"{f}({code.colex.faces[f].label})" for f in sorted(s.flux)
    )
    print(f"charge cells: {cells or 'none'}")
    print(f"flux faces: {faces or 'none'}")
    return 0


def _cmd_tga_tolerable(cfg: RunConfig, args) -> int:
    code = CssCode(_build_colex(cfg.colex_name))
    alpha = BitVec.from_indices(code.n, args.qubits)
    verdict = is_tolerable(code, alpha)
    print(f"X on {args.qubits or '[]'}: {'tolerable' if verdict else 'not tolerable'}")
    return 0


def _cmd_tga_ecoset(cfg: RunConfig, args) -> int:
    _need_tetra15(cfg, "ecoset")
    code = CssCode(_build_colex(cfg.colex_name))
    alpha = BitVec.from_indices(code.n, args.qubits)
    if not is_tolerable(code, alpha):
        print(f"X on {args.qubits}: not tolerable, no residue coset")
        return 1
    coset = e_coset(code, tetra15_pattern(), alpha)
    rep = coset.representative
    body = "Z " + " ".join(str(i) for i in rep.indices()) if not rep.is_zero else "identity"
    print(f"representative: {body}")
    print(f"subgroup: {coset.subgroup.kind}, rank {rank(coset.subgroup.basis)}")
    return 0


_GATES = ("standard-p", "facet-p:k1", "facet-p:k2", "facet-p:k3", "facet-p:k4",
          "facet-cp", "cnot")


def _make_gate(name: str):
    code = CssCode(build_tetra15())
    pat = tetra15_pattern()
    if name == "standard-p":
        return StandardP(code, pat)
    if name.startswith("facet-p:"):
        by_name = {str(c): c for c in ALL_COLORS}
        color = by_name.get(name.split(":", 1)[1])
        if color is None:
            raise UsageError(f"unknown facet color in {name!r}")
        return FacetP(code, color, pat)
    other = CssCode(build_tetra15())
    if name == "facet-cp":
        return FacetCP(code, other, ALL_COLORS[0], ALL_COLORS[0])
    if name == "cnot":
        return CNot(code, other)
    raise UsageError(f"unknown gate {name!r}; choose from {', '.join(_GATES)}")


def _cmd_prop_apply(cfg: RunConfig, args) -> int:
    gate = _make_gate(args.gate)
    p = _pauli_of(cfg, args, gate.n_total)
    out = conjugate_pauli(gate, p)
    print("in:  " + str(p).replace("\n", "\n     "))
    print("out: " + str(out).replace("\n", "\n     "))
    if isinstance(gate, (FacetCP, CNot)):
        before = joint_syndrome(gate, p)
        after = joint_syndrome(gate, out)
    else:
        before = syndrome(gate.code, p)
        after = syndrome(gate.code, out)
    ok = syndrome_map(gate, before) == after
    print(f"syndrome map: {'consistent' if ok else 'MISMATCH'}")
    return 0 if ok else 1


def _cmd_oracle_theorem1(cfg: RunConfig, args) -> int:
    code = CssCode(build_tetra15())
    chosen = (args.qubit is not None) + (args.qubits is not None) + bool(args.logical)
    if chosen != 1:
        raise UsageError("pick exactly one of --qubit, --qubits, --logical")
    if args.logical:
        x, label = code.logical_x, "logical X"
    elif args.qubit is not None:
        x, label = PauliOp.x_op(code.n, [args.qubit]), f"X {args.qubit}"
    else:
        x, label = PauliOp.x_op(code.n, args.qubits), f"X {args.qubits}"
    report = theorem1_check(code, tetra15_pattern(), x, omit_w=args.omit_w)
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-9
    print(f"propagation identity, {label}: {report}")
    ok = report.max_distance < tol
    print(f"max distance {report.max_distance:.3e} {'<' if ok else '>='} {tol:.1e}")
    return 0 if ok else 1


def _cmd_oracle_logical_t(cfg: RunConfig, args) -> int:
    code = CssCode(build_tetra15())
    report = logical_action_check(code, tetra15_pattern(), power=args.power)
    name = report.name or "unrecognized"
    print(
        f"encoded action of pattern^{args.power}: {name}, "
        f"deviation {report.deviation:.3e}, leakage {report.leakage:.3e}"
    )
    return 0 if report.ok else 1


def _cmd_noise_mc(cfg: RunConfig, args) -> int:
    code = CssCode(_build_colex(cfg.colex_name))
    model = NoiseModel(args.p, cfg.seed)
    stats = confinement_stats(code, model, cfg.trials)
    print(f"trials {cfg.trials}, p {args.p}, seed {cfg.seed}, n {code.n}")
    print(f"mean flux weight: {stats.mean_flux_weight:.4f}")
    print("component sizes:")
    for size in sorted(stats.size_histogram):
        print(f"  {size}: {stats.size_histogram[size]}")
    if cfg.out:
        write_stats_csv(stats, cfg.out)
        print(f"wrote {cfg.out}")
    return 0


def _cmd_linking_table(cfg: RunConfig, args) -> int:
    code = CssCode(build_torus_colex(args.L))
    tab = lambda_table(code)
    ctrl = lambda_table(code, linked=False)
    width = 6
    header = " ".join(f"{str(h):>{width}}" for h in ALL_PAIRS)
    ok = True
    for title, table in (("linked", tab), ("control", ctrl)):
        print(f"{title} table:")
        print(f"{'':>{width}} {header}")
        for h1 in ALL_PAIRS:
            row = " ".join(f"{str(table[(h1, h2)]):>{width}}" for h2 in ALL_PAIRS)
            print(f"{str(h1):>{width}} {row}")
    for h1 in ALL_PAIRS:
        for h2 in ALL_PAIRS:
            ok &= tab[(h1, h2)] == linking_charge(h1, h2)
            ok &= ctrl[(h1, h2)].is_zero
    print(f"closed form and control: {'match' if ok else 'MISMATCH'}")
    return 0 if ok else 1


def _cmd_check_all(cfg: RunConfig, args) -> int:
    colex = _build_colex(cfg.colex_name)
    report = validate(colex)
    rows = [("colex validation", "pass" if report.ok else "fail",
             "no violations" if report.ok else f"{len(report.violations)} violation(s)")]
    if cfg.colex_name == "tetra15":
        axioms = check_axioms(CssCode(colex), tetra15_pattern())
        rows += [(f"axiom {r.name}", r.status, r.detail) for r in axioms.results]
    else:
        rows.append(("axiom suite", "skipped", "no T pattern for this colex"))
    for suite, status, detail in rows:
        print(f"{suite:<30} {status:<7} {detail}")
    failed = [r for r in rows if r[1] == "fail"]
    print(f"{len(rows) - len(failed)}/{len(rows)} suites pass")
    return 0 if not failed else 1


def _add_pauli_args(sub: argparse.ArgumentParser) -> None:
    grp = sub.add_mutually_exclusive_group(required=True)
    grp.add_argument("--pauli", help="inline operator, e.g. 'X 0 3; Z 2'")
    grp.add_argument("--pauli-file", help="file of 'X ...' / 'Z ...' lines")


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="colexkit", description=__doc__)
    groups = top.add_subparsers(dest="group", required=True)

    colex = groups.add_parser("colex").add_subparsers(dest="action", required=True)
    for action in ("validate", "info"):
        sub = colex.add_parser(action)
        sub.add_argument("--colex", default="tetra15")

    code = groups.add_parser("code").add_subparsers(dest="action", required=True)
    sub = code.add_parser("syndrome")
    sub.add_argument("--colex", default="tetra15")
    _add_pauli_args(sub)

    tga = groups.add_parser("tga").add_subparsers(dest="action", required=True)
    for action in ("tolerable", "ecoset"):
        sub = tga.add_parser(action)
        sub.add_argument("--colex", default="tetra15")
        sub.add_argument("--qubits", type=_csv_ints, required=True,
                         help="X support, e.g. 0,3,7")

    prop = groups.add_parser("prop").add_subparsers(dest="action", required=True)
    sub = prop.add_parser("apply")
    sub.add_argument("--gate", required=True, help=f"one of {', '.join(_GATES)}")
    _add_pauli_args(sub)

    oracle = groups.add_parser("oracle").add_subparsers(dest="action", required=True)
    sub = oracle.add_parser("theorem1")
    sub.add_argument("--qubit", type=int)
    sub.add_argument("--qubits", type=_csv_ints)
    sub.add_argument("--logical", action="store_true")
    sub.add_argument("--omit-w", action="store_true",
                     help="drop the logical flip from the non-tolerable branch")
    sub.add_argument("--tolerance", type=float)
    sub = oracle.add_parser("logicalT")
    sub.add_argument("--power", type=int, default=1)

    noise = groups.add_parser("noise").add_subparsers(dest="action", required=True)
    sub = noise.add_parser("mc")
    sub.add_argument("--colex", default="torus:4")
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--trials", type=int, required=True)
    sub.add_argument("--seed", type=int, required=True)
    sub.add_argument("--out", help="per-trial CSV path (written atomically)")

    linking = groups.add_parser("linking").add_subparsers(dest="action", required=True)
    sub = linking.add_parser("table")
    sub.add_argument("L", type=int)

    check = groups.add_parser("check").add_subparsers(dest="action", required=True)
    sub = check.add_parser("all")
    sub.add_argument("--colex", default="tetra15")

    return top


_HANDLERS = {
    "colex validate": _cmd_colex_validate,
    "colex info": _cmd_colex_info,
    "code syndrome": _cmd_code_syndrome,
    "tga tolerable": _cmd_tga_tolerable,
    "tga ecoset": _cmd_tga_ecoset,
    "prop apply": _cmd_prop_apply,
    "oracle theorem1": _cmd_oracle_theorem1,
    "oracle logicalT": _cmd_oracle_logical_t,
    "noise mc": _cmd_noise_mc,
    "linking table": _cmd_linking_table,
    "check all": _cmd_check_all,
}


def run(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    sub = f"{args.group} {args.action}"
    cfg = RunConfig(
        subcommand=sub,
        colex_name=getattr(args, "colex", "tetra15"),
        paths=tuple(
            p for p in (getattr(args, "pauli_file", None), getattr(args, "out", None))
            if p
        ),
        seed=getattr(args, "seed", None),
        trials=getattr(args, "trials", None),
        tolerance=getattr(args, "tolerance", None),
        out=getattr(args, "out", None),
        fmt="csv" if getattr(args, "out", None) else "text",
    )
    return _HANDLERS[sub](cfg, args)


def main(argv: list[str] | None = None) -> int:
    try:
        return run(argv)
    except (UsageError, ColexError, TgaError, PropagationError, StatevecError,
            NoiseError, LinkingError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
