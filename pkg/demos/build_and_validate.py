"""Build the two stock colexes, validate them, and tour their structure."""

from __future__ import annotations

from colexkit.code import CssCode
from colexkit.colex import ALL_PAIRS, build_tetra15, build_torus_colex, validate


def describe(name: str, colex) -> None:
    report = validate(colex)
    code = CssCode(colex)
    kind = "closed" if colex.is_closed else "open"
    print(f"{name}: {kind}, valid={report.ok}")
    print(f"  qubits {colex.n_qubits}, cells {len(colex.cells)}, "
          f"faces {len(colex.faces)}, facets {len(colex.facets)}")
    census = {pair: 0 for pair in ALL_PAIRS}
    for face in colex.faces:
        census[face.label] += 1
    print("  faces by label: " + ", ".join(f"{p}={n}" for p, n in census.items()))
    print(f"  stabilizers: {len(code.sx.rows)} X, {len(code.sz.rows)} Z, "
          f"logical qubits {code.n_logical}")


def main() -> None:
    describe("tetra15", build_tetra15())
    print()
    for length in (2, 4):
        describe(f"torus L={length}", build_torus_colex(length))
        print()


if __name__ == "__main__":
    main()
