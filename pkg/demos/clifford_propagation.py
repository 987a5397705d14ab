"""Propagate Pauli errors through the diagonal Clifford gates by syndrome alone.

Each gate carries a syndrome map that commutes with conjugation: propagating
an error and measuring equals measuring and mapping. The charge updates are
local functions of the flux string, branching points for the standard P gate
and facet endpoints for the facet-restricted one.
"""

from __future__ import annotations

from colexkit.cliffprop import (
    CNot,
    FacetCP,
    FacetP,
    StandardP,
    conjugate_pauli,
    joint_syndrome,
    syndrome_map,
)
from colexkit.code import (
    CssCode,
    PauliOp,
    branching_points,
    endpoints_on_facet,
    syndrome,
)
from colexkit.colex import Color, build_tetra15
from colexkit.tga import tetra15_pattern


def show(tag: str, s) -> None:
    print(f"  {tag}: charge {sorted(s.charge) or '-'}, flux {sorted(s.flux) or '-'}")


def main() -> None:
    code = CssCode(build_tetra15())
    partner = CssCode(build_tetra15())
    pat = tetra15_pattern()
    n = code.n

    err = PauliOp.x_op(n, [2, 7])
    s = syndrome(code, err)
    print(f"error: {' '.join(str(err).split())}")
    show("syndrome", s)

    std = StandardP(code, pat)
    fac = FacetP(code, Color.K2, pat)
    for name, gate in (("standard P", std), ("facet-k2 P", fac)):
        mapped = syndrome_map(gate, s)
        direct = syndrome(code, conjugate_pauli(gate, err))
        print(f"{name}: map equals conjugation: {mapped == direct}")
        show("mapped", mapped)
    print(f"charge update checks: standard adds branching points "
          f"{sorted(branching_points(code, s.flux)) or '-'}, facet-k2 adds "
          f"endpoints {sorted(endpoints_on_facet(code, s.flux, fac.facet)) or '-'}")

    joint = PauliOp.x_op(2 * n, [2, 7])
    for name, gate in (
        ("facet CP", FacetCP(code, partner, Color.K1, Color.K1)),
        ("CNot", CNot(code, partner)),
    ):
        before = joint_syndrome(gate, joint)
        after = joint_syndrome(gate, conjugate_pauli(gate, joint))
        print(f"{name}: syndrome map consistent: "
              f"{syndrome_map(gate, before) == after}")


if __name__ == "__main__":
    main()
