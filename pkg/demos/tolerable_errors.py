"""Tolerability verdicts, the residue coset, and the per-syndrome dichotomy.

An X error is tolerable when the group it generates with the X stabilizers
contains no logical operator; only then does the transversal gate leave a
correctable Z residue. Among the errors with a given flux syndrome, exactly
one of the two logical classes is tolerable.
"""

from __future__ import annotations

import random

from colexkit import tga
from colexkit.code import CssCode, PauliOp, syndrome
from colexkit.colex import build_tetra15
from colexkit.gf2 import BitVec, rank


def main() -> None:
    code = CssCode(build_tetra15())
    pat = tga.tetra15_pattern()
    n = code.n
    lam = code.logical_x.x

    for qubits in ([3], [1, 8], sorted(lam.indices())):
        alpha = BitVec.from_indices(n, qubits)
        verdict = tga.is_tolerable(code, alpha)
        print(f"X on {qubits}: {'tolerable' if verdict else 'not tolerable'}")
        if verdict:
            coset = tga.e_coset(code, pat, alpha)
            rep = sorted(coset.representative.indices())
            print(f"  residue coset: Z on {rep or 'no qubits'}, "
                  f"subgroup rank {rank(coset.subgroup.basis)}")

    rng = random.Random(7)
    print("per-syndrome dichotomy on random errors:")
    for _ in range(4):
        alpha = BitVec(rng.getrandbits(n), n)
        phi = syndrome(code, PauliOp(alpha, BitVec.zeros(n))).flux
        rep = tga.tolerable_representative(code, phi)
        print(f"  syndrome of weight {len(phi)}: representative X on "
              f"{sorted(rep.indices())} tolerable={tga.is_tolerable(code, rep)}, "
              f"other class tolerable={tga.is_tolerable(code, rep ^ lam)}")


if __name__ == "__main__":
    main()
