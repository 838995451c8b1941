"""Split builtin triangulations and compare the glued complex with the unsplit one."""

import math

from torsor.complex import betti_numbers, log_torsion_det
from torsor.gluing import gluing_residuals, theta_complex
from torsor.simplicial import builtin, cochain_complex, split

CASES = [
    ("interval_3", [(1,)]),
    ("circle_6", [(0,), (3,)]),
    ("twisted_circle_2.0_6", [(1,), (4,)]),
    ("annulus_4", [(0,), (4,), (0, 4), (2,), (6,), (2, 6)]),
]


def main():
    for name, interface in CASES:
        k, ls = builtin(name)
        g = split(k, k.subcomplex(interface), ls)
        c = cochain_complex(k, ls)
        r = gluing_residuals(g, math.pi / 4, ["ha11", "ha12", "ha12_milnor", "ha13"])
        glued = betti_numbers(theta_complex(g, math.pi / 4).compressed)
        res = " ".join(f"{k}={v:.1e}" for k, v in r.residuals.items())
        print(f"{name:<22} betti {betti_numbers(c)} glued {glued} log_tau {log_torsion_det(c):.6f} "
              f"log_tau_B {r.terms['log_tau_B']:.6f} {res}")


if __name__ == "__main__":
    main()
