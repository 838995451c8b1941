"""Milnor identity and two-method torsion agreement over seeded random corpora."""

import argparse

import numpy as np

from torsor.complex import log_torsion, random_complex
from torsor.sequences import milnor_residual, milnor_terms, random_ses


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--count", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    worst_rel = 0.0
    for i in range(args.count):
        dims = tuple(int(x) for x in rng.integers(0, 7, size=int(rng.integers(2, 6))))
        r = log_torsion(random_complex(dims, seed=args.seed + i, random_grams=bool(i % 2)))
        worst_rel = max(worst_rel, r.residual / (1 + abs(r.value)))
    print(f"torsion: {args.count} complexes, worst relative gap {worst_rel:.3e}")

    print(f"{'seed':>4} {'alpha':>6} {'beta':>6} {'local':>12} {'residual':>10}")
    for i in range(args.count):
        a_scale, b_scale = (1.0, 1.0) if i % 3 else (2.0, 0.5 + i / 10)
        s = random_ses((1, 3, 4, 2), (2, 4, 3, 1), seed=args.seed + i, random_grams=i % 2 == 1,
                       alpha_scale=a_scale, beta_scale=b_scale)
        print(f"{i:>4} {a_scale:>6.2f} {b_scale:>6.2f} {milnor_terms(s)['local']:>12.6f} {milnor_residual(s):>10.2e}")


if __name__ == "__main__":
    main()
