"""Reproduce the choice of FOUR_POINT_ANGLE.

For the 4-point two-tone design the full J=6 load superimposes six phased
copies of the rotated square on four tones. The decisive figure of merit
is the minimum distance of that 4096-point superposition alphabet: it is
zero when two different symbol tuples collide (undetectable even without
noise) and it controls the high-SNR error floor of the overloaded system.

This script scans the rotation angle over (0, 45] degrees, refines around
the best grid point and prints the winner. The frozen constant
FOUR_POINT_ANGLE = atan(2/5) sits at the plateau this search finds; the
product-distance-optimal angle atan((1+sqrt 5)/2) of the 16-point design
is NOT optimal here (0.6498 vs 0.9097) because six-layer superposition,
not single-layer fading diversity, is the binding constraint.

Usage: python scripts/tune_four_point_angle.py [--step-deg 0.5]
Runtime: about a minute at the default step.
"""

import argparse
import itertools
import math

import numpy as np

from scma.codebook import build_system
from scma.constellation import (
    FOUR_POINT_ANGLE,
    GOLDEN_ANGLE,
    RealConstellation,
    base_lattice,
    rotate,
    rotation_2d,
    shuffle_construct,
)


def four_point_mother_at(theta: float):
    square = rotate(base_lattice(2, 4), rotation_2d(theta))
    return shuffle_construct(square, RealConstellation(np.zeros((1, 2))))


def superposition_min_distance(system, chunk: int = 512) -> float:
    """Min distance between received signals of distinct symbol tuples."""
    m, j, k = system.alphabet_size, system.n_layers, system.n_resources
    tuples = np.array(list(itertools.product(range(m), repeat=j)))
    s = np.zeros((len(tuples), k), dtype=np.complex128)
    for layer in range(j):
        s += system.codebooks[layer].codewords[tuples[:, layer]]
    best = np.inf
    for i0 in range(0, len(s), chunk):
        blk = s[i0 : i0 + chunk]
        d2 = np.sum(np.abs(blk[:, None, :] - s[None, :, :]) ** 2, axis=2)
        for r in range(len(blk)):
            d2[r, i0 + r] = np.inf
        best = min(best, float(d2.min()))
    return math.sqrt(best)


def metric(theta: float) -> float:
    return superposition_min_distance(build_system(4, 2, 6, four_point_mother_at(theta)))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--step-deg", type=float, default=0.5)
    args = parser.parse_args()

    grid = np.arange(args.step_deg, 45.0 + 1e-9, args.step_deg)
    print(f"scanning {len(grid)} angles, step {args.step_deg} deg")
    scores = []
    for deg in grid:
        val = metric(math.radians(deg))
        scores.append(val)
        print(f"  {deg:6.2f} deg  min superposition distance {val:.4f}")
    scores = np.asarray(scores)
    best_idx = int(scores.argmax())
    lo = math.radians(grid[max(0, best_idx - 1)])
    hi = math.radians(grid[min(len(grid) - 1, best_idx + 1)])

    # golden-section refinement inside the bracket
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = metric(c), metric(d)
    for _ in range(40):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = metric(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = metric(d)
    best = 0.5 * (a + b)

    print()
    print(f"found optimum     {best:.6f} rad = {math.degrees(best):9.5f} deg, metric {metric(best):.4f}")
    print(f"frozen constant   {FOUR_POINT_ANGLE:.6f} rad = {math.degrees(FOUR_POINT_ANGLE):9.5f} deg, "
          f"metric {metric(FOUR_POINT_ANGLE):.4f}  (atan(2/5))")
    print(f"16-point optimum  {GOLDEN_ANGLE:.6f} rad = {math.degrees(GOLDEN_ANGLE):9.5f} deg, "
          f"metric {metric(GOLDEN_ANGLE):.4f}  (kept for the 16-point design)")
    drift = abs(metric(best) - metric(FOUR_POINT_ANGLE))
    print(f"metric difference found vs frozen: {drift:.2e}")
    return 0 if drift < 1e-3 else 1


if __name__ == "__main__":
    raise SystemExit(main())
