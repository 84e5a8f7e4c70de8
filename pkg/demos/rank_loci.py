"""Where singular ternary quartics go under inversion.

For a catalecticant A of rank r < 6 the inversion map is undefined, and
its closure sends A to the limits of [adj(A + tX)].  This script measures
those images exactly and then finds the rank-3 point that the images of
rank-one quartics share with the orthogonal space.

    python3 demos/rank_loci.py
"""
import numpy as np

from catrecip import GF, DEFAULT_PRIMES, build_cat_space, rank_r_point
from catrecip.loci import (canonical_rank_two, curve_limit, image_cloud,
                           image_dimension_of_rank, phi_rank_locus_dimension,
                           rank_one_orthogonal_witness, rank_two_certificate)
from catrecip.sampling import span_dimension

space = build_cat_space(2, 2)
F = GF(DEFAULT_PRIMES[0])
rng = np.random.default_rng(7)

print(" r  image of a point  its span  image of the rank-r locus")
for r in range(1, 6):
    A = rank_r_point(space, r, rng, F)
    span = span_dimension(image_cloud(space, A, 60, rng))
    print(f" {r}  {image_dimension_of_rank(space, r):>16}  {span:>8}  "
          f"{phi_rank_locus_dimension(space, r):>25}")

for kind in ("secant", "tangent"):
    A, zeros, _ = canonical_rank_two(space, kind, F)
    rep = rank_two_certificate(space, kind, 200, rng, F)
    print(f"{kind}: coordinates {list(zeros)} vanish and the Pfaffian cubic holds on "
          f"{rep['samples']} limits -> {'ok' if rep['passed'] else 'FAILED'}")

A, curve = rank_one_orthogonal_witness(space)
w = curve_limit(space, A, curve)
print("limit of images of v4([1:0:0]) along a curve of directions:")
print("  ", [str(c) for c in w.coords], "rank", w.rank)
