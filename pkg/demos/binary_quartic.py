"""Binary quartics: the smallest interesting reciprocal variety.

Cat(2,2) is the space of 3x3 Hankel matrices.  Its reciprocal variety is a
quadric hypersurface in P^5; we find that quadric by interpolation over a
prime field, then count its degree and ML-degree by monodromy.

    python3 demos/binary_quartic.py
"""
import numpy as np

from catrecip import GF, DEFAULT_PRIMES, build_cat_space, hilbert_count, sample_reciprocal
from catrecip.homotopy import degree_reciprocal, ml_degree
from catrecip.sampling import vanishing_forms
from catrecip.spaces import monomials

space = build_cat_space(2, 1)
print(f"Cat(2,2): {space.m}x{space.m} matrices, dimension {space.dim}, codimension {space.codim}")

F = GF(DEFAULT_PRIMES[0])
cloud = sample_reciprocal(space, 200, F, np.random.default_rng(0))
print(f"sampled {len(cloud)} adjugates over {F}; first point {cloud.points[0].tolist()}")

hf2 = hilbert_count(cloud, 2)
form = vanishing_forms(cloud, 2).forms[0]
terms = [(int(c), e) for c, e in zip(form, monomials(6, 2)) if c]
pretty = " ".join(f"{'+' if c < F.p // 2 else '-'} " + "*".join(
    f"y{i}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k) for c, e in terms)
print(f"quadrics through the sample: {hf2}; up to scale it is {pretty}")

deg = degree_reciprocal(space, np.random.default_rng(1))
ml = ml_degree(space, np.random.default_rng(2))
print(f"degree by monodromy: {deg['degree']} (trace test residual "
      f"{deg['trace_test']['residual']:.1e}); ML-degree: {ml['ml_degree']}")
