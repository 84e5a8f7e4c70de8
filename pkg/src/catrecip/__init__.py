"""Reciprocal varieties of catalecticant spaces.

Exact sampling over prime fields, rank-locus images of the inversion map,
and homotopy-continuation degrees.  ``catrecip.verify`` bundles the
reproduction suite; ``catrecip.cli`` is the command line.
"""
from .fields import DEFAULT_PRIMES, GF, QQ, Field
from .spaces import CatPoint, CatSpace, build_cat_space, rank_r_point, secant_dimension
from .sampling import SampleCloud, hilbert_count, reciprocal_hilbert, sample_reciprocal

__version__ = "0.1.0"

__all__ = ["DEFAULT_PRIMES", "GF", "QQ", "Field", "CatPoint", "CatSpace", "build_cat_space",
           "rank_r_point", "secant_dimension", "SampleCloud", "hilbert_count",
           "reciprocal_hilbert", "sample_reciprocal"]
