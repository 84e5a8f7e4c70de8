"""Degrees of reciprocal varieties by monodromy.

Binary forms give Catalan numbers.  Pass --ternary to also run the
ternary quartic (about ten minutes on one core).

    python3 demos/monodromy_degrees.py [--ternary]
"""
import sys
import time

import numpy as np

from catrecip import build_cat_space
from catrecip.homotopy import MonodromyOptions, degree_reciprocal, ml_degree

for k in (2, 3, 4):
    t = time.time()
    res = degree_reciprocal(build_cat_space(k, 1), np.random.default_rng(k))
    tt = res["trace_test"]
    print(f"Cat({k},2): degree {res['degree']:>3}  trace test "
          f"{'passed' if tt['passed'] else 'failed'} ({tt['residual']:.1e})  "
          f"{res['stats']['loops']} loops, {time.time() - t:.1f}s")

if "--ternary" in sys.argv:
    space = build_cat_space(2, 2)
    res = degree_reciprocal(space, np.random.default_rng(0), MonodromyOptions(),
                            log=lambda s: print("  ", s))
    print(f"Cat(2,3): degree {res['degree']}, complete {res['complete']}")
    ml = ml_degree(space, np.random.default_rng(1), log=lambda s: print("  ", s))
    print(f"Cat(2,3): ML-degree {ml['ml_degree']}, discarded "
          f"{ml['stats']['discarded_singular']} singular endpoints")
