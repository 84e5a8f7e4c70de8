"""Numerical solver: batched path tracking, monodromy and the trace test."""
from .monodromy import MonodromyOptions, WitnessSet, monodromy_solve, trace_test
from .polysys import PolySystem
from .systems import (build_critical_system, build_pullback_system, degree_reciprocal,
                      ml_degree)
from .tracker import TrackerOptions, solve_total_degree, track_parameter

__all__ = ["MonodromyOptions", "WitnessSet", "monodromy_solve", "trace_test", "PolySystem",
           "build_critical_system", "build_pullback_system", "degree_reciprocal", "ml_degree",
           "TrackerOptions", "solve_total_degree", "track_parameter"]
