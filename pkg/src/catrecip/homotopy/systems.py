"""Degree and ML-degree systems for linear spaces of symmetric matrices.

A linear space is given by a list of symmetric basis matrices.  Symmetric
unknowns use the upper-triangle coordinates of :mod:`catrecip.spaces`.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from ..fields import QQ
from ..spaces import CatSpace, orthogonal_basis, sym_index, sym_to_vec, vec_to_sym
from .monodromy import MonodromyOptions, WitnessSet, monodromy_solve, polish, trace_test
from .polysys import PolySystem, minors_expander, variable
from .tracker import track_parameter


def space_basis(space) -> list[np.ndarray]:
    if isinstance(space, CatSpace):
        return [B.astype(float) for B in space.basis]
    return [np.asarray(B, dtype=float) for B in space]


def orthogonal_complement(space) -> list[np.ndarray]:
    """Basis of the trace-orthogonal complement, as float matrices."""
    if isinstance(space, CatSpace):
        return [np.vectorize(float)(W).astype(float) for W in orthogonal_basis(space, QQ)]
    basis = space_basis(space)
    m = basis[0].shape[0]
    T = np.array([_functional(B) for B in basis])
    return [vec_to_sym(w, m) for w in scipy.linalg.null_space(T).T]


def _functional(B):
    """Coefficients of ``Y -> trace(B Y)`` in the y-coordinates of ``Y``."""
    m = B.shape[0]
    return np.array([B[i, j] * (1 if i == j else 2) for i, j in sym_index(m)])


def random_lssm(m: int, dim: int, rng) -> list[np.ndarray]:
    """A generic ``dim``-dimensional space of real symmetric ``m x m`` matrices."""
    N = m * (m + 1) // 2
    return [vec_to_sym(rng.normal(size=N), m) for _ in range(dim)]


def _symbolic_adjugate(entries, m):
    """Upper-triangle adjugate entries of a symmetric polynomial matrix, and the determinant."""
    minor = minors_expander(entries)
    full = tuple(range(m))
    adj = {}
    for i, j in sym_index(m):
        rows = full[:j] + full[j + 1:]
        cols = full[:i] + full[i + 1:]
        sign = -1 if (i + j) % 2 else 1
        adj[i, j] = {e: sign * c for e, c in minor(rows, cols).items()}
    return adj, minor(full, full)


def _pad(poly, before: int, after: int):
    return {(0,) * before + e + (0,) * after: c for e, c in poly.items()}


def _lin(terms):
    """Sum of ``c * monomial`` given as ``[(exponent, c)]``, merging repeats."""
    out = {}
    for e, c in terms:
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c != 0}


def _combine(polys, weights):
    out = {}
    for p, w in zip(polys, weights):
        if w == 0:
            continue
        for e, c in p.items():
            out[e] = out.get(e, 0) + w * c
    return {e: c for e, c in out.items() if abs(c) > 1e-14}


# -- pullback (degree) system -------------------------------------------------

def pullback_equations(space) -> tuple[list[dict], int]:
    """Relations on ``adj(Y)`` expressing membership in the space; ``(polys, N)``."""
    W = orthogonal_complement(space)
    m = W[0].shape[0] if W else space_basis(space)[0].shape[0]
    N = m * (m + 1) // 2
    coords = {ij: c for c, ij in enumerate(sym_index(m))}
    entries = [[variable(coords[min(i, j), max(i, j)], N) for j in range(m)] for i in range(m)]
    adj, _ = _symbolic_adjugate(entries, m)
    keys = sym_index(m)
    polys = [_combine([adj[ij] for ij in keys], _functional(w)) for w in W]
    return polys, N


def build_pullback_system(space, rng, chart=None, name: str = "pullback") -> tuple[PolySystem, dict]:
    """Square system: pullback relations, ``dim - 1`` parametric slices, one chart.

    Parameters are the slice rows ``L`` (``(dim - 1) x N``, row-major).
    Returns the family and a dict with the chart vector and shapes.
    """
    J, N = pullback_equations(space)
    dim = len(space_basis(space))
    nslice = dim - 1
    npar = nslice * N
    chart = _unit_complex(rng, N) if chart is None else np.asarray(chart, dtype=complex)
    polys = [_pad(f, 0, npar) for f in J]
    for r in range(nslice):
        terms = []
        for j in range(N):
            e = [0] * (N + npar)
            e[j] = 1
            e[N + r * N + j] = 1
            terms.append((tuple(e), 1))
        polys.append(_lin(terms))
    chart_poly = {}
    for j in range(N):
        e = [0] * (N + npar)
        e[j] = 1
        chart_poly[tuple(e)] = chart[j]
    chart_poly[(0,) * (N + npar)] = -1
    polys.append(chart_poly)
    sysm = PolySystem(polys, N, npar, name=name)
    return sysm, {"chart": chart, "N": N, "slices": nslice, "relations": len(J)}


def _unit_complex(rng, shape):
    return (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / np.sqrt(2)


def random_space_member(space, rng) -> np.ndarray:
    basis = space_basis(space)
    x = rng.normal(size=len(basis))
    return sum(c * B for c, B in zip(x, basis))


def pullback_seed(space, system: PolySystem, info: dict, rng):
    """Adjugate of a random real member and a random slice through it."""
    K0 = random_space_member(space, rng)
    B0 = np.linalg.det(K0) * np.linalg.inv(K0)
    y0 = sym_to_vec(B0).astype(complex)
    y0 = y0 / (info["chart"] @ y0)
    N, r = info["N"], info["slices"]
    L = _unit_complex(rng, (r, N))
    w = _unit_complex(rng, N)
    L = L - np.outer(L @ y0, w) / (w @ y0)
    return L.ravel(), y0


def det_distance(mats) -> np.ndarray:
    """Relative distance ``sigma_min / sigma_max`` of each matrix to ``V(det)``.

    Scale free, and unlike a normalized determinant it does not shrink with
    the product of the intermediate singular values.
    """
    mats = np.asarray(mats)
    if not len(mats):
        return np.zeros(0)
    sv = np.linalg.svd(mats, compute_uv=False)
    return sv[:, -1] / np.maximum(sv[:, 0], 1e-300)


def _relative_det(points, m):
    return det_distance([vec_to_sym(y, m) for y in points])


def degree_reciprocal(space, rng, opts: MonodromyOptions | None = None, trace: bool = True,
                      log=None, det_floor: float = 1e-8, rounds: int = 4) -> dict:
    """Degree of the reciprocal variety by monodromy on the pullback system.

    After the solution count stabilizes the witness is trace-tested; a
    failing test resumes monodromy from the current points (up to ``rounds``).
    """
    opts = opts or MonodromyOptions()
    m = space_basis(space)[0].shape[0]
    system, info = build_pullback_system(space, rng)
    p0, y0 = pullback_seed(space, system, info, rng)

    def accept(X):
        return _relative_det(X, m) > det_floor

    seeds, history = y0[None], []
    for _ in range(rounds):
        W = monodromy_solve(system, p0, seeds, rng, opts,
                            blocks=_row_blocks(info), accept=accept, log=log)
        history.append(W.stats)
        out = _finish_degree(space, system, info, W, rng, opts, trace, m)
        if not trace or out["complete"] or not W.stats["stabilized"]:
            break
        seeds = W.points
    out["stats"]["rounds"] = len(history)
    return out


def _row_blocks(info):
    N = info["N"]
    return [np.arange(r * N, (r + 1) * N) for r in range(info["slices"])]


def slice_direction(info) -> np.ndarray:
    """Parallel translation of the first slice hyperplane in the chart."""
    d = np.zeros(info["slices"] * info["N"], dtype=complex)
    d[:info["N"]] = info["chart"]
    return d


def _finish_degree(space, system, info, W: WitnessSet, rng, opts, trace, m):
    pts, step = polish(system, W.points, W.params)
    W.points = pts
    resid = np.max(np.abs(system.evaluate(pts, W.params)), axis=1) if len(pts) else np.zeros(0)
    dets = _relative_det(pts, m)
    tt = None
    if trace and len(pts):
        tt = trace_test(system, W.params, pts, slice_direction(info), rng, opts.tracker)
    W.stats.update({"trace_test": tt, "min_det_distance": float(dets.min()) if len(dets) else None,
                    "max_residual": float(resid.max()) if len(resid) else None,
                    "max_newton_step": float(step.max()) if len(step) else None})
    complete = bool(W.stats["stabilized"] and (tt is None or tt["passed"]))
    return {"degree": len(pts), "witness": W, "trace_test": tt,
            "complete": complete, "stats": W.stats, "info": info}


# -- critical (ML) system ------------------------------------------------------

def critical_equations(space):
    """``trace(adj(K) B_i) - det(K) s_i`` with ``K = sum x_i B_i`` and parameters ``s``."""
    basis = space_basis(space)
    d = len(basis)
    m = basis[0].shape[0]
    entries = [[{} for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for j in range(m):
            terms = [(tuple(1 if v == a else 0 for v in range(d)), B[i, j])
                     for a, B in enumerate(basis) if B[i, j] != 0]
            entries[i][j] = _lin(terms)
    adj, det = _symbolic_adjugate(entries, m)
    keys = sym_index(m)
    polys = []
    for a, B in enumerate(basis):
        g = _combine([adj[ij] for ij in keys], _functional(B))
        f = _pad(g, 0, d)
        for e, c in det.items():
            s = [0] * d
            s[a] = 1
            key = e + tuple(s)
            f[key] = f.get(key, 0) - c
        polys.append(f)
    return polys, d


def build_critical_system(space, S=None) -> PolySystem:
    """Critical equations with parameters ``s_i = trace(S B_i)`` (set from ``S`` if given)."""
    polys, d = critical_equations(space)
    params = None
    if S is not None:
        S = np.asarray(S)
        if not np.allclose(S, S.T):
            raise ValueError("data matrix must be symmetric")
        params = [np.trace(S @ B) for B in space_basis(space)]
    return PolySystem(polys, d, d, params, name="critical")


def critical_seed(space, rng):
    """``(s, x0)``: a random invertible member and data making it critical."""
    basis = space_basis(space)
    x0 = rng.normal(size=len(basis))
    K0 = sum(c * B for c, B in zip(x0, basis))
    Kinv = np.linalg.inv(K0)
    W = orthogonal_complement(space)
    S = Kinv + sum(rng.normal() * w for w in W) if W else Kinv
    s = np.array([np.trace(S @ B) for B in basis], dtype=complex)
    return s, x0.astype(complex), S


def ml_degree(space, rng, opts: MonodromyOptions | None = None, log=None,
              det_floor: float = 1e-8) -> dict:
    opts = opts or MonodromyOptions()
    basis = space_basis(space)
    system = build_critical_system(space)
    s0, x0, S = critical_seed(space, rng)

    stack = np.array(basis, dtype=float)

    def dets(X):
        return det_distance(np.tensordot(np.asarray(X), stack, axes=(1, 0)))

    # real data is a special base point; move the seed to generic complex data
    s1 = s0 * (1 + 0.5 * _unit_complex(rng, len(s0)))
    moved = track_parameter(system, x0[None], s0, s1, opts.tracker)
    if not moved.success[0]:
        s1, moved.x = s0, x0[None]
    s0 = s1
    W = monodromy_solve(system, s0, moved.x, rng, opts,
                        blocks=[np.array([i]) for i in range(len(basis))],
                        accept=lambda X: dets(X) > det_floor, log=log)
    pts, step = polish(system, W.points, W.params)
    W.points = pts
    d = dets(pts)
    keep = d > det_floor
    W.points = pts[keep]
    grad = _gradient_identity(basis, W.points, s0)
    resid = np.max(np.abs(system.evaluate(W.points, s0)), axis=1) if keep.any() else np.zeros(0)
    W.stats.update({"discarded_singular": int((~keep).sum()),
                    "min_det_distance": float(d[keep].min()) if keep.any() else None,
                    "max_residual": float(resid.max()) if len(resid) else None,
                    "max_newton_step": float(step[keep].max()) if keep.any() else None,
                    "max_gradient_error": grad})
    return {"ml_degree": len(W.points), "witness": W, "stats": W.stats, "data": S,
            "complete": W.stats["stabilized"]}


def _gradient_identity(basis, X, s):
    err = 0.0
    for x in X:
        K = sum(c * B for c, B in zip(x, basis))
        Ki = np.linalg.inv(K)
        g = np.array([np.trace(Ki @ B) for B in basis])
        err = max(err, float(np.max(np.abs(g - s)) / (1 + np.max(np.abs(s)))))
    return err


__all__ = ["build_pullback_system", "det_distance", "build_critical_system", "degree_reciprocal", "ml_degree",
           "pullback_equations", "critical_equations", "random_lssm", "orthogonal_complement",
           "slice_direction"]
