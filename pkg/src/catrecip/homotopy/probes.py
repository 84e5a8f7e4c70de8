"""Low-rank members of the orthogonal space, searched by homotopy.

A rank-one member ``v v^T`` lies in the orthogonal space exactly when every
quadric ``v^T E v`` (one per basis matrix ``E`` of the space) vanishes.  The
quadrics outnumber the unknowns, so a random square subsystem is solved
completely by a total-degree homotopy and each endpoint is then tested
against all quadrics.  Rank two uses ``a a^T + b b^T``.
"""
from __future__ import annotations

import numpy as np

from .polysys import PolySystem
from .systems import space_basis
from .tracker import TrackerOptions, dedup, solve_total_degree


def _quadric(E, offset, nvars):
    """``w^T E w`` for ``w`` the variables ``offset .. offset + m - 1``."""
    m = E.shape[0]
    out: dict = {}
    for i in range(m):
        for j in range(m):
            if E[i, j] == 0:
                continue
            e = [0] * nvars
            e[offset + i] += 1
            e[offset + j] += 1
            e = tuple(e)
            out[e] = out.get(e, 0) + E[i, j]
    return out


def _combine(polys, weights):
    out: dict = {}
    for p, w in zip(polys, weights):
        for e, c in p.items():
            out[e] = out.get(e, 0) + w * c
    return out


def _linear(coeffs, offset, nvars, rhs):
    out = {}
    for i, c in enumerate(coeffs):
        e = [0] * nvars
        e[offset + i] = 1
        out[tuple(e)] = c
    if rhs:
        out[(0,) * nvars] = -rhs
    return out


def _cn(rng, shape):
    return (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / np.sqrt(2)


def _report(result, residuals, hits, bezout, extra):
    ok = result.success
    distinct = len(dedup(result.x[ok])) if ok.any() else 0
    return {
        "paths": len(result), "bezout_bound": bezout, "converged": int(ok.sum()),
        "distinct_endpoints": distinct, "failures": result.summary()["reasons"],
        "complete": bool(distinct == bezout),
        "min_full_residual": float(residuals.min()) if len(residuals) else None,
        "solutions": hits, **extra,
        "confidence": ("all Bezout paths reached distinct endpoints: the square subsystem "
                       "was solved completely" if distinct == bezout else
                       "some paths failed or merged: emptiness is heuristic"),
    }


def rank_one_isotropic_solve(space, rng, opts: TrackerOptions | None = None,
                             tol: float = 1e-8) -> dict:
    """Rank-one members ``v v^T`` of the orthogonal space."""
    basis = space_basis(space)
    m = basis[0].shape[0]
    Q = [_quadric(E, 0, m) for E in basis]
    k = m - 1
    mix = _cn(rng, (k, len(Q)))
    polys = [_combine(Q, w) for w in mix] + [_linear(_cn(rng, m), 0, m, 1)]
    system = PolySystem(polys, m, name="rank one isotropic")
    res = solve_total_degree(system, opts, rng)
    full = PolySystem(Q, m)
    pts = res.x[res.success]
    resid = _normalized(full, pts, lambda v: np.max(np.abs(v)) ** 2)
    hits = [v.tolist() for v, r in zip(pts, resid) if r < tol]
    return _report(res, resid, hits, 2 ** k, {"quadrics": len(Q), "tol": tol})


def rank_two_isotropic_solve(space, rng, opts: TrackerOptions | None = None,
                             tol: float = 1e-8) -> dict:
    """Rank-two members ``a a^T + b b^T``; charts ``l1(a) = 1``, ``l2(b) = 0``.

    Parallel ``a, b`` give rank at most one (including ``Y = 0`` when
    ``a = +-i b``), a positive-dimensional spurious set; endpoints there are
    excluded by requiring numerical rank two.
    """
    basis = space_basis(space)
    m = basis[0].shape[0]
    n = 2 * m
    Q = [_combine([_quadric(E, 0, n), _quadric(E, m, n)], [1, 1]) for E in basis]
    k = n - 2
    mix = _cn(rng, (k, len(Q)))
    polys = [_combine(Q, w) for w in mix]
    polys += [_linear(_cn(rng, m), 0, n, 1), _linear(_cn(rng, m), m, n, 0)]
    system = PolySystem(polys, n, name="rank two isotropic")
    opts = opts or TrackerOptions(max_steps=2000)
    res = solve_total_degree(system, opts, rng)
    full = PolySystem(Q, n)
    pts = res.x[res.success]
    resid = _normalized(full, pts, lambda v: np.max(np.abs(v)) ** 2)
    hits, degenerate = [], 0
    for v, r in zip(pts, resid):
        Y = np.outer(v[:m], v[:m]) + np.outer(v[m:], v[m:])
        s = np.linalg.svd(Y, compute_uv=False)
        if s[0] == 0 or s[1] < 1e-6 * s[0]:
            degenerate += 1
            continue
        if r < tol:
            hits.append(v.tolist())
    out = _report(res, resid, hits, 2 ** k, {"quadrics": len(Q), "tol": tol,
                                             "rank_deficient_endpoints": degenerate})
    out["complete"] = False
    out["confidence"] = ("the square subsystem has positive-dimensional spurious components "
                         "(rank <= 1); rank-two emptiness is heuristic")
    return out


def _normalized(system, pts, scale):
    if not len(pts):
        return np.zeros(0)
    vals = np.abs(system.evaluate(pts))
    return np.max(vals, axis=1) / np.array([scale(v) for v in pts])
