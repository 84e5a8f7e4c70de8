"""Predictor-corrector path tracking, vectorized over many paths.

A homotopy is a callable ``h(x, s) -> (H, dH/dx, dH/ds)`` evaluated on a
batch ``x`` of shape ``(paths, n)`` with per-path times ``s``.  Each path
keeps its own step size; paths are advanced together while any is active.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .polysys import PolySystem


@dataclass
class TrackerOptions:
    initial_step: float = 0.02
    min_step: float = 1e-9
    max_step: float = 0.05
    corrector_tol: float = 1e-8
    corrector_iters: int = 3
    divergence: float = 1e10
    final_tol: float = 1e-12
    max_steps: int = 20000
    expand_after: int = 3


@dataclass
class TrackResult:
    x: np.ndarray
    success: np.ndarray
    reason: list = field(default_factory=list)
    steps: np.ndarray | None = None
    newton_residual: np.ndarray | None = None

    def __len__(self):
        return len(self.success)

    @property
    def endpoints(self) -> np.ndarray:
        return self.x[self.success]

    def summary(self) -> dict:
        reasons: dict = {}
        for r in self.reason:
            reasons[r] = reasons.get(r, 0) + 1
        return {"paths": len(self), "success": int(self.success.sum()), "reasons": reasons}


def _solve(A, b):
    try:
        return np.linalg.solve(A, b[..., None])[..., 0]
    except np.linalg.LinAlgError:
        out = np.empty_like(b)
        for i in range(A.shape[0]):
            out[i] = np.linalg.lstsq(A[i], b[i], rcond=None)[0]
        return out


def _norm(x):
    return np.max(np.abs(x), axis=-1)


def newton(F, x, tol=1e-12, iters=8):
    """Newton iterations on ``F(x) -> (value, jacobian)``; returns ``(x, last step norm)``."""
    x = np.array(x, dtype=complex)
    step = np.full(x.shape[0], np.inf)
    for _ in range(iters):
        live = np.flatnonzero(step >= tol)  # converged rows stay frozen
        if live.size == 0:
            break
        val, J = F(x[live])
        dx = _solve(J, val)
        bad = ~np.isfinite(dx).all(axis=1)
        dx[bad] = 0
        x[live] = x[live] - dx
        step[live] = np.where(bad, np.inf, _norm(dx) / (1 + _norm(x[live])))
    return x, step


def track(h, X0, opts: TrackerOptions | None = None) -> TrackResult:
    """Track every row of ``X0`` from ``s = 0`` to ``s = 1``."""
    opts = opts or TrackerOptions()
    x = np.array(np.atleast_2d(X0), dtype=complex)
    P = x.shape[0]
    s = np.zeros(P)
    hs = np.full(P, opts.initial_step)
    state = np.zeros(P, dtype=int)  # 0 active, 1 done, 2 failed
    reason = ["" for _ in range(P)]
    streak = np.zeros(P, dtype=int)
    steps = np.zeros(P, dtype=int)

    def rhs(xa, sa):
        _, Hx, Hs = h(xa, sa)
        return _solve(Hx, -Hs)

    while np.any(state == 0):
        idx = np.flatnonzero(state == 0)
        xa, sa = x[idx], s[idx]
        ha = np.minimum(hs[idx], 1 - sa)
        hb = ha[:, None]
        k1 = rhs(xa, sa)
        k2 = rhs(xa + hb / 2 * k1, sa + ha / 2)
        k3 = rhs(xa + hb / 2 * k2, sa + ha / 2)
        k4 = rhs(xa + hb * k3, sa + ha)
        y = xa + hb / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        sn = sa + ha
        conv = np.zeros(len(idx), dtype=bool)
        for _ in range(opts.corrector_iters):
            H, Hx, _ = h(y, sn)
            dy = _solve(Hx, H)
            y = y - dy
            with np.errstate(invalid="ignore", over="ignore"):
                conv |= _norm(dy) < opts.corrector_tol * (1 + _norm(y))
        ok = conv & np.isfinite(y).all(axis=1)
        steps[idx] += 1
        acc, rej = idx[ok], idx[~ok]
        x[acc] = y[ok]
        s[acc] = np.where(1 - sn[ok] < 1e-14, 1.0, sn[ok])
        streak[acc] += 1
        grow = acc[streak[acc] >= opts.expand_after]
        hs[grow] = np.minimum(2 * hs[grow], opts.max_step)
        streak[grow] = 0
        hs[rej] /= 2
        streak[rej] = 0
        for i in rej[hs[rej] < opts.min_step]:
            state[i], reason[i] = 2, "step size underflow"
        big = acc[_norm(x[acc]) > opts.divergence]
        for i in big:
            state[i], reason[i] = 2, "diverged"
        for i in acc[(s[acc] >= 1.0) & (state[acc] == 0)]:
            state[i], reason[i] = 1, "success"
        for i in idx[(steps[idx] >= opts.max_steps) & (state[idx] == 0)]:
            state[i], reason[i] = 2, "too many steps"

    done = state == 1
    resid = np.full(P, np.inf)
    if done.any():
        def F(z):
            H, Hx, _ = h(z, np.ones(z.shape[0]))
            return H, Hx
        x[done], resid[done] = newton(F, x[done], opts.final_tol)
    return TrackResult(x, done, reason, steps, resid)


# -- homotopies --------------------------------------------------------------

def convex_homotopy(start: PolySystem, target: PolySystem, gamma: complex):
    """``(1 - s) * gamma * G + s * F``."""
    def h(x, s):
        G, Gx, _ = start.jacobian(x)
        F, Fx, _ = target.jacobian(x)
        a = ((1 - s) * gamma)[:, None]
        b = s[:, None]
        return a * G + b * F, a[..., None] * Gx + b[..., None] * Fx, F - gamma * G
    return h


def parameter_homotopy(system: PolySystem, p0, p1):
    """Straight segment ``p(s) = p0 + s (p1 - p0)`` in parameter space."""
    p0 = np.asarray(p0, dtype=complex)
    dp = np.asarray(p1, dtype=complex) - p0

    def h(x, s):
        p = p0[None, :] + s[:, None] * dp[None, :]
        return system.jacobian(x, p, dp)
    return h


def track_path(start: PolySystem, target: PolySystem, start_points, opts=None,
               gamma: complex | None = None, rng=None) -> TrackResult:
    """Track start solutions through the gamma-trick convex homotopy."""
    if gamma is None:
        rng = rng or np.random.default_rng()
        gamma = np.exp(2j * np.pi * rng.random())
    return track(convex_homotopy(start, target, gamma), start_points, opts)


def track_parameter(system: PolySystem, points, p0, p1, opts=None) -> TrackResult:
    return track(parameter_homotopy(system, p0, p1), points, opts)


def total_degree_start(degrees, rng=None):
    """Start system ``x_i^d_i - c_i = 0`` and all of its solutions."""
    rng = rng or np.random.default_rng()
    n = len(degrees)
    c = np.exp(2j * np.pi * rng.random(n))
    polys = []
    for i, d in enumerate(degrees):
        e = [0] * n
        e[i] = d
        polys.append({tuple(e): 1, (0,) * n: -c[i]})
    roots = [c[i] ** (1 / d) * np.exp(2j * np.pi * np.arange(d) / d) for i, d in enumerate(degrees)]
    grids = np.meshgrid(*roots, indexing="ij")
    sols = np.stack([g.ravel() for g in grids], axis=1)
    return PolySystem(polys, n, name="total degree start"), sols


def solve_total_degree(system: PolySystem, opts=None, rng=None) -> TrackResult:
    """All isolated solutions of a square system via the total-degree homotopy."""
    if system.neqs != system.nvars:
        raise ValueError("system must be square")
    rng = rng or np.random.default_rng()
    start, sols = total_degree_start(system.degrees(), rng)
    return track_path(start, system, sols, opts, rng=rng)


def dedup(points, tol: float = 1e-6) -> np.ndarray:
    """Drop points within relative max-norm distance ``tol`` of an earlier one."""
    out: list = []
    for p in np.atleast_2d(points):
        scale = 1 + np.max(np.abs(p))
        if all(np.max(np.abs(p - q)) > tol * scale for q in out):
            out.append(p)
    return np.array(out).reshape(-1, np.atleast_2d(points).shape[1])
