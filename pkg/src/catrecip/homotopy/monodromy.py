"""Monodromy solving of parametrized systems and the trace test.

A family is a :class:`PolySystem` with parameters.  Starting from one
solution at base parameters ``p0``, solutions are carried around loops
``p0 -> p1 -> p2 -> p0`` through random parameter values; endpoints that are
new get added.  Loops stop once ``stop_after`` consecutive loops find
nothing new and at least ``min_stagnant_paths`` tracked loop-paths in a row
returned only known points.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .polysys import PolySystem
from .tracker import TrackerOptions, dedup, newton, track_parameter


@dataclass
class MonodromyOptions:
    stop_after: int = 5
    # with few known points five loops say little; also require this many
    # loop-paths in a row that found nothing new
    min_stagnant_paths: int = 40
    max_loops: int = 200
    loop_mode: str = "triangle"  # or "single": move one parameter block
    dedup_tol: float = 1e-6
    time_budget: float | None = None
    tracker: TrackerOptions = field(default_factory=TrackerOptions)


@dataclass
class WitnessSet:
    system: PolySystem
    params: np.ndarray
    points: np.ndarray
    loops: int = 0
    stats: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    def to_json(self) -> dict:
        def cx(a):
            return [[z.real, z.imag] for z in np.ravel(a)]
        return {"params": cx(self.params), "points": [cx(p) for p in self.points],
                "loops": self.loops, "stats": self.stats}


def _add_new(known, found, tol):
    added = []
    for p in found:
        scale = 1 + np.max(np.abs(p))
        if all(np.max(np.abs(p - q)) > tol * scale for q in list(known) + added):
            added.append(p)
    return added


def _random_params(rng, p0, blocks, mode):
    # auxiliary points at the scale of the base point
    scale = np.sqrt(np.mean(np.abs(p0) ** 2)) or 1.0

    def draw(n):
        return scale * (rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2)

    if mode == "triangle" or blocks is None:
        return draw(p0.shape)
    if mode != "single":
        raise ValueError(f"unknown loop mode {mode!r}")
    out = p0.copy()
    b = blocks[rng.integers(len(blocks))]
    out[b] = draw(len(b))
    return out


def monodromy_solve(system: PolySystem, p0, seeds, rng, opts: MonodromyOptions | None = None,
                    blocks=None, accept=None, log=None) -> WitnessSet:
    """Populate the solution set of ``system`` at ``p0`` from ``seeds``.

    Never raises on non-convergence: when the loop or time budget runs out
    the set found so far is returned with ``stats["stabilized"] = False``.

    ``accept(points) -> mask`` filters endpoints (e.g. off a bad locus);
    ``blocks`` lists parameter index groups for the ``single`` loop mode.
    """
    opts = opts or MonodromyOptions()
    p0 = np.asarray(p0, dtype=complex)
    sols = list(dedup(np.atleast_2d(np.asarray(seeds, dtype=complex)), opts.dedup_tol))
    stagnant = stagnant_paths = loops = failures = paths = 0
    history = [len(sols)]
    t0 = time.time()
    exhausted = False
    while stagnant < opts.stop_after or stagnant_paths < opts.min_stagnant_paths:
        if loops >= opts.max_loops or (opts.time_budget is not None
                                       and time.time() - t0 > opts.time_budget):
            exhausted = True
            break
        p1 = _random_params(rng, p0, blocks, opts.loop_mode)
        p2 = _random_params(rng, p0, blocks, opts.loop_mode)
        cur = np.array(sols, dtype=complex)
        alive = np.ones(len(cur), dtype=bool)
        for a, b in ((p0, p1), (p1, p2), (p2, p0)):
            r = track_parameter(system, cur[alive], a, b, opts.tracker)
            paths += len(r)
            failures += int((~r.success).sum())
            nxt = np.array(cur)
            nxt[np.flatnonzero(alive)] = r.x
            alive[np.flatnonzero(alive)[~r.success]] = False
            cur = nxt
        found = cur[alive]
        if accept is not None and len(found):
            found = found[accept(found)]
        new = _add_new(sols, found, opts.dedup_tol)
        sols.extend(new)
        loops += 1
        stagnant = 0 if new else stagnant + 1
        stagnant_paths = 0 if new else stagnant_paths + int(alive.sum())
        history.append(len(sols))
        if log:
            log(f"loop {loops}: {len(sols)} solutions (+{len(new)})")
    stats = {"loops": loops, "paths": paths, "failed_paths": failures, "history": history,
             "seconds": round(time.time() - t0, 2), "loop_mode": opts.loop_mode,
             "stabilized": not exhausted, "budget_exhausted": exhausted}
    return WitnessSet(system, p0, np.array(sols), loops, stats)


def trace_test(system: PolySystem, params, points, direction, rng=None,
               opts: TrackerOptions | None = None, coords=None, tol: float = 1e-6) -> dict:
    """Check that the sum of ``points`` moves linearly along ``params + t * direction``.

    ``coords(points)`` maps solutions to the affine coordinates whose sum is
    tested (default: the solutions themselves).  Passing means the points
    are a complete witness set for the component they sample.
    """
    rng = rng or np.random.default_rng()
    params = np.asarray(params, dtype=complex)
    direction = np.asarray(direction, dtype=complex)
    coords = coords or (lambda X: X)
    ts = (rng.normal(size=2) + 1j * rng.normal(size=2)) * 0.3
    sums = [coords(np.atleast_2d(points)).sum(axis=0)]
    ok = True
    for t in ts:
        r = track_parameter(system, points, params, params + t * direction, opts)
        ok &= bool(r.success.all())
        sums.append(coords(r.x).sum(axis=0))
    d1 = (sums[1] - sums[0]) / ts[0]
    d2 = (sums[2] - sums[0]) / ts[1]
    scale = max(np.max(np.abs(d1)), np.max(np.abs(d2)), np.max(np.abs(sums[0])), 1e-300)
    resid = float(np.max(np.abs(d1 - d2)) / scale)
    return {"passed": bool(ok and resid < tol), "residual": resid, "tracked": ok,
            "points": len(np.atleast_2d(points)), "tol": tol}


def polish(system: PolySystem, points, params=None, tol=1e-12):
    def F(x):
        _, J, _ = system.jacobian(x, params)
        return system.evaluate(x, params, extended=True), J
    return newton(F, points, tol)
