import json

import numpy as np
import pytest

from catrecip.homotopy.monodromy import (MonodromyOptions, monodromy_solve, polish,
                                         trace_test)
from catrecip.homotopy.polysys import PolySystem, minors_expander, padd, pmul, variable
from catrecip.homotopy.probes import rank_one_isotropic_solve
from catrecip.homotopy.systems import (build_critical_system, build_pullback_system,
                                       critical_seed, degree_reciprocal, det_distance,
                                       ml_degree, orthogonal_complement, pullback_equations,
                                       random_lssm)
from catrecip.homotopy.tracker import (TrackerOptions, dedup, newton, solve_total_degree,
                                       track_parameter)
from catrecip.spaces import build_cat_space, sym_to_vec

from oracles import cofactor_det


def _conic():
    # x^2 + y^2 - a = 0, x - b y - c = 0; parameters (a, b, c)
    x, y = variable(0, 5), variable(1, 5)
    a, b, c = variable(2, 5), variable(3, 5), variable(4, 5)
    f1 = padd(padd(pmul(x, x), pmul(y, y)), a, -1)
    f2 = padd(padd(x, pmul(b, y), -1), c, -1)
    return PolySystem([f1, f2], 2, 3, name="conic")


def _conic_points(p):
    a, b, c = p
    # (b y + c)^2 + y^2 = a
    ys = np.roots([b * b + 1, 2 * b * c, c * c - a])
    return np.array([[b * y + c, y] for y in ys])


def test_evaluation_and_jacobian_against_finite_differences(rng):
    S = _conic()
    x = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    p = np.array([2.0, 0.5, 0.1], dtype=complex)
    dp = rng.normal(size=3)
    F, Jx, Jp = S.jacobian(x, p, dp)
    assert np.allclose(F, S.evaluate(x, p))
    h = 1e-7
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        fd = (S.evaluate(x + e, p) - S.evaluate(x - e, p)) / (2 * h)
        assert np.allclose(Jx[:, :, j], fd, atol=1e-6)
    fd = (S.evaluate(x, p + h * dp) - S.evaluate(x, p - h * dp)) / (2 * h)
    assert np.allclose(Jp, fd, atol=1e-6)


def test_json_roundtrip():
    S = _conic()
    back = PolySystem.from_json(S.to_json())
    x = np.array([[1 + 2j, -0.5j]])
    p = np.array([1.0, 2.0, 3j])
    assert np.allclose(back.evaluate(x, p), S.evaluate(x, p))
    assert json.loads(S.to_json())["nvars"] == 2


def test_minors_expander_matches_cofactor_determinant(rng):
    M = rng.integers(-5, 6, size=(4, 4))
    entries = [[{(): int(v)} for v in row] for row in M]
    minor = minors_expander(entries)
    got = minor((0, 1, 2, 3), (0, 1, 2, 3)).get((), 0)
    assert got == cofactor_det(M.tolist())


def test_parameter_homotopy_tracks_square_roots():
    x = variable(0, 2)
    S = PolySystem([padd(pmul(x, x), variable(1, 2), -1)], 1, 1)
    r = track_parameter(S, np.array([[1.0], [-1.0]]), np.array([1.0]), np.array([4.0]))
    assert r.success.all()
    assert np.allclose(sorted(r.x[:, 0].real), [-2, 2], atol=1e-10)


def test_total_degree_finds_all_conic_points(rng):
    p = np.array([2.0, 0.3, 0.4])
    S = _conic().with_params(p)
    r = solve_total_degree(S, TrackerOptions(), rng)
    pts = dedup(r.x[r.success])
    assert len(pts) == 2
    want = _conic_points(p)
    for w in want:
        assert np.min(np.max(np.abs(pts - w), axis=1)) < 1e-8


def test_newton_polish_reaches_tight_residual():
    p = np.array([2.0, 0.3, 0.4])
    S = _conic()
    pts = _conic_points(p) + 1e-5
    x, step = polish(S, pts, p)
    assert np.max(np.abs(S.evaluate(x, p))) < 1e-12 and step.max() < 1e-12


def test_monodromy_and_trace_test_on_conic(rng):
    S = _conic()
    p0 = np.array([2.0 + 0.3j, 0.7 - 0.2j, 0.1 + 0.5j])
    seed = _conic_points(p0)[:1]
    W = monodromy_solve(S, p0, seed, rng, MonodromyOptions(min_stagnant_paths=10))
    assert len(W.points) == 2 and W.stats["stabilized"]
    direction = np.array([0, 0, 1.0])
    full = trace_test(S, p0, W.points, direction, rng)
    assert full["passed"] and full["residual"] < 1e-6
    partial = trace_test(S, p0, W.points[:1], direction, rng)
    assert not partial["passed"]


def test_budget_exhaustion_returns_lower_bound(rng):
    S = _conic()
    p0 = np.array([2.0 + 0.3j, 0.7 - 0.2j, 0.1 + 0.5j])
    W = monodromy_solve(S, p0, _conic_points(p0)[:1], rng, MonodromyOptions(max_loops=0))
    assert len(W.points) == 1
    assert W.stats["budget_exhausted"] and not W.stats["stabilized"]


def test_dedup_relative():
    pts = np.array([[1.0, 2.0], [1.0 + 1e-9, 2.0], [5.0, 0.0]])
    assert len(dedup(pts)) == 2


def test_newton_on_singular_jacobian_does_not_crash():
    def F(x):
        return x ** 2, 2 * x[:, :, None]
    x, step = newton(F, np.array([[1e-3 + 0j]]), tol=1e-14, iters=3)
    assert np.all(np.isfinite(x))


def test_extended_evaluation_resolves_cancellation():
    x = variable(0, 1)
    big = 2.0 ** 40
    # (x + big)^2 - 2 big x - big^2 = x^2, evaluated at x = 1
    f = padd(pmul(padd(x, {(0,): big}), padd(x, {(0,): big})), {(1,): -2 * big, (0,): -big * big})
    sysm = PolySystem([f], 1)
    pt = np.array([[1.0 + 0j]])
    assert sysm.evaluate(pt, extended=True)[0, 0] == 1
    rng = np.random.default_rng(3)
    z = rng.normal(size=(5, 1)) + 1j * rng.normal(size=(5, 1))
    g = PolySystem([pmul(x, pmul(x, x))], 1)
    assert np.allclose(g.evaluate(z, extended=True), g.evaluate(z), rtol=1e-14)


def test_newton_freezes_converged_rows():
    calls = []

    def F(x):
        calls.append(len(x))
        return x ** 2 - 4, 2 * x[:, :, None]
    x0 = np.array([[2.0 + 0j], [1.0 + 0j]])  # first row is already a root
    x, step = newton(F, x0, tol=1e-12)
    assert x[0, 0] == 2 and step[0] == 0
    assert abs(x[1, 0] - 2) < 1e-12 and step[1] < 1e-12
    assert calls[0] == 2 and all(c == 1 for c in calls[1:])


# -- pullback ------------------------------------------------------------------

def test_binary_quartic_pullback_is_one_quadric(cat22):
    polys, N = pullback_equations(cat22)
    assert N == 6 and len(polys) == 1
    assert {sum(e) for e in polys[0]} == {2}


def test_ternary_quartic_pullback_shape(cat23):
    polys, N = pullback_equations(cat23)
    assert N == 21 and len(polys) == 6
    assert all({sum(e) for e in p} == {5} for p in polys)


def _relative_values(polys, N, y):
    S = PolySystem(polys, N)
    vals = np.abs(S.evaluate(y[None]))[0]
    mags = np.array([sum(abs(c) * np.prod(np.abs(y) ** np.array(e)) for e, c in p.items())
                     for p in polys])
    return vals / mags


def test_pullback_vanishes_on_reciprocal_points(cat23, rng):
    polys, N = pullback_equations(cat23)
    for _ in range(5):
        K = sum(rng.normal() * B for B in cat23.basis)
        y = sym_to_vec(np.linalg.inv(K))
        assert np.all(_relative_values(polys, N, y) < 1e-10)
    # and not on a random symmetric matrix
    y = rng.normal(size=21)
    assert np.max(_relative_values(polys, N, y)) > 1e-6


def test_pullback_relations_match_numeric_adjugate(cat23, rng):
    polys, N = pullback_equations(cat23)
    W = orthogonal_complement(cat23)
    Y = rng.normal(size=(6, 6))
    Y = Y + Y.T
    adj = np.linalg.det(Y) * np.linalg.inv(Y)
    got = PolySystem(polys, N).evaluate(sym_to_vec(Y)[None])[0]
    want = [np.trace(w @ adj) for w in W]
    assert np.allclose(got, want, rtol=1e-9, atol=1e-9 * np.abs(want).max())


def test_pullback_system_is_square(cat22, rng):
    S, info = build_pullback_system(cat22, rng)
    assert S.neqs == S.nvars == 6
    assert S.nparams == info["slices"] * info["N"] == 24


def test_det_distance():
    assert det_distance([np.eye(3)])[0] == pytest.approx(1.0)
    assert det_distance([np.diag([1.0, 1e-9, 1.0])])[0] == pytest.approx(1e-9)


# -- critical ------------------------------------------------------------------

def test_critical_seed_solves_its_system(cat23, rng):
    s, x0, S = critical_seed(cat23, rng)
    system = build_critical_system(cat23)
    F = system.evaluate(x0[None], s)[0]
    K = sum(c * B for c, B in zip(x0.real, cat23.basis))
    scale = abs(np.linalg.det(K)) * np.max(np.abs(s))
    assert np.max(np.abs(F)) < 1e-9 * scale
    assert np.allclose(S, S.T)


def test_critical_system_shape(cat22, rng):
    S = rng.normal(size=(3, 3))
    system = build_critical_system(cat22, S + S.T)
    assert system.neqs == system.nvars == 5


def test_asymmetric_data_rejected(cat22):
    with pytest.raises(ValueError):
        build_critical_system(cat22, np.arange(9.0).reshape(3, 3))


# -- degrees -------------------------------------------------------------------

def test_binary_quartic_degree_and_ml(cat22):
    d = degree_reciprocal(cat22, np.random.default_rng(1))
    assert d["degree"] == 2 and d["complete"] and d["trace_test"]["passed"]
    assert d["stats"]["max_newton_step"] < 1e-12
    ml = ml_degree(cat22, np.random.default_rng(2))
    assert ml["ml_degree"] == 2 and ml["stats"]["max_gradient_error"] < 1e-8


def test_binary_sextic_degree_equals_ml():
    space = build_cat_space(3, 1)
    d = degree_reciprocal(space, np.random.default_rng(3))
    ml = ml_degree(space, np.random.default_rng(4))
    assert d["degree"] == ml["ml_degree"] == 5 and d["trace_test"]["passed"]


def test_single_loop_mode(cat22):
    d = degree_reciprocal(cat22, np.random.default_rng(5), MonodromyOptions(loop_mode="single"))
    assert d["degree"] == 2


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(5))
def test_binary_counts_reproduce_across_seeds(seed):
    space = build_cat_space(3, 1)
    assert degree_reciprocal(space, np.random.default_rng([seed, 1]))["degree"] == 5
    assert ml_degree(space, np.random.default_rng([seed, 2]))["ml_degree"] == 5


@pytest.mark.slow
def test_binary_octic_degree():
    d = degree_reciprocal(build_cat_space(4, 1), np.random.default_rng(6))
    assert d["degree"] == 14 and d["trace_test"]["passed"]


def test_ml_degree_at_most_degree_for_generic_space():
    space = random_lssm(3, 3, np.random.default_rng(7))
    d = degree_reciprocal(space, np.random.default_rng(8))
    ml = ml_degree(space, np.random.default_rng(9))
    # a generic net of conics: reciprocal degree 4, ML-degree 4
    assert ml["ml_degree"] <= d["degree"] == 4


def test_rank_one_isotropic_probe_is_complete_and_empty(cat23):
    rep = rank_one_isotropic_solve(cat23, np.random.default_rng(10))
    assert rep["complete"] and rep["distinct_endpoints"] == rep["bezout_bound"] == 32
    assert rep["solutions"] == [] and rep["min_full_residual"] > 1e-3


def test_rank_one_probe_finds_points_of_a_generic_space():
    # five generic quadrics v^T E v on P^5 meet in 2^5 points, all of them real hits
    space = random_lssm(6, 5, np.random.default_rng(11))
    rep = rank_one_isotropic_solve(space, np.random.default_rng(12))
    assert rep["complete"] and len(rep["solutions"]) == 32
