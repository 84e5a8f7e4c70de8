import numpy as np

from catrecip.fields import DEFAULT_PRIMES, GF
from catrecip.jets import Jet, jet_adjugate_tpoly, jet_char_adjugate, jet_rank
from catrecip.linalg import adjugate, adjugate_tpoly

F = GF(DEFAULT_PRIMES[1])


def _direction(n, i):
    e = np.zeros(n, dtype=np.int64)
    e[i] = 1
    return e


def test_product_rule():
    x = Jet.variables([3, 5], F)
    f = x[0] * x[0] * x[1]
    assert int(f.val) == 45
    assert f.der.tolist() == [30, 9]


def test_adjugate_derivative_matches_interpolated_coefficient(rng):
    M = F.random(rng, (4, 4))
    X = F.random(rng, (4, 4))
    J = Jet(M, X[..., None], F)
    adj, det = jet_char_adjugate(J)
    assert np.array_equal(adj.val, adjugate(M, F))
    # d/dt adj(M + tX) at t = 0 is the t-coefficient of the interpolant
    assert np.array_equal(adj.der[..., 0], adjugate_tpoly(M, X, F).coefficient(1))


def test_jet_tpoly_values_match_plain(rng):
    A, X = F.random(rng, (3, 3)), F.random(rng, (3, 3))
    Aj = Jet.constant(A, 2, F)
    Xj = Jet(X, F.random(rng, (3, 3, 2)), F)
    got = jet_adjugate_tpoly(Aj, Xj)
    want = adjugate_tpoly(A, X, F).coeffs
    assert np.array_equal(got.val, want)


def test_jet_rank_of_veronese_curve():
    # t -> (1, t, t^2, t^3): image is a curve, so span of value and derivative has rank 2
    t = Jet.variables([7], F)[0]
    one = Jet.constant(1, 1, F)
    pts = [one, t, t * t, t * t * t]
    J = Jet(np.array([p.val for p in pts]), np.array([p.der for p in pts]), F)
    assert jet_rank(J) == 2
