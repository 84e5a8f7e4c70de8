import numpy as np
import pytest

from catrecip.fields import DEFAULT_PRIMES, GF
from catrecip.sampling import (FormBasis, SampleCloud, SamplingError, evaluate_form,
                               evaluation_matrix, hilbert_count, monomial_count,
                               multiples_rank, reciprocal_hilbert, sample_reciprocal,
                               span_dimension, vanishing_forms)
from catrecip.spaces import monomials

P1, P2 = DEFAULT_PRIMES


def binary_quadric(y, p):
    """``y2 (y2 - y3) + y1 y4 - y0 y5`` in row-major upper-triangle coordinates."""
    y = [int(v) for v in y]
    return (y[2] * (y[2] - y[3]) + y[1] * y[4] - y[0] * y[5]) % p


@pytest.mark.parametrize("p", DEFAULT_PRIMES)
def test_binary_quartic_quadric_vanishes(cat22, p):
    cloud = sample_reciprocal(cat22, 2000, GF(p), np.random.default_rng(p))
    assert all(binary_quadric(y, p) == 0 for y in cloud.points)


def test_binary_quartic_hf2_and_form(cat22):
    F = GF(P1)
    cloud = sample_reciprocal(cat22, 60, F, np.random.default_rng(3))
    check = sample_reciprocal(cat22, 60, GF(P2), np.random.default_rng(4))
    assert hilbert_count(cloud, 2, check=check) == 1
    forms = vanishing_forms(cloud, 2)
    f = forms.forms[0]
    rng = np.random.default_rng(5)
    for _ in range(10):
        y = F.random(rng, (6,))
        a, b = int(evaluate_form(f, y, F)), binary_quadric(y, P1)
        # proportional to the known quadric: ratio is fixed
        assert (a == 0) == (b == 0)
    ratios = set()
    for _ in range(5):
        y = F.random(rng, (6,))
        ratios.add(int(evaluate_form(f, y, F)) * pow(binary_quadric(y, P1), -1, P1) % P1)
    assert len(ratios) == 1


def test_points_are_adjugates_normalized(cat22):
    cloud = sample_reciprocal(cat22, 10, GF(P1), np.random.default_rng(0))
    for y in cloud.points:
        nz = np.flatnonzero(y)
        assert y[nz[0]] == 1


def test_reciprocal_hilbert_cat23_low_degrees(cat23):
    assert reciprocal_hilbert(cat23, 2) == 0


@pytest.mark.slow
def test_reciprocal_hilbert_cat23_cubics(cat23):
    assert reciprocal_hilbert(cat23, 3) == 27


def test_evaluation_matrix_against_direct_products():
    F = GF(101)
    pts = F.asarray(np.array([[2, 3, 5], [7, 0, 1]]))
    E = evaluation_matrix(pts, 2, F)
    exps = monomials(3, 2)
    for i, pt in enumerate(pts):
        for j, e in enumerate(exps):
            assert E[i, j] == int(np.prod([int(x) ** k for x, k in zip(pt, e)])) % 101


def test_too_few_points_rejected(cat22):
    cloud = sample_reciprocal(cat22, 5, GF(P1), np.random.default_rng(0))
    with pytest.raises(SamplingError):
        hilbert_count(cloud, 2)


def test_span_of_binary_reciprocal_is_full(cat22):
    cloud = sample_reciprocal(cat22, 30, GF(P1), np.random.default_rng(1))
    assert span_dimension(cloud) == 5


def test_multiples_rank_of_single_quadric(cat22):
    cloud = sample_reciprocal(cat22, 60, GF(P1), np.random.default_rng(2))
    forms = vanishing_forms(cloud, 2)
    # a single nonzero quadric times the 6 linear forms stays independent
    assert multiples_rank(forms, 1) == 6


def test_json_roundtrips(cat22):
    F = GF(P1)
    cloud = sample_reciprocal(cat22, 40, F, np.random.default_rng(6))
    back = SampleCloud.from_json(cloud.to_json())
    assert np.array_equal(back.points, cloud.points) and back.field == F
    forms = vanishing_forms(cloud, 2)
    fb = FormBasis.from_json(forms.to_json())
    assert np.array_equal(fb.forms, forms.forms)
    assert len(fb.monomials) == monomial_count(6, 2)
