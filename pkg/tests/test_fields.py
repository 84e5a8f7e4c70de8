from fractions import Fraction

import numpy as np
import pytest

from catrecip.fields import DEFAULT_PRIMES, GF, QQ, Field, FieldError


def test_default_primes_are_distinct_primes_below_2_26():
    a, b = DEFAULT_PRIMES
    assert a != b and max(a, b) < 2**26
    GF(a), GF(b)


def test_composite_modulus_rejected():
    with pytest.raises(FieldError):
        GF(91)


def test_fraction_reduction_in_prime_field():
    F = GF(101)
    assert F.element(Fraction(1, 2)) * 2 % 101 == 1
    assert F.inv(3) * 3 % 101 == 1
    with pytest.raises(ZeroDivisionError):
        F.inv(0)
    with pytest.raises(ZeroDivisionError):
        QQ.inv(0)


@pytest.mark.parametrize("p", [DEFAULT_PRIMES[0], 2**31 - 1, 2**61 - 1])
def test_matmul_is_exact(p):
    rng = np.random.default_rng(1)
    F = GF(p)
    A = F.random(rng, (17, 33))
    B = F.random(rng, (33, 9))
    got = F.matmul(A, B)
    want = [[sum(int(A[i, k]) * int(B[k, j]) for k in range(33)) % p for j in range(9)]
            for i in range(17)]
    assert [[int(x) for x in row] for row in got] == want


def test_batched_matmul():
    rng = np.random.default_rng(2)
    F = GF(DEFAULT_PRIMES[1])
    A = F.random(rng, (3, 4, 5))
    B = F.random(rng, (3, 5, 2))
    got = F.matmul(A, B)
    for i in range(3):
        assert np.array_equal(got[i], F.matmul(A[i], B[i]))


def test_json_roundtrip():
    for f in (QQ, GF(101)):
        assert Field.from_json(f.to_json()) == f


def test_negative_values_canonical():
    F = GF(101)
    assert F.asarray(np.array([-1, -102])).tolist() == [100, 100]
    assert F.asarray(np.array([Fraction(-1, 2)], dtype=object)).tolist() == [50]
