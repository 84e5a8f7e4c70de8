"""Exact coefficient fields: the rationals and prime fields GF(p).

Elements live in numpy arrays.  Prime fields with ``p < 2**31`` use
``int64`` arrays holding canonical representatives in ``[0, p)``; larger
primes and the rationals use ``object`` arrays (Python ints / Fractions).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy import isprime

# Largest primes below 2**26: elementwise products fit in 52 bits, which keeps
# the float64 blocked matmul exact.
DEFAULT_PRIMES = (67108859, 67108837)

_INT64_LIMIT = 2**31
_LIMB_BITS = 13


class FieldError(ValueError):
    """Raised when a field cannot support the requested operation."""


@dataclass(frozen=True)
class Field:
    """Q when ``p`` is None, otherwise GF(p)."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not isprime(int(self.p)):
            raise FieldError(f"modulus {self.p} is not prime")

    @property
    def is_prime(self) -> bool:
        return self.p is not None

    @property
    def dtype(self):
        if self.p is not None and self.p < _INT64_LIMIT:
            return np.int64
        return object

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"

    # -- conversion -------------------------------------------------------
    def asarray(self, values) -> np.ndarray:
        """Canonical array of field elements from ints / Fractions / arrays."""
        arr = np.asarray(values)
        if self.p is None:
            out = np.empty(arr.shape, dtype=object)
            for idx, v in np.ndenumerate(arr):
                out[idx] = Fraction(v) if not isinstance(v, Fraction) else v
            return out
        if arr.dtype == object:
            flat = [self.element(v) for v in arr.ravel()]
            return np.array(flat, dtype=self.dtype).reshape(arr.shape)
        if self.dtype is object:
            return np.array([int(v) % self.p for v in arr.ravel()],
                            dtype=object).reshape(arr.shape)
        return np.mod(arr if arr.dtype == np.int64 else arr.astype(np.int64), self.p)

    def element(self, v):
        """Single canonical element (handles Fractions in prime fields)."""
        if self.p is None:
            return Fraction(v)
        if isinstance(v, Fraction):
            return (v.numerator * pow(v.denominator, -1, self.p)) % self.p
        return int(v) % self.p

    def zeros(self, shape) -> np.ndarray:
        if self.p is None:
            out = np.empty(shape, dtype=object)
            out.fill(Fraction(0))
            return out
        return np.zeros(shape, dtype=self.dtype)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    @property
    def one(self):
        return Fraction(1) if self.p is None else 1

    @property
    def zero(self):
        return Fraction(0) if self.p is None else 0

    # -- arithmetic -------------------------------------------------------
    def reduce(self, arr):
        if self.p is None:
            return arr
        return arr % self.p

    def inv(self, a):
        if self.p is None:
            if a == 0:
                raise ZeroDivisionError("inverse of zero")
            return 1 / Fraction(a)
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def neg(self, arr):
        return self.reduce(-arr)

    def mul(self, a, b):
        return self.reduce(a * b)

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Exact product ``A @ B``."""
        if self.dtype is object:
            return self.reduce(np.matmul(A, B))
        return _matmul_mod(A, B, self.p)

    def random(self, rng: np.random.Generator, shape, nonzero=False):
        """Uniform random elements; over Q small integers in [-50, 50]."""
        if self.p is None:
            lo, hi = -50, 51
            vals = rng.integers(lo, hi, size=shape)
            if nonzero:
                vals = np.where(vals == 0, 1, vals)
            return self.asarray(vals)
        lo = 1 if nonzero else 0
        if self.dtype is object:
            n = int(np.prod(shape))
            vals = [lo + int(rng.integers(0, 2**62)) % (self.p - lo) for _ in range(n)]
            return np.array(vals, dtype=object).reshape(shape)
        return rng.integers(lo, self.p, size=shape, dtype=np.int64)

    def to_json(self) -> dict:
        if self.p is None:
            return {"type": "rational"}
        return {"type": "prime", "p": int(self.p)}

    @classmethod
    def from_json(cls, data: dict) -> "Field":
        if data["type"] == "rational":
            return cls()
        return cls(int(data["p"]))


QQ = Field()


def GF(p: int) -> Field:
    return Field(int(p))


def _matmul_mod(A, B, p):
    """``A @ B mod p`` for int64 operands, exact via float64 BLAS.

    A is split into 13-bit limbs so every partial dot product stays below
    2**53; the inner dimension is chunked accordingly.
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    k = A.shape[-1]
    if k == 0:
        return np.zeros(A.shape[:-1] + B.shape[-1:], dtype=np.int64)
    pbits = int(p - 1).bit_length()
    if k * (p - 1) ** 2 < 2**63 and A.size * B.shape[-1] < 2**20:
        # small products: plain int64 arithmetic is exact and cheap
        return (A @ B) % p
    chunk = max(1, 2 ** (53 - _LIMB_BITS - pbits))
    nlimbs = -(-pbits // _LIMB_BITS)
    mask = (1 << _LIMB_BITS) - 1
    Bf = B.astype(np.float64)
    out = None
    for start in range(0, k, chunk):
        stop = min(k, start + chunk)
        Ac = A[..., start:stop]
        Bc = Bf[..., start:stop, :]
        acc = None
        for limb in reversed(range(nlimbs)):
            part = ((Ac >> (limb * _LIMB_BITS)) & mask).astype(np.float64)
            # limb products are exact integers below 2**53
            prod = (part @ Bc).astype(np.int64)
            if acc is None:
                acc = prod
            else:
                acc %= p
                acc <<= _LIMB_BITS
                acc += prod
        acc %= p
        if out is None:
            out = acc
        else:
            out += acc
            out %= p
    return out
