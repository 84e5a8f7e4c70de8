"""First-order jets over a prime field.

A :class:`Jet` carries a value array and, for each of ``D`` independent
infinitesimal directions, its derivative (``eps_i * eps_j = 0``).  Pushing
jets through a polynomial map yields its exact Jacobian at a point, whose
rank is the dimension of the image near a generic point.
"""
from __future__ import annotations

import numpy as np

from .fields import Field, FieldError
from .linalg import interpolation_matrix, rank


class Jet:
    __slots__ = ("val", "der", "field")

    def __init__(self, val, der, field: Field):
        self.val = np.asarray(val)
        self.der = np.asarray(der)
        self.field = field

    @classmethod
    def constant(cls, val, ndirs: int, field: Field):
        val = field.asarray(val)
        return cls(val, field.zeros(val.shape + (ndirs,)), field)

    @classmethod
    def variables(cls, values, field: Field, offset: int = 0, ndirs: int | None = None):
        """Independent coordinates: direction ``offset + i`` is d/d values[i]."""
        values = field.asarray(values).ravel()
        ndirs = len(values) + offset if ndirs is None else ndirs
        der = field.zeros((len(values), ndirs))
        der[np.arange(len(values)), offset + np.arange(len(values))] = 1
        return cls(values, der, field)

    @property
    def ndirs(self) -> int:
        return self.der.shape[-1]

    @property
    def shape(self):
        return self.val.shape

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.val[idx], self.der[idx + (slice(None),)], self.field)

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.ndirs, self.field)

    def __add__(self, other):
        o = self._lift(other)
        f = self.field
        return Jet(f.reduce(self.val + o.val), f.reduce(self.der + o.der), f)

    __radd__ = __add__

    def __neg__(self):
        f = self.field
        return Jet(f.reduce(-self.val), f.reduce(-self.der), f)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        f = self.field
        if not isinstance(other, Jet):
            c = np.asarray(f.asarray(other))
            return Jet(f.reduce(self.val * c), f.reduce(self.der * c[..., None]), f)
        val = f.reduce(self.val * other.val)
        der = f.reduce(f.reduce(self.val[..., None] * other.der)
                       + f.reduce(other.val[..., None] * self.der))
        return Jet(val, der, f)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = Jet.constant(np.ones(self.shape, dtype=np.int64), self.ndirs, self.field)
        for _ in range(e):
            out = out * self
        return out

    def sum(self, axis=0):
        f = self.field
        ax = axis if axis >= 0 else self.val.ndim + axis
        return Jet(f.reduce(self.val.sum(axis=ax)), f.reduce(self.der.sum(axis=ax)), f)

    def matmul(self, other: "Jet") -> "Jet":
        """Batched matrix product over the last two value axes."""
        f = self.field
        val = f.matmul(self.val, other.val)
        # d(AB) = dA B + A dB, directions moved to the front for matmul
        dA = np.moveaxis(self.der, -1, 0)
        dB = np.moveaxis(other.der, -1, 0)
        der = f.reduce(f.matmul(dA, other.val[None]) + f.matmul(self.val[None], dB))
        return Jet(val, np.moveaxis(der, 0, -1), f)

    def trace(self):
        f = self.field
        val = f.reduce(np.trace(self.val, axis1=-2, axis2=-1))
        der = f.reduce(np.trace(self.der, axis1=-3, axis2=-2))
        return Jet(val, der, f)

    def tangent_matrix(self) -> np.ndarray:
        """Rows: the flattened value followed by every directional derivative."""
        v = self.val.reshape(1, -1)
        d = self.der.reshape(-1, self.ndirs).T
        return np.concatenate([v, d], axis=0)


def jet_char_adjugate(M: Jet):
    """Faddeev-LeVerrier adjugate and determinant of a (batched) jet matrix."""
    f = M.field
    m = M.shape[-1]
    if f.p <= m:
        raise FieldError(f"{f} too small for {m}x{m} adjugate")
    eye = np.broadcast_to(f.eye(m), M.shape)
    Mk = Jet.constant(np.array(eye), M.ndirs, f)
    c = None
    for k in range(1, m + 1):
        if k > 1:
            Mk = M.matmul(Mk) + _scale_eye(c, eye)
        c = M.matmul(Mk).trace() * f.reduce(-f.inv(k))
    adj = Mk if m % 2 == 1 else -Mk
    det = c if m % 2 == 0 else -c
    return adj, det


def _scale_eye(c: Jet, eye):
    f = c.field
    val = f.reduce(c.val[..., None, None] * eye)
    der = f.reduce(c.der[..., None, None, :] * eye[..., None])
    return Jet(val, der, f)


def jet_adjugate_tpoly(A: Jet, X: Jet):
    """Coefficients in ``t`` of ``adjugate(A + t X)`` as a jet of shape (m, m, m)."""
    f = A.field
    m = A.shape[-1]
    W = interpolation_matrix(m, f)
    ts = f.asarray(np.arange(1, m + 1))
    stack = A[None] * np.ones((m, 1, 1), dtype=np.int64) + X[None] * ts[:, None, None]
    values, _ = jet_char_adjugate(stack)
    val = f.reduce(np.tensordot(W, values.val, axes=(1, 0)))
    der = f.reduce(np.tensordot(W, values.der, axes=(1, 0)))
    return Jet(val, der, f)


def jet_rank(J: Jet) -> int:
    """Rank of the span of the value and all its first derivatives."""
    return rank(J.tangent_matrix(), J.field)
