"""Dense exact linear algebra over :class:`~catrecip.fields.Field`.

Matrices are plain numpy arrays whose entries are canonical field elements
(see :meth:`Field.asarray`).  Every routine is a pure function of its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .fields import Field, FieldError


class DimensionError(ValueError):
    pass


class StructureError(ValueError):
    pass


def _square(M):
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    return M.shape[0]


def echelon(M, field: Field, block: int | None = None):
    """Row echelon form by blocked right-looking elimination.

    Returns ``(U, pivots, sign)``: the ``rank x cols`` echelon rows, their
    pivot columns, and the parity of the row interchanges.  Pivoting takes
    the first nonzero entry of each column, so the result is deterministic.
    Prime fields update the trailing matrix with one exact matmul per panel.
    """
    A = field.asarray(M)
    if np.may_share_memory(A, M):
        A = A.copy()
    if A.ndim != 2:
        raise DimensionError("echelon expects a 2-d array")
    nr, nc = A.shape
    if block is None:
        block = 128 if field.dtype is np.int64 else max(nc, 1)
    r, sign, pivots = 0, 1, []
    c0 = 0
    while c0 < nc and r < nr:
        c1 = min(c0 + block, nc)
        L = field.zeros((nr - r, c1 - c0))
        k = 0
        for j in range(c0, c1):
            rk = r + k
            if rk >= nr:
                break
            nz = np.flatnonzero(A[rk:, j] != 0)
            if nz.size == 0:
                continue
            piv = rk + int(nz[0])
            if piv != rk:
                A[[rk, piv]] = A[[piv, rk]]
                L[[k, piv - r]] = L[[piv - r, k]]
                sign = -sign
            l = field.reduce(A[rk + 1:, j] * field.inv(A[rk, j]))
            L[k + 1:, k] = l
            if j + 1 < c1 and l.size:
                # reduced operands keep a - l*b inside int64, so one reduction suffices
                upd = np.multiply.outer(l, A[rk, j + 1:c1])
                np.subtract(A[rk + 1:, j + 1:c1], upd, out=upd)
                A[rk + 1:, j + 1:c1] = field.reduce(upd)
            A[rk + 1:, j] = field.zero
            pivots.append(j)
            k += 1
        if k and c1 < nc:
            top = A[r:r + k, c1:]
            for i in range(1, k):
                top[i] = field.reduce(top[i] - field.matmul(L[i:i + 1, :i], top[:i])[0])
            # row chunks keep the temporaries small on large eliminations
            step = max(256, (1 << 22) // (nc - c1))
            for s in range(r + k, nr, step):
                e = min(nr, s + step)
                prod = field.matmul(L[s - r:e - r, :k], top)
                if A.dtype == object:
                    A[s:e, c1:] = field.reduce(A[s:e, c1:] - prod)
                else:
                    blk = A[s:e, c1:]
                    blk -= prod
                    blk %= field.p
        r += k
        c0 = c1
    return A[:r], pivots, sign


def _kernel_from_echelon(U, pivots, ncols, field):
    r = len(pivots)
    free = [j for j in range(ncols) if j not in set(pivots)]
    K = field.zeros((len(free), ncols))
    if not free:
        return K
    for i, f in enumerate(free):
        K[i, f] = field.one
    if r == 0:
        return K
    B = field.neg(U[:, free])
    Up = U[:, pivots]
    X = field.zeros((r, len(free)))
    for i in reversed(range(r)):
        X[i] = field.reduce(B[i] * field.inv(Up[i, i]))
        if i:
            B[:i] = field.reduce(B[:i] - field.reduce(np.multiply.outer(Up[:i, i], X[i])))
    K[:, pivots] = X.T
    return K


def rank_kernel(M, field: Field):
    """Rank and a basis of the right kernel (rows of the returned array)."""
    M = field.asarray(M)
    if M.ndim != 2:
        raise DimensionError("rank_kernel expects a matrix")
    ncols = M.shape[1]
    if M.shape[0] == 0 or ncols == 0:
        return 0, _kernel_from_echelon(field.zeros((0, ncols)), [], ncols, field)
    U, pivots, _ = echelon(M, field)
    return len(pivots), _kernel_from_echelon(U, pivots, ncols, field)


def rank(M, field: Field) -> int:
    if np.asarray(M).size == 0:
        return 0
    return len(echelon(M, field)[1])


def determinant(M, field: Field):
    M = field.asarray(M)
    n = _square(M)
    if n == 0:
        return field.one
    U, pivots, sign = echelon(M, field)
    if len(pivots) < n:
        return field.zero
    det = field.one if sign > 0 else field.element(-1)
    for i in range(n):
        det = field.reduce(det * U[i, i])
    return det


def inverse(M, field: Field):
    M = field.asarray(M)
    n = _square(M)
    aug = np.concatenate([M, field.eye(n)], axis=1)
    U, pivots, _ = echelon(aug, field)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ZeroDivisionError("matrix is singular")
    # back substitution on [U1 | U2]
    X = U[:, n:].copy()
    for i in reversed(range(n)):
        X[i] = field.reduce(X[i] * field.inv(U[i, i]))
        if i:
            X[:i] = field.reduce(X[:i] - field.reduce(np.multiply.outer(U[:i, i], X[i])))
    return X


def adjugate(M, field: Field):
    """Transpose of the cofactor matrix, computed minor by minor.

    Defined for singular input: corank >= 2 gives zero, corank 1 a rank-1
    matrix.
    """
    M = field.asarray(M)
    n = _square(M)
    if n == 1:
        return field.eye(1)
    adj = field.zeros((n, n))
    idx = np.arange(n)
    for i in range(n):
        rows = idx[idx != i]
        for j in range(n):
            cols = idx[idx != j]
            d = determinant(M[np.ix_(rows, cols)], field)
            adj[j, i] = field.reduce(d if (i + j) % 2 == 0 else -d)
    return adj


def char_adjugate(Ms, field: Field):
    """Batched adjugate and determinant by Faddeev-LeVerrier.

    Works on ``(..., m, m)`` stacks using matrix products only, so singular
    members need no special casing.  Requires ``1..m`` to be invertible in
    the field.  Returns ``(adj, det)``.
    """
    Ms = np.asarray(Ms)
    m = Ms.shape[-1]
    if field.is_prime and field.p <= m:
        raise FieldError(f"{field} too small for Faddeev-LeVerrier on {m}x{m}")
    batch = Ms.shape[:-2]
    eye = np.broadcast_to(field.eye(m), batch + (m, m))
    Mk = np.array(eye, copy=True)
    c = None
    for k in range(1, m + 1):
        if k > 1:
            Mk = field.reduce(field.matmul(Ms, Mk) + c[..., None, None] * eye)
        AM = field.matmul(Ms, Mk)
        tr = field.reduce(np.trace(AM, axis1=-2, axis2=-1))
        c = np.asarray(field.reduce(-tr * field.inv(k)))
    sgn_adj = 1 if m % 2 == 1 else -1
    adj = field.reduce(sgn_adj * Mk)
    det = np.asarray(field.reduce(c if m % 2 == 0 else -c))
    return adj, (det[()] if det.ndim == 0 else det)


def pfaffian(M, field: Field):
    """Pfaffian of an even-size skew-symmetric matrix by congruence elimination."""
    M = field.asarray(M)
    n = _square(M)
    if n % 2:
        raise StructureError("pfaffian needs even dimension")
    if np.any(field.reduce(M + M.T) != 0) or np.any(np.diagonal(M) != 0):
        raise StructureError("pfaffian needs a skew-symmetric matrix")
    A = np.array(M, copy=True)
    pf = field.one
    while A.shape[0]:
        nz = np.flatnonzero(A[0, 1:] != 0)
        if nz.size == 0:
            return field.zero
        j = int(nz[0]) + 1
        if j != 1:
            perm = np.arange(A.shape[0])
            perm[[1, j]] = perm[[j, 1]]
            A = A[np.ix_(perm, perm)]
            pf = field.reduce(-pf)
        a = A[0, 1]
        pf = field.reduce(pf * a)
        x, y = A[0, 2:], A[1, 2:]
        ainv = field.inv(a)
        corr = field.reduce(np.multiply.outer(y, x) - np.multiply.outer(x, y))
        A = field.reduce(A[2:, 2:] + field.reduce(corr * ainv))
    return pf


@dataclass
class TPolyMatrix:
    """Matrix polynomial in ``t``; ``coeffs[d]`` is the coefficient of ``t**d``."""

    coeffs: np.ndarray
    field: Field

    @property
    def shape(self):
        return self.coeffs.shape[1:]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def __call__(self, t):
        f = self.field
        t = f.element(t)
        out = self.coeffs[-1].copy()
        for d in range(self.degree - 1, -1, -1):
            out = f.reduce(out * t + self.coeffs[d])
        return out

    def valuation(self) -> int | None:
        """Lowest power of ``t`` with a nonzero coefficient (None for zero)."""
        for d in range(self.coeffs.shape[0]):
            if np.any(self.coeffs[d] != 0):
                return d
        return None

    def coefficient(self, d: int) -> np.ndarray:
        return self.coeffs[d]


@lru_cache(maxsize=None)
def _vandermonde_inverse_q(m: int):
    nodes = [Fraction(t) for t in range(1, m + 1)]
    V = np.array([[t**d for t in nodes] for d in range(m)], dtype=object).T
    return inverse(V, Field())


@lru_cache(maxsize=None)
def interpolation_matrix(m: int, field: Field) -> np.ndarray:
    """Maps values at ``t = 1..m`` to coefficients of the interpolant."""
    if field.is_prime and field.p <= m:
        raise FieldError(f"{field} has fewer than {m} usable interpolation nodes")
    return field.asarray(_vandermonde_inverse_q(m))


def adjugate_tpoly(A, X, field: Field) -> TPolyMatrix:
    """``adjugate(A + t X)`` as a polynomial in ``t`` of degree ``<= m - 1``.

    Evaluated at ``t = 1..m`` and Lagrange-interpolated.
    """
    A = field.asarray(A)
    X = field.asarray(X)
    m = _square(A)
    if X.shape != A.shape:
        raise DimensionError("A and X must have equal shape")
    W = interpolation_matrix(m, field)
    ts = field.asarray(np.arange(1, m + 1))
    stack = field.reduce(A[None] + ts[:, None, None] * X[None])
    values, _ = char_adjugate(stack, field)
    coeffs = field.reduce(np.tensordot(W, values, axes=(1, 0)))
    return TPolyMatrix(coeffs, field)


def batch_rank(Ms, field: Field) -> np.ndarray:
    """Ranks of a stack of small matrices, eliminating all of them at once."""
    A = np.array(field.asarray(Ms), copy=True)
    if A.ndim != 3:
        raise DimensionError("batch_rank expects a (batch, rows, cols) array")
    n, R, C = A.shape
    row = np.zeros(n, dtype=np.int64)
    idx = np.arange(R)
    for j in range(C):
        mask = (A[:, :, j] != 0) & (idx[None, :] >= row[:, None])
        has = np.flatnonzero(mask.any(axis=1))
        if has.size == 0:
            continue
        piv = np.argmax(mask[has], axis=1)
        r = row[has]
        top, pr = A[has, r].copy(), A[has, piv].copy()
        A[has, r], A[has, piv] = pr, top
        inv = np.array([field.inv(a) for a in A[has, r, j]], dtype=A.dtype)
        below = (idx[None, :] > r[:, None])
        factor = field.reduce(A[has, :, j] * inv[:, None]) * below
        A[has] = field.reduce(A[has] - field.reduce(factor[:, :, None] * A[has, r][:, None, :]))
        row[has] += 1
    return row
