"""Catalecticant linear spaces of symmetric matrices.

Rows and columns of a catalecticant are labelled by the degree-``k``
monomials in ``n + 1`` variables and the entry at ``(beta, gamma)`` is the
coefficient ``a_{beta + gamma}`` of a form of degree ``2k``.  All monomial
lists use graded-lex order: within a degree, exponent vectors sorted
lexicographically from largest to smallest, so for ternary quadrics the
labels read ``x^2, xy, xz, y^2, yz, z^2``.

Symmetric matrices are flattened to coordinates ``y_0, y_1, ...`` by reading
the upper triangle row by row: ``y_0..y_5`` is the first row of a 6x6
matrix, ``y_6..y_10`` the second row from the diagonal on, and so on.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field
from math import comb

import numpy as np

from .fields import DEFAULT_PRIMES, Field, GF, QQ
from .jets import Jet, jet_rank
from .linalg import DimensionError, rank_kernel

MAX_DIM = 20000


class SizeError(ValueError):
    pass


class PrimeCollisionError(RuntimeError):
    """Two primes produced different values for a generic rank computation."""


def monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors of the given degree, graded-lex (largest first)."""
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return sorted(set(out), reverse=True)


def sym_index(m: int) -> list[tuple[int, int]]:
    """Matrix positions of the symmetric coordinates ``y_0, y_1, ...``."""
    return [(i, j) for i in range(m) for j in range(i, m)]


def sym_to_vec(M) -> np.ndarray:
    m = M.shape[0]
    iu = np.triu_indices(m)
    return np.asarray(M)[iu]


def vec_to_sym(v, m: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if m is None:
        m = int((np.sqrt(8 * len(v) + 1) - 1) // 2)
    if m * (m + 1) // 2 != len(v):
        raise DimensionError(f"{len(v)} is not a triangular number")
    M = np.empty((m, m), dtype=v.dtype)
    iu = np.triu_indices(m)
    M[iu] = v
    M.T[iu] = v
    return M


@dataclass
class CatSpace:
    """The space Cat(k, n+1) of catalecticants of forms of degree 2k in n+1 variables."""

    k: int
    n: int
    row_labels: list = dc_field(repr=False)
    coeff_labels: list = dc_field(repr=False)
    index: np.ndarray = dc_field(repr=False)

    @property
    def m(self) -> int:
        return len(self.row_labels)

    @property
    def dim(self) -> int:
        return len(self.coeff_labels)

    @property
    def sym_dim(self) -> int:
        return self.m * (self.m + 1) // 2

    @property
    def codim(self) -> int:
        return self.sym_dim - self.dim

    @property
    def basis(self) -> list[np.ndarray]:
        return [(self.index == a).astype(np.int64) for a in range(self.dim)]

    def label_index(self, alpha) -> int:
        return self.coeff_labels.index(tuple(alpha))

    def coeffs_to_matrix(self, coeffs) -> np.ndarray:
        return np.asarray(coeffs)[self.index]

    def matrix_to_coeffs(self, M) -> np.ndarray:
        M = np.asarray(M)
        first = [tuple(np.argwhere(self.index == a)[0]) for a in range(self.dim)]
        return np.array([M[ij] for ij in first], dtype=M.dtype)

    def coefficient_functionals(self) -> np.ndarray:
        """``dim x sym_dim`` integer matrix of ``Y -> trace(E_alpha Y)`` in y-coordinates."""
        T = np.zeros((self.dim, self.sym_dim), dtype=np.int64)
        for c, (i, j) in enumerate(sym_index(self.m)):
            T[self.index[i, j], c] += 1 if i == j else 2
        return T

    def to_json(self) -> str:
        return json.dumps({
            "k": self.k, "n": self.n, "m": self.m, "dim": self.dim,
            "row_labels": [list(b) for b in self.row_labels],
            "coeff_labels": [list(a) for a in self.coeff_labels],
        })

    @classmethod
    def from_json(cls, text: str) -> "CatSpace":
        data = json.loads(text)
        space = build_cat_space(data["k"], data["n"])
        if [list(b) for b in space.row_labels] != data["row_labels"]:
            raise ValueError("monomial labels do not match the graded-lex order")
        return space


def build_cat_space(k: int, n: int, max_dim: int = MAX_DIM) -> CatSpace:
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    if comb(2 * k + n, 2 * k) > max_dim or comb(n + k, k) > max_dim:
        raise SizeError(f"Cat({k},{n + 1}) exceeds the size bound {max_dim}")
    rows = monomials(n + 1, k)
    coeffs = monomials(n + 1, 2 * k)
    pos = {a: i for i, a in enumerate(coeffs)}
    index = np.array([[pos[tuple(b + g for b, g in zip(beta, gamma))] for gamma in rows]
                      for beta in rows], dtype=np.int64)
    return CatSpace(k, n, rows, coeffs, index)


@dataclass
class CatPoint:
    space: CatSpace
    coeffs: np.ndarray
    field: Field

    @property
    def matrix(self) -> np.ndarray:
        return self.space.coeffs_to_matrix(self.coeffs)


def point_from_coeffs(space: CatSpace, coeffs, field: Field = QQ) -> CatPoint:
    coeffs = field.asarray(coeffs)
    if coeffs.shape != (space.dim,):
        raise DimensionError(f"expected {space.dim} coefficients")
    return CatPoint(space, coeffs, field)


def point_from_monomials(space: CatSpace, terms: dict, field: Field = QQ) -> CatPoint:
    """Catalecticant of the form ``sum c * x^alpha`` given as ``{alpha: c}``."""
    coeffs = field.zeros(space.dim)
    for alpha, c in terms.items():
        coeffs[space.label_index(alpha)] = field.element(c)
    return CatPoint(space, coeffs, field)


def veronese_point(space: CatSpace, p, field: Field = QQ) -> CatPoint:
    """Rank-one catalecticant with ``a_alpha = p^alpha`` (no multinomial weights)."""
    p = field.asarray(p)
    if p.shape != (space.n + 1,):
        raise DimensionError(f"expected a point of P^{space.n}")
    if not np.any(p != 0):
        raise ValueError("the zero vector is not a projective point")
    coeffs = field.zeros(space.dim)
    for a, alpha in enumerate(space.coeff_labels):
        v = field.one
        for x, e in zip(p, alpha):
            for _ in range(e):
                v = field.reduce(v * x)
        coeffs[a] = v
    return CatPoint(space, coeffs, field)


def rank_r_point(space: CatSpace, r: int, rng: np.random.Generator,
                 field: Field = GF(DEFAULT_PRIMES[0]), points=None, scalars=None) -> CatPoint:
    """Sum of ``r`` scaled Veronese points (random unless ``points`` are given)."""
    if not 1 <= r <= space.m:
        raise ValueError(f"rank must lie in [1, {space.m}]")
    if points is None:
        points = [_random_projective(space.n + 1, rng, field) for _ in range(r)]
    if scalars is None:
        scalars = field.random(rng, (r,), nonzero=True)
    coeffs = field.zeros(space.dim)
    for p, lam in zip(points, scalars):
        coeffs = field.reduce(coeffs + veronese_point(space, p, field).coeffs * field.element(lam))
    return CatPoint(space, coeffs, field)


def _random_projective(nvars, rng, field):
    while True:
        p = field.random(rng, (nvars,))
        if np.any(p != 0):
            return p


def random_point(space: CatSpace, rng, field: Field) -> CatPoint:
    """Uniformly random member of the space."""
    return CatPoint(space, field.random(rng, (space.dim,)), field)


def orthogonal_basis(space: CatSpace, field: Field = QQ) -> list[np.ndarray]:
    """Symmetric matrices trace-orthogonal to every member of the space."""
    T = space.coefficient_functionals()
    _, K = rank_kernel(T, field)
    return [vec_to_sym(v, space.m) for v in K]


def membership(space: CatSpace, M, field: Field = QQ):
    """``(True, coeffs)`` when ``M`` is a catalecticant, else ``(False, None)``."""
    M = field.asarray(M)
    if M.shape != (space.m, space.m):
        raise DimensionError(f"expected a {space.m}x{space.m} matrix")
    coeffs = space.matrix_to_coeffs(M)
    if np.array_equal(coeffs[space.index], M):
        return True, coeffs
    return False, None


def monomial_jets(P: Jet, exps) -> Jet:
    """``P[i]^alpha`` for each row ``P[i]`` of a ``(r, nvars)`` jet and each exponent."""
    exps = np.asarray(exps)
    r, nvars = P.shape
    out = None
    for j in range(nvars):
        col = P[:, j]
        pw = [Jet.constant(np.ones(r, dtype=np.int64), P.ndirs, P.field)]
        for _ in range(int(exps[:, j].max())):
            pw.append(pw[-1] * col)
        val = np.stack([q.val for q in pw])[exps[:, j]].T
        der = np.moveaxis(np.stack([q.der for q in pw])[exps[:, j]], 0, 1)
        term = Jet(val, der, P.field)
        out = term if out is None else out * term
    return out


def secant_jet(space: CatSpace, r: int, rng, field: Field, extra_dirs: int = 0):
    """Coefficient jet of ``(p_1..p_r, lambda) -> sum lambda_i nu(p_i)`` at a random point.

    Directions: the ``r*(n+1)`` point coordinates, then the ``r`` scalars,
    then ``extra_dirs`` unused slots for callers composing further maps.
    """
    nv = space.n + 1
    ndirs = r * nv + r + extra_dirs
    pts = field.random(rng, (r, nv))
    lam = field.random(rng, (r,), nonzero=True)
    P = Jet.variables(pts, field, 0, ndirs)
    P = Jet(P.val.reshape(r, nv), P.der.reshape(r, nv, ndirs), field)
    L = Jet.variables(lam, field, r * nv, ndirs)
    mono = monomial_jets(P, space.coeff_labels)
    return (L[:, None] * mono).sum(axis=0)


def generic_rank(fn, primes=DEFAULT_PRIMES, seed: int = 0, trials: int = 2) -> int:
    """Maximum of ``fn(field, rng)`` over random trials, checked across primes."""
    results = []
    for i, p in enumerate(primes):
        field = GF(p)
        best = max(fn(field, np.random.default_rng([seed, i, t])) for t in range(trials))
        results.append(best)
    if len(set(results)) != 1:
        raise PrimeCollisionError(f"generic rank differs across primes {primes}: {results}")
    return results[0]


def secant_dimension(space: CatSpace, r: int, primes=DEFAULT_PRIMES, seed: int = 0,
                     trials: int = 2) -> int:
    """Projective dimension of the rank-<=r locus (the r-th secant of the Veronese)."""
    if not 1 <= r <= space.m:
        raise ValueError(f"rank must lie in [1, {space.m}]")
    return generic_rank(lambda f, rng: jet_rank(secant_jet(space, r, rng, f)),
                        primes, seed, trials) - 1
