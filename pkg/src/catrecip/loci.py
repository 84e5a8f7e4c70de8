"""Images of rank loci under the inversion map ``[A] -> [adjugate(A)]``.

The image of a singular ``A`` is the closure of the limits of
``[adjugate(A + tX)]`` as ``t -> 0`` over invertible directions ``X`` in the
space.  Limits are computed exactly: ``adjugate(A + tX)`` is interpolated as
a polynomial in ``t`` and its lowest nonzero coefficient is kept.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .fields import DEFAULT_PRIMES, Field, GF, QQ
from .jets import Jet, jet_adjugate_tpoly, jet_rank
from .linalg import (adjugate_tpoly, batch_rank, char_adjugate, echelon, interpolation_matrix,
                     inverse,
                     pfaffian, rank, rank_kernel)
from .sampling import SampleCloud, normalize_rows
from .spaces import (CatPoint, CatSpace, generic_rank, orthogonal_basis,
                     point_from_monomials, rank_r_point, secant_jet, sym_to_vec,
                     vec_to_sym, veronese_point)


class PreconditionError(ValueError):
    pass


@dataclass
class LimitPoint:
    matrix: np.ndarray
    valuation: int
    field: Field
    source: tuple = dc_field(default=(), repr=False)

    @property
    def coords(self) -> np.ndarray:
        return sym_to_vec(self.matrix)

    @property
    def rank(self) -> int:
        return rank(self.matrix, self.field)

    def to_json(self) -> dict:
        return {"coords": [str(c) for c in self.coords], "valuation": self.valuation,
                "rank": self.rank}


def _normalized(M, field):
    v = normalize_rows(sym_to_vec(M)[None, :], field)[0]
    return vec_to_sym(v, M.shape[0])


def _as_field(point: CatPoint, field: Field) -> np.ndarray:
    if point.field == field:
        return point.coeffs
    if point.field.is_prime:
        raise ValueError(f"cannot move a point over {point.field} to {field}")
    return field.asarray(point.coeffs)


def limit_image(space: CatSpace, A: CatPoint, X: CatPoint) -> LimitPoint:
    """``lim_{t->0} [adjugate(A + t X)]`` for invertible ``X``."""
    field = X.field if X.field.is_prime else A.field
    Am = space.coeffs_to_matrix(_as_field(A, field))
    Xm = space.coeffs_to_matrix(_as_field(X, field))
    if not np.any(Am != 0):
        raise PreconditionError("A must be nonzero")
    _, detX = char_adjugate(Xm, field)
    if detX == 0:
        raise PreconditionError("direction X must be invertible")
    tp = adjugate_tpoly(Am, Xm, field)
    v = tp.valuation()
    return LimitPoint(_normalized(tp.coefficient(v), field), v, field, (A, X))


def _limit_batch(Am, Xs, field):
    """Lowest t-coefficients for a stack of directions; drops singular ``X``."""
    m = Am.shape[0]
    _, dets = char_adjugate(Xs, field)
    Xs = Xs[np.asarray(dets) != 0]
    ts = field.asarray(np.arange(1, m + 1))
    stack = field.reduce(Am[None, None] + ts[None, :, None, None] * Xs[:, None])
    vals, _ = char_adjugate(stack, field)
    W = interpolation_matrix(m, field)
    coeffs = field.reduce(np.einsum("dt,ntij->ndij", W, vals)) if field.dtype is object \
        else _interp(W, vals, field)
    nz = np.any(coeffs.reshape(coeffs.shape[0], m, -1) != 0, axis=2)
    v = np.argmax(nz, axis=1)
    return coeffs[np.arange(len(v)), v], v


def _interp(W, vals, field):
    out = np.zeros_like(vals)
    for d in range(W.shape[0]):
        acc = np.zeros_like(vals[:, 0])
        for t in range(W.shape[1]):
            acc = (acc + vals[:, t] * W[d, t]) % field.p
        out[:, d] = acc
    return out


def random_directions(space: CatSpace, count: int, rng, field: Field) -> np.ndarray:
    return space.coeffs_to_matrix(field.random(rng, (count, space.dim)).T).transpose(2, 0, 1)


def image_cloud(space: CatSpace, A: CatPoint, count: int, rng,
                field: Field | None = None, batch: int = 1024) -> SampleCloud:
    """Limit points of ``A`` at random invertible directions, in y-coordinates."""
    field = field or (A.field if A.field.is_prime else GF(DEFAULT_PRIMES[0]))
    Am = space.coeffs_to_matrix(_as_field(A, field))
    iu = np.triu_indices(space.m)
    out, have = [], 0
    while have < count:
        Xs = random_directions(space, min(batch, count - have), rng, field)
        B, _ = _limit_batch(Am, Xs, field)
        out.append(B[:, iu[0], iu[1]])
        have += len(B)
    pts = normalize_rows(np.concatenate(out)[:count], field)
    return SampleCloud(field, space.sym_dim - 1, pts, "limit images of a catalecticant")


def _image_jet(space: CatSpace, A: Jet, X: Jet) -> Jet:
    coeffs = jet_adjugate_tpoly(A, X)
    nz = [d for d in range(coeffs.shape[0]) if np.any(coeffs.val[d] != 0)]
    B = coeffs[nz[0]]
    iu = np.triu_indices(space.m)
    return B[iu]


def _direction_jet(space, rng, field, offset, ndirs):
    while True:
        x0 = field.random(rng, (space.dim,))
        if char_adjugate(space.coeffs_to_matrix(x0), field)[1] != 0:
            break
    x = Jet.variables(x0, field, offset, ndirs)
    return x[space.index]


def image_dimension(space: CatSpace, A: CatPoint, primes=DEFAULT_PRIMES, seed: int = 0,
                    trials: int = 2) -> int:
    """Dimension of the image of ``A``: Jacobian rank of ``X -> limit`` minus one.

    A point over Q is checked over every prime; a point over a prime field
    only over that field.
    """
    if A.field.is_prime:
        primes = (A.field.p,)

    def one(f, rng):
        a = _as_field(A, f)
        Aj = Jet.constant(space.coeffs_to_matrix(a), space.dim, f)
        return jet_rank(_image_jet(space, Aj, _direction_jet(space, rng, f, 0, space.dim)))

    return generic_rank(one, primes, seed, trials) - 1


def image_dimension_of_rank(space: CatSpace, r: int, primes=DEFAULT_PRIMES, seed: int = 0,
                            trials: int = 2) -> int:
    """``image_dimension`` at random rank-``r`` points (fresh point per prime)."""
    def one(f, rng):
        A = rank_r_point(space, r, rng, f)
        Aj = Jet.constant(A.matrix, space.dim, f)
        return jet_rank(_image_jet(space, Aj, _direction_jet(space, rng, f, 0, space.dim)))

    return generic_rank(one, primes, seed, trials) - 1


def phi_rank_locus_dimension(space: CatSpace, r: int, primes=DEFAULT_PRIMES, seed: int = 0,
                             trials: int = 2) -> int:
    """Dimension of the image of the rank-<=r locus via the composite jet rank of
    ``(p_1..p_r, lambda, X) -> limit_image(sum lambda_i nu(p_i), X)``."""
    nsec = r * (space.n + 1) + r

    def one(f, rng):
        coeffs = secant_jet(space, r, rng, f, extra_dirs=space.dim)
        Aj = coeffs[space.index]
        Xj = _direction_jet(space, rng, f, nsec, nsec + space.dim)
        return jet_rank(_image_jet(space, Aj, Xj))

    return generic_rank(one, primes, seed, trials) - 1


def terracini_constancy_check(space: CatSpace, r: int, rng, trials: int = 100,
                              field: Field | None = None, same_secant: bool = True) -> bool:
    """Limits at a shared direction agree for two points of one r-secant span.

    With ``same_secant=False`` the second point is drawn on an independent
    secant, which should make the comparison fail.
    """
    field = field or GF(DEFAULT_PRIMES[0])
    nv = space.n + 1
    for _ in range(trials):
        pts = field.random(rng, (r, nv))
        lam1 = field.random(rng, (r,), nonzero=True)
        lam2 = field.random(rng, (r,), nonzero=True)
        A1 = rank_r_point(space, r, rng, field, points=pts, scalars=lam1)
        pts2 = pts if same_secant else field.random(rng, (r, nv))
        A2 = rank_r_point(space, r, rng, field, points=pts2, scalars=lam2)
        while True:
            X = CatPoint(space, field.random(rng, (space.dim,)), field)
            if char_adjugate(X.matrix, field)[1] != 0:
                break
        B1 = limit_image(space, A1, X).matrix
        B2 = limit_image(space, A2, X).matrix
        if not np.array_equal(B1, B2):
            return False
    return True


def orthogonality_residuals(space: CatSpace, coords, field: Field) -> np.ndarray:
    """``trace(E_alpha Y)`` for every alpha (rows of coords are y-vectors)."""
    T = field.asarray(space.coefficient_functionals())
    return field.matmul(field.asarray(np.atleast_2d(coords)), T.T)


def orthogonal_intersection_probe(space: CatSpace, A: CatPoint, count: int, rng,
                                  field: Field | None = None, return_cloud: bool = False):
    """Sampled limit points of ``A`` that lie in the orthogonal space."""
    cloud = image_cloud(space, A, count, rng, field)
    res = orthogonality_residuals(space, cloud.points, cloud.field)
    hit_rows = np.flatnonzero(~np.any(res != 0, axis=1))
    hits = [cloud.points[i] for i in hit_rows]
    ranks = [rank(vec_to_sym(h, space.m), cloud.field) for h in hits]
    report = {"samples": len(cloud), "field": cloud.field.to_json(),
              "hits": [[int(x) for x in h] for h in hits], "ranks": ranks,
              "confidence": "sampled: absence of hits is evidence, not proof"}
    return (report, cloud) if return_cloud else report


def curve_limit(space: CatSpace, A: CatPoint, curve, field: Field = QQ) -> LimitPoint:
    """``lim_{s->0}`` of ``limit_image(A, X(s))`` for a polynomial curve of directions.

    ``curve`` lists coefficient vectors ``[X_0, X_1, ...]`` with
    ``X(s) = sum s^i X_i``.  The result lies in the (closed) image of ``A``.
    """
    Am = space.coeffs_to_matrix(_as_field(A, field))
    curve = [field.asarray(c) for c in curve]
    deg_s = len(curve) - 1
    m = space.m
    # valuation in t at a generic s, then the t^v coefficient as a polynomial in s
    v = None
    nodes = list(range(1, (m - 1) * deg_s + 2))
    samples = []
    for s in nodes:
        Xs = field.zeros(space.dim)
        for i, c in enumerate(curve):
            Xs = field.reduce(Xs + c * field.element(s) ** i)
        tp = adjugate_tpoly(Am, space.coeffs_to_matrix(Xs), field)
        vs = tp.valuation()
        v = vs if v is None else min(v, vs)
        samples.append(tp)
    coeff_vals = np.stack([tp.coefficient(v) for tp in samples])
    V = field.asarray(np.array([[field.element(s) ** d for d in range(len(nodes))]
                                for s in nodes], dtype=object))
    coeffs = field.reduce(np.tensordot(inverse(V, field), coeff_vals, axes=(1, 0)))
    low = next(d for d in range(len(nodes)) if np.any(coeffs[d] != 0))
    return LimitPoint(_normalized(coeffs[low], field), v, field, (A, curve))


def rank_one_orthogonal_witness(space: CatSpace):
    """A rank-one catalecticant and a curve of directions whose iterated limit
    is a rank-3 member of the orthogonal space.

    For ``A = nu_4([1:0:0])`` only the block ``Y`` of ``X`` away from the
    ``x^2`` row matters.  Along ``X(s)`` the pure-``x^2``, ``x y/z`` and
    ``y,z``-only coefficients scale like ``1, s, s^2``, so the Schur complement
    of ``Y(s)`` is ``s^2 T`` with ``T`` fixed, and ``[adj Y(s)] -> [0 + T^-1]``.
    Only defined for ternary quartics.
    """
    if (space.k, space.n) != (2, 2):
        raise ValueError("witness curve is defined for Cat(2,3)")
    A = veronese_point(space, [1, 0, 0], QQ)
    order0 = {(2, 2, 0): 1, (2, 0, 2): 1, (4, 0, 0): 1, (3, 1, 0): 0, (3, 0, 1): 0}
    order1 = {(1, 2, 1): 1, (1, 1, 2): 1, (1, 3, 0): 0, (1, 0, 3): -1}
    order2 = {(0, 4, 0): 1, (0, 3, 1): 1, (0, 2, 2): 1, (0, 1, 3): 0, (0, 0, 4): 2}
    curve = [point_from_monomials(space, o, QQ).coeffs for o in (order0, order1, order2)]
    return A, curve


def orthogonal_rank_profile(space: CatSpace, rng, solver_opts=None, field: Field = QQ,
                            rank2: bool = False) -> dict:
    """Generic rank of the orthogonal space and its low-rank loci."""
    from .homotopy.probes import rank_one_isotropic_solve, rank_two_isotropic_solve

    basis = orthogonal_basis_field(space, field)
    combo = field.zeros((space.m, space.m))
    for Y in basis:
        combo = field.reduce(combo + Y * field.element(int(rng.integers(-50, 51))))
    report = {"basis_size": len(basis), "generic_rank": rank(combo, field)}
    report["rank1"] = rank_one_isotropic_solve(space, rng, solver_opts)
    if rank2:
        report["rank2"] = rank_two_isotropic_solve(space, rng, solver_opts)
    if (space.k, space.n) == (2, 2):
        A, curve = rank_one_orthogonal_witness(space)
        w = curve_limit(space, A, curve)
        res = orthogonality_residuals(space, w.coords, QQ)
        report["rank3_witness"] = {"coords": [str(c) for c in w.coords], "rank": w.rank,
                                   "orthogonal": bool(not np.any(res != 0))}
    return report


def orthogonal_basis_field(space, field):
    return [field.asarray(Y) for Y in orthogonal_basis(space, field)]


# -- rank-two certificates ------------------------------------------------------

# coordinates that vanish on the image of the canonical secant / tangent point
SECANT_ZEROS = (0, 1, 2, 3, 4, 5, 10, 14, 17, 19, 20)
TANGENT_ZEROS = tuple(range(11))

_SECANT_S = [[None, None, 6, 7, 8, 9], [None, None, 7, 11, 12, 13],
             [None, None, None, (12, 9), 15, 16], [None, None, None, None, 16, 18],
             [None] * 6, [None] * 6]
_TANGENT_S = [[None, None, 19, 20, 14, 17], [None, None, 13, 14, 11, 12],
              [None, None, None, (17, 18), 12, 15], [None, None, None, None, 13, 16],
              [None] * 6, [None] * 6]


def _skew_from_pattern(pattern, y, field):
    """Skew matrix with upper entries ``y_i`` or ``y_i - y_j`` for a pair ``(i, j)``."""
    y = field.asarray(y)
    S = field.zeros((6, 6))
    for i in range(6):
        for j in range(i + 1, 6):
            e = pattern[i][j]
            if e is None:
                continue
            v = y[e] if isinstance(e, int) else field.reduce(y[e[0]] - y[e[1]])
            S[i, j] = v
            S[j, i] = field.reduce(-v)
    return S


def secant_pfaffian_matrix(y, field: Field = QQ) -> np.ndarray:
    """The skew matrix whose Pfaffian cuts the image of the canonical secant point."""
    return _skew_from_pattern(_SECANT_S, y, field)


def tangent_pfaffian_matrix(y, field: Field = QQ) -> np.ndarray:
    """The skew matrix whose Pfaffian cuts the image of the canonical tangent point."""
    return _skew_from_pattern(_TANGENT_S, y, field)


def canonical_rank_two(space: CatSpace, kind: str, field: Field = QQ):
    """``(A, vanishing coordinates, skew matrix builder)`` for ``kind`` secant/tangent.

    Secant: ``a_(4,0,0) = a_(0,0,4) = 1``.  Tangent: ``a_(4,0,0) = a_(3,1,0) = 1``.
    """
    if (space.k, space.n) != (2, 2):
        raise ValueError("canonical rank-two points are defined for Cat(2,3)")
    if kind == "secant":
        return (point_from_monomials(space, {(4, 0, 0): 1, (0, 0, 4): 1}, field),
                SECANT_ZEROS, secant_pfaffian_matrix)
    if kind == "tangent":
        return (point_from_monomials(space, {(4, 0, 0): 1, (3, 1, 0): 1}, field),
                TANGENT_ZEROS, tangent_pfaffian_matrix)
    raise ValueError(f"kind must be 'secant' or 'tangent', not {kind!r}")


def rank_two_certificate(space: CatSpace, kind: str, count: int, rng,
                         field: Field | None = None, builder=None) -> dict:
    """Evaluate the linear forms and the Pfaffian on ``count`` limit samples."""
    field = field or GF(DEFAULT_PRIMES[0])
    A, zeros, default = canonical_rank_two(space, kind, field)
    builder = builder or default
    cloud = image_cloud(space, A, count, rng, field)
    P = cloud.points
    linear_bad = int(np.count_nonzero(np.any(P[:, list(zeros)] != 0, axis=1)))
    pf_vals = [pfaffian(builder(y, field), field) for y in P]
    nonzero = [i for i, v in enumerate(pf_vals) if v != 0]
    report = {"kind": kind, "samples": len(P), "field": field.to_json(),
              "linear_forms_nonvanishing": linear_bad, "pfaffian_nonvanishing": len(nonzero),
              "passed": linear_bad == 0 and not nonzero}
    if nonzero:
        i = nonzero[0]
        report["witness"] = {"point": [int(x) for x in P[i]], "pfaffian": int(pf_vals[i])}
    return report


def span_cubic_check(space: CatSpace, kind: str, rng, field: Field | None = None,
                     extra: int = 60) -> dict:
    """Cubics through the image restricted to its span coordinates: expect one,
    proportional to the Pfaffian."""
    from .sampling import evaluation_matrix, monomial_count
    field = field or GF(DEFAULT_PRIMES[0])
    A, zeros, builder = canonical_rank_two(space, kind, field)
    keep = [i for i in range(space.sym_dim) if i not in zeros]
    need = monomial_count(len(keep), 3) + extra
    cloud = image_cloud(space, A, need, rng, field)
    E = evaluation_matrix(cloud.points[:, keep], 3, field)
    _, K = rank_kernel(E, field)
    report = {"kind": kind, "cubics": len(K), "span_coordinates": keep}
    if len(K) != 1:
        report["proportional"] = False
        return report
    # compare with the Pfaffian at random points of the span (off the variety)
    Q = field.random(rng, (30, len(keep)))
    full = field.zeros((30, space.sym_dim))
    full[:, keep] = Q
    pf = np.array([pfaffian(builder(y, field), field) for y in full], dtype=object)
    cub = evaluation_matrix(Q, 3, field)
    vals = field.matmul(cub, K[0][:, None])[:, 0]
    nz = np.flatnonzero(pf != 0)
    ratio = field.reduce(vals[nz[0]] * field.inv(pf[nz[0]])) if nz.size else None
    report["proportional"] = bool(nz.size and all(
        field.reduce(vals[i] - field.reduce(ratio * pf[i])) == 0 for i in range(30)))
    return report


def orthogonal_span_intersection(space: CatSpace, A: CatPoint, rng,
                                 field: Field | None = None, extra: int = 60) -> dict:
    """Points of the image of ``A`` in the orthogonal space, through its linear span.

    The span of the image meets the orthogonal space in a linear space; when
    that is a single point it is tested against the forms of degree <= 3
    interpolated on the image (in pivot coordinates of the span).
    """
    from .sampling import evaluation_matrix, monomial_count
    field = field or GF(DEFAULT_PRIMES[0])
    probe = image_cloud(space, A, space.sym_dim + 10, rng, field).points
    U, pivots, _ = echelon(probe, field)
    span = U[:len(pivots)]
    W = np.array([sym_to_vec(Y) for Y in orthogonal_basis_field(space, field)])
    M = field.asarray(np.concatenate([span, field.reduce(-W)]).T)
    _, K = rank_kernel(M, field)
    report = {"span_dim": len(pivots) - 1, "intersection_dim": len(K) - 1, "points": []}
    if len(K) != 1:
        return report
    point = field.reduce(field.matmul(K[0][None, :len(pivots)], span)[0])
    point = normalize_rows(point[None], field)[0]
    cols = list(pivots)
    on_image = True
    for d in (1, 2, 3):
        need = monomial_count(len(cols), d) + extra
        cloud = image_cloud(space, A, need, rng, field).points[:, cols]
        _, F = rank_kernel(evaluation_matrix(cloud, d, field), field)
        if len(F):
            vals = field.matmul(F, evaluation_matrix(point[None, cols], d, field).T)
            on_image &= not np.any(vals != 0)
    report["points"].append({"coords": [int(x) for x in point],
                             "rank": rank(vec_to_sym(point, space.m), field),
                             "on_image": bool(on_image)})
    return report


def graph_invariant_violations(space: CatSpace, A: CatPoint, cloud: SampleCloud) -> dict:
    """Count limit points breaking ``A B = 0`` or ``rank B <= m - rank A``."""
    f = cloud.field
    Am = space.coeffs_to_matrix(_as_field(A, f))
    Bs = np.stack([vec_to_sym(y, space.m) for y in cloud.points])
    prod = f.matmul(np.broadcast_to(Am, Bs.shape), Bs)
    nonzero_product = int(np.count_nonzero(np.any(prod.reshape(len(Bs), -1) != 0, axis=1)))
    rA = rank(Am, f)
    rB = batch_rank(Bs, f)
    too_big = int(np.count_nonzero(rB > space.m - rA))
    return {"points": len(Bs), "rank_A": rA, "product_nonzero": nonzero_product,
            "rank_excess": too_big, "max_rank_B": int(rB.max()),
            "passed": nonzero_product == 0 and too_big == 0}
