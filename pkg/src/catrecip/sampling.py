"""Point samples on reciprocal varieties and interpolation invariants.

Every point cloud lives over one exact field.  Hilbert-function counts are
ranks of evaluation matrices over prime fields, never numerical ranks.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .fields import DEFAULT_PRIMES, Field, GF
from .linalg import DimensionError, char_adjugate, rank, rank_kernel
from .spaces import CatSpace, PrimeCollisionError, monomials, sym_to_vec


class SamplingError(RuntimeError):
    pass


@dataclass
class SampleCloud:
    field: Field
    ambient_dim: int
    points: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        self.points = np.asarray(self.points)
        if self.points.ndim != 2 or self.points.shape[1] != self.ambient_dim + 1:
            raise DimensionError(f"points must have {self.ambient_dim + 1} coordinates")

    def __len__(self):
        return self.points.shape[0]

    def to_json(self, **extra) -> str:
        data = {"field": self.field.to_json(), "ambient_dim": self.ambient_dim,
                "provenance": self.provenance,
                "points": [[_dump(x) for x in row] for row in self.points]}
        data.update(extra)
        return json.dumps(data)

    @classmethod
    def from_json(cls, text: str) -> "SampleCloud":
        data = json.loads(text)
        field = Field.from_json(data["field"])
        pts = field.asarray(np.array([[_load(x, field) for x in row] for row in data["points"]],
                                     dtype=object))
        return cls(field, int(data["ambient_dim"]), pts, data.get("provenance", ""))


def _dump(x):
    if isinstance(x, Fraction):
        return str(x)
    return int(x)


def _load(x, field):
    return Fraction(x) if field.p is None else int(x)


def normalize_rows(P, field: Field) -> np.ndarray:
    """Scale each nonzero row so its first nonzero coordinate is 1."""
    P = np.array(P, copy=True)
    for i in range(P.shape[0]):
        nz = np.flatnonzero(P[i] != 0)
        if nz.size == 0:
            raise SamplingError("zero vector is not a projective point")
        P[i] = field.reduce(P[i] * field.inv(P[i, nz[0]]))
    return P


def random_rank_r_coeffs(space: CatSpace, r: int, count: int, rng, field: Field) -> np.ndarray:
    """``count`` coefficient vectors of random sums of ``r`` scaled Veronese points."""
    nv = space.n + 1
    P = field.random(rng, (count, r, nv))
    lam = field.random(rng, (count, r), nonzero=True)
    exps = np.array(space.coeff_labels)
    pw = [np.ones_like(P)]
    for _ in range(2 * space.k):
        pw.append(field.reduce(pw[-1] * P))
    pw = np.stack(pw)  # (2k+1, count, r, nv)
    mono = None
    for j in range(nv):
        term = pw[exps[:, j], :, :, j]  # (dim, count, r)
        mono = term if mono is None else field.reduce(mono * term)
    return field.reduce(np.einsum("acr,cr->ca", mono, lam) if field.dtype is object
                        else _weighted_sum(mono, lam, field))


def _weighted_sum(mono, lam, field):
    out = np.zeros((mono.shape[1], mono.shape[0]), dtype=np.int64)
    for i in range(lam.shape[1]):
        out = (out + mono[:, :, i].T * lam[:, i:i + 1]) % field.p
    return out


def sample_reciprocal(space: CatSpace, count: int, field: Field, rng,
                      batch: int = 2048) -> SampleCloud:
    """Adjugates of random full-rank catalecticants, in y-coordinates."""
    if count < 1:
        raise ValueError("count must be positive")
    out, failures = [], 0
    while sum(len(b) for b in out) < count:
        need = min(batch, count - sum(len(b) for b in out))
        coeffs = random_rank_r_coeffs(space, space.m, need, rng, field)
        adj, det = char_adjugate(coeffs[:, space.index], field)
        ok = np.asarray(det) != 0
        failures += int((~ok).sum())
        if failures > 100 * count:
            raise SamplingError(f"{field} too small: too many singular samples")
        iu = np.triu_indices(space.m)
        out.append(adj[ok][:, iu[0], iu[1]])
    pts = normalize_rows(np.concatenate(out)[:count], field)
    return SampleCloud(field, space.sym_dim - 1, pts, f"reciprocal Cat({space.k},{space.n + 1})")


# -- forms ----------------------------------------------------------------

def monomial_count(nvars: int, d: int) -> int:
    return comb(nvars + d - 1, d)


def evaluation_matrix(points, d: int, field: Field) -> np.ndarray:
    """Rows: points; columns: degree-``d`` monomials in graded-lex order."""
    points = np.asarray(points)
    nvars = points.shape[1]
    exps = monomials(nvars, d)
    slots = np.array([[v for v in range(nvars) for _ in range(e[v])] for e in exps],
                     dtype=np.int64).reshape(len(exps), d)
    E = None
    for s in range(d):
        col = points[:, slots[:, s]]
        if E is None:
            E = col
        elif E.dtype == object:
            E = field.reduce(E * col)
        else:
            E *= col
            E %= field.p
        del col
    if E is None:
        E = field.asarray(np.ones((points.shape[0], 1), dtype=np.int64))
    return E


@dataclass
class FormBasis:
    field: Field
    degree: int
    ambient_dim: int
    forms: np.ndarray

    def __len__(self):
        return self.forms.shape[0]

    @property
    def monomials(self):
        return monomials(self.ambient_dim + 1, self.degree)

    def evaluate(self, points) -> np.ndarray:
        """``(nforms, npoints)`` array of values."""
        E = evaluation_matrix(points, self.degree, self.field)
        return self.field.matmul(self.forms, E.T)

    def to_json(self, **extra) -> str:
        data = {"field": self.field.to_json(), "degree": self.degree,
                "ambient_dim": self.ambient_dim, "monomial_order": "graded-lex",
                "monomials": [list(e) for e in self.monomials],
                "forms": [[_dump(c) for c in f] for f in self.forms]}
        data.update(extra)
        return json.dumps(data)

    @classmethod
    def from_json(cls, text: str) -> "FormBasis":
        data = json.loads(text)
        field = Field.from_json(data["field"])
        forms = field.asarray(np.array([[_load(c, field) for c in f] for f in data["forms"]],
                                       dtype=object).reshape(len(data["forms"]), -1))
        return cls(field, data["degree"], data["ambient_dim"], forms)


def _check_size(cloud: SampleCloud, d: int):
    need = monomial_count(cloud.ambient_dim + 1, d)
    if len(cloud) < need:
        raise SamplingError(f"degree {d} needs at least {need} points, got {len(cloud)}")


def hilbert_count(cloud: SampleCloud, d: int, check: SampleCloud | None = None) -> int:
    """Number of independent degree-``d`` forms vanishing on the cloud.

    With ``check`` (a cloud of the same variety over another prime) the count
    is recomputed there and must agree.
    """
    _check_size(cloud, d)
    E = evaluation_matrix(cloud.points, d, cloud.field)
    value = E.shape[1] - rank(E, cloud.field)
    if check is not None:
        other = hilbert_count(check, d)
        if other != value:
            raise PrimeCollisionError(
                f"HF_{d} = {value} over {cloud.field} but {other} over {check.field}")
    return value


def vanishing_forms(cloud: SampleCloud, d: int) -> FormBasis:
    _check_size(cloud, d)
    E = evaluation_matrix(cloud.points, d, cloud.field)
    _, K = rank_kernel(E, cloud.field)
    return FormBasis(cloud.field, d, cloud.ambient_dim, K)


def evaluate_form(coeffs, point, field: Field):
    """Value of the homogeneous form with graded-lex ``coeffs`` at ``point``."""
    coeffs = field.asarray(coeffs)
    point = field.asarray(point)
    nvars = len(point)
    d = 0
    while monomial_count(nvars, d) < len(coeffs):
        d += 1
    if monomial_count(nvars, d) != len(coeffs):
        raise DimensionError(f"{len(coeffs)} coefficients do not match a form in {nvars} variables")
    E = evaluation_matrix(point[None, :], d, field)[0]
    return field.reduce(np.sum(field.reduce(coeffs * E)))


def span_dimension(cloud: SampleCloud) -> int:
    if len(cloud) == 0:
        raise SamplingError("empty cloud")
    return rank(cloud.points, cloud.field) - 1


def multiples_rank(basis: FormBasis, extra_degree: int = 1) -> int:
    """Rank of the products of the forms with all monomials of ``extra_degree``."""
    nvars = basis.ambient_dim + 1
    src = basis.monomials
    dst = {e: i for i, e in enumerate(monomials(nvars, basis.degree + extra_degree))}
    shifts = monomials(nvars, extra_degree)
    f = basis.field
    rows = f.zeros((len(basis) * len(shifts), len(dst)))
    src_arr = np.array(src)
    for si, s in enumerate(shifts):
        cols = np.array([dst[tuple(e)] for e in (src_arr + np.array(s))])
        rows[si * len(basis):(si + 1) * len(basis)][:, cols] = basis.forms
    return rank(rows, f)


def reciprocal_hilbert(space: CatSpace, d: int, primes=DEFAULT_PRIMES, seed: int = 0,
                       extra: int = 50) -> int:
    """HF_d of the reciprocal variety, sampled and checked over two primes."""
    nvars = space.sym_dim
    count = monomial_count(nvars, d) + extra
    clouds = [sample_reciprocal(space, count, GF(p), np.random.default_rng([seed, i]))
              for i, p in enumerate(primes)]
    return hilbert_count(clouds[0], d, check=clouds[1] if len(clouds) > 1 else None)


def point_cloud_from_matrices(mats, field: Field, provenance: str = "") -> SampleCloud:
    pts = np.array([sym_to_vec(M) for M in mats])
    m = mats[0].shape[0]
    return SampleCloud(field, m * (m + 1) // 2 - 1, normalize_rows(pts, field), provenance)
