"""Sparse multivariate polynomial systems with complex coefficients.

Polynomials are dicts ``{exponent tuple: coefficient}``.  A
:class:`PolySystem` compiles them once into gather tables so that values and
Jacobians are evaluated for a whole batch of points with a few numpy calls.
Exponent tuples cover the variables followed by the parameters.
"""
from __future__ import annotations

import json
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

Poly = dict


# -- dict polynomial arithmetic ---------------------------------------------

def padd(a: Poly, b: Poly, scale=1) -> Poly:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + scale * c
        if v == 0:
            out.pop(e, None)
        else:
            out[e] = v
    return out


def pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(e, 0) + ca * cb
            if v == 0:
                out.pop(e, None)
            else:
                out[e] = v
    return out


def pscale(a: Poly, c) -> Poly:
    return {e: v * c for e, v in a.items() if v * c != 0}


def variable(i: int, n: int) -> Poly:
    e = [0] * n
    e[i] = 1
    return {tuple(e): 1}


def constant(c, n: int) -> Poly:
    return {(0,) * n: c} if c != 0 else {}


def degree(a: Poly) -> int:
    return max((sum(e) for e in a), default=0)


def minors_expander(entries):
    """Memoized Laplace expansion of minors of a square matrix of polynomials.

    ``entries[i][j]`` are dict polynomials; returns ``minor(rows, cols)``.
    """
    @lru_cache(maxsize=None)
    def minor(rows: tuple, cols: tuple) -> tuple:
        if len(rows) == 1:
            return tuple(entries[rows[0]][cols[0]].items())
        out: Poly = {}
        r0, rest = rows[0], rows[1:]
        for k, c in enumerate(cols):
            a = entries[r0][c]
            if not a:
                continue
            sub = dict(minor(rest, cols[:k] + cols[k + 1:]))
            if sub:
                out = padd(out, pmul(a, sub), -1 if k % 2 else 1)
        return tuple(out.items())

    return lambda rows, cols: dict(minor(tuple(rows), tuple(cols)))


# -- compiled system ---------------------------------------------------------

class PolySystem:
    """Square or rectangular system ``F(x; p)`` of sparse polynomials."""

    def __init__(self, polys, nvars: int, nparams: int = 0, params=None, name: str = ""):
        self.polys = [{tuple(int(x) for x in e): complex(c) for e, c in f.items() if c != 0}
                      for f in polys]
        self.nvars = nvars
        self.nparams = nparams
        self.params = None if params is None else np.asarray(params, dtype=complex)
        self.name = name
        for f in self.polys:
            for e in f:
                if len(e) != nvars + nparams:
                    raise ValueError("exponent length must equal nvars + nparams")
        self._compile()

    @property
    def neqs(self) -> int:
        return len(self.polys)

    def degrees(self) -> list[int]:
        """Degrees in the variables only."""
        return [max((sum(e[:self.nvars]) for e in f), default=0) for f in self.polys]

    def _compile(self):
        ntot = self.nvars + self.nparams
        self._dummy = ntot
        terms = [(i, e, c) for i, f in enumerate(self.polys) for e, c in f.items()]
        slots = max((sum(1 for x in e if x) for _, e, _ in terms), default=1) or 1
        self._maxexp = max((max(e) for _, e, _ in terms if e), default=1)
        self._tidx, self._texp, self._tcoef, self._teq = self._tables(
            [(e, c, i) for i, e, c in terms], slots)
        self._scatter = sp.csr_matrix(
            (np.ones(len(terms)), (np.arange(len(terms)), self._teq)),
            shape=(len(terms), self.neqs))
        dterms, targets = [], []
        for i, e, c in terms:
            for v, x in enumerate(e):
                if x:
                    d = list(e)
                    d[v] -= 1
                    dterms.append((tuple(d), c * x, i))
                    targets.append(v)
        self._didx, self._dexp, self._dcoef, self._deq = self._tables(dterms, slots)
        self._dvar = np.array(targets, dtype=np.int64)
        isvar = self._dvar < self.nvars
        nd = len(dterms)
        self._jx_scatter = sp.csr_matrix(
            (np.ones(int(isvar.sum())),
             (np.flatnonzero(isvar), self._deq[isvar] * self.nvars + self._dvar[isvar])),
            shape=(nd, self.neqs * self.nvars))
        self._jp_mask = ~isvar
        ip = np.flatnonzero(~isvar)
        self._jp_scatter = sp.csr_matrix(
            (np.ones(len(ip)), (np.arange(len(ip)), self._deq[ip])),
            shape=(len(ip), self.neqs))

    def _tables(self, terms, slots):
        n = len(terms)
        idx = np.full((n, slots), self._dummy, dtype=np.int64)
        exp = np.zeros((n, slots), dtype=np.int64)
        coef = np.zeros(n, dtype=complex)
        eq = np.zeros(n, dtype=np.int64)
        for t, (e, c, i) in enumerate(terms):
            nz = [v for v, x in enumerate(e) if x]
            idx[t, :len(nz)] = nz
            exp[t, :len(nz)] = [e[v] for v in nz]
            coef[t] = c
            eq[t] = i
        return idx, exp, coef, eq

    def _z(self, x, p, dtype=complex):
        x = np.atleast_2d(np.asarray(x, dtype=complex)).astype(dtype)
        if self.nparams:
            p = self.params if p is None else p
            p = np.broadcast_to(np.asarray(p, dtype=complex).astype(dtype), (x.shape[0], self.nparams))
            z = np.concatenate([x, p], axis=1)
        else:
            z = x
        ones = np.ones((z.shape[0], 1), dtype=dtype)
        z = np.concatenate([z, ones], axis=1)
        pw = np.ones(z.shape + (self._maxexp + 1,), dtype=dtype)
        for k in range(1, self._maxexp + 1):
            pw[..., k] = pw[..., k - 1] * z
        return pw

    @staticmethod
    def _monomials(pw, idx, exp):
        return np.prod(pw[:, idx, exp], axis=-1)

    def evaluate(self, x, p=None, extended=False) -> np.ndarray:
        """Values, shape ``(batch, neqs)``.

        With ``extended`` the sums are formed in ``clongdouble`` and rounded once,
        which lowers the noise floor of Newton refinement.
        """
        if not extended:
            pw = self._z(x, p)
            mon = self._monomials(pw, self._tidx, self._texp) * self._tcoef
            return np.asarray(self._scatter.T @ mon.T).T
        pw = self._z(x, p, np.clongdouble)
        mon = self._monomials(pw, self._tidx, self._texp) * self._tcoef.astype(np.clongdouble)
        out = np.zeros((mon.shape[0], self.neqs), dtype=np.clongdouble)
        for i in range(self.neqs):
            out[:, i] = mon[:, self._teq == i].sum(axis=1)
        return out.astype(complex)

    def jacobian(self, x, p=None, dp=None):
        """``(F, dF/dx, dF/dp . dp)``; the last is None without ``dp``."""
        pw = self._z(x, p)
        mon = self._monomials(pw, self._tidx, self._texp) * self._tcoef
        F = np.asarray(self._scatter.T @ mon.T).T
        dmon = self._monomials(pw, self._didx, self._dexp) * self._dcoef
        Jx = np.asarray(self._jx_scatter.T @ dmon.T).T.reshape(-1, self.neqs, self.nvars)
        Jp = None
        if dp is not None and self.nparams:
            dp = np.broadcast_to(np.asarray(dp, dtype=complex), (mon.shape[0], self.nparams))
            m = self._jp_mask
            w = dmon[:, m] * dp[:, self._dvar[m] - self.nvars]
            Jp = np.asarray(self._jp_scatter.T @ w.T).T
        return F, Jx, Jp

    def with_params(self, params) -> "PolySystem":
        out = object.__new__(PolySystem)
        out.__dict__.update(self.__dict__)
        out.params = np.asarray(params, dtype=complex)
        return out

    def to_json(self) -> str:
        return json.dumps({
            "name": self.name, "nvars": self.nvars, "nparams": self.nparams,
            "params": None if self.params is None else [[z.real, z.imag] for z in self.params],
            "polynomials": [[{"exponents": list(e), "coeff": [c.real, c.imag]}
                             for e, c in f.items()] for f in self.polys],
        })

    @classmethod
    def from_json(cls, text: str) -> "PolySystem":
        d = json.loads(text)
        polys = [{tuple(t["exponents"]): complex(*t["coeff"]) for t in f}
                 for f in d["polynomials"]]
        params = None if d["params"] is None else [complex(a, b) for a, b in d["params"]]
        return cls(polys, d["nvars"], d["nparams"], params, d.get("name", ""))


def stack_systems(systems, name: str = "") -> PolySystem:
    """Concatenate equations of systems sharing variables and parameters."""
    first = systems[0]
    polys = [f for s in systems for f in s.polys]
    return PolySystem(polys, first.nvars, first.nparams, first.params, name)
