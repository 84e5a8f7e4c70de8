"""Slow, obviously-correct reference implementations used as test oracles."""
from fractions import Fraction
from itertools import permutations


def _sign(perm):
    s, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def leibniz_det(M):
    n = len(M)
    total = 0
    for perm in permutations(range(n)):
        term = _sign(perm)
        for i in range(n):
            term *= M[i][perm[i]]
        total += term
    return total


def cofactor_det(M):
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * cofactor_det([r[:j] + r[j + 1:] for r in M[1:]])
               for j in range(n) if M[0][j] != 0)


def recursive_pfaffian(M):
    n = len(M)
    if n == 0:
        return 1
    total = 0
    for j in range(1, n):
        if M[0][j] == 0:
            continue
        keep = [k for k in range(1, n) if k != j]
        sub = [[M[a][b] for b in keep] for a in keep]
        total += (-1) ** (j - 1) * M[0][j] * recursive_pfaffian(sub)
    return total


def naive_rank(M, p=None):
    """Textbook Gaussian elimination over Q (p None) or GF(p)."""
    A = [[Fraction(x) if p is None else int(x) % p for x in row] for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c] if p is None else pow(A[r][c], -1, p)
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c] * inv
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
                if p is not None:
                    A[i] = [a % p for a in A[i]]
        r += 1
    return r


def to_int_lists(M):
    return [[int(x) if not isinstance(x, Fraction) else x for x in row] for row in M]
