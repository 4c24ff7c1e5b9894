"""Exact linear algebra over the rationals.

Everything here works on lists of lists of Fraction and is meant for the
tiny systems that polytope bookkeeping needs (dimension <= 4, at most a
dozen rows).  Clarity and exactness beat speed.
"""

from fractions import Fraction


def frac(x):
    """Coerce ints / strings 'p/q' / Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if x != int(x):
            raise TypeError(f"refusing inexact float {x!r}; use 'p/q' strings")
        return Fraction(int(x))
    return Fraction(x)


def mat(rows):
    return [[frac(x) for x in row] for row in rows]


def _echelon(a):
    """Row-reduce a copy of `a`; returns (echelon rows, pivot columns)."""
    m = [row[:] for row in a]
    nrows, ncols = len(m), len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(a):
    if not a:
        return 0
    return len(_echelon(a)[1])


def det(a):
    n = len(a)
    m = [row[:] for row in a]
    d = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            d = -d
        d *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def solve(a, b):
    """Solve the square system a x = b exactly; returns None if singular."""
    n = len(a)
    m = [row[:] + [bb] for row, bb in zip(a, b)]
    red, pivots = _echelon(m)
    if len(pivots) != n or any(p >= n for p in pivots):
        return None
    return [red[i][n] for i in range(n)]


def inverse(a):
    """Exact inverse of a square matrix; returns None if singular."""
    n = len(a)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    red, pivots = _echelon(aug)
    if len(pivots) < n or any(p >= n for p in pivots):
        return None
    return [row[n:] for row in red[:n]]


def kernel(a, ncols=None):
    """Basis of the right kernel of `a` (rows of length ncols)."""
    if not a:
        n = ncols if ncols is not None else 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, pivots = _echelon(a)
    n = len(a[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def matvec(a, x):
    return [sum(r * xx for r, xx in zip(row, x)) for row in a]


def matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def affine_rank(points):
    """Dimension of the affine hull of a set of rational points."""
    if len(points) <= 1:
        return 0
    p0 = points[0]
    diffs = [[x - y for x, y in zip(p, p0)] for p in points[1:]]
    return rank(diffs)


def primitivize(v):
    """Scale a rational vector to a primitive integer vector (same direction)."""
    from math import gcd

    denoms = [x.denominator for x in v]
    lcm = 1
    for d in denoms:
        lcm = lcm * d // gcd(lcm, d)
    ints = [int(x * lcm) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        return [0 for _ in v], Fraction(0)
    prim = [x // g for x in ints]
    # v = (g / lcm) * prim
    return prim, Fraction(g, lcm)


def complete_basis(rows, dim):
    """Complete linearly independent rational rows to a basis using unit covectors.

    Returns the indices of the standard basis vectors chosen.  The resulting
    (rows + units) matrix is invertible over Q; any integral completion gives
    the same residual measure, so a coordinate-subset choice is enough.
    """
    chosen = []
    current = [row[:] for row in rows]
    r = rank(current) if current else 0
    for j in range(dim):
        if r == dim:
            break
        unit = [Fraction(int(i == j)) for i in range(dim)]
        if rank(current + [unit]) > r:
            current.append(unit)
            chosen.append(j)
            r += 1
    if r != dim:
        raise ValueError("rows do not extend to a basis")
    return chosen
