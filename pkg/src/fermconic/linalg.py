"""Dense exact linear algebra over a field Domain (rationals or GF(p))."""

from __future__ import annotations


def rref(rows, dom):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = [list(row) for row in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if not dom.is_zero(m[i][col]):
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = dom.inv(m[r][col])
        m[r] = [dom.mul(x, inv) for x in m[r]]
        for i in range(len(m)):
            if i != r and not dom.is_zero(m[i][col]):
                f = m[i][col]
                m[i] = [dom.sub(a, dom.mul(f, b)) for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows, dom):
    return len(rref(rows, dom)[1])


def nullspace(rows, dom, ncols=None):
    """Basis of {v : rows * v = 0}."""
    if not rows:
        n = ncols or 0
        return [[dom.one if i == j else dom.zero for i in range(n)] for j in range(n)]
    ncols = len(rows[0])
    m, pivots = rref(rows, dom)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [dom.zero] * ncols
        v[f] = dom.one
        for i, pc in enumerate(pivots):
            v[pc] = dom.neg(m[i][f])
        basis.append(v)
    return basis


def solve(rows, rhs, dom):
    """One solution of rows * v = rhs, or None when inconsistent."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    m, pivots = rref(aug, dom)
    if ncols in pivots:
        return None
    v = [dom.zero] * ncols
    for i, pc in enumerate(pivots):
        v[pc] = m[i][ncols]
    return v


def determinant(rows, dom):
    m = [list(r) for r in rows]
    n = len(m)
    det = dom.one
    for col in range(n):
        piv = next((i for i in range(col, n) if not dom.is_zero(m[i][col])), None)
        if piv is None:
            return dom.zero
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = dom.neg(det)
        det = dom.mul(det, m[col][col])
        inv = dom.inv(m[col][col])
        for i in range(col + 1, n):
            if not dom.is_zero(m[i][col]):
                f = dom.mul(m[i][col], inv)
                m[i] = [dom.sub(a, dom.mul(f, b)) for a, b in zip(m[i], m[col])]
    return det
