"""Gaussian elimination over the rationals."""
from fractions import Fraction


def solve_unique(a, b):
    """Solve ``a x = b`` exactly.

    Returns the solution as a list of Fractions when it exists and is unique,
    otherwise ``None`` (inconsistent or under-determined systems alike).
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m = [[Fraction(v) for v in a[r]] + [Fraction(b[r])] for r in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [vi - f * vr for vi, vr in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if any(all(v == 0 for v in m[i][:cols]) and m[i][cols] != 0 for i in range(rows)):
        return None
    if len(pivots) < cols:
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = m[i][cols]
    return x
