"""Pure-Python dominance kernels.

Matrices are integer-valued: row ``a`` holds one player's payoffs for own
strategy ``a`` against every opponent profile (flattened). Callers scale
rational payoffs to a common denominator first, so comparisons stay exact.
"""
from itertools import product


def dominates_rows(ra, rb):
    strict = False
    for x, y in zip(ra, rb):
        if x < y:
            return False
        if x > y:
            strict = True
    return strict


def nondominated(mat):
    rows = [list(map(int, r)) for r in mat]
    return _nondominated(rows)


def _nondominated(rows):
    k = len(rows)
    out = []
    for b in range(k):
        rb = rows[b]
        for a in range(k):
            if a != b and dominates_rows(rows[a], rb):
                break
        else:
            out.append(b)
    return out


def feasible_cost_vectors(base, cost_cells, free_cells, grid, target):
    """Grid search over added payments.

    Every cell listed in ``cost_cells`` and ``free_cells`` (``(row, col)``
    pairs) receives one value of ``grid`` on top of ``base``. For each
    assignment of the cost cells, in lexicographic order of grid indices,
    the free cells are searched for any completion under which the set of
    non-dominated rows equals ``target`` (a 0/1 mask). Returns one row of
    grid indices ``cost + free`` per cost assignment that admits a
    completion, using the first completion found.
    """
    rows = [list(map(int, r)) for r in base]
    grid = [int(g) for g in grid]
    cost_cells = [tuple(map(int, c)) for c in cost_cells]
    free_cells = [tuple(map(int, c)) for c in free_cells]
    want = [r for r, t in enumerate(target) if t]
    g = len(grid)
    found = []
    for cost in product(range(g), repeat=len(cost_cells)):
        for (r, c), gi in zip(cost_cells, cost):
            rows[r][c] = int(base[r][c]) + grid[gi]
        for free in product(range(g), repeat=len(free_cells)):
            for (r, c), gi in zip(free_cells, free):
                rows[r][c] = int(base[r][c]) + grid[gi]
            if _nondominated(rows) == want:
                found.append(cost + free)
                break
    return found
