"""Pricing and constructing implementations of desired outcome sets."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import kernels
from ._rational import to_fraction
from .errors import BudgetExceededError, HypothesisViolation, PreconditionError
from .game import Game, PaymentScheme, non_dominated_profiles, with_payments

__all__ = [
    "ImplementationReport", "BruteForceResult", "singleton_price",
    "build_singleton_implementation", "verify_implementation", "default_grid",
    "brute_force_set_price", "normalize_target", "DEFAULT_CAP",
]

DEFAULT_CAP = 5_000_000


@dataclass(frozen=True)
class ImplementationReport:
    scheme: PaymentScheme
    surviving: tuple  # per-player index tuples; the surviving set is their product
    worst_case_cost: Fraction
    target_contained: bool
    exact: bool | None = None
    warnings: tuple = ()
    metadata: dict = field(default_factory=dict)

    def surviving_profiles(self) -> list:
        return list(itertools.product(*self.surviving))


def normalize_target(game: Game, target: Iterable) -> frozenset:
    return frozenset(game.profile(z) for z in target)


def _require_two_strategies(game: Game):
    for i, k in enumerate(game.shape):
        if k < 2:
            raise HypothesisViolation(
                f"player {i + 1} has {k} strategy; pricing needs at least two per player")


def _gap(game: Game, player: int, own, opp) -> Fraction:
    """max over x_i of U_i(x_i, opp) - U_i(own, opp); never negative."""
    here = game.utility(player, opp[:player] + (own,) + opp[player + 1:])
    return max(game.utility(player, opp[:player] + (x,) + opp[player + 1:]) - here
               for x in range(game.shape[player]))


def singleton_price(game: Game, z) -> Fraction:
    """Cheapest worst-case payment that makes ``z`` the only rational profile.

    Sum over players of the largest gain from a unilateral deviation at ``z``.
    """
    _require_two_strategies(game)
    z = game.profile(z)
    return sum((_gap(game, i, z[i], z) for i in range(game.n_players)), Fraction(0))


def build_singleton_implementation(game: Game, z, epsilon=1) -> PaymentScheme:
    """Payments making ``z_i`` dominant for every player.

    Player ``i`` is paid only when playing ``z_i``: the column-wise deviation
    gap plus ``epsilon`` on every opponent profile other than ``z_{-i}``. The
    padding supplies the strict inequality dominance needs and is never paid
    on the path.
    """
    epsilon = to_fraction(epsilon)
    if epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    if game.n_players < 2:
        raise HypothesisViolation("a one-player game has no off-path opponent profile to pad")
    _require_two_strategies(game)
    z = game.profile(z)
    v = np.empty(game.shape + (game.n_players,), dtype=object)
    v.flat[:] = [Fraction(0)] * v.size
    for i in range(game.n_players):
        for opp in game.opponent_profiles(i):
            cell = opp[:i] + (z[i],) + opp[i + 1:]
            pad = Fraction(0) if cell == z else epsilon
            v[cell + (i,)] = _gap(game, i, z[i], opp) + pad
    return PaymentScheme(game, v)


def verify_implementation(game: Game, v: PaymentScheme, target) -> ImplementationReport:
    """Surviving set of the paid game, containment in ``target``, worst-case cost."""
    target = normalize_target(game, target)
    surviving = non_dominated_profiles(with_payments(game, v))
    profiles = list(itertools.product(*surviving))
    cost = max(v.total(x) for x in profiles)
    return ImplementationReport(
        scheme=v,
        surviving=surviving,
        worst_case_cost=cost,
        target_contained=all(x in target for x in profiles),
    )


def default_grid(game: Game, player: int) -> list:
    """0, every non-negative difference of the player's payoffs, and range + 1."""
    vals = sorted(set(game.player_matrix(player).flat))
    grid = {a - b for a in vals for b in vals if a >= b}
    grid.add(vals[-1] - vals[0] + 1)
    return sorted(grid)


@dataclass(frozen=True)
class BruteForceResult:
    price: Fraction
    scheme: PaymentScheme
    report: ImplementationReport
    searched: int


def _nonempty_subsets(k):
    for r in range(1, k + 1):
        yield from itertools.combinations(range(k), r)


def _player_search(game, i, s_i, s_opp, grid, cache):
    """Pareto-minimal payment vectors on the surviving block for one player.

    Returns ``(cost_profiles, [(cost_values, full_cells), ...])`` where
    ``full_cells`` maps every assigned ``(row, col)`` cell to its payment.
    """
    key = (i, s_i, s_opp)
    if key in cache:
        return cache[key]
    mat = game.player_matrix(i)
    scale = math.lcm(*(q.denominator for q in mat.flat), *(g.denominator for g in grid))
    base = [[int(q * scale) for q in row] for row in mat]
    igrid = [int(g * scale) for g in grid]
    opps = game.opponent_profiles(i)
    in_block = [all(opp[j] in s_opp[j] for j in range(game.n_players) if j != i)
                for opp in opps]
    cost_cells = [(a, c) for a in s_i for c, ok in enumerate(in_block) if ok]
    off_cells = [(a, c) for a in s_i for c, ok in enumerate(in_block) if not ok]
    fixed = {}
    if len(s_i) == 1:
        # raising the lone survivor's off-block payments only helps it dominate
        top = len(grid) - 1
        for r, c in off_cells:
            base[r][c] += igrid[top]
            fixed[(r, c)] = grid[top]
        free_cells = []
    else:
        free_cells = off_cells
    mask = [int(a in s_i) for a in range(game.shape[i])]
    hits = kernels.feasible_cost_vectors(base, cost_cells, free_cells, igrid, mask)
    options = []
    for hit in hits:
        cost_vals = tuple(grid[g] for g in hit[:len(cost_cells)])
        cells = dict(fixed)
        for cell, g in zip(cost_cells + free_cells, hit):
            cells[cell] = grid[g]
        options.append((cost_vals, cells))
    pareto = [o for o in options
              if not any(all(a <= b for a, b in zip(p[0], o[0])) and p[0] != o[0]
                         for p in options)]
    cost_profiles = [opps[c][:i] + (a,) + opps[c][i + 1:] for a, c in cost_cells]
    cache[key] = (cost_profiles, pareto)
    return cache[key]


def brute_force_set_price(game: Game, target, value_grid=None, cap: int = DEFAULT_CAP):
    """Exhaustive grid search for the cheapest implementation of ``target``.

    Every payment is drawn from ``value_grid`` (default :func:`default_grid`
    per player). Two reductions keep the search tractable without changing
    its optimum over the grid:

    * a strategy that must not survive gets no payments (lowering its payoffs
      cannot stop it from being dominated, nor let it dominate anything);
    * when a player's surviving set is a single strategy, its payments
      outside the surviving block are set to the grid maximum (raising them
      only helps it dominate and costs nothing on surviving profiles).

    Ties in worst-case cost go to the scheme promising the least in total,
    then to enumeration order.

    Returns a :class:`BruteForceResult`, or ``None`` when no grid scheme
    implements the target. Raises :class:`BudgetExceededError` before
    searching when the number of grid assignments exceeds ``cap``.
    """
    target = normalize_target(game, target)
    n = game.n_players
    if value_grid is None:
        grids = [default_grid(game, i) for i in range(n)]
    else:
        g = sorted({to_fraction(x) for x in value_grid})
        if not g or g[0] < 0:
            raise PreconditionError("value grid must be non-empty and non-negative")
        grids = [g] * n

    candidates = [s for s in itertools.product(*(_nonempty_subsets(k) for k in game.shape))
                  if all(x in target for x in itertools.product(*s))]
    n_cols = [math.prod(game.shape) // game.shape[i] for i in range(n)]
    seen, estimate = set(), 0
    for s in candidates:
        for i in range(n):
            key = (i, s[i], s[:i] + (None,) + s[i + 1:])
            if key not in seen:
                seen.add(key)
                cells = len(s[i]) * n_cols[i] if len(s[i]) > 1 else \
                    math.prod(len(s[j]) for j in range(n) if j != i)
                estimate += len(grids[i]) ** cells
    if estimate > cap:
        raise BudgetExceededError(
            f"grid search needs about {estimate} assignments, cap is {cap}",
            estimate=estimate, cap=cap)

    cache = {}
    best = None
    for s in candidates:
        per_player = [_player_search(game, i, s[i], s[:i] + (None,) + s[i + 1:], grids[i], cache)
                      for i in range(n)]
        if any(not opts for _, opts in per_player):
            continue
        for combo in itertools.product(*(opts for _, opts in per_player)):
            totals = {}
            for (profiles, _), (vals, _) in zip(per_player, combo):
                for x, val in zip(profiles, vals):
                    totals[x] = totals.get(x, Fraction(0)) + val
            cost = max(totals.values())
            promised = sum((a for _, cells in combo for a in cells.values()), Fraction(0))
            if best is None or (cost, promised) < best[0]:
                best = ((cost, promised), s, combo)
    if best is None:
        return None

    (cost, _), s, combo = best
    v = np.empty(game.shape + (n,), dtype=object)
    v.flat[:] = [Fraction(0)] * v.size
    for i, (_, cells) in enumerate(combo):
        opps = game.opponent_profiles(i)
        for (a, c), amount in cells.items():
            v[opps[c][:i] + (a,) + opps[c][i + 1:] + (i,)] = amount
    scheme = PaymentScheme(game, v)
    report = verify_implementation(game, scheme, target)
    if not report.target_contained or report.worst_case_cost != cost:
        raise AssertionError("grid witness failed re-verification")
    return BruteForceResult(price=cost, scheme=scheme, report=report, searched=estimate)
