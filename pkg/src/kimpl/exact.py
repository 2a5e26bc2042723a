"""Exact implementation of rectangular targets in two-player games.

The search follows the optimal-perturbation procedure: strategies in a
player's target set are paid a large constant against opponent strategies
outside the opponent's target set, then a single uniform amount ``e`` is
paid on the target block, with ``e`` scanned upward through the player's
non-negative payoff differences until the non-dominated set is exactly the
target set. Player 1 is settled first, then player 2.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .errors import InternalGuardError, PreconditionError, UnsupportedError
from .game import Game, PaymentScheme, dominates, non_dominated, non_dominated_profiles, with_payments
from .implementation import ImplementationReport

__all__ = ["rectangular_target", "difference_list", "penalty_constant", "op_scheme",
           "op_feasible", "op_algorithm", "verify_exact"]


def rectangular_target(game: Game, sets) -> tuple:
    """Validate per-player target sets; returns sorted index tuples.

    Each set must be non-empty, a strict subset of the player's strategies,
    and free of internal dominance in the original game.
    """
    if len(sets) != game.n_players:
        raise PreconditionError("need one strategy set per player")
    out = []
    for i, s in enumerate(sets):
        idx = tuple(sorted({game.strategy_index(i, x) for x in s}))
        if not idx:
            raise PreconditionError(f"target set of player {i + 1} is empty")
        if len(idx) == game.shape[i]:
            raise PreconditionError(
                f"target set of player {i + 1} must be a strict subset of its strategies")
        for a, b in itertools.permutations(idx, 2):
            if dominates(game, i, a, b):
                raise PreconditionError(
                    f"player {i + 1}: target strategy {game.strategies[i][a]!r} dominates "
                    f"{game.strategies[i][b]!r} in the original game")
        out.append(idx)
    return tuple(out)


def difference_list(game: Game, player: int) -> list:
    vals = sorted(set(game.player_matrix(player).flat))
    return sorted({a - b for a in vals for b in vals if a >= b})


def penalty_constant(game: Game) -> Fraction:
    """max payoff - min payoff + 1; exceeds every payoff gap, even with negative payoffs."""
    vals = list(game.payoff_tensor.flat)
    return max(vals) - min(vals) + 1


def op_scheme(game: Game, target, e1=0, e2=0) -> PaymentScheme:
    """Penalty skeleton plus uniform ``e1``/``e2`` on the target block."""
    o1, o2 = target
    big = penalty_constant(game)
    v = np.empty(game.shape + (2,), dtype=object)
    v.flat[:] = [Fraction(0)] * v.size
    for a, b in game.profiles():
        if a in o1 and b not in o2:
            v[a, b, 0] = big
        if b in o2 and a not in o1:
            v[a, b, 1] = big
        if a in o1 and b in o2:
            v[a, b, 0] = Fraction(e1)
            v[a, b, 1] = Fraction(e2)
    return PaymentScheme(game, v)


def op_feasible(game: Game, target, player: int, e) -> bool:
    """Does paying ``e`` on the block make the player's survivors exactly its target set?"""
    es = [Fraction(0), Fraction(0)]
    es[player] = Fraction(e)
    paid = with_payments(game, op_scheme(game, target, *es))
    return non_dominated(paid, player) == tuple(target[player])


def op_algorithm(game: Game, target) -> ImplementationReport:
    if game.n_players != 2:
        raise UnsupportedError("exact implementation is implemented for two players only")
    target = rectangular_target(game, target)
    chosen = []
    for player in (0, 1):
        for e in difference_list(game, player):
            if op_feasible(game, target, player, e):
                chosen.append(e)
                break
        else:
            raise InternalGuardError(
                f"no payoff difference makes player {player + 1}'s survivors match the target")
    scheme = op_scheme(game, target, *chosen)
    surviving = non_dominated_profiles(with_payments(game, scheme))
    block = list(itertools.product(*target))
    cost = max(scheme.total(x) for x in itertools.product(*surviving))
    return ImplementationReport(
        scheme=scheme,
        surviving=surviving,
        worst_case_cost=cost,
        target_contained=all(x in block for x in itertools.product(*surviving)),
        exact=surviving == target,
        metadata={"e1": chosen[0], "e2": chosen[1], "penalty": penalty_constant(game),
                  "penalty_rule": "max payoff - min payoff + 1"},
    )


def verify_exact(game: Game, v: PaymentScheme, target) -> bool:
    sets = tuple(tuple(sorted({game.strategy_index(i, x) for x in s}))
                 for i, s in enumerate(target))
    return non_dominated_profiles(with_payments(game, v)) == sets
