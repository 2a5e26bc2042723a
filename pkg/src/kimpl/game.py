"""Finite strategic-form games with exact payoffs.

Everything here is a pure function of immutable inputs. Payoffs are
``fractions.Fraction`` throughout; dominance checks run on integer matrices
obtained by scaling each player's payoffs to a common denominator, so no
comparison ever rounds.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from ._linalg import solve_unique
from ._rational import to_fraction
from .errors import InvalidProfileError, PreconditionError, UnsupportedError

__all__ = [
    "Game", "PaymentScheme", "payoff", "dominates", "non_dominated",
    "non_dominated_profiles", "with_payments", "is_pure_nash",
    "enumerate_pure_nash", "mixed_payoff", "is_mixed_nash", "find_mixed_nash_2p",
    "is_correlated_eq", "obedience_gains", "check_mixed", "check_distribution", "point_mass",
    "product_distribution", "pure_payoffs_against",
]

Profile = tuple


def _fraction_array(values, shape) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    flat = list(values)
    if len(flat) != arr.size:
        raise PreconditionError(f"expected {arr.size} values, got {len(flat)}")
    for k, v in enumerate(flat):
        arr.flat[k] = to_fraction(v)
    arr.flags.writeable = False
    return arr


class Game:
    """An n-player finite game.

    ``payoffs`` is array-like with shape ``(|X_1|, ..., |X_n|, n)``: the last
    axis holds the payoff vector of a profile. Strategies are addressed by
    index or by label anywhere a profile is accepted.
    """

    def __init__(self, strategies: Sequence[Sequence[str]], payoffs):
        strategies = tuple(tuple(str(s) for s in row) for row in strategies)
        if not strategies:
            raise PreconditionError("a game needs at least one player")
        for i, row in enumerate(strategies):
            if not row:
                raise PreconditionError(f"player {i + 1} has no strategies")
            if len(set(row)) != len(row):
                raise PreconditionError(f"player {i + 1} has duplicate strategy labels")
        self.strategies = strategies
        self.n_players = len(strategies)
        self.shape = tuple(len(row) for row in strategies)
        shape = self.shape + (self.n_players,)
        if isinstance(payoffs, np.ndarray) and payoffs.dtype == object:
            if payoffs.shape != shape:
                raise PreconditionError(f"payoff tensor has shape {payoffs.shape}, expected {shape}")
            values = payoffs.reshape(-1)
        else:
            arr = np.asarray(payoffs, dtype=object)
            if arr.shape != shape:
                raise PreconditionError(f"payoff tensor has shape {arr.shape}, expected {shape}")
            values = arr.reshape(-1)
        self._u = _fraction_array(values, shape)

    @classmethod
    def from_function(cls, strategies, fn) -> "Game":
        """Build from ``fn(profile) -> payoff vector`` over index profiles."""
        strategies = [list(s) for s in strategies]
        shape = tuple(len(s) for s in strategies)
        values = []
        for prof in itertools.product(*map(range, shape)):
            vec = list(fn(prof))
            if len(vec) != len(shape):
                raise PreconditionError(f"payoff vector at {prof} has wrong length")
            values.extend(vec)
        return cls(strategies, np.array(values, dtype=object).reshape(shape + (len(shape),)))

    # -- addressing -----------------------------------------------------
    def strategy_index(self, player: int, strategy) -> int:
        if not 0 <= player < self.n_players:
            raise InvalidProfileError(f"no player {player}")
        if isinstance(strategy, (int, np.integer)) and not isinstance(strategy, bool):
            if 0 <= strategy < self.shape[player]:
                return int(strategy)
            raise InvalidProfileError(f"player {player + 1} has no strategy #{strategy}")
        try:
            return self.strategies[player].index(str(strategy))
        except ValueError:
            raise InvalidProfileError(
                f"player {player + 1} has no strategy {strategy!r}") from None

    def profile(self, spec) -> Profile:
        """Normalise a profile given by indices and/or labels."""
        spec = tuple(spec)
        if len(spec) != self.n_players:
            raise InvalidProfileError(
                f"profile {spec!r} has {len(spec)} entries, game has {self.n_players} players")
        return tuple(self.strategy_index(i, s) for i, s in enumerate(spec))

    def labels(self, profile: Profile) -> tuple:
        return tuple(self.strategies[i][s] for i, s in enumerate(profile))

    def profiles(self) -> Iterable[Profile]:
        return itertools.product(*map(range, self.shape))

    def opponent_profiles(self, player: int) -> list:
        """Opponent profiles, as full-length tuples with ``None`` at ``player``,
        in the column order of :meth:`player_matrix`."""
        others = [range(k) if j != player else (None,) for j, k in enumerate(self.shape)]
        return list(itertools.product(*others))

    # -- payoffs ----------------------------------------------------------
    @property
    def payoff_tensor(self) -> np.ndarray:
        return self._u

    def payoff(self, profile) -> tuple:
        prof = self.profile(profile)
        return tuple(self._u[prof])

    def utility(self, player: int, profile) -> Fraction:
        return self._u[tuple(profile) + (player,)]

    def player_matrix(self, player: int) -> np.ndarray:
        """Rows: own strategies. Columns: opponent profiles in product order."""
        u = np.moveaxis(self._u[..., player], player, 0)
        return u.reshape(self.shape[player], -1)

    def int_matrix(self, player: int) -> list:
        return self._scaled[player][0]

    @cached_property
    def _scaled(self):
        out = []
        for i in range(self.n_players):
            mat = self.player_matrix(i)
            scale = math.lcm(*(q.denominator for q in mat.flat))
            out.append(([[int(q * scale) for q in row] for row in mat], scale))
        return out

    def replace_payoffs(self, tensor) -> "Game":
        return Game(self.strategies, tensor)

    def __eq__(self, other):
        if not isinstance(other, Game):
            return NotImplemented
        return self.strategies == other.strategies and bool(np.all(self._u == other._u))

    def __hash__(self):
        return hash((self.strategies, tuple(self._u.flat)))

    def __repr__(self):
        return f"Game(strategies={self.strategies!r})"


class PaymentScheme:
    """Non-negative promised transfers, same layout as a game's payoff tensor."""

    def __init__(self, game: Game, payments=None):
        shape = game.shape + (game.n_players,)
        if payments is None:
            payments = np.zeros(shape, dtype=object)
            payments.flat[:] = [Fraction(0)] * payments.size
        arr = np.asarray(payments, dtype=object)
        if arr.shape != shape:
            raise PreconditionError(f"payment tensor has shape {arr.shape}, expected {shape}")
        self._v = _fraction_array(arr.reshape(-1), shape)
        negative = [idx for idx in np.ndindex(shape) if self._v[idx] < 0]
        if negative:
            *prof, player = negative[0]
            raise PreconditionError(
                f"payment to player {player + 1} at {game.labels(tuple(prof))} is negative")
        self.game = game

    @classmethod
    def zeros(cls, game: Game) -> "PaymentScheme":
        return cls(game)

    @classmethod
    def from_entries(cls, game: Game, entries: Mapping) -> "PaymentScheme":
        """``{(player, profile): amount}``; omitted entries are 0."""
        arr = np.zeros(game.shape + (game.n_players,), dtype=object)
        arr.flat[:] = [Fraction(0)] * arr.size
        for (player, prof), amount in entries.items():
            arr[game.profile(prof) + (player,)] = to_fraction(amount)
        return cls(game, arr)

    @property
    def tensor(self) -> np.ndarray:
        return self._v

    def amount(self, player: int, profile) -> Fraction:
        return self._v[self.game.profile(profile) + (player,)]

    def total(self, profile) -> Fraction:
        return sum(self._v[self.game.profile(profile)], Fraction(0))

    def entries(self) -> dict:
        """Non-zero entries as ``{(player, profile): amount}`` in tensor order."""
        out = {}
        for idx in np.ndindex(self._v.shape):
            if self._v[idx] != 0:
                out[(idx[-1], idx[:-1])] = self._v[idx]
        return out

    def __eq__(self, other):
        if not isinstance(other, PaymentScheme):
            return NotImplemented
        return self.game.shape == other.game.shape and bool(np.all(self._v == other._v))

    def __repr__(self):
        return f"PaymentScheme({len(self.entries())} non-zero entries)"


# -- pure-strategy structure ---------------------------------------------

def payoff(game: Game, profile) -> tuple:
    return game.payoff(profile)


def dominates(game: Game, player: int, a, b) -> bool:
    """Weak dominance: ``a`` never worse than ``b`` and strictly better once."""
    a = game.strategy_index(player, a)
    b = game.strategy_index(player, b)
    mat = game.int_matrix(player)
    return kernels.dominates_rows(mat[a], mat[b])


def non_dominated(game: Game, player: int) -> tuple:
    """Indices of the player's strategies that no other strategy dominates.

    Single pass; nothing is eliminated iteratively.
    """
    if not 0 <= player < game.n_players:
        raise InvalidProfileError(f"no player {player}")
    return tuple(kernels.nondominated(game.int_matrix(player)))


def non_dominated_profiles(game: Game) -> tuple:
    """Per-player non-dominated sets; their product is the surviving set."""
    return tuple(non_dominated(game, i) for i in range(game.n_players))


def with_payments(game: Game, v: PaymentScheme) -> Game:
    if v.game.shape != game.shape:
        raise PreconditionError("payment scheme does not match the game's shape")
    return game.replace_payoffs(game.payoff_tensor + v.tensor)


def is_pure_nash(game: Game, z) -> bool:
    z = game.profile(z)
    for i in range(game.n_players):
        here = game.utility(i, z)
        for x in range(game.shape[i]):
            if game.utility(i, z[:i] + (x,) + z[i + 1:]) > here:
                return False
    return True


def enumerate_pure_nash(game: Game) -> list:
    return [z for z in game.profiles() if is_pure_nash(game, z)]


# -- mixed and correlated -------------------------------------------------

def check_mixed(game: Game, p) -> tuple:
    """Validate and normalise a mixed profile to tuples of Fractions."""
    p = tuple(tuple(to_fraction(q) for q in row) for row in p)
    if len(p) != game.n_players:
        raise PreconditionError("mixed profile has the wrong number of players")
    for i, row in enumerate(p):
        if len(row) != game.shape[i]:
            raise PreconditionError(f"player {i + 1}: expected {game.shape[i]} probabilities")
        if any(q < 0 for q in row) or sum(row) != 1:
            raise PreconditionError(f"player {i + 1}: not a probability vector")
    return p


def check_distribution(game: Game, xi: Mapping) -> dict:
    out = {}
    for prof, q in xi.items():
        q = to_fraction(q)
        if q < 0:
            raise PreconditionError("negative probability")
        if q:
            key = game.profile(prof)
            out[key] = out.get(key, Fraction(0)) + q
    if sum(out.values(), Fraction(0)) != 1:
        raise PreconditionError("distribution does not sum to 1")
    return dict(sorted(out.items()))


def point_mass(game: Game, z) -> tuple:
    z = game.profile(z)
    return tuple(tuple(Fraction(int(k == z[i])) for k in range(game.shape[i]))
                 for i in range(game.n_players))


def product_distribution(game: Game, p) -> dict:
    p = check_mixed(game, p)
    out = {}
    for x in game.profiles():
        w = math.prod((p[i][x[i]] for i in range(game.n_players)), start=Fraction(1))
        if w:
            out[x] = w
    return out


def mixed_payoff(game: Game, p) -> tuple:
    """Expected payoff vector under independent mixing."""
    xi = product_distribution(game, p)
    totals = [Fraction(0)] * game.n_players
    for x, w in xi.items():
        for i, u in enumerate(game.payoff(x)):
            totals[i] += w * u
    return tuple(totals)


def pure_payoffs_against(game: Game, player: int, p) -> list:
    """Expected payoff of each pure strategy of ``player`` against ``p_{-i}``."""
    p = check_mixed(game, p)
    out = []
    for x_i in range(game.shape[player]):
        total = Fraction(0)
        for opp in game.opponent_profiles(player):
            w = Fraction(1)
            for j, s in enumerate(opp):
                if j != player:
                    w *= p[j][s]
            if w:
                total += w * game.utility(player, opp[:player] + (x_i,) + opp[player + 1:])
        out.append(total)
    return out


def is_mixed_nash(game: Game, p) -> bool:
    p = check_mixed(game, p)
    value = mixed_payoff(game, p)
    return all(max(pure_payoffs_against(game, i, p)) <= value[i]
               for i in range(game.n_players))


def _indifference(mat, rows, cols):
    """Mix over ``cols`` making the row player indifferent across ``rows``.

    ``mat[r][c]`` is the row player's payoff. Returns (mix, value) or None.
    """
    a = [[mat[r][c] for c in cols] + [Fraction(-1)] for r in rows]
    a.append([Fraction(1)] * len(cols) + [Fraction(0)])
    b = [Fraction(0)] * len(rows) + [Fraction(1)]
    sol = solve_unique(a, b)
    if sol is None or any(q < 0 for q in sol[:-1]):
        return None
    return sol[:-1], sol[-1]


def _spread(k, support, weights):
    row = [Fraction(0)] * k
    for s, w in zip(support, weights):
        row[s] = w
    return tuple(row)


def find_mixed_nash_2p(game: Game) -> tuple:
    """A mixed equilibrium of a two-player game by exact support enumeration.

    Support pairs are tried by total size, then by row-support size, then
    lexicographically; the first pair whose indifference systems have unique
    non-negative solutions forming an equilibrium is returned. Degenerate
    games where no such pair exists fall back to pairing vertices of the two
    best-response polyhedra.
    """
    if game.n_players != 2:
        raise UnsupportedError("support enumeration handles two-player games only")
    m, n = game.shape
    u1 = [[game.utility(0, (r, c)) for c in range(n)] for r in range(m)]
    u2t = [[game.utility(1, (r, c)) for r in range(m)] for c in range(n)]
    sizes = sorted(((k1, k2) for k1 in range(1, m + 1) for k2 in range(1, n + 1)),
                   key=lambda t: (t[0] + t[1], t[0]))
    for k1, k2 in sizes:
        for s1 in itertools.combinations(range(m), k1):
            for s2 in itertools.combinations(range(n), k2):
                q = _indifference(u1, s1, s2)
                if q is None:
                    continue
                p = _indifference(u2t, s2, s1)
                if p is None:
                    continue
                prof = (_spread(m, s1, p[0]), _spread(n, s2, q[0]))
                if is_mixed_nash(game, prof):
                    return prof
    return _vertex_pairs(game, u1, u2t)


def _vertices(mat, k_rows, k_cols):
    found = []
    for t in range(1, k_cols + 1):
        for supp in itertools.combinations(range(k_cols), t):
            for r in range(1, k_rows + 1):
                for tight in itertools.combinations(range(k_rows), r):
                    sol = _indifference(mat, tight, supp)
                    if sol is None:
                        continue
                    mix = _spread(k_cols, supp, sol[0])
                    vals = [sum((mat[i][c] * mix[c] for c in range(k_cols)), Fraction(0))
                            for i in range(k_rows)]
                    if max(vals) == sol[1] and mix not in found:
                        found.append(mix)
    return found


def _vertex_pairs(game, u1, u2t):
    m, n = game.shape
    for q in _vertices(u1, m, n):
        for p in _vertices(u2t, n, m):
            if is_mixed_nash(game, (p, q)):
                return (p, q)
    raise AssertionError("no equilibrium found; finite games always have one")


def obedience_gains(game: Game, xi: Mapping) -> dict:
    """Weighted gain of obeying recommendation ``s_i`` rather than playing ``x_i``.

    Keys are ``(player, s_i, x_i)`` for recommendations with positive
    probability and ``x_i != s_i``; a negative value is a profitable deviation.
    """
    xi = check_distribution(game, xi)
    out = {}
    for i in range(game.n_players):
        for s_i in range(game.shape[i]):
            cond = [(s, w) for s, w in xi.items() if s[i] == s_i]
            if not cond:
                continue
            for x_i in range(game.shape[i]):
                if x_i != s_i:
                    out[(i, s_i, x_i)] = sum(
                        (w * (game.utility(i, s) - game.utility(i, s[:i] + (x_i,) + s[i + 1:]))
                         for s, w in cond), Fraction(0))
    return out


def is_correlated_eq(game: Game, xi: Mapping) -> bool:
    """Obedience constraints of a recommendation device drawing from ``xi``."""
    return all(g >= 0 for g in obedience_gains(game, xi).values())
