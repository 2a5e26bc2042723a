"""Implementation devices: private recommendations plus signal-conditioned payments.

A device draws a signal profile from ``h``, tells each player its own
signal, and after play pays ``payments[(i, s, x)]`` to player ``i``. The
constructions here recommend actions (signals are actions) and pay a bonus
to a player who obeys while some opponent does not; obeying then becomes a
dominant strategy while nothing is paid on the obedient path.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from ._rational import to_fraction
from .errors import BudgetExceededError, HypothesisViolation, PreconditionError
from .game import (Game, check_distribution, is_correlated_eq, is_mixed_nash,
                   product_distribution)

__all__ = [
    "ImplementationDevice", "SimulationResult", "obedience", "conditional_value",
    "is_dominant_obedience", "obedience_check", "device_cost", "max_payout",
    "theorem_bonus", "safe_bonus", "build_mixed_device", "build_correlated_device",
    "induced_distribution", "simulate_device", "DEFAULT_STRATEGY_CAP",
]

DEFAULT_STRATEGY_CAP = 200_000


@dataclass(frozen=True)
class ImplementationDevice:
    signal_sets: tuple
    h: Mapping  # signal-index profile -> probability; zero entries dropped
    payments: Mapping = field(default_factory=dict)  # (player, s, x) -> amount; zeros dropped
    bonus: Fraction | None = None
    bonus_rule: str | None = None

    def __post_init__(self):
        sig = tuple(tuple(str(s) for s in row) for row in self.signal_sets)
        object.__setattr__(self, "signal_sets", sig)
        shape = tuple(len(r) for r in sig)
        h = {}
        for s, q in self.h.items():
            q = to_fraction(q)
            s = tuple(int(k) for k in s)
            if q < 0:
                raise PreconditionError("negative signal probability")
            if len(s) != len(shape) or any(not 0 <= k < m for k, m in zip(s, shape)):
                raise PreconditionError(f"signal profile {s} out of range")
            if q:
                h[s] = h.get(s, Fraction(0)) + q
        if sum(h.values(), Fraction(0)) != 1:
            raise PreconditionError("signal distribution does not sum to 1")
        pay = {}
        for (i, s, x), amount in self.payments.items():
            amount = to_fraction(amount)
            if amount < 0:
                raise PreconditionError("device payments must be non-negative")
            if amount:
                pay[(int(i), tuple(s), tuple(x))] = amount
        object.__setattr__(self, "h", dict(sorted(h.items())))
        object.__setattr__(self, "payments", dict(sorted(pay.items())))

    @property
    def n_players(self) -> int:
        return len(self.signal_sets)

    def payment(self, player: int, s, x) -> Fraction:
        return self.payments.get((player, tuple(s), tuple(x)), Fraction(0))

    def marginal(self, player: int, signal: int) -> Fraction:
        return sum((q for s, q in self.h.items() if s[player] == signal), Fraction(0))


@dataclass(frozen=True)
class SimulationResult:
    rounds: int
    counts: dict  # action profile -> count
    payments: tuple  # total device payments per player
    base_payoffs: tuple  # total game payoffs per player

    @property
    def empirical(self) -> dict:
        return {x: Fraction(c, self.rounds) for x, c in self.counts.items()}


def _signal_index(game: Game, device: ImplementationDevice, player: int, label) -> int:
    if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
        return int(label)
    try:
        return device.signal_sets[player].index(str(label))
    except ValueError:
        raise PreconditionError(f"player {player + 1} has no signal {label!r}") from None


def _require_obedience(game: Game, device: ImplementationDevice):
    if device.n_players != game.n_players or any(
            tuple(device.signal_sets[i]) != game.strategies[i] for i in range(game.n_players)):
        raise PreconditionError("obedience needs each player's signals to be its action labels")


def obedience(game: Game) -> tuple:
    """The strategy profile that plays every recommendation."""
    return tuple(tuple(range(k)) for k in game.shape)


def _conditional(device, player, signal):
    marg = device.marginal(player, signal)
    if marg == 0:
        raise PreconditionError(f"signal #{signal} of player {player + 1} has probability 0")
    return [(s, q / marg) for s, q in device.h.items() if s[player] == signal]


def _w(game, device, player, action, cond, others):
    total = Fraction(0)
    for s, q in cond:
        x = tuple(action if j == player else others[j][s[j]] for j in range(game.n_players))
        total += q * (game.utility(player, x) + device.payment(player, s, x))
    return total


def conditional_value(game: Game, device: ImplementationDevice, player: int, action,
                      signal, others) -> Fraction:
    """Expected payoff plus device payment of ``action`` after ``signal``.

    ``others[j]`` maps player j's signal indices to action indices; the entry
    for ``player`` itself is ignored.
    """
    action = game.strategy_index(player, action)
    signal = _signal_index(game, device, player, signal)
    return _w(game, device, player, action, _conditional(device, player, signal), others)


def _opponent_strategies(game, device, player):
    per = []
    for j in range(game.n_players):
        if j == player:
            per.append([None])
        else:
            per.append(list(itertools.product(range(game.shape[j]),
                                              repeat=len(device.signal_sets[j]))))
    return itertools.product(*per)


def obedience_check(game: Game, device: ImplementationDevice,
                    cap: int = DEFAULT_STRATEGY_CAP) -> tuple:
    """Exhaustive dominance test of obedience.

    Obeying must be weakly best against every deterministic strategy vector
    of the opponents, and strictly better than each alternative action
    against at least one. Returns ``(ok, detail)`` where ``detail`` describes
    the first failure.
    """
    _require_obedience(game, device)
    n = game.n_players
    for i in range(n):
        count = math.prod(game.shape[j] ** len(device.signal_sets[j]) for j in range(n) if j != i)
        if count > cap:
            raise BudgetExceededError(
                f"player {i + 1} faces {count} opponent strategy vectors, cap is {cap}",
                estimate=count, cap=cap)
    for i in range(n):
        for s_i in range(len(device.signal_sets[i])):
            if device.marginal(i, s_i) == 0:
                continue
            cond = _conditional(device, i, s_i)
            strict = set()
            for others in _opponent_strategies(game, device, i):
                obey = _w(game, device, i, s_i, cond, others)
                for x_i in range(game.shape[i]):
                    if x_i == s_i:
                        continue
                    alt = _w(game, device, i, x_i, cond, others)
                    if alt > obey:
                        return False, (f"player {i + 1}, signal {device.signal_sets[i][s_i]}: "
                                       f"{game.strategies[i][x_i]} earns {alt} > {obey}")
                    if obey > alt:
                        strict.add(x_i)
            missing = set(range(game.shape[i])) - strict - {s_i}
            if missing:
                x_i = min(missing)
                return False, (f"player {i + 1}, signal {device.signal_sets[i][s_i]}: never "
                               f"strictly better than {game.strategies[i][x_i]}")
    return True, ""


def is_dominant_obedience(game: Game, device: ImplementationDevice,
                          cap: int = DEFAULT_STRATEGY_CAP) -> bool:
    return obedience_check(game, device, cap)[0]


def device_cost(game: Game, device: ImplementationDevice) -> Fraction:
    """Largest total payment at an obedient outcome over positive-probability signals."""
    _require_obedience(game, device)
    return max(sum((device.payment(i, s, s) for i in range(game.n_players)), Fraction(0))
               for s in device.h)


def max_payout(game: Game, device: ImplementationDevice) -> Fraction:
    """Largest total payment over positive-probability signals and any play."""
    return max(sum((device.payment(i, s, x) for i in range(game.n_players)), Fraction(0))
               for s in device.h for x in game.profiles())


def _max_abs_payoff(game: Game) -> Fraction:
    return max(abs(u) for u in game.payoff_tensor.flat)


def theorem_bonus(game: Game) -> Fraction:
    """2M + 1 with M the largest absolute payoff."""
    return 2 * _max_abs_payoff(game) + 1


def safe_bonus(game: Game, h: Mapping) -> Fraction:
    """A bonus that makes obedience dominant for any correlated equilibrium ``h``.

    If an opponent strategy disobeys on some signal profile of conditional
    weight at least ``q``, obeying gains at least ``q (B - 2M)`` there and
    loses at most ``2M (1 - q)`` elsewhere; ``B = 2M/q + 1`` covers the
    smallest positive conditional weight ``q``.
    """
    big = _max_abs_payoff(game)
    q_min = None
    for i in range(game.n_players):
        for s_i in range(game.shape[i]):
            marg = sum((q for s, q in h.items() if s[i] == s_i), Fraction(0))
            for s, q in h.items():
                if s[i] == s_i and q:
                    w = q / marg
                    q_min = w if q_min is None else min(q_min, w)
    return 2 * big / q_min + 1


def _bonus_suffices(game: Game, h: Mapping, bonus: Fraction) -> bool:
    """Sufficient test for obedience dominance under the recommendation skeleton.

    Lets the opponents' joint action depend arbitrarily on their joint signal,
    a superset of product strategies, so the worst case splits per signal
    profile. Exact for two players.
    """
    n = game.n_players
    for i in range(n):
        opp_profiles = game.opponent_profiles(i)
        for s_i in range(game.shape[i]):
            cond = [(s, q) for s, q in h.items() if s[i] == s_i]
            if not cond:
                continue
            for x_i in range(game.shape[i]):
                if x_i == s_i:
                    continue
                worst = Fraction(0)
                for s, q in cond:
                    best_reply = None
                    for y in opp_profiles:
                        y_obey = y[:i] + (s_i,) + y[i + 1:]
                        y_dev = y[:i] + (x_i,) + y[i + 1:]
                        gap = game.utility(i, y_obey) - game.utility(i, y_dev)
                        if y_obey != s:
                            gap += bonus
                        best_reply = gap if best_reply is None else min(best_reply, gap)
                    worst += q * best_reply
                if worst < 0:
                    return False
    return True


def _skeleton(game: Game, h: Mapping, bonus, rule) -> ImplementationDevice:
    for i, k in enumerate(game.shape):
        if k < 2:
            raise HypothesisViolation(f"player {i + 1} needs at least two actions")
    if bonus in (None, "auto"):
        b = theorem_bonus(game)
        rule = "2M+1"
        if not _bonus_suffices(game, h, b):
            b, rule = max(b, safe_bonus(game, h)), "2M/q_min+1"
    elif bonus == "theorem":
        b, rule = theorem_bonus(game), "2M+1"
    elif bonus == "safe":
        b, rule = max(theorem_bonus(game), safe_bonus(game, h)), "2M/q_min+1"
    else:
        b, rule = to_fraction(bonus), "explicit"
        if b <= 0:
            raise PreconditionError("bonus must be positive")
    payments = {}
    n = game.n_players
    for s in game.profiles():
        for i in range(n):
            for y in game.opponent_profiles(i):
                x = y[:i] + (s[i],) + y[i + 1:]
                if x != s:
                    payments[(i, s, x)] = b
    return ImplementationDevice(signal_sets=game.strategies, h=h, payments=payments,
                                bonus=b, bonus_rule=rule)


def build_mixed_device(game: Game, p, bonus="auto") -> ImplementationDevice:
    """Zero-cost device recommending independent draws from equilibrium ``p``.

    ``bonus`` selects the payment to an obedient player facing a disobedient
    opponent: ``"theorem"`` uses 2M+1 verbatim, ``"safe"`` the provable bound
    of :func:`safe_bonus`, ``"auto"`` (default) keeps 2M+1 whenever it
    certifiably suffices and otherwise switches to the safe bound. A number
    is used as given.
    """
    if not is_mixed_nash(game, p):
        raise PreconditionError("profile is not a mixed-strategy equilibrium")
    return _skeleton(game, product_distribution(game, p), bonus, None)


def build_correlated_device(game: Game, xi: Mapping, bonus="auto") -> ImplementationDevice:
    """Zero-cost device recommending draws from correlated equilibrium ``xi``."""
    xi = check_distribution(game, xi)
    if not is_correlated_eq(game, xi):
        raise PreconditionError("distribution is not a correlated equilibrium")
    return _skeleton(game, xi, bonus, None)


def induced_distribution(game: Game, device: ImplementationDevice, strategies=None) -> dict:
    """Exact outcome distribution when players follow ``strategies`` (default: obey)."""
    if strategies is None:
        _require_obedience(game, device)
        strategies = obedience(game)
    out = {}
    for s, q in device.h.items():
        x = tuple(strategies[i][s[i]] for i in range(game.n_players))
        out[x] = out.get(x, Fraction(0)) + q
    return dict(sorted(out.items()))


def simulate_device(game: Game, device: ImplementationDevice, strategies, seed: int,
                    rounds: int) -> SimulationResult:
    """Play the device ``rounds`` times with a seeded generator.

    Signal draws use float probabilities (sampling only); all accrued
    payoffs and payments are exact.
    """
    if rounds < 1:
        raise PreconditionError("rounds must be at least 1")
    support = list(device.h)
    probs = np.array([float(device.h[s]) for s in support])
    probs /= probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.choice(len(support), size=rounds, p=probs)
    n = game.n_players
    tally = np.bincount(draws, minlength=len(support))
    counts, pay, base = {}, [Fraction(0)] * n, [Fraction(0)] * n
    for k, c in enumerate(tally):
        if not c:
            continue
        s = support[k]
        x = tuple(int(strategies[i][s[i]]) for i in range(n))
        counts[x] = counts.get(x, 0) + int(c)
        for i in range(n):
            pay[i] += c * device.payment(i, s, x)
            base[i] += c * game.utility(i, x)
    return SimulationResult(rounds=rounds, counts=dict(sorted(counts.items())),
                            payments=tuple(pay), base_payoffs=tuple(base))
