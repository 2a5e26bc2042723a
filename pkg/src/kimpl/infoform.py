"""Prior-free incomplete-information games: one strategic game per signal profile.

Each player privately knows its own signal; payoffs depend on the whole
signal profile. A strategy maps each of a player's signals to an action
available at that signal. When every signal offers the same actions, an
outside party observing actions only must pay the same amounts in every
state, which can make an ex-post equilibrium impossible to enforce.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from ._rational import to_fraction
from .errors import InvalidProfileError, PreconditionError, UnsupportedError
from .game import Game, is_pure_nash

__all__ = ["InfoGame", "Constraint", "UniformResult", "is_expost_equilibrium",
           "info_dominates", "uniform_implementation_feasible", "check_uniform_payments",
           "single_state"]


class InfoGame:
    """Signal sets, per-signal action sets and one payoff tensor per signal profile.

    ``actions[i][k]`` lists player i's actions at its k-th signal. ``states``
    maps each signal-index profile to a :class:`Game` whose strategies are
    the actions available at those signals.
    """

    def __init__(self, signals, actions, payoffs):
        self.signals = tuple(tuple(str(s) for s in row) for row in signals)
        n = len(self.signals)
        if n < 1 or any(not row for row in self.signals):
            raise PreconditionError("every player needs at least one signal")
        for i, row in enumerate(self.signals):
            if len(set(row)) != len(row):
                raise PreconditionError(f"player {i + 1} has repeated signal labels")
        if len(actions) != n:
            raise PreconditionError("need one action specification per player")
        acts = []
        for i, spec in enumerate(actions):
            if isinstance(spec, dict):
                missing = [s for s in self.signals[i] if s not in spec]
                if missing:
                    raise PreconditionError(f"player {i + 1}: no actions for signals {missing}")
                acts.append(tuple(tuple(str(a) for a in spec[s]) for s in self.signals[i]))
            else:
                shared = tuple(str(a) for a in spec)
                acts.append(tuple(shared for _ in self.signals[i]))
        self.actions = tuple(acts)
        self.n_players = n
        self.states = {}
        for sig in itertools.product(*(range(len(r)) for r in self.signals)):
            try:
                table = payoffs[sig]
            except KeyError:
                raise PreconditionError(f"no payoffs for signal profile {self.signal_labels(sig)}") \
                    from None
            strategies = [self.actions[i][sig[i]] for i in range(n)]
            self.states[sig] = table if isinstance(table, Game) else Game(strategies, table)
            if self.states[sig].strategies != tuple(strategies):
                raise PreconditionError("state game strategies differ from the action sets")
        extra = set(payoffs) - set(self.states)
        if extra:
            raise PreconditionError(f"payoffs given for unknown signal profiles {sorted(extra)}")

    @property
    def shared_actions(self) -> bool:
        return all(len(set(row)) == 1 for row in self.actions)

    def signal_index(self, player: int, signal) -> int:
        if isinstance(signal, int) and not isinstance(signal, bool):
            if not 0 <= signal < len(self.signals[player]):
                raise InvalidProfileError(f"player {player + 1} has no signal #{signal}")
            return signal
        try:
            return self.signals[player].index(str(signal))
        except ValueError:
            raise InvalidProfileError(f"player {player + 1} has no signal {signal!r}") from None

    def signal_labels(self, sig) -> tuple:
        return tuple(self.signals[i][k] for i, k in enumerate(sig))

    def signal_profiles(self):
        return list(self.states)

    def state(self, sig) -> Game:
        sig = tuple(self.signal_index(i, s) for i, s in enumerate(sig))
        return self.states[sig]

    def strategy(self, player: int, spec) -> tuple:
        """Normalize a map (signal -> action) or a per-signal sequence to action indices."""
        sigs = self.signals[player]
        if isinstance(spec, dict):
            items = {self.signal_index(player, s): a for s, a in spec.items()}
            missing = [sigs[k] for k in range(len(sigs)) if k not in items]
            if missing:
                raise InvalidProfileError(f"player {player + 1}: no action for signals {missing}")
            seq = [items[k] for k in range(len(sigs))]
        else:
            seq = list(spec)
            if len(seq) != len(sigs):
                raise InvalidProfileError(
                    f"player {player + 1}: {len(seq)} actions for {len(sigs)} signals")
        out = []
        for k, a in enumerate(seq):
            avail = self.actions[player][k]
            if isinstance(a, int) and not isinstance(a, bool):
                if not 0 <= a < len(avail):
                    raise InvalidProfileError(f"player {player + 1}: no action #{a} at {sigs[k]}")
                out.append(a)
            else:
                try:
                    out.append(avail.index(str(a)))
                except ValueError:
                    raise InvalidProfileError(
                        f"player {player + 1}: action {a!r} unavailable at signal {sigs[k]}") \
                        from None
        return tuple(out)

    def strategy_profile(self, specs) -> tuple:
        if len(specs) != self.n_players:
            raise InvalidProfileError("need one strategy per player")
        return tuple(self.strategy(i, s) for i, s in enumerate(specs))

    def strategy_labels(self, player: int, b) -> dict:
        return {self.signals[player][k]: self.actions[player][k][a] for k, a in enumerate(b)}

    def all_strategies(self, player: int) -> list:
        return list(itertools.product(*(range(len(a)) for a in self.actions[player])))


def single_state(game: Game) -> InfoGame:
    """Wrap a strategic game as an informational-form game with one signal per player."""
    n = game.n_players
    return InfoGame([["*"]] * n, [list(game.strategies[i]) for i in range(n)],
                    {(0,) * n: game})


def is_expost_equilibrium(g: InfoGame, b) -> bool:
    """Nash equilibrium in every state game for the actions the strategies induce."""
    b = g.strategy_profile(b)
    return all(is_pure_nash(game, tuple(b[i][sig[i]] for i in range(g.n_players)))
               for sig, game in g.states.items())


def info_dominates(g: InfoGame, player: int, b, b_alt) -> bool:
    """Weak dominance of strategy ``b`` over ``b_alt`` for ``player``.

    Compared at every own signal, opponents' signal profile and opponents'
    action profile, with at least one strict comparison.
    """
    b, b_alt = g.strategy(player, b), g.strategy(player, b_alt)
    strict = False
    for sig, game in g.states.items():
        a, a2 = b[sig[player]], b_alt[sig[player]]
        for opp in game.opponent_profiles(player):
            u = game.utility(player, opp[:player] + (a,) + opp[player + 1:])
            u2 = game.utility(player, opp[:player] + (a2,) + opp[player + 1:])
            if u < u2:
                return False
            strict |= u > u2
    return strict


@dataclass(frozen=True)
class Constraint:
    """``V[player](keep, opp) - V[player](alt, opp) >= bound`` (``+ slack`` when strict).

    ``state`` names the signal profile that attains the bound, and
    ``payoffs`` the payoffs there: (U(keep), U(alt)).
    """
    player: int
    opp: tuple  # opponents' action profile, None at ``player``
    keep: int
    alt: int
    bound: Fraction
    state: tuple
    payoffs: tuple
    strict: bool = False


@dataclass(frozen=True)
class UniformResult:
    feasible: bool
    payments: dict | None = None  # player -> {action profile: amount}
    certificate: tuple = ()  # constraints along a positive cycle
    cycle_total: Fraction | None = None
    epsilon: Fraction = Fraction(1)
    notes: tuple = field(default_factory=tuple)

    def __iter__(self):
        # allows ``ok, witness = uniform_implementation_feasible(...)``
        return iter((self.feasible, self.payments))


def _constraints(g: InfoGame, player: int, target) -> dict:
    """Difference constraints per opponents' action profile for one player."""
    actions = g.actions[player][0]
    opp_actions = [range(len(g.actions[j][0])) if j != player else [None]
                   for j in range(g.n_players)]
    out = {}
    for opp in itertools.product(*opp_actions):
        rows = []
        for k in range(len(g.signals[player])):
            keep = target[player][k]
            for alt in range(len(actions)):
                if alt == keep:
                    continue
                best = None
                for sig, game in g.states.items():
                    if sig[player] != k:
                        continue
                    u_keep = game.utility(player, opp[:player] + (keep,) + opp[player + 1:])
                    u_alt = game.utility(player, opp[:player] + (alt,) + opp[player + 1:])
                    if best is None or u_alt - u_keep > best[0]:
                        best = (u_alt - u_keep, sig, (u_keep, u_alt))
                rows.append(Constraint(player, opp, keep, alt, best[0], g.signal_labels(best[1]),
                                       best[2]))
        out[opp] = rows
    return out


def _strict_candidates(g, player, k, keep, alt, opp):
    """Slack needed for a strict win of ``keep`` over ``alt`` somewhere at this column."""
    best = None
    for sig, game in g.states.items():
        if sig[player] != k:
            continue
        u_keep = game.utility(player, opp[:player] + (keep,) + opp[player + 1:])
        u_alt = game.utility(player, opp[:player] + (alt,) + opp[player + 1:])
        if best is None or u_alt - u_keep < best[0]:
            best = (u_alt - u_keep, sig, (u_keep, u_alt))
    return best


def _bellman_ford(n_nodes, rows, eps):
    """Solve ``V[keep] - V[alt] >= bound`` (+eps if strict); returns (potentials, cycle)."""
    # as shortest paths: V[alt] <= V[keep] - bound, an edge keep -> alt of weight -bound
    edges = [(c.keep, c.alt, -(c.bound + (eps if c.strict else 0)), c) for c in rows]
    dist = [Fraction(0)] * n_nodes
    pred = [None] * n_nodes
    last = None
    for _ in range(n_nodes):
        last = None
        for u, v, w, c in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                pred[v] = (u, c)
                last = v
        if last is None:
            return dist, None
    # walk back n steps to land on the cycle, then collect it
    v = last
    for _ in range(n_nodes):
        v = pred[v][0]
    cycle, u = [], v
    while True:
        p, c = pred[u]
        cycle.append(c)
        u = p
        if u == v:
            break
    cycle.reverse()
    return None, tuple(cycle)


def _assign_strictness(g, player, target, columns, eps):
    """Pick one column per (signal, alternative) for a strict win, by backtracking."""
    n_nodes = len(g.actions[player][0])
    items = [(k, target[player][k], alt) for k in range(len(g.signals[player]))
             for alt in range(n_nodes) if alt != target[player][k]]
    extra = {opp: [] for opp in columns}
    chosen = []

    def feasible(opp):
        dist, _ = _bellman_ford(n_nodes, columns[opp] + extra[opp], eps)
        return dist is not None

    def place(idx):
        if idx == len(items):
            return True
        k, keep, alt = items[idx]
        for opp in columns:
            bound, sig, pay = _strict_candidates(g, player, k, keep, alt, opp)
            c = Constraint(player, opp, keep, alt, bound, g.signal_labels(sig), pay, strict=True)
            extra[opp].append(c)
            if feasible(opp):
                chosen.append(c)
                if place(idx + 1):
                    return True
                chosen.pop()
            extra[opp].pop()
        return False

    return extra if place(0) else None


def uniform_implementation_feasible(g: InfoGame, target, epsilon=1) -> UniformResult:
    """Can signal-independent payments make ``target`` dominant at every signal?

    Payments V_i depend only on the action profile. For each opponents'
    action profile the requirements are difference constraints between a
    player's own actions; they are solvable exactly when the constraint
    graph has no positive cycle. When the weak system is infeasible the
    result carries such a cycle as certificate. Otherwise every (signal,
    alternative) pair also needs one strict win; this is sought with slack
    ``epsilon`` on one constraint each. Payments are shifted to be
    non-negative, with the lowest amount in each column equal to 0.

    The result unpacks as ``(feasible, payments)``.
    """
    if not g.shared_actions:
        raise UnsupportedError("uniform payments need the same actions at every signal")
    eps = to_fraction(epsilon)
    if eps <= 0:
        raise PreconditionError("epsilon must be positive")
    target = g.strategy_profile(target)
    per_player = [_constraints(g, i, target) for i in range(g.n_players)]
    for i, columns in enumerate(per_player):
        n_nodes = len(g.actions[i][0])
        for opp, rows in columns.items():
            _, cycle = _bellman_ford(n_nodes, rows, eps)
            if cycle is not None:
                return UniformResult(False, certificate=cycle,
                                     cycle_total=sum((c.bound for c in cycle), Fraction(0)),
                                     epsilon=eps)
    payments = {}
    notes = []
    for i, columns in enumerate(per_player):
        n_nodes = len(g.actions[i][0])
        extra = _assign_strictness(g, i, target, columns, eps)
        if extra is None:
            return UniformResult(False, epsilon=eps, notes=(
                f"player {i + 1}: weak constraints hold but no choice of strict wins "
                f"with slack {eps} is consistent",))
        table = {}
        for opp, rows in columns.items():
            dist, _ = _bellman_ford(n_nodes, rows + extra[opp], eps)
            low = min(dist)
            for a in range(n_nodes):
                table[opp[:i] + (a,) + opp[i + 1:]] = dist[a] - low
        payments[i] = dict(sorted(table.items()))
    result = UniformResult(True, payments=payments, epsilon=eps, notes=tuple(notes))
    if not check_uniform_payments(g, target, payments):
        raise AssertionError("uniform payment witness failed re-verification")
    return result


def check_uniform_payments(g: InfoGame, target, payments) -> bool:
    """Direct re-check: with ``payments`` added in every state, the target
    action at each signal dominates every other action available there."""
    target = g.strategy_profile(target)
    for i in range(g.n_players):
        for k in range(len(g.signals[i])):
            keep = target[i][k]
            for alt in range(len(g.actions[i][k])):
                if alt == keep:
                    continue
                strict = False
                for sig, game in g.states.items():
                    if sig[i] != k:
                        continue
                    for opp in game.opponent_profiles(i):
                        xk = opp[:i] + (keep,) + opp[i + 1:]
                        xa = opp[:i] + (alt,) + opp[i + 1:]
                        uk = game.utility(i, xk) + payments[i].get(xk, Fraction(0))
                        ua = game.utility(i, xa) + payments[i].get(xa, Fraction(0))
                        if uk < ua:
                            return False
                        strict |= uk > ua
                if not strict:
                    return False
    return True
