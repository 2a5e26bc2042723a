"""Random instances and independent reference computations for the tests.

The reference functions work straight off the payoff tensor with plain
loops, sharing no code with the library's dominance kernels or equilibrium
checks.
"""
import itertools
import random
from fractions import Fraction

from hypothesis import strategies as st

from kimpl.errors import PreconditionError
from kimpl.exact import difference_list, op_feasible, op_scheme, rectangular_target
from kimpl.game import Game, non_dominated, with_payments
from kimpl.io import fixture_path
from kimpl.vcg import Valuation

M_PAYOFFS = [[[3, 3], [6, 4]], [[4, 6], [2, 2]]]
MPRIME_PAYOFFS = [[[13, 3], [6, 4]], [[4, 6], [2, 12]]]
FS = [["f", "s"], ["f", "s"]]


def game_m():
    return Game(FS, M_PAYOFFS)


def game_mprime():
    return Game(FS, MPRIME_PAYOFFS)


def random_game(rng: random.Random, n=None, k=None, lo=-5, hi=5) -> Game:
    n = n or rng.randint(2, 3)
    sizes = [k or rng.randint(2, 3) for _ in range(n)]
    labels = [[f"a{j}" for j in range(s)] for s in sizes]
    return Game.from_function(labels, lambda x: tuple(rng.randint(lo, hi) for _ in range(n)))


@st.composite
def games(draw, min_players=2, max_players=3, min_k=2, max_k=3, lo=-5, hi=5):
    n = draw(st.integers(min_players, max_players))
    sizes = [draw(st.integers(min_k, max_k)) for _ in range(n)]
    cells = list(itertools.product(*(range(s) for s in sizes)))
    values = draw(st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n),
                           min_size=len(cells), max_size=len(cells)))
    table = dict(zip(cells, values))
    labels = [[f"a{j}" for j in range(s)] for s in sizes]
    return Game.from_function(labels, lambda x: table[tuple(x)])


@st.composite
def games_with_profile(draw, **kw):
    g = draw(games(**kw))
    z = tuple(draw(st.integers(0, k - 1)) for k in g.shape)
    return g, z


def u(game, i, x):
    return game.payoff_tensor[tuple(x) + (i,)]


def naive_dominates(game, i, a, b) -> bool:
    others = [range(k) if j != i else [None] for j, k in enumerate(game.shape)]
    ge, gt = True, False
    for opp in itertools.product(*others):
        xa = tuple(a if j == i else opp[j] for j in range(game.n_players))
        xb = tuple(b if j == i else opp[j] for j in range(game.n_players))
        ge &= u(game, i, xa) >= u(game, i, xb)
        gt |= u(game, i, xa) > u(game, i, xb)
    return ge and gt


def naive_non_dominated(game, i) -> tuple:
    k = game.shape[i]
    return tuple(b for b in range(k) if not any(naive_dominates(game, i, a, b) for a in range(k)))


def naive_price(game, z) -> Fraction:
    total = Fraction(0)
    for i in range(game.n_players):
        here = u(game, i, z)
        best = max(u(game, i, z[:i] + (x,) + z[i + 1:]) for x in range(game.shape[i]))
        total += best - here
    return total


def naive_expected(game, p, i, fixed=None) -> Fraction:
    """Expected payoff of player i under p, optionally with i playing ``fixed``."""
    total = Fraction(0)
    for x in itertools.product(*(range(k) for k in game.shape)):
        w = Fraction(1)
        for j, xj in enumerate(x):
            if j == i and fixed is not None:
                w *= 1 if xj == fixed else 0
            else:
                w *= Fraction(p[j][xj])
        if w:
            total += w * u(game, i, x)
    return total


def naive_is_mixed_nash(game, p) -> bool:
    for i in range(game.n_players):
        value = naive_expected(game, p, i)
        if any(naive_expected(game, p, i, a) > value for a in range(game.shape[i])):
            return False
    return True


def random_mixed(rng, game):
    out = []
    for k in game.shape:
        w = [rng.randint(0, 3) for _ in range(k)]
        if not sum(w):
            w[rng.randrange(k)] = 1
        out.append(tuple(Fraction(x, sum(w)) for x in w))
    return tuple(out)


def random_rectangle(rng, g):
    """A valid rectangular target for g, or None if the draw hits internal dominance."""
    sets = []
    for k in g.shape:
        sets.append(sorted(rng.sample(range(k), rng.randint(1, k - 1))))
    try:
        return rectangular_target(g, sets)
    except PreconditionError:
        return None


def check_e_monotone(g, target, rep):
    """Every listed e below the chosen one fails; from it upward the target survives."""
    for player, chosen in ((0, rep.metadata["e1"]), (1, rep.metadata["e2"])):
        for e in difference_list(g, player):
            es = [0, 0]
            es[player] = e
            survivors = non_dominated(with_payments(g, op_scheme(g, target, *es)), player)
            if e < chosen:
                assert not op_feasible(g, target, player, e)
            else:
                assert set(target[player]) <= set(survivors)
        assert op_feasible(g, target, player, chosen)


VALUE_GRID = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)]


def random_valuation(goods, rng, grid=VALUE_GRID):
    """Monotone valuation with every bundle value on ``grid``."""
    vals = [Fraction(0)]
    for b in range(1, 1 << len(goods)):
        floor = max(vals[b ^ 1 << k] for k in range(len(goods)) if b >> k & 1)
        vals.append(max(floor, rng.choice(grid)))
    return Valuation(goods, tuple(vals))


def fx(name):
    return str(fixture_path(name))


# one invocation of every command, used for the determinism checks
CLI_COMMANDS = [
    ["analyze", fx("m.game"), "--scheme", fx("m_scheme.json"), "--target", "f,s;s,f",
     "--compare", fx("mprime.game")],
    ["price", fx("m.game"), "--profile", "f,f"],
    ["implement", fx("m.game"), "--profile", "s,s", "--epsilon", "1/2"],
    ["exact", fx("m.game"), "--rect", "f;f"],
    ["brute", fx("m.game"), "--target", "f,s;s,f"],
    ["device-build", fx("m.game"), "--mixed", "0.8,0.2;0.8,0.2"],
    ["device-sim", fx("m.game"), "--dist", "f,s=1/2;s,f=1/2", "--seed", "7", "--rounds", "10000"],
    ["corr-check", fx("m.game"), "--dist", "f,s=1/2;s,f=1/2"],
    ["info-check", fx("fig4.info"), "--target", "s1:U,t1:D;s2:L,t2:R"],
    ["vcg-run", fx("counterexample53.auction")],
    ["vcg-run", fx("vickrey.auction")],
    ["sat-gadget", fx("sat.cnf"), "--assignment", "TF"],
    ["sat-gadget", fx("unsat.cnf"), "--all-assignments"],
]
