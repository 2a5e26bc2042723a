import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kimpl.errors import InvalidProfileError, PreconditionError, UnsupportedError
from kimpl.game import Game, PaymentScheme, enumerate_pure_nash, is_pure_nash
from kimpl.implementation import verify_implementation
from kimpl.infoform import (InfoGame, check_uniform_payments, info_dominates,
                            is_expost_equilibrium, single_state, uniform_implementation_feasible)
from kimpl.io import fixture_path, parse_info

from .helpers import game_m, games_with_profile

FIG4_TARGET = [{"s1": "U", "t1": "D"}, {"s2": "L", "t2": "R"}]


def fig3():
    return parse_info(fixture_path("fig3.info").read_text())


def fig4():
    return parse_info(fixture_path("fig4.info").read_text())


def random_info(rng, n_signals=2, n_actions=2, lo=-5, hi=5):
    sigs = [[f"s{k}" for k in range(n_signals)] for _ in range(2)]
    acts = [[f"a{k}" for k in range(n_actions)] for _ in range(2)]
    payoffs = {}
    for s1 in range(n_signals):
        for s2 in range(n_signals):
            payoffs[(s1, s2)] = Game.from_function(
                acts, lambda x: (rng.randint(lo, hi), rng.randint(lo, hi)))
    return InfoGame(sigs, acts, payoffs)


def test_fig3_dominant_strategy():
    g = fig3()
    best = {"s1": "U1", "t1": "D2"}
    others = [b for b in g.all_strategies(0) if b != g.strategy(0, best)]
    assert len(others) == 3
    assert [info_dominates(g, 0, best, b) for b in others] == [True, True, True]
    assert not info_dominates(g, 0, best, best)
    assert not info_dominates(g, 0, {"s1": "D1", "t1": "U2"}, best)


def test_fig3_dominated_profile_is_not_expost():
    g = fig3()
    assert not is_expost_equilibrium(g, [{"s1": "D1", "t1": "U2"}, {"s2": "L1", "t2": "L2"}])


def test_fig3_actions_differ_per_signal():
    g = fig3()
    assert not g.shared_actions
    with pytest.raises(UnsupportedError):
        uniform_implementation_feasible(g, [{"s1": "U1", "t1": "D2"}, {"s2": "L1", "t2": "L2"}])


def test_fig4_expost_equilibrium():
    g = fig4()
    assert is_expost_equilibrium(g, FIG4_TARGET)
    assert not is_expost_equilibrium(g, [{"s1": "D", "t1": "D"}, {"s2": "L", "t2": "R"}])


def test_fig4_is_infeasible_with_cycle():
    res = uniform_implementation_feasible(fig4(), FIG4_TARGET)
    assert not res.feasible and res.payments is None
    first, second = res.certificate
    assert (first.state, first.keep, first.alt, first.payoffs, first.bound) == \
        (("s1", "t2"), 0, 1, (0, 7), 7)
    assert (second.state, second.keep, second.alt, second.payoffs, second.bound) == \
        (("t1", "t2"), 1, 0, (4, 5), 1)
    assert first.opp == second.opp == (None, 0)   # both against L
    assert res.cycle_total == 8 == sum(c.bound for c in res.certificate)


def test_single_state_m():
    g = single_state(game_m())
    assert is_expost_equilibrium(g, [["f"], ["s"]])
    # each player's deviation gain of 1 against f, plus slack 1
    ok, pay = uniform_implementation_feasible(g, [["f"], ["f"]])
    assert ok
    assert pay[0][(0, 0)] == 2 and pay[0][(1, 0)] == 0
    assert pay[1][(0, 0)] == 2 and pay[1][(0, 1)] == 0
    # target (f, s): player 2 needs 4 to prefer s against s
    ok, pay = uniform_implementation_feasible(g, [["f"], ["s"]])
    assert ok
    assert pay[0][(0, 0)] == 2 and pay[1][(1, 1)] == 4
    assert check_uniform_payments(g, [["f"], ["s"]], pay)


def test_already_dominant_needs_nothing():
    pd = Game([["c", "d"], ["c", "d"]], [[[3, 3], [0, 5]], [[5, 0], [1, 1]]])
    g = InfoGame([["x", "y"], ["x"]], [["c", "d"], ["c", "d"]],
                 {(0, 0): pd, (1, 0): pd})
    ok, pay = uniform_implementation_feasible(g, [["d", "d"], ["d"]])
    assert ok
    assert all(a == 0 for table in pay.values() for a in table.values())


def test_strategy_validation():
    g = fig4()
    with pytest.raises(InvalidProfileError):
        g.strategy(0, {"s1": "U"})
    with pytest.raises(InvalidProfileError):
        g.strategy(0, ["U", "Q"])
    with pytest.raises(InvalidProfileError):
        g.strategy(0, ["U"])
    with pytest.raises(PreconditionError):
        uniform_implementation_feasible(g, FIG4_TARGET, epsilon=0)


def test_witness_is_shifted_to_zero():
    rng = random.Random(4)
    seen = 0
    while seen < 10:
        g = random_info(rng)
        target = [tuple(rng.randrange(2) for _ in range(2)) for _ in range(2)]
        res = uniform_implementation_feasible(g, target)
        if not res.feasible:
            continue
        seen += 1
        for i, table in res.payments.items():
            assert min(table.values()) == 0
            assert all(v >= 0 for v in table.values())


# -- properties ------------------------------------------------------------

@given(games_with_profile(max_players=2))
@settings(max_examples=60, deadline=None)
def test_single_signal_always_feasible(gz):
    game, z = gz
    g = single_state(game)
    res = uniform_implementation_feasible(g, [[a] for a in z])
    assert res.feasible
    v = PaymentScheme.from_entries(game, {(i, x): a for i, t in res.payments.items()
                                          for x, a in t.items()})
    rep = verify_implementation(game, v, {z})
    assert rep.surviving_profiles() == [z]


@given(st.randoms(use_true_random=False), st.data())
@settings(max_examples=60, deadline=None)
def test_per_state_constant_shift(rng, data):
    g = random_info(rng)
    target = [tuple(rng.randrange(2) for _ in range(2)) for _ in range(2)]
    shifted = {}
    for sig, game in g.states.items():
        c = (data.draw(st.integers(-6, 6)), data.draw(st.integers(-6, 6)))
        shifted[sig] = Game.from_function(
            [list(s) for s in game.strategies],
            lambda x: tuple(game.utility(i, x) + c[i] for i in range(2)))
    h = InfoGame(g.signals, [list(a[0]) for a in g.actions], shifted)
    assert uniform_implementation_feasible(g, target).feasible == \
        uniform_implementation_feasible(h, target).feasible


@given(st.randoms(use_true_random=False), st.sampled_from([F(1, 3), 1, 2]))
@settings(max_examples=80, deadline=None)
def test_results_recheck(rng, eps):
    g = random_info(rng, n_actions=rng.choice([2, 3]))
    target = [tuple(rng.randrange(len(g.actions[i][0])) for _ in range(2)) for i in range(2)]
    res = uniform_implementation_feasible(g, target, epsilon=eps)
    if res.feasible:
        assert check_uniform_payments(g, target, res.payments)
    elif res.certificate:
        assert res.cycle_total > 0
        assert res.cycle_total == sum(c.bound for c in res.certificate)
        # consecutive constraints chain keep -> alt around a closed loop
        cyc = res.certificate
        assert all(cyc[k].alt == cyc[(k + 1) % len(cyc)].keep for k in range(len(cyc)))
        assert len({c.opp for c in cyc}) == 1


def test_expost_matches_pure_nash_on_single_state():
    game = game_m()
    g = single_state(game)
    for z in game.profiles():
        assert is_expost_equilibrium(g, [[z[0]], [z[1]]]) == is_pure_nash(game, z)
    assert len(enumerate_pure_nash(game)) == 2
