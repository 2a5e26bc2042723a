import itertools
import random

import pytest
from hypothesis import given, settings

from kimpl.errors import PreconditionError, UnsupportedError
from kimpl.exact import difference_list, op_algorithm, penalty_constant, verify_exact
from kimpl.game import Game, PaymentScheme, dominates
from kimpl.implementation import (brute_force_set_price, build_singleton_implementation,
                                  singleton_price)

from .helpers import (check_e_monotone, game_m, game_mprime, games_with_profile, random_game,
                      random_rectangle)


def test_difference_lists():
    assert difference_list(game_m(), 0) == [0, 1, 2, 3, 4]
    assert max(difference_list(game_mprime(), 0)) == 11
    flat = Game([["a", "b"], ["c", "d"]], [[[2, 0]] * 2] * 2)
    assert difference_list(flat, 0) == [0]


def test_penalty_covers_negative_payoffs():
    g = Game([["a", "b"], ["c", "d"]], [[[-3, 1], [4, 0]], [[2, 2], [0, -1]]])
    assert penalty_constant(g) == 8


def test_op_on_m():
    m = game_m()
    rep = op_algorithm(m, [["f"], ["s"]])
    assert rep.worst_case_cost == 0 and rep.exact
    assert rep.surviving_profiles() == [(0, 1)]
    rep = op_algorithm(m, [["f"], ["f"]])
    assert (rep.metadata["e1"], rep.metadata["e2"]) == (1, 1)
    assert rep.worst_case_cost == 2 == singleton_price(m, ("f", "f"))
    assert rep.metadata["penalty"] == 5


def test_op_rejects_bad_targets():
    m = game_m()
    with pytest.raises(PreconditionError):
        op_algorithm(m, [["f", "s"], ["f"]])
    with pytest.raises(PreconditionError):
        op_algorithm(m, [[], ["f"]])
    with pytest.raises(PreconditionError):
        op_algorithm(m, [["f"]])
    with pytest.raises(UnsupportedError):
        op_algorithm(random_game(random.Random(2), n=3, k=3), [[0], [0], [0]])


def test_op_rejects_internal_dominance():
    g = Game([["a", "b", "c"], ["x", "y"]],
             [[[2, 0], [2, 0]], [[1, 0], [1, 0]], [[0, 0], [5, 0]]])
    assert dominates(g, 0, "a", "b")
    with pytest.raises(PreconditionError):
        op_algorithm(g, [["a", "b"], ["x"]])


def test_verify_exact_examples():
    m = game_m()
    assert verify_exact(m, op_algorithm(m, [["f"], ["s"]]).scheme, [["f"], ["s"]])
    assert verify_exact(m, build_singleton_implementation(m, ("s", "s")), [["s"], ["s"]])
    assert not verify_exact(m, PaymentScheme.zeros(m), [["f"], ["s"]])


def test_op_random_rectangles():
    rng = random.Random(11)
    done = 0
    while done < 60:
        g = random_game(rng, n=2, k=rng.randint(2, 4))
        target = random_rectangle(rng, g)
        if target is None:
            continue
        rep = op_algorithm(g, target)
        assert rep.exact and verify_exact(g, rep.scheme, target)
        assert rep.worst_case_cost == rep.metadata["e1"] + rep.metadata["e2"]
        block = list(itertools.product(*target))
        assert rep.worst_case_cost == max(rep.scheme.total(x) for x in block)
        check_e_monotone(g, target, rep)
        done += 1


@given(games_with_profile(max_players=2))
@settings(max_examples=80, deadline=None)
def test_op_singleton_cost_is_price(gz):
    g, z = gz
    rep = op_algorithm(g, [[z[0]], [z[1]]])
    assert rep.exact
    assert rep.worst_case_cost == singleton_price(g, z)


def test_oracle_not_above_op_when_witness_exact():
    rng = random.Random(5)
    compared = 0
    for _ in range(40):
        g = random_game(rng, n=2, k=3, lo=-2, hi=2)
        target = random_rectangle(rng, g)
        if target is None:
            continue
        rep = op_algorithm(g, target)
        res = brute_force_set_price(g, set(itertools.product(*target)))
        if res is not None and verify_exact(g, res.scheme, target):
            assert res.price <= rep.worst_case_cost
            compared += 1
    assert compared > 0
