import itertools
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kimpl.errors import BudgetExceededError, HypothesisViolation, PreconditionError
from kimpl.game import Game, PaymentScheme, is_pure_nash
from kimpl.implementation import (brute_force_set_price, build_singleton_implementation,
                                  default_grid, singleton_price, verify_implementation)

from .helpers import game_m, games_with_profile, naive_price, random_game


def test_singleton_prices_on_m():
    m = game_m()
    assert singleton_price(m, ("f", "s")) == 0
    assert singleton_price(m, ("f", "f")) == 2
    assert singleton_price(m, ("s", "s")) == 8


def test_singleton_price_needs_two_strategies():
    g = Game([["a"], ["x", "y"]], [[[0, 0], [0, 1]]])
    with pytest.raises(HypothesisViolation):
        singleton_price(g, (0, 0))


def test_construction_on_m():
    m = game_m()
    v = build_singleton_implementation(m, ("f", "f"))
    assert v.amount(0, (0, 0)) == 1
    assert v.amount(0, (0, 1)) == 1
    assert v.amount(0, (1, 0)) == 0
    rep = verify_implementation(m, v, {("f", "f")})
    assert rep.target_contained
    assert rep.surviving_profiles() == [(0, 0)]
    assert rep.worst_case_cost == 2


def test_construction_rejects_nonpositive_epsilon():
    with pytest.raises(PreconditionError):
        build_singleton_implementation(game_m(), (0, 0), epsilon=0)


def test_verify_examples():
    m = game_m()
    v = PaymentScheme.from_entries(m, {(0, (0, 0)): 10, (1, (1, 1)): 10})
    rep = verify_implementation(m, v, {("f", "s"), ("s", "f")})
    assert rep.target_contained and rep.worst_case_cost == 0
    assert not verify_implementation(m, PaymentScheme.zeros(m), {("f", "s")}).target_contained
    full = verify_implementation(m, PaymentScheme.zeros(m), set(m.profiles()))
    assert full.target_contained and full.worst_case_cost == 0


def test_default_grid_on_m():
    assert default_grid(game_m(), 0) == [0, 1, 2, 3, 4, 5]


def test_brute_force_examples():
    m = game_m()
    res = brute_force_set_price(m, {("f", "f")})
    assert res.price == 2
    assert res.report.target_contained
    full = brute_force_set_price(m, set(m.profiles()))
    assert full.price == 0
    assert all(a == 0 for a in full.scheme.tensor.flat)


def test_brute_force_set_target():
    m = game_m()
    res = brute_force_set_price(m, {("f", "s"), ("s", "f")})
    assert res.price == 0
    assert verify_implementation(m, res.scheme, {("f", "s"), ("s", "f")}).target_contained


def test_brute_force_reports_empty_grid_failure():
    # a zero-only grid cannot move anything in M
    assert brute_force_set_price(game_m(), {("f", "f")}, value_grid=[0]) is None


def test_brute_force_budget_guard():
    g = random_game(random.Random(1), n=3, k=3)
    with pytest.raises(BudgetExceededError) as err:
        brute_force_set_price(g, set(itertools.islice(g.profiles(), 3)), cap=10)
    assert err.value.estimate > 10
    with pytest.raises(PreconditionError):
        brute_force_set_price(game_m(), {(0, 0)}, value_grid=[-1, 0])


# -- properties ------------------------------------------------------------

@given(games_with_profile())
@settings(max_examples=150, deadline=None)
def test_price_zero_iff_pure_nash(gz):
    g, z = gz
    assert (singleton_price(g, z) == 0) == is_pure_nash(g, z)
    assert singleton_price(g, z) == naive_price(g, z)


@given(games_with_profile(), st.fractions(min_value=F(1, 100), max_value=10))
@settings(max_examples=120, deadline=None)
def test_construction_always_verifies(gz, eps):
    g, z = gz
    v = build_singleton_implementation(g, z, epsilon=eps)
    rep = verify_implementation(g, v, {z})
    assert rep.surviving_profiles() == [z]
    assert rep.worst_case_cost == singleton_price(g, z)
    assert all(a >= 0 for a in v.tensor.flat)


@given(games_with_profile(), st.data())
@settings(max_examples=120, deadline=None)
def test_price_ignores_column_shifts(gz, data):
    g, z = gz
    tensor = np.array(g.payoff_tensor, dtype=object)
    for i in range(g.n_players):
        shifts = {}
        for x in g.profiles():
            opp = x[:i] + x[i + 1:]
            shifts.setdefault(opp, data.draw(st.integers(-9, 9)))
            tensor[x + (i,)] += shifts[opp]
    assert singleton_price(g.replace_payoffs(tensor), z) == singleton_price(g, z)


@given(games_with_profile(max_players=2))
@settings(max_examples=60, deadline=None)
def test_brute_force_matches_singleton_price(gz):
    g, z = gz
    res = brute_force_set_price(g, {z})
    assert res is not None and res.price == singleton_price(g, z)
    assert res.report.surviving_profiles() == [z]
