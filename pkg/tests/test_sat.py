import itertools
import random

import pytest

from kimpl.errors import FormatError, PreconditionError
from kimpl.game import payoff
from kimpl.implementation import verify_implementation
from kimpl.io import fixture_path
from kimpl.sat import CnfFormula, assignment_scheme, parse_dimacs, sat_gadget, to_dimacs

XOR = CnfFormula(2, ((1, 2), (-1, -2)))
ALL_FOUR = CnfFormula(2, ((1, 2), (1, -2), (-1, 2), (-1, -2)))


def pay(g, player, labels):
    return payoff(g, labels)[player]


def test_parse_fixtures():
    assert parse_dimacs(fixture_path("sat.cnf").read_text()) == XOR
    assert parse_dimacs(fixture_path("unsat.cnf").read_text()) == ALL_FOUR
    assert parse_dimacs(to_dimacs(ALL_FOUR)) == ALL_FOUR


def test_parse_multiline_clause():
    assert parse_dimacs("p cnf 2 1\n1\n-2 0\n") == CnfFormula(2, ((1, -2),))


@pytest.mark.parametrize("text, where", [
    ("1 2 0\n", "line 1"),
    ("p cnf x 1\n1 0\n", "line 1"),
    ("p cnf 2 1\n1 q 0\n", "line 2"),
    ("p dnf 2 1\n", "line 1"),
])
def test_parse_errors_have_positions(text, where):
    with pytest.raises(FormatError) as err:
        parse_dimacs(text)
    assert where in str(err.value)


def test_parse_clause_count_mismatch():
    with pytest.raises(FormatError):
        parse_dimacs("p cnf 2 3\n1 2 0\n")
    with pytest.raises(FormatError):
        parse_dimacs("c only a comment\n")


@pytest.mark.parametrize("formula", [
    CnfFormula(2, ((1,), (-1, 2))),            # unit clause
    CnfFormula(2, ((1, 2), (-1, 2))),          # x2 never negative
    CnfFormula(2, ((1, -1), (2, -2))),         # complementary pair
    CnfFormula(2, ((1, 3), (-1, -2))),         # unknown variable
    CnfFormula(1, ()),
])
def test_gadget_preconditions(formula):
    with pytest.raises(PreconditionError):
        sat_gadget(formula)


def test_gadget_payoffs():
    g, target = sat_gadget(XOR)
    assert g.shape == (6, 6)
    assert g.strategies[0] == ("c1", "c2", "y1", "y2", "z1", "z2")
    assert pay(g, 0, ("c1", "y1")) == 3       # x1 in clause 1
    assert pay(g, 0, ("c1", "z1")) == 0
    assert pay(g, 0, ("c2", "z2")) == 3
    assert pay(g, 0, ("c1", "c1")) == 50
    assert pay(g, 0, ("c1", "c2")) == 0
    assert pay(g, 0, ("y1", "c1")) == 51
    assert pay(g, 0, ("y1", "y1")) == 2
    assert pay(g, 0, ("y1", "y2")) == 3
    assert pay(g, 0, ("y1", "z1")) == 1
    assert pay(g, 0, ("y1", "z2")) == 3
    assert pay(g, 1, ("y1", "y1")) == 101
    assert pay(g, 1, ("z2", "z2")) == 101
    assert pay(g, 1, ("y1", "z1")) == 100
    assert pay(g, 1, ("y1", "y2")) == 0
    assert pay(g, 1, ("c1", "c1")) == 50
    assert pay(g, 1, ("y1", "c1")) == 50
    assert pay(g, 1, ("c1", "y1")) == 0
    idx = g.strategy_index
    assert (idx(0, "y1"), idx(1, "y1")) in target
    assert (idx(0, "y1"), idx(1, "z1")) not in target
    assert (idx(0, "c1"), idx(1, "y1")) not in target
    assert len(target) == 4 * 6 - 4


def test_satisfying_assignment_is_two_implementation():
    g, target = sat_gadget(XOR)
    rep = verify_implementation(g, assignment_scheme(XOR, [True, False], g), target)
    assert rep.target_contained and rep.worst_case_cost <= 2


def test_falsifying_assignment_fails():
    g, target = sat_gadget(XOR)
    rep = verify_implementation(g, assignment_scheme(XOR, [True, True], g), target)
    assert not (rep.target_contained and rep.worst_case_cost <= 2)


def test_unsatisfiable_formula_no_assignment_works():
    g, target = sat_gadget(ALL_FOUR)
    for bits in itertools.product([False, True], repeat=2):
        rep = verify_implementation(g, assignment_scheme(ALL_FOUR, bits, g), target)
        assert not (rep.target_contained and rep.worst_case_cost <= 2)


def test_assignment_size_checked():
    with pytest.raises(PreconditionError):
        assignment_scheme(XOR, [True])
    g, _ = sat_gadget(ALL_FOUR)
    other = CnfFormula(3, ((1, 2, 3), (-1, -2, -3), (1, -2)))  # 9x9 gadget
    with pytest.raises(PreconditionError):
        assignment_scheme(other, [True, True, True], g)


def random_formula(rng):
    """Random formula meeting the gadget's shape requirements."""
    while True:
        n = rng.randint(2, 3)
        m = rng.randint(2, 4)
        clauses = []
        for _ in range(m):
            vars_ = rng.sample(range(1, n + 1), rng.randint(2, n))
            clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vars_))
        f = CnfFormula(n, tuple(clauses))
        try:
            return f.validate()
        except PreconditionError:
            continue


def test_random_formulas_assignments_match_satisfaction():
    rng = random.Random(3)
    for _ in range(25):
        f = random_formula(rng)
        g, target = sat_gadget(f)
        for bits in itertools.product([False, True], repeat=f.variable_count):
            rep = verify_implementation(g, assignment_scheme(f, bits, g), target)
            works = rep.target_contained and rep.worst_case_cost <= 2
            assert works == f.satisfied_by(bits)
