"""Reduction from CNF satisfiability to 2-implementation in a two-player game.

Both players get one strategy per clause (``c1..cm``) and two per variable
(``y1..yn`` for the positive literal, ``z1..zn`` for the negative one). A
satisfying assignment yields a scheme that costs at most 2 on every
surviving profile; conversely a 2-implementation encodes an assignment.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import FormatError, PreconditionError
from .game import Game, PaymentScheme

__all__ = ["CnfFormula", "parse_dimacs", "to_dimacs", "sat_gadget", "assignment_scheme",
           "gadget_target"]


@dataclass(frozen=True)
class CnfFormula:
    variable_count: int
    clauses: tuple  # tuple of tuples of non-zero ints, DIMACS style

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(int(l) for l in c) for c in self.clauses))

    def validate(self):
        """Check the shape the reduction assumes."""
        n = self.variable_count
        if n < 1 or not self.clauses:
            raise PreconditionError("formula needs at least one variable and one clause")
        pos, neg = set(), set()
        for k, clause in enumerate(self.clauses, 1):
            if len(clause) < 2:
                raise PreconditionError(f"clause {k} has fewer than two literals")
            if len(set(clause)) != len(clause):
                raise PreconditionError(f"clause {k} repeats a literal")
            for lit in clause:
                if lit == 0 or abs(lit) > n:
                    raise PreconditionError(f"clause {k} mentions unknown variable {abs(lit)}")
                if -lit in clause:
                    raise PreconditionError(f"clause {k} contains x{abs(lit)} and its negation")
                (pos if lit > 0 else neg).add(abs(lit))
        missing = [v for v in range(1, n + 1) if v not in pos or v not in neg]
        if missing:
            raise PreconditionError(
                f"variables {missing} do not occur both positively and negatively")
        return self

    def satisfied_by(self, assignment) -> bool:
        return all(any((lit > 0) == bool(assignment[abs(lit) - 1]) for lit in c)
                   for c in self.clauses)


def parse_dimacs(text: str) -> CnfFormula:
    n_vars = n_clauses = None
    literals = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("c") or s.startswith("%"):
            continue
        if s.startswith("p"):
            parts = s.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormatError("expected 'p cnf <vars> <clauses>'", f"line {lineno}")
            try:
                n_vars, n_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormatError("non-integer header field", f"line {lineno}") from None
            continue
        if n_vars is None:
            raise FormatError("clause before the 'p cnf' header", f"line {lineno}")
        for tok in s.split():
            try:
                literals.append(int(tok))
            except ValueError:
                raise FormatError(f"bad literal {tok!r}", f"line {lineno}") from None
    if n_vars is None:
        raise FormatError("missing 'p cnf' header")
    clauses, cur = [], []
    for lit in literals:
        if lit == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(lit)
    if cur:
        clauses.append(tuple(cur))
    if len(clauses) != n_clauses:
        raise FormatError(f"header announces {n_clauses} clauses, found {len(clauses)}")
    return CnfFormula(n_vars, tuple(clauses))


def to_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.variable_count} {len(formula.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in formula.clauses]
    return "\n".join(lines) + "\n"


def _kinds(formula):
    m, n = len(formula.clauses), formula.variable_count
    return [("c", i) for i in range(m)] + [("y", i) for i in range(n)] + [("z", i) for i in range(n)]


def _p1(formula, row, col):
    (r, i), (c, j) = row, col
    if r == "c":
        clause = formula.clauses[i]
        if c == "y":
            return 3 if (j + 1) in clause else 0
        if c == "z":
            return 3 if -(j + 1) in clause else 0
        return 50 if i == j else 0
    if c == "c":
        clause = formula.clauses[j]
        return 51 if (i + 1) in clause or -(i + 1) in clause else 0
    if r == c:
        return 2 if i == j else 3
    return 1 if i == j else 3


def _p2(formula, row, col):
    (r, i), (c, j) = row, col
    if r == "c":
        return 50 if c == "c" and i == j else 0
    if c == "c":
        return 50 if i == j else 0
    if i != j:
        return 0
    return 101 if r == c else 100


def sat_gadget(formula: CnfFormula):
    """The reduction game and its desired set (as index profiles).

    Player 2's payoffs at (y_i, y_j) and (z_i, z_j) with i != j are not
    pinned by the construction and are set to 0.
    """
    formula.validate()
    kinds = _kinds(formula)
    labels = [f"{k}{i + 1}" for k, i in kinds]
    game = Game.from_function([labels, labels],
                              lambda p: (_p1(formula, kinds[p[0]], kinds[p[1]]),
                                         _p2(formula, kinds[p[0]], kinds[p[1]])))
    return game, gadget_target(formula, game)


def gadget_target(formula: CnfFormula, game: Game) -> frozenset:
    """All profiles except player 1 on a clause strategy and (y_i, z_i), (z_i, y_i)."""
    kinds = _kinds(formula)
    out = set()
    for a, b in game.profiles():
        (r, i), (c, j) = kinds[a], kinds[b]
        if r == "c":
            continue
        if {r, c} == {"y", "z"} and i == j:
            continue
        out.add((a, b))
    return frozenset(out)


def assignment_scheme(formula: CnfFormula, assignment, game: Game | None = None) -> PaymentScheme:
    """The scheme a truth assignment induces.

    Player 1 gets +1 on every profile where it plays the literal strategy
    made true (y_i if x_i, else z_i); player 2 gets +1 on (z_i, y_i) when x_i
    is true and on (y_i, z_i) when it is false.
    """
    assignment = [bool(a) for a in assignment]
    if len(assignment) != formula.variable_count:
        raise PreconditionError(
            f"assignment has {len(assignment)} values for {formula.variable_count} variables")
    if game is None:
        game, _ = sat_gadget(formula)
    kinds = _kinds(formula)
    if len(kinds) != game.shape[0] or game.shape[0] != game.shape[1]:
        raise PreconditionError("game does not match the formula's gadget size")
    pos = {k: idx for idx, k in enumerate(kinds)}
    v = np.empty(game.shape + (2,), dtype=object)
    v.flat[:] = [Fraction(0)] * v.size
    for i, truth in enumerate(assignment):
        row = pos[("y", i)] if truth else pos[("z", i)]
        v[row, :, 0] = Fraction(1)
        if truth:
            v[pos[("z", i)], pos[("y", i)], 1] = Fraction(1)
        else:
            v[pos[("y", i)], pos[("z", i)], 1] = Fraction(1)
    return PaymentScheme(game, v)
