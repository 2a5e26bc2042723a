"""Combinatorial VCG auctions over dense valuations.

Bundles are bitmasks over the goods (bit k is ``goods[k]``). An allocation
is an owner vector: ``owners[k]`` is 0 when the seller keeps good k and
``i`` when buyer i (1-based) receives it. Buyer arguments below are 1-based
to match allocation slots; report profiles are ordinary tuples, so buyer i's
report sits at position ``i - 1``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from ._rational import format_fraction, to_fraction
from .errors import BudgetExceededError, PreconditionError

__all__ = [
    "Valuation", "Allocation", "TieRule", "AuctionMechanism", "parse_bundle",
    "bundle_label", "surplus", "optimal_allocations", "frugality_violations",
    "select_allocation", "vc_payment", "vcg_utility", "bundle_strategy",
    "is_sigma_based", "is_quasi_field", "quasi_field_closure", "theorem6_payment_rule",
    "lemma1_check", "Counterexample", "counterexample_53", "counterexample_utilities",
    "grid_valuations", "GridCheck", "bundling_dominance_grid", "truthful_dominance_grid",
    "random_quasi_field", "DEFAULT_ALLOCATION_CAP",
]

DEFAULT_ALLOCATION_CAP = 2_000_000
MAX_GOODS = 8


def _masks(m):
    return range(1 << m)


def parse_bundle(goods, text) -> int:
    """``"abc"`` (single-letter goods), ``"g1+g2"``, a list of goods, or ``""``/``"{}"`` for none."""
    if isinstance(text, int) and not isinstance(text, bool):
        if not 0 <= text < 1 << len(goods):
            raise PreconditionError(f"bundle mask {text} out of range")
        return text
    if isinstance(text, (list, tuple, set, frozenset)):
        parts = list(text)
    else:
        s = str(text).strip()
        if s in ("", "{}", "0", "-"):
            return 0
        if "+" in s or "," in s:
            parts = [p.strip() for p in s.replace(",", "+").split("+") if p.strip()]
        elif all(len(g) == 1 for g in goods):
            parts = list(s)
        else:
            parts = [s]
    mask = 0
    for p in parts:
        try:
            k = goods.index(str(p))
        except ValueError:
            raise PreconditionError(f"unknown good {p!r}") from None
        if mask >> k & 1:
            raise PreconditionError(f"good {p!r} listed twice in a bundle")
        mask |= 1 << k
    return mask


def bundle_label(goods, mask: int) -> str:
    names = [g for k, g in enumerate(goods) if mask >> k & 1]
    if not names:
        return "{}"
    sep = "" if all(len(g) == 1 for g in goods) else "+"
    return sep.join(names)


@dataclass(frozen=True)
class Valuation:
    goods: tuple
    values: tuple  # indexed by bundle mask

    def __post_init__(self):
        goods = tuple(str(g) for g in self.goods)
        object.__setattr__(self, "goods", goods)
        m = len(goods)
        if len(set(goods)) != m:
            raise PreconditionError("repeated good labels")
        if m > MAX_GOODS:
            raise PreconditionError(f"at most {MAX_GOODS} goods are supported, got {m}")
        vals = tuple(to_fraction(v) for v in self.values)
        if len(vals) != 1 << m:
            raise PreconditionError(f"need {1 << m} bundle values, got {len(vals)}")
        if vals[0] != 0:
            raise PreconditionError("the empty bundle must be worth 0")
        for b in _masks(m):
            if vals[b] < 0:
                raise PreconditionError(f"negative value for {bundle_label(goods, b)}")
            for k in range(m):
                if not b >> k & 1 and vals[b | 1 << k] < vals[b]:
                    raise PreconditionError(
                        f"not monotone: {bundle_label(goods, b | 1 << k)} is worth less than "
                        f"{bundle_label(goods, b)}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_mapping(cls, goods, mapping: Mapping, completion: str = "explicit-total"):
        """Build from ``{bundle: value}``.

        ``"explicit-total"`` requires every bundle; ``"monotone-closure"`` fills
        each missing bundle with the largest given value among its subsets.
        """
        goods = tuple(str(g) for g in goods)
        given = {}
        for b, v in mapping.items():
            mask = parse_bundle(goods, b)
            if mask in given:
                raise PreconditionError(f"bundle {bundle_label(goods, mask)} given twice")
            given[mask] = to_fraction(v)
        if completion == "explicit-total":
            missing = [bundle_label(goods, b) for b in _masks(len(goods)) if b not in given]
            if missing:
                raise PreconditionError(f"explicit-total valuation lacks bundles {missing}")
            vals = [given[b] for b in _masks(len(goods))]
        elif completion == "monotone-closure":
            given.setdefault(0, Fraction(0))
            vals = [max(v for c, v in given.items() if c & b == c) for b in _masks(len(goods))]
        else:
            raise PreconditionError(f"unknown completion mode {completion!r}")
        return cls(goods, tuple(vals))

    @classmethod
    def zero(cls, goods):
        return cls(tuple(goods), (Fraction(0),) * (1 << len(goods)))

    def __call__(self, bundle) -> Fraction:
        return self.values[parse_bundle(self.goods, bundle)]

    def grand(self) -> Fraction:
        return self.values[-1]

    def as_mapping(self) -> dict:
        return {bundle_label(self.goods, b): v for b, v in enumerate(self.values)}

    def __repr__(self):
        body = ", ".join(f"{k}: {format_fraction(v)}" for k, v in self.as_mapping().items() if v)
        return f"Valuation({{{body}}})"


@dataclass(frozen=True, order=True)
class Allocation:
    owners: tuple  # owners[k] in 0..n

    def bundle(self, slot: int) -> int:
        return sum(1 << k for k, o in enumerate(self.owners) if o == slot)

    def describe(self, goods, n_buyers: int) -> str:
        parts = [f"{bundle_label(goods, self.bundle(i))}->{i}" for i in range(1, n_buyers + 1)]
        parts.append(f"{bundle_label(goods, self.bundle(0))}->seller")
        return " ".join(parts)

    @classmethod
    def from_bundles(cls, goods, bundles: Mapping):
        """``{buyer: bundle}``; unassigned goods stay with the seller."""
        owners = [0] * len(goods)
        for buyer, b in bundles.items():
            for k in range(len(goods)):
                if parse_bundle(goods, b) >> k & 1:
                    if owners[k]:
                        raise PreconditionError(f"good {goods[k]!r} assigned twice")
                    owners[k] = int(buyer)
        return cls(tuple(owners))


@dataclass(frozen=True)
class TieRule:
    """Prefer ``allocation`` whenever the listed buyers report exactly ``when``."""
    when: Mapping  # buyer (1-based) -> Valuation
    allocation: Allocation

    def matches(self, reported) -> bool:
        return all(reported[b - 1] == v for b, v in self.when.items())


@dataclass(frozen=True)
class AuctionMechanism:
    goods: tuple
    n_buyers: int
    frugal: bool = False
    tie_rules: tuple = ()
    offsets: Mapping = field(default_factory=dict)  # buyer -> constant or callable(others)
    m_bar: Fraction | None = None
    cap: int = DEFAULT_ALLOCATION_CAP

    def __post_init__(self):
        object.__setattr__(self, "goods", tuple(str(g) for g in self.goods))
        if self.n_buyers < 1:
            raise PreconditionError("need at least one buyer")
        if self.m_bar is not None:
            object.__setattr__(self, "m_bar", to_fraction(self.m_bar))
        object.__setattr__(self, "tie_rules", tuple(self.tie_rules))

    def with_frugal(self, frugal: bool) -> "AuctionMechanism":
        return AuctionMechanism(self.goods, self.n_buyers, frugal, self.tie_rules, self.offsets,
                                self.m_bar, self.cap)

    def offset(self, buyer: int, reported) -> Fraction:
        h = self.offsets.get(buyer, 0)
        if callable(h):
            return to_fraction(h(tuple(v for j, v in enumerate(reported, 1) if j != buyer)))
        return to_fraction(h)


def _check_profile(goods, reported, n_buyers=None, m_bar=None):
    if n_buyers is not None and len(reported) != n_buyers:
        raise PreconditionError(f"need {n_buyers} reports, got {len(reported)}")
    for i, v in enumerate(reported, 1):
        if tuple(v.goods) != tuple(goods):
            raise PreconditionError(f"buyer {i} values a different set of goods")
        if m_bar is not None and not v.grand() < m_bar:
            raise PreconditionError(f"buyer {i} values the grand bundle at {v.grand()}, "
                                    f"bound is {m_bar}")


def surplus(reported, gamma: Allocation, skip: int | None = None) -> Fraction:
    """Sum of buyers' values for their slots; the seller's slot counts 0."""
    total = Fraction(0)
    for i, v in enumerate(reported, 1):
        if i != skip:
            total += v.values[gamma.bundle(i)]
    return total


def _all_allocations(m, n, cap):
    count = (n + 1) ** m
    if count > cap:
        raise BudgetExceededError(f"{count} allocations exceed the cap of {cap}",
                                  estimate=count, cap=cap)
    return (Allocation(o) for o in itertools.product(range(n + 1), repeat=m))


def _best(reported, m, cap, skip=None):
    n = len(reported)
    best, arg = None, []
    for gamma in _all_allocations(m, n, cap):
        s = surplus(reported, gamma, skip)
        if best is None or s > best:
            best, arg = s, [gamma]
        elif s == best:
            arg.append(gamma)
    return best, arg


def optimal_allocations(reported, cap: int = DEFAULT_ALLOCATION_CAP) -> list:
    """All surplus-maximizing allocations, in lexicographic owner-vector order."""
    if not reported:
        raise PreconditionError("need at least one buyer")
    goods = reported[0].goods
    _check_profile(goods, reported)
    return _best(reported, len(goods), cap)[1]


def frugality_violations(reported, gamma: Allocation) -> list:
    """``(buyer, sub-bundle, bundle)`` triples where a strict sub-bundle is worth as much."""
    out = []
    for i, v in enumerate(reported, 1):
        b = gamma.bundle(i)
        sub = (b - 1) & b
        while True:
            if sub != b and v.values[sub] >= v.values[b]:
                out.append((i, sub, b))
            if sub == 0:
                break
            sub = (sub - 1) & b
    return sorted(out)


def select_allocation(mech: AuctionMechanism, reported) -> Allocation:
    """The mechanism's choice among optimal allocations.

    A frugal mechanism only considers optimal allocations in which no buyer
    holds a bundle with an equally valued strict sub-bundle; these are
    exactly the results of trimming winners' bundles to minimal equal-value
    sub-bundles. The first matching tie rule whose allocation is eligible
    wins; otherwise the lexicographically smallest owner vector.
    """
    _check_profile(mech.goods, reported, mech.n_buyers, mech.m_bar)
    best, cands = _best(reported, len(mech.goods), mech.cap)
    if mech.frugal:
        cands = [g for g in cands if not frugality_violations(reported, g)]
    eligible = set(cands)
    chosen = cands[0]
    for rule in mech.tie_rules:
        if rule.matches(reported) and rule.allocation in eligible:
            chosen = rule.allocation
            break
    # never trust the filter: re-check optimality and frugality
    assert surplus(reported, chosen) == best
    assert not mech.frugal or not frugality_violations(reported, chosen)
    return chosen


def vc_payment(mech: AuctionMechanism, reported, buyer: int, gamma: Allocation | None = None):
    """Displacement payment of ``buyer`` plus its offset."""
    if gamma is None:
        gamma = select_allocation(mech, reported)
    without, _ = _best(reported, len(mech.goods), mech.cap, skip=buyer)
    return without - surplus(reported, gamma, skip=buyer) + mech.offset(buyer, reported)


def _profile_with(reported_others, buyer, reported_i):
    others = list(reported_others)
    return tuple(others[:buyer - 1] + [reported_i] + others[buyer - 1:])


def vcg_utility(mech: AuctionMechanism, true_v: Valuation, reported_i: Valuation,
                reported_others, buyer: int = 1) -> Fraction:
    """True value of the bundle received minus the transfer.

    ``reported_others`` lists the other buyers' reports in buyer order.
    """
    reported = _profile_with(reported_others, buyer, reported_i)
    gamma = select_allocation(mech, reported)
    return true_v.values[gamma.bundle(buyer)] - vc_payment(mech, reported, buyer, gamma)


def _family(goods, sigma) -> frozenset:
    return frozenset(parse_bundle(goods, b) for b in sigma)


def bundle_strategy(v: Valuation, sigma) -> Valuation:
    """Value of each bundle as the best family member it contains."""
    fam = _family(v.goods, sigma)
    if 0 not in fam:
        raise PreconditionError("the bundle family must contain the empty bundle")
    vals = tuple(max(v.values[c] for c in fam if c & b == c) for b in _masks(len(v.goods)))
    return Valuation(v.goods, vals)


def is_sigma_based(v: Valuation, sigma) -> bool:
    return bundle_strategy(v, sigma) == v


def is_quasi_field(sigma, goods) -> bool:
    goods = tuple(goods)
    fam = _family(goods, sigma)
    full = (1 << len(goods)) - 1
    if 0 not in fam:
        return False
    if any(full ^ b not in fam for b in fam):
        return False
    return all(b | c in fam for b in fam for c in fam if not b & c)


def quasi_field_closure(seeds, goods) -> frozenset:
    """Smallest family holding the seeds and the empty bundle, closed under
    complement and disjoint union."""
    goods = tuple(goods)
    full = (1 << len(goods)) - 1
    fam = {0, full} | set(_family(goods, seeds))
    while True:
        new = {full ^ b for b in fam} | {b | c for b in fam for c in fam if not b & c}
        if new <= fam:
            return frozenset(fam)
        fam |= new


def random_quasi_field(goods, rng: random.Random, seeds: int = 2) -> frozenset:
    m = len(goods)
    picks = [rng.randrange(1, 1 << m) for _ in range(rng.randint(0, seeds))]
    return quasi_field_closure(picks, goods)


def theorem6_payment_rule(sigma, m_bar, goods) -> Callable:
    """Bonus rule for enforcing the bundling profile of a quasi field.

    Buyer i receives 2*m_bar + 1 when its own report is based on ``sigma``
    and some other buyer's report is not; otherwise nothing.
    """
    if not is_quasi_field(sigma, goods):
        raise PreconditionError("bonus rule needs a quasi field")
    bonus = 2 * to_fraction(m_bar) + 1

    def rule(reported) -> tuple:
        based = [is_sigma_based(v, sigma) for v in reported]
        return tuple(bonus if based[i] and not all(based) else Fraction(0)
                     for i in range(len(reported)))

    rule.bonus = bonus
    return rule


def lemma1_check(mech: AuctionMechanism, sigma, v_i: Valuation, w_i: Valuation, others,
                 buyer: int = 1) -> bool:
    """Does reporting the projection of ``v_i`` earn at least as much as the
    family-based report ``w_i`` against ``others``?"""
    if not mech.frugal:
        raise PreconditionError("the bundling comparison needs a frugal mechanism")
    if not is_quasi_field(sigma, mech.goods):
        raise PreconditionError("family is not a quasi field")
    if not is_sigma_based(w_i, sigma):
        raise PreconditionError("alternative report is not based on the family")
    honest = vcg_utility(mech, v_i, bundle_strategy(v_i, sigma), others, buyer)
    return honest >= vcg_utility(mech, v_i, w_i, others, buyer)


@dataclass(frozen=True)
class Counterexample:
    goods: tuple
    sigma: frozenset
    v1: Valuation
    v2_hat: Valuation
    v1_sigma: Valuation
    w1: Valuation
    mechanism: AuctionMechanism


_TABLE_BUNDLES = ["", "a", "b", "c", "d", "ab", "ac", "ad", "bc", "bd", "cd",
                  "abc", "abd", "acd", "bcd", "abcd"]
_TABLE = {
    "v1": ["0", "0", "0", "0", "0", "1", "0", "0", "0", "0", "0", "1.1", "1", "0", "0", "1.1"],
    "v2_hat": ["0", "0", "0", "0", "0.75", "0", "0", "0.75", "0", "0.75", "0.75", "0", "0.75",
               "0.75", "0.75", "0.75"],
    "v1_sigma": ["0", "0", "0", "0", "0", "1", "0", "0", "0", "0", "0", "1", "1", "0", "0", "1.1"],
    "w1": ["0", "0", "0", "0", "0", "1", "0", "0", "0", "0", "0.1", "1", "1", "0.1", "0.1", "1.1"],
}


def counterexample_53() -> Counterexample:
    """Two buyers, four goods, and a non-frugal mechanism where buyer 1 gains
    by misreporting within the family {{}, ab, cd, abcd}."""
    goods = ("a", "b", "c", "d")
    rows = {k: Valuation.from_mapping(goods, dict(zip(_TABLE_BUNDLES, vals)))
            for k, vals in _TABLE.items()}
    rules = (
        TieRule({1: rows["v1_sigma"]}, Allocation.from_bundles(goods, {1: "ab", 2: "cd"})),
        TieRule({1: rows["w1"]}, Allocation.from_bundles(goods, {1: "abc", 2: "d"})),
    )
    mech = AuctionMechanism(goods, 2, frugal=False, tie_rules=rules)
    return Counterexample(goods, _family(goods, ["", "ab", "cd", "abcd"]), rows["v1"],
                          rows["v2_hat"], rows["v1_sigma"], rows["w1"], mech)


def counterexample_utilities(fx: Counterexample, frugal: bool = False) -> dict:
    mech = fx.mechanism.with_frugal(frugal)
    out = {}
    for name, report in (("bundling", fx.v1_sigma), ("cheat", fx.w1)):
        profile = (report, fx.v2_hat)
        gamma = select_allocation(mech, profile)
        out[name] = {
            "allocation": gamma,
            "payment": vc_payment(mech, profile, 1, gamma),
            "utility": vcg_utility(mech, fx.v1, report, (fx.v2_hat,), 1),
            "frugality_violations": frugality_violations(profile, gamma),
        }
    return out


def grid_valuations(goods, grid, m_bar=None) -> list:
    """Every monotone valuation with values on ``grid`` (and grand value below ``m_bar``)."""
    goods = tuple(goods)
    grid = sorted({to_fraction(x) for x in grid})
    m = len(goods)
    out = []

    def extend(vals):
        b = len(vals)
        if b == 1 << m:
            if m_bar is None or vals[-1] < m_bar:
                out.append(Valuation(goods, tuple(vals)))
            return
        floor = max((vals[b ^ 1 << k] for k in range(m) if b >> k & 1), default=Fraction(0))
        for x in grid:
            if x >= floor:
                extend(vals + [x])

    extend([Fraction(0)])
    return out


@dataclass(frozen=True)
class GridCheck:
    valuations: int
    comparisons: int
    violations: tuple  # (buyer, true v, deviation, opponents, honest utility, deviation utility)
    strict: int
    pairs: int  # (buyer, true v, deviation) pairs with a different report
    pairs_strict: int  # of those, pairs with at least one strict win
    note: str = "verified on a finite valuation grid only"

    @property
    def ok(self) -> bool:
        return not self.violations and self.strict > 0


def _grid_dominance(mech, valuations, honest_of, bonus_rule=None):
    n = mech.n_buyers
    outcomes = {}

    def total(profile, buyer, true_v):
        if profile not in outcomes:
            gamma = select_allocation(mech, profile)
            pays = tuple(vc_payment(mech, profile, j, gamma) for j in range(1, n + 1))
            extra = bonus_rule(profile) if bonus_rule else (Fraction(0),) * n
            outcomes[profile] = (gamma, pays, extra)
        gamma, pays, extra = outcomes[profile]
        return true_v.values[gamma.bundle(buyer)] - pays[buyer - 1] + extra[buyer - 1]

    violations, strict, comparisons, pairs, pairs_strict = [], 0, 0, 0, 0
    opp_profiles = list(itertools.product(valuations, repeat=n - 1))
    for buyer in range(1, n + 1):
        for true_v in valuations:
            honest = honest_of(true_v)
            for w in valuations:
                if w == honest:
                    continue
                pairs += 1
                hit = False
                for others in opp_profiles:
                    u_h = total(_profile_with(others, buyer, honest), buyer, true_v)
                    u_w = total(_profile_with(others, buyer, w), buyer, true_v)
                    comparisons += 1
                    if u_h < u_w:
                        violations.append((buyer, true_v, w, others, u_h, u_w))
                    elif u_h > u_w:
                        strict += 1
                        hit = True
                pairs_strict += hit
    return GridCheck(len(valuations), comparisons, tuple(violations), strict, pairs, pairs_strict)


def bundling_dominance_grid(goods, grid, m_bar, sigma, n_buyers: int = 2, frugal: bool = True,
                            cap: int = DEFAULT_ALLOCATION_CAP) -> GridCheck:
    """Does reporting the projection onto ``sigma``, with the bonus rule added,
    weakly beat every grid report for every buyer, true valuation and
    opponent report profile?"""
    m_bar = to_fraction(m_bar)
    mech = AuctionMechanism(tuple(goods), n_buyers, frugal=frugal, m_bar=m_bar, cap=cap)
    vals = grid_valuations(goods, grid, m_bar)
    rule = theorem6_payment_rule(sigma, m_bar, goods)
    return _grid_dominance(mech, vals, lambda v: bundle_strategy(v, sigma), rule)


def truthful_dominance_grid(goods, grid, n_buyers: int = 2, frugal: bool = False) -> GridCheck:
    """Truthful reporting against every grid deviation, with no bonuses."""
    mech = AuctionMechanism(tuple(goods), n_buyers, frugal=frugal)
    return _grid_dominance(mech, grid_valuations(goods, grid), lambda v: v)
