"""Command-line interface.

Every command prints a report of ``(section, key, value)`` rows, as text or
CSV. Constructed schemes and devices are always re-verified before the
report calls them valid.

Exit status: 0 success, 2 invalid input or unmet precondition, 3 the
requested object does not exist (infeasible), 4 unreadable or malformed
file, 1 internal error.
"""
from __future__ import annotations

import argparse
import csv
import io as _stdio
import itertools
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from ._rational import format_fraction
from .devices import (build_correlated_device, build_mixed_device, device_cost,
                      induced_distribution, max_payout, obedience, obedience_check,
                      simulate_device)
from .errors import (FormatError, InfeasibleError, InternalGuardError, KImplError,
                     PreconditionError)
from .exact import op_algorithm, verify_exact
from .game import (check_distribution, enumerate_pure_nash, find_mixed_nash_2p, is_correlated_eq,
                   mixed_payoff, non_dominated_profiles, obedience_gains, product_distribution,
                   with_payments)
from .implementation import (brute_force_set_price, build_singleton_implementation,
                             singleton_price, verify_implementation)
from .infoform import is_expost_equilibrium, uniform_implementation_feasible
from .io import (parse_auction, parse_device, parse_device_strategy, parse_distribution,
                 parse_game, parse_info, parse_info_strategy, parse_mixed, parse_rectangle,
                 parse_scheme, parse_target, read_text, serialize_device, serialize_scheme)
from .sat import assignment_scheme, parse_dimacs, sat_gadget
from .vcg import (bundle_label, frugality_violations, is_sigma_based, select_allocation,
                  surplus, vc_payment)

EXIT_OK, EXIT_INTERNAL, EXIT_PRECONDITION, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3, 4


class Report:
    def __init__(self, command: str):
        self.rows = []
        self.add("run", "command", command)

    def add(self, section, key, value):
        self.rows.append((section, str(key), _fmt(value)))

    def text(self) -> str:
        out, current = [], None
        for section, key, value in self.rows:
            if section != current:
                if current is not None:
                    out.append("")
                out.append(f"[{section}]")
                current = section
            out.append(f"{key}: {value}")
        return "\n".join(out) + "\n"

    def csv(self) -> str:
        buf = _stdio.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "key", "value"])
        w.writerows(self.rows)
        return buf.getvalue()


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return format_fraction(value)
    if value is None:
        return "-"
    return str(value)


def _prof(game, x) -> str:
    return "(" + ",".join(game.labels(x)) + ")"


def _surviving(game, sets) -> str:
    return " x ".join("{" + ",".join(game.strategies[i][k] for k in s) + "}"
                      for i, s in enumerate(sets))


def _vec(values) -> str:
    return ", ".join(format_fraction(v) for v in values)


def _scheme_rows(report, section, scheme):
    game = scheme.game
    entries = scheme.entries()
    if not entries:
        report.add(section, "payments", "none")
    for (i, x), amount in entries.items():
        report.add(section, f"V{i + 1}{_prof(game, x)}", amount)


def _verify_rows(report, game, scheme, target, section="verification"):
    check = verify_implementation(game, scheme, target)
    report.add(section, "surviving", _surviving(game, check.surviving))
    report.add(section, "target_contained", check.target_contained)
    report.add(section, "worst_case_cost", check.worst_case_cost)
    return check


def _load_game(path):
    return parse_game(read_text(path))


def cmd_analyze(args):
    game = _load_game(args.game)
    r = Report("analyze")
    r.add("game", "players", game.n_players)
    for i, s in enumerate(game.strategies):
        r.add("game", f"strategies{i + 1}", ",".join(s))
    for x in game.profiles():
        r.add("game", f"payoff{_prof(game, x)}", _vec(game.payoff(x)))
    r.add("analysis", "non_dominated", _surviving(game, non_dominated_profiles(game)))
    nash = enumerate_pure_nash(game)
    r.add("analysis", "pure_nash", " ".join(_prof(game, x) for x in nash) or "none")
    if all(k >= 2 for k in game.shape):
        for x in game.profiles():
            r.add("analysis", f"singleton_price{_prof(game, x)}", singleton_price(game, x))
    if game.n_players == 2:
        p = find_mixed_nash_2p(game)
        r.add("analysis", "mixed_nash", "; ".join(_vec(row) for row in p))
        r.add("analysis", "mixed_nash_payoff", _vec(mixed_payoff(game, p)))
    if args.scheme:
        scheme = parse_scheme(read_text(args.scheme), game)
        paid = with_payments(game, scheme)
        _scheme_rows(r, "scheme", scheme)
        for x in paid.profiles():
            r.add("paid_game", f"payoff{_prof(paid, x)}", _vec(paid.payoff(x)))
        if args.compare:
            r.add("paid_game", "equals_compare", paid == _load_game(args.compare))
        target = parse_target(game, args.target) if args.target else list(game.profiles())
        _verify_rows(r, game, scheme, target)
    return r, EXIT_OK


def cmd_price(args):
    game = _load_game(args.game)
    z = game.profile(args.profile.split(","))
    r = Report("price")
    price = singleton_price(game, z)
    r.add("result", "profile", _prof(game, z))
    r.add("result", "price", price)
    scheme = build_singleton_implementation(game, z, args.epsilon)
    check = _verify_rows(r, game, scheme, [z])
    r.add("verification", "cost_equals_price", check.worst_case_cost == price)
    return r, EXIT_OK


def cmd_implement(args):
    game = _load_game(args.game)
    z = game.profile(args.profile.split(","))
    scheme = build_singleton_implementation(game, z, args.epsilon)
    r = Report("implement")
    r.add("result", "profile", _prof(game, z))
    r.add("result", "epsilon", Fraction(args.epsilon))
    _scheme_rows(r, "scheme", scheme)
    check = _verify_rows(r, game, scheme, [z])
    r.add("verification", "cost_equals_price", check.worst_case_cost == singleton_price(game, z))
    if args.out:
        Path(args.out).write_text(serialize_scheme(scheme), encoding="utf-8")
        r.add("output", "written", args.out)
    return r, EXIT_OK


def cmd_exact(args):
    game = _load_game(args.game)
    rect = parse_rectangle(game, args.rect)
    rep = op_algorithm(game, rect)
    r = Report("exact")
    r.add("result", "target", _surviving(game, rect))
    for key in ("e1", "e2", "penalty", "penalty_rule"):
        r.add("result", key, rep.metadata[key])
    r.add("result", "worst_case_cost", rep.worst_case_cost)
    _scheme_rows(r, "scheme", rep.scheme)
    r.add("verification", "surviving", _surviving(game, rep.surviving))
    r.add("verification", "exact", verify_exact(game, rep.scheme, rect))
    return r, EXIT_OK


def cmd_brute(args):
    game = _load_game(args.game)
    target = parse_target(game, args.target)
    grid = [g for g in args.grid.split(",")] if args.grid else None
    res = brute_force_set_price(game, target, grid, cap=args.cap)
    r = Report("brute")
    r.add("result", "target", " ".join(_prof(game, x) for x in sorted(target)))
    r.add("result", "grid", args.grid or "payoff differences")
    if res is None:
        r.add("result", "price", "none on this grid")
        return r, EXIT_INFEASIBLE
    r.add("result", "price", res.price)
    r.add("result", "assignments_bound", res.searched)
    _scheme_rows(r, "scheme", res.scheme)
    _verify_rows(r, game, res.scheme, target)
    return r, EXIT_OK


def _distribution_arg(game, args):
    if args.mixed:
        p = parse_mixed(game, args.mixed)
        return "mixed", p, product_distribution(game, p)
    if args.dist:
        xi = check_distribution(game, parse_distribution(game, args.dist))
        return "correlated", None, xi
    raise PreconditionError("give --mixed or --dist")


def _dist_text(game, xi) -> str:
    return "; ".join(f"{_prof(game, x)}={format_fraction(q)}" for x, q in sorted(xi.items()))


def _device_rows(r, game, device, xi):
    ok, why = obedience_check(game, device)
    r.add("verification", "obedience_dominant", ok)
    if not ok:
        r.add("verification", "obedience_failure", why)
    r.add("verification", "device_cost", device_cost(game, device))
    r.add("verification", "max_payout", max_payout(game, device))
    r.add("verification", "induces_distribution", induced_distribution(game, device) == xi)
    return ok


def cmd_device_build(args):
    game = _load_game(args.game)
    kind, p, xi = _distribution_arg(game, args)
    bonus = args.bonus
    device = (build_mixed_device(game, p, bonus) if kind == "mixed"
              else build_correlated_device(game, xi, bonus))
    r = Report("device-build")
    r.add("device", "kind", kind)
    r.add("device", "distribution", _dist_text(game, device.h))
    r.add("device", "bonus", device.bonus)
    r.add("device", "bonus_rule", device.bonus_rule)
    ok = _device_rows(r, game, device, xi)
    if args.out:
        Path(args.out).write_text(serialize_device(device, game), encoding="utf-8")
        r.add("output", "written", args.out)
    return r, EXIT_OK if ok else EXIT_INFEASIBLE


def cmd_device_sim(args):
    game = _load_game(args.game)
    if args.device:
        device = parse_device(read_text(args.device), game)
    else:
        kind, p, xi = _distribution_arg(game, args)
        device = (build_mixed_device(game, p) if kind == "mixed"
                  else build_correlated_device(game, xi))
    strategies = parse_device_strategy(game, args.strategy) if args.strategy else obedience(game)
    res = simulate_device(game, device, strategies, args.seed, args.rounds)
    r = Report("device-sim")
    r.add("run", "seed", args.seed)
    r.add("run", "rounds", args.rounds)
    r.add("run", "strategies", "obedience" if args.strategy is None else args.strategy)
    for x, c in res.counts.items():
        r.add("outcomes", f"count{_prof(game, x)}", c)
        r.add("outcomes", f"frequency{_prof(game, x)}", Fraction(c, args.rounds))
    for i in range(game.n_players):
        r.add("totals", f"payments{i + 1}", res.payments[i])
        r.add("totals", f"game_payoff{i + 1}", res.base_payoffs[i])
    r.add("totals", "payments_all", sum(res.payments, Fraction(0)))
    return r, EXIT_OK


def cmd_corr_check(args):
    game = _load_game(args.game)
    xi = check_distribution(game, parse_distribution(game, args.dist))
    r = Report("corr-check")
    r.add("result", "distribution", _dist_text(game, xi))
    ok = is_correlated_eq(game, xi)
    r.add("result", "correlated_equilibrium", ok)
    for (i, s, x), gain in obedience_gains(game, xi).items():
        r.add("obedience", f"player{i + 1} {game.strategies[i][s]} over "
                           f"{game.strategies[i][x]}", gain)
    return r, EXIT_OK if ok else EXIT_INFEASIBLE


def cmd_info_check(args):
    g = parse_info(read_text(args.info))
    target = parse_info_strategy(g, args.target)
    r = Report("info-check")
    r.add("result", "target", args.target)
    r.add("result", "ex_post_equilibrium", is_expost_equilibrium(g, target))
    res = uniform_implementation_feasible(g, target, args.epsilon)
    r.add("result", "epsilon", res.epsilon)
    r.add("result", "verdict", "feasible" if res.feasible else "infeasible")
    for k, c in enumerate(res.certificate, 1):
        own = g.actions[c.player][0]
        opp = ",".join(g.actions[j][0][a] for j, a in enumerate(c.opp) if a is not None)
        name = f"V{c.player + 1}"
        r.add("certificate", f"constraint{k}",
              f"{name}({own[c.keep]};{opp}) - {name}({own[c.alt]};{opp}) >= "
              f"{format_fraction(c.bound)} at state ({','.join(c.state)}) where "
              f"{own[c.keep]} earns {format_fraction(c.payoffs[0])} and "
              f"{own[c.alt]} earns {format_fraction(c.payoffs[1])}")
    if res.certificate:
        r.add("certificate", "cycle_total", res.cycle_total)
    for note in res.notes:
        r.add("result", "note", note)
    if not res.feasible:
        return r, EXIT_INFEASIBLE
    for i, table in res.payments.items():
        for x, amount in table.items():
            if amount:
                labels = ",".join(g.actions[j][0][a] for j, a in enumerate(x))
                r.add("witness", f"V{i + 1}({labels})", amount)
    r.add("verification", "witness_rechecked", True)
    return r, EXIT_OK


def cmd_vcg_run(args):
    a = parse_auction(read_text(args.auction))
    mech = a.mechanism
    if args.frugal is not None:
        mech = mech.with_frugal(args.frugal == "yes")
    goods = a.goods
    r = Report("vcg-run")
    r.add("mechanism", "goods", ",".join(goods))
    r.add("mechanism", "buyers", mech.n_buyers)
    r.add("mechanism", "frugal", mech.frugal)
    r.add("mechanism", "tie_rules", len(mech.tie_rules))
    names = [args.scenario] if args.scenario else list(a.scenarios)
    for name in names:
        if name not in a.scenarios:
            raise PreconditionError(f"unknown scenario {name!r}")
        profile = a.profile(name)
        gamma = select_allocation(mech, profile)
        sec = f"scenario {name}"
        r.add(sec, "reports", ",".join(a.scenarios[name]))
        if args.report in ("allocation", "all"):
            r.add(sec, "allocation", gamma.describe(goods, mech.n_buyers))
            r.add(sec, "surplus", surplus(profile, gamma))
            viol = frugality_violations(profile, gamma)
            r.add(sec, "frugal_allocation", not viol)
            for b, sub, bundle in viol:
                r.add(sec, f"unneeded_goods{b}",
                      f"{bundle_label(goods, sub)} is worth as much as {bundle_label(goods, bundle)}")
        for b in range(1, mech.n_buyers + 1):
            pay = vc_payment(mech, profile, b, gamma)
            if args.report in ("allocation", "all"):
                r.add(sec, f"payment{b}", pay)
            if args.report in ("utilities", "all") and b in a.true:
                true_v = a.valuations[a.true[b]]
                r.add(sec, f"utility{b}", true_v.values[gamma.bundle(b)] - pay)
        if a.sigma is not None:
            for b, v in enumerate(profile, 1):
                r.add(sec, f"report{b}_sigma_based", is_sigma_based(v, a.sigma))
    return r, EXIT_OK


def cmd_sat_gadget(args):
    formula = parse_dimacs(read_text(args.cnf))
    game, target = sat_gadget(formula)
    r = Report("sat-gadget")
    r.add("formula", "variables", formula.variable_count)
    r.add("formula", "clauses", len(formula.clauses))
    r.add("gadget", "strategies_per_player", game.shape[0])
    r.add("gadget", "target_profiles", len(target))
    if args.assignment:
        if any(ch not in "TF" for ch in args.assignment.upper()):
            raise PreconditionError("assignment is a string of T and F, one per variable")
        assignments = [[ch == "T" for ch in args.assignment.upper()]]
    elif args.all_assignments:
        assignments = [list(a) for a in itertools.product([True, False],
                                                          repeat=formula.variable_count)]
    else:
        assignments = []
    for a in assignments:
        name = "".join("T" if x else "F" for x in a)
        scheme = assignment_scheme(formula, a, game)
        check = verify_implementation(game, scheme, target)
        sec = f"assignment {name}"
        r.add(sec, "satisfies_formula", formula.satisfied_by(a))
        r.add(sec, "target_contained", check.target_contained)
        r.add(sec, "worst_case_cost", check.worst_case_cost)
        r.add(sec, "two_implementation", check.target_contained and check.worst_case_cost <= 2)
    return r, EXIT_OK


def _parser():
    p = argparse.ArgumentParser(prog="kimpl", description="Price and build payment schemes that "
                                "steer rational play into a desired set of outcomes.")
    p.add_argument("--version", action="version", version=f"kimpl {__version__}")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, fn, help_text, game=True):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--format", choices=["text", "csv"], default=argparse.SUPPRESS)
        if game:
            sp.add_argument("game", help="game file")
        sp.set_defaults(fn=fn)
        return sp

    sp = cmd("analyze", cmd_analyze, "dominance, equilibria and prices of a game")
    sp.add_argument("--scheme", help="payment scheme file to apply")
    sp.add_argument("--target", help="desired profiles, e.g. 'f,s;s,f'")
    sp.add_argument("--compare", help="game file the paid game should equal")

    for name, fn, text in (("price", cmd_price, "price of a single profile"),
                           ("implement", cmd_implement, "build a scheme for a single profile")):
        sp = cmd(name, fn, text)
        sp.add_argument("--profile", required=True, help="e.g. 'f,f'")
        sp.add_argument("--epsilon", default="1", type=Fraction,
                        help="off-path padding (default 1)")
        if name == "implement":
            sp.add_argument("--out", help="write the scheme to this file")

    sp = cmd("exact", cmd_exact, "exact implementation of a rectangle (two players)")
    sp.add_argument("--rect", required=True, help="strategy sets, e.g. 'f|s;s'")

    sp = cmd("brute", cmd_brute, "grid search for the cheapest implementation of a set")
    sp.add_argument("--target", required=True, help="desired profiles, e.g. 'f,s;s,f'")
    sp.add_argument("--grid", help="payment values, e.g. '0,1,2' (default: payoff differences)")
    sp.add_argument("--cap", type=int, default=5_000_000, help="assignment budget")

    for name, fn, text in (("device-build", cmd_device_build, "build a zero-cost device"),
                           ("device-sim", cmd_device_sim, "simulate play with a device")):
        sp = cmd(name, fn, text)
        sp.add_argument("--mixed", help="mixed equilibrium, e.g. '0.8,0.2;0.8,0.2'")
        sp.add_argument("--dist", help="correlated distribution, e.g. 'f,s=1/2;s,f=1/2'")
        if name == "device-build":
            sp.add_argument("--bonus", default="auto",
                            help="auto (default), theorem, safe, or a number")
            sp.add_argument("--out", help="write the device to this file")
        else:
            sp.add_argument("--device", help="device file")
            sp.add_argument("--seed", type=int, required=True)
            sp.add_argument("--rounds", type=int, required=True)
            sp.add_argument("--strategy", help="signal:action maps, e.g. 'f:f,s:f;f:f,s:s'")

    sp = cmd("corr-check", cmd_corr_check, "check a correlated equilibrium")
    sp.add_argument("--dist", required=True, help="e.g. 'f,s=1/2;s,f=1/2'")

    sp = cmd("info-check", cmd_info_check, "signal-independent payments in an informational-form "
             "game", game=False)
    sp.add_argument("info", help="informational-form game file")
    sp.add_argument("--target", required=True, help="e.g. 's1:U,t1:D;s2:L,t2:R'")
    sp.add_argument("--epsilon", default="1", type=Fraction, help="strictness slack (default 1)")

    sp = cmd("vcg-run", cmd_vcg_run, "run a combinatorial VCG auction", game=False)
    sp.add_argument("auction", help="auction file")
    sp.add_argument("--scenario", help="only this report scenario")
    sp.add_argument("--report", choices=["allocation", "utilities", "all"], default="all")
    sp.add_argument("--frugal", choices=["yes", "no"], help="override the file's frugal flag")

    sp = cmd("sat-gadget", cmd_sat_gadget, "build the satisfiability gadget game", game=False)
    sp.add_argument("cnf", help="DIMACS CNF file")
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--assignment", help="truth values, e.g. 'TF'")
    group.add_argument("--all-assignments", action="store_true")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        report, code = args.fn(args)
    except FormatError as exc:
        print(f"kimpl: format error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"kimpl: {exc}", file=sys.stderr)
        return EXIT_IO
    except InfeasibleError as exc:
        print(f"kimpl: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except PreconditionError as exc:
        print(f"kimpl: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (InternalGuardError, KImplError) as exc:
        print(f"kimpl: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(report.csv() if args.format == "csv" else report.text())
    return code


if __name__ == "__main__":
    sys.exit(main())
