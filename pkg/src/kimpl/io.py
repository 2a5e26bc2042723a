"""File formats: games, payment schemes, devices, informational-form games, auctions.

All formats are JSON documents. Numbers are read exactly: ``0.75`` becomes
3/4 and strings such as ``"4/5"`` are accepted wherever a number is.
Serializers write terminating fractions as decimals and others as ``"p/q"``,
so ``parse(serialize(x)) == x`` holds exactly.
"""
from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from ._rational import dump_json, to_fraction
from .devices import ImplementationDevice
from .errors import FormatError, PreconditionError
from .game import Game, PaymentScheme
from .infoform import InfoGame
from .vcg import Allocation, AuctionMechanism, TieRule, Valuation, bundle_label, parse_bundle

__all__ = [
    "load_json", "parse_game", "serialize_game", "parse_scheme", "serialize_scheme",
    "parse_device", "serialize_device", "parse_info", "serialize_info", "parse_auction",
    "serialize_auction", "Auction", "read_text", "fixture_path", "parse_target",
    "parse_rectangle", "parse_mixed", "parse_distribution", "parse_info_strategy",
    "parse_device_strategy",
]


def fixture_path(name: str) -> Path:
    """Path of a fixture shipped with the package (``m.game``, ``fig4.info``, ...)."""
    return Path(str(resources.files("kimpl") / "fixtures" / name))


def read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read file: {exc.strerror}", str(path)) from None


def load_json(text: str):
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None


def _num(value, where):
    if isinstance(value, bool) or value is None or isinstance(value, (list, dict)):
        raise FormatError(f"expected a number, got {json.dumps(value, default=str)}", where)
    try:
        return to_fraction(value)
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc), where) from None


def _obj(doc, where, required=(), optional=()):
    if not isinstance(doc, dict):
        raise FormatError("expected an object", where)
    unknown = sorted(set(doc) - set(required) - set(optional))
    if (required or optional) and unknown:
        raise FormatError(f"unknown fields {unknown}", where)
    missing = [k for k in required if k not in doc]
    if missing:
        raise FormatError(f"missing fields {missing}", where)
    return doc


def _labels(rows, where):
    if not isinstance(rows, list) or not rows:
        raise FormatError("expected a non-empty list of label lists", where)
    out = []
    for i, row in enumerate(rows):
        w = f"{where}[{i}]"
        if not isinstance(row, list) or not row:
            raise FormatError("expected a non-empty list of labels", w)
        row = [str(s) for s in row]
        if len(set(row)) != len(row):
            dup = next(s for s in row if row.count(s) > 1)
            raise FormatError(f"duplicate label {dup!r}", w)
        out.append(row)
    return out


def _tensor(doc, shape, width, where):
    """Nested lists of shape ``shape`` whose leaves are ``width``-vectors of numbers."""
    out = np.empty(tuple(shape) + (width,), dtype=object)

    def walk(node, idx, w):
        depth = len(idx)
        if depth == len(shape):
            if not isinstance(node, list) or len(node) != width:
                raise FormatError(f"expected a list of {width} numbers", w)
            for k, x in enumerate(node):
                out[tuple(idx) + (k,)] = _num(x, f"{w}[{k}]")
            return
        if not isinstance(node, list) or len(node) != shape[depth]:
            raise FormatError(f"expected a list of length {shape[depth]}", w)
        for k, child in enumerate(node):
            walk(child, idx + [k], f"{w}[{k}]")

    walk(doc, [], where)
    return out


def _nested(arr):
    if arr.ndim == 1:
        return [Fraction(x) for x in arr]
    return [_nested(a) for a in arr]


def parse_game(text: str) -> Game:
    doc = _obj(load_json(text), "game", ("strategies", "payoffs"), ("players", "name"))
    strategies = _labels(doc["strategies"], "strategies")
    if "players" in doc and doc["players"] != len(strategies):
        raise FormatError(f"'players' is {doc['players']} but {len(strategies)} strategy lists "
                          "are given", "players")
    shape = [len(s) for s in strategies]
    tensor = _tensor(doc["payoffs"], shape, len(shape), "payoffs")
    return Game(strategies, tensor)


def serialize_game(game: Game) -> str:
    doc = {"players": game.n_players,
           "strategies": [list(s) for s in game.strategies],
           "payoffs": _nested(game.payoff_tensor)}
    return dump_json(doc, indent=2) + "\n"


def parse_scheme(text: str, game: Game) -> PaymentScheme:
    """``{"payments": tensor}`` or ``{"entries": [{"player", "profile", "amount"}, ...]}``.

    Players are numbered from 1 in files.
    """
    doc = _obj(load_json(text), "scheme", (), ("payments", "entries"))
    if ("payments" in doc) == ("entries" in doc):
        raise FormatError("give exactly one of 'payments' and 'entries'", "scheme")
    try:
        if "payments" in doc:
            tensor = _tensor(doc["payments"], game.shape, game.n_players, "payments")
            return PaymentScheme(game, tensor)
        entries = {}
        if not isinstance(doc["entries"], list):
            raise FormatError("expected a list", "entries")
        for k, e in enumerate(doc["entries"]):
            w = f"entries[{k}]"
            _obj(e, w, ("player", "profile", "amount"))
            player = e["player"]
            if not isinstance(player, int) or not 1 <= player <= game.n_players:
                raise FormatError(f"player must be 1..{game.n_players}", f"{w}.player")
            key = (player - 1, game.profile(e["profile"]))
            if key in entries:
                raise FormatError("duplicate entry", w)
            entries[key] = _num(e["amount"], f"{w}.amount")
        return PaymentScheme.from_entries(game, entries)
    except PreconditionError as exc:
        raise FormatError(str(exc), "scheme") from None


def serialize_scheme(v: PaymentScheme) -> str:
    game = v.game
    entries = [{"player": i + 1, "profile": list(game.labels(x)), "amount": amount}
               for (i, x), amount in v.entries().items()]
    return dump_json({"entries": entries}, indent=2) + "\n"


def parse_device(text: str, game: Game) -> ImplementationDevice:
    """Signals equal the players' actions; ``distribution`` lists signal profiles
    with probabilities, ``payments`` lists (player, signals, actions, amount)."""
    doc = _obj(load_json(text), "device", ("distribution",), ("payments", "bonus", "bonus_rule"))
    h = {}
    for k, e in enumerate(_list(doc["distribution"], "distribution")):
        w = f"distribution[{k}]"
        _obj(e, w, ("signals", "p"))
        s = _profile(game, e["signals"], f"{w}.signals")
        if s in h:
            raise FormatError("signal profile listed twice", w)
        h[s] = _num(e["p"], f"{w}.p")
    pay = {}
    for k, e in enumerate(_list(doc.get("payments", []), "payments")):
        w = f"payments[{k}]"
        _obj(e, w, ("player", "signals", "actions", "amount"))
        player = e["player"]
        if not isinstance(player, int) or not 1 <= player <= game.n_players:
            raise FormatError(f"player must be 1..{game.n_players}", f"{w}.player")
        key = (player - 1, _profile(game, e["signals"], f"{w}.signals"),
               _profile(game, e["actions"], f"{w}.actions"))
        if key in pay:
            raise FormatError("duplicate payment", w)
        pay[key] = _num(e["amount"], f"{w}.amount")
    bonus = _num(doc["bonus"], "bonus") if doc.get("bonus") is not None else None
    try:
        return ImplementationDevice(signal_sets=game.strategies, h=h, payments=pay, bonus=bonus,
                                    bonus_rule=doc.get("bonus_rule"))
    except PreconditionError as exc:
        raise FormatError(str(exc), "device") from None


def serialize_device(device: ImplementationDevice, game: Game) -> str:
    doc = {
        "bonus": device.bonus,
        "bonus_rule": device.bonus_rule,
        "distribution": [{"signals": list(game.labels(s)), "p": q} for s, q in device.h.items()],
        "payments": [{"player": i + 1, "signals": list(game.labels(s)),
                      "actions": list(game.labels(x)), "amount": a}
                     for (i, s, x), a in device.payments.items()],
    }
    return dump_json(doc, indent=2) + "\n"


def _list(node, where):
    if not isinstance(node, list):
        raise FormatError("expected a list", where)
    return node


def _profile(game, node, where):
    try:
        return game.profile([str(x) for x in _list(node, where)])
    except PreconditionError as exc:
        raise FormatError(str(exc), where) from None


def parse_info(text: str) -> InfoGame:
    """``signals``, ``actions`` (shared lists or per-signal maps) and one payoff
    matrix per signal profile keyed ``"s1,s2"``."""
    doc = _obj(load_json(text), "info", ("signals", "actions", "payoffs"), ("name",))
    signals = _labels(doc["signals"], "signals")
    n = len(signals)
    acts = doc["actions"]
    if not isinstance(acts, list) or len(acts) != n:
        raise FormatError(f"expected {n} action specifications", "actions")
    actions = []
    for i, spec in enumerate(acts):
        w = f"actions[{i}]"
        if isinstance(spec, dict):
            _obj(spec, w, signals[i])
            actions.append({s: _labels([spec[s]], f"{w}.{s}")[0] for s in signals[i]})
        else:
            actions.append(_labels([spec], w)[0])
    payoffs = {}
    table = _obj(doc["payoffs"], "payoffs")
    for key, block in table.items():
        w = f"payoffs.{key}"
        parts = [p.strip() for p in key.split(",")]
        if len(parts) != n:
            raise FormatError(f"expected {n} comma-separated signals", w)
        try:
            sig = tuple(signals[i].index(p) for i, p in enumerate(parts))
        except ValueError:
            raise FormatError("unknown signal", w) from None
        if sig in payoffs:
            raise FormatError("signal profile listed twice", w)
        shape = [len(actions[i][signals[i][sig[i]]] if isinstance(actions[i], dict)
                     else actions[i]) for i in range(n)]
        payoffs[sig] = _tensor(block, shape, n, w)
    try:
        return InfoGame(signals, actions, payoffs)
    except PreconditionError as exc:
        raise FormatError(str(exc), "payoffs") from None


def serialize_info(g: InfoGame) -> str:
    actions = []
    for i in range(g.n_players):
        if len(set(g.actions[i])) == 1:
            actions.append(list(g.actions[i][0]))
        else:
            actions.append({s: list(a) for s, a in zip(g.signals[i], g.actions[i])})
    payoffs = {",".join(g.signal_labels(sig)): _nested(game.payoff_tensor)
               for sig, game in g.states.items()}
    doc = {"signals": [list(s) for s in g.signals], "actions": actions, "payoffs": payoffs}
    return dump_json(doc, indent=2) + "\n"


class Auction:
    """An auction document: named valuations, report scenarios and a mechanism."""

    def __init__(self, mechanism: AuctionMechanism, valuations: dict, scenarios: dict,
                 true: dict | None = None, sigma=None, completion: str = "explicit-total"):
        self.mechanism = mechanism
        self.valuations = valuations
        self.scenarios = scenarios
        self.true = true or {}
        self.sigma = sigma
        self.completion = completion

    @property
    def goods(self):
        return self.mechanism.goods

    def profile(self, scenario: str) -> tuple:
        return tuple(self.valuations[name] for name in self.scenarios[scenario])


def parse_auction(text: str) -> Auction:
    doc = _obj(load_json(text), "auction", ("goods", "buyers", "valuations", "scenarios"),
               ("completion", "true", "sigma", "mechanism", "name"))
    goods = _labels([doc["goods"]], "goods")[0]
    n = doc["buyers"]
    if not isinstance(n, int) or n < 1:
        raise FormatError("expected a positive integer", "buyers")
    completion = doc.get("completion", "explicit-total")
    if completion not in ("explicit-total", "monotone-closure"):
        raise FormatError(f"unknown completion mode {completion!r}", "completion")
    vals = {}
    for name, table in _obj(doc["valuations"], "valuations").items():
        w = f"valuations.{name}"
        _obj(table, w)
        try:
            vals[name] = Valuation.from_mapping(
                goods, {b: _num(x, f"{w}.{b or '{}'}") for b, x in table.items()}, completion)
        except PreconditionError as exc:
            raise FormatError(str(exc), w) from None

    def ref(name, where):
        if name not in vals:
            raise FormatError(f"unknown valuation {name!r}", where)
        return name

    scenarios = {}
    for key, names in _obj(doc["scenarios"], "scenarios").items():
        w = f"scenarios.{key}"
        names = _list(names, w)
        if len(names) != n:
            raise FormatError(f"expected {n} valuation names", w)
        scenarios[key] = [ref(x, f"{w}[{k}]") for k, x in enumerate(names)]
    true = {}
    for b, name in _obj(doc.get("true", {}), "true").items():
        true[_buyer(b, n, f"true.{b}")] = ref(name, f"true.{b}")
    sigma = None
    if doc.get("sigma") is not None:
        try:
            sigma = frozenset(parse_bundle(goods, b) for b in _list(doc["sigma"], "sigma"))
        except PreconditionError as exc:
            raise FormatError(str(exc), "sigma") from None
    mdoc = _obj(doc.get("mechanism", {}), "mechanism", (),
                ("frugal", "m_bar", "offsets", "tie_break"))
    frugal = mdoc.get("frugal", False)
    if not isinstance(frugal, bool):
        raise FormatError("expected true or false", "mechanism.frugal")
    m_bar = _num(mdoc["m_bar"], "mechanism.m_bar") if mdoc.get("m_bar") is not None else None
    offsets = {_buyer(b, n, f"mechanism.offsets.{b}"): _num(x, f"mechanism.offsets.{b}")
               for b, x in _obj(mdoc.get("offsets", {}), "mechanism.offsets").items()}
    rules = []
    for k, r in enumerate(_list(mdoc.get("tie_break", []), "mechanism.tie_break")):
        w = f"mechanism.tie_break[{k}]"
        _obj(r, w, ("when", "prefer"))
        when = {_buyer(b, n, f"{w}.when"): vals[ref(x, f"{w}.when.{b}")]
                for b, x in _obj(r["when"], f"{w}.when").items()}
        try:
            alloc = Allocation.from_bundles(
                goods, {_buyer(b, n, f"{w}.prefer"): x
                        for b, x in _obj(r["prefer"], f"{w}.prefer").items()})
        except PreconditionError as exc:
            raise FormatError(str(exc), f"{w}.prefer") from None
        rules.append(TieRule(when, alloc))
    mech = AuctionMechanism(tuple(goods), n, frugal=frugal, tie_rules=tuple(rules),
                            offsets=offsets, m_bar=m_bar)
    return Auction(mech, vals, scenarios, true, sigma, completion)


def _buyer(key, n, where):
    try:
        b = int(key)
    except (TypeError, ValueError):
        raise FormatError("buyer keys are numbers 1..n", where) from None
    if not 1 <= b <= n:
        raise FormatError(f"buyer must be 1..{n}", where)
    return b


def serialize_auction(a: Auction) -> str:
    goods = a.goods
    names = {v: k for k, v in reversed(list(a.valuations.items()))}
    mech = a.mechanism
    mdoc = {"frugal": mech.frugal}
    if mech.m_bar is not None:
        mdoc["m_bar"] = mech.m_bar
    if mech.offsets:
        mdoc["offsets"] = {str(b): to_fraction(x) for b, x in sorted(mech.offsets.items())}
    if mech.tie_rules:
        mdoc["tie_break"] = [
            {"when": {str(b): names[v] for b, v in r.when.items()},
             "prefer": {str(b): bundle_label(goods, r.allocation.bundle(b))
                        for b in range(1, mech.n_buyers + 1) if r.allocation.bundle(b)}}
            for r in mech.tie_rules]
    # bundles by size, then by the goods they contain
    order = sorted(range(1 << len(goods)),
                   key=lambda b: (bin(b).count("1"), [k for k in range(len(goods)) if b >> k & 1]))
    doc = {"goods": list(goods), "buyers": mech.n_buyers, "completion": "explicit-total",
           "valuations": {k: {bundle_label(goods, b): v.values[b] for b in order}
                          for k, v in a.valuations.items()},
           "scenarios": {k: list(v) for k, v in a.scenarios.items()}}
    if a.true:
        doc["true"] = {str(b): name for b, name in sorted(a.true.items())}
    if a.sigma is not None:
        doc["sigma"] = [bundle_label(goods, b) for b in sorted(a.sigma)]
    doc["mechanism"] = mdoc
    return dump_json(doc, indent=2) + "\n"


# command-line mini syntaxes


def parse_target(game: Game, text: str) -> frozenset:
    """``"f,s;s,f"``: profiles separated by ``;``, strategies by ``,``."""
    out = set()
    for part in text.split(";"):
        part = part.strip()
        if not part:
            raise PreconditionError(f"empty profile in target {text!r}")
        out.add(game.profile([s.strip() for s in part.split(",")]))
    return frozenset(out)


def parse_rectangle(game: Game, text: str) -> tuple:
    """``"f|s;s"``: one ``|``-separated strategy set per player, players split by ``;``."""
    parts = text.split(";")
    if len(parts) != game.n_players:
        raise PreconditionError(f"expected {game.n_players} strategy sets in {text!r}")
    return tuple(tuple(game.strategy_index(i, s.strip()) for s in p.split("|") if s.strip())
                 for i, p in enumerate(parts))


def parse_mixed(game: Game, text: str) -> tuple:
    """``"0.8,0.2;0.8,0.2"``: one probability vector per player."""
    parts = text.split(";")
    if len(parts) != game.n_players:
        raise PreconditionError(f"expected {game.n_players} probability vectors in {text!r}")
    return tuple(tuple(to_fraction(x) for x in p.split(",")) for p in parts)


def parse_distribution(game: Game, text: str) -> dict:
    """``"f,s=1/2;s,f=1/2"``: profile=probability pairs."""
    out = {}
    for part in text.split(";"):
        if "=" not in part:
            raise PreconditionError(f"expected profile=probability, got {part!r}")
        prof, q = part.split("=", 1)
        x = game.profile([s.strip() for s in prof.split(",")])
        if x in out:
            raise PreconditionError(f"profile {prof.strip()!r} listed twice")
        out[x] = to_fraction(q)
    return out


def parse_info_strategy(g: InfoGame, text: str) -> tuple:
    """``"s1:U,t1:D;s2:L,t2:R"``: signal:action pairs per player."""
    parts = text.split(";")
    if len(parts) != g.n_players:
        raise PreconditionError(f"expected {g.n_players} strategies in {text!r}")
    specs = []
    for p in parts:
        m = {}
        for item in p.split(","):
            if ":" not in item:
                raise PreconditionError(f"expected signal:action, got {item!r}")
            s, a = item.split(":", 1)
            m[s.strip()] = a.strip()
        specs.append(m)
    return g.strategy_profile(specs)


def parse_device_strategy(game: Game, text: str) -> tuple:
    """Like :func:`parse_info_strategy` with signals equal to actions."""
    parts = text.split(";")
    if len(parts) != game.n_players:
        raise PreconditionError(f"expected {game.n_players} strategies in {text!r}")
    out = []
    for i, p in enumerate(parts):
        m = {}
        for item in p.split(","):
            if ":" not in item:
                raise PreconditionError(f"expected signal:action, got {item!r}")
            s, a = item.split(":", 1)
            m[game.strategy_index(i, s.strip())] = game.strategy_index(i, a.strip())
        missing = [game.strategies[i][k] for k in range(game.shape[i]) if k not in m]
        if missing:
            raise PreconditionError(f"player {i + 1}: no action for signals {missing}")
        out.append(tuple(m[k] for k in range(game.shape[i])))
    return tuple(out)
