"""Exact number parsing and formatting."""
import json
from decimal import Decimal
from fractions import Fraction
from numbers import Rational

__all__ = ["to_fraction", "format_fraction", "dump_json"]


def to_fraction(value):
    """Exact conversion of ints, Fractions, decimal strings and ``"p/q"`` strings.

    Binary floats are refused: ``0.1`` cannot be recovered exactly once it has
    gone through a float.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not an exact number: {value!r}") from None
    if isinstance(value, float):
        raise TypeError(f"binary float {value!r} is not exact; pass a string such as '0.75'")
    raise TypeError(f"cannot interpret {value!r} as a rational")


def _terminates(q: Fraction) -> bool:
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def format_fraction(q: Fraction) -> str:
    """``3``, ``0.75`` or ``1/3``: decimal when the expansion terminates."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    if _terminates(q):
        s = format(Decimal(q.numerator) / Decimal(q.denominator), "f")
        return s.rstrip("0").rstrip(".") if "." in s else s
    return f"{q.numerator}/{q.denominator}"


def dump_json(obj, indent=0, _level=0):
    """Deterministic JSON text with Fractions written exactly.

    Terminating fractions become bare decimal literals, others ``"p/q"``
    strings. Lists of scalars stay on one line so payoff tensors read like
    matrices.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, Fraction):
        if obj.denominator == 1 or _terminates(obj):
            return format_fraction(obj)
        return json.dumps(f"{obj.numerator}/{obj.denominator}")
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k), ensure_ascii=False)}: {dump_json(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        if not indent:
            return "{" + ", ".join(items) + "}"
        return "{\n" + ",\n".join(pad + i for i in items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        parts = [dump_json(v, indent, _level + 1) for v in obj]
        flat = all(not isinstance(v, (list, tuple, dict)) for v in obj)
        short = not any(isinstance(v, dict) for v in obj) and sum(map(len, parts)) < 60
        if not indent or flat or short:
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(pad + p for p in parts) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")
