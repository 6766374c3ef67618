"""Structured documents for values.

A document is plain nested data (dicts, lists, strings, ints) that mirrors the
normal forms, so it can go through JSON unchanged::

    {"schema": 1, "kind": "transseries",
     "value": {"terms": [{"coeff": CONST, "monomial": MONO}, ...]}}

    MONO  = {"log_powers": [{"k": 0, "power": CONST}, ...], "exp": SERIES}
    CONST = {"terms": [{"rational": "p/q", "exp": CONST | null,
                        "factors": [{"kind": "log" | "inv", "arg": CONST, "power": n}]}]}

Truncated results use ``"kind": "truncated"`` with ``value``, ``exact`` and
``error_bound`` (a monomial record or null).
"""

from __future__ import annotations

from ..arith import TruncatedResult
from ..constants import ConstReal, const_from_record, const_to_record
from ..core import Monomial, Term, Transseries
from ..errors import MalformedDocument

SCHEMA = 1


def _series_record(x: Transseries) -> dict:
    return {"terms": [{"coeff": const_to_record(t.coeff), "monomial": _monomial_record(t.monomial)} for t in x.terms]}


def _monomial_record(m: Monomial) -> dict:
    return {
        "log_powers": [{"k": k, "power": const_to_record(a)} for k, a in m.log_powers],
        "exp": _series_record(m.exp_arg),
    }


def serialize(x: Transseries | Monomial | ConstReal | TruncatedResult) -> dict:
    if isinstance(x, TruncatedResult):
        return {
            "schema": SCHEMA,
            "kind": "truncated",
            "value": _series_record(x.value),
            "exact": x.exact,
            "error_bound": None if x.error_bound is None else _monomial_record(x.error_bound),
        }
    if isinstance(x, Transseries):
        return {"schema": SCHEMA, "kind": "transseries", "value": _series_record(x)}
    if isinstance(x, Monomial):
        return {"schema": SCHEMA, "kind": "monomial", "value": _monomial_record(x)}
    if isinstance(x, ConstReal):
        return {"schema": SCHEMA, "kind": "constant", "value": const_to_record(x)}
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _read_series(rec) -> Transseries:
    terms = rec["terms"]
    if not isinstance(terms, list):
        raise TypeError("terms must be a list")
    out = []
    for t in terms:
        c = const_from_record(t["coeff"])
        if not c:
            raise ValueError("zero coefficient")
        out.append(Term(c, _read_monomial(t["monomial"])))
    value = Transseries(out)
    if len(value.terms) != len(out):
        raise ValueError("repeated monomial")
    return value


def _read_monomial(rec) -> Monomial:
    powers = {}
    for entry in rec["log_powers"]:
        k = entry["k"]
        if not isinstance(k, int) or isinstance(k, bool) or k < 0 or k in powers:
            raise ValueError("bad log atom index")
        powers[k] = const_from_record(entry["power"])
    return Monomial(powers, _read_series(rec["exp"]))


def deserialize(doc) -> Transseries | Monomial | ConstReal | TruncatedResult:
    """Inverse of :func:`serialize`; anything else raises :class:`MalformedDocument`."""
    try:
        if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
            raise ValueError(f"expected a schema {SCHEMA} document")
        kind = doc["kind"]
        if kind == "transseries":
            return _read_series(doc["value"])
        if kind == "monomial":
            return _read_monomial(doc["value"])
        if kind == "constant":
            return const_from_record(doc["value"])
        if kind == "truncated":
            exact = doc["exact"]
            if not isinstance(exact, bool):
                raise TypeError("exact must be a boolean")
            bound = doc["error_bound"]
            return TruncatedResult(
                _read_series(doc["value"]), exact, None if bound is None else _read_monomial(bound)
            )
        raise ValueError(f"unknown kind {kind!r}")
    except MalformedDocument:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError, AttributeError) as exc:
        raise MalformedDocument(f"malformed document: {exc}") from None


__all__ = ["serialize", "deserialize", "SCHEMA"]
