"""Command line interface.

Exit codes: 0 ok, 1 usage, 2 parse error, 3 domain error, 4 undecided (a sign
or a cancellation that the precision budget could not settle).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .. import lazy
from ..analysis import derive_series
from ..arith import TruncationBudget, materialize
from ..compose import taylor_expand
from ..constants import ConstReal, precision
from ..core import Term, compare_one, mono_compare
from ..errors import BudgetExhausted, DomainError, OmegaError, ParseError, SignUndecided
from .evaluate import evaluate, evaluate_at, report, to_series
from .parser import parse
from .render import render_const, render_term
from .serialize import SCHEMA, serialize

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_DOMAIN, EXIT_UNDECIDED = 0, 1, 2, 3, 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise _UsageError(f"{self.prog}: {message}")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--terms", type=int, default=argparse.SUPPRESS, help="number of leading terms kept (default 16)")
    common.add_argument("--const-bits", type=int, default=argparse.SUPPRESS, help="interval precision for signs (default 256)")
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)

    p = _Parser(prog="omegaseries", description="Exact transseries in w.", parents=[common])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("normalize", parents=[common], help="print the normal form")
    s.add_argument("expr")
    s = sub.add_parser("diff", parents=[common], help="derivative")
    s.add_argument("expr")
    s.add_argument("-n", type=int, default=1, help="order of the derivative")
    s = sub.add_parser("compose", parents=[common], help="substitute G for w in F")
    s.add_argument("f")
    s.add_argument("g")
    s = sub.add_parser("compare", parents=[common], help="order and dominance of F and G")
    s.add_argument("f")
    s.add_argument("g")
    s = sub.add_parser("taylor", parents=[common], help="Taylor coefficients of F at X")
    s.add_argument("f")
    s.add_argument("--at", required=True)
    s.add_argument("--order", type=int, default=2)
    s = sub.add_parser("limit", parents=[common], help="leading term and limit")
    s.add_argument("expr")
    return p


def _term_text(t: Term | None) -> str:
    if t is None:
        return "0"
    neg, body = render_term(t.coeff, t.monomial)
    return ("-" if neg else "") + body


def _cmd_normalize(args, budget):
    r = evaluate(args.expr, budget)
    return r.text(), {"result": serialize(r.result), "text": r.normal_form}


def _cmd_diff(args, budget):
    if args.n < 0:
        raise _UsageError("-n must be a natural number")
    with precision(budget.const_bits):
        r = report(materialize(derive_series(to_series(parse(args.expr)), args.n), budget), budget)
    return r.text(), {"result": serialize(r.result), "text": r.normal_form}


def _cmd_compose(args, budget):
    r = evaluate_at(args.f, args.g, budget)
    return r.text(), {"result": serialize(r.result), "text": r.normal_form}


def _cmd_compare(args, budget):
    f, g = parse(args.f), parse(args.g)
    with precision(budget.const_bits):
        fs, gs = to_series(f), to_series(g)
        diff = lazy.add(fs, lazy.scaled(gs, ConstReal(-1)))
        d = diff.term(0)
        order = "=" if d is None else (">" if d.coeff > 0 else "<")
        a, b = fs.term(0), gs.term(0)
        ratio = None
        if a is None and b is None:
            dom = "∼"
        elif a is None or b is None:
            dom = "≺" if a is None else "≻"
        else:
            c = mono_compare(a.monomial, b.monomial)
            if c:
                dom = "≻" if c > 0 else "≺"
            else:
                ratio = a.coeff / b.coeff
                dom = "∼" if ratio == 1 else "≍"
    verdict = f"f {dom} g" + (f" (ratio → {render_const(ratio)})" if dom == "≍" else "")
    text = f"f {order} g; {verdict}"
    names = {"≺": "strictly_less", "≻": "strictly_greater", "≍": "comparable", "∼": "asymptotic"}
    data = {
        "order": {"<": "less", "=": "equal", ">": "greater"}[order],
        "dominance": names[dom],
        "ratio": None if ratio is None else render_const(ratio),
        "text": text,
    }
    return text, data


def _cmd_taylor(args, budget):
    if args.order < 0:
        raise _UsageError("--order must be a natural number")
    f = evaluate(args.f, budget)
    x = evaluate(args.at, budget)
    if not (f.exact and x.exact):
        raise DomainError("taylor needs F and X with finite expansions")
    expansion = taylor_expand(f.value, x.value, args.order, budget)
    lines, items = [], []
    for n, c in enumerate(expansion.coefficients):
        r = report(c, budget)
        lines.append(f"c{n} = {r.text()}")
        items.append({"n": n, "text": r.normal_form, "result": serialize(c)})
    return "\n".join(lines), {"coefficients": items}


def _cmd_limit(args, budget):
    with precision(budget.const_bits):
        s = to_series(parse(args.expr))
        lead = s.term(0)
        if lead is None:
            limit = "0"
        else:
            c = compare_one(lead.monomial)
            if c > 0:
                limit = "+inf" if lead.coeff > 0 else "-inf"
            elif c == 0:
                limit = render_const(lead.coeff)
            else:
                limit = "0"
    text = f"leading term: {_term_text(lead)}; limit: {limit}"
    return text, {"leading_term": _term_text(lead), "limit": limit, "text": text}


_COMMANDS = {
    "normalize": _cmd_normalize,
    "diff": _cmd_diff,
    "compose": _cmd_compose,
    "compare": _cmd_compare,
    "taylor": _cmd_taylor,
    "limit": _cmd_limit,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        terms = getattr(args, "terms", 16)
        bits = getattr(args, "const_bits", 256)
        fmt = getattr(args, "format", "text")
        try:
            budget = TruncationBudget(terms, bits)
        except ValueError as exc:
            raise _UsageError(str(exc)) from None
        text, data = _COMMANDS[args.command](args, budget)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SignUndecided, BudgetExhausted) as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except (DomainError, OmegaError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if fmt == "json":
        print(json.dumps({"schema": SCHEMA, "command": args.command, **data}, ensure_ascii=False, sort_keys=True))
    else:
        print(text)
    return EXIT_OK


def run() -> None:
    """Console entry point."""
    sys.exit(main())


__all__ = ["main", "run"]
