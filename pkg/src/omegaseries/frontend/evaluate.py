"""Evaluate parsed expressions.

Every node becomes a lazy series (see :mod:`omegaseries.lazy`) and only the
root is truncated, so the ``N`` reported terms are exact whatever the shape of
the expression.  Passing ``at`` evaluates the expression with ``w`` replaced by
another series, which is how the command line composes two expressions: the
substitution commutes with every operation of the grammar.
"""

from __future__ import annotations

from dataclasses import dataclass

from .. import lazy
from ..arith import DEFAULT_BUDGET, TruncatedResult, TruncationBudget, materialize
from ..constants import ConstReal, precision
from ..core import Transseries, compare_one, omega
from ..errors import TargetNotPositiveInfinite
from .parser import Add, Div, Exp, Expr, Log, Mul, Neg, Num, Pow, Sub, Var, parse
from .render import render, render_monomial


@dataclass(frozen=True)
class EvalReport:
    """Rendered outcome of an evaluation, with the underlying result."""

    normal_form: str
    exact: bool
    error_bound: str | None
    budget_used: dict
    result: TruncatedResult

    @property
    def value(self) -> Transseries:
        return self.result.value

    def text(self) -> str:
        """The normal form, followed by `` (+ o(BOUND))`` when truncated."""
        if self.exact:
            return self.normal_form
        return f"{self.normal_form} (+ o({self.error_bound}))"


def to_series(e: Expr, at: lazy.Series | None = None) -> lazy.Series:
    """Lazy value of ``e``, with ``w`` read as ``at`` when given."""
    if at is None:
        at = lazy.Exact(omega())
    return _build(e, at)


def _build(e: Expr, at: lazy.Series) -> lazy.Series:
    if isinstance(e, Num):
        return lazy.const_series(ConstReal(e.value))
    if isinstance(e, Var):
        return at
    if isinstance(e, Neg):
        return lazy.scaled(_build(e.arg, at), ConstReal(-1))
    if isinstance(e, Add):
        return lazy.add(_build(e.left, at), _build(e.right, at))
    if isinstance(e, Sub):
        return lazy.add(_build(e.left, at), lazy.scaled(_build(e.right, at), ConstReal(-1)))
    if isinstance(e, Mul):
        return lazy.mul(_build(e.left, at), _build(e.right, at))
    if isinstance(e, Div):
        return lazy.mul(_build(e.left, at), lazy.inverse_of(_build(e.right, at)))
    if isinstance(e, Pow):
        return lazy.power_of(_build(e.base, at), ConstReal(e.exponent))
    if isinstance(e, Exp):
        return lazy.exp_of(_build(e.arg, at))
    if isinstance(e, Log):
        s = _build(e.arg, at)
        for _ in range(e.depth):
            s = lazy.log_of(s)
        return s
    raise TypeError(f"not an expression node: {e!r}")


def report(result: TruncatedResult, budget: TruncationBudget) -> EvalReport:
    bound = None if result.exact else render_monomial(result.error_bound)
    used = {
        "max_terms": budget.max_terms,
        "const_bits": budget.const_bits,
        "terms": len(result.value.terms),
    }
    return EvalReport(render(result.value), result.exact, bound, used, result)


def evaluate(e: Expr | str, budget: TruncationBudget = DEFAULT_BUDGET, at: lazy.Series | None = None) -> EvalReport:
    """Evaluate an expression (or its text) to its first ``budget.max_terms`` terms."""
    if isinstance(e, str):
        e = parse(e)
    with precision(budget.const_bits):
        return report(materialize(to_series(e, at), budget), budget)


def evaluate_at(
    f: Expr | str, g: Expr | str, budget: TruncationBudget = DEFAULT_BUDGET
) -> EvalReport:
    """``f o g`` for expressions, with ``g`` positive infinite."""
    if isinstance(f, str):
        f = parse(f)
    if isinstance(g, str):
        g = parse(g)
    with precision(budget.const_bits):
        inner = to_series(g)
        lead = inner.term(0)
        if lead is None or lead.coeff <= 0 or compare_one(lead.monomial) <= 0:
            raise TargetNotPositiveInfinite("the inner expression must be greater than every constant")
        return report(materialize(to_series(f, inner), budget), budget)


__all__ = ["EvalReport", "evaluate", "evaluate_at", "to_series", "report"]
