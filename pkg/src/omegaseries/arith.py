"""Field operations, truncated results and formal power series.

Addition, multiplication and natural powers of finite transseries are exact.
Inversion, division and evaluation of a power series at an infinitesimal
generally produce infinite expansions; those operations take a
:class:`TruncationBudget` and return a :class:`TruncatedResult` holding the ``N``
asymptotically largest terms together with a monomial that strictly dominates
every discarded term.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from . import lazy
from .constants import ZERO as C_ZERO
from .constants import ConstReal, as_const, precision
from .core import (
    ZERO_TS,
    Monomial,
    Term,
    Transseries,
    is_infinitesimal,
    leading_monomial,
    mono_compare,
)
from .errors import BudgetExhausted, NonzeroConstantTerm, NotInfinitesimal, ZeroArgument


@dataclass(frozen=True)
class TruncationBudget:
    """How much of an infinite expansion to keep.

    ``max_terms`` is the number ``N`` of leading terms returned by truncating
    operations; ``const_bits`` caps the interval precision used to decide signs
    of constants.
    """

    max_terms: int = 16
    const_bits: int = 256

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")
        if self.const_bits < 8:
            raise ValueError("const_bits must be at least 8")


DEFAULT_BUDGET = TruncationBudget()


@dataclass(frozen=True)
class TruncatedResult:
    """A value with its truncation certificate.

    If ``exact`` is false, every monomial of ``true_value - value`` is strictly
    smaller than ``error_bound``, and ``error_bound`` is at most the smallest
    monomial of ``value``.
    """

    value: Transseries
    exact: bool
    error_bound: Monomial | None = None

    def __post_init__(self):
        if self.exact and self.error_bound is not None:
            raise ValueError("an exact result carries no error bound")
        if not self.exact and self.error_bound is None:
            raise ValueError("an inexact result needs an error bound")

    def certified(self, m: Monomial) -> bool:
        """Is the coefficient of ``m`` in ``value`` guaranteed correct?"""
        return self.exact or mono_compare(m, self.error_bound) >= 0


def materialize(s: lazy.Series, budget: TruncationBudget) -> TruncatedResult:
    """Pull the ``N`` leading terms of a lazy series into a :class:`TruncatedResult`."""
    n = budget.max_terms
    terms: list[Term] = []
    try:
        for i in range(n + 1):
            t = s.term(i)
            if t is None:
                break
            terms.append(t)
    except BudgetExhausted:
        if not terms:
            raise
        kept = terms[:n]
        return TruncatedResult(Transseries._trusted(tuple(kept)), False, kept[-1].monomial)
    if len(terms) <= n:
        return TruncatedResult(Transseries._trusted(tuple(terms)), True)
    kept = terms[:n]
    return TruncatedResult(Transseries._trusted(tuple(kept)), False, kept[-1].monomial)


def run_budgeted(build, budget: TruncationBudget) -> TruncatedResult:
    """Build a lazy series and materialize it under the budget's sign precision."""
    with precision(budget.const_bits):
        return materialize(build(), budget)


# exact ring operations ---------------------------------------------------------------


def ts_add(x: Transseries, y: Transseries) -> Transseries:
    return x + y


def ts_neg(x: Transseries) -> Transseries:
    return -x


def ts_sub(x: Transseries, y: Transseries) -> Transseries:
    return x - y


def ts_mul(x: Transseries, y: Transseries) -> Transseries:
    return x * y


def ts_npow(x: Transseries, n: int) -> Transseries:
    if n < 0:
        raise ValueError("ts_npow takes a natural exponent; use ts_inverse for negative powers")
    return x ** n


def sum_family(xs: Iterable[Transseries]) -> Transseries:
    return reduce(ts_add, xs, ZERO_TS)


# truncating operations ------------------------------------------------------------------


def ts_inverse(x: Transseries, budget: TruncationBudget = DEFAULT_BUDGET) -> TruncatedResult:
    """``1/x`` as ``t**-1 * sum (-d)**n`` where ``x = t (1 + d)``, ``t`` the leading term."""
    if not x.terms:
        raise ZeroArgument("inverse of zero")
    return run_budgeted(lambda: lazy.inverse_of(lazy.Exact(x)), budget)


def ts_div(x: Transseries, y: Transseries, budget: TruncationBudget = DEFAULT_BUDGET) -> TruncatedResult:
    """``x / y``.  The product is expanded lazily, so the kept terms are exact."""
    if not y.terms:
        raise ZeroArgument("division by zero")
    return run_budgeted(lambda: lazy.mul(lazy.Exact(x), lazy.inverse_of(lazy.Exact(y))), budget)


# power series ------------------------------------------------------------------------------


class PowerSeries:
    """A polynomial prefix ``a_0 + a_1 X + ... + a_d X**d`` of a formal power series."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        self.coeffs = tuple(as_const(c) for c in coeffs) or (C_ZERO,)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        a = a + (C_ZERO,) * (n - len(a))
        b = b + (C_ZERO,) * (n - len(b))
        return a == b

    def __hash__(self):
        c = list(self.coeffs)
        while len(c) > 1 and not c[-1]:
            c.pop()
        return hash(tuple(c))

    def __repr__(self):
        return f"PowerSeries([{', '.join(c.text for c in self.coeffs)}])"


def eval_power_series(
    p: PowerSeries,
    eps: Transseries,
    budget: TruncationBudget = DEFAULT_BUDGET,
    full_series: bool = False,
) -> TruncatedResult:
    """Evaluate ``sum_{i<=d} a_i eps**i``.

    With ``full_series`` the coefficients are read as the prefix of an infinite
    series, whose unknown tail is of order ``lm(eps)**(d+1)``; terms that the
    tail could still change are dropped and certified by the bound.
    """
    if full_series and not is_infinitesimal(eps):
        raise NotInfinitesimal("power series evaluated at a non-infinitesimal")
    with precision(budget.const_bits):
        value = ZERO_TS
        for a in reversed(p.coeffs):  # Horner
            value = value * eps + Transseries.constant(a)
        exact = True
        bound: Monomial | None = None
        if full_series and eps.terms:
            mu = leading_monomial(eps)
            tail = mu ** (p.degree + 1)
            value = value.restrict(lambda m: mono_compare(m, tail) > 0)
            exact = False
            bound = value.terms[-1].monomial if value.terms else mu ** p.degree
        n = budget.max_terms
        if len(value.terms) > n:
            value = Transseries._trusted(value.terms[:n])
            exact = False
            bound = value.terms[-1].monomial
        return TruncatedResult(value, exact, bound)


def _poly_mul(a: list, b: list, cap: int) -> list:
    out = [C_ZERO] * min(len(a) + len(b) - 1, cap + 1)
    for i, x in enumerate(a):
        if not x or i > cap:
            continue
        for j, y in enumerate(b):
            if i + j > cap:
                break
            if y:
                out[i + j] = out[i + j] + x * y
    return out


def compose_power_series(p: PowerSeries, q: PowerSeries, max_degree: int | None = None) -> PowerSeries:
    """Coefficients of ``P(Q(X))`` for ``Q(0) = 0``.

    ``c_0 = a_0`` and ``c_k = sum_{n=1}^{k} a_n * sum_{m_1+...+m_n=k} b_{m_1}...b_{m_n}``;
    the inner sum is the coefficient of ``X**k`` in ``Q**n``.
    """
    if q.coeffs[0]:
        raise NonzeroConstantTerm("the inner series must have zero constant term")
    deg = p.degree * q.degree
    if max_degree is not None:
        deg = min(deg, max_degree)
    a, b = p.coeffs, list(q.coeffs)
    c = [a[0]] + [C_ZERO] * deg
    power = [ConstReal(1)]
    for n in range(1, min(p.degree, deg) + 1):
        power = _poly_mul(power, b, deg)  # Q**n truncated at degree deg
        if not a[n]:
            continue
        for k in range(n, len(power)):
            if power[k]:
                c[k] = c[k] + a[n] * power[k]
    return PowerSeries(c)


__all__ = [
    "TruncationBudget",
    "TruncatedResult",
    "DEFAULT_BUDGET",
    "PowerSeries",
    "ts_add",
    "ts_neg",
    "ts_sub",
    "ts_mul",
    "ts_npow",
    "ts_inverse",
    "ts_div",
    "sum_family",
    "eval_power_series",
    "compose_power_series",
    "materialize",
    "run_budgeted",
]
