"""Exponential, logarithm and the derivation.

``exp`` splits its argument into purely infinite, real and infinitesimal parts:
the first becomes a monomial, the second a constant factor, and only the third
needs the Taylor series.  ``log`` works the other way round from the leading
term ``r m`` of a positive series: ``log(r m (1 + d)) = log m + log r + log(1 + d)``.

The derivation is determined by ``d(w) = 1``, ``d(exp f) = exp(f) d(f)`` and
strong additivity.  For a monomial we use ``d(m) = m * d(log m)`` with the exact
formal logarithm; the log atoms have ``d(l_j) = 1 / (l_0 l_1 ... l_{j-1})``.
The exponent of ``m`` sits one exponential level lower, so the recursion ends.
"""

from __future__ import annotations

from functools import lru_cache

from . import lazy
from .arith import DEFAULT_BUDGET, TruncatedResult, TruncationBudget, materialize
from .constants import const_sign, precision
from .core import (
    ZERO_TS,
    Monomial,
    Term,
    Transseries,
    compare_one,
    is_positive_infinite,
    mono_compare,
    ts_sign,
)
from .errors import BudgetExhausted, NonPositiveArgument, NotPositiveInfinite


def ts_exp(x: Transseries, budget: TruncationBudget = DEFAULT_BUDGET) -> TruncatedResult:
    with precision(budget.const_bits):
        return materialize(lazy.exp_of(lazy.Exact(x)), budget)


def ts_log(x: Transseries, budget: TruncationBudget = DEFAULT_BUDGET) -> TruncatedResult:
    with precision(budget.const_bits):
        if ts_sign(x) <= 0:
            raise NonPositiveArgument("log of a non-positive series")
        return materialize(lazy.log_of(lazy.Exact(x)), budget)


def iterated_log_series(x: Transseries | lazy.Series, k: int) -> lazy.Series:
    """Lazy ``log_k(x)`` for ``x`` positive infinite."""
    s = x if isinstance(x, lazy.Series) else lazy.Exact(x)
    for _ in range(k):
        lead = s.term(0)
        if lead is None or compare_one(lead.monomial) <= 0 or const_sign(lead.coeff) <= 0:
            raise NotPositiveInfinite("iterated log needs a positive infinite argument")
        s = lazy.log_of(s)
    return s


def iterated_log(x: Transseries, k: int, budget: TruncationBudget = DEFAULT_BUDGET) -> TruncatedResult:
    if k < 0:
        raise ValueError("k must be a natural number")
    with precision(budget.const_bits):
        if k and not is_positive_infinite(x):
            raise NotPositiveInfinite("iterated log needs x > R")
        return materialize(iterated_log_series(x, k), budget)


# derivation ------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _atom_derivative(j: int) -> Monomial:
    """``d(l_j) = 1 / (l_0 ... l_{j-1})``."""
    return Monomial({i: -1 for i in range(j)})


@lru_cache(maxsize=1 << 14)
def derive_monomial(m: Monomial) -> Transseries:
    """``d(m) = m * d(log m)``."""
    if m.is_one():
        return ZERO_TS
    dlog = Transseries._trusted(
        tuple(Term(a, _atom_derivative(k + 1)) for k, a in m.log_powers)
    )
    # the log terms above are already in decreasing order only up to ties; re-sort
    dlog = Transseries(dlog.terms) + derive(m.exp_arg)
    return dlog.times_monomial(m)


def derive(x: Transseries) -> Transseries:
    out = ZERO_TS
    for t in x.terms:
        d = derive_monomial(t.monomial)
        if d.terms:
            out = out + d.scale(t.coeff)
    return out


class _Derived(lazy.Series):
    """Term-by-term derivative of a lazy series.

    For monomials other than 1, ``m > n`` implies ``d(m) > d(n)``, so the
    derivatives of successive terms have strictly decreasing leading monomials
    and everything above the next one is final.
    """

    def __init__(self, s: lazy.Series):
        super().__init__()
        self.s = s

    def _gen(self):
        pending = ZERO_TS
        i = idle = 0
        while True:
            t = self.s.term(i)
            i += 1
            if t is not None and t.monomial.is_one():
                continue
            if t is None:
                yield from pending.terms
                return
            d = derive_monomial(t.monomial).scale(t.coeff)
            cut = d.terms[0].monomial
            ready = pending.restrict(lambda m: mono_compare(m, cut) > 0)
            pending = pending.restrict(lambda m: mono_compare(m, cut) <= 0) + d
            if ready.terms:
                idle = 0
                yield from ready.terms
            else:
                idle += 1
                if idle > lazy.current_cancellation_limit():
                    raise BudgetExhausted("derivative terms keep cancelling")


def derive_series(s: lazy.Series, n: int = 1) -> lazy.Series:
    """Lazy ``n``-th derivative of a lazy series."""
    for _ in range(n):
        s = lazy.Exact(derive(s.value)) if isinstance(s, lazy.Exact) else _Derived(s)
    return s


def derive_n(x: Transseries, n: int) -> Transseries:
    if n < 0:
        raise ValueError("n must be a natural number")
    for _ in range(n):
        x = derive(x)
    return x


__all__ = [
    "ts_exp",
    "ts_log",
    "iterated_log",
    "iterated_log_series",
    "derive",
    "derive_n",
    "derive_monomial",
    "derive_series",
]
