"""Comparison helpers shared by the test modules."""

from __future__ import annotations

from omegaseries import TruncatedResult, TruncationBudget, Transseries, mono_compare
from omegaseries.arith import materialize
from omegaseries.constants import precision


def _bounds(results):
    out = None
    for r in results:
        if isinstance(r, TruncatedResult) and not r.exact:
            if out is None or mono_compare(r.error_bound, out) > 0:
                out = r.error_bound
    return out


def _value(r) -> Transseries:
    return r.value if isinstance(r, TruncatedResult) else r


def common_region(*results):
    """The largest certified error bound among ``results`` (None if all exact)."""
    return _bounds(results)


def agree(a, b, bound=None) -> bool:
    """Do ``a`` and ``b`` have the same coefficients on every certified monomial?

    The region is every monomial ``>=`` the largest error bound of the inputs
    (and of ``bound`` if given); with no bound at all the values must be equal.
    """
    region = _bounds((a, b))
    if bound is not None and (region is None or mono_compare(bound, region) > 0):
        region = bound
    diff = _value(a) - _value(b)
    if region is None:
        return not diff.terms
    return not diff.restrict(lambda m: mono_compare(m, region) >= 0).terms


def take(series, n: int, bits: int = 256) -> TruncatedResult:
    """The first ``n`` terms of a lazy series as a truncated result."""
    with precision(bits):
        return materialize(series, TruncationBudget(n, bits))


def X(text: str) -> Transseries:
    """The exact value of an expression; fails if evaluation had to truncate."""
    from omegaseries import evaluate

    r = evaluate(text)
    assert r.exact, f"{text} did not evaluate exactly"
    return r.value
