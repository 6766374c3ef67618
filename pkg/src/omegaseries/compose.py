"""Composition ``f o g`` for a positive infinite target ``g``.

Substituting ``g`` for ``w`` is the unique map that is strongly additive, fixes
the constants, commutes with ``exp`` and ``log`` and sends the log atom ``l_k``
to ``log_k(g)``.  On a monomial it reads

    (prod_k l_k**a_k * exp(gamma)) o g = prod_k log_k(g)**a_k * exp(gamma o g)

and ``gamma`` lives one exponential level lower, so the recursion terminates.
All pieces are lazy series (see :mod:`omegaseries.lazy`), which means the
``N`` returned terms are exact and the error bound is the last kept monomial.

The same value can also be described combinatorially, as a sum over admissible
trees: a term ``r exp(gamma)`` is the root, its children are trees rooted at
terms of ``gamma`` whose contributions are infinitesimal, and a tree with ``n``
children contributes

    r * exp((gamma o g) restricted to monomials >= 1) * (1/n!) * prod(children)

while a log atom ``l_k`` is a leaf carrying one term of ``log_k(g)``.  That
description is implemented independently in :func:`tree_oracle_compose` and is
used to cross-check :func:`compose`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Iterator, NamedTuple, Sequence

from . import lazy
from .analysis import derive, iterated_log_series
from .arith import DEFAULT_BUDGET, TruncatedResult, TruncationBudget, materialize
from .constants import ONE as C_ONE
from .constants import ConstReal, const_exp, precision
from .core import (
    ONE_M,
    ZERO_TS,
    Monomial,
    Term,
    Transseries,
    compare_one,
    decompose,
    exp_monomial,
    formal_log,
    is_positive_infinite,
    leading_monomial,
    mono_compare,
    omega,
)
from .errors import BudgetExhausted, EpsilonTooLarge, NotPositiveInfinite, TargetNotPositiveInfinite


class Substitution:
    """Substitution of a fixed target ``g > R`` for ``w``.

    The target is a finite series or a lazy one (such as another composition).
    The values ``log_k(g)`` of the log atoms are cached lazily; ``base_value``
    materializes one of them under the budget.
    """

    def __init__(self, target: Transseries | lazy.Series, budget: TruncationBudget = DEFAULT_BUDGET):
        with precision(budget.const_bits):
            if isinstance(target, lazy.Series):
                lead = target.term(0)
                ok = lead is not None and lead.coeff > 0 and compare_one(lead.monomial) > 0
            else:
                ok = is_positive_infinite(target)
            if not ok:
                raise TargetNotPositiveInfinite("composition needs a target greater than every constant")
        self.target = target
        self.budget = budget
        self._base: list[lazy.Series] = [target if isinstance(target, lazy.Series) else lazy.Exact(target)]
        self._mono: dict[Monomial, lazy.Series] = {}

    def base_series(self, k: int) -> lazy.Series:
        while len(self._base) <= k:
            try:
                self._base.append(iterated_log_series(self._base[-1], 1))
            except NotPositiveInfinite as exc:  # pragma: no cover - log of g > R stays > R
                raise TargetNotPositiveInfinite(str(exc)) from None
        return self._base[k]

    def base_value(self, k: int) -> TruncatedResult:
        with precision(self.budget.const_bits):
            return materialize(self.base_series(k), self.budget)

    def monomial_series(self, m: Monomial) -> lazy.Series:
        s = self._mono.get(m)
        if s is None:
            parts = []
            for k, a in m.log_powers:
                b = self.base_series(k)
                parts.append(b if a == C_ONE else lazy.power_of(b, a))
            if m.exp_arg.terms:
                parts.append(lazy.exp_of(self.series(m.exp_arg)))
            s = reduce(lazy.mul, parts) if parts else lazy.Exact(Transseries.from_monomial(ONE_M))
            self._mono[m] = s
        return s

    def series(self, x: Transseries) -> lazy.Series:
        """Lazy ``x o g``."""
        return lazy.add(*(lazy.scaled(self.monomial_series(t.monomial), t.coeff) for t in x.terms))

    def compose_series(self, s: lazy.Series) -> lazy.Series:
        """Lazy ``s o g`` for a lazy ``s``, term by term.

        Substitution preserves the strict order of monomials, so the images of
        successive terms have strictly decreasing leading monomials.
        """
        if isinstance(s, lazy.Exact):
            return self.series(s.value)

        def part(i: int):
            t = s.term(i)
            if t is None:
                return None
            return lazy.scaled(self.monomial_series(t.monomial), t.coeff)

        return lazy.Cascade(part)

    def apply(self, x: Transseries) -> TruncatedResult:
        with precision(self.budget.const_bits):
            return materialize(self.series(x), self.budget)


class ExpTerm(NamedTuple):
    """``coeff * exp(exponent)`` with an arbitrary finite exponent.

    When the exponent is purely infinite this is an ordinary term.  Otherwise it
    stands for an infinite series (``exp(log(w) + 1/w) = w*exp(1/w)``), which
    cannot be a :class:`Transseries` but can still be composed and fed to the
    tree oracle.
    """

    coeff: ConstReal
    exponent: Transseries


def compose(f: Transseries, g: Transseries, budget: TruncationBudget = DEFAULT_BUDGET) -> TruncatedResult:
    """``f o g`` for ``g > R``, truncated to ``budget.max_terms`` terms."""
    return Substitution(g, budget).apply(f)


def compose_exp_terms(
    f: Sequence[ExpTerm], g: Transseries, budget: TruncationBudget = DEFAULT_BUDGET
) -> TruncatedResult:
    """``(sum of coeff*exp(exponent)) o g``; the sum itself is expanded lazily."""
    sub = Substitution(g, budget)
    with precision(budget.const_bits):
        s = lazy.add(*(lazy.scaled(lazy.exp_of(sub.series(e.exponent)), e.coeff) for e in f))
        return materialize(s, budget)


def compose_right_identity_check(f: Transseries, budget: TruncationBudget = DEFAULT_BUDGET) -> bool:
    """Does ``f o w`` come back exactly as ``f``?"""
    r = compose(f, omega(), budget)
    return r.exact and r.value == f


# admissible trees ----------------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibleTree:
    """Root term with children; a log-atom root is a leaf carrying one term of ``log_k(g)``."""

    root: Term | ExpTerm
    children: tuple["AdmissibleTree", ...] = ()
    leaf_value: Term | None = None

    @property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children)

    @property
    def is_atom_leaf(self) -> bool:
        return self.leaf_value is not None


def _atom_index(t) -> int | None:
    """``k`` if the root is exactly the log atom ``l_k`` (unit coefficient)."""
    if isinstance(t, ExpTerm) or t.coeff != C_ONE:
        return None
    k = t.monomial.log_atom_index()
    return k if k else None  # w itself is exp(log(w)), not an atom leaf


def _exponent(t) -> Transseries:
    return t.exponent if isinstance(t, ExpTerm) else formal_log(t.monomial)


def _mul_terms(a: Term, b: Term) -> Term:
    return Term(a.coeff * b.coeff, a.monomial * b.monomial)


class _TreeOracle:
    """Enumerates admissible trees for one substitution.

    Trees are searched top down with a cutoff: a tree is kept only if its
    contribution is >= ``cutoff``.  Since every child contributes an
    infinitesimal factor, each child of a root with prefactor ``R`` must itself
    contribute at least ``cutoff / R``; this bounds the search.
    """

    def __init__(self, sub: Substitution, max_size: int):
        self.sub = sub
        self.max_size = max_size
        self._upper: dict[Transseries, tuple[ConstReal, Monomial]] = {}
        self._cands: dict[tuple[Term, Monomial], list] = {}

    # the prefactor exp(c(gamma) restricted to >= 1) -------------------------------

    def prefactor(self, t) -> Term:
        gamma = _exponent(t)
        if not gamma.terms:
            return Term(t.coeff, ONE_M)
        hit = self._upper.get(gamma)
        if hit is None:
            upper = self.weighted_sum(gamma, ONE_M)
            d = decompose(upper)
            hit = (const_exp(d.real), exp_monomial(d.big))
            self._upper[gamma] = hit
        c, m = hit
        return Term(t.coeff * c, m)

    # candidate children -----------------------------------------------------------

    def trees(self, t: Term, cutoff: Monomial) -> list[tuple[AdmissibleTree, Term]]:
        """All trees rooted at ``t`` with contribution >= cutoff, each with its contribution.

        Children are kept as ordered tuples, so trees that differ only by the
        order of their children are all listed.
        """
        out = []
        for tree, contrib in self._search(t, cutoff):
            out.append((tree, contrib))
        return out

    def weighted_sum(self, x, cutoff: Monomial) -> Transseries:
        """Sum of contributions >= cutoff over all trees of all terms of ``x``."""
        acc: dict[Monomial, ConstReal] = {}
        roots = x.terms if isinstance(x, Transseries) else x
        for t in roots:
            for m, (c, _) in self._grouped(t, cutoff).items():
                acc[m] = acc.get(m, ConstReal(0)) + c
        return Transseries((c, m) for m, c in acc.items())

    def _grouped(self, t, cutoff: Monomial) -> dict[Monomial, tuple[ConstReal, int]]:
        """Contributions >= cutoff of the trees rooted at ``t``, summed per monomial.

        Each value is (total coefficient, size of the smallest tree).  Summing
        over ordered n-tuples of child trees and dividing by n! is the same as
        summing over multisets of child monomials ``m`` with weight
        ``prod C_m**k_m / k_m!``, where ``C_m`` is the total coefficient of the
        child trees contributing ``m``; that is what is walked here.
        """
        key = (t, cutoff)
        hit = self._cands.get(key)
        if hit is not None:
            return hit
        out: dict[Monomial, list] = {}

        def put(m, c, size):
            cur = out.get(m)
            if cur is None:
                out[m] = [c, size]
            else:
                cur[0] = cur[0] + c
                cur[1] = min(cur[1], size)

        k = _atom_index(t)
        if k is not None:
            for s in self.sub.base_series(k).above(cutoff).terms:
                put(s.monomial, s.coeff, 1)
        else:
            head = self.prefactor(t)
            gamma = _exponent(t)
            if mono_compare(head.monomial, cutoff) >= 0:
                put(head.monomial, head.coeff, 1)
                if gamma.terms:
                    need = cutoff / head.monomial
                    groups: dict[Monomial, list] = {}
                    for u in gamma.terms:
                        for m, (c, size) in self._grouped(u, need).items():
                            if compare_one(m) >= 0:
                                continue
                            g = groups.get(m)
                            if g is None:
                                groups[m] = [c, size]
                            else:
                                g[0] = g[0] + c
                                g[1] = min(g[1], size)
                    cands = [(m, c, size) for m, (c, size) in groups.items() if c]
                    cands.sort(key=lambda e: _MonoKey(e[0]), reverse=True)
                    for m, c, size in self._multisets(cands, need):
                        put(head.monomial * m, head.coeff * c, size)
        res = {m: (c, size) for m, (c, size) in out.items() if c}
        self._cands[key] = res
        return res

    def _multisets(self, cands, need):
        # (monomial, weighted coefficient, size) for every nonempty multiset of
        # candidates whose product stays >= need; candidates are sorted decreasingly
        stack = [(0, ONE_M, C_ONE, 1, -1, 0)]
        while stack:
            start, mono, coeff, size, last, run = stack.pop()
            for idx in range(start, len(cands)):
                m, c, sz = cands[idx]
                prod = mono * m
                if mono_compare(prod, need) < 0:
                    break
                new_size = size + sz
                if new_size > self.max_size:
                    raise BudgetExhausted(
                        f"admissible tree above the cutoff exceeds max_size={self.max_size}"
                    )
                k = run + 1 if idx == last else 1
                w = coeff * c / k
                yield prod, w, new_size
                stack.append((idx, prod, w, new_size, idx, k))

    def _ordered_children(self, gamma: Transseries, need: Monomial) -> list:
        out = []
        for u in gamma.terms:
            for tree, contrib in self._search(u, need):
                if compare_one(contrib.monomial) < 0:
                    out.append((tree, contrib))
        out.sort(key=_monomial_sort_key, reverse=True)
        return out

    def _search(self, t, cutoff: Monomial) -> Iterator[tuple]:
        k = _atom_index(t)
        if k is not None:
            for s in self.sub.base_series(k).above(cutoff).terms:
                yield AdmissibleTree(t, (), s), s
            return
        head = self.prefactor(t)
        if mono_compare(head.monomial, cutoff) < 0:
            return
        gamma = _exponent(t)
        yield AdmissibleTree(t), head
        if not gamma.terms:
            return
        need = cutoff / head.monomial
        cands = self._ordered_children(gamma, need)
        if not cands:
            return
        yield from self._tuples(t, head, cands, need)

    def _tuples(self, t, head, cands, need):
        # depth-first over ordered child sequences, pruned by the sorted candidates
        stack = [((), ONE_M, C_ONE, 1)]
        while stack:
            chosen, mono, coeff, size = stack.pop()
            for idx, (tree, contrib) in enumerate(cands):
                m = mono * contrib.monomial
                if mono_compare(m, need) < 0:
                    break  # candidates are sorted, the rest are smaller still
                new_size = size + tree.size
                if new_size > self.max_size:
                    raise BudgetExhausted(
                        f"admissible tree above the cutoff exceeds max_size={self.max_size}"
                    )
                seq = chosen + (idx,)
                c = coeff * contrib.coeff
                factor = ConstReal(f"1/{math.factorial(len(seq))}")
                children = tuple(cands[j][0] for j in seq)
                yield AdmissibleTree(t, children), Term(head.coeff * c * factor, head.monomial * m)
                stack.append((seq, m, c, new_size))


def _monomial_sort_key(entry):
    return _MonoKey(entry[1].monomial)


class _MonoKey:
    __slots__ = ("m",)

    def __init__(self, m):
        self.m = m

    def __lt__(self, other):
        return mono_compare(self.m, other.m) < 0


def enumerate_admissible_trees(
    t: Term | ExpTerm, sub: Substitution, cutoff: Monomial, max_size: int = 64
) -> list[AdmissibleTree]:
    """All admissible trees rooted at ``t`` whose contribution is >= ``cutoff``."""
    with precision(sub.budget.const_bits):
        oracle = _TreeOracle(sub, max_size)
        return [tree for tree, _ in oracle.trees(t, cutoff)]


def contribution(tree: AdmissibleTree, sub: Substitution) -> Term:
    """``r exp(c(gamma)^{>=1}) / n! * prod(children)``, or the carried term for a leaf."""
    with precision(sub.budget.const_bits):
        return _contribution(tree, _TreeOracle(sub, 1 << 30))


def _contribution(tree: AdmissibleTree, oracle: _TreeOracle) -> Term:
    if tree.leaf_value is not None:
        return tree.leaf_value
    out = oracle.prefactor(tree.root)
    for child in tree.children:
        out = _mul_terms(out, _contribution(child, oracle))
    n = len(tree.children)
    return Term(out.coeff / math.factorial(n), out.monomial)


def tree_oracle_compose(
    f: Transseries | Iterable[ExpTerm],
    g: Transseries,
    cutoff: Monomial,
    max_size: int = 64,
    budget: TruncationBudget = DEFAULT_BUDGET,
) -> Transseries:
    """``f o g`` on the monomials >= ``cutoff``, summed over admissible trees."""
    sub = Substitution(g, budget)
    if not isinstance(f, Transseries):
        f = tuple(f)
    with precision(budget.const_bits):
        return _TreeOracle(sub, max_size).weighted_sum(f, cutoff)


# Taylor expansion ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaylorExpansion:
    """Coefficients ``(d^n f o x) / n!`` for ``n = 0..order``."""

    center: Transseries
    coefficients: tuple[TruncatedResult, ...]
    order: int = field(default=0)


def taylor_expand(
    f: Transseries, x: Transseries, order: int, budget: TruncationBudget = DEFAULT_BUDGET
) -> TaylorExpansion:
    sub = Substitution(x, budget)
    coeffs = []
    d = f
    for n in range(order + 1):
        r = sub.apply(d)
        scale = ConstReal(f"1/{math.factorial(n)}")
        coeffs.append(TruncatedResult(r.value.scale(scale), r.exact, r.error_bound))
        d = derive(d)
    return TaylorExpansion(x, tuple(coeffs), order)


@dataclass(frozen=True)
class TaylorReport:
    """Details of one Taylor check: the comparison region and the residual."""

    ok: bool
    lhs: TruncatedResult
    rhs: Transseries
    bound: Monomial | None
    remainder: Monomial | None
    residual: Transseries


def taylor_report(
    f: Transseries,
    x: Transseries,
    eps: Transseries,
    order: int,
    budget: TruncationBudget = DEFAULT_BUDGET,
) -> TaylorReport:
    """Compare ``f o (x + eps)`` with ``sum_{n<=order} c_n eps**n``.

    The two sides must agree on every monomial that is at least every
    certified error bound and strictly above the remainder scale
    ``lm(c_{order+1}) * lm(eps)**(order+1)``.
    """
    with precision(budget.const_bits):
        if not is_positive_infinite(x):
            raise TargetNotPositiveInfinite("Taylor expansion needs x > R")
        coeffs = taylor_expand(f, x, order + 1, budget).coefficients
        lhs = compose(f, x + eps, budget)
        mu = leading_monomial(eps) if eps.terms else None
        if mu is not None:
            _check_small(mu, coeffs)
        rhs = ZERO_TS
        power = Transseries.constant(1)
        bounds = [] if lhs.exact else [lhs.error_bound]
        for n in range(order + 1):
            c = coeffs[n]
            rhs = rhs + c.value * power
            if not c.exact and (n == 0 or mu is not None):
                bounds.append(c.error_bound if n == 0 else c.error_bound * mu ** n)
            power = power * eps
        remainder = None
        nxt = coeffs[order + 1]
        if mu is not None:
            scale = leading_monomial(nxt.value) if nxt.value.terms else nxt.error_bound
            if scale is not None:
                remainder = scale * mu ** (order + 1)
        bound = None
        for b in bounds:
            if bound is None or mono_compare(b, bound) > 0:
                bound = b
        residual = lhs.value - rhs

        def in_region(m: Monomial) -> bool:
            if bound is not None and mono_compare(m, bound) < 0:
                return False
            return remainder is None or mono_compare(m, remainder) > 0

        bad = residual.restrict(in_region)
        return TaylorReport(not bad.terms, lhs, rhs, bound, remainder, residual)


def _check_small(mu: Monomial, coeffs) -> None:
    for c in coeffs:
        for t in c.value.terms:
            if mono_compare(mu, t.monomial) >= 0:
                raise EpsilonTooLarge("eps is not below every coefficient monomial")


def taylor_check(
    f: Transseries,
    x: Transseries,
    eps: Transseries,
    order: int,
    budget: TruncationBudget = DEFAULT_BUDGET,
) -> bool:
    """Does ``f o (x + eps)`` match the Taylor polynomial of order ``order`` on the certified region?"""
    return taylor_report(f, x, eps, order, budget).ok


__all__ = [
    "Substitution",
    "compose",
    "compose_right_identity_check",
    "compose_exp_terms",
    "ExpTerm",
    "AdmissibleTree",
    "enumerate_admissible_trees",
    "contribution",
    "tree_oracle_compose",
    "TaylorExpansion",
    "TaylorReport",
    "taylor_expand",
    "taylor_check",
    "taylor_report",
]
