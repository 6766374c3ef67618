"""Monomials, terms and finite transseries.

A monomial is a product ``prod_k l_k**a_k * exp(gamma)`` where ``l_0 = w`` is
the infinite variable, ``l_{k+1} = log(l_k)`` and ``gamma`` is purely infinite
(every monomial of its support is > 1).  The representation is made unique by
absorbing exponent terms ``r * l_j`` with ``j >= 1`` into the power of
``l_{j-1}``; a term ``r * w`` stays in the exponent and stands for ``exp(r w)``.

Monomials are ordered by comparing their formal logarithms.  The formal log of
``m / n`` is ``sum_k (a_k - b_k) l_{k+1} + (gamma - delta)`` and its sign is the
sign of its leading coefficient.  The exponent part lives one exponential level
lower, so the recursion is well founded.

A :class:`Transseries` is a finite sum of terms with strictly decreasing
monomials.  The arithmetic here (``+``, ``*``, integer powers) is exact; the
truncating operations live in :mod:`omegaseries.arith` and
:mod:`omegaseries.analysis`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from typing import Iterable, NamedTuple, Union

from .constants import ONE as C_ONE
from .constants import ZERO as C_ZERO
from .constants import ConstReal, as_const, const_exp_part, const_sign
from .errors import IndexOutOfRange, NonPositiveArgument, ZeroArgument


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class Dominance(IntEnum):
    STRICT_LESS = -1  # x < y in the dominance sense (x is negligible)
    COMPARABLE = 0
    STRICT_GREATER = 1


Scalar = Union[int, Fraction, ConstReal]


class Monomial:
    """Canonical monomial ``prod_k l_k**a_k * exp(exp_arg)``.  Immutable, hashable."""

    __slots__ = ("log_powers", "exp_arg", "_hash")

    def __init__(self, log_powers: Iterable | dict = (), exp_arg: "Transseries | None" = None):
        powers: dict[int, ConstReal] = {}
        items = log_powers.items() if isinstance(log_powers, dict) else log_powers
        for k, a in items:
            if k < 0:
                raise ValueError("log index must be >= 0")
            powers[k] = powers.get(k, C_ZERO) + as_const(a)
        keep = []
        if exp_arg is not None:
            for t in exp_arg.terms:
                j = t.monomial.log_atom_index()
                if j is not None and j >= 1:
                    powers[j - 1] = powers.get(j - 1, C_ZERO) + t.coeff
                else:
                    keep.append(t)
        gamma = PurelyInfinite(Transseries._trusted(tuple(keep)))
        lp = tuple(sorted((k, a) for k, a in powers.items() if a))
        self._set(lp, gamma)

    def _set(self, lp: tuple, gamma: "PurelyInfinite") -> None:
        self.log_powers = lp
        self.exp_arg = gamma
        self._hash = hash((lp, gamma))

    @classmethod
    def _trusted(cls, lp: tuple, gamma: "Transseries") -> "Monomial":
        obj = cls.__new__(cls)
        if not isinstance(gamma, PurelyInfinite):
            gamma = PurelyInfinite._trusted(gamma.terms)
        obj._set(lp, gamma)
        return obj

    # identity and structure ------------------------------------------------

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Monomial)
            and self._hash == other._hash
            and self.log_powers == other.log_powers
            and self.exp_arg == other.exp_arg
        )

    def __hash__(self):
        return self._hash

    def is_one(self) -> bool:
        return not self.log_powers and not self.exp_arg.terms

    def log_atom_index(self) -> int | None:
        """``k`` if this monomial is exactly ``l_k``, otherwise None."""
        if self.exp_arg.terms or len(self.log_powers) != 1:
            return None
        k, a = self.log_powers[0]
        return k if a == C_ONE else None

    def power_of(self, k: int) -> ConstReal:
        for j, a in self.log_powers:
            if j == k:
                return a
        return C_ZERO

    @property
    def log_depth(self) -> int:
        d = max((k for k, _ in self.log_powers), default=0)
        for t in self.exp_arg.terms:
            d = max(d, t.monomial.log_depth)
        return d

    @property
    def exp_height(self) -> int:
        if not self.exp_arg.terms:
            return 0
        return 1 + max(t.monomial.exp_height for t in self.exp_arg.terms)

    # group operations ------------------------------------------------------

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not isinstance(other, Monomial):
            return NotImplemented
        if other.is_one():
            return self
        if self.is_one():
            return other
        powers = dict(self.log_powers)
        for k, a in other.log_powers:
            powers[k] = powers.get(k, C_ZERO) + a
        lp = tuple(sorted((k, a) for k, a in powers.items() if a))
        return Monomial._trusted(lp, self.exp_arg + other.exp_arg)

    def inverse(self) -> "Monomial":
        return Monomial._trusted(tuple((k, -a) for k, a in self.log_powers), -self.exp_arg)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        if not isinstance(other, Monomial):
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, a: Scalar) -> "Monomial":
        a = as_const(a)
        if not a:
            return ONE_M
        return Monomial._trusted(
            tuple((k, p * a) for k, p in self.log_powers), self.exp_arg.scale(a)
        )

    def formal_log(self) -> "Transseries":
        return formal_log(self)

    # ordering --------------------------------------------------------------

    def __lt__(self, other):
        return mono_compare(self, other) < 0

    def __le__(self, other):
        return mono_compare(self, other) <= 0

    def __gt__(self, other):
        return mono_compare(self, other) > 0

    def __ge__(self, other):
        return mono_compare(self, other) >= 0

    def __repr__(self):
        from .frontend.render import render_monomial

        return f"Monomial({render_monomial(self)})"


class Term(NamedTuple):
    coeff: ConstReal
    monomial: Monomial


def _sort_terms(terms: Iterable[Term]) -> tuple:
    return tuple(sorted(terms, key=cmp_to_key(lambda s, t: mono_compare(t.monomial, s.monomial))))


class Transseries:
    """A finite sum of terms with strictly decreasing monomials.  Immutable.

    ``Transseries(iterable of (coeff, monomial))`` combines equal monomials,
    drops zero coefficients and sorts.  Zero is the empty sum.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Iterable = ()):
        acc: dict[Monomial, ConstReal] = {}
        for c, m in terms:
            acc[m] = acc.get(m, C_ZERO) + as_const(c)
        self._set(_sort_terms(Term(c, m) for m, c in acc.items() if c))

    def _set(self, terms: tuple) -> None:
        self.terms = terms
        self._hash = hash(terms)

    @classmethod
    def _trusted(cls, terms: tuple) -> "Transseries":
        obj = cls.__new__(cls)
        obj._set(terms)
        return obj

    @classmethod
    def constant(cls, c: Scalar) -> "Transseries":
        c = as_const(c)
        return cls._trusted((Term(c, ONE_M),) if c else ())

    @classmethod
    def from_monomial(cls, m: Monomial, c: Scalar = 1) -> "Transseries":
        c = as_const(c)
        return cls._trusted((Term(c, m),) if c else ())

    # structure -------------------------------------------------------------

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ConstReal)):
            other = Transseries.constant(other)
        if not isinstance(other, Transseries):
            return NotImplemented
        return self._hash == other._hash and self.terms == other.terms

    def __hash__(self):
        return self._hash

    def support(self) -> tuple:
        return tuple(t.monomial for t in self.terms)

    def coefficient(self, m: Monomial) -> ConstReal:
        for t in self.terms:
            if t.monomial == m:
                return t.coeff
        return C_ZERO

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0].monomial.is_one())

    def constant_value(self) -> ConstReal:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.terms[0].coeff if self.terms else C_ZERO

    def restrict(self, keep) -> "Transseries":
        """Sub-sum of the terms whose monomial satisfies ``keep``."""
        return Transseries._trusted(tuple(t for t in self.terms if keep(t.monomial)))

    def above(self, bound: Monomial) -> "Transseries":
        """Terms with monomial >= ``bound`` (a prefix)."""
        return Transseries._trusted(
            tuple(t for t in self.terms if mono_compare(t.monomial, bound) >= 0)
        )

    # arithmetic ------------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return Transseries._trusted(tuple(Term(-t.coeff, t.monomial) for t in self.terms))

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _add(self, -other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _add(other, -self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ConstReal)):
            return self.scale(other)
        if not isinstance(other, Transseries):
            return NotImplemented
        return _mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, ConstReal)):
            return self.scale(1 / as_const(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result, base = ONE_TS, self
        while n:
            if n & 1:
                result = _mul(result, base)
            n >>= 1
            if n:
                base = _mul(base, base)
        return result

    def scale(self, c: Scalar) -> "Transseries":
        c = as_const(c)
        if not c:
            return ZERO_TS
        if c == C_ONE:
            return self
        cls = type(self) if isinstance(self, PurelyInfinite) else Transseries
        return cls._trusted(tuple(Term(t.coeff * c, t.monomial) for t in self.terms))

    def times_monomial(self, m: Monomial) -> "Transseries":
        return Transseries._trusted(tuple(Term(t.coeff, t.monomial * m) for t in self.terms))

    def __repr__(self):
        from .frontend.render import render

        return f"Transseries({render(self)!r})"

    def __str__(self):
        from .frontend.render import render

        return render(self)


class PurelyInfinite(Transseries):
    """A transseries whose support is made of monomials > 1 (checked on construction)."""

    __slots__ = ()

    def __init__(self, x: Transseries | Iterable = ()):
        if not isinstance(x, Transseries):
            x = Transseries(x)
        for t in x.terms:
            if mono_compare(t.monomial, ONE_M) <= 0:
                raise ValueError("exponent must be purely infinite")
        self._set(x.terms)


def _coerce(x):
    if isinstance(x, Transseries):
        return x
    if isinstance(x, (int, Fraction, ConstReal)):
        return Transseries.constant(x)
    return NotImplemented


def _add(x: Transseries, y: Transseries) -> Transseries:
    if not y.terms:
        return x
    if not x.terms:
        return y
    out = []
    a, b = x.terms, y.terms
    i = j = 0
    while i < len(a) and j < len(b):
        c = mono_compare(a[i].monomial, b[j].monomial)
        if c > 0:
            out.append(a[i])
            i += 1
        elif c < 0:
            out.append(b[j])
            j += 1
        else:
            s = a[i].coeff + b[j].coeff
            if s:
                out.append(Term(s, a[i].monomial))
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return Transseries._trusted(tuple(out))


def _mul(x: Transseries, y: Transseries) -> Transseries:
    if not x.terms or not y.terms:
        return ZERO_TS
    if len(y.terms) == 1:
        x, y = y, x
    if len(x.terms) == 1:
        (c, m), = x.terms
        # multiplying by one term keeps the order
        return Transseries._trusted(tuple(Term(c * t.coeff, m * t.monomial) for t in y.terms))
    acc: dict[Monomial, ConstReal] = {}
    for s in x.terms:
        for t in y.terms:
            m = s.monomial * t.monomial
            acc[m] = acc.get(m, C_ZERO) + s.coeff * t.coeff
    return Transseries._trusted(_sort_terms(Term(c, m) for m, c in acc.items() if c))


# canonical constants ----------------------------------------------------------

ZERO_TS = Transseries._trusted(())
ONE_M = Monomial._trusted((), PurelyInfinite._trusted(()))
ONE_TS = Transseries._trusted((Term(C_ONE, ONE_M),))

_ELL: list[Monomial] = []


def ell_monomial(k: int) -> Monomial:
    """The monomial ``l_k`` (``l_0 = w``)."""
    while len(_ELL) <= k:
        _ELL.append(Monomial._trusted(((len(_ELL), C_ONE),), ZERO_TS))
    return _ELL[k]


def ell(k: int) -> Transseries:
    return Transseries.from_monomial(ell_monomial(k))


def omega() -> Transseries:
    return ell(0)


def exp_monomial(gamma: Transseries) -> Monomial:
    """The monomial ``exp(gamma)`` for purely infinite ``gamma`` (canonicalized)."""
    return Monomial((), gamma)


def constant(c: Scalar) -> Transseries:
    return Transseries.constant(c)


# ordering ---------------------------------------------------------------------


def formal_log(m: Monomial) -> Transseries:
    """``log m = sum_k a_k l_{k+1} + gamma``, exact and purely infinite (or 0)."""
    extra = tuple(Term(a, ell_monomial(k + 1)) for k, a in m.log_powers)
    if not extra:
        return Transseries._trusted(m.exp_arg.terms)
    # the l-terms are already decreasing; merge them with the exponent terms
    return _add(Transseries._trusted(extra), Transseries._trusted(m.exp_arg.terms))


def mono_compare(m: Monomial, n: Monomial) -> Ordering:
    """Compare two monomials: LESS means ``m`` is asymptotically smaller."""
    if m is n or m == n:
        return Ordering.EQUAL
    return Ordering(_compare_distinct(m, n))


@lru_cache(maxsize=1 << 18)
def _compare_distinct(m: Monomial, n: Monomial) -> int:
    return _log_sign(m / n)


def _log_sign(q: Monomial) -> int:
    """Sign of ``formal_log(q)`` for ``q != 1``, i.e. +1 iff ``q > 1``."""
    lp, gamma = q.log_powers, q.exp_arg.terms
    if not gamma:
        return const_sign(lp[0][1])
    lead = gamma[0]
    if not lp:
        return const_sign(lead.coeff)
    k0, a0 = lp[0]
    # the largest log term of the formal log is a0 * l_{k0+1}; canonical form
    # guarantees it is not itself a monomial of gamma
    if mono_compare(lead.monomial, ell_monomial(k0 + 1)) > 0:
        return const_sign(lead.coeff)
    return const_sign(a0)


def compare_one(m: Monomial) -> Ordering:
    """Compare ``m`` with the monomial 1."""
    if m.is_one():
        return Ordering.EQUAL
    return Ordering(_log_sign(m))


def ts_sign(x: Transseries) -> int:
    return const_sign(x.terms[0].coeff) if x.terms else 0


def ts_compare(x: Transseries, y: Transseries) -> Ordering:
    """Order of the ordered field: sign of the leading coefficient of ``x - y``."""
    return Ordering(ts_sign(_add(x, -y)))


def leading_monomial(x: Transseries) -> Monomial:
    if not x.terms:
        raise ZeroArgument("zero has no leading monomial")
    return x.terms[0].monomial


def leading_term(x: Transseries) -> Term:
    if not x.terms:
        raise ZeroArgument("zero has no leading term")
    return x.terms[0]


def leading_coefficient(x: Transseries) -> ConstReal:
    return leading_term(x).coeff


def smallest_monomial(x: Transseries) -> Monomial:
    if not x.terms:
        raise ZeroArgument("zero has no monomials")
    return x.terms[-1].monomial


def log_up(x: Transseries) -> PurelyInfinite:
    """Purely infinite part of ``log x``, i.e. the exponent of the leading monomial."""
    t = leading_term(x)
    if const_sign(t.coeff) < 0:
        raise NonPositiveArgument("log_up of a negative series")
    return PurelyInfinite._trusted(formal_log(t.monomial).terms)


def dominance(x: Transseries, y: Transseries) -> Dominance:
    if not y.terms:
        raise ZeroArgument("dominance against zero")
    if not x.terms:
        return Dominance.STRICT_LESS
    return Dominance(int(mono_compare(x.terms[0].monomial, y.terms[0].monomial)))


def asymptotic(x: Transseries, y: Transseries) -> bool:
    """``x ~ y``: identical leading terms."""
    if not y.terms:
        raise ZeroArgument("asymptotic comparison against zero")
    return bool(x.terms) and x.terms[0] == y.terms[0]


def is_positive_infinite(x: Transseries) -> bool:
    """``x > R``: positive leading coefficient on a monomial > 1."""
    return bool(x.terms) and compare_one(x.terms[0].monomial) > 0 and ts_sign(x) > 0


def is_infinitesimal(x: Transseries) -> bool:
    return not x.terms or compare_one(x.terms[0].monomial) < 0


@dataclass(frozen=True)
class Decomposition:
    big: PurelyInfinite
    real: ConstReal
    small: Transseries

    def reassemble(self) -> Transseries:
        return _add(_add(self.big, Transseries.constant(self.real)), self.small)


def decompose(x: Transseries) -> Decomposition:
    big, small = [], []
    real = C_ZERO
    for t in x.terms:
        c = compare_one(t.monomial)
        if c > 0:
            big.append(t)
        elif c == 0:
            real = t.coeff
        else:
            small.append(t)
    return Decomposition(
        PurelyInfinite._trusted(tuple(big)), real, Transseries._trusted(tuple(small))
    )


def truncate_at(x: Transseries, beta: int) -> Transseries:
    if not 0 <= beta <= len(x.terms):
        raise IndexOutOfRange(f"truncation index {beta} outside 0..{len(x.terms)}")
    return Transseries._trusted(x.terms[:beta])


def is_truncation(y: Transseries, x: Transseries) -> bool:
    return x.terms[: len(y.terms)] == y.terms


def erank(x: Transseries, fold_constant_exponents: bool = True) -> int:
    """Exponential rank.

    0 for 0 and for a log atom ``l_k``; otherwise one more than the largest rank
    among the exponents ``gamma`` of the monomials ``exp(gamma)`` in the support.

    With ``fold_constant_exponents`` a coefficient of the form
    ``q * exp(c) * ...`` lends its ``c`` to the exponent, so ``exp(w + 1)``,
    stored as ``exp(1) * exp(w)``, has the rank of the expression it was
    written as (2) rather than that of its monomial ``exp(w)`` (1).  Rational
    and other coefficients are plain scalars either way.
    """
    if not x.terms:
        return 0
    if len(x.terms) == 1:
        t = x.terms[0]
        if t.coeff == C_ONE and t.monomial.log_atom_index() is not None:
            return 0
    best = 0
    for t in x.terms:
        c = const_exp_part(t.coeff) if fold_constant_exponents else None
        best = max(best, _term_erank(t.monomial, c, fold_constant_exponents))
    return 1 + best


@lru_cache(maxsize=4096)
def _term_erank(m: Monomial, c: ConstReal | None, fold: bool) -> int:
    gamma = formal_log(m)
    if c is not None:
        gamma = gamma + Transseries.constant(c)
    return erank(gamma, fold)
