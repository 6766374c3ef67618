"""Lazily expanded series.

The truncating operations (inverse, exp, log, composition) all reduce to sums,
products and power series in an infinitesimal.  Instead of expanding those with
a guessed number of terms and then propagating error bounds, each intermediate
value is a :class:`Series`: a memoized stream that produces its terms one at a
time in strictly decreasing monomial order.  Asking for the first ``N`` terms
of a result pulls exactly as much of every ingredient as those ``N`` terms need,
so the returned terms are always the true leading terms of the exact value and
the bound certifying the discarded tail is simply the last monomial produced.

Merging is done with heaps keyed by the monomial order:

* a sum merges the heads of its parts,
* a product of ``a`` and ``b`` walks the grid ``a_i * b_j`` (the next candidate
  after ``(i, j)`` is ``(i, j + 1)``, plus ``(i + 1, 0)`` when ``j == 0``),
* ``sum_n c_n d**n`` for infinitesimal ``d`` opens the stream of ``d**(n+1)`` only
  once the head of ``d**n`` has been emitted, since everything in ``d**(n+1)``
  lies below it.

A stream that keeps producing cancelling coefficients (for instance
``y * (1/y) - 1``) cannot be told apart from zero, so after
:data:`CANCELLATION_LIMIT` consecutive cancellations it raises
:class:`BudgetExhausted`.  Everything produced before that is still correct.
"""

from __future__ import annotations

import contextlib
import contextvars
import heapq
import itertools
import threading
from typing import Callable, Iterator, Sequence

from .constants import ONE as C_ONE
from .constants import ConstReal, const_exp, const_log, const_pow, const_sign
from .core import (
    ONE_M,
    Monomial,
    Term,
    Transseries,
    compare_one,
    exp_monomial,
    formal_log,
    mono_compare,
)
from .errors import BudgetExhausted, NonPositiveArgument, ZeroArgument

CANCELLATION_LIMIT = 40
# exp(x) needs every term of x that is >= 1; past this many the infinite part is
# taken to be an infinite sum, whose exponential is not a finite monomial
EXPONENT_TERM_LIMIT = 64
_limit: contextvars.ContextVar[int] = contextvars.ContextVar("cancellation_limit", default=CANCELLATION_LIMIT)


def current_cancellation_limit() -> int:
    return _limit.get()


@contextlib.contextmanager
def cancellation_limit(n: int) -> Iterator[None]:
    """Temporarily change how many consecutive cancellations a stream tolerates."""
    token = _limit.set(n)
    try:
        yield
    finally:
        _limit.reset(token)


class _Max:
    """Heap key that pops the largest monomial first."""

    __slots__ = ("m",)

    def __init__(self, m: Monomial):
        self.m = m

    def __lt__(self, other: "_Max") -> bool:
        return mono_compare(self.m, other.m) > 0

    def __eq__(self, other) -> bool:
        return self.m == other.m


class Series:
    """A memoized stream of terms in strictly decreasing monomial order."""

    def __init__(self) -> None:
        self._buf: list[Term] = []
        self._it: Iterator[Term] | None = None
        self._done = False
        self._error: BaseException | None = None
        self._lock = threading.RLock()

    def _gen(self) -> Iterator[Term]:
        raise NotImplementedError

    def term(self, i: int) -> Term | None:
        """The ``i``-th term, or None if the series has at most ``i`` terms."""
        if i < len(self._buf):
            return self._buf[i]
        with self._lock:
            while len(self._buf) <= i and not self._done:
                if self._error is not None:
                    raise self._error
                if self._it is None:
                    self._it = self._gen()
                try:
                    self._buf.append(next(self._it))
                except StopIteration:
                    self._done = True
                except BudgetExhausted as exc:
                    self._error = exc
                    raise
        return self._buf[i] if i < len(self._buf) else None

    def lead(self) -> Term | None:
        return self.term(0)

    def is_zero(self) -> bool:
        return self.term(0) is None

    def ended_within(self, n: int) -> bool:
        """True if the series is known to have at most ``n`` terms."""
        return self.term(n) is None

    def take(self, n: int) -> list[Term]:
        out = []
        for i in range(n):
            t = self.term(i)
            if t is None:
                break
            out.append(t)
        return out

    def above(self, bound: Monomial, limit: int = 100_000) -> Transseries:
        """All terms with monomial >= ``bound``."""
        out = []
        for i in itertools.count():
            t = self.term(i)
            if t is None or mono_compare(t.monomial, bound) < 0:
                break
            if i >= limit:
                raise BudgetExhausted("too many terms above the requested bound")
            out.append(t)
        return Transseries._trusted(tuple(out))

    def exact(self, limit: int) -> Transseries | None:
        """The whole value if it has at most ``limit`` terms."""
        if self.term(limit) is not None:
            return None
        return Transseries._trusted(tuple(self.take(limit)))


class Exact(Series):
    def __init__(self, x: Transseries):
        super().__init__()
        self._buf = list(x.terms)
        self._done = True
        self.value = x


def exact(x: Transseries) -> Exact:
    return Exact(x)


def const_series(c: ConstReal) -> Exact:
    return Exact(Transseries.constant(c))


class Scaled(Series):
    """``coeff * mono * s``."""

    def __init__(self, s: Series, coeff: ConstReal = C_ONE, mono: Monomial = ONE_M):
        super().__init__()
        self.s, self.coeff, self.mono = s, coeff, mono

    def _gen(self):
        for i in itertools.count():
            t = self.s.term(i)
            if t is None:
                return
            yield Term(t.coeff * self.coeff, t.monomial * self.mono)


def scaled(s: Series, coeff: ConstReal = C_ONE, mono: Monomial = ONE_M) -> Series:
    if coeff == C_ONE and mono.is_one():
        return s
    if not coeff:
        return Exact(Transseries._trusted(()))
    if isinstance(s, Exact):
        return Exact(
            Transseries._trusted(tuple(Term(t.coeff * coeff, t.monomial * mono) for t in s.value.terms))
        )
    return Scaled(s, coeff, mono)


class Drop(Series):
    """The series without its first ``k`` terms."""

    def __init__(self, s: Series, k: int):
        super().__init__()
        self.s, self.k = s, k

    def _gen(self):
        for i in itertools.count(self.k):
            t = self.s.term(i)
            if t is None:
                return
            yield t


class Concat(Series):
    """``a + b`` where every monomial of ``a`` exceeds every monomial of ``b``."""

    def __init__(self, a: Series, b: Series):
        super().__init__()
        self.a, self.b = a, b

    def _gen(self):
        for s in (self.a, self.b):
            for i in itertools.count():
                t = s.term(i)
                if t is None:
                    break
                yield t


def _merge(heap: list, advance: Callable, what: str) -> Iterator[Term]:
    """Pop equal monomials off the heap, add them up and yield nonzero sums.

    Heap entries are ``(_Max(m), tiebreak, coeff, *position)``.  ``advance``
    pushes the successors of a popped entry; it is only called after the
    current term has been handed out, so a consumer that stops here never
    forces the next term of any ingredient.  Successors always lie strictly
    below the popped monomial, which makes the deferral safe.
    """
    todo: list = []
    cancelled = 0
    limit = _limit.get()
    while True:
        for entry in todo:
            advance(entry)
        todo.clear()
        if not heap:
            return
        entry = heapq.heappop(heap)
        todo.append(entry)
        m, c = entry[0].m, entry[2]
        while heap and heap[0][0].m == m:
            other = heapq.heappop(heap)
            todo.append(other)
            c = c + other[2]
        if c:
            cancelled = 0
            yield Term(c, m)
        else:
            cancelled += 1
            if cancelled > limit:
                raise BudgetExhausted(f"cannot certify the next term of a {what} (cancellation)")


class Sum(Series):
    def __init__(self, parts: Sequence[Series]):
        super().__init__()
        self.parts = list(parts)

    def _gen(self):
        heap: list = []
        counter = itertools.count()

        def push(p: int, pos: int) -> None:
            t = self.parts[p].term(pos)
            if t is not None:
                heapq.heappush(heap, (_Max(t.monomial), next(counter), t.coeff, p, pos))

        def advance(entry) -> None:
            push(entry[3], entry[4] + 1)

        for p in range(len(self.parts)):
            push(p, 0)
        yield from _merge(heap, advance, "sum")


class Product(Series):
    def __init__(self, a: Series, b: Series):
        super().__init__()
        self.a, self.b = a, b

    def _gen(self):
        heap: list = []
        counter = itertools.count()
        a, b = self.a, self.b

        def push(i: int, j: int) -> None:
            s, t = a.term(i), b.term(j)
            if s is not None and t is not None:
                heapq.heappush(
                    heap, (_Max(s.monomial * t.monomial), next(counter), s.coeff * t.coeff, i, j)
                )

        def advance(entry) -> None:
            i, j = entry[3], entry[4]
            push(i, j + 1)
            if j == 0:
                push(i + 1, 0)

        push(0, 0)
        yield from _merge(heap, advance, "product")


def add(*parts: Series) -> Series:
    parts = tuple(p for p in parts if not (isinstance(p, Exact) and not p.value.terms))
    if not parts:
        return Exact(Transseries._trusted(()))
    if len(parts) == 1:
        return parts[0]
    if all(isinstance(p, Exact) for p in parts):
        total = Transseries._trusted(())
        for p in parts:
            total = total + p.value
        return Exact(total)
    return Sum(parts)


def mul(a: Series, b: Series) -> Series:
    if isinstance(a, Exact) and isinstance(b, Exact):
        return Exact(a.value * b.value)
    for s, other in ((a, b), (b, a)):
        if isinstance(s, Exact):
            if not s.value.terms:
                return s
            if len(s.value.terms) == 1:
                c, m = s.value.terms[0]
                return scaled(other, c, m)
    return Product(a, b)


class PowerSum(Series):
    """``sum_{n >= start} coeff(n) * d**n`` for an infinitesimal series ``d``."""

    def __init__(
        self,
        coeff: Callable[[int], ConstReal],
        d: Series,
        start: int = 1,
        degree: int | None = None,
    ):
        super().__init__()
        self.coeff_fn, self.d, self.start, self.degree = coeff, d, start, degree
        self._coeffs: dict[int, ConstReal] = {}
        self._powers: dict[int, Series] = {1: d}

    def coeff(self, n: int) -> ConstReal:
        c = self._coeffs.get(n)
        if c is None:
            c = self._coeffs[n] = self.coeff_fn(n)
        return c

    def power(self, n: int) -> Series:
        p = self._powers.get(n)
        if p is None:
            p = self._powers[n] = mul(self.power(n - 1), self.d)
        return p

    def _gen(self):
        if self.d.term(0) is None or (self.degree is not None and self.degree < self.start):
            return
        heap: list = []
        counter = itertools.count()

        def push(n: int, pos: int) -> None:
            if self.degree is not None and n > self.degree:
                return
            t = self.power(n).term(pos)
            if t is not None:
                heapq.heappush(heap, (_Max(t.monomial), next(counter), self.coeff(n) * t.coeff, n, pos))

        def advance(entry) -> None:
            n, pos = entry[3], entry[4]
            push(n, pos + 1)
            if pos == 0:
                push(n + 1, 0)

        push(self.start, 0)
        yield from _merge(heap, advance, "power series")


class Cascade(Series):
    """``sum_i part(i)`` where the leading monomials of the parts strictly decrease.

    ``part(i)`` returns None once there are no more parts.  Part ``i + 1`` lies
    entirely below the head of part ``i``, so it is opened only when that head
    is emitted, as in :class:`PowerSum`.
    """

    def __init__(self, part: Callable[[int], "Series | None"]):
        super().__init__()
        self.part_fn = part
        self._parts: dict[int, Series | None] = {}

    def part(self, i: int) -> "Series | None":
        if i not in self._parts:
            self._parts[i] = self.part_fn(i)
        return self._parts[i]

    def _gen(self):
        heap: list = []
        counter = itertools.count()

        def open_from(i: int) -> None:
            # skip parts that turn out to be zero
            while True:
                p = self.part(i)
                if p is None:
                    return
                t = p.term(0)
                if t is not None:
                    heapq.heappush(heap, (_Max(t.monomial), next(counter), t.coeff, i, 0))
                    return
                i += 1

        def advance(entry) -> None:
            i, pos = entry[3], entry[4]
            t = self.part(i).term(pos + 1)
            if t is not None:
                heapq.heappush(heap, (_Max(t.monomial), next(counter), t.coeff, i, pos + 1))
            if pos == 0:
                open_from(i + 1)

        open_from(0)
        yield from _merge(heap, advance, "sum")


def one_plus(s: Series) -> Series:
    """``1 + s`` for infinitesimal ``s``."""
    return Concat(Exact(Transseries.constant(C_ONE)), s)


# coefficient families ------------------------------------------------------------


def exp_coeff(n: int) -> ConstReal:
    f = 1
    for i in range(2, n + 1):
        f *= i
    return ConstReal(f"1/{f}")


def log1p_coeff(n: int) -> ConstReal:
    return ConstReal(f"{(-1) ** (n + 1)}/{n}")


def binomial_coeff(a: ConstReal) -> Callable[[int], ConstReal]:
    cache = {0: C_ONE}

    def coeff(n: int) -> ConstReal:
        for k in range(len(cache), n + 1):
            cache[k] = cache[k - 1] * (a - (k - 1)) / k
        return cache[n]

    return coeff


# elementary functions ----------------------------------------------------------------


def _lead(y: Series, what: str) -> Term:
    t = y.term(0)
    if t is None:
        raise ZeroArgument(f"{what} of zero")
    return t


def _relative_tail(y: Series, lead: Term) -> Series:
    """``(y - lead) / lead``, an infinitesimal."""
    rest = Exact(Transseries._trusted(y.value.terms[1:])) if isinstance(y, Exact) else Drop(y, 1)
    return scaled(rest, 1 / lead.coeff, lead.monomial.inverse())


def exp_of(x: Series) -> Series:
    """``exp(x)``: exact monomial and constant from the part >= 1, Taylor series for the rest."""
    big, real, k = [], ConstReal(0), 0
    while True:
        t = x.term(k)
        if t is None:
            break
        c = compare_one(t.monomial)
        if c < 0:
            break
        if c == 0:
            real = t.coeff
        else:
            big.append(t)
            if len(big) > EXPONENT_TERM_LIMIT:
                raise BudgetExhausted("the infinite part of the exponent does not terminate")
        k += 1
    factor = const_exp(real)
    mono = exp_monomial(Transseries._trusted(tuple(big)))
    small = Drop(x, k)
    if small.term(0) is None:
        return Exact(Transseries.from_monomial(mono, factor))
    if isinstance(x, Exact):
        small = Exact(Transseries._trusted(x.value.terms[k:]))
    return scaled(one_plus(PowerSum(exp_coeff, small)), factor, mono)


def log_of(y: Series) -> Series:
    """``log y`` for positive ``y``: formal log of the leading term plus a Mercator series."""
    lead = _lead(y, "log")
    if const_sign(lead.coeff) <= 0:
        raise NonPositiveArgument("log of a negative series")
    head = formal_log(lead.monomial) + Transseries.constant(const_log(lead.coeff))
    d = _relative_tail(y, lead)
    if d.term(0) is None:
        return Exact(head)
    return Concat(Exact(head), PowerSum(log1p_coeff, d))


def power_of(y: Series, a: ConstReal) -> Series:
    """``y**a``; ``a`` must be an integer when the leading coefficient is negative."""
    if a.is_zero():
        return Exact(Transseries.constant(C_ONE))
    lead = _lead(y, "power")
    if a.is_integer():
        n = int(a.as_fraction())
        if isinstance(y, Exact) and n >= 0:
            return Exact(y.value ** n)
        coeff = const_pow(lead.coeff, n)
        degree = n if n >= 0 else None
    else:
        if const_sign(lead.coeff) <= 0:
            raise NonPositiveArgument("non-integer power of a negative series")
        coeff = const_exp(a * const_log(lead.coeff))
        degree = None
    d = _relative_tail(y, lead)
    mono = lead.monomial ** a
    if d.term(0) is None:
        return Exact(Transseries.from_monomial(mono, coeff))
    return scaled(one_plus(PowerSum(binomial_coeff(a), d, degree=degree)), coeff, mono)


def inverse_of(y: Series) -> Series:
    _lead(y, "inverse")
    return power_of(y, ConstReal(-1))
