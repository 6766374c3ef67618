"""Exact real constants.

The coefficient field is the closure of the rationals under the field
operations, ``exp`` and ``log``.  A :class:`ConstReal` is kept in a normal form

    sum_i  q_i * exp(E_i) * prod_j A_ij ** k_ij

with rational ``q_i``, constant exponents ``E_i`` (themselves in normal form)
and integer powers of *atoms*.  An atom is either ``log(X)`` for a constant
``X`` that cannot be taken apart further, or ``1/S`` for a sum ``S`` of several
terms.  The normal form is built eagerly:

* rational arithmetic folds to a single literal,
* ``exp(a) * exp(b)`` merges to ``exp(a + b)``,
* logarithms of rationals split over primes, ``log(12) = 2 log 2 + log 3``,
* ``exp(n log X)`` with integer ``n`` is replaced by ``X**n``,
* ``log`` of a product splits into a sum of logarithms,

so that ``log(exp(a)) == a`` and ``exp(log(a)) == a`` hold structurally.
Equality is structural on the normal form.  Sign questions go through outward
rounded interval arithmetic (``mpmath.iv``) with a bounded number of bits; if the
enclosure never leaves zero we raise :class:`SignUndecided` instead of guessing.
"""

from __future__ import annotations

import contextlib
import contextvars
import threading
from fractions import Fraction
from typing import Iterator, Union

from mpmath.ctx_iv import MPIntervalContext

from .errors import DivisionByZero, LogNonPositive, SignUndecided

DEFAULT_BITS = 256

_bits_var: contextvars.ContextVar[int] = contextvars.ContextVar(
    "omegaseries_const_bits", default=DEFAULT_BITS
)


@contextlib.contextmanager
def precision(bits: int) -> Iterator[None]:
    """Set the default bit budget for sign queries inside a ``with`` block."""
    if bits < 8:
        raise ValueError("const_bits must be at least 8")
    token = _bits_var.set(int(bits))
    try:
        yield
    finally:
        _bits_var.reset(token)


def current_bits() -> int:
    return _bits_var.get()


# one private interval context; its precision is mutable state, hence the lock
_IV = MPIntervalContext()
_IV_LOCK = threading.RLock()


class _Undecided(Exception):
    """Raised internally when an enclosure is too wide for log or inversion."""


RationalLike = Union[int, Fraction, str]


class _Atom:
    __slots__ = ("kind", "arg", "text", "_hash")

    def __init__(self, kind: str, arg: "ConstReal"):
        self.kind = kind  # "log" or "inv"
        self.arg = arg
        self.text = f"{kind}({arg.text})"
        self._hash = hash(self.text)

    def __eq__(self, other):
        return isinstance(other, _Atom) and self.text == other.text

    def __hash__(self):
        return self._hash

    def base(self) -> str:
        return f"log({self.arg.text})" if self.kind == "log" else f"({self.arg.text})"

    def enclosure(self, prec: int):
        x = self.arg._enclose(prec)
        if self.kind == "log":
            if not x.a > 0:
                raise _Undecided
            return _IV.log(x)
        if not (x.a > 0 or x.b < 0):
            raise _Undecided
        return 1 / x


class _Key:
    """The non-rational part ``exp(E) * prod atoms**k`` of one term."""

    __slots__ = ("exp", "factors", "text", "_hash")

    def __init__(self, exp: "ConstReal | None", factors: tuple):
        self.exp = exp if exp is not None and exp._terms else None
        self.factors = factors
        parts = []
        if self.exp is not None:
            parts.append(f"exp({self.exp.text})")
        parts.extend(f"{a.text}^{k}" for a, k in factors)
        self.text = "*".join(parts)
        self._hash = hash(self.text)

    def __eq__(self, other):
        return isinstance(other, _Key) and self.text == other.text

    def __hash__(self):
        return self._hash

    @property
    def is_unit(self) -> bool:
        return self.exp is None and not self.factors


_UNIT = _Key(None, ())


class ConstReal:
    """An exact real constant in normal form.  Immutable.

    ``ConstReal(3)``, ``ConstReal(Fraction(1, 2))`` and ``ConstReal("2/3")``
    build rationals; everything else comes from the module functions or the
    arithmetic operators.
    """

    __slots__ = ("_terms", "text", "_hash", "_enc")

    def __init__(self, value: RationalLike | "ConstReal" = 0):
        if isinstance(value, ConstReal):
            terms = value._terms
        else:
            q = Fraction(value)
            terms = ((_UNIT, q),) if q else ()
        self._init(terms)

    def _init(self, terms: tuple) -> None:
        self._terms = terms
        self.text = _render(terms)
        self._hash = hash(self.text)
        self._enc: dict[int, object] = {}

    @classmethod
    def _from_map(cls, m: dict) -> "ConstReal":
        obj = cls.__new__(cls)
        items = sorted(((k, q) for k, q in m.items() if q), key=lambda kq: kq[0].text)
        obj._init(tuple(items))
        return obj

    # structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self._terms[0][0].is_unit)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self.text} is not rational")
        return self._terms[0][1] if self._terms else Fraction(0)

    def is_integer(self) -> bool:
        return self.is_rational() and self.as_fraction().denominator == 1

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ConstReal(other)
        if not isinstance(other, ConstReal):
            return NotImplemented
        return self.text == other.text

    def __hash__(self):
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"ConstReal({self.text!r})"

    def __str__(self):
        return self.text

    # arithmetic ----------------------------------------------------------

    def __add__(self, other):
        return const_add(self, _coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return const_neg(self)

    def __sub__(self, other):
        return const_add(self, const_neg(_coerce(other)))

    def __rsub__(self, other):
        return const_add(_coerce(other), const_neg(self))

    def __mul__(self, other):
        return const_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return const_mul(self, const_inv(_coerce(other)))

    def __rtruediv__(self, other):
        return const_mul(_coerce(other), const_inv(self))

    def __pow__(self, n: int):
        return const_pow(self, n)

    def __lt__(self, other):
        return const_sign(self - _coerce(other)) < 0

    def __le__(self, other):
        return const_sign(self - _coerce(other)) <= 0

    def __gt__(self, other):
        return const_sign(self - _coerce(other)) > 0

    def __ge__(self, other):
        return const_sign(self - _coerce(other)) >= 0

    def __float__(self):
        x = self.enclosure(64)
        return float(x.mid.a)

    # enclosures ------------------------------------------------------------

    def enclosure(self, bits: int):
        """An ``mpmath`` interval containing the value, computed at ``bits``.

        Raises :class:`SignUndecided` if some logarithm or reciprocal inside
        cannot be evaluated because its argument's enclosure touches zero.
        """
        try:
            return self._enclose(bits)
        except _Undecided:
            raise SignUndecided(f"enclosure of {self.text} undefined at {bits} bits") from None

    def _enclose(self, prec: int):
        hit = self._enc.get(prec)
        if hit is not None:
            return hit
        with _IV_LOCK:
            old = _IV.prec
            _IV.prec = prec
            try:
                total = _IV.mpf(0)
                for key, q in self._terms:
                    total += _term_enclosure(key, q, prec)
            finally:
                _IV.prec = old
        # monotone idempotent cache: a given precision always yields the same interval
        self._enc[prec] = total
        return total


def _term_enclosure(key: _Key, q: Fraction, prec: int):
    v = _IV.mpf(q.numerator) / _IV.mpf(q.denominator)
    if key.exp is not None:
        v = v * _IV.exp(key.exp._enclose(prec))
        _IV.prec = prec  # nested calls restore their own precision; be explicit
    for atom, k in key.factors:
        a = atom.enclosure(prec)
        _IV.prec = prec
        v = v * (a ** k if k > 0 else 1 / (a ** (-k)))
    return v


def _coerce(x) -> ConstReal:
    if isinstance(x, ConstReal):
        return x
    if isinstance(x, (int, Fraction)):
        return ConstReal(x)
    return NotImplemented  # type: ignore[return-value]


# rendering -------------------------------------------------------------------


def _render(terms: tuple) -> str:
    if not terms:
        return "0"
    out = []
    for i, (key, q) in enumerate(terms):
        body = _render_term(key, abs(q))
        if i == 0:
            out.append(("-" if q < 0 else "") + body)
        else:
            out.append((" - " if q < 0 else " + ") + body)
    return "".join(out)


def _render_term(key: _Key, q: Fraction) -> str:
    num: list[str] = []
    den: list[str] = []
    if key.exp is not None:
        num.append(f"exp({key.exp.text})")
    for atom, k in key.factors:
        if atom.kind == "inv":
            k = -k
        base = atom.base()
        piece = base if abs(k) == 1 else f"{base}^{abs(k)}"
        (num if k > 0 else den).append(piece)
    if q.numerator != 1 or not num:
        num.insert(0, str(q.numerator))
    if q.denominator != 1:
        den.insert(0, str(q.denominator))
    s = "*".join(num)
    if den:
        s += "/" + (den[0] if len(den) == 1 else "(" + "*".join(den) + ")")
    return s


ZERO = ConstReal(0)
ONE = ConstReal(1)


# normal form construction ---------------------------------------------------


def _single(key: _Key, q: Fraction = Fraction(1)) -> ConstReal:
    return ConstReal._from_map({key: q})


def _atom_value(atom: _Atom) -> ConstReal:
    return _single(_Key(None, ((atom, 1),)))


def const_add(a: ConstReal, b: ConstReal) -> ConstReal:
    if not b._terms:
        return a
    if not a._terms:
        return b
    m = dict(a._terms)
    for k, q in b._terms:
        m[k] = m.get(k, 0) + q
    return ConstReal._from_map(m)


def const_neg(a: ConstReal) -> ConstReal:
    return ConstReal._from_map({k: -q for k, q in a._terms})


def const_mul(a: ConstReal, b: ConstReal) -> ConstReal:
    if not a._terms or not b._terms:
        return ZERO
    if a.is_rational() and b.is_rational():
        return ConstReal(a.as_fraction() * b.as_fraction())
    acc: dict = {}
    for k1, q1 in a._terms:
        for k2, q2 in b._terms:
            if k1.is_unit or k2.is_unit:
                pieces = ((k2 if k1.is_unit else k1, Fraction(1)),)
            else:
                pieces = _key_mul(k1, k2)._terms
            for k, q in pieces:
                acc[k] = acc.get(k, 0) + q * q1 * q2
    return ConstReal._from_map(acc)


def _key_mul(k1: _Key, k2: _Key) -> ConstReal:
    exp = const_add(k1.exp or ZERO, k2.exp or ZERO)
    powers: dict = {}
    order: dict = {}
    for atom, k in k1.factors + k2.factors:
        powers[atom] = powers.get(atom, 0) + k
        order[atom] = atom.text
    factors = tuple(sorted(((a, k) for a, k in powers.items() if k), key=lambda ak: ak[0].text))
    return _build(exp, factors)


def _build(exp: ConstReal, factors: tuple) -> ConstReal:
    """Normalize ``exp(exp) * prod factors``: pull out ``exp(n log X) = X**n``."""
    extra = ONE
    if exp._terms:
        keep: dict = {}
        for key, q in exp._terms:
            if key.exp is None and len(key.factors) == 1:
                atom, k = key.factors[0]
                if atom.kind == "log" and k == 1:
                    n = q.numerator // q.denominator
                    if n:
                        extra = const_mul(extra, const_pow(atom.arg, n))
                        q = q - n
            if q:
                keep[key] = q
        exp = ConstReal._from_map(keep)
    base = _single(_Key(exp, factors))
    return base if extra == ONE else const_mul(base, extra)


def const_pow(a: ConstReal, n: int) -> ConstReal:
    """Integer power."""
    if n < 0:
        return const_inv(const_pow(a, -n))
    if a.is_rational():
        return ConstReal(a.as_fraction() ** n)
    result, base = ONE, a
    while n:
        if n & 1:
            result = const_mul(result, base)
        n >>= 1
        if n:
            base = const_mul(base, base)
    return result


def _inv_single(key: _Key, q: Fraction) -> ConstReal:
    factors = tuple((a, -k) for a, k in key.factors)
    return const_mul(ConstReal(1 / q), _build(const_neg(key.exp or ZERO), factors))


def const_inv(a: ConstReal) -> ConstReal:
    if not a._terms:
        raise DivisionByZero("inverse of zero")
    if a.is_rational():
        return ConstReal(1 / a.as_fraction())
    if len(a._terms) == 1:
        return _inv_single(*a._terms[0])
    const_sign(a)  # must be provably nonzero; raises SignUndecided otherwise
    # a = t * s with s chosen canonically, so that scalar multiples share the atom
    best = None
    for key, q in a._terms:
        t_inv = _inv_single(key, q)
        s = const_mul(a, t_inv)
        if best is None or s.text < best[1].text:
            best = (t_inv, s)
    t_inv, s = best
    return const_mul(t_inv, _atom_value(_Atom("inv", s)))


def const_exp(a: ConstReal) -> ConstReal:
    if not a._terms:
        return ONE
    return _build(a, ())


def const_log(a: ConstReal) -> ConstReal:
    if not a._terms:
        raise LogNonPositive("log of zero")
    if const_sign(a) <= 0:
        raise LogNonPositive(f"log of non-positive constant {a.text}")
    return _log_positive(a)


def _log_positive(a: ConstReal) -> ConstReal:
    if a.is_rational():
        return _log_rational(a.as_fraction())
    if len(a._terms) == 1:
        key, q = a._terms[0]
        out = _log_rational(abs(q))
        if key.exp is not None:
            out = const_add(out, key.exp)
        for atom, k in key.factors:
            out = const_add(out, const_mul(ConstReal(k), _log_abs_atom(atom)))
        return out
    best = None
    for key, q in a._terms:
        t = _single(key, q)
        if const_sign(t) < 0:
            t = const_neg(t)
        s = const_mul(a, const_inv(t))
        if best is None or s.text < best[1].text:
            best = (t, s)
    t, s = best
    return const_add(_log_positive(t), _atom_value(_Atom("log", s)))


def _log_abs_atom(atom: _Atom) -> ConstReal:
    if atom.kind == "inv":
        s = atom.arg
        if const_sign(s) < 0:
            s = const_neg(s)
        return const_neg(_log_positive(s))
    v = _atom_value(atom)
    if const_sign(v) < 0:
        v = const_neg(v)
    return _atom_value(_Atom("log", v))


def _log_rational(q: Fraction) -> ConstReal:
    acc: dict = {}
    for p, e in _factor(q.numerator).items():
        acc[p] = acc.get(p, 0) + e
    for p, e in _factor(q.denominator).items():
        acc[p] = acc.get(p, 0) - e
    m = {_Key(None, ((_Atom("log", ConstReal(p)), 1),)): Fraction(e) for p, e in acc.items() if e}
    return ConstReal._from_map(m)


def _factor(n: int) -> dict[int, int]:
    """Prime factorization by trial division; a large leftover cofactor is kept whole."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n and d < 1 << 20:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# sign ------------------------------------------------------------------------


def const_sign(a: ConstReal, max_bits: int | None = None) -> int:
    """Return -1, 0 or +1.

    Zero only for the literal 0 normal form.  Otherwise the enclosure is refined
    (32, 64, 128, ... bits) up to ``max_bits`` until it excludes zero.
    """
    if not a._terms:
        return 0
    if a.is_rational():
        return 1 if a.as_fraction() > 0 else -1
    if max_bits is None:
        max_bits = current_bits()
    bits = min(32, max_bits)
    while True:
        try:
            x = a._enclose(bits)
            if x.a > 0:
                return 1
            if x.b < 0:
                return -1
        except _Undecided:
            pass
        if bits >= max_bits:
            raise SignUndecided(f"cannot decide the sign of {a.text} within {max_bits} bits")
        bits = min(2 * bits, max_bits)


def const_compare(a: ConstReal, b: ConstReal, max_bits: int | None = None) -> int:
    return const_sign(const_add(a, const_neg(b)), max_bits)


def as_const(x) -> ConstReal:
    """Coerce ints, Fractions and rational strings to :class:`ConstReal`."""
    if isinstance(x, ConstReal):
        return x
    return ConstReal(x)


E = const_exp(ONE)


# structural records ----------------------------------------------------------


def const_to_record(a: ConstReal) -> dict:
    """Nested plain-data form of the normal form (see :mod:`omegaseries.frontend.serialize`)."""
    terms = []
    for key, q in a._terms:
        terms.append(
            {
                "rational": str(q),
                "exp": const_to_record(key.exp) if key.exp is not None else None,
                "factors": [
                    {"kind": atom.kind, "arg": const_to_record(atom.arg), "power": k}
                    for atom, k in key.factors
                ],
            }
        )
    return {"terms": terms}


def const_from_record(rec) -> ConstReal:
    """Inverse of :func:`const_to_record`; raises ``ValueError``/``KeyError``/``TypeError`` on bad input."""
    if not isinstance(rec, dict) or not isinstance(rec.get("terms"), list):
        raise ValueError("constant record needs a 'terms' list")
    m: dict = {}
    for t in rec["terms"]:
        q = Fraction(t["rational"])
        if not isinstance(t["rational"], str) or not q:
            raise ValueError("rational part must be a nonzero 'p/q' string")
        exp = const_from_record(t["exp"]) if t["exp"] is not None else None
        factors = []
        for f in t["factors"]:
            if f["kind"] not in ("log", "inv"):
                raise ValueError(f"unknown atom kind {f['kind']!r}")
            if not isinstance(f["power"], int) or isinstance(f["power"], bool) or not f["power"]:
                raise ValueError("atom power must be a nonzero integer")
            factors.append((_Atom(f["kind"], const_from_record(f["arg"])), f["power"]))
        key = _Key(exp, tuple(sorted(factors, key=lambda ak: ak[0].text)))
        if key in m:
            raise ValueError("repeated term in constant record")
        m[key] = q
    return ConstReal._from_map(m)


def const_exp_part(a: ConstReal) -> ConstReal | None:
    """``c`` if ``a`` is a single product ``q * exp(c) * ...`` with an exponential factor, else None."""
    if len(a._terms) != 1:
        return None
    key = a._terms[0][0]
    return key.exp
