"""Canonical text form.

Terms come in decreasing order joined by ``+``/``-``.  A monomial is written as
its ``exp(...)`` factor followed by ``w``, ``log(w)``, ``log^k(w)`` powers; negative
powers move to a denominator.  Examples::

    2*w + 1
    exp(w)*w
    1/(w*log(w))
    w^(1/2)/2 - exp(-w)

Every rendering parses back to the same value.  Non-rational exponents of the
log atoms cannot be written with ``^`` (the grammar only takes rational literals),
so ``w**a`` with irrational ``a`` is written ``exp(a*log(w))``.
"""

from __future__ import annotations

from fractions import Fraction

from ..constants import ConstReal
from ..core import Monomial, Transseries


def atom_name(k: int) -> str:
    if k == 0:
        return "w"
    if k == 1:
        return "log(w)"
    return f"log^{k}(w)"


def _power(base: str, q: Fraction) -> str:
    if q == 1:
        return base
    if q.denominator == 1 and q > 0:
        return f"{base}^{q.numerator}"
    return f"{base}^({q})"


def _monomial_parts(m: Monomial) -> tuple[list[str], list[str]]:
    num: list[str] = []
    den: list[str] = []
    if m.exp_arg.terms:
        num.append(f"exp({render(m.exp_arg)})")
    for k, a in m.log_powers:
        if a.is_rational():
            q = a.as_fraction()
            if q > 0:
                num.append(_power(atom_name(k), q))
            else:
                den.append(_power(atom_name(k), -q))
        else:
            num.append(f"exp({_factor_text(a)}*{_log_of_atom(k)})")
    return num, den


def _log_of_atom(k: int) -> str:
    return atom_name(k + 1)


def _factor_text(c: ConstReal) -> str:
    """A constant written so that it can be a factor in a product."""
    t = c.text
    if len(c._terms) > 1 or t.startswith("-") or "/" in t:
        return f"({t})"
    return t


def _assemble(num: list[str], den: list[str]) -> str:
    s = "*".join(num) if num else "1"
    if den:
        s += "/" + (den[0] if len(den) == 1 else "(" + "*".join(den) + ")")
    return s


def render_monomial(m: Monomial) -> str:
    num, den = _monomial_parts(m)
    return _assemble(num, den)


def _negative(c: ConstReal) -> bool:
    # syntactic sign: the sign of the first rational coefficient of the normal form
    return bool(c._terms) and c._terms[0][1] < 0


def render_term(c: ConstReal, m: Monomial) -> tuple[bool, str]:
    """Return (negative, text of |term|)."""
    neg = _negative(c)
    if neg:
        c = -c
    num, den = _monomial_parts(m)
    if c.is_rational():
        q = c.as_fraction()
        if q.numerator != 1 or not num:
            num.insert(0, str(q.numerator))
        if q.denominator != 1:
            den.insert(0, str(q.denominator))
        return neg, _assemble(num, den)
    if not num and not den:
        return neg, c.text if len(c._terms) == 1 else f"({c.text})"
    return neg, _assemble([_factor_text(c)] + num, den)


def render(x: Transseries) -> str:
    if not x.terms:
        return "0"
    out = []
    for i, t in enumerate(x.terms):
        neg, body = render_term(t.coeff, t.monomial)
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def render_const(c: ConstReal) -> str:
    return c.text
