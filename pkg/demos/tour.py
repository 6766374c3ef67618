"""A short walk through the library: arithmetic, exp/log, derivatives, composition.

Run with ``python3 demos/tour.py``.
"""

from omegaseries import (
    ConstReal,
    ExpTerm,
    Monomial,
    TruncatedResult,
    TruncationBudget,
    compose,
    derive,
    ell,
    evaluate,
    omega,
    render,
    taylor_check,
    tree_oracle_compose,
    ts_exp,
    ts_inverse,
    ts_log,
)
from omegaseries.frontend.render import render_monomial


def show(label, r):
    if isinstance(r, TruncatedResult):
        tail = "" if r.exact else f"   (+ o({render_monomial(r.error_bound)}))"
        print(f"{label:<34} {render(r.value)}{tail}")
    else:
        print(f"{label:<34} {render(r)}")


def X(text):
    return evaluate(text).value


N4 = TruncationBudget(4)

print("-- arithmetic")
show("(w + 1)(w - 1)", X("(w+1)*(w-1)"))
show("(exp(w) + w)(exp(w) - w)", X("(exp(w)+w)*(exp(w)-w)"))
show("1/(w + 1), 4 terms", ts_inverse(X("w+1"), N4))

print("-- exp and log")
show("exp(w + log(w))", X("exp(w + log(w))"))
show("exp(1/w), 4 terms", ts_exp(X("1/w"), N4))
show("log(exp(w)*(1 + 1/w)), 4 terms", ts_log(X("exp(w)*(1 + 1/w)"), N4))

print("-- derivation")
show("d/dw log(log(w))", derive(ell(2)))
show("d/dw exp(w^2)", derive(X("exp(w^2)")))

print("-- composition")
show("exp(w) o w^2", compose(X("exp(w)"), X("w^2")))
show("(w + 1/w) o (w + 1), 4 terms", compose(X("w + 1/w"), X("w + 1"), N4))
show("log(w) o exp(exp(w))", compose(ell(1), X("exp(exp(w))")))

print("-- the same value from admissible trees")
root = ExpTerm(ConstReal(1), ell(1) + X("1/w"))
show("w*exp(1/w) down to 1/w^3", tree_oracle_compose([root], omega(), Monomial({0: -3})))

print("-- Taylor")
eps = X("exp(-exp(w))")
print(f"{'log(w + eps) vs its order-2 polynomial':<34} {taylor_check(ell(1), omega(), eps, 2)}")
