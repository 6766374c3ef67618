from fractions import Fraction

import pytest
from hypothesis import assume, given, settings

import gen
from omegaseries import (
    BudgetExhausted,
    ConstReal,
    EpsilonTooLarge,
    ExpTerm,
    Monomial,
    Substitution,
    TargetNotPositiveInfinite,
    Transseries,
    TruncationBudget,
    compose,
    compose_right_identity_check,
    contribution,
    derive,
    ell,
    ell_monomial,
    enumerate_admissible_trees,
    mono_compare,
    omega,
    taylor_check,
    taylor_expand,
    tree_oracle_compose,
    ts_compare,
    ts_log,
    ts_sign,
)
from omegaseries import lazy
from omegaseries.core import Term
from support import X, agree

W = omega()
N = TruncationBudget


def w_pow(a) -> Monomial:
    return Monomial({0: a})


def test_compose_examples():
    g = X("exp(w) + w^2 - 1/w")
    r = compose(W, g)
    assert r.exact and r.value == g
    r = compose(X("exp(w)"), X("w^2"))
    assert r.exact and r.value == X("exp(w^2)")
    r = compose(X("w + 1/w"), X("w + 1"), N(4))
    assert not r.exact
    assert r.value == X("w + 1 + 1/w - 1/w^2")
    assert r.error_bound == w_pow(-2)


def test_compose_needs_infinite_target():
    for g in ("1/w", "3", "-w"):
        with pytest.raises(TargetNotPositiveInfinite):
            compose(W, X(g))


@pytest.mark.parametrize("f", ["exp(w^2) + log(w)", "0", "3*w^(1/2) - log(log(w))^(-1)"])
def test_right_identity_examples(f):
    assert compose_right_identity_check(X(f))


def test_log_atom_leaves():
    g = X("w + 1")
    cutoff = w_pow(-10)
    sub = Substitution(g)
    trees = enumerate_admissible_trees(Term(ConstReal(1), ell_monomial(1)), sub, cutoff)
    assert all(t.is_atom_leaf and not t.children for t in trees)
    # one leaf per term of log(w + 1) = log(w) + 1/w - 1/(2w^2) + ... down to the cutoff
    kept = ts_log(g, N(20)).value.restrict(lambda m: mono_compare(m, cutoff) >= 0)
    assert len(trees) == len(kept.terms) == 11
    assert Transseries([tuple(contribution(t, sub)) for t in trees]) == kept


def test_single_tree_for_w_at_w_squared():
    sub = Substitution(X("w^2"))
    trees = enumerate_admissible_trees(Term(ConstReal(1), w_pow(1)), sub, w_pow(-10))
    assert len(trees) == 1 and not trees[0].children
    assert contribution(trees[0], sub) == Term(ConstReal(1), w_pow(2))


def test_trees_of_w_exp_inverse_w():
    # exp(log w + 1/w) at w: the tree with n children contributes w * w^-n / n!;
    # a cutoff between w^-2 and w^-3 keeps n = 0..3
    root = ExpTerm(ConstReal(1), ell(1) + X("1/w"))
    sub = Substitution(W)
    trees = enumerate_admissible_trees(root, sub, w_pow(Fraction(-5, 2)))
    assert len(trees) == 4
    # the cutoff itself is kept: at w^-3 the n = 4 tree joins
    assert len(enumerate_admissible_trees(root, sub, w_pow(-3))) == 5
    by_arity = {len(t.children): contribution(t, sub) for t in trees}
    assert sorted(by_arity) == [0, 1, 2, 3]
    for n, fact in zip(range(4), (1, 1, 2, 6)):
        assert by_arity[n] == Term(ConstReal(Fraction(1, fact)), w_pow(1 - n))
    assert by_arity[2] == Term(ConstReal(Fraction(1, 2)), w_pow(-1))


def test_tree_oracle_examples():
    assert tree_oracle_compose(W, X("w^2"), w_pow(-5)) == X("w^2")
    got = tree_oracle_compose([ExpTerm(ConstReal(1), ell(1) + X("1/w"))], W, w_pow(Fraction(-5, 2)))
    assert got == X("w + 1 + 1/(2*w) + 1/(6*w^2)")
    got = tree_oracle_compose([ExpTerm(ConstReal(1), ell(1) + X("1/w"))], W, w_pow(-3))
    assert got == X("w + 1 + 1/(2*w) + 1/(6*w^2) + 1/(24*w^3)")
    assert tree_oracle_compose(Transseries.constant(5), X("exp(w)"), w_pow(-3)) == Transseries.constant(5)


def test_taylor_expansion_examples():
    def values(f, order):
        return [c.value for c in taylor_expand(X(f), W, order).coefficients]

    assert values("w^2", 2) == [X("w^2"), X("2*w"), X("1")]
    assert values("log(w)", 2) == [ell(1), X("1/w"), X("-1/(2*w^2)")]
    assert values("exp(w)", 3) == [X("exp(w)"), X("exp(w)"), X("exp(w)/2"), X("exp(w)/6")]


def test_taylor_check_examples():
    assert taylor_check(X("w^2"), W, X("1/w"), 2)
    assert taylor_check(ell(1), W, X("exp(-exp(w))"), 2)
    for x in ("w", "exp(w) + w", "w^2 - log(w)"):
        assert taylor_check(W, X(x), X("exp(-exp(exp(w)))"), 1)


def test_epsilon_too_large():
    with pytest.raises(EpsilonTooLarge):
        taylor_check(ell(1), W, X("w^(-1/2)"), 2)


def test_leaving_the_fragment_is_reported():
    # exp(w) o (w + 1/w) = exp(w) * (1 + 1/w + ...) has infinitely many terms above 1,
    # so its exponential is no finite monomial
    with pytest.raises(BudgetExhausted):
        compose(X("exp(exp(w))"), X("w + 1/w"), N(4))


def test_tree_oracle_budget():
    with lazy.cancellation_limit(8):
        with pytest.raises(BudgetExhausted):
            tree_oracle_compose(X("exp(exp(w))"), X("w + 1"), w_pow(-2), max_size=8)


@settings(max_examples=30)
@given(gen.using(gen.series, height=1, depth=1, max_terms=3), gen.using(gen.target))
def test_homomorphism_on_kept_terms(f, g):
    h = X("w^2 - log(w)")
    try:
        a = compose(f + h, g, N(8))
        b, c = compose(f, g, N(8)), compose(h, g, N(8))
    except BudgetExhausted:
        assume(False)
    bound = None
    for r in (b, c):
        if not r.exact and (bound is None or mono_compare(r.error_bound, bound) > 0):
            bound = r.error_bound
    assert agree(a, b.value + c.value, bound)


@settings(max_examples=30)
@given(gen.using(gen.positive_infinite, height=1, depth=1, max_terms=3), gen.using(gen.target), gen.using(gen.positive_infinite, height=1, depth=1, max_terms=2))
def test_increasing_functions_are_monotone(f, g1, d):
    assume(ts_sign(derive(f)) > 0)
    g2 = g1 + d
    try:
        a, b = compose(f, g1, N(8)), compose(f, g2, N(8))
    except BudgetExhausted:
        assume(False)
    diff = b.value - a.value
    bound = None
    for r in (a, b):
        if not r.exact and (bound is None or mono_compare(r.error_bound, bound) > 0):
            bound = r.error_bound
    # the sign is certified once the leading difference sits above the error region
    if diff.terms and (bound is None or mono_compare(diff.terms[0].monomial, bound) > 0):
        assert ts_compare(b.value, a.value) > 0
