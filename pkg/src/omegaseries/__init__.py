"""Exact arithmetic, calculus and composition for finite transseries in w."""

from .analysis import derive, derive_n, iterated_log, ts_exp, ts_log
from .arith import (
    DEFAULT_BUDGET,
    PowerSeries,
    TruncatedResult,
    TruncationBudget,
    compose_power_series,
    eval_power_series,
    sum_family,
    ts_add,
    ts_div,
    ts_inverse,
    ts_mul,
    ts_neg,
    ts_npow,
    ts_sub,
)
from .compose import (
    AdmissibleTree,
    ExpTerm,
    Substitution,
    TaylorExpansion,
    compose,
    compose_exp_terms,
    compose_right_identity_check,
    contribution,
    enumerate_admissible_trees,
    taylor_check,
    taylor_expand,
    taylor_report,
    TaylorReport,
    tree_oracle_compose,
)
from .constants import ConstReal, const_exp, const_log, const_sign, precision
from .core import (
    Decomposition,
    Dominance,
    Monomial,
    Ordering,
    PurelyInfinite,
    Term,
    Transseries,
    asymptotic,
    compare_one,
    constant,
    decompose,
    dominance,
    ell,
    ell_monomial,
    erank,
    exp_monomial,
    formal_log,
    is_infinitesimal,
    is_positive_infinite,
    is_truncation,
    leading_coefficient,
    leading_monomial,
    leading_term,
    log_up,
    mono_compare,
    omega,
    truncate_at,
    ts_compare,
    ts_sign,
)
from .errors import *  # noqa: F401,F403
from .frontend.evaluate import EvalReport, evaluate
from .frontend.parser import parse
from .frontend.render import render
from .frontend.serialize import deserialize, serialize
