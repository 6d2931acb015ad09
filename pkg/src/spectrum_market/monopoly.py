"""Single-provider bandwidth allocation for revenue or welfare maximization.

Both objectives are strictly concave in the small-cell bandwidth once the
full band is used, so the optimum is the unique root of a first-order
condition on (0, B), or the macro-only boundary when the unlicensed capacity
exceeds a closed-form threshold.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .core import DomainError, MarketParams, SolverConsistencyError, kappa
from .association import (
    AllocationProfile,
    AssociationOutcome,
    Regime,
    solve_association,
)

# Relative bracket inset for the interior root search.
_EDGE = 1e-12


class Objective(enum.Enum):
    REVENUE = "revenue"
    SOCIAL_WELFARE = "social_welfare"


@dataclass(frozen=True)
class MonopolySolution:
    objective: Objective
    b_macro: float
    b_small: float
    outcome: AssociationOutcome
    boundary: bool  # True when the optimum pins b_small to 0


def beta_tilde(params: MarketParams) -> float:
    """Small-cell fraction of the optimum when there is no unlicensed band."""
    return params.n_fixed / (
        params.n_fixed + params.n_mobile * params.lambda_s ** (1.0 - 1.0 / params.alpha)
    )


def threshold_rev(B: float, params: MarketParams) -> float:
    """Unlicensed capacity above which a revenue maximizer abandons small-cells."""
    if B <= 0:
        raise DomainError("total bandwidth must be positive")
    a = params.alpha
    try:
        factor = (params.lambda_s / (1.0 - a)) ** (1.0 / a)
    except OverflowError:
        return math.inf  # a near 0: no unlicensed capacity can displace small-cells
    return params.kappa * params.n_fixed * B * params.r0 / params.n_mobile * factor


def threshold_sw(B: float, params: MarketParams) -> float:
    """Unlicensed capacity above which a welfare maximizer abandons small-cells."""
    if B <= 0:
        raise DomainError("total bandwidth must be positive")
    a = params.alpha
    try:
        factor = ((a + 1.0) * params.lambda_s) ** (1.0 / a)
    except OverflowError:
        return math.inf
    return params.kappa * params.n_fixed * B * params.r0 * factor / params.n_mobile


def _revenue_foc(b_s: float, B: float, c_u: float, params: MarketParams,
                 b_m: float | None = None) -> float:
    """Marginal revenue of small-cell bandwidth minus that of macro bandwidth.

    ``b_m`` overrides the macro bandwidth when B - b_s would cancel to zero.
    """
    a = params.alpha
    kap = params.kappa
    r_m = (B - b_s if b_m is None else b_m) * params.r0 / params.n_mobile
    r_s = (kap * params.lambda_s * b_s * params.r0 + c_u) / (kap * params.n_fixed)
    lhs = params.lambda_s * (
        (1.0 - a) * r_s ** (-a)
        + a * (c_u / (kap * params.n_fixed)) * r_s ** (-a - 1.0)
    )
    rhs = (1.0 - a) * r_m ** (-a)
    return lhs - rhs


def _welfare_foc(b_s: float, B: float, c_u: float, params: MarketParams,
                 b_m: float | None = None) -> float:
    """Marginal welfare of small-cell bandwidth minus that of macro bandwidth."""
    a = params.alpha
    kap = params.kappa
    r_m = (B - b_s if b_m is None else b_m) * params.r0 / params.n_mobile
    r_s = (kap * params.lambda_s * b_s * params.r0 + c_u) / (kap * params.n_fixed)
    lhs = params.lambda_s * (
        r_s ** (-a) + a * (c_u / (kap * params.n_fixed)) * r_s ** (-a - 1.0)
    )
    rhs = r_m ** (-a)
    return lhs - rhs


def _solve(B, b_unlicensed, params, objective) -> MonopolySolution:
    if B <= 0:
        raise DomainError("total bandwidth must be positive")
    c_u = params.lambda_u * b_unlicensed * params.r0
    if objective is Objective.REVENUE:
        cutoff, foc = threshold_rev(B, params), _revenue_foc
    else:
        cutoff, foc = threshold_sw(B, params), _welfare_foc

    if c_u >= cutoff:
        b_s = 0.0
        boundary = True
    else:
        eps = _EDGE * B
        lo, hi = eps, B - eps
        f_lo = foc(lo, B, c_u, params)
        f_hi = foc(hi, B, c_u, params)
        if f_lo <= 0:
            raise SolverConsistencyError(
                f"first-order condition not bracketed on (0, {B}): "
                f"f(lo)={f_lo:.3e}, f(hi)={f_hi:.3e}"
            )
        if f_hi < 0:
            b_s = brentq(foc, lo, hi, args=(B, c_u, params), xtol=1e-15, rtol=8.9e-16)
        else:
            # Near-linear utility: the root sits at a macro bandwidth far below
            # floating-point resolution of B - b_s, so search log(b_macro).
            def g(t):
                b_m = math.exp(t)
                return foc(B - b_m, B, c_u, params, b_m=b_m)

            t_lo, t_hi = math.log(1e-280 * B), math.log(eps)
            if g(t_lo) >= 0:
                raise SolverConsistencyError(
                    "first-order condition has no root above the "
                    "representable macro bandwidth range"
                )
            t = brentq(g, t_lo, t_hi, xtol=1e-13, rtol=8.9e-16)
            b_m = math.exp(t)
            profile = AllocationProfile([(b_m, B - b_m)], b_unlicensed)
            outcome = solve_association(profile, params)
            assert outcome.regime is Regime.SEPARATE_SERVICE
            return MonopolySolution(
                objective=objective,
                b_macro=b_m,
                b_small=B - b_m,
                outcome=outcome,
                boundary=False,
            )
        boundary = False

    profile = AllocationProfile([(B - b_s, b_s)], b_unlicensed)
    outcome = solve_association(profile, params)
    assert outcome.regime is Regime.SEPARATE_SERVICE
    return MonopolySolution(
        objective=objective,
        b_macro=B - b_s,
        b_small=b_s,
        outcome=outcome,
        boundary=boundary,
    )


def optimize_revenue(B: float, b_unlicensed: float, params: MarketParams) -> MonopolySolution:
    """Revenue-maximizing split of licensed bandwidth B."""
    return _solve(B, b_unlicensed, params, Objective.REVENUE)


def optimize_welfare(B: float, b_unlicensed: float, params: MarketParams) -> MonopolySolution:
    """Welfare-maximizing split of licensed bandwidth B."""
    return _solve(B, b_unlicensed, params, Objective.SOCIAL_WELFARE)


def crossover_beta(alpha: float) -> float:
    """Unique positive root of (1-a)(1+beta)^(1+a) - beta = 1-a.

    beta = 0 always solves the equation; the solver brackets it away and
    returns the strictly positive root.
    """

    def f(beta):
        return (1.0 - alpha) * (1.0 + beta) ** (1.0 + alpha) - beta - (1.0 - alpha)

    hi = 1.0
    while f(hi) <= 0:
        hi *= 2.0
        if hi > 1e12:
            raise SolverConsistencyError("crossover equation has no positive root")
    # f < 0 just right of zero (slope -alpha^2 at the origin)
    return brentq(f, 1e-9, hi, xtol=1e-14, rtol=8.9e-16)


def threshold_crossover(B: float, params: MarketParams) -> float:
    """Unlicensed capacity at which small-cell bandwidth dips back below the
    no-unlicensed optimum: below it the revenue maximizer over-invests in
    small-cells, above it under-invests."""
    if B <= 0:
        raise DomainError("total bandwidth must be positive")
    beta_star = crossover_beta(params.alpha)
    b_s_tilde = beta_tilde(params) * B
    return beta_star * params.kappa * params.lambda_s * b_s_tilde * params.r0
