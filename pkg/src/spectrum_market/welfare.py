"""Planner benchmark, optimal licensed/unlicensed split, and welfare sweeps.

The planner splits a total band across macro-cells, small-cells and
unlicensed access in closed form.  The market counterpart fixes an
unlicensed slice, hands the rest in equal shares to the providers, and lets
them play the bandwidth game; sweeping the slice traces the welfare curves
and locates the kink where providers abandon small-cells.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .core import ALPHA_MAX, ALPHA_MIN, DomainError, MarketParams, utility
from . import monopoly, oligopoly

# Labels for the market scenarios a sweep can trace.
SERIES_PLANNER = "planner"
SERIES_MONOPOLY_REVENUE = "n1_rev"
SERIES_MONOPOLY_WELFARE = "n1_sw"
SERIES_DUOPOLY = "n2"
SERIES_PERFECT_COMPETITION = "ninf"
ALL_SERIES = (
    SERIES_PLANNER,
    SERIES_MONOPOLY_REVENUE,
    SERIES_MONOPOLY_WELFARE,
    SERIES_DUOPOLY,
    SERIES_PERFECT_COMPETITION,
)
DEFAULT_SERIES = (
    SERIES_PLANNER,
    SERIES_MONOPOLY_REVENUE,
    SERIES_DUOPOLY,
    SERIES_PERFECT_COMPETITION,
)


class PlannerCase(enum.Enum):
    SMALL_DOMINATES = "small_dominates"          # lambda_s > lambda_u
    TIE = "tie"                                  # lambda_s == lambda_u
    UNLICENSED_DOMINATES = "unlicensed_dominates"  # lambda_s < lambda_u


@dataclass(frozen=True)
class PlannerSolution:
    b_macro: float
    b_small: float
    b_unlicensed: float
    welfare: float
    case_label: PlannerCase
    # Tie case only: the equivalent all-unlicensed representative.
    alternative: tuple | None = None


def _planner_welfare(b_macro, fixed_rate_capacity, params):
    """Sum utility with mobile users on macro and fixed users on one tier."""
    return params.n_mobile * utility(
        b_macro * params.r0 / params.n_mobile, params.alpha
    ) + params.n_fixed * utility(fixed_rate_capacity / params.n_fixed, params.alpha)


def planner_optimal(B: float, params: MarketParams) -> PlannerSolution:
    """Closed-form welfare-maximizing split of a total band."""
    if B <= 0:
        raise DomainError("total bandwidth must be positive")
    a = params.alpha
    if params.lambda_s > params.lambda_u:
        case = PlannerCase.SMALL_DOMINATES
        mu = params.lambda_s ** (1.0 / a - 1.0)
    elif params.lambda_s < params.lambda_u:
        case = PlannerCase.UNLICENSED_DOMINATES
        mu = params.lambda_u ** (1.0 / a - 1.0)
    else:
        case = PlannerCase.TIE
        mu = params.lambda_s ** (1.0 / a - 1.0)

    b_macro = params.n_mobile * B / (params.n_mobile + mu * params.n_fixed)
    b_fixed = B - b_macro

    if case is PlannerCase.UNLICENSED_DOMINATES:
        b_small, b_unl = 0.0, b_fixed
        cap = params.lambda_u * b_unl * params.r0
        alternative = None
    else:
        # Tie: canonical representative keeps the fixed tier licensed.
        b_small, b_unl = b_fixed, 0.0
        cap = params.lambda_s * b_small * params.r0
        alternative = (0.0, b_fixed) if case is PlannerCase.TIE else None

    return PlannerSolution(
        b_macro=b_macro,
        b_small=b_small,
        b_unlicensed=b_unl,
        welfare=_planner_welfare(b_macro, cap, params),
        case_label=case,
        alternative=alternative,
    )


def alpha_efficiency_threshold(params: MarketParams) -> float:
    """Curvature below which a monopolist's split can still be efficient when
    the unlicensed band is the better technology.

    Unique root of kappa^a * lambda_s/lambda_u + a = 1; only exists for
    lambda_s < lambda_u.
    """
    if params.lambda_s >= params.lambda_u:
        raise DomainError("threshold defined only for lambda_s < lambda_u")
    ratio = params.lambda_s / params.lambda_u

    def f(a):
        return a ** (a / (1.0 - a)) * ratio + a - 1.0

    return brentq(f, ALPHA_MIN, ALPHA_MAX, xtol=1e-14)


def market_welfare(B: float, b_u: float, n_sps, params: MarketParams,
                   series: str = SERIES_MONOPOLY_REVENUE) -> float:
    """Welfare when b_u is unlicensed and B - b_u is split equally among SPs."""
    b_l = B - b_u
    if series == SERIES_PLANNER:
        return planner_optimal(B, params).welfare
    if series == SERIES_MONOPOLY_REVENUE:
        return monopoly.optimize_revenue(b_l, b_u, params).outcome.social_welfare
    if series == SERIES_MONOPOLY_WELFARE:
        return monopoly.optimize_welfare(b_l, b_u, params).outcome.social_welfare
    if series == SERIES_DUOPOLY:
        eq = oligopoly.symmetric_equilibrium(2, b_l / 2.0, b_u, params)
        return eq.outcome.social_welfare
    if series == SERIES_PERFECT_COMPETITION:
        return oligopoly.asymptotic_limit(b_l, b_u, params).outcome.social_welfare
    raise DomainError(f"unknown series {series!r}")


def optimal_split(B: float, n_sps: int, params: MarketParams,
                  grid_points: int = 401):
    """Best licensed/unlicensed division under market behavior.

    Returns (b_licensed, b_unlicensed, efficient) where ``efficient`` says the
    achieved welfare matches the planner benchmark to 1e-6 relative.
    """
    if B <= 0:
        raise DomainError("total bandwidth must be positive")
    if n_sps < 1:
        raise DomainError("need at least one provider")

    def welfare_at(b_u):
        b_l = B - b_u
        if n_sps == 1:
            return monopoly.optimize_revenue(b_l, b_u, params).outcome.social_welfare
        eq = oligopoly.symmetric_equilibrium(n_sps, b_l / n_sps, b_u, params)
        return eq.outcome.social_welfare

    hi = B * (1.0 - 1e-9)
    xs = [hi * k / (grid_points - 1) for k in range(grid_points)]
    vals = [welfare_at(x) for x in xs]
    k_best = max(range(grid_points), key=lambda k: (vals[k], -k))

    lo = xs[max(k_best - 1, 0)]
    up = xs[min(k_best + 1, grid_points - 1)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = up - inv_phi * (up - lo)
    d = lo + inv_phi * (up - lo)
    fc, fd = welfare_at(c), welfare_at(d)
    while up - lo > 1e-9 * B:
        if fc > fd:
            up, d, fd = d, c, fc
            c = up - inv_phi * (up - lo)
            fc = welfare_at(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv_phi * (up - lo)
            fd = welfare_at(d)
    b_u_star = 0.5 * (lo + up)
    w_star = welfare_at(b_u_star)
    # the grid endpoints (notably b_u = 0) may beat the refined interior point
    if vals[k_best] > w_star:
        b_u_star, w_star = xs[k_best], vals[k_best]
    if b_u_star < 1e-9 * B:
        b_u_star = 0.0
        w_star = welfare_at(0.0)

    benchmark = planner_optimal(B, params).welfare
    efficient = w_star >= benchmark * (1.0 - 1e-6)
    return B - b_u_star, b_u_star, efficient


def _kink_gap(series: str, B: float, params: MarketParams):
    """Signed gap between unlicensed capacity and the series' exit threshold."""
    lam_u, r0 = params.lambda_u, params.r0

    if series == SERIES_MONOPOLY_REVENUE:
        return lambda b_u: lam_u * b_u * r0 - monopoly.threshold_rev(B - b_u, params)
    if series == SERIES_MONOPOLY_WELFARE:
        return lambda b_u: lam_u * b_u * r0 - monopoly.threshold_sw(B - b_u, params)
    if series == SERIES_DUOPOLY:
        return lambda b_u: lam_u * b_u * r0 - oligopoly.symmetric_mne_bound(
            2, (B - b_u) / 2.0, params
        )
    if series == SERIES_PERFECT_COMPETITION:
        return lambda b_u: (
            lam_u * b_u
            - (B - b_u)
            * params.kappa * params.n_fixed
            * params.lambda_s ** (1.0 / params.alpha)
            / params.n_mobile
        )
    return None


def find_kink(series: str, B: float, params: MarketParams) -> float | None:
    """Unlicensed bandwidth at which the series transitions to macro-only."""
    gap = _kink_gap(series, B, params)
    if gap is None:
        return None
    lo, hi = 0.0, B * (1.0 - 1e-12)
    if gap(lo) >= 0:
        return 0.0
    if gap(hi) <= 0:
        return None  # providers never abandon small-cells on [0, B)
    return brentq(gap, lo, hi, xtol=1e-10)


@dataclass(frozen=True)
class WelfareCurve:
    grid: tuple
    series: dict
    kinks: dict


def welfare_sweep(B: float, b_u_grid, series, params: MarketParams) -> WelfareCurve:
    """Evaluate welfare for each scenario over a grid of unlicensed slices."""
    grid = tuple(float(x) for x in b_u_grid)
    if any(not 0.0 <= x < B for x in grid):
        raise DomainError("grid points must lie in [0, B)")
    for label in series:
        if label not in ALL_SERIES:
            raise DomainError(f"unknown series {label!r}")
    values = {
        label: [market_welfare(B, b_u, None, params, series=label) for b_u in grid]
        for label in series
    }
    kinks = {
        label: find_kink(label, B, params)
        for label in series
        if label != SERIES_PLANNER
    }
    return WelfareCurve(grid=grid, series=values, kinks=kinks)


def default_grid(B: float, points: int = 201):
    """Uniform sweep grid on [0, B), inset at the top to keep licensed > 0."""
    hi = B - 1e-6
    return [hi * k / (points - 1) for k in range(points)]
