"""Independent brute-force verifiers used by the test suite.

Nothing here calls the closed forms or solvers it is meant to check: the grid
search only sees a black-box objective, and the fixed-point iterator rebuilds
the association equilibrium from the payoff-equalization conditions alone.
These are deliberately slow.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import DomainError, MarketModelError, MarketParams, marginal_utility, utility
from .association import AllocationProfile, AssociationOutcome, Regime


class OracleConvergenceError(MarketModelError):
    """The fixed-point iteration failed to converge."""


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.lo >= self.hi:
            raise DomainError("grid lower bound must be below upper bound")
        if self.steps < 2:
            raise DomainError("grid needs at least 2 steps")

    def points(self):
        h = (self.hi - self.lo) / (self.steps - 1)
        return [self.lo + i * h for i in range(self.steps)]


def grid_argmax(objective, spec: GridSpec):
    """Exhaustive maximization on a uniform grid; ties go to the smallest x."""
    best_x = None
    best_v = -float("inf")
    for x in spec.points():
        v = objective(x)
        if v > best_v:
            best_x, best_v = x, v
    return best_x, best_v


def finite_difference(f, x: float, h: float) -> float:
    """Central difference (f(x+h) - f(x-h)) / 2h."""
    if h <= 0:
        raise DomainError("step must be positive")
    return (f(x + h) - f(x - h)) / (2.0 * h)


def _equalize_masses(cap_a: float, cap_b: float, total: float, kap: float,
                     damping: float, max_iter: int, tol: float) -> float:
    """Mass on side A such that cap_b/(total-K_a) = kap * cap_a/K_a.

    Side A is priced (licensed), side B is free (unlicensed): equal net payoff
    forces the free per-user rate to be kap times the priced one.  Solved by a
    damped fixed-point iteration on whichever mass gives a contraction.
    """
    if cap_a == 0.0:
        return 0.0
    if cap_b == 0.0:
        return total
    iterate_on_a = kap * cap_a >= cap_b
    x = total / 2.0
    for _ in range(max_iter):
        if iterate_on_a:
            # required free-side mass given priced rate cap_a/x
            target = total - cap_b * x / (kap * cap_a)
        else:
            target = total - kap * cap_a * x / cap_b
        target = min(max(target, 0.0), total)
        x_new = (1.0 - damping) * x + damping * target
        if abs(x_new - x) <= tol * total:
            x = x_new
            break
        x = x_new
    else:
        raise OracleConvergenceError("mass equalization did not converge")
    return x if iterate_on_a else total - x


def payoff_equalization_fixed_point(
    profile: AllocationProfile,
    params: MarketParams,
    damping: float = 0.5,
    max_iter: int = 100000,
    tol: float = 1e-14,
) -> AssociationOutcome:
    """Re-derive the association equilibrium from payoff equalities alone.

    Tries the separate-service assignment first (macro = mobile only) and
    falls back to mixed service when fixed users would strictly prefer the
    macro-cells at the separate-service rates.
    """
    c_m, c_s, c_u = profile.capacities(params)
    alpha = params.alpha
    kap = params.kappa
    n_f, n_m = params.n_fixed, params.n_mobile
    n_t = n_f + n_m

    # --- separate-service candidate: K_M = N_m, fixed users split S/U
    k_s = _equalize_masses(c_s, c_u, n_f, kap, damping, max_iter, tol)
    k_u = n_f - k_s
    r_m = c_m / n_m
    r_s = c_s / k_s if k_s > 0 else 0.0
    r_u = c_u / k_u if k_u > 0 else 0.0

    # Fixed users stay out of macro-cells iff their current payoff is at
    # least what a marginal entrant would get at the macro rate.
    macro_entry_payoff = alpha * utility(r_m, alpha)
    if k_s > 0:
        stay_out = alpha * utility(r_s, alpha) >= macro_entry_payoff
    else:
        stay_out = utility(r_u, alpha) >= macro_entry_payoff

    if stay_out:
        regime = Regime.SEPARATE_SERVICE
        k_m = n_m
        p_m = marginal_utility(r_m, alpha)
        p_s = marginal_utility(r_s, alpha) if k_s > 0 else None
    else:
        # --- mixed service: one licensed pool at a common rate vs unlicensed
        regime = Regime.MIXED_SERVICE
        c_lic = c_m + c_s
        k_lic = _equalize_masses(c_lic, c_u, n_t, kap, damping, max_iter, tol)
        k_u = n_t - k_lic
        r_lic = c_lic / k_lic
        # capacity clearing at a single price splits the pool by capacity
        k_m = k_lic * c_m / c_lic
        k_s = k_lic * c_s / c_lic
        r_m = r_lic
        r_s = r_lic if k_s > 0 else 0.0
        r_u = c_u / k_u if k_u > 0 else 0.0
        p_m = marginal_utility(r_lic, alpha)
        p_s = p_m if k_s > 0 else None

    p_s_val = p_s if p_s is not None else 0.0
    revenues = tuple(
        bm * params.r0 * p_m + params.lambda_s * bs * params.r0 * p_s_val
        for bm, bs in profile.per_sp
    )
    sw = (
        k_m * utility(r_m, alpha)
        + k_s * utility(r_s, alpha)
        + k_u * utility(r_u, alpha)
    )
    return AssociationOutcome(
        regime=regime,
        k_macro=k_m,
        k_small=k_s,
        k_unlicensed=k_u,
        r_macro=r_m,
        r_small=r_s,
        r_unlicensed=r_u,
        p_macro=p_m,
        p_small=p_s,
        revenue_per_sp=revenues,
        social_welfare=sw,
    )
