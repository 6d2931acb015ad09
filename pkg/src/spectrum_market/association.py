"""Price and user-association equilibrium for fixed bandwidth allocations.

Given every provider's (macro, small) bandwidth split plus the unlicensed
bandwidth, the market clears in closed form: mobile users fill macro-cells,
fixed users split between small-cells and the free unlicensed band (and, when
small-cell bandwidth is scarce, spill into macro-cells -- the mixed regime).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .core import (
    DegenerateScenarioError,
    DomainError,
    MarketParams,
    MobileUnservableError,
    marginal_utility,
    utility,
)


class Regime(enum.Enum):
    MIXED_SERVICE = "mixed"        # macro-cells serve mobile plus some fixed users
    SEPARATE_SERVICE = "separate"  # macro-cells serve mobile users only


@dataclass(frozen=True)
class AllocationProfile:
    """Per-provider (b_macro, b_small) pairs plus the shared unlicensed band."""

    per_sp: tuple
    b_unlicensed: float = 0.0

    def __init__(self, per_sp, b_unlicensed=0.0):
        per_sp = tuple((float(bm), float(bs)) for bm, bs in per_sp)
        if not per_sp:
            raise DomainError("profile needs at least one provider")
        for bm, bs in per_sp:
            if bm < 0 or bs < 0:
                raise DomainError("bandwidths must be non-negative")
        if b_unlicensed < 0:
            raise DomainError("unlicensed bandwidth must be non-negative")
        object.__setattr__(self, "per_sp", per_sp)
        object.__setattr__(self, "b_unlicensed", float(b_unlicensed))

    @property
    def n_sps(self) -> int:
        return len(self.per_sp)

    @property
    def total_b_macro(self) -> float:
        return sum(bm for bm, _ in self.per_sp)

    @property
    def total_b_small(self) -> float:
        return sum(bs for _, bs in self.per_sp)

    def capacities(self, params: MarketParams):
        """Aggregate (macro, small, unlicensed) rate capacities."""
        c_m = self.total_b_macro * params.r0
        c_s = params.lambda_s * self.total_b_small * params.r0
        c_u = params.lambda_u * self.b_unlicensed * params.r0
        return c_m, c_s, c_u


@dataclass(frozen=True)
class AssociationOutcome:
    """Market-clearing regime, user masses, per-user rates, prices and welfare.

    A tier that attracts no users carries rate 0 and price ``None`` (inactive);
    prices are never serialized as infinities.
    """

    regime: Regime
    k_macro: float
    k_small: float
    k_unlicensed: float
    r_macro: float
    r_small: float
    r_unlicensed: float
    p_macro: float | None
    p_small: float | None
    revenue_per_sp: tuple = field(default_factory=tuple)
    social_welfare: float = 0.0

    @property
    def total_revenue(self) -> float:
        return sum(self.revenue_per_sp)


def regime_threshold(profile: AllocationProfile, params: MarketParams) -> float:
    """Small-cell bandwidth below which the mixed-service regime holds.

    Returns B_S0 = max(kappa*N_f*B_M*R0 - N_m*C_U, 0) / (kappa*N_m*lambda_s*R0);
    total small-cell bandwidth strictly below this implies mixed service.
    """
    k = params.kappa
    _, _, c_u = profile.capacities(params)
    numer = k * params.n_fixed * profile.total_b_macro * params.r0 - params.n_mobile * c_u
    if numer <= 0:
        return 0.0
    return numer / (k * params.n_mobile * params.lambda_s * params.r0)


def small_cell_shadow_rate(c_unlicensed: float, params: MarketParams) -> float:
    """One-sided limit of the small-cell rate as its bandwidth shrinks to 0.

    The per-user small-cell rate is discontinuous at zero bandwidth; entry
    deviations must be priced at this limit, C_U/(kappa*N_f), not at 0.
    """
    return c_unlicensed / (params.kappa * params.n_fixed)


def solve_association(profile: AllocationProfile, params: MarketParams) -> AssociationOutcome:
    """Compute the unique market-clearing association equilibrium."""
    c_m, c_s, c_u = profile.capacities(params)
    if c_m == 0.0 and c_s == 0.0 and c_u == 0.0:
        raise DegenerateScenarioError("all service capacities are zero")
    if c_m == 0.0 and params.n_mobile > 0:
        raise MobileUnservableError(
            "mobile users unservable: no macro-cell capacity allocated"
        )

    alpha = params.alpha
    kap = params.kappa
    n_f, n_m = params.n_fixed, params.n_mobile
    n_t = n_f + n_m

    mixed = profile.total_b_small < regime_threshold(profile, params)

    if mixed:
        denom = c_u + kap * (c_m + c_s)
        k_u = n_t * c_u / denom
        k_m = n_t * kap * c_m / denom
        k_s = n_t * kap * c_s / denom
        r_lic = denom / (kap * n_t)  # common per-user rate in licensed spectrum
        r_m = r_lic
        r_s = r_lic if k_s > 0 else 0.0
        r_u = kap * r_lic if k_u > 0 else 0.0
        p_m = marginal_utility(r_lic, alpha)
        p_s = p_m if k_s > 0 else None
        regime = Regime.MIXED_SERVICE
    else:
        k_m = n_m
        r_m = c_m / n_m
        p_m = marginal_utility(r_m, alpha)
        denom = kap * c_s + c_u
        if denom > 0:
            k_s = n_f * kap * c_s / denom
            k_u = n_f * c_u / denom
        else:
            # No small-cell or unlicensed capacity; threshold logic already
            # routed the fixed users to macro-cells (mixed), so this branch
            # only occurs when there are no fixed users to serve.
            k_s = k_u = 0.0
        r_s = c_s / k_s if k_s > 0 else 0.0
        r_u = c_u / k_u if k_u > 0 else 0.0
        p_s = marginal_utility(r_s, alpha) if k_s > 0 else None
        regime = Regime.SEPARATE_SERVICE

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


def social_welfare(outcome: AssociationOutcome, params: MarketParams) -> float:
    """Sum utility over all users; zero-mass services contribute nothing."""
    alpha = params.alpha
    total = 0.0
    for mass, rate in (
        (outcome.k_macro, outcome.r_macro),
        (outcome.k_small, outcome.r_small),
        (outcome.k_unlicensed, outcome.r_unlicensed),
    ):
        if mass > 0:
            total += mass * utility(rate, alpha)
    return total
