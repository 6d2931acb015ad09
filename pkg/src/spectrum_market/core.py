"""Scenario parameters and the utility/demand primitives shared by all solvers.

Users have iso-elastic utility u(r) = r^(1-a)/(1-a) with curvature a in (0,1),
so demand, net payoff and the licensed/unlicensed rate ratio all have closed
forms. Everything here is a pure function of immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

# Curvature values closer than this to 0 or 1 hit the degenerate
# linear/logarithmic limits and are rejected.
ALPHA_MIN = 1e-6
ALPHA_MAX = 1.0 - 1e-6


class MarketModelError(Exception):
    """Base class for errors raised by this package."""


class DomainError(MarketModelError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class MobileUnservableError(MarketModelError):
    """Mobile users exist but no macro-cell capacity is available."""


class DegenerateScenarioError(MarketModelError):
    """All service capacities are zero; there is no market to clear."""


class SolverConsistencyError(MarketModelError):
    """An internal solver contradiction (theory guarantees this never fires)."""


@dataclass(frozen=True)
class MarketParams:
    """Immutable scenario parameters.

    alpha     -- utility curvature, in (0, 1)
    n_fixed   -- mass of fixed (low-mobility) users
    n_mobile  -- mass of mobile users (macro-only)
    r0        -- macro-cell spectral efficiency (rate per unit bandwidth)
    lambda_s  -- small-cell rate multiplier relative to macro, > 1
    lambda_u  -- unlicensed rate multiplier relative to macro, > 0
    """

    alpha: float
    n_fixed: float
    n_mobile: float
    r0: float
    lambda_s: float
    lambda_u: float

    def __post_init__(self):
        if not ALPHA_MIN <= self.alpha <= ALPHA_MAX:
            raise DomainError(
                f"alpha must be in [{ALPHA_MIN}, {ALPHA_MAX}], got {self.alpha}"
            )
        if self.n_fixed <= 0 or self.n_mobile <= 0:
            raise DomainError("user masses must be strictly positive")
        if self.r0 <= 0:
            raise DomainError("r0 must be strictly positive")
        if self.lambda_s <= 1:
            raise DomainError(f"lambda_s must exceed 1, got {self.lambda_s}")
        if self.lambda_u <= 0:
            raise DomainError(f"lambda_u must be strictly positive, got {self.lambda_u}")

    @property
    def kappa(self) -> float:
        return kappa(self.alpha)


def utility(r: float, alpha: float) -> float:
    """Iso-elastic utility u(r) = r^(1-alpha)/(1-alpha); u(0) = 0."""
    if r < 0:
        raise DomainError(f"rate must be non-negative, got {r}")
    if r == 0.0:
        return 0.0
    return r ** (1.0 - alpha) / (1.0 - alpha)


def marginal_utility(r: float, alpha: float) -> float:
    """u'(r) = r^-alpha; this is the market-clearing price at per-user rate r."""
    if r <= 0:
        raise DomainError(f"rate must be positive, got {r}")
    return r ** (-alpha)


def demand(p: float, alpha: float) -> float:
    """Rate demanded at price p: D(p) = (1/p)^(1/alpha), the inverse of u'."""
    if p <= 0:
        raise DomainError(f"price must be positive, got {p}")
    return (1.0 / p) ** (1.0 / alpha)


def net_payoff(p: float, alpha: float) -> float:
    """Best achievable payoff u(D(p)) - p*D(p) = alpha/(1-alpha) * p^(1-1/alpha)."""
    if p <= 0:
        raise DomainError(f"price must be positive, got {p}")
    return alpha / (1.0 - alpha) * p ** (1.0 - 1.0 / alpha)


def kappa(alpha: float) -> float:
    """Equilibrium ratio of unlicensed to licensed per-user rates.

    kappa = alpha^(1/(1-alpha)), strictly inside (0, 1/e) for alpha in (0,1).
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0,1), got {alpha}")
    return alpha ** (1.0 / (1.0 - alpha))
