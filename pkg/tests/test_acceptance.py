"""End-to-end acceptance checks.

Each test prints a single PASS/FAIL line (bypassing pytest capture so the
lines always appear in the run log) and then asserts the same condition.
"""

import random
import sys
import time

import pytest

from spectrum_market.core import MarketParams
from spectrum_market.association import AllocationProfile, solve_association
from spectrum_market import monopoly, oligopoly, welfare
from spectrum_market.oracle import GridSpec, grid_argmax

from conftest import random_params


def _report(num: int, label: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    line = f"[{status}] acceptance {num}: {label}"
    if detail:
        line += f" ({detail})"
    import conftest

    conftest.ACCEPTANCE_LINES.append(line)
    sys.__stdout__.write(line + "\n")
    sys.__stdout__.flush()
    assert ok, line


def _params(alpha, lambda_u, lambda_s=4.0):
    return MarketParams(alpha=alpha, n_fixed=50, n_mobile=50, r0=50,
                        lambda_s=lambda_s, lambda_u=lambda_u)


CASE_B = _params(0.5, 4.0)
CASE_C = _params(0.8, 10.0)
CASE_CP = _params(0.8, 4.5)


def test_acceptance_1_case_b_kinks():
    t0 = time.perf_counter()
    grid = welfare.default_grid(2.0, 201)
    curve = welfare.welfare_sweep(
        2.0, grid,
        [welfare.SERIES_MONOPOLY_REVENUE, welfare.SERIES_MONOPOLY_WELFARE],
        CASE_B,
    )
    elapsed = time.perf_counter() - t0
    k_rev = curve.kinks[welfare.SERIES_MONOPOLY_REVENUE]
    k_sw = curve.kinks[welfare.SERIES_MONOPOLY_WELFARE]
    ok = (
        abs(k_rev - 1.600) <= 0.005
        and abs(k_sw - 1.385) <= 0.01
        and elapsed < 10.0
    )
    _report(1, "equal-multiplier kinks 1.600 / 1.385", ok,
            f"rev={k_rev:.4f}, sw={k_sw:.4f}, {elapsed:.2f}s")


def test_acceptance_2_case_c_kinks():
    k_rev = welfare.find_kink(welfare.SERIES_MONOPOLY_REVENUE, 2.0, CASE_C)
    k_sw = welfare.find_kink(welfare.SERIES_MONOPOLY_WELFARE, 2.0, CASE_C)
    b_opt = welfare.planner_optimal(2.0, CASE_C).b_unlicensed
    ok = (
        abs(k_rev - 1.16) <= 0.01
        and abs(b_opt - 1.28) <= 0.01
        and abs(k_sw - 0.56) <= 0.01
    )
    _report(2, "strong-unlicensed kinks 1.16 / 1.28 / 0.56", ok,
            f"rev={k_rev:.4f}, opt={b_opt:.4f}, sw={k_sw:.4f}")


def test_acceptance_3_case_cp_kinks():
    k_rev = welfare.find_kink(welfare.SERIES_MONOPOLY_REVENUE, 2.0, CASE_CP)
    k_sw = welfare.find_kink(welfare.SERIES_MONOPOLY_WELFARE, 2.0, CASE_CP)
    b_opt = welfare.planner_optimal(2.0, CASE_CP).b_unlicensed
    ok = (
        abs(k_rev - 1.51) <= 0.01
        and abs(b_opt - 1.19) <= 0.01
        and abs(k_sw - 0.92) <= 0.01
    )
    _report(3, "slight-unlicensed kinks 1.51 / 1.19 / 0.92", ok,
            f"rev={k_rev:.4f}, opt={b_opt:.4f}, sw={k_sw:.4f}")


def test_acceptance_4_planner_case_b_closed_form():
    sol = welfare.planner_optimal(2.0, CASE_B)
    fixed_tier = sol.b_small + sol.b_unlicensed
    ok = abs(fixed_tier - 1.600) <= 1e-9
    _report(4, "planner fixed-tier total 1.600", ok, f"got {fixed_tier:.12f}")


def test_acceptance_5_no_unlicensed_efficiency(base_params):
    # lambda_s > lambda_u and B_U = 0: the market is fully efficient
    planner = welfare.planner_optimal(2.0, base_params).welfare
    gaps = []
    for n in (1, 2, 128):
        eq = oligopoly.symmetric_equilibrium(n, 2.0 / n, 0.0, base_params)
        gaps.append(abs(eq.outcome.social_welfare - planner) / planner)
    ok = max(gaps) <= 1e-9
    _report(5, "market equals planner without unlicensed band", ok,
            f"max rel gap {max(gaps):.2e} over N in (1, 2, 128)")


def test_acceptance_6_oracle_equivalence():
    t0 = time.perf_counter()
    rng = random.Random(20240824)
    failures = []

    def draw():
        return MarketParams(
            alpha=rng.uniform(0.1, 0.9),
            n_fixed=rng.uniform(10, 100),
            n_mobile=rng.uniform(10, 100),
            r0=rng.uniform(5, 100),
            lambda_s=rng.uniform(1.01, 8.0),
            lambda_u=rng.uniform(0.05, 12.0),
        )

    for case in range(100):
        params = draw()
        if case % 2 == 0:
            # monopoly vs 1e-4-step grid search
            B = rng.uniform(0.1, 4.0)
            b_u = rng.uniform(0.0, 1.0)
            steps = max(int(B / 1e-4), 2)
            spec = GridSpec(0.0, B * (1 - 1e-6), steps)
            for opt, objective in (
                (monopoly.optimize_revenue, "revenue"),
                (monopoly.optimize_welfare, "welfare"),
            ):
                sol = opt(B, b_u, params)

                def value(b_s, _obj=objective):
                    out = solve_association(
                        AllocationProfile([(B - b_s, b_s)], b_u), params
                    )
                    if _obj == "revenue":
                        return out.revenue_per_sp[0]
                    return out.social_welfare

                x, _ = grid_argmax(value, spec)
                if abs(sol.b_small - x) >= 1e-3 * max(B, 1.0):
                    failures.append((case, objective, sol.b_small, x))
        else:
            # Nash vs per-provider best-response oracle
            n = rng.randint(1, 3)
            bw = [rng.uniform(0.1, 4.0) for _ in range(n)]
            b_u = rng.uniform(0.0, 1.0)
            res = oligopoly.solve_nash(bw, b_u, params)
            for i, (_, b_s) in enumerate(res.profile.per_sp):
                br = oligopoly.best_response(i, res.profile, params)
                if abs(br - b_s) >= 1e-4 * max(bw[i], 1.0):
                    failures.append((case, f"sp{i}", b_s, br))

    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 300.0
    _report(6, "solver/oracle agreement on 100 random scenarios", ok,
            f"{len(failures)} failures, {elapsed:.1f}s")


def test_acceptance_7_invariant_suite():
    from spectrum_market.core import net_payoff, utility
    from spectrum_market.association import Regime

    rng = random.Random(424242)
    violations = 0

    # 1000 random profiles: clearing, rate ratio, price ordering
    for _ in range(1000):
        params = random_params(rng)
        n = rng.randint(1, 4)
        profile = AllocationProfile(
            [(rng.uniform(0.05, 3.0), rng.uniform(0.0, 3.0)) for _ in range(n)],
            rng.choice([0.0, rng.uniform(0.0, 3.0)]),
        )
        out = solve_association(profile, params)
        n_t = params.n_fixed + params.n_mobile
        if abs(out.k_macro + out.k_small + out.k_unlicensed - n_t) > 1e-9 * n_t:
            violations += 1
        if out.k_small > 0 and out.k_unlicensed > 0:
            if abs(out.r_unlicensed - params.kappa * out.r_small) > 1e-9 * out.r_unlicensed:
                violations += 1
            w_s = net_payoff(out.p_small, params.alpha)
            w_u = utility(out.r_unlicensed, params.alpha)
            if abs(w_s - w_u) > 1e-9 * w_u:
                violations += 1
        if out.regime is Regime.SEPARATE_SERVICE and out.k_small > 0:
            if not out.p_macro > out.p_small:
                violations += 1
        elif out.regime is Regime.MIXED_SERVICE and out.p_small is not None:
            if abs(out.p_macro - out.p_small) > 1e-12 * out.p_macro:
                violations += 1

    # structural invariants of the optimizers and the bandwidth game
    for _ in range(60):
        params = random_params(rng)
        B = rng.uniform(0.5, 4.0)
        b_u = rng.choice([0.0, rng.uniform(0.0, 1.0)])
        sol = monopoly.optimize_revenue(B, b_u, params)
        if abs(sol.b_macro + sol.b_small - B) > 1e-9 * B:
            violations += 1
        if sol.outcome.regime is not Regime.SEPARATE_SERVICE:
            violations += 1
        if b_u > 0:
            base = monopoly.optimize_revenue(B, 0.0, params)
            sw_now = monopoly.optimize_welfare(B, b_u, params)
            sw_base = monopoly.optimize_welfare(B, 0.0, params)
            if sol.outcome.total_revenue >= base.outcome.total_revenue:
                violations += 1
            if sw_now.b_small >= sw_base.b_small:
                violations += 1
            th = monopoly.threshold_crossover(B, params)
            c_u = params.lambda_u * b_u * params.r0
            tilde = monopoly.beta_tilde(params) * B
            if 0 < c_u < th * 0.999 and not sol.boundary and sol.b_small <= tilde:
                violations += 1
            if c_u > th * 1.001 and sol.b_small >= tilde:
                violations += 1

        n = rng.randint(1, 4)
        bw = [rng.uniform(0.1, 3.0) for _ in range(n)]
        res = oligopoly.solve_nash(bw, b_u, params)
        if res.outcome.regime is not Regime.SEPARATE_SERVICE:
            violations += 1
        for (b_m, b_s), b_i in zip(res.profile.per_sp, bw):
            if b_m <= 0:  # small-only play must never appear
                violations += 1
            if abs(b_m + b_s - b_i) > 1e-9 * b_i:
                violations += 1
        if res.outcome.k_small > 0 and not res.outcome.r_small > res.outcome.r_macro:
            violations += 1
        order = sorted(range(n), key=lambda i: bw[i])
        for lo, hi in zip(order, order[1:]):
            if abs(bw[lo] - bw[hi]) < 1e-12:
                if abs(res.profile.per_sp[lo][1] - res.profile.per_sp[hi][1]) > 1e-9:
                    violations += 1
            else:
                if res.profile.per_sp[hi][1] < res.profile.per_sp[lo][1] - 1e-9:
                    violations += 1
        # competition + unlicensed shrinks small-cells (single providers may
        # instead over-invest below the crossover threshold)
        if n >= 2 and b_u > 0 and (
            res.classification is oligopoly.EquilibriumClass.MSNE
        ):
            base = oligopoly.solve_nash(bw, 0.0, params)
            if res.profile.total_b_small >= base.profile.total_b_small:
                violations += 1

    ok = violations == 0
    _report(7, "invariant suite over 1000 profiles + 60 solver scenarios", ok,
            f"{violations} violations")


def test_acceptance_8_fig2_region_map(base_params):
    n_pts = 25
    grid = [0.05 + (3.0 - 0.05) * k / (n_pts - 1) for k in range(n_pts)]
    active = {}
    classes = set()
    for i, b1 in enumerate(grid):
        for j, b2 in enumerate(grid):
            res = oligopoly.solve_nash([b1, b2], 1.0, base_params)
            classes.add(res.classification)
            active[(i, j)] = (
                0 not in res.macro_only_set,
                1 not in res.macro_only_set,
            )

    monotone = True
    for j in range(n_pts):
        # provider 1's small-cell activity switches on once as B_1 grows
        col = [active[(i, j)][0] for i in range(n_pts)]
        if any(a and not b for a, b in zip(col, col[1:])):
            monotone = False
    for i in range(n_pts):
        row = [active[(i, j)][1] for j in range(n_pts)]
        if any(a and not b for a, b in zip(row, row[1:])):
            monotone = False

    corner_small = oligopoly.solve_nash([0.05, 0.05], 1.0, base_params)
    corner_large = oligopoly.solve_nash([3.0, 3.0], 1.0, base_params)
    ok = (
        len(classes) == 3
        and monotone
        and corner_small.classification is oligopoly.EquilibriumClass.MNE
        and corner_large.classification is oligopoly.EquilibriumClass.MSNE
    )
    _report(8, "two-provider region map shows MNE/MPNE/MSNE with monotone "
               "boundaries", ok,
            f"classes={sorted(c.value for c in classes)}, monotone={monotone}")


def test_acceptance_9_fig1_shape(base_params):
    from scipy.optimize import brentq

    B = 2.0
    th_rev = monopoly.threshold_rev(B, base_params)
    th_sw = monopoly.threshold_sw(B, base_params)

    def b_small(c_u, opt):
        b_u = c_u / (base_params.lambda_u * base_params.r0)
        return opt(B, b_u, base_params).b_small

    c_grid = [th_rev * 1.05 * k / 200 for k in range(201)]
    rev = [b_small(c, monopoly.optimize_revenue) for c in c_grid]
    sw = [b_small(c, monopoly.optimize_welfare) for c in c_grid]

    d_rev = [b - a for a, b in zip(rev, rev[1:])]
    sign_changes = sum(
        1 for a, b in zip(d_rev, d_rev[1:])
        if a > 1e-12 and b < -1e-12 or a < -1e-12 and b > 1e-12
    )
    unimodal = sign_changes <= 1 and max(rev) > rev[0]
    non_increasing = all(b <= a + 1e-12 for a, b in zip(sw, sw[1:]))

    zero_rev = brentq(
        lambda c: b_small(c, monopoly.optimize_revenue) - 1e-12,
        th_rev * 0.5, th_rev * 1.05, xtol=th_rev * 1e-6,
    )
    zero_sw = brentq(
        lambda c: b_small(c, monopoly.optimize_welfare) - 1e-12,
        th_sw * 0.5, th_sw * 1.05, xtol=th_sw * 1e-6,
    )
    hit_rev = abs(zero_rev - th_rev) <= 0.005 * th_rev
    hit_sw = abs(zero_sw - th_sw) <= 0.005 * th_sw

    ok = unimodal and non_increasing and hit_rev and hit_sw
    _report(9, "monopoly small-cell bandwidth: unimodal (revenue), "
               "non-increasing (welfare), zeros at thresholds", ok,
            f"rev zero at {zero_rev:.1f}/{th_rev:.0f}, "
            f"sw zero at {zero_sw:.1f}/{th_sw:.0f}")
