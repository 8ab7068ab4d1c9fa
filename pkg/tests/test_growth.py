"""Growth analysis: extrema, ladders, order and gap estimates, scans."""

import json
import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastescape.functions import (
    EntireFunction,
    iterate_function,
    make_builtin,
    make_random_signs,
    make_series,
)
from fastescape.growth import (
    VERDICT_FAILS,
    VERDICT_HOLDS,
    VERDICT_INCONCLUSIVE,
    build_growth_report,
    build_ladder,
    find_min_R,
    find_regular_sequence,
    gap_analysis,
    growth_inequality_scan,
    max_modulus,
    maxmod_order_estimate,
    min_modulus,
    order_estimate,
    series_sup_term,
)
from fastescape.magnitude import Magnitude

mp.mp.prec = 256

EXP = make_builtin("exp")
COSH = make_builtin("cosh_sq")
QUARTER = make_builtin("quarter_order")
SINH = make_builtin("sinh_plus_sq")
GAP1 = make_builtin("gap_series", c=1.0)
GAP2 = make_builtin("gap_series", c=2.0)
PG12 = make_builtin("power_gap", p=1, q=2)

POSITIVE = (EXP, COSH, QUARTER, SINH, GAP1, GAP2, PG12)

# root of M(r) = r for the quarter-order series (mpmath findroot, prec 256)
QUARTER_CROSSING = 14456.61791406162


def exp_minus() -> EntireFunction:
    # alternating signs force the sampled path; |f(r e^{i pi})| = e^r
    def rule(n: int) -> float:
        a = math.exp(-math.lgamma(n + 1.0))
        return a if n % 2 == 0 else -a

    return make_series(rule, name="exp_minus")


def squeeze() -> EntireFunction:
    # a_n = e^(-n^2): log M(r) ~ (ln r)^2 / 4, slower than any positive order
    return make_series(
        lambda n: math.exp(-float(n * n)),
        positive_coefficients=True,
        name="squeeze",
    )


class TestMaxModulus:
    def test_exp_exact_on_axis(self):
        m = max_modulus(EXP, 2.0)
        assert m.depth == 0
        assert m.to_float() == pytest.approx(math.exp(2.0), rel=1e-12)

    def test_cosh_sq_exact_on_axis(self):
        m = max_modulus(COSH, 0.5)
        assert m.to_float() == pytest.approx(1.2715403174076216, rel=1e-12)

    def test_quarter_at_large_radius(self):
        m = max_modulus(QUARTER, 14937.981483779406)
        assert m.to_float() == pytest.approx(15820.6261042756482, rel=1e-12)

    def test_gap_series_beyond_double_range(self):
        m = max_modulus(GAP1, 40322.18624813237)
        assert m.depth == 1
        assert m.mantissa == pytest.approx(40316.19556003037, rel=1e-13)

    def test_sampled_path_finds_off_axis_maximum(self):
        f = exp_minus()
        m = max_modulus(f, 2.0)
        assert m.to_float() == pytest.approx(math.exp(2.0), rel=1e-9)
        # lower estimate: sampling never overshoots the true maximum
        assert m.to_float() <= math.exp(2.0) * (1.0 + 1e-12)

    def test_sampled_path_refines_between_grid_angles(self):
        # 17 samples put no grid point at the maximizing angle pi
        m = max_modulus(exp_minus(), 3.0, samples=17)
        assert m.to_float() == pytest.approx(math.exp(3.0), rel=1e-9)

    def test_random_signs_bounded_by_positive_envelope(self):
        twin = make_random_signs(EXP, seed=7)
        for r in (1.0, 4.0, 9.0):
            assert max_modulus(twin, r) <= max_modulus(EXP, r)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            max_modulus(EXP, 0.0)
        with pytest.raises(ValueError):
            max_modulus(EXP, -2.0)
        with pytest.raises(ValueError):
            max_modulus(exp_minus(), 2.0, samples=15)


class TestMinModulus:
    def test_exp_min_on_negative_axis(self):
        m = min_modulus(EXP, 2.0)
        assert m.to_float() == pytest.approx(math.exp(-2.0), rel=1e-9)
        # upper estimate: sampling never undershoots the true minimum
        assert m.to_float() >= math.exp(-2.0) * (1.0 - 1e-12)

    def test_cosh_sq_vanishes_on_imaginary_axis(self):
        m = min_modulus(COSH, math.pi / 2)
        assert m.to_float() < 1e-18

    def test_cosh_sq_at_two(self):
        m = min_modulus(COSH, 2.0)
        assert m.to_float() == pytest.approx(0.17317818956819404, rel=1e-9)
        assert m.to_float() >= 0.17317818956819404 * (1.0 - 1e-12)

    @given(st.floats(min_value=0.5, max_value=30.0, allow_nan=False))
    @settings(max_examples=25, deadline=None)
    def test_min_never_exceeds_max_exp(self, r):
        assert min_modulus(EXP, r) <= max_modulus(EXP, r)

    def test_min_never_exceeds_max_across_zoo(self):
        for f in POSITIVE:
            for r in (0.7, 2.0, 11.0):
                assert min_modulus(f, r) <= max_modulus(f, r)


class TestSupTerm:
    def test_exp_tie_takes_largest_index(self):
        mu, idx = series_sup_term(EXP, 1.0)
        assert mu.to_float() == pytest.approx(1.0, rel=1e-12)
        assert idx == 1

    def test_exp_at_ten(self):
        mu, idx = series_sup_term(EXP, 10.0)
        assert mu.to_float() == pytest.approx(2755.7319223985890653, rel=1e-12)
        assert idx == 10

    def test_gap_series_at_two(self):
        mu, idx = series_sup_term(GAP1, 2.0)
        assert mu.to_float() == pytest.approx(2.0, rel=1e-12)
        assert idx == 1

    def test_sup_term_never_exceeds_max_modulus(self):
        for f in POSITIVE:
            for r in (1.0, 5.0):
                mu, _ = series_sup_term(f, r)
                assert mu <= max_modulus(f, r)

    def test_requires_coefficients(self):
        with pytest.raises(ValueError, match="coefficients unavailable"):
            series_sup_term(iterate_function(EXP, 2), 1.0)


class TestThresholdLadder:
    def test_exp_rungs_match_iterated_exponentials(self):
        lad = build_ladder(EXP, 1.0, 3)
        assert lad.truncated_at is None
        assert lad.samples_used == 0
        vals = [r.to_float() for r in lad.rungs]
        assert vals[0] == 1.0
        assert vals[1] == pytest.approx(math.e, rel=1e-12)
        assert vals[2] == pytest.approx(15.15426224147926419, rel=1e-12)
        assert vals[3] == pytest.approx(3814279.1047602205922, rel=1e-12)

    def test_exp_deep_rungs_climb_the_tower(self):
        lad = build_ladder(EXP, 1.0, 12)
        assert lad.truncated_at is None
        assert len(lad.rungs) == 13
        assert lad.rung(4).depth == 1
        assert lad.rung(12).depth == 9
        assert lad.rung(12).mantissa == pytest.approx(3814279.10476022, rel=1e-12)

    def test_cosh_sq_rungs(self):
        lad = build_ladder(COSH, 1.0, 4)
        assert lad.rung(1).to_float() == pytest.approx(2.3810978455418157298, rel=1e-12)
        assert lad.rung(2).to_float() == pytest.approx(29.752773083933910057, rel=1e-12)
        assert lad.rung(3).to_float() == pytest.approx(1.741286977203091e25, rel=1e-12)
        assert lad.rung(4).depth == 1
        assert lad.rung(4).mantissa == pytest.approx(3.482573954406183e25, rel=1e-12)

    def test_rungs_strictly_increase(self):
        for f, R in ((EXP, 1.0), (COSH, 1.0), (GAP1, 2.0)):
            lad = build_ladder(f, R, 8)
            for a, b in zip(lad.rungs, lad.rungs[1:]):
                assert a < b

    def test_rungs_rederive_from_predecessors(self):
        # each double-range rung is M(previous rung) to within 1e-6
        for f, R in ((COSH, 1.0), (QUARTER, 14937.981483779406)):
            lad = build_ladder(f, R, 4)
            for a, b in zip(lad.rungs, lad.rungs[1:]):
                if a.depth > 0 or b.depth > 0:
                    break
                again = max_modulus(f, a.mantissa).to_float()
                assert again == pytest.approx(b.mantissa, rel=1e-6)

    def test_larger_start_dominates(self):
        low = build_ladder(EXP, 1.0, 6)
        high = build_ladder(EXP, 1.5, 6)
        for a, b in zip(low.rungs, high.rungs):
            assert a < b

    def test_truncates_when_tower_outruns_doubles(self):
        lad = build_ladder(GAP1, 2.0, 8)
        assert lad.truncated_at == 4
        assert len(lad.rungs) == 5
        assert lad.rung(4).depth == 1
        assert lad.rung(4).mantissa == pytest.approx(40316.195560030385, rel=1e-12)

    def test_rung_index_checked(self):
        lad = build_ladder(EXP, 1.0, 2)
        assert lad.depth == 2
        with pytest.raises(IndexError):
            lad.rung(3)

    def test_rejects_radius_below_growth_crossing(self):
        with pytest.raises(ValueError, match="R invalid"):
            build_ladder(QUARTER, 1.0, 4)

    @given(st.floats(min_value=1.0, max_value=3.0, allow_nan=False))
    @settings(max_examples=20, deadline=None)
    def test_exp_ladder_monotone_for_any_start(self, R):
        lad = build_ladder(EXP, R, 5)
        for a, b in zip(lad.rungs, lad.rungs[1:]):
            assert a < b


class TestFindMinR:
    def test_grid_origin_suffices_for_fast_growers(self):
        for f in (EXP, COSH, SINH, GAP1):
            assert find_min_R(f) == 1.0

    def test_quarter_order_needs_large_radius(self):
        R = find_min_R(QUARTER)
        assert R == pytest.approx(14937.981483779406, rel=1e-9)
        assert R > QUARTER_CROSSING
        assert R <= QUARTER_CROSSING * 1.0501

    def test_returned_radius_is_valid(self):
        for f in (EXP, QUARTER, GAP2):
            R = find_min_R(f)
            assert max_modulus(f, R) > Magnitude.from_real(R)

    def test_reports_failure_below_cap(self):
        with pytest.raises(ValueError, match="no valid R"):
            find_min_R(QUARTER, search_max=1000.0)


class TestOrderEstimate:
    @pytest.mark.parametrize(
        "f,n_max,want,tol",
        [
            (EXP, 2000, 1.0, 0.02),
            (COSH, 2000, 1.0, 0.02),
            (QUARTER, 2000, 0.25, 0.03),
            (GAP1, 2000, 1.0, 0.1),
            (GAP2, 4000, 4.0, 0.25),
            (PG12, 2000, 0.5, 0.02),
        ],
        ids=["exp", "cosh_sq", "quarter", "gap1", "gap2", "power_gap_half"],
    )
    def test_order_windows(self, f, n_max, want, tol):
        order, lower = order_estimate(f, n_max=n_max)
        assert abs(order - want) <= tol
        assert lower <= order

    def test_lower_order_tracks_order_for_regular_series(self):
        _, lower = order_estimate(GAP1, n_max=2000)
        assert 0.9 <= lower <= 1.1
        _, lower = order_estimate(GAP2, n_max=4000)
        assert abs(lower - 4.0) <= 0.25

    def test_rejects_thin_input(self):
        with pytest.raises(ValueError):
            order_estimate(EXP, n_max=99)
        cubic = make_series(lambda n: 1.0 if n <= 3 else 0.0, name="cubic")
        with pytest.raises(ValueError):
            order_estimate(cubic)


class TestMaxmodOrder:
    def test_exp_is_exact(self):
        assert maxmod_order_estimate(EXP) == 1.0

    def test_agrees_with_coefficient_order(self):
        for f, n_max in ((EXP, 2000), (COSH, 2000), (QUARTER, 2000)):
            order, _ = order_estimate(f, n_max=n_max)
            assert abs(maxmod_order_estimate(f) - order) <= 0.05


class TestGapAnalysis:
    def test_gap_series_has_fabry_and_hayman_gaps(self):
        ga = gap_analysis(GAP1)
        assert ga.exponents[:4] == (0, 1, 4, 9)
        assert ga.fabry_verdict == VERDICT_HOLDS
        assert ga.hayman_verdict == VERDICT_HOLDS
        assert ga.ratios[-1] == pytest.approx(199.0**2 / 200.0, rel=1e-12)

    def test_gap_two_holds(self):
        ga = gap_analysis(GAP2)
        assert ga.fabry_verdict == VERDICT_HOLDS
        assert ga.hayman_verdict == VERDICT_HOLDS

    def test_dense_series_fails(self):
        for f in (EXP, PG12):
            ga = gap_analysis(f)
            assert ga.fabry_verdict == VERDICT_FAILS
            assert ga.hayman_verdict == VERDICT_FAILS
            assert ga.ratios[-1] <= 10.0

    def test_square_gaps_that_go_dense_are_inconclusive(self):
        # squares up to 15^2, then every exponent through 400: the Hayman
        # bound is cleared early and lost late, so the verdict is not clean
        def rule(n: int) -> float:
            k = math.isqrt(n)
            if (k * k == n and n <= 225) or 226 <= n <= 400:
                return math.exp(-1.5 * float(n) ** 1.02)
            return 0.0

        ga = gap_analysis(make_series(rule, name="square_then_dense"))
        assert ga.hayman_verdict == VERDICT_INCONCLUSIVE

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            gap_analysis(EXP, k_max=19)
        with pytest.raises(ValueError):
            gap_analysis(EXP, alpha=2.0)
        cubic = make_series(lambda n: 1.0 if n <= 3 else 0.0, name="cubic")
        with pytest.raises(ValueError):
            gap_analysis(cubic)


class TestInequalityScan:
    def test_convexity_holds_for_exp_at_scale(self):
        verdict, witnesses = growth_inequality_scan(EXP, "convexity", 2.0, (2.0, 50.0))
        assert verdict == VERDICT_HOLDS
        assert witnesses == []

    def test_convexity_fails_below_growth_crossing(self):
        verdict, witnesses = growth_inequality_scan(
            EXP, "convexity", 2.0, (1.05, 1.3)
        )
        assert verdict == VERDICT_FAILS
        w = witnesses[0]
        assert w["log_M_r_c"] < w["c_log_M_r"]

    @pytest.mark.parametrize("c", [1.5, 2.0, 3.0])
    def test_convexity_across_zoo_above_crossing(self, c):
        for f in POSITIVE:
            lo = max(find_min_R(f), 5.0)
            verdict, witnesses = growth_inequality_scan(
                f, "convexity", c, (lo, 1e6)
            )
            assert verdict == VERDICT_HOLDS, (f.name, c, witnesses[:2])

    def test_ahr_holds_for_exp(self):
        verdict, _ = growth_inequality_scan(
            EXP, "ahr", 0.5, (math.e**2, math.e**20)
        )
        assert verdict == VERDICT_HOLDS

    def test_ahr_fails_for_logarithmic_growth(self):
        verdict, witnesses = growth_inequality_scan(
            squeeze(), "ahr", 1.5, (100.0, 1e4), points=16
        )
        assert verdict == VERDICT_FAILS
        assert witnesses[0]["phi_ratio"] < witnesses[0]["target"]

    def test_small_growth_fails_for_exp(self):
        verdict, witnesses = growth_inequality_scan(
            EXP, "small_growth", 2, (100.0, 1e6)
        )
        assert verdict == VERDICT_FAILS
        w = witnesses[0]
        assert w["loglog_M"] >= w["bound"]

    def test_small_growth_holds_for_squeezed_series(self):
        verdict, _ = growth_inequality_scan(
            squeeze(), "small_growth", 2, (100.0, 1e6)
        )
        assert verdict == VERDICT_HOLDS

    def test_min_condition_holds_for_small_order(self):
        verdict, _ = growth_inequality_scan(
            QUARTER, "min_condition", 3, (1e4, 1e6), points=16
        )
        assert verdict == VERDICT_HOLDS

    def test_min_condition_fails_for_exp(self):
        # m(rho) = e^(-rho) can never reach M(r)
        verdict, witnesses = growth_inequality_scan(
            EXP, "min_condition", 2, (10.0, 1000.0), points=16
        )
        assert verdict == VERDICT_FAILS
        w = witnesses[0]
        assert w["best_min_modulus"] < w["max_modulus"]
        assert w["r"] < w["best_rho"] < w["r"] ** 2

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError, match="unknown test"):
            growth_inequality_scan(EXP, "curvature", 2.0, (2.0, 50.0))
        with pytest.raises(ValueError):
            growth_inequality_scan(EXP, "convexity", 1.0, (2.0, 50.0))
        with pytest.raises(ValueError):
            growth_inequality_scan(EXP, "convexity", 2.0, (50.0, 2.0))
        with pytest.raises(ValueError):
            growth_inequality_scan(EXP, "convexity", 2.0, (2.0, 50.0), points=8)
        with pytest.raises(ValueError):
            growth_inequality_scan(EXP, "ahr", 0.5, (0.5, 50.0))
        with pytest.raises(ValueError):
            growth_inequality_scan(EXP, "small_growth", 2.5, (100.0, 1e6))
        with pytest.raises(ValueError):
            growth_inequality_scan(EXP, "min_condition", 1.0, (10.0, 100.0))


class TestRegularSequence:
    def test_gap_series_from_two(self):
        radii = find_regular_sequence(GAP1, 2.0, 2.0, 3)
        assert radii == pytest.approx(
            [5.2773321, 6.8267918, 12.8653663], rel=1e-7
        )

    def test_gap_series_from_one(self):
        # a valid sequence need not be increasing when R is small
        radii = find_regular_sequence(GAP1, 1.0, 2.0, 3)
        assert radii == pytest.approx(
            [3.9995582, 3.9211355, 3.8442505], rel=1e-7
        )

    def test_exp_from_one(self):
        radii = find_regular_sequence(EXP, 1.0, 2.0, 2)
        assert radii == pytest.approx(
            [2.08068509059002, 2.8003281854481816], rel=1e-12
        )

    def test_sequence_satisfies_the_defining_inequalities(self):
        m, depth = 2.0, 3
        radii = find_regular_sequence(GAP1, 2.0, m, depth)
        ladder = build_ladder(GAP1, 2.0, depth - 1)
        for n, r in enumerate(radii):
            assert r > ladder.rung(n).to_float()
        for n in range(depth - 1):
            lhs = max_modulus(GAP1, radii[n])
            rhs = Magnitude.from_log(m * math.log(radii[n + 1]))
            assert rhs < lhs

    def test_rejects_bad_inputs(self):
        cubic = make_series(lambda n: 1.0 if n <= 3 else 0.0, name="cubic")
        with pytest.raises(ValueError, match="not transcendental"):
            find_regular_sequence(cubic, 2.0, 2.0, 3)
        with pytest.raises(ValueError):
            find_regular_sequence(GAP1, 2.0, 1.0, 3)
        with pytest.raises(ValueError):
            find_regular_sequence(GAP1, 2.0, 2.0, 0)
        with pytest.raises(ValueError):
            find_regular_sequence(GAP1, 2.0, 2.0, 3, delta=1.0)

    def test_reports_when_thresholds_leave_double_range(self):
        with pytest.raises(ValueError, match="double range"):
            find_regular_sequence(GAP1, 2.0, 2.0, 7)


class TestGrowthReport:
    def test_exp_profile(self):
        rep = build_growth_report(EXP)
        assert abs(rep.order_estimate - 1.0) <= 0.02
        assert rep.maxmod_order_estimate == 1.0
        assert rep.fabry_verdict == VERDICT_FAILS
        assert rep.convexity_verdict == VERDICT_HOLDS
        assert rep.convexity_violations == 0
        assert rep.ahr_verdict == VERDICT_HOLDS

    def test_gap_series_profile(self):
        rep = build_growth_report(GAP1)
        assert rep.fabry_verdict == VERDICT_HOLDS
        assert rep.hayman_verdict == VERDICT_HOLDS
        assert rep.convexity_violations == 0

    def test_text_rendering(self):
        rep = build_growth_report(EXP)
        lines = rep.to_text().splitlines()
        assert lines[0] == "function: exp"
        keys = {line.split(":")[0] for line in lines if ":" in line}
        assert "order_estimate" in keys
        assert "fabry_verdict" in keys
        assert "convexity_verdict" in keys

    def test_json_round_trip(self):
        rep = build_growth_report(EXP)
        text = rep.to_json()
        assert text.endswith("\n")
        data = json.loads(text)
        assert data["schema"] == "fastescape.growth-report/1"
        assert data["function"] == "exp"
        assert data["order_estimate"] == rep.order_estimate
        assert data["convexity_violations"] == 0
