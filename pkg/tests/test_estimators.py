"""Point estimators, the smooth shrinkage solver, conditional medians, the
Pitman clip, and the dominance checker."""

import math

import numpy as np
import pytest
from scipy import stats

import entropy_lab as el
from entropy_lab.errors import DomainError
from entropy_lab.estimators import (
    TabulatedEstimator,
    bz_table,
    median_ln_v_eta0,
    resolve_estimator,
    window_mass_ratio,
)
from entropy_lab.model import SuffStats

# frozen from the verified closed forms / defining equations
BOEING_LNS = 5.8289326416632868
BOEING_BAEE_L1 = 4.729300217167414
BOEING_STEIN_L1 = 4.685508273872992
BOEING_BZ_L1 = 4.679647725457768
BOEING_MLE = 4.586479316769287
BOEING_RMLE_SWAPPED = 4.595175113549841
BOEING_R0_L1 = -1.1492849148052735
BOEING_R0_LINEXM3 = -1.0657465683944947


def unit_scale_stats(n=6, w=0.0):
    # s = 1 so ln s = 0 and the estimate equals its additive term
    return SuffStats(n=n, mean1=0.0, mean2=w, s2=1.0, s=1.0, w=w)


class TestBaseline:
    def test_baee_boeing_l1(self, boeing_stats, l1):
        assert el.baee(boeing_stats, l1) == pytest.approx(BOEING_BAEE_L1, abs=1e-9)
        assert el.baee(boeing_stats, l1) == pytest.approx(4.7293, abs=5e-4)

    @pytest.mark.parametrize("a1,table_value", [(-3.0, 4.8233), (-2.0, 4.7892),
                                                (2.0, 4.6776), (4.0, 4.6321)])
    def test_baee_boeing_linex_table(self, boeing_stats, a1, table_value):
        assert el.baee(boeing_stats, el.Loss.linex(a1)) == pytest.approx(table_value, abs=5e-4)

    def test_baee_unit_scale_is_d0(self, l1):
        assert el.baee(unit_scale_stats(), l1) == pytest.approx(el.d0(l1, 6), abs=1e-14)

    def test_umvue_equals_baee_under_l1(self, l1):
        rng = np.random.default_rng(0)
        for _ in range(5):
            data = el.two_sample_data(rng.normal(0, 2, 7), rng.normal(1, 2, 7))
            st = el.suff_stats(data)
            assert el.umvue(st) == el.baee(st, l1)


class TestMleFamily:
    def test_mle_boeing(self, boeing_stats):
        assert el.mle(boeing_stats) == pytest.approx(BOEING_MLE, abs=1e-9)

    def test_rmle_equals_mle_for_positive_w(self, boeing_stats):
        assert el.rmle(boeing_stats) == el.mle(boeing_stats)

    def test_rmle_swapped(self, boeing_data):
        swapped = el.two_sample_data(boeing_data.sample2, boeing_data.sample1)
        st = el.suff_stats(swapped)
        assert st.w < 0
        assert el.rmle(st) == pytest.approx(BOEING_RMLE_SWAPPED, abs=1e-9)
        # explicit arithmetic: + ln(1 + 3 w^2)/2 at n = 6
        assert el.rmle(st) == pytest.approx(
            el.mle(st) + 0.5 * math.log1p(3.0 * st.w ** 2), abs=1e-12)

    def test_rmle_continuous_at_zero(self):
        st = unit_scale_stats(w=0.0)
        assert el.rmle(st) == el.mle(st)


class TestSteinFamily:
    def test_stein_boeing_l1(self, boeing_stats, l1):
        assert el.stein(boeing_stats, l1) == pytest.approx(BOEING_STEIN_L1, abs=1e-9)
        assert el.stein(boeing_stats, l1) == pytest.approx(4.6855, abs=5e-4)

    def test_stein_at_w_zero_is_baee(self, l1):
        st = unit_scale_stats(w=0.0)
        assert el.stein(st, l1) == el.baee(st, l1)

    def test_stein_saturates_for_large_w(self, l1):
        st = unit_scale_stats(w=50.0)
        assert el.stein(st, l1) == el.baee(st, l1)

    def test_improved_mle_boeing(self, boeing_stats, l1):
        # threshold does not bind here, MLE retained
        assert el.improved_mle(boeing_stats, l1) == pytest.approx(BOEING_MLE, abs=1e-9)

    def test_improved_mle_at_zero(self, l1):
        st = unit_scale_stats(w=0.0)
        assert el.improved_mle(st, l1) == el.mle(st)

    def test_improved_rmle_swapped(self, boeing_data, l1):
        swapped = el.two_sample_data(boeing_data.sample2, boeing_data.sample1)
        st = el.suff_stats(swapped)
        assert el.improved_rmle(st, l1) == pytest.approx(BOEING_STEIN_L1, abs=1e-9)

    def test_improved_rmle_takes_larger_arm_for_negative_w(self, l1):
        # for w < 0 the improvement replaces the restricted term by the
        # conditional target whenever that target is larger
        st = unit_scale_stats(w=-0.9)
        t = 0.5 * math.log1p(0.5 * 6 * 0.81)
        want = max(-0.5 * math.log(12.0) + t, el.m0(l1, 6) + t)
        assert el.improved_rmle(st, l1) == pytest.approx(want, abs=1e-14)
        assert el.improved_rmle(st, l1) >= el.rmle(st)


class TestSmoothShrinkageSolver:
    def test_limit_at_zero(self, l1, linex_m3):
        for loss in (l1, linex_m3):
            assert el.bz_r0(0.0, 6, loss) == el.m0(loss, 6)
            assert el.bz_r0(1e-6, 6, loss) == pytest.approx(el.m0(loss, 6), abs=1e-6)

    def test_limit_at_infinity(self, l1, linex_m3):
        for loss in (l1, linex_m3):
            assert el.bz_r0(1e3, 6, loss) == pytest.approx(el.d0(loss, 6), abs=1e-4)

    def test_boeing_values(self, l1, linex_m3):
        assert el.bz_r0(0.0764716, 6, l1) == pytest.approx(BOEING_R0_L1, abs=1e-10)
        assert el.bz_r0(0.0764716, 6, linex_m3) == pytest.approx(BOEING_R0_LINEXM3, abs=1e-10)

    def test_matches_defining_equation(self, l1, linex_m3):
        for loss in (l1, linex_m3):
            for absw in (0.0764716, 0.4, 1.3):
                assert el.bz_r0(absw, 6, loss) == pytest.approx(
                    el.bz_r0_defining(absw, 6, loss), abs=1e-8)

    def test_sandwich_and_monotone(self, l1):
        lo, hi = el.m0(l1, 6), el.d0(l1, 6)
        grid = np.geomspace(1e-3, 30.0, 50)
        vals = [el.bz_r0(float(w), 6, l1) for w in grid]
        assert all(lo <= v <= hi for v in vals)
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_brewster_zidek_boeing(self, boeing_stats, l1):
        assert el.brewster_zidek(boeing_stats, l1) == pytest.approx(BOEING_BZ_L1, abs=1e-8)
        assert el.brewster_zidek(boeing_stats, l1) <= el.baee(boeing_stats, l1)

    def test_brewster_zidek_at_zero(self, l1):
        st = unit_scale_stats(w=0.0)
        assert el.brewster_zidek(st, l1) == pytest.approx(el.m0(l1, 6), abs=1e-14)

    def test_negative_absw_rejected(self, l1):
        with pytest.raises(DomainError):
            el.bz_r0(-0.1, 6, l1)

    def test_table_accuracy_and_export(self, l1, tmp_path):
        tab = bz_table(6, l1)
        for w in (0.0, 0.05, 0.3, 1.0, 4.0):
            assert float(tab(np.array(w))) == pytest.approx(el.bz_r0(w, 6, l1), abs=2e-6)
        out = tmp_path / "r0.csv"
        tab.to_csv(out)
        head = out.read_text().splitlines()
        assert head[0] == "absw,r0"
        assert len(head) == 801


class TestIerdChecker:
    def test_smooth_floor_passes(self, l1):
        y = np.geomspace(1e-4, 400.0, 50)
        phi = [el.bz_r0(math.sqrt(v / 6.0), 6, l1) for v in y]
        rep = el.ierd_check(y, phi, l1, 6)
        assert rep.monotone and rep.limit_ok and rep.dominates and rep.all_ok

    def test_constant_d0_passes(self, l1):
        y = np.geomspace(1e-4, 400.0, 30)
        rep = el.ierd_check(y, [el.d0(l1, 6)] * len(y), l1, 6)
        assert rep.monotone and rep.limit_ok and rep.dominates

    def test_below_floor_fails(self, l1):
        y = np.geomspace(1e-4, 400.0, 30)
        rep = el.ierd_check(y, [el.m0(l1, 6) - 0.1] * len(y), l1, 6)
        assert not rep.dominates
        assert not rep.limit_ok

    def test_unsorted_grid_rejected(self, l1):
        with pytest.raises(DomainError):
            el.ierd_check([2.0, 1.0], [0.0, 0.0], l1, 6)


class TestConditionalMedian:
    def test_chi_square_median_at_origin(self):
        want = math.log(float(stats.chi2.ppf(0.5, 11)))
        assert el.conditional_median(0.0, 0.0, 6) == pytest.approx(want, abs=1e-3)
        assert median_ln_v_eta0(0.0, 6) == pytest.approx(want, abs=1e-9)

    def test_scale_shift_in_w(self):
        # at eta = 0 the conditional law is gamma with scale 2/(1 + n w^2/2)
        m0w = el.conditional_median(0.5, 0.0, 6)
        want = el.conditional_median(0.0, 0.0, 6) - math.log1p(6 * 0.25 / 2.0)
        assert m0w == pytest.approx(want, abs=2e-6)
        assert m0w == pytest.approx(median_ln_v_eta0(0.5, 6), abs=2e-6)

    def test_monotone_in_eta_for_positive_w(self):
        vals = [el.conditional_median(0.5, e, 6) for e in (0.0, 0.5, 1.0, 2.0, 4.0)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            el.conditional_median(0.5, -1.0, 6)


class TestPitmanClip:
    def test_no_clip_far_from_target(self, l1):
        # at w = 1 the median target sits above d0, so the baseline is kept
        st = unit_scale_stats(w=1.0)
        assert el.pitman_clipped(st, l1) == el.baee(st, l1)

    def test_w_zero_keeps_base(self, l1):
        st = unit_scale_stats(w=0.0)
        assert el.pitman_clipped(st, l1) == el.baee(st, l1)

    def test_clips_down_for_small_positive_w(self, boeing_stats, l1):
        # boeing w is small positive: estimate capped at the median target
        target = math.log(boeing_stats.s) - 0.5 * median_ln_v_eta0(boeing_stats.w, 6)
        assert el.pitman_clipped(boeing_stats, l1) == pytest.approx(target, abs=1e-12)
        assert el.pitman_clipped(boeing_stats, l1) < el.baee(boeing_stats, l1)

    def test_clips_up_for_moderate_negative_w(self, l1):
        # the floor binds once the median target rises above d0
        st = unit_scale_stats(w=-0.5)
        target = -0.5 * median_ln_v_eta0(-0.5, 6)
        assert target > el.d0(l1, 6)
        assert el.pitman_clipped(st, l1) == pytest.approx(target, abs=1e-12)
        assert el.pitman_clipped(st, l1) > el.baee(st, l1)

    def test_custom_bounds_override(self, boeing_stats, l1):
        val = el.pitman_clipped(boeing_stats, l1, upper_at=lambda w: 10.0)
        assert val == el.baee(boeing_stats, l1)

    def test_custom_base(self, boeing_stats, l1):
        val = el.pitman_clipped(boeing_stats, l1, base=lambda w: -5.0)
        assert val == math.log(boeing_stats.s) - 5.0


class TestEquivariance:
    @pytest.mark.parametrize("name", ["baee", "umvue", "mle", "rmle", "stein",
                                      "improved_mle", "improved_rmle", "bz", "pitman"])
    def test_scale_shift_equivariance(self, name, l1):
        rng = np.random.default_rng(11)
        x = rng.normal(0.0, 1.5, 8)
        y = rng.normal(0.5, 1.5, 8)
        a = 2.5
        st1 = el.suff_stats(el.two_sample_data(x, y))
        st2 = el.suff_stats(el.two_sample_data(a * x + 3.0, a * y + 3.0))
        _, fn = resolve_estimator(name, 8, l1)
        v1 = float(fn(np.array(math.log(st1.s)), np.array(st1.w)))
        v2 = float(fn(np.array(math.log(st2.s)), np.array(st2.w)))
        assert v2 == pytest.approx(v1 + math.log(a), abs=1e-10)


class TestScalarVectorAgreement:
    def test_all_estimators(self, boeing_stats, l1, linex_m3):
        scalar = {
            "baee": el.baee, "umvue": lambda st, loss: el.umvue(st),
            "mle": lambda st, loss: el.mle(st), "rmle": lambda st, loss: el.rmle(st),
            "stein": el.stein, "improved_mle": el.improved_mle,
            "improved_rmle": el.improved_rmle, "bz": el.brewster_zidek,
            "pitman": el.pitman_clipped,
        }
        for loss in (l1, linex_m3):
            for name, fn_scalar in scalar.items():
                _, fn = resolve_estimator(name, 6, loss)
                vec = float(fn(np.array(math.log(boeing_stats.s)), np.array(boeing_stats.w)))
                tol = 2e-6 if name == "bz" else 1e-10  # bz vector path interpolates
                assert vec == pytest.approx(fn_scalar(boeing_stats, loss), abs=tol), (name, loss)

    def test_unknown_name(self, l1):
        with pytest.raises(DomainError):
            resolve_estimator("nope", 6, l1)

    def test_tabulated_estimator(self, l1):
        custom = TabulatedEstimator("flat", (1e-6, 1.0, 100.0), (-1.0, -1.0, -1.0))
        name, fn = resolve_estimator(custom, 6, l1)
        assert name == "flat"
        assert float(fn(np.array(0.0), np.array(0.3))) == pytest.approx(-1.0)


class TestWindowMassRatio:
    def test_closed_form_oracle(self):
        # I(t) = 2 sqrt(pi) [Phi((s a - eta)/sqrt2) - Phi((-s a - eta)/sqrt2)] / s,
        # s = sqrt(n) e^t
        n, eta, alpha = 6, 1.0, 0.8

        def oracle(t):
            s = math.sqrt(n) * math.exp(t)
            hi = (s * alpha - eta) / math.sqrt(2.0)
            lo = (-s * alpha - eta) / math.sqrt(2.0)
            return 2.0 * math.sqrt(math.pi) * (stats.norm.cdf(hi) - stats.norm.cdf(lo)) / s

        got = window_mass_ratio(0.3, 0.2, 0.9, n, eta, alpha)
        assert got == pytest.approx(oracle(0.3 - 0.9) / oracle(0.3 - 0.2), rel=1e-9)

    @pytest.mark.parametrize("params", [(6, 1.0, 0.8, 0.2, 0.9), (10, 1.0, 1.5, 0.1, 0.5)])
    def test_nondecreasing_in_y(self, params):
        n, eta, alpha, d1, d2 = params
        ys = np.linspace(-3.0, 3.0, 40)
        vals = [window_mass_ratio(float(y), d1, d2, n, eta, alpha) for y in ys]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_large_eta_counterexample(self):
        # the monotonicity claim fails once the mean separation dominates
        # the window; kept as a regression guard on the boundary of validity
        ys = np.linspace(-3.0, 0.0, 30)
        vals = [window_mass_ratio(float(y), 0.3, 0.8, 8, 3.0, 1.0) for y in ys]
        assert min(b - a for a, b in zip(vals, vals[1:])) < -1e-4


class TestReporting:
    def test_estimate_all_order_and_entropy(self, boeing_stats, l1):
        reports = el.estimate_all(boeing_stats, l1)
        kinds = [r.kind for r in reports]
        assert kinds == ["baee", "umvue", "mle", "rmle", "stein",
                         "improved_mle", "improved_rmle", "bz", "pitman"]
        for r in reports:
            assert r.entropy_value - 2.0 * r.value == pytest.approx(
                1.0 + math.log(2.0 * math.pi), abs=1e-12)
