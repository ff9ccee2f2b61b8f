import math

import numpy as np
import pytest
from scipy import integrate, stats

from helpers import (empirical_cdf_at, ks_distance, rng_for, sample_cascades,
                     sample_ordered_gain)
from risnoma.config import EveVariant, Scenario, SicMode, derive_stats, nu
from risnoma.secrecy_engine import (SecrecyQuery, SopUnderflowError,
                                    cdf_sinr_legit, diversity_order_estimate,
                                    pdf_sinr_eve, secrecy_rate, sinr_eve_cdf,
                                    sop_asymptotic, sop_closed_form,
                                    sop_exact_numeric, system_sop,
                                    throughput_delay_limited)
from risnoma.special_math import gamma_int, bessel_k


class TestCdfSinrLegit:
    def test_zero_argument(self, table1_config):
        for sic in (SicMode.PERFECT, SicMode.IMPERFECT):
            assert cdf_sinr_legit(0.0, 2, 2, table1_config, sic) == 0.0

    def test_saturation_at_sinr_supremum(self, table1_config):
        # decoding user 1: SINR can never exceed a_1/nu_1 = 0.6/0.4
        assert cdf_sinr_legit(1.5, 2, 1, table1_config, SicMode.PERFECT) == 1.0
        assert cdf_sinr_legit(2.0, 3, 1, table1_config, SicMode.IMPERFECT) == 1.0

    def test_monotone_in_x(self, table1_config):
        xs = np.linspace(0.0, 2.9, 60)
        vals = cdf_sinr_legit(xs, 2, 2, table1_config, SicMode.IMPERFECT,
                              d_order=128)
        assert np.all(np.diff(vals) >= -1e-12)

    def test_against_simulated_sinr(self, table1_config):
        # user 2 decoding its own message, perfect SIC, 10 dB
        cfg = table1_config.with_overrides(snr_legit_db=10.0)
        st_ = derive_stats(cfg)
        rng = rng_for("legit-cdf")
        gain = sample_ordered_gain(rng, 1_000_000, 3, 2, 8, st_.n_br,
                                   st_.n_rk[1])
        a2, nu2 = cfg.power_alloc[1], nu(cfg, 2)
        sinr = st_.rho * gain * a2 / (st_.rho * gain * nu2 + 1.0)
        x = 0.5
        emp = float(np.mean(sinr <= x))
        assert cdf_sinr_legit(x, 2, 2, cfg, SicMode.PERFECT) == pytest.approx(
            emp, abs=0.01)

    def test_imperfect_sic_against_simulation(self, table1_config):
        cfg = table1_config.with_overrides(snr_legit_db=10.0)
        st_ = derive_stats(cfg)
        rng = rng_for("legit-cdf-ipsic")
        n = 400_000
        gain = sample_ordered_gain(rng, n, 3, 2, 8, st_.n_br, st_.n_rk[1])
        resid = rng.exponential(st_.n_ipu, size=n)
        a2, nu2 = cfg.power_alloc[1], nu(cfg, 2)
        sinr = st_.rho * gain * a2 / (
            st_.rho * gain * nu2 + st_.rho * resid + 1.0)
        for x in (0.2, 0.5, 1.0):
            emp = float(np.mean(sinr <= x))
            assert cdf_sinr_legit(x, 2, 2, cfg, SicMode.IMPERFECT) == \
                pytest.approx(emp, abs=0.01)

    def test_rank_validation(self, table1_config):
        with pytest.raises(ValueError):
            cdf_sinr_legit(0.1, 1, 2, table1_config, SicMode.PERFECT)
        with pytest.raises(ValueError):
            cdf_sinr_legit(-0.1, 2, 2, table1_config, SicMode.PERFECT)


class TestSinrEveCdf:
    def test_zero_argument(self, table1_config):
        for scen in (Scenario.EXTERNAL, Scenario.INTERNAL):
            assert sinr_eve_cdf(0.0, 2, table1_config, scen,
                                SicMode.PERFECT) == 0.0

    def test_saturation_not_error(self, table1_config):
        # beyond a_2/nu_2 = 3 the CDF is 1
        assert sinr_eve_cdf(5.0, 2, table1_config, Scenario.EXTERNAL,
                            SicMode.PERFECT) == 1.0

    def test_external_psic_matches_direct_formula(self, table1_config):
        cfg = table1_config
        st_ = derive_stats(cfg)
        a2, nu2 = cfg.power_alloc[1], nu(cfg, 2)
        for x in (0.1, 0.5, 1.5):
            u = x / ((a2 - nu2 * x) * st_.rho_e * st_.n_br * st_.n_re)
            direct = 1.0 - (2.0 / gamma_int(8)) * u ** 4 * bessel_k(
                8, 2.0 * math.sqrt(u))
            assert sinr_eve_cdf(x, 2, cfg, Scenario.EXTERNAL,
                                SicMode.PERFECT) == pytest.approx(direct,
                                                                  abs=1e-12)

    def test_as_printed_variant_drops_cascade_scale(self, table1_config):
        cfg = table1_config.with_overrides(
            eve_interference_variant=EveVariant.AS_PRINTED)
        st_ = derive_stats(cfg)
        a2, nu2 = cfg.power_alloc[1], nu(cfg, 2)
        x = 0.5
        u = x / ((a2 - nu2 * x) * st_.rho_e)
        direct = 1.0 - (2.0 / gamma_int(8)) * u ** 4 * bessel_k(
            8, 2.0 * math.sqrt(u))
        assert sinr_eve_cdf(x, 2, cfg, Scenario.EXTERNAL,
                            SicMode.PERFECT) == pytest.approx(direct, abs=1e-12)

    def test_internal_matches_simulated_rank_one(self, table1_config):
        cfg = table1_config
        st_ = derive_stats(cfg)
        rng = rng_for("eve-internal")
        n = 1_000_000
        gain = sample_ordered_gain(rng, n, 3, 1, 8, st_.n_br, st_.n_rk[0])
        resid = rng.exponential(st_.n_ipe, size=n)
        a2, nu2 = cfg.power_alloc[1], nu(cfg, 2)
        sinr = st_.rho_e * gain * a2 / (
            st_.rho_e * gain * nu2 + st_.rho_e * resid + 1.0)
        for x in (0.1, 0.5, 1.0):
            emp = float(np.mean(sinr <= x))
            assert sinr_eve_cdf(x, 2, cfg, Scenario.INTERNAL,
                                SicMode.IMPERFECT) == pytest.approx(emp,
                                                                    abs=0.01)

    def test_internal_rejects_weakest_user(self, table1_config):
        with pytest.raises(ValueError):
            sinr_eve_cdf(0.1, 1, table1_config, Scenario.INTERNAL,
                         SicMode.PERFECT)


class TestPdfSinrEve:
    @pytest.mark.parametrize("scenario,sic", [
        (Scenario.EXTERNAL, SicMode.PERFECT),
        (Scenario.EXTERNAL, SicMode.IMPERFECT),
        (Scenario.INTERNAL, SicMode.PERFECT),
        (Scenario.INTERNAL, SicMode.IMPERFECT),
    ])
    def test_normalisation(self, table1_config, scenario, sic):
        cfg = table1_config
        a2, nu2 = cfg.power_alloc[1], nu(cfg, 2)
        sup = a2 / nu2
        val, _ = integrate.quad(
            lambda x: pdf_sinr_eve(x, 2, cfg, scenario, sic, s_order=128),
            0.0, sup, limit=300,
            points=[sup * f for f in (1e-6, 1e-3, 0.1, 0.5, 0.9, 0.99)])
        assert val == pytest.approx(1.0, abs=1e-4)

    def test_outside_support_is_zero(self, table1_config):
        assert pdf_sinr_eve(5.0, 2, table1_config, Scenario.EXTERNAL,
                            SicMode.PERFECT) == 0.0
        assert pdf_sinr_eve(0.0, 2, table1_config, Scenario.EXTERNAL,
                            SicMode.IMPERFECT) == 0.0

    def test_matches_cdf_derivative(self, table1_config):
        cfg = table1_config
        for scen, sic in ((Scenario.EXTERNAL, SicMode.IMPERFECT),
                          (Scenario.INTERNAL, SicMode.PERFECT)):
            for x in (0.05, 0.2, 0.8, 1.8):
                h = 1e-5
                fd = (sinr_eve_cdf(x + h, 2, cfg, scen, sic, s_order=128)
                      - sinr_eve_cdf(x - h, 2, cfg, scen, sic, s_order=128)
                      ) / (2 * h)
                dens = pdf_sinr_eve(x, 2, cfg, scen, sic, s_order=128)
                if fd > 1e-8:
                    assert dens == pytest.approx(fd, rel=1e-4)
                else:
                    # CDF saturated to 1 in doubles; the density must agree
                    # that essentially no mass remains
                    assert dens < 1e-8

    def test_internal_imperfect_histogram(self, table1_config):
        # chi-square on 50 bins against the sampled internal-Eve SINR
        cfg = table1_config
        st_ = derive_stats(cfg)
        rng = rng_for("eve-pdf-hist")
        n = 200_000
        gain = sample_ordered_gain(rng, n, 3, 1, 8, st_.n_br, st_.n_rk[0])
        resid = rng.exponential(st_.n_ipe, size=n)
        a2, nu2 = cfg.power_alloc[1], nu(cfg, 2)
        sinr = st_.rho_e * gain * a2 / (
            st_.rho_e * gain * nu2 + st_.rho_e * resid + 1.0)
        qs = np.linspace(0.0, 1.0, 51)
        edges = np.quantile(sinr, qs)
        edges[0], edges[-1] = 0.0, a2 / nu2
        observed = np.histogram(sinr, bins=edges)[0]
        cdf_at = np.array([sinr_eve_cdf(float(e), 2, cfg, Scenario.INTERNAL,
                                        SicMode.IMPERFECT, s_order=128)
                           for e in edges])
        expected = n * np.diff(cdf_at)
        expected *= observed.sum() / expected.sum()
        result = stats.chisquare(observed, expected)
        assert result.pvalue > 0.01


class TestSopClosedForm:
    def test_zero_rate_silenced_eve(self, table1_config):
        cfg = table1_config.with_overrides(
            target_rates=(0.0, 0.0, 0.0), snr_eve_db=-120.0)
        for k in (1, 2, 3):
            assert sop_closed_form(k, cfg, Scenario.EXTERNAL,
                                   SicMode.PERFECT) <= 1e-6

    def test_saturated_threshold_gives_certain_outage(self, table1_config):
        # enormous target rate pushes the threshold past the SINR supremum
        cfg = table1_config.with_overrides(target_rates=(5.0, 5.0, 5.0))
        assert sop_closed_form(1, cfg, Scenario.EXTERNAL,
                               SicMode.PERFECT) == 1.0

    def test_monotone_in_rho(self, fig2_config):
        prev = 1.1
        for rho_db in range(0, 55, 5):
            cfg = fig2_config.with_overrides(snr_legit_db=float(rho_db))
            val = sop_closed_form(2, cfg, Scenario.EXTERNAL, SicMode.PERFECT)
            assert val <= prev + 1e-12
            prev = val

    def test_monotone_in_rate_and_eve_snr(self, fig2_config):
        base = fig2_config.with_overrides(snr_legit_db=20.0)
        sops = [sop_closed_form(2, base.with_overrides(
            target_rates=(r, r, r)), Scenario.EXTERNAL, SicMode.PERFECT)
            for r in (0.02, 0.04, 0.08)]
        assert sops[0] <= sops[1] <= sops[2]
        sops = [sop_closed_form(2, base.with_overrides(snr_eve_db=db),
                                Scenario.EXTERNAL, SicMode.PERFECT)
                for db in (-5.0, 0.0, 5.0)]
        assert sops[0] <= sops[1] <= sops[2]

    def test_user_ordering_at_30db(self, table1_config):
        cfg = table1_config.with_overrides(snr_legit_db=30.0)
        sops = [sop_closed_form(k, cfg, Scenario.EXTERNAL, SicMode.PERFECT)
                for k in (1, 2, 3)]
        assert sops[2] < sops[1] < sops[0]

    def test_probability_bounds(self, fig2_config):
        for sic in (SicMode.PERFECT, SicMode.IMPERFECT):
            for scen in (Scenario.EXTERNAL, Scenario.INTERNAL):
                for rho_db in (0.0, 25.0, 50.0):
                    cfg = fig2_config.with_overrides(snr_legit_db=rho_db)
                    users = (1, 2, 3) if scen is Scenario.EXTERNAL else (2, 3)
                    for k in users:
                        v = sop_closed_form(k, cfg, scen, sic)
                        assert 0.0 <= v <= 1.0


class TestSopExactNumeric:
    def test_matches_closed_form_on_grid(self, fig2_config):
        for rho_db in (0.0, 10.0, 20.0, 30.0):
            cfg = fig2_config.with_overrides(snr_legit_db=rho_db)
            for k in (1, 2, 3):
                exact = sop_exact_numeric(k, cfg, Scenario.EXTERNAL,
                                          SicMode.PERFECT)
                closed = sop_closed_form(k, cfg, Scenario.EXTERNAL,
                                         SicMode.PERFECT)
                assert abs(exact - closed) <= 0.02

    def test_zero_rate_with_silenced_eve(self, table1_config):
        cfg = table1_config.with_overrides(
            target_rates=(0.0, 0.0, 0.0), snr_eve_db=-120.0)
        assert sop_exact_numeric(2, cfg, Scenario.EXTERNAL,
                                 SicMode.PERFECT) == pytest.approx(0.0,
                                                                   abs=1e-6)

    def test_monotone_in_rate(self, fig2_config):
        cfg = fig2_config.with_overrides(snr_legit_db=20.0)
        vals = [sop_exact_numeric(2, cfg.with_overrides(target_rates=(r,) * 3),
                                  Scenario.EXTERNAL, SicMode.PERFECT)
                for r in (0.02, 0.04, 0.08)]
        assert vals[0] <= vals[1] <= vals[2]

    def test_strongest_user_unbounded_support(self, fig2_config):
        cfg = fig2_config.with_overrides(snr_legit_db=10.0)
        exact = sop_exact_numeric(3, cfg, Scenario.EXTERNAL, SicMode.IMPERFECT,
                                  d_order=128, s_order=128)
        closed = sop_closed_form(3, cfg, Scenario.EXTERNAL, SicMode.IMPERFECT,
                                 d_order=128, s_order=128)
        assert abs(exact - closed) <= 0.02


class TestSopAsymptotic:
    def test_imperfect_sic_floor_is_snr_free(self, fig2_config):
        lo = sop_asymptotic(2, fig2_config.with_overrides(snr_legit_db=30.0),
                            Scenario.EXTERNAL, SicMode.IMPERFECT)
        hi = sop_asymptotic(2, fig2_config.with_overrides(snr_legit_db=60.0),
                            Scenario.EXTERNAL, SicMode.IMPERFECT)
        assert lo == pytest.approx(hi, abs=1e-12)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_doubling_snr_scales_by_two_to_minus_k(self, fig2_config, k):
        cfg1 = fig2_config.with_overrides(snr_legit_db=40.0)
        cfg2 = fig2_config.with_overrides(snr_legit_db=40.0 + 10 * math.log10(2))
        r = sop_asymptotic(k, cfg2, Scenario.EXTERNAL, SicMode.PERFECT) / \
            sop_asymptotic(k, cfg1, Scenario.EXTERNAL, SicMode.PERFECT)
        assert r == pytest.approx(2.0 ** -k, rel=1e-9)

    def test_ratio_to_exact_at_50db(self, fig2_config):
        cfg = fig2_config.with_overrides(snr_legit_db=50.0)
        for k in (1, 2):
            ratio = sop_asymptotic(k, cfg, Scenario.EXTERNAL, SicMode.PERFECT) \
                / sop_closed_form(k, cfg, Scenario.EXTERNAL, SicMode.PERFECT)
            assert 0.8 <= ratio <= 1.2

    def test_single_live_element_log_form(self, table1_config):
        cfg = table1_config.with_overrides(
            ris_elements=1, partition_p=1, group_size=1, snr_legit_db=50.0)
        asy = sop_asymptotic(1, cfg, Scenario.EXTERNAL, SicMode.PERFECT)
        exact = sop_closed_form(1, cfg, Scenario.EXTERNAL, SicMode.PERFECT)
        assert asy == pytest.approx(exact, rel=0.25)

    def test_internal_asymptote(self, table1_config):
        cfg = table1_config.with_overrides(snr_legit_db=50.0)
        asy = sop_asymptotic(2, cfg, Scenario.INTERNAL, SicMode.PERFECT)
        exact = sop_closed_form(2, cfg, Scenario.INTERNAL, SicMode.PERFECT)
        assert asy == pytest.approx(exact, rel=0.2)


class TestDiversity:
    def test_perfect_sic_slopes(self, fig2_config):
        grid = [40.0, 50.0, 60.0]
        for k in (1, 2):
            slope = diversity_order_estimate(k, fig2_config,
                                             Scenario.EXTERNAL,
                                             SicMode.PERFECT, grid)
            assert slope == pytest.approx(k, abs=0.3)

    def test_imperfect_sic_slope_is_zero(self, fig2_config):
        slope = diversity_order_estimate(1, fig2_config, Scenario.EXTERNAL,
                                         SicMode.IMPERFECT, [40.0, 50.0, 60.0])
        assert abs(slope) <= 0.1

    def test_deep_tail_uses_asymptotic_curve(self, fig2_config):
        slope = diversity_order_estimate(3, fig2_config, Scenario.EXTERNAL,
                                         SicMode.PERFECT, [40.0, 50.0, 60.0],
                                         curve="asymptotic")
        assert slope == pytest.approx(3, abs=0.5)

    def test_underflow_reported(self, fig2_config):
        cfg = fig2_config.with_overrides(snr_eve_db=-300.0,
                                         target_rates=(0.0, 0.0, 0.0))
        with pytest.raises(SopUnderflowError):
            diversity_order_estimate(3, cfg, Scenario.EXTERNAL,
                                     SicMode.PERFECT, [40.0, 60.0])

    def test_needs_two_grid_points(self, fig2_config):
        with pytest.raises(ValueError):
            diversity_order_estimate(1, fig2_config, Scenario.EXTERNAL,
                                     SicMode.PERFECT, [40.0])


class TestAggregates:
    def test_system_sop_examples(self):
        assert system_sop([0.0, 0.0, 0.0]) == 0.0
        assert system_sop([1.0, 0.3, 0.7]) == 1.0
        assert system_sop([0.1, 0.2]) == pytest.approx(0.28, rel=1e-12)

    def test_system_sop_validates(self):
        with pytest.raises(ValueError):
            system_sop([0.5, 1.2])

    def test_throughput_examples(self):
        rates = [0.08, 0.17, 0.25]
        assert throughput_delay_limited([0.0, 0.0, 0.0], rates) == \
            pytest.approx(0.50, rel=1e-12)
        assert throughput_delay_limited([1.0, 1.0, 1.0], rates) == 0.0
        assert throughput_delay_limited([0.5, 0.5, 0.5], rates) == \
            pytest.approx(0.25, rel=1e-12)

    def test_throughput_validates(self):
        with pytest.raises(ValueError):
            throughput_delay_limited([0.1], [0.04, 0.04])
        with pytest.raises(ValueError):
            throughput_delay_limited([0.1, 0.1], [0.04, -0.04])

    def test_secrecy_rate_examples(self):
        assert secrecy_rate(1.0, 1.0) == 0.0
        assert secrecy_rate(3.0, 1.0) == pytest.approx(1.0, rel=1e-12)
        assert secrecy_rate(1.0, 3.0) == 0.0
        with pytest.raises(ValueError):
            secrecy_rate(-1.0, 1.0)

    def test_query_validation(self):
        with pytest.raises(ValueError):
            SecrecyQuery(user_k=1, decode_g=2, scenario=Scenario.EXTERNAL,
                         sic_mode=SicMode.PERFECT)
        with pytest.raises(ValueError):
            SecrecyQuery(user_k=1, decode_g=1, scenario=Scenario.INTERNAL,
                         sic_mode=SicMode.PERFECT)
