import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crmimo.estimation import (
    EstimationConfig,
    estimate_attenuation,
    estimate_channels,
    quantize_angle,
)
from crmimo.geometry import GeometryConfig, compute_channels, make_scenario


class TestQuantizeAngle:
    def test_hand_example(self):
        # m=4 centers are {-0.75, -0.25, 0.25, 0.75}
        assert quantize_angle(0.3, 4) == pytest.approx(0.25)

    def test_grid_center_is_fixed_point(self):
        centers = -1.0 + (2.0 * np.arange(16) + 1.0) / 16
        out = quantize_angle(centers, 16)
        assert np.array_equal(out, centers)

    @pytest.mark.parametrize("m_grid", [4, 16, 64, 128, 256])
    def test_error_bound(self, m_grid):
        rng = np.random.default_rng(m_grid)
        phi = rng.uniform(-1, 1, size=100_000)
        err = quantize_angle(phi, m_grid) - phi
        assert np.abs(err).max() <= 1.0 / m_grid + 1e-15

    @given(
        phi=st.floats(min_value=-1.0, max_value=1.0),
        m_grid=st.integers(min_value=2, max_value=512),
    )
    @settings(max_examples=300)
    def test_idempotent(self, phi, m_grid):
        once = quantize_angle(phi, m_grid)
        assert quantize_angle(once, m_grid) == once

    def test_endpoints_stay_in_range(self):
        for m in (2, 5, 128):
            for phi in (-1.0, 1.0):
                q = quantize_angle(phi, m)
                assert abs(q - phi) <= 1.0 / m
                assert -1.0 < q < 1.0

    def test_rejects_tiny_grid(self):
        with pytest.raises(ValueError):
            quantize_angle(0.0, 1)


class TestEstimateAttenuation:
    def test_zero_noise_is_exact(self):
        rng = np.random.default_rng(0)
        assert estimate_attenuation(0.37, rng, 0.0) == 0.37

    def test_sample_mean_matches_truth(self):
        rng = np.random.default_rng(1)
        n = 100_000
        alpha = 1.0
        draws = np.array([estimate_attenuation(alpha, rng, 0.01) for _ in range(n)])
        sigma = np.sqrt(0.01 * alpha)
        assert abs(draws.mean() - alpha) <= 4 * sigma / np.sqrt(n)

    def test_sample_variance_is_one_percent_of_alpha(self):
        rng = np.random.default_rng(2)
        alpha = 1.0
        draws = np.array([estimate_attenuation(alpha, rng, 0.01) for _ in range(100_000)])
        assert draws.var() == pytest.approx(0.01 * alpha, rel=0.1)

    def test_always_positive_even_when_noise_dominates(self):
        rng = np.random.default_rng(3)
        # sigma ~ 3x alpha here, so naive draws would often go negative
        draws = [estimate_attenuation(0.001, rng, 0.01) for _ in range(2000)]
        assert min(draws) > 0

    def test_rejects_nonpositive_alpha(self):
        with pytest.raises(ValueError):
            estimate_attenuation(0.0, np.random.default_rng(0), 0.01)


def pipeline(seed=0, config=None, est=None):
    config = config or GeometryConfig(num_ue=6, m_bs=32, m_ue=4)
    rng = np.random.default_rng(seed)
    scenario = make_scenario(config, rng)
    channels = compute_channels(scenario, config.gamma, rng)
    estimates = estimate_channels(channels, scenario, rng, est or EstimationConfig())
    return scenario, channels, estimates


class TestEstimateChannels:
    def test_angle_error_bounds(self):
        for seed in range(50):
            scenario, channels, est = pipeline(seed)
            for j in range(2):
                true_phi = channels.sp_links[j].phi
                assert abs(est.sp_phi_hat[j] - true_phi) <= 1.0 / scenario.m_bs
                for k in range(scenario.num_ue):
                    err = est.ps_phi_hat[j, k] - channels.ps_links[j][k].phi
                    assert abs(err) <= 1.0 / scenario.m_ue

    def test_noise_free_on_grid_angles_recovers_truth(self):
        scenario, channels, _ = pipeline(0)
        # snap the true angles onto the grids, rebuild links, then estimate
        from dataclasses import replace as dc_replace

        from crmimo.estimation import quantize_angle as q

        sp = tuple(
            dc_replace(l, phi=q(l.phi, scenario.m_bs)) for l in channels.sp_links
        )
        ps = tuple(
            tuple(dc_replace(l, phi=q(l.phi, scenario.m_ue)) for l in row)
            for row in channels.ps_links
        )
        channels = dc_replace(channels, sp_links=sp, ps_links=ps)
        est = estimate_channels(
            channels, scenario, np.random.default_rng(0),
            EstimationConfig(variance_fraction=0.0),
        )
        for j in range(2):
            assert est.sp_alpha_hat[j] == channels.sp_links[j].alpha
            assert est.sp_phi_hat[j] == channels.sp_links[j].phi
            for k in range(scenario.num_ue):
                assert est.ps_phi_hat[j, k] == channels.ps_links[j][k].phi

    def test_alpha_hats_positive(self):
        for seed in range(30):
            _, _, est = pipeline(seed, est=EstimationConfig(noise_mode="variance"))
            assert np.all(est.sp_alpha_hat > 0)

    def test_deterministic_given_seed(self):
        _, _, a = pipeline(123)
        _, _, b = pipeline(123)
        assert np.array_equal(a.sp_alpha_hat, b.sp_alpha_hat)
        assert np.array_equal(a.ps_phi_hat, b.ps_phi_hat)

    def test_noise_mode_changes_spread(self):
        # std mode at 1% must hug the truth far tighter than variance mode
        rel_err = {"std": [], "variance": []}
        for mode in rel_err:
            for seed in range(40):
                _, channels, est = pipeline(seed, est=EstimationConfig(noise_mode=mode))
                truth = np.array([l.alpha for l in channels.sp_links])
                rel_err[mode].extend(np.abs(est.sp_alpha_hat - truth) / truth)
        assert np.median(rel_err["std"]) < 0.05
        assert np.median(rel_err["variance"]) > 0.2

    def test_rejects_unknown_mode(self):
        with pytest.raises(ValueError):
            EstimationConfig(noise_mode="wild")
