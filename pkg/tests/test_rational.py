import math

import numpy as np
import pytest

from inflakit.curves import CurvePair, DiscountCurve
from inflakit.errors import InputError, OrderingError
from inflakit.mc import PathGrid, path_normals
from inflakit.rational import (
    MartingaleState,
    RpksParams,
    fit_shape_functions,
    il_bond,
    index_level,
    kernel_values,
    martingale_step,
    nominal_bond,
    product_expectation,
    real_bond,
    simulate_martingales,
)


def base_params(**overrides):
    fields = dict(
        r_rate=0.015,
        s_rate=0.02,
        b_r=0.4,
        sigma_r=0.2,
        sigma_s=0.15,
        rho_rs=0.5,
    )
    fields.update(overrides)
    return RpksParams.from_decay_rates(**fields)


class TestParams:
    def test_validates_on_grid(self):
        base_params().validate_on(10.0)

    def test_rejects_bad_band(self):
        with pytest.raises(InputError):
            base_params(b_r=1.2).validate_on(5.0)

    def test_rejects_non_unit_start(self):
        with pytest.raises(InputError):
            RpksParams(lambda t: 2.0 * math.exp(-t), 0.4, lambda t: 1.0,
                       0.1, 0.1, 0.0)

    def test_tabulated_grids(self):
        times = np.array([0.0, 1.0, 2.0])
        p = RpksParams(
            (times, np.array([1.0, 0.98, 0.95])),
            0.3,
            (times, np.array([1.0, 0.97, 0.93])),
            0.1, 0.1, 0.0,
        )
        assert p.shape_r(0.0) == 1.0
        assert p.shape_r(2.0) == pytest.approx(0.95, abs=1e-12)
        # log-linear between the nodes keeps positivity
        assert p.shape_r(0.5) == pytest.approx(math.sqrt(1.0 * 0.98), abs=1e-12)


class TestMartingaleStep:
    def test_zero_vol(self):
        assert martingale_step(0.0, 1.3, 0.5, 2.0) == 1.3

    def test_deterministic_value(self):
        assert martingale_step(0.2, 1.0, 1.0, 0.0) == pytest.approx(
            math.exp(-0.02), abs=1e-12
        )

    def test_mean_preserved(self):
        z = path_normals(61, 1_000_000, 1)[:, 0]
        ratio = np.exp(0.2 * z - 0.5 * 0.04)
        se = ratio.std(ddof=1) / math.sqrt(len(ratio))
        stepped = np.array(
            [martingale_step(0.2, 1.0, 1.0, float(v)) for v in z[:100]]
        )
        assert np.allclose(stepped, ratio[:100], atol=1e-12)
        assert abs(ratio.mean() - 1.0) < 3 * se

    def test_positivity(self):
        assert martingale_step(0.5, 1e-6, 1.0, -10.0) > 0.0


class TestKernelValues:
    def test_unit_martingales(self):
        p = base_params()
        m = MartingaleState(2.0, 1.0, 1.0)
        h_r, scale, h_n = kernel_values(p, m)
        assert h_r == pytest.approx(p.shape_r(2.0), abs=1e-15)
        assert scale == pytest.approx(p.shape_s(2.0), abs=1e-15)
        assert h_n == pytest.approx(h_r * scale, abs=1e-15)

    def test_zero_weight_makes_kernel_deterministic(self):
        p = base_params(b_r=1e-12)
        m = MartingaleState(1.5, 3.7, 1.1)
        h_r, _, _ = kernel_values(p, m)
        assert h_r == pytest.approx(p.shape_r(1.5), rel=1e-9)

    def test_direct_evaluation(self):
        p = base_params(r_rate=0.01, b_r=0.5)
        m = MartingaleState(1.0, 1.2, 1.0)
        h_r, _, _ = kernel_values(p, m)
        assert h_r == pytest.approx(math.exp(-0.01) * 1.1, abs=1e-12)
        assert h_r == pytest.approx(1.0890548, abs=1e-7)

    def test_positivity_over_sampled_states(self):
        p = base_params()
        rng = np.random.default_rng(62)
        a_r = np.exp(rng.normal(-0.02, 0.6, size=1_000_000))
        a_s = np.exp(rng.normal(-0.01, 0.5, size=1_000_000))
        t = rng.uniform(0.0, 10.0, size=1_000_000)
        for k in range(0, 1_000_000, 100_000):
            h_r, _, h_n = kernel_values(
                p, MartingaleState(t[k], a_r[k], a_s[k])
            )
            assert h_r > 0.0 and h_n > 0.0
        # vectorized positivity sweep of the kernel formula itself
        br = 0.4
        h_r_all = np.exp(-0.015 * t) * (1.0 + br * (a_r - 1.0))
        assert np.all(h_r_all > 0.0)


class TestBondClosedForms:
    def test_real_bond_zero_weight(self):
        p = base_params(b_r=1e-15)
        m = MartingaleState(1.0, 1.7, 1.0)
        assert real_bond(p, m, 4.0) == pytest.approx(
            p.shape_r(4.0) / p.shape_r(1.0), rel=1e-9
        )

    def test_maturity_at_state_time(self):
        p = base_params()
        m = MartingaleState(2.0, 1.3, 0.8)
        assert real_bond(p, m, 2.0) == pytest.approx(1.0, abs=1e-14)
        assert nominal_bond(p, m, 2.0) == pytest.approx(1.0, abs=1e-14)

    def test_ordering_error(self):
        p = base_params()
        with pytest.raises(OrderingError):
            real_bond(p, MartingaleState(2.0, 1.0, 1.0), 1.0)

    def test_nominal_bond_deterministic_reduction(self):
        p = base_params(sigma_r=0.0, sigma_s=0.0)
        m = MartingaleState(1.0, 1.0, 1.0)
        expected = (p.shape_r(3.0) * p.shape_s(3.0)) / (
            p.shape_r(1.0) * p.shape_s(1.0)
        )
        assert nominal_bond(p, m, 3.0) == pytest.approx(expected, abs=1e-14)

    def test_product_expectation_independent_case(self):
        p = base_params(rho_rs=0.0)
        m = MartingaleState(0.5, 1.2, 0.9)
        assert product_expectation(p, m, 4.0) == pytest.approx(
            1.2 * 0.9, abs=1e-14
        )

    def test_il_bond_deterministic_reduction(self):
        p = base_params(sigma_r=0.0, sigma_s=0.0)
        m = MartingaleState(1.0, 1.0, 1.0)
        expected = p.shape_r(3.0) / (p.shape_r(1.0) * p.shape_s(1.0))
        assert il_bond(p, m, 3.0) == pytest.approx(expected, abs=1e-14)

    def test_index_level_values(self):
        p = base_params(s_rate=0.0)
        assert index_level(p, MartingaleState(1.0, 1.0, 1.0)) == 1.0
        assert index_level(p, MartingaleState(1.0, 1.0, 2.0)) == 0.5

    def test_prices_decrease_in_maturity(self):
        p = base_params()
        m = MartingaleState(0.0, 1.0, 1.0)
        grid = np.linspace(0.0, 10.0, 41)
        for prices in (
            [real_bond(p, m, t) for t in grid],
            [nominal_bond(p, m, t) for t in grid],
        ):
            assert all(b < a for a, b in zip(prices, prices[1:]))

    def test_exchange_rate_consistency(self):
        # IL bond equals E_t[h_real(T)] / h_nom(t) = C_t * P_real with the
        # kernels sharing the same state
        p = base_params()
        rng = np.random.default_rng(63)
        for _ in range(100):
            m = MartingaleState(
                rng.uniform(0.0, 5.0),
                math.exp(rng.normal(0, 0.3)),
                math.exp(rng.normal(0, 0.3)),
            )
            maturity = m.t + rng.uniform(0.0, 5.0)
            lhs = il_bond(p, m, maturity)
            rhs = index_level(p, m) * real_bond(p, m, maturity) * (
                kernel_values(p, m)[0] / kernel_values(p, m)[0]
            )
            # C_t * P_real relates through h_real(t)/h_nom(t) = C_t
            assert lhs == pytest.approx(
                real_bond(p, m, maturity)
                * kernel_values(p, m)[0]
                / kernel_values(p, m)[2],
                abs=1e-12,
            )
            assert rhs > 0.0


class TestMonteCarloCrossChecks:
    def simulate_to(self, p, maturity, seed, n_paths=100_000, n_steps=32):
        grid = PathGrid(0.0, maturity, n_steps)
        return simulate_martingales(p, grid, seed, n_paths)

    def test_real_bond_matches_kernel_ratio_mc(self):
        p = base_params()
        maturity = 2.0
        paths = self.simulate_to(p, maturity, seed=64)
        m0 = MartingaleState(0.0, 1.0, 1.0)
        h_r_terminal = p.shape_r(maturity) * (
            1.0 + p.weight_b(maturity) * (paths.a_r[:, -1] - 1.0)
        )
        sample = h_r_terminal / kernel_values(p, m0)[0]
        se = sample.std(ddof=1) / math.sqrt(len(sample))
        assert abs(sample.mean() - real_bond(p, m0, maturity)) < 3 * se

    def test_nominal_bond_matches_kernel_ratio_mc(self):
        p = base_params(sigma_r=0.2, sigma_s=0.2, rho_rs=0.5)
        maturity = 2.0
        paths = self.simulate_to(p, maturity, seed=65)
        m0 = MartingaleState(0.0, 1.0, 1.0)
        b_m = p.weight_b(maturity)
        h_r_terminal = p.shape_r(maturity) * (1.0 + b_m * (paths.a_r[:, -1] - 1.0))
        h_n_terminal = p.shape_s(maturity) * paths.a_s[:, -1] * h_r_terminal
        sample = h_n_terminal / kernel_values(p, m0)[2]
        se = sample.std(ddof=1) / math.sqrt(len(sample))
        assert abs(sample.mean() - nominal_bond(p, m0, maturity)) < 3 * se

    def test_il_bond_matches_kernel_ratio_mc(self):
        p = base_params()
        maturity = 2.0
        paths = self.simulate_to(p, maturity, seed=66)
        m0 = MartingaleState(0.0, 1.0, 1.0)
        b_m = p.weight_b(maturity)
        h_r_terminal = p.shape_r(maturity) * (1.0 + b_m * (paths.a_r[:, -1] - 1.0))
        sample = h_r_terminal / kernel_values(p, m0)[2]
        se = sample.std(ddof=1) / math.sqrt(len(sample))
        assert abs(sample.mean() - il_bond(p, m0, maturity)) < 3 * se

    def test_product_expectation_mc(self):
        p = base_params(rho_rs=0.6)
        maturity = 1.5
        paths = self.simulate_to(p, maturity, seed=67)
        product = paths.a_r[:, -1] * paths.a_s[:, -1]
        se = product.std(ddof=1) / math.sqrt(len(product))
        target = product_expectation(p, MartingaleState(0.0, 1.0, 1.0), maturity)
        assert abs(product.mean() - target) < 3 * se

    def test_martingale_paths_stay_positive(self):
        p = base_params(sigma_r=0.6, sigma_s=0.6, rho_rs=-0.4)
        paths = self.simulate_to(p, 5.0, seed=68, n_paths=20_000)
        assert np.all(paths.a_r > 0.0)
        assert np.all(paths.a_s > 0.0)


class TestShapeFit:
    def test_reprices_both_curves(self):
        nodes = np.array([1.0, 2.0, 5.0, 10.0])
        pair = CurvePair(
            DiscountCurve(nodes, np.array([0.03, 0.032, 0.035, 0.04]), "nominal"),
            DiscountCurve(nodes, np.array([0.01, 0.012, 0.013, 0.015]), "real"),
            100.0,
        )
        p = fit_shape_functions(pair.nominal, pair.real, 0.4, 0.2, 0.15, 0.5)
        m0 = MartingaleState(0.0, 1.0, 1.0)
        for t in nodes:
            assert il_bond(p, m0, t) == pytest.approx(
                pair.real.discount_factor(0.0, t), rel=1e-12
            )
            assert nominal_bond(p, m0, t) == pytest.approx(
                pair.nominal.discount_factor(0.0, t), rel=1e-12
            )
