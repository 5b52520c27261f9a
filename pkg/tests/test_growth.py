"""Order/type estimation from max-modulus samples and from coefficients."""

import math

import numpy as np
import pytest
import scipy.special as sc

from cohstates import bargmann as bg
from cohstates import family as fam
from cohstates import growth as gr
from cohstates.errors import DomainError, IndeterminateError, PreconditionError
from cohstates.numerics import geometric_grid


def exp_power(s: float, r: float):
    """log|exp(s z^r)| evaluator (synthetic entire function of known growth)."""
    return gr.from_log_abs(lambda z: (s * z**r).real if z != 0 else 0.0)


class TestMaxModulus:
    def test_exponential(self):
        assert gr.max_modulus(exp_power(1.0, 1.0), 3.0) == pytest.approx(3.0, rel=1e-9)

    def test_monomial(self):
        fn = gr.from_log_abs(lambda z: 5.0 * math.log(abs(z)) if z != 0 else -math.inf)
        assert gr.max_modulus(fn, 2.0) == pytest.approx(5.0 * math.log(2.0), rel=1e-12)

    def test_coherent_closed_form(self):
        # factorial-family coherent zeta = 2: F(z) = e^{-2} e^{2z},
        # log M(10) = -2 + 20
        f = fam.factorial_family()
        c = bg.coherent_function(f, 2.0)
        assert gr.max_modulus(c, 10.0) == pytest.approx(18.0, rel=1e-8)

    def test_rejects_nan(self):
        fn = gr.from_log_abs(lambda z: math.nan)
        with pytest.raises(ValueError):
            gr.max_modulus(fn, 1.0)

    def test_angular_floor(self):
        with pytest.raises(PreconditionError):
            gr.max_modulus(exp_power(1.0, 1.0), 1.0, angular_samples=32)


class TestEstimateOrderType:
    def test_exponential(self):
        p = gr.estimate_order_type(exp_power(1.0, 1.0), geometric_grid(2, 1e4, 16))
        assert p.order == pytest.approx(1.0, abs=0.03)
        assert p.type_ == pytest.approx(1.0, rel=0.05)

    def test_gaussian_type(self):
        p = gr.estimate_order_type(exp_power(0.7, 2.0), geometric_grid(2, 128, 16))
        assert p.order == pytest.approx(2.0, abs=0.03)
        assert p.type_ == pytest.approx(0.7, rel=0.05)

    def test_sqrt_normalization_profile(self):
        # treating sqrt(N(R^2)) for the (n!)^2 family as a max modulus gives
        # exactly the family's growth exponents (1, 1)
        f = fam.factorial_squared_family()
        fn = gr.from_log_abs(lambda z: 0.5 * fam.log_normalization(f, abs(z) ** 2))
        p = gr.estimate_order_type(fn, geometric_grid(2, 1e4, 16))
        assert p.order == pytest.approx(1.0, abs=0.03)
        assert p.type_ == pytest.approx(1.0, rel=0.05)

    def test_synthetic_matrix(self):
        for r in (0.5, 1.0, 2.0, 3.0):
            for s in (0.3, 1.0, 2.0):
                if r <= 1.4:
                    radii = geometric_grid(2, 1e4, 16)
                elif r <= 2.6:
                    radii = geometric_grid(2, 128, 16)
                else:
                    radii = geometric_grid(1.5, 40, 16)
                p = gr.estimate_order_type(exp_power(s, r), radii)
                assert p.order == pytest.approx(r, abs=0.05)
                assert p.type_ == pytest.approx(s, rel=0.10)

    def test_rejects_non_growing(self):
        fn = gr.from_log_abs(lambda z: -abs(z))
        with pytest.raises((DomainError, PreconditionError)):
            gr.estimate_order_type(fn, geometric_grid(2, 1e3, 16))

    def test_grid_preconditions(self):
        with pytest.raises(PreconditionError):
            gr.estimate_order_type(exp_power(1, 1), [1, 2, 3])
        with pytest.raises(PreconditionError):
            gr.estimate_order_type(exp_power(1, 1), np.linspace(10, 20, 12))


class TestCoefficientEstimator:
    def test_exponential_coefficients(self):
        ns = np.arange(2000)
        p = gr.order_type_from_coefficients(log_magnitudes=-sc.gammaln(ns + 1.0))
        assert p.order == pytest.approx(1.0, abs=0.01)
        assert p.type_ == pytest.approx(1.0, rel=0.02)

    def test_factorial_extremal(self):
        ns = np.arange(2000)
        p = gr.order_type_from_coefficients(log_magnitudes=-0.5 * sc.gammaln(ns + 1.0))
        assert p.order == pytest.approx(2.0, abs=0.01)
        assert p.type_ == pytest.approx(0.5, rel=0.02)

    def test_ml_extremal_derived(self):
        # c_n = rho3(n)^(-1/2) with alpha = 2, beta = 1 (rho3 = (2n)!).
        # Independent derivation via the classical formulas:
        #   r = lim n ln n / (0.5 ln (2n)!) = lim ln n / (ln 2n - 1) = 1
        #   (s e r)^(1/r) = lim n |c_n|^(1/n) = e/2  =>  s = 1/2
        ns = np.arange(3000)
        p = gr.order_type_from_coefficients(log_magnitudes=-0.5 * sc.gammaln(2 * ns + 1.0))
        assert p.order == pytest.approx(1.0, abs=0.01)
        assert p.type_ == pytest.approx(0.5, rel=0.02)

    def test_raw_coefficients_accepted(self):
        ns = np.arange(120)
        c = np.exp(-sc.gammaln(ns + 1.0))
        p = gr.order_type_from_coefficients(c)
        assert p.order == pytest.approx(1.0, abs=0.02)

    def test_lacunary_series(self):
        # even-only coefficients of the sine product limit: order 1, type pi
        ns = np.arange(2000)
        log_c = np.full(len(ns), -np.inf)
        even = ns % 2 == 0
        log_c[even] = ns[even] * math.log(math.pi) - sc.gammaln(ns[even] + 2.0)
        p = gr.order_type_from_coefficients(log_magnitudes=log_c)
        assert p.order == pytest.approx(1.0, abs=0.02)
        assert p.type_ == pytest.approx(math.pi, rel=0.05)

    def test_needs_enough_coefficients(self):
        with pytest.raises(PreconditionError):
            gr.order_type_from_coefficients(np.ones(20))

    def test_all_zero_rejected(self):
        with pytest.raises(PreconditionError):
            gr.order_type_from_coefficients(np.zeros(100))

    def test_raw_window_statistics_reported(self):
        ns = np.arange(1000)
        p = gr.order_type_from_coefficients(log_magnitudes=-0.5 * sc.gammaln(ns + 1.0))
        # the raw limsup realization carries its documented O(1/ln n) bias
        assert p.diagnostics["raw_limsup_order"] > 2.1
        assert p.diagnostics["window_size"] > 100


class TestBothRoutesAgree:
    def test_extremal_sequences(self):
        cases = [
            (fam.factorial_family(), 2.0),
            (fam.factorial_squared_family(), 1.0),
            (fam.mittag_leffler_family(2.0, 1.0), 1.0),
        ]
        for f, a_hint in cases:
            radii = gr.default_radius_grid(a_hint)
            F = bg.extremal_function(f, float(radii[-1]))
            p_mod = gr.estimate_order_type(F, radii)
            p_coef = gr.order_type_from_coefficients(
                log_magnitudes=-0.5 * f.log_rho_array(np.arange(4000))
            )
            assert p_mod.order == pytest.approx(p_coef.order, abs=0.05)
            assert p_mod.type_ == pytest.approx(p_coef.type_, rel=0.10)

    def test_coherent_state(self):
        f = fam.factorial_family()
        c = bg.coherent_function(f, 2.0, truncation=400, tail_target=1e-30)
        p_mod = gr.estimate_order_type(c, geometric_grid(2, 1e4, 16))
        p_coef = gr.order_type_from_coefficients(log_magnitudes=c.taylor_log_abs())
        # F = e^{-2} e^{2z}: order 1, type 2
        assert p_mod.order == pytest.approx(1.0, abs=0.05)
        assert p_coef.order == pytest.approx(1.0, abs=0.05)
        assert p_mod.type_ == pytest.approx(2.0, rel=0.10)
        assert p_coef.type_ == pytest.approx(2.0, rel=0.10)


class TestMembership:
    def make(self, r, s, resid=1e-3):
        return gr.GrowthProfile(order=r, type_=s, fit_residual=resid)

    def test_inside_by_order(self):
        assert (
            gr.membership(self.make(1.0, 0.5), 2.0, 0.5)
            is gr.Membership.INSIDE_B1
        )

    def test_boundary(self):
        assert (
            gr.membership(self.make(2.0, 0.5), 2.0, 0.5)
            is gr.Membership.BOUNDARY_B_MINUS_B1
        )

    def test_outside_by_type(self):
        assert (
            gr.membership(self.make(2.0, 0.8), 2.0, 0.5) is gr.Membership.OUTSIDE_B
        )

    def test_inside_at_order_with_small_type(self):
        assert (
            gr.membership(self.make(2.0, 0.3), 2.0, 0.5) is gr.Membership.INSIDE_B1
        )

    def test_noisy_profile_indeterminate(self):
        with pytest.raises(IndeterminateError):
            gr.membership(self.make(2.0, 0.5, resid=5.0), 2.0, 0.5)


class TestCSV:
    def test_max_modulus_table(self, tmp_path):
        path = tmp_path / "m.csv"
        gr.save_max_modulus_csv(exp_power(1.0, 1.0), [1.0, 2.0, 4.0], str(path))
        rows = path.read_text().strip().splitlines()
        assert rows[0] == "R,log_max_modulus"
        assert float(rows[2].split(",")[1]) == pytest.approx(2.0, rel=1e-9)

    def test_profile_json(self):
        p = gr.GrowthProfile(order=1.0, type_=2.0, fit_residual=0.1, radii_used=[1, 2])
        d = gr.profile_to_dict(p)
        assert d["order"] == 1.0 and d["type"] == 2.0
