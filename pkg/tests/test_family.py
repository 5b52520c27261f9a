"""Family-level contracts: closed forms, kernel, weight moments, exponents."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohstates import family as fam
from cohstates import specfun as sf
from cohstates.errors import (
    DomainError,
    PreconditionError,
    UnsupportedWeightError,
)


@pytest.fixture(scope="module")
def families():
    return {
        "factorial": fam.factorial_family(),
        "factorial_squared": fam.factorial_squared_family(),
        "rho2": fam.rho2_family(),
        "ml": fam.mittag_leffler_family(2.0, 1.5),
    }


class TestRho:
    def test_factorial_value(self, families):
        assert fam.rho(families["factorial"], 5) == pytest.approx(120.0, rel=1e-12)

    def test_rho2_values(self, families):
        assert fam.rho(families["rho2"], 0) == pytest.approx(1.0, rel=1e-12)
        # (1!)^3 sqrt(pi)/2 / Gamma(5/2) with Gamma(5/2) = 3 sqrt(pi)/4
        assert fam.rho(families["rho2"], 1) == pytest.approx(2.0 / 3.0, rel=1e-12)

    def test_ml_gamma_ratio(self):
        f = fam.mittag_leffler_family(2.0, 1.0)
        assert fam.rho(f, 3) == pytest.approx(720.0, rel=1e-12)

    def test_rho_zero_is_one(self, families):
        for f in families.values():
            assert fam.log_rho(f, 0) == pytest.approx(0.0, abs=1e-12)

    def test_overflow_redirects_to_log(self, families):
        with pytest.raises(OverflowError):
            fam.rho(families["factorial"], 200)
        assert math.isfinite(fam.log_rho(families["factorial"], 200))

    def test_negative_index(self, families):
        with pytest.raises(DomainError):
            fam.rho(families["factorial"], -1)


class TestNormalization:
    def test_factorial_is_exp(self, families):
        assert fam.normalization(families["factorial"], 1.0) == pytest.approx(
            math.e, rel=1e-12
        )

    def test_factorial_squared_is_bessel(self, families):
        assert fam.normalization(families["factorial_squared"], 4.0) == pytest.approx(
            sf.bessel_i(0, 4.0), rel=1e-12
        )

    def test_at_zero(self, families):
        for f in families.values():
            assert fam.normalization(f, 0.0) == 1.0

    def test_series_vs_closed(self, families):
        for f in families.values():
            for x in (0.1, 1.0, 10.0, 50.0):
                closed = fam.normalization(f, x, method="closed")
                series = fam.normalization(f, x, method="series")
                assert series == pytest.approx(closed, rel=1e-8)

    def test_log_form_large_argument(self, families):
        # x = 2500 overflows the direct value for the factorial family
        with pytest.raises(OverflowError):
            fam.normalization(families["factorial"], 2500.0)
        assert fam.log_normalization(families["factorial"], 2500.0) == 2500.0


class TestKernelOverlap:
    def test_kernel_factorial(self, families):
        assert fam.kernel(families["factorial"], 1.0, 1.0) == pytest.approx(
            math.e, rel=1e-12
        )

    def test_kernel_zero_argument(self, families):
        for f in families.values():
            assert fam.kernel(f, 0.0, 3.7 + 0.2j) == 1.0

    def test_kernel_diagonal_is_normalization(self, families):
        rng = np.random.default_rng(2024)
        for f in families.values():
            for _ in range(25):
                z = rng.uniform(-5, 5) + 1j * rng.uniform(-5, 5)
                if abs(z) > 5 or z == 0:
                    continue
                k = fam.kernel(f, np.conj(z), z)
                n = fam.normalization(f, abs(z) ** 2)
                assert k.real == pytest.approx(n, rel=1e-10)
                assert abs(k.imag) <= 1e-10 * n

    def test_kernel_bessel_diagonal(self, families):
        k = fam.kernel(families["factorial_squared"], 1.0, 1.0)
        assert k.real == pytest.approx(sf.bessel_i(0, 2.0), rel=1e-10)

    def test_overlap_self_is_one(self, families):
        for f in families.values():
            assert abs(fam.overlap(f, 1.5 + 0.5j, 1.5 + 0.5j)) == pytest.approx(
                1.0, abs=1e-10
            )

    def test_overlap_factorial_closed_form(self, families):
        # |<z1|z2>| = exp(-|z1|^2/2 - |z2|^2/2 + Re(z1* z2)) for rho = n!
        assert fam.overlap(families["factorial"], 0.0, 2.0) == pytest.approx(
            math.exp(-2.0), rel=1e-10
        )
        z1, z2 = 1.1 - 0.4j, -0.3 + 0.9j
        expected = np.exp(
            -0.5 * abs(z1) ** 2 - 0.5 * abs(z2) ** 2 + np.conj(z1) * z2
        )
        got = fam.overlap(families["factorial"], z1, z2)
        assert got == pytest.approx(expected, rel=1e-10)

    def test_overlap_alternating_series(self, families):
        # sum (-1)^n/(n!)^2 / I0(2), by direct compensated summation
        terms = []
        for n in range(60):
            terms.append((-1.0) ** n / math.factorial(n) ** 2)
        expected = math.fsum(terms) / sf.bessel_i(0, 2.0)
        got = fam.overlap(families["factorial_squared"], 1.0, -1.0)
        assert got.real == pytest.approx(expected, rel=1e-10)
        assert abs(got.imag) < 1e-12


@settings(max_examples=150, deadline=None)
@given(
    re1=st.floats(-4, 4), im1=st.floats(-4, 4),
    re2=st.floats(-4, 4), im2=st.floats(-4, 4),
)
def test_overlap_cauchy_schwarz(re1, im1, re2, im2):
    f = fam.factorial_squared_family()
    z1, z2 = complex(re1, im1), complex(re2, im2)
    assert abs(fam.overlap(f, z1, z2)) <= 1.0 + 1e-10


class TestWeight:
    def test_factorial_weight(self, families):
        assert fam.weight(families["factorial"], 1.0) == pytest.approx(
            math.exp(-1.0), rel=1e-12
        )

    def test_factorial_squared_weight(self, families):
        assert fam.weight(families["factorial_squared"], 4.0) == pytest.approx(
            2.0 * sf.bessel_k0(4.0), rel=1e-12
        )

    def test_ml_reduces_to_factorial(self):
        f = fam.mittag_leffler_family(1.0, 1.0)
        for x in (0.2, 1.0, 7.5):
            assert fam.weight(f, x) == pytest.approx(math.exp(-x), rel=1e-12)

    def test_custom_has_no_weight(self):
        import scipy.special as sc

        custom = fam.custom_family(lambda n: 2.5 * sc.gammaln(np.asarray(n) + 1.0))
        with pytest.raises(UnsupportedWeightError):
            fam.weight(custom, 1.0)

    def test_weight_domain(self, families):
        with pytest.raises(DomainError):
            fam.weight(families["factorial"], 0.0)

    def test_asymptotic_decay_matches_exponents(self, families):
        # log W(x^2) / x^a -> -2b on a geometric grid of |z|
        for f in families.values():
            a, b = fam.growth_exponents(f)
            for z_abs in (1e4, 1e6, 1e8):
                val = fam.log_weight(f, z_abs**2) / z_abs**a
                assert val == pytest.approx(-2.0 * b, rel=2e-2)


class TestMoments:
    def test_factorial_n3(self, families):
        res = fam.moment_check(families["factorial"], 3)
        assert res.moment == pytest.approx(6.0, rel=1e-8)

    def test_factorial_squared_n2(self, families):
        res = fam.moment_check(families["factorial_squared"], 2)
        assert res.moment == pytest.approx(4.0, rel=1e-6)

    def test_rho2_n1(self, families):
        res = fam.moment_check(families["rho2"], 1)
        assert res.moment == pytest.approx(2.0 / 3.0, rel=1e-6)

    def test_ml_alpha_half(self):
        # alpha = 1/2, beta = 1: W(x) = 2x e^{-x^2}, moments Gamma(n/2 + 1)
        f = fam.mittag_leffler_family(0.5, 1.0)
        for n in (0, 1, 5):
            res = fam.moment_check(f, n)
            assert res.relative_error_vs_rho < 1e-8

    def test_out_of_range(self, families):
        with pytest.raises(PreconditionError):
            fam.moment_check(families["factorial"], 13)


class TestEvolveLabel:
    def test_half_turn(self):
        assert fam.evolve_label(1.0, math.pi, 1.0) == pytest.approx(-1.0, abs=1e-15)

    def test_identity(self):
        assert fam.evolve_label(2.0 + 0.0j, 0.0, 123.4) == 2.0 + 0.0j

    def test_overlap_modulus_invariant(self):
        f = fam.factorial_squared_family()
        z1, z2 = 1.2 + 0.1j, -0.5 + 0.8j
        before = abs(fam.overlap(f, z1, z2))
        after = abs(
            fam.overlap(
                f,
                fam.evolve_label(z1, 0.83, 2.1),
                fam.evolve_label(z2, 0.83, 2.1),
            )
        )
        assert after == pytest.approx(before, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(re=st.floats(-10, 10), im=st.floats(-10, 10), tau=st.floats(-20, 20))
def test_evolve_preserves_modulus(re, im, tau):
    z = complex(re, im)
    assert abs(fam.evolve_label(z, tau, 1.7)) == pytest.approx(abs(z), rel=1e-14)


class TestGrowthExponents:
    def test_named_values(self, families):
        assert fam.growth_exponents(families["factorial"]) == (2.0, 0.5)
        assert fam.growth_exponents(families["factorial_squared"]) == (1.0, 1.0)
        assert fam.growth_exponents(families["rho2"]) == (1.0, 1.0)

    def test_ml_exponents_follow_weight_decay(self):
        # a = 2/alpha, b = 1/2: consistent with the weight's exponential
        # factor exp(-|z|^(2/alpha)) and with the alpha = 1 reduction to n!
        assert fam.growth_exponents(fam.mittag_leffler_family(2.0, 1.5)) == (1.0, 0.5)
        assert fam.growth_exponents(fam.mittag_leffler_family(0.5, 1.0)) == (4.0, 0.5)
        assert fam.growth_exponents(
            fam.mittag_leffler_family(1.0, 1.0)
        ) == fam.growth_exponents(fam.factorial_family())

    def test_custom_without_exponents(self):
        import scipy.special as sc

        custom = fam.custom_family(lambda n: 2.5 * sc.gammaln(np.asarray(n) + 1.0))
        with pytest.raises(PreconditionError, match="estimate"):
            fam.growth_exponents(custom)


class TestRhoRatio:
    def test_at_zero_and_one(self):
        assert fam.rho_ratio_asymptotics(0) == pytest.approx(1.0, rel=1e-13)
        assert fam.rho_ratio_asymptotics(1) == pytest.approx(2.0 / 3.0, rel=1e-13)

    def test_large_n_asymptote(self):
        n = 10**4
        asym = 0.5 * math.sqrt(math.pi) * n**-0.5
        assert fam.rho_ratio_asymptotics(n) == pytest.approx(asym, rel=0.01)


class TestCustomFamilies:
    def test_accepts_fast_growth(self):
        import scipy.special as sc

        f = fam.custom_family(lambda n: 1.5 * sc.gammaln(np.asarray(n) + 1.0))
        assert fam.normalization(f, 2.0, method="series") > 1.0

    def test_rejects_finite_radius(self):
        # rho(n) = 2^n gives a geometric series with radius 2
        with pytest.raises(DomainError, match="convergence"):
            fam.custom_family(lambda n: np.asarray(n) * math.log(2.0))

    def test_rejects_rho0_not_one(self):
        with pytest.raises(DomainError, match="rho\\(0\\)"):
            fam.custom_family(lambda n: np.asarray(n, dtype=float) ** 2 + 1.0)

    def test_file_roundtrip(self, tmp_path):
        import scipy.special as sc

        path = tmp_path / "fam.txt"
        ns = np.arange(80)
        vals = 2.0 * sc.gammaln(ns + 1.0)
        lines = ["# extend: linear"]
        lines += [f"{n} {float(v)!r}" for n, v in zip(ns, vals)]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        f = fam.load_custom_family(str(path))
        assert fam.log_rho(f, 10) == pytest.approx(2.0 * sf.log_gamma(11.0), rel=1e-12)
        # linear extension beyond the table
        slope = vals[-1] - vals[-2]
        assert fam.log_rho(f, 120) == pytest.approx(vals[-1] + slope * 41, rel=1e-12)

    def test_file_policy_none(self, tmp_path):
        path = tmp_path / "fam.txt"
        rows = "\n".join(f"{n} {math.lgamma(n+1)*2!r}" for n in range(2050))
        path.write_text("# extend: none\n" + rows + "\n", encoding="utf-8")
        f = fam.load_custom_family(str(path))
        with pytest.raises(DomainError, match="extension"):
            fam.log_rho(f, 3000)

    def test_file_requires_header(self, tmp_path):
        path = tmp_path / "fam.txt"
        path.write_text("0 0.0\n1 0.0\n", encoding="utf-8")
        with pytest.raises(DomainError, match="extend"):
            fam.load_custom_family(str(path))


class TestParse:
    def test_named(self):
        assert fam.parse_family("factorial").name == "factorial"
        assert fam.parse_family("rho2").name == "rho2"

    def test_ml_params(self):
        f = fam.parse_family("ml:2.0:1.0")
        assert f.params == {"alpha": 2.0, "beta": 1.0}
        assert f.label == "ml:2:1"

    def test_bad_specs(self):
        for spec in ("nope", "ml:1", "ml:a:b"):
            with pytest.raises(DomainError):
                fam.parse_family(spec)
