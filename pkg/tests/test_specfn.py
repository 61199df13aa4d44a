import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from friable.errors import ConvergenceError, InvalidInputError, TableRangeError
from friable.specfn import (EULER_GAMMA, Kappa, NumericConfig, adjoint_identity, big_i,
                            build_rho_table, default_table, ein, h_envelope, j_kappa,
                            lambda_kappa, mu_kappa, rho_asymptotic, saddle_params, saddle_root,
                            xi_kappa)

# reference values from mpmath (30 digits): root finding, series and
# quadrature of the integrated delay equation segment by segment
XI_1_5 = 2.66039905846368499043
I_AT_1 = 1.31790215145440389486
RHO_2 = {1.5: 1.28360467567550685407, 2.0: 1.22741127776021876233,
         2.5: 0.95185862904429649016, 3.0: 0.62979694702267447592}
RHO_HALF = {1.5: 0.15732470030338180982, 2.0: 0.04732509171026562241}
RHO_1 = {2.5: 0.13031956183225074561, 3.0: 0.04860838829113156691}
LAMBDA_1 = {2.0: 0.09396966536540329272, 3.0: 0.01209474360453122025}
# composite Simpson with 10^6 panels on [0, 60]
MU_1_AT_1 = 2.32823175522129


@pytest.fixture(scope="module")
def t1():
    return default_table(1.0)


@pytest.fixture(scope="module")
def t2():
    return default_table(2.0)


class TestKappaAndConfig:
    def test_rejects_nonpositive(self):
        for bad in (0.0, -1.0):
            with pytest.raises(InvalidInputError):
                Kappa(bad)

    def test_config_positive(self):
        with pytest.raises(InvalidInputError):
            NumericConfig(quad_rel_tol=0.0)


class TestXi:
    def test_t_equal_one_gives_one(self):
        assert xi_kappa(2.0, 2.0) == 1.0

    def test_u5(self):
        assert xi_kappa(5.0, 1.0) == pytest.approx(XI_1_5, rel=1e-13)

    def test_large_u_asymptotic(self):
        u = 1e4
        ref = math.log(u) + math.log(math.log(u))
        assert abs(xi_kappa(u, 1.0) / ref - 1) <= 0.05

    def test_rejects_nonpositive_u(self):
        with pytest.raises(InvalidInputError):
            xi_kappa(0.0, 1.0)

    def test_nonconvergence_signalled(self):
        with pytest.raises(ConvergenceError):
            saddle_root(50.0, NumericConfig(newton_max_iter=1, newton_tol=1e-300))

    @given(st.floats(min_value=1e-3, max_value=1e6).filter(lambda t: abs(t - 1) > 1e-6))
    def test_root_equation(self, t):
        s = saddle_root(t)
        assert s != 0.0
        # e^s - 1 = t s
        scale = max(1.0, abs(t * s), math.exp(s))
        assert abs(math.expm1(s) - t * s) <= 1e-10 * scale

    def test_saddle_params(self):
        sp = saddle_params(100.0, 1.0)
        assert sp.sigma2 > 0
        assert 0.5 <= sp.sigma2 / 100.0 <= 1.5
        assert math.exp(sp.xi_raw) == pytest.approx(1 + 100.0 * sp.xi_raw, rel=1e-12)


class TestBigI:
    def test_zero(self):
        assert big_i(0.0) == 0.0

    def test_order1_at_1(self):
        assert big_i(1.0, 1) == pytest.approx(math.e - 1, rel=1e-15)

    def test_order0_at_1(self):
        assert big_i(1.0, 0) == pytest.approx(I_AT_1, rel=1e-12)

    def test_negative(self):
        with pytest.raises(InvalidInputError):
            big_i(-1.0)

    @given(st.floats(min_value=1e-3, max_value=30.0))
    def test_order2_is_derivative(self, s):
        h = 1e-5 * s
        fd = (big_i(s + h, 1) - big_i(s - h, 1)) / (2 * h)
        assert big_i(s, 2) == pytest.approx(fd, rel=1e-6)

    def test_order2_small_s_series(self):
        # (e^s - 1)/s = 1 + s/2 + s^2/6 + ..., derivative 1/2 + s/3 + s^2/8
        for s in (0.0, 1e-8, 5e-5, 2e-4):
            assert big_i(s, 2) == pytest.approx(0.5 + s / 3 + s * s / 8, rel=1e-12)


class TestRhoTable:
    @pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0, 3.0])
    def test_closed_form_unit_interval(self, kappa):
        t = default_table(kappa)
        u = np.linspace(0.01, 1.0, 50)
        ref = u ** (kappa - 1) / math.gamma(kappa)
        assert np.max(np.abs(t.rho(u) / ref - 1)) <= 1e-12

    def test_rho1_log_segment(self, t1):
        u = np.linspace(1.0, 2.0, 20)
        assert np.max(np.abs(t1.rho(u) - (1 - np.log(u)))) <= 1e-12

    @pytest.mark.parametrize("u", sorted(RHO_2))
    def test_rho2_reference(self, t2, u):
        assert t2.rho(u) == pytest.approx(RHO_2[u], rel=1e-12)

    @pytest.mark.parametrize("u", sorted(RHO_HALF))
    def test_rho_half_reference(self, u):
        assert default_table(0.5).rho(u) == pytest.approx(RHO_HALF[u], rel=1e-12)

    @pytest.mark.parametrize("u", sorted(RHO_1))
    def test_rho1_reference(self, t1, u):
        assert t1.rho(u) == pytest.approx(RHO_1[u], rel=1e-12)

    def test_rho1_at_10(self, t1):
        # de Bruijn's tabulated value
        assert t1.rho(10.0) == pytest.approx(2.77017183772596e-11, rel=1e-8)

    @pytest.mark.parametrize("kappa", [1.0, 2.0, 3.0])
    def test_continuity_at_one(self, kappa):
        t = default_table(kappa)
        assert abs(t.rho(1.0 - 1e-12) - t.rho(1.0 + 1e-12)) <= 1e-9

    @pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0, 3.0])
    def test_shape(self, kappa):
        t = default_table(kappa)
        v = t.rho(np.arange(1.0, 40.0, t.step))
        assert np.all(np.isfinite(v)) and np.all(v >= 0)
        dv = np.diff(v)
        if kappa <= 1:
            assert np.all(dv <= 0)
        else:
            signs = np.sign(dv[dv != 0])
            assert np.count_nonzero(np.diff(signs)) == 1

    @pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0, 3.0])
    def test_dde_residual(self, kappa):
        t = default_table(kappa)
        u = np.arange(1.0 + 2 * t.step, 40.0, 7 * t.step)
        h = 1e-4  # five-point central stencil; rho' is singular at 1+ when kappa < 1
        d = (t.rho(u - 2 * h) - 8 * t.rho(u - h) + 8 * t.rho(u + h) - t.rho(u + 2 * h)) / (12 * h)
        lagged = t.rho(u - 1.0)
        res = u * d + (1 - kappa) * t.rho(u) + kappa * lagged
        assert np.all(np.abs(res) <= 1e-6 * np.maximum(1.0, lagged))

    def test_interpolation_between_nodes(self, t1):
        u = 7.3 + t1.step / 3
        ref = build_rho_table(1.0, u_max=16.0, step=1.0 / 1024).rho(u)
        assert t1.rho(u) == pytest.approx(ref, rel=1e-8)

    def test_errors(self, t1):
        with pytest.raises(InvalidInputError):
            build_rho_table(1.0, step=1 / 32)
        with pytest.raises(InvalidInputError):
            build_rho_table(1.0, u_max=0.5)
        with pytest.raises(TableRangeError):
            t1.rho(t1.u_max + 1.0)

    def test_mesh_rounding(self):
        t = build_rho_table(1.0, u_max=10.5, step=1.0 / 100)
        assert t.u_max == 11.0
        assert 1.0 / t.step == 100.0

    @pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0, 3.0])
    def test_normalization(self, kappa):
        t = default_table(kappa)
        assert t.gamma_kappa_norm == pytest.approx(math.exp(EULER_GAMMA * kappa), rel=1e-6)


class TestAsymptotic:
    def test_u10_within_factor(self, t1):
        assert abs(rho_asymptotic(10.0, 1.0) / t1.rho(10.0) - 1) <= 2 / 10

    def test_improves_with_u(self, t1):
        errs = [abs(rho_asymptotic(u, 1.0) / t1.rho(u) - 1) for u in (10.0, 20.0, 30.0, 40.0)]
        assert errs == sorted(errs, reverse=True)

    def test_needs_u_ge_2(self):
        with pytest.raises(InvalidInputError):
            rho_asymptotic(1.5, 1.0)

    @pytest.mark.parametrize("kappa", [1.0, 2.0])
    def test_lambda_rho_relation(self, kappa):
        t = default_table(kappa)
        for u in np.arange(10.0, 40.5, 2.5):
            ratio = lambda_kappa(u, t) * xi_kappa(u, kappa) * math.exp(EULER_GAMMA * kappa) / t.rho(u)
            assert abs(ratio - 1) <= 2 / u

    def test_shifted_lambda_inequality(self, t1):
        worst = 0.0
        for u in np.arange(2.0, 20.5, 1.0):
            xi = xi_kappa(u, 1.0)
            lu = lambda_kappa(u, t1)
            for v in np.arange(0.0, u - 0.5 + 1e-9, 0.5):
                worst = max(worst, lambda_kappa(u - v, t1) / (lu * math.exp(v * xi)))
        assert worst <= 10.0


class TestLambda:
    def test_at_zero(self):
        for k in (0.5, 1.0, 2.0):
            assert lambda_kappa(0.0, default_table(k)) == 1.0

    def test_lambda1_at_1(self, t1):
        assert lambda_kappa(1.0, t1) == pytest.approx(1 - math.exp(-EULER_GAMMA), rel=1e-12)

    def test_lambda_half_quarter(self):
        ref = 1 - math.exp(-EULER_GAMMA / 2) * 0.5 / math.gamma(1.5)
        assert lambda_kappa(0.25, default_table(0.5)) == pytest.approx(ref, rel=1e-12)

    @pytest.mark.parametrize("u", sorted(LAMBDA_1))
    def test_reference(self, t1, u):
        assert lambda_kappa(u, t1) == pytest.approx(LAMBDA_1[u], rel=1e-10)

    @pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
    def test_table_tail_matches_closed_form(self, kappa):
        # the tabulated tail integral, independent of the closed-form branch
        t = default_table(kappa)
        for u in np.linspace(0.0, 1.0, 11):
            num = math.exp(-EULER_GAMMA * kappa) * (t.tail_integral(u) + t.tail_estimate)
            ref = 1 - math.exp(-EULER_GAMMA * kappa) * u ** kappa / math.gamma(kappa + 1)
            assert abs(num - ref) <= 1e-8

    def test_j_complement(self, t2):
        for u in (0.5, 1.5, 4.0, 9.0):
            assert j_kappa(u, t2) + lambda_kappa(u, t2) == pytest.approx(1.0, abs=1e-15)

    def test_range_error(self, t1):
        with pytest.raises(TableRangeError):
            lambda_kappa(t1.u_max - 0.5, t1)

    def test_negative(self, t1):
        with pytest.raises(InvalidInputError):
            lambda_kappa(-0.1, t1)

    @given(st.floats(min_value=0.0, max_value=30.0), st.floats(min_value=0.01, max_value=5.0))
    def test_decreasing(self, u, du):
        t = default_table(1.0)
        assert lambda_kappa(u + du, t) <= lambda_kappa(u, t)


class TestMu:
    def test_oracle(self):
        assert mu_kappa(1.0, 1.0) == pytest.approx(MU_1_AT_1, rel=1e-8)

    def test_large_u(self):
        assert 0.9 <= 50 * mu_kappa(50.0, 1.0) <= 1.1

    def test_decreasing(self):
        assert mu_kappa(2.0, 1.0) > mu_kappa(3.0, 1.0) > mu_kappa(4.0, 1.0)

    def test_rejects_nonpositive(self):
        with pytest.raises(InvalidInputError):
            mu_kappa(0.0, 1.0)

    @pytest.mark.parametrize("kappa", [1.0, 2.0])
    def test_adjoint_equation(self, kappa):
        h = 1e-2
        for u in np.arange(1.0, 20.5, 1.5):
            g = [(u + j * h) * mu_kappa(u + j * h, kappa) for j in (-2, -1, 1, 2)]
            deriv = (g[0] - 8 * g[1] + 8 * g[2] - g[3]) / (12 * h)
            rhs = kappa * (mu_kappa(u + 1, kappa) - mu_kappa(u, kappa))
            assert abs(deriv - rhs) <= 1e-5

    def test_ein_series_branch_continuity(self):
        assert float(ein(1.0 - 1e-12)) == pytest.approx(float(ein(1.0 + 1e-12)), rel=1e-11)


class TestAdjointIdentity:
    @pytest.mark.parametrize("kappa", [1.0, 2.0])
    @pytest.mark.parametrize("u", [1.5, 2.0, 3.0, 5.0])
    def test_identity(self, kappa, u):
        r = adjoint_identity(u, default_table(kappa))
        assert r.relative <= 1e-7


class TestHEnvelope:
    def test_at_b(self):
        assert h_envelope(3.0, 3.0) == 0.0

    def test_b1_e(self):
        assert h_envelope(math.e, 1.0) == pytest.approx(1.0, rel=1e-15)

    def test_below_b(self):
        assert h_envelope(0.5, 2.0) == 0.0
