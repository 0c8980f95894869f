import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

import oracles
from orlicz_frac import (
    SchemaError,
    SourceFunction,
    TailModel,
    TestFunction as Bump,
    TouchViolation,
    ValidationError,
    bump_basis,
    caccioppoli_report,
    closed_form,
    eval_pv_glaplacian,
    f_epsilon,
    from_grid,
    viscosity_point_check,
    weak_form_pair,
    weak_supersolution_report,
)

ZERO = SourceFunction.constant(0.0)


def _clamped_linear(n=199, L=1.0):
    x = np.linspace(-L, L, n)
    return from_grid(x.copy(), L, TailModel("constant", L, c_left=-L))


class _SumOfBumps:
    """Duck-typed test function: the sum of two bumps."""

    def __init__(self, a, b):
        self.a, self.b = a, b
        self.support = (min(a.support[0], b.support[0]), max(a.support[1], b.support[1]))

    def __call__(self, x):
        return self.a(x) + self.b(x)


class TestSources:
    def test_growth_violation(self, power2):
        f = SourceFunction(lambda x, r, e: r, phi_sup=1.0)
        with pytest.raises(ValidationError) as exc:
            f.check_growth(power2)
        assert exc.value.sample is not None

    def test_monotone_flag_violation(self, power2):
        f = SourceFunction(lambda x, r, e: np.tanh(r), phi_sup=1.0, monotone_r=True)
        with pytest.raises(ValidationError):
            f.check_growth(power2)

    def test_eta_envelope(self, power2):
        # |f| = |eta| with gamma = 1 is within G~^-1(|eta|) = 2 sqrt(|eta|) only for |eta| <= 4
        f = SourceFunction(lambda x, r, e: np.abs(e), gamma=lambda t: np.ones_like(t), uses_eta=True)
        f.check_growth(power2, etas=[0.0, 1.0, 4.0])
        with pytest.raises(ValidationError):
            f.check_growth(power2, etas=[0.0, 5.0])

    def test_builtin_sources_validate(self, power3):
        for f in (SourceFunction.constant(-2.0), SourceFunction.affine_x(0.5, -1.0),
                  SourceFunction.tanh_r(1.0, 0.5), SourceFunction.tanh_eta(0.0, 1.0)):
            assert f.check_growth(power3).passed

    def test_tanh_r_rejects_negative_slope(self):
        with pytest.raises(ValidationError):
            SourceFunction.tanh_r(0.0, -1.0)

    def test_from_dict(self):
        f = SourceFunction.from_dict({"kind": "tanh_r", "c0": 1.0, "c1": 0.5})
        assert float(f(0.0, 0.0)) == 1.0
        assert f.to_dict() == {"kind": "tanh_r", "c0": 1.0, "c1": 0.5}
        with pytest.raises(SchemaError):
            SourceFunction.from_dict({"kind": "cubic"})
        with pytest.raises(SchemaError):
            SourceFunction.from_dict({"kind": "constant", "k": 1.0})
        with pytest.raises(SchemaError):
            SourceFunction.from_dict({"c": 1.0})

    def test_analytic_dr(self):
        f = SourceFunction.tanh_r(0.0, 2.0)
        r = np.linspace(-2, 2, 9)
        np.testing.assert_allclose(f.d_dr(0.0, r), -2.0 / np.cosh(r) ** 2)


class TestFEpsilon:
    def test_linear_on_unit_interval(self):
        f = SourceFunction.affine_x(0.0, 1.0, domain=(0.0, 1.0))
        fe = f_epsilon(f, 0.1)
        x = np.linspace(0, 1, 41)
        np.testing.assert_allclose(fe(x, 0.0), np.maximum(0.0, x - 0.1), atol=1e-15)

    def test_bad_radius(self):
        with pytest.raises(ValueError):
            f_epsilon(ZERO, 0.0)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-2, 2), b=st.floats(-3, 3), c=st.floats(-3, 3), r_eps=st.floats(1e-3, 0.5),
       x=st.floats(-1, 1), r=st.floats(-5, 5))
def test_f_epsilon_below_f(a, b, c, r_eps, x, r):
    f = SourceFunction(lambda x, r, e: a + b * np.sin(3 * x) + c * np.tanh(r), phi_sup=abs(a) + abs(b) + abs(c))
    fe = f_epsilon(f, r_eps)
    assert float(fe(x, r)) <= float(f(x, r)) + 1e-15


class TestTestFunctions:
    def test_bump_values(self):
        psi = Bump(0.2, 0.5, 2.0)
        assert float(psi(0.2)) == 2.0
        assert float(psi(0.7)) == 0.0 and float(psi(-0.31)) == 0.0
        assert psi.support == (pytest.approx(-0.3), pytest.approx(0.7))

    def test_derivative(self):
        psi = Bump(0.1, 0.4)
        x = np.linspace(-0.25, 0.45, 15)
        h = 1e-6
        np.testing.assert_allclose(psi.derivative(x), (psi(x + h) - psi(x - h)) / (2 * h), atol=1e-6)

    def test_invalid(self):
        with pytest.raises(ValueError):
            Bump(0.0, 0.0)
        with pytest.raises(ValueError):
            Bump(0.0, 1.0, -1.0)

    def test_basis(self):
        basis = bump_basis(-1.0, 1.0)
        assert len(basis) == 24
        for psi in basis:
            lo, hi = psi.support
            assert -1.0 < lo < hi < 1.0

    def test_basis_radius_too_large(self):
        with pytest.raises(ValueError):
            bump_basis(0.0, 1.0, radii=(0.6,))


class TestWeakForm:
    def test_constant(self, power2):
        lhs, rhs = weak_form_pair(closed_form("constant", c=3.0), Bump(0.0, 0.5), power2, 0.5, ZERO)
        assert lhs == 0.0 and rhs == 0.0

    def test_global_linear_vanishes(self, power3):
        lhs, _ = weak_form_pair(closed_form("linear"), Bump(0.1, 0.3), power3, 0.4, ZERO)
        assert abs(lhs) < 1e-12

    def test_rhs_pairing(self, power2):
        psi = Bump(0.1, 0.4)
        area = integrate.quad(psi, *psi.support)[0]
        f = SourceFunction.constant(1.5)
        _, rhs = weak_form_pair(closed_form("constant"), psi, power2, 0.5, f)
        assert rhs == pytest.approx(2.0 * 1.5 * area, rel=1e-8)
        _, rhs1 = weak_form_pair(closed_form("constant"), psi, power2, 0.5, f, pairing=1.0)
        assert rhs1 == pytest.approx(rhs / 2.0, rel=1e-14)

    def test_matches_pointwise_operator(self, power2):
        # (-Delta)^(1/2) of (1 - x^2)_+^(1/2) equals 2 pi on (-1, 1); the weak lhs is 2 int psi times that
        u = closed_form("truncated_parabola_s", s=0.5)
        psi = Bump(0.1, 0.5)
        area = integrate.quad(psi, *psi.support)[0]
        lhs, _ = weak_form_pair(u, psi, power2, 0.5, ZERO)
        assert lhs == pytest.approx(2.0 * 2.0 * math.pi * area, rel=1e-3)

    def test_clamped_linear_against_dense_oracle(self, power2):
        u = _clamped_linear()
        psi = Bump(0.2, 0.3)
        lhs, _ = weak_form_pair(u, psi, power2, 0.5, ZERO)
        ref = oracles.weak_lhs_dense(u, psi, psi.derivative, lambda x: (np.abs(x) < 1.0).astype(float),
                                     psi.support)
        assert lhs != 0.0
        assert lhs == pytest.approx(ref, rel=1e-2)

    def test_linear_in_psi(self, power3):
        u = closed_form("bump", radius=0.8, height=0.7)
        a, b = Bump(-0.1, 0.3), Bump(0.2, 0.25, 0.5)
        la, _ = weak_form_pair(u, a, power3, 0.5, ZERO)
        lb, _ = weak_form_pair(u, b, power3, 0.5, ZERO)
        lab, _ = weak_form_pair(u, _SumOfBumps(a, b), power3, 0.5, ZERO)
        assert lab == pytest.approx(la + lb, rel=1e-5)
        l2, _ = weak_form_pair(u, Bump(-0.1, 0.3, 2.0), power3, 0.5, ZERO)
        assert l2 == pytest.approx(2.0 * la, rel=1e-12)

    def test_bad_s(self, power2):
        with pytest.raises(ValueError):
            weak_form_pair(closed_form("constant"), Bump(0, 0.5), power2, 0.0, ZERO)

    def test_report(self, power2):
        u = closed_form("truncated_parabola_s", s=0.5)
        basis = bump_basis(-0.9, 0.9, n_centers=3, radii=(0.1,))
        good = weak_supersolution_report(u, basis, power2, 0.5, SourceFunction.constant(2.0 * math.pi * 0.99))
        bad = weak_supersolution_report(u, basis, power2, 0.5, SourceFunction.constant(2.0 * math.pi * 1.1))
        assert good.passed and not bad.passed
        assert len(good.extra["rows"]) == 3


class TestViscosity:
    def test_constant_with_negative_source(self, power2):
        rep = viscosity_point_check(closed_form("constant", c=1.0), 0.0, touch=(0.0, 0.0), Y=power2, s=0.5,
                                    f=SourceFunction.constant(-1.0))
        assert rep.passed
        assert rep.achieved_constant == pytest.approx(1.0)
        rep = viscosity_point_check(closed_form("constant", c=1.0), 0.0, touch=(0.0, 0.0), Y=power2, s=0.5,
                                    f=SourceFunction.constant(1.0))
        assert not rep.passed

    def test_touch_violation(self, power2):
        with pytest.raises(TouchViolation) as exc:
            viscosity_point_check(closed_form("constant", c=1.0), 0.0, touch=(0.0, 1.0), Y=power2, s=0.5,
                                  f=ZERO, radius=0.1)
        assert exc.value.excess > 0

    def test_touching_from_below_raises_the_operator(self, power2):
        # psi <= u with equality at x0 makes the operator at x0 at least as large
        u = closed_form("truncated_parabola_s", s=0.5)
        rep = viscosity_point_check(u, 0.3, Y=power2, s=0.5, f=ZERO, radius=0.1)
        ref = eval_pv_glaplacian(u, 0.3, power2, 0.5)
        assert rep.extra["lhs"] >= ref.value - ref.error_estimate - rep.extra["error_estimate"]
        assert ref.value == pytest.approx(2.0 * math.pi, rel=1e-6)
        assert rep.extra["case"] == "a"

    def test_beta_must_exceed_two(self, power2):
        with pytest.raises(ValueError):
            viscosity_point_check(closed_form("constant"), 0.0, Y=power2, f=ZERO, beta=2.0)

    def test_requires_Y_and_f(self, power2):
        with pytest.raises(ValueError):
            viscosity_point_check(closed_form("constant"), 0.0, Y=power2)


class TestCaccioppoli:
    def test_constant(self, power2):
        rep = caccioppoli_report(closed_form("constant", c=2.0), Bump(0.0, 0.5), power2, 0.5, ZERO)
        assert rep.passed
        assert rep.achieved_constant == 0.0

    def test_bump_is_stable(self, power3):
        rep = caccioppoli_report(closed_form("bump", radius=0.8), Bump(0.0, 0.5), power3, 0.5, ZERO)
        assert rep.passed
        assert 0.0 < rep.achieved_constant < math.inf
        assert rep.extra["relative_change"] <= 0.1

    def test_rhs_formula(self, power2):
        u = closed_form("bump", radius=0.8, height=2.0)
        f = SourceFunction(lambda x, r, e: 0.5 * np.tanh(r), gamma=lambda t: 0.5 * np.ones_like(t),
                           phi_sup=0.5)
        rep = caccioppoli_report(u, Bump(0.0, 0.5), power2, 0.5, f, panels=(4, 8))
        assert rep.extra["osc"] == pytest.approx(2.0)
        assert rep.extra["gamma_inf"] == pytest.approx(0.5)
        for row in rep.extra["rows"]:
            assert row["rhs"] > 4.0 * 0.5 + 2.0

    def test_xi_range(self, power2):
        with pytest.raises(ValueError):
            caccioppoli_report(closed_form("constant"), Bump(0.0, 0.5, 2.0), power2, 0.5, ZERO)
