import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

import oracles
from orlicz_frac import (
    Domain1D,
    SchemaError,
    TailDivergence,
    TailModel,
    ValidationError,
    closed_form,
    from_grid,
    generators,
    lg_membership,
    luxemburg_norm,
    make_young,
    modular_G,
    modular_sG,
    sandwich_report,
)
from orlicz_frac.sampled import function_from_json

UNIT = Domain1D(0.0, 1.0)


class TestSampled:
    def test_registry_alphabetical(self):
        names = [g["name"] for g in generators()]
        assert names == sorted(names)
        assert {"constant", "linear", "abs", "quadratic", "bump", "truncated_parabola_s"} <= set(names)

    def test_unknown_generator(self):
        with pytest.raises(SchemaError):
            closed_form("sawtooth")

    def test_unknown_parameter(self):
        with pytest.raises(SchemaError):
            closed_form("bump", width=2.0)

    def test_grid_interpolates_and_uses_tail(self):
        u = from_grid([0.0, 1.0, 0.0], 1.0, TailModel("zero"))
        np.testing.assert_allclose(u(np.array([-1.0, -0.5, 0.0, 0.5, 3.0])), [0.0, 0.5, 1.0, 0.5, 0.0])

    def test_grid_tail_continuity(self):
        with pytest.raises(ValidationError):
            from_grid([0.0, 1.0, 1.0], 1.0, TailModel("zero"))

    def test_grid_lipschitz_hint(self):
        with pytest.raises(ValidationError):
            from_grid([0.0, 1.0, 0.0], 1.0, lipschitz_hint=0.5)

    def test_grid_non_finite(self):
        with pytest.raises(ValidationError):
            from_grid([0.0, np.nan, 0.0], 1.0)

    def test_tail_model_unknown(self):
        with pytest.raises(SchemaError):
            TailModel("exponential")

    def test_decay_tail(self):
        t = TailModel("decay", 2.0, 1.5, c_left=-1.0)
        np.testing.assert_allclose(t.value(np.array([4.0, -4.0])), [2.0 / 8.0, -1.0 / 8.0])
        assert t.growth == -1.5

    def test_json_round_trip(self):
        u = from_grid([0.0, 0.5, 0.2, 0.0], 2.0, TailModel("constant", 0.0))
        v = function_from_json(u.to_dict())
        x = np.linspace(-3, 3, 17)
        np.testing.assert_array_equal(u(x), v(x))
        w = function_from_json({"kind": "closed_form", "name": "bump", "params": {"radius": 0.5}})
        assert w(np.array(0.0)) == pytest.approx(1.0)

    def test_truncated_parabola(self):
        u = closed_form("truncated_parabola_s", s=0.5)
        np.testing.assert_allclose(u(np.array([0.0, 0.6, 1.0, 2.0])), [1.0, 0.8, 0.0, 0.0])


class TestDomain:
    @pytest.mark.parametrize("kinks", [(), (0.3,), (0.1, 0.5, 0.77)])
    def test_weights_positive_sum_to_length(self, kinks):
        dom = Domain1D(-0.5, 1.5, order=8, panels=4)
        x, w = dom.rule(kinks)
        assert np.all(w > 0)
        assert np.sum(w) == pytest.approx(2.0, rel=1e-13)
        assert np.all((x > -0.5) & (x < 1.5))

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            Domain1D(1.0, 1.0)


class TestModularG:
    def test_zero(self, power2):
        assert modular_G(closed_form("constant", c=0.0), UNIT, power2) == 0.0

    def test_constant_one(self, power2):
        assert modular_G(closed_form("constant", c=1.0), UNIT, power2) == pytest.approx(1.0, rel=1e-14)

    def test_linear(self, power2):
        assert modular_G(closed_form("linear"), UNIT, power2) == pytest.approx(1.0 / 3.0, rel=1e-13)

    def test_with_error(self, power3):
        val, err = modular_G(closed_form("abs", center=0.4), UNIT, power3, return_error=True)
        assert val == pytest.approx((0.4**4 + 0.6**4) / 4.0, rel=1e-12)
        assert err < 1e-10


class TestModularSG:
    def test_constant(self, power2):
        assert modular_sG(closed_form("constant", c=2.0), UNIT, power2, 0.5) == 0.0

    def test_linear_closed_form(self, power2):
        # int int |x - y|^(1 - 2s) dx dy over [0, 1]^2 = 2 / ((2 - 2s)(3 - 2s))
        for s in (0.25, 0.5, 0.75):
            ref = 2.0 / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s))
            assert modular_sG(closed_form("linear"), UNIT, power2, s) == pytest.approx(ref, rel=1e-6)

    @pytest.mark.parametrize("p,s", [(2.0, 0.3), (3.0, 0.6), (1.5, 0.5)])
    def test_against_dense_oracle(self, p, s):
        Y = make_young({"family": "power", "p": p})
        u = closed_form("abs", center=0.2)
        got = modular_sG(u, Domain1D(-1.0, 1.0), Y, s)
        ref = oracles.gagliardo_modular_dense(u, -1.0, 1.0, s, Y.G, M=1500)
        assert got == pytest.approx(ref, rel=0.01)

    def test_symmetry_under_reflection(self, power3):
        # swapping x and y is a reflection of the square for u(-x) on [-1, 1]
        u = from_grid(np.sin(np.linspace(-1, 1, 41)) + 0.3, 1.0, TailModel("constant", math.sin(1) + 0.3,
                                                                        c_left=0.3 - math.sin(1)))
        w = from_grid(u.values[::-1], 1.0, TailModel("constant", u.values[0], c_left=u.values[-1]))
        dom = Domain1D(-1.0, 1.0)
        assert modular_sG(w, dom, power3, 0.4) == pytest.approx(modular_sG(u, dom, power3, 0.4), rel=1e-10)

    def test_error_and_envelope(self, power2):
        u = closed_form("bump", radius=0.5)
        val, err, env = modular_sG(u, Domain1D(-1, 1), power2, 0.5, return_error=True)
        ref = oracles.gagliardo_modular_dense(u, -1.0, 1.0, 0.5, power2.G, M=1500)
        # the estimate (half-order rule) is conservative
        assert abs(val - ref) <= err < 0.01 * val
        assert env > 0

    def test_bad_s(self, power2):
        with pytest.raises(ValueError):
            modular_sG(closed_form("linear"), UNIT, power2, 1.0)


class TestLuxemburg:
    def test_zero(self, power2):
        assert luxemburg_norm(closed_form("constant", c=0.0), UNIT, power2) == 0.0

    def test_constant_one(self, power2):
        assert luxemburg_norm(closed_form("constant", c=1.0), UNIT, power2) == pytest.approx(1.0, rel=1e-10)

    def test_power_closed_form(self, power3):
        # ||x||_{L^3(0,1)}: int (x/lam)^3 = 1/(4 lam^3) = 1
        assert luxemburg_norm(closed_form("linear"), UNIT, power3) == pytest.approx(4.0 ** (-1.0 / 3.0), rel=1e-10)

    def test_seminorm_power2(self, power2):
        # Phi(u/lam) = Phi(u)/lam^2 for G = t^2
        u = closed_form("bump", radius=0.5)
        dom = Domain1D(-1.0, 1.0)
        phi = modular_sG(u, dom, power2, 0.5)
        assert luxemburg_norm(u, dom, power2, "seminorm_sG", s=0.5) == pytest.approx(math.sqrt(phi), rel=1e-8)

    def test_unknown_kind(self, power2):
        with pytest.raises(ValueError):
            luxemburg_norm(closed_form("linear"), UNIT, power2, "Linf")

    @pytest.mark.parametrize("spec", [{"family": "powerlog", "p": 3}, {"family": "piecewise", "p": 1.5, "q": 3}])
    def test_sandwich_seminorm(self, spec):
        rep = sandwich_report(closed_form("bump", radius=0.7, height=3.0), Domain1D(-1, 1), make_young(spec),
                              "seminorm_sG", s=0.4)
        assert rep.passed, rep


@settings(max_examples=30, deadline=None)
@given(c=st.floats(0.05, 20.0), l1=st.floats(0.1, 10.0), l2=st.floats(0.1, 10.0), p=st.sampled_from([1.5, 2.0, 3.5]))
def test_modular_monotone_in_lambda(c, l1, l2, p):
    Y = make_young({"family": "power", "p": p})
    u = closed_form("bump", height=c, radius=0.8)
    dom = Domain1D(-1.0, 1.0, order=8, panels=8)
    lo, hi = sorted((l1, l2))
    assert modular_G(u.scaled(1.0 / lo), dom, Y) >= modular_G(u.scaled(1.0 / hi), dom, Y) * (1 - 1e-12)


@settings(max_examples=25, deadline=None)
@given(values=st.lists(st.floats(-5.0, 5.0), min_size=3, max_size=30), p=st.sampled_from([1.5, 2.0, 4.0]))
def test_sandwich_property(values, p):
    v = np.array([0.0] + values + [0.0])
    u = from_grid(v, 1.0, TailModel("zero"))
    rep = sandwich_report(u, Domain1D(-1.0, 1.0), make_young({"family": "power", "p": p}))
    assert rep.passed


class TestLgMembership:
    def test_zero(self, power2):
        assert lg_membership(closed_form("constant", c=0.0), power2, 0.5) == 0.0

    def test_constant_one_against_quad(self, power2):
        # g(t) = 2t: 2 int_0^inf 2 / ((1 + x^s)(1 + x^(1+s))) dx
        f = lambda x: 4.0 / ((1.0 + x**0.5) * (1.0 + x**1.5))
        ref = integrate.quad(f, 0.0, 1.0)[0] + integrate.quad(f, 1.0, np.inf, limit=200)[0]
        assert lg_membership(closed_form("constant", c=1.0), power2, 0.5) == pytest.approx(ref, rel=1e-7)

    def test_linear_growth(self, power2):
        # g(|y| / (1 + |y|^s)) / (1 + |y|^(1+s)) ~ |y|^(1-s) |y|^(-1-s) = |y|^(-2s): finite for s = 0.75
        val = lg_membership(closed_form("abs"), power2, 0.75)
        assert math.isfinite(val) and val > 0

    def test_divergent_growth(self, power3):
        with pytest.raises(TailDivergence):
            lg_membership(closed_form("abs_power", beta=4.0), power3, 0.5)

    def test_radial_n2(self, power2):
        # 2 pi int_0^inf r * 2 / ((1 + r^s)(1 + r^(2+s))) dr for u = 1
        f = lambda r: 2.0 * math.pi * r * 2.0 / ((1.0 + r**0.5) * (1.0 + r**2.5))
        ref = integrate.quad(f, 0.0, 1.0)[0] + integrate.quad(f, 1.0, np.inf, limit=200)[0]
        assert lg_membership(closed_form("constant", c=1.0), power2, 0.5, n=2) == pytest.approx(ref, rel=1e-6)
