import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from orlicz_frac import (
    ValidationError,
    complementary,
    complementary_inverse,
    inequality_suite,
    make_young,
)
from orlicz_frac.young import LogGrid, estimate_indices

FAMILY_SPECS = [
    {"family": "power", "p": 1.5},
    {"family": "power", "p": 2},
    {"family": "power", "p": 3},
    {"family": "power", "p": 4},
    {"family": "powerlog", "p": 3},
    {"family": "piecewise", "p": 1.5, "q": 3},
]

YS = [make_young(s) for s in FAMILY_SPECS]


def _ids(spec):
    return "-".join(str(v) for v in spec.values())


class TestConstruction:
    def test_power3_indices(self):
        Y = make_young({"family": "power", "p": 3})
        assert Y.p_minus == 3.0
        assert Y.p_plus == 3.0

    def test_power2_normalized(self, power2):
        t = np.array([0.0, 0.5, 1.0, 3.0])
        np.testing.assert_allclose(power2.G(t), t**2, rtol=1e-15)
        np.testing.assert_allclose(power2.g(t), 2.0 * t, rtol=1e-15)

    @pytest.mark.parametrize("spec", FAMILY_SPECS, ids=_ids)
    def test_normalization(self, spec):
        assert float(make_young(spec).G(1.0)) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("spec", FAMILY_SPECS, ids=_ids)
    def test_g_odd_G_even(self, spec):
        Y = make_young(spec)
        t = np.logspace(-3, 3, 25)
        np.testing.assert_array_equal(Y.g(-t), -Y.g(t))
        np.testing.assert_array_equal(Y.G(-t), Y.G(t))

    def test_power_rejects_p_le_1(self):
        with pytest.raises(ValidationError):
            make_young({"family": "power", "p": 1.0})

    def test_powerlog_threshold(self):
        with pytest.raises(ValidationError):
            make_young({"family": "powerlog", "p": 2.5})

    def test_unknown_family(self):
        with pytest.raises(ValidationError):
            make_young({"family": "exponential"})

    def test_user_defined_matches_power(self):
        Y = make_young({"family": "user", "generator": lambda t: 3.0 * t**2})
        t = np.logspace(-4, 4, 41)
        np.testing.assert_allclose(Y.G(t), t**3, rtol=1e-9)
        assert Y.p_minus == pytest.approx(3.0, abs=1e-4)
        assert Y.p_plus == pytest.approx(3.0, abs=1e-4)

    def test_user_defined_rejects_decreasing_g(self):
        with pytest.raises(ValidationError) as exc:
            make_young({"family": "user", "generator": lambda t: t * np.exp(-t)})
        assert exc.value.sample is not None

    def test_declared_indices_are_checked(self):
        with pytest.raises(ValidationError):
            make_young({"family": "power", "p": 3, "p_minus": 3.5, "p_plus": 4.0})

    def test_estimated_indices_power(self):
        lo, hi = estimate_indices(make_young({"family": "power", "p": 2.5}))
        assert lo == pytest.approx(2.5, abs=1e-6)
        assert hi == pytest.approx(2.5, abs=1e-6)


class TestComplementary:
    def test_power2_example(self, power2):
        cv = complementary(power2, 2.0)
        assert cv.t_star == pytest.approx(1.0, rel=1e-11)
        assert cv.value == pytest.approx(1.0, rel=1e-11)

    @pytest.mark.parametrize("Y", YS, ids=[_ids(s) for s in FAMILY_SPECS])
    def test_zero(self, Y):
        assert complementary(Y, 0.0).value == 0.0
        assert complementary_inverse(Y, 0.0) == 0.0

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
    def test_power_closed_form(self, p):
        Y = make_young({"family": "power", "p": p})
        a = np.logspace(-3, 3, 31)
        np.testing.assert_allclose(complementary(Y, a).value, oracles.power_conjugate(a, p), rtol=1e-10)

    @pytest.mark.parametrize("p", [1.5, 3.0])
    def test_conjugate_of_g_equality_for_power(self, p):
        Y = make_young({"family": "power", "p": p})
        t0 = np.logspace(-2, 2, 9)
        val = complementary(Y, Y.g(t0)).value
        np.testing.assert_allclose(val, (p - 1.0) * Y.G(t0), rtol=1e-10)

    def test_inverse_power2(self, power2):
        assert complementary_inverse(power2, 1.0) == pytest.approx(2.0, rel=1e-12)

    @pytest.mark.parametrize("spec", [FAMILY_SPECS[4], FAMILY_SPECS[5]], ids=_ids)
    def test_against_brute_force(self, spec):
        Y = make_young(spec)
        for a in (0.3, 1.0, 5.0):
            ref = oracles.conjugate_by_maximization(a, Y.G, tmax=100.0)
            assert complementary(Y, a).value == pytest.approx(ref, rel=1e-6)

    def test_negative_argument(self, power2):
        with pytest.raises(ValueError):
            complementary(power2, -1.0)


@settings(max_examples=60, deadline=None)
@given(i=st.integers(0, len(YS) - 1), t=st.floats(1e-5, 1e5))
def test_complementary_lower_bound_property(i, t):
    Y = YS[i]
    a = float(Y.g(t)) * 0.7
    assert complementary(Y, a).value >= a * t - float(Y.G(t)) - 1e-12 * max(1.0, a * t)


@settings(max_examples=60, deadline=None)
@given(i=st.integers(0, len(YS) - 1), a=st.floats(1e-4, 1e4))
def test_argmax_invariance_property(i, a):
    Y = YS[i]
    cv = complementary(Y, a)
    assert float(Y.g(cv.t_star)) >= a * (1 - 1e-11)
    assert float(Y.g(cv.t_star * (1 - 1e-10))) <= a * (1 + 1e-9)


@settings(max_examples=60, deadline=None)
@given(i=st.integers(0, len(YS) - 1), a=st.floats(1e-3, 1e3), b=st.floats(1e-3, 1e3))
def test_complementary_midpoint_convexity(i, a, b):
    Y = YS[i]
    v = complementary(Y, np.array([a, 0.5 * (a + b), b])).value
    assert v[1] <= 0.5 * (v[0] + v[2]) * (1 + 1e-9) + 1e-15


@settings(max_examples=60, deadline=None)
@given(i=st.integers(0, len(YS) - 1), t=st.floats(1e-6, 1e6))
def test_h11_property(i, t):
    Y = YS[i]
    r = float(t * Y.g(t) / Y.G(t))
    assert Y.p_minus * (1 - 1e-9) <= r <= Y.p_plus * (1 + 1e-9)


@settings(max_examples=60, deadline=None)
@given(i=st.integers(0, len(YS) - 1), a=st.floats(1e-4, 1e4), b=st.floats(1e-4, 1e4))
def test_G_product_property(i, a, b):
    Y = YS[i]
    lo = min(a**Y.p_minus, a**Y.p_plus) * float(Y.G(b))
    hi = max(a**Y.p_minus, a**Y.p_plus) * float(Y.G(b))
    Gab = float(Y.G(a * b))
    assert lo * (1 - 1e-9) <= Gab <= hi * (1 + 1e-9)


@settings(max_examples=60, deadline=None)
@given(i=st.integers(0, len(YS) - 1), a=st.floats(1e-4, 1e4), t=st.floats(1e-4, 1e4),
       delta=st.floats(0.01, 0.99))
def test_young_inequality_property(i, a, t, delta):
    Y = YS[i]
    rhs = delta * complementary(Y, a).value + delta ** (-Y.p_plus) * float(Y.G(t))
    assert a * t <= rhs * (1 + 1e-9)


@settings(max_examples=60, deadline=None)
@given(i=st.integers(0, len(YS) - 1), s=st.floats(0.0, 1e4), t=st.floats(0.0, 1e4))
def test_tineqg_property(i, s, t):
    Y = YS[i]
    C = Y.p_plus * 2.0**Y.p_plus / (2.0 * Y.p_minus)
    assert float(Y.g(s + t)) <= C * float(Y.g(s) + Y.g(t)) * (1 + 1e-9) + 1e-300


class TestInequalitySuite:
    @pytest.mark.parametrize("spec", [s for s in FAMILY_SPECS if s["family"] != "powerlog"], ids=_ids)
    def test_explicit_checks_pass(self, spec):
        reps = inequality_suite(make_young(spec), checks="explicit")
        assert [r.name for r in reps if not r.passed] == []

    def test_powerlog_gg_product_violated_at_the_corner(self):
        # g jumps from p - 1 to p + 1 at t = 1; the (gg product) ratio tends to (p+1)/(p-1) there
        reps = {r.name: r for r in inequality_suite(make_young({"family": "powerlog", "p": 3}), checks="explicit")}
        bad = reps["gg_product"]
        assert not bad.passed
        assert bad.achieved_constant == pytest.approx(2.0, abs=0.1)
        a, b = bad.worst_sample
        assert a * b > 0.99 or b > 0.99

    def test_free_checks_power(self):
        grid = LogGrid(1e-3, 1e3, 16)
        reps = inequality_suite(make_young({"family": "power", "p": 3}), grid=grid, checks="free")
        assert {r.name for r in reps} >= {"H111", "inq_G_and_g", "delta_prime", "aux1"}
        assert all(r.passed for r in reps)
        for r in reps:
            assert math.isfinite(r.bound)

    def test_reports_carry_worst_sample(self, power2):
        for r in inequality_suite(power2, checks="explicit"):
            assert len(r.worst_sample) >= 1
            assert r.bound is not None

    def test_bad_selector(self, power2):
        with pytest.raises(ValueError):
            inequality_suite(power2, checks="some")

    def test_optional_monotone_index(self, power3):
        names = {r.name for r in inequality_suite(power3, checks="explicit", optional=True)}
        assert "h_nondecreasing" in names
