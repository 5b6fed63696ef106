import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from nldiffusion.diffusivity import (
    Constant,
    Exponential,
    PowerLaw,
    Tabulated,
    eval_D,
    eval_D_derivs,
    inverse_F,
    kirchhoff_F,
    model_from_params,
    taylor_compose_D,
)
from nldiffusion.errors import DomainError, RangeError, UnsupportedOrderError


@pytest.mark.parametrize("model, c, expected", [
    (PowerLaw(1.0, 2.0), 2.0, 4.0),
    (Constant(3.0), 17.5, 3.0),
    (Exponential(1.0, math.log(2.0)), 1.0, 2.0),
])
def test_eval_D_examples(model, c, expected):
    assert eval_D(model, c) == pytest.approx(expected, rel=1e-15)


def test_eval_D_scalar_in_scalar_out():
    assert isinstance(eval_D(PowerLaw(1.0, 2.0), 2.0), float)
    out = eval_D(PowerLaw(1.0, 2.0), np.array([1.0, 2.0]))
    np.testing.assert_array_equal(out, [1.0, 4.0])


@pytest.mark.parametrize("model, c, order, expected", [
    (Exponential(2.0, 0.5), 0.0, 2, [2.0, 1.0, 0.5]),
    (Constant(5.0), 0.3, 3, [5.0, 0.0, 0.0, 0.0]),
    (PowerLaw(1.0, 3.0), 2.0, 1, [8.0, 12.0]),
])
def test_derivs_examples(model, c, order, expected):
    np.testing.assert_allclose(eval_D_derivs(model, c, order), expected, rtol=1e-15)


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_D(PowerLaw(1.0, 0.5), -1.0)
    with pytest.raises(DomainError):
        eval_D(PowerLaw(1.0, 0.5), 0.0)  # open at zero for fractional m
    assert eval_D(PowerLaw(1.0, 2.0), 0.0) == 0.0
    with pytest.raises(DomainError):
        eval_D(Tabulated(((0.0, 1.0), (1.0, 2.0))), 1.5)


def test_tabulated_order_limit():
    with pytest.raises(UnsupportedOrderError):
        eval_D_derivs(Tabulated(((0.0, 1.0), (1.0, 2.0))), 0.5, 3)


def test_powerlaw_fractional_derivatives():
    m = PowerLaw(2.0, 1.5)
    d = eval_D_derivs(m, 4.0, 2)
    np.testing.assert_allclose(d, [2 * 8.0, 2 * 1.5 * 2.0, 2 * 1.5 * 0.5 / 2.0], rtol=1e-14)


@pytest.mark.parametrize("model, c, expected", [
    (Constant(2.0), 1.5, 3.0),
    (PowerLaw(1.0, 1.0), 2.0, 2.0),
])
def test_kirchhoff_examples(model, c, expected):
    assert kirchhoff_F(model, c) == pytest.approx(expected, rel=1e-15)


def test_kirchhoff_tabulated_against_quadrature():
    model = Tabulated(((0.0, 1.0), (1.0, 2.0)))
    x = np.linspace(0.0, 1.0, 10**6 + 1)
    ref = integrate.trapezoid(model.D(x), x)
    assert abs(kirchhoff_F(model, 1.0) - ref) <= 1e-10


def test_kirchhoff_exponential_closed_form():
    m = Exponential(1.5, 0.7, c_ref=0.2)
    c = 1.3
    expected = 1.5 / 0.7 * (math.exp(0.7 * c) - math.exp(0.7 * 0.2))
    assert kirchhoff_F(m, c) == pytest.approx(expected, rel=1e-14)


def test_c_ref_only_shifts_F():
    a, b = PowerLaw(1.0, 2.0), PowerLaw(1.0, 2.0, c_ref=0.4)
    c = np.linspace(0.1, 3.0, 7)
    shift = kirchhoff_F(a, c) - kirchhoff_F(b, c)
    np.testing.assert_allclose(shift, kirchhoff_F(a, 0.4), rtol=1e-13)


@pytest.mark.parametrize("model, f, expected", [
    (Constant(2.0), 3.0, 1.5),
    (PowerLaw(1.0, 1.0), 2.0, 2.0),
])
def test_inverse_examples(model, f, expected):
    assert inverse_F(model, f) == pytest.approx(expected, rel=1e-12)


def test_inverse_round_trip_random():
    rng = np.random.default_rng(42)
    model = PowerLaw(1.0, 2.0)
    c = rng.uniform(0.1, 10.0, 100)
    back = inverse_F(model, kirchhoff_F(model, c))
    np.testing.assert_allclose(back, c, rtol=1e-10)


def test_inverse_out_of_range():
    with pytest.raises(RangeError):
        inverse_F(PowerLaw(1.0, 2.0), -1.0)
    with pytest.raises(RangeError):
        inverse_F(Tabulated(((0.0, 1.0), (1.0, 2.0))), 10.0)


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from([
        Constant(0.7),
        PowerLaw(1.3, 2.0),
        PowerLaw(0.5, 0.5),
        Exponential(0.8, -1.2),
        Tabulated(((0.0, 1.0), (0.5, 1.4), (1.0, 3.0), (2.0, 3.5))),
    ]),
    st.floats(0.05, 1.9),
)
def test_inverse_round_trip_property(model, c):
    assert inverse_F(model, kirchhoff_F(model, c)) == pytest.approx(c, rel=1e-10, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(0.1, 4.0))
def test_F_is_increasing_and_D_is_its_slope(c, m):
    model = PowerLaw(1.0, m)
    h = 1e-6 * c
    slope = (kirchhoff_F(model, c + h) - kirchhoff_F(model, c - h)) / (2 * h)
    assert slope == pytest.approx(eval_D(model, c), rel=1e-6)


def test_compose_examples():
    d = taylor_compose_D(Constant(4.0), [1.0, 7.0, -2.0])
    np.testing.assert_array_equal(d, [4.0, 0.0, 0.0])
    a = [0.3, -1.2, 2.5]
    np.testing.assert_allclose(taylor_compose_D(PowerLaw(1.0, 1.0), a), a, rtol=1e-15)
    d = taylor_compose_D(Exponential(1.0, 1.0), [0.0, 1.0, 0.0, 0.0, 0.0])
    np.testing.assert_allclose(d, [1 / math.factorial(n) for n in range(5)], rtol=1e-14)


def test_compose_exponential_finite_difference():
    model = Exponential(1.0, 1.0)
    d = taylor_compose_D(model, [0.0, 1.0])
    step = 1e-5
    fd = (eval_D(model, step) - eval_D(model, -step)) / (2 * step)
    assert abs(d[1] - fd) <= 1e-6


def _series_of(func, n, h=0.05):
    # low Taylor coefficients of a smooth function from a high-degree fit
    t = h * np.cos(np.linspace(0.0, math.pi, 81))
    return np.polynomial.polynomial.polyfit(t, func(t), 14)[: n + 1]


@pytest.mark.parametrize("model", [
    PowerLaw(1.0, 2.0),
    PowerLaw(1.0, 2.5),
    PowerLaw(2.0, 0.5),
    Exponential(0.5, 1.3),
    Tabulated(((0.0, 1.0), (1.0, 1.5), (2.0, 3.0))),
])
def test_compose_matches_direct_expansion(model):
    a = [1.1, 0.4, -0.3]
    if model.max_order is None:
        a = a + [0.2, 0.1]
    d = taylor_compose_D(model, a)
    direct = _series_of(lambda t: model.D(np.polyval(a[::-1], t)), len(a) - 1)
    np.testing.assert_allclose(d, direct, rtol=1e-6, atol=1e-7)


def test_compose_elementwise_on_fields():
    rng = np.random.default_rng(42)
    model = PowerLaw(1.0, 1.5)
    a = [rng.uniform(0.5, 2.0, (3, 3, 3))] + [rng.normal(size=(3, 3, 3)) for _ in range(4)]
    d = taylor_compose_D(model, a)
    i = (1, 2, 0)
    d_point = taylor_compose_D(model, [x[i] for x in a])
    np.testing.assert_allclose([x[i] for x in d], d_point, rtol=1e-13)


def test_model_from_params(tmp_path):
    assert model_from_params({"kind": "powerlaw", "D0": 2, "m": 3}) == PowerLaw(2.0, 3.0)
    m = model_from_params({"kind": "exponential", "beta": 0.5, "c_ref": 0.1})
    assert m.c_ref == 0.1 and m.beta == 0.5
    table = tmp_path / "d.csv"
    table.write_text("c,D\n0,1\n1,2\n2,4\n")
    t = model_from_params({"kind": "tabulated", "table_file": str(table)})
    assert t.knots == ((0.0, 1.0), (1.0, 2.0), (2.0, 4.0))
    with pytest.raises(ValueError):
        model_from_params({"kind": "cubic"})
    table.write_text("conc,diff\n0,1\n1,2\n")
    with pytest.raises(ValueError):
        Tabulated.from_csv(table)


def test_tabulated_validation():
    with pytest.raises(ValueError):
        Tabulated(((0.0, 1.0),))
    with pytest.raises(ValueError):
        Tabulated(((0.0, 1.0), (0.0, 2.0)))
    with pytest.raises(ValueError):
        Tabulated(((0.0, 1.0), (1.0, -2.0)))
