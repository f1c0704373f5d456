import math

import numpy as np
import pytest

from lsuq import special_functions as sf
from lsuq.errors import DomainError, SingularityError, UnsupportedOrderError

from oracles import series_green2d, series_j, series_y


def test_j0_at_zero():
    assert sf.bessel_j(0, 0.0) == 1.0


def test_j1_at_zero():
    assert sf.bessel_j(1, 0.0) == 0.0


def test_j0_at_one():
    # frozen from the series oracle
    assert sf.bessel_j(0, 1.0) == pytest.approx(0.7651976866, abs=1e-10)
    assert sf.bessel_j(0, 1.0) == pytest.approx(float(series_j(0, 1.0)), abs=1e-12)


def test_y0_y1_at_one():
    assert sf.bessel_y(0, 1.0) == pytest.approx(0.0882569642, abs=1e-9)
    assert sf.bessel_y(1, 1.0) == pytest.approx(-0.7812128213, abs=1e-9)


def test_y0_log_singularity_sign():
    vals = [sf.bessel_y(0, x) for x in (1e-2, 1e-4, 1e-6)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < -5.0


def test_hankel1_values():
    h0 = sf.hankel1(0, 1.0)
    assert h0.real == pytest.approx(0.7651976866, abs=1e-10)
    assert h0.imag == pytest.approx(0.0882569642, abs=1e-9)
    h1 = sf.hankel1(1, 1.0)
    assert h1.real == pytest.approx(0.4400505857, abs=1e-10)
    assert h1.imag == pytest.approx(-0.7812128213, abs=1e-9)


def test_hankel1_asymptotic_magnitude():
    x = 40.0
    assert abs(sf.hankel1(0, x)) == pytest.approx(math.sqrt(2.0 / (math.pi * x)), rel=0.01)


def test_hankel1_order_cap():
    with pytest.raises(UnsupportedOrderError):
        sf.hankel1(2, 1.0)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 11, 23, 60])
@pytest.mark.parametrize("x", [1e-3, 0.5, 1.0, 3.0, 7.0, 11.9, 12.1, 25.0, 50.0])
def test_j_against_series_oracle(n, x):
    assert sf.bessel_j(n, x) == pytest.approx(float(series_j(n, x)), abs=1e-10)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 11])
@pytest.mark.parametrize("x", [1e-6, 1e-3, 0.5, 1.0, 3.0, 7.0, 11.9, 12.1, 25.0, 50.0])
def test_y_against_series_oracle(n, x):
    expected = float(series_y(n, x))
    assert sf.bessel_y(n, x) == pytest.approx(expected, abs=max(1e-9, 1e-12 * abs(expected)))


def test_high_order_against_series_oracle():
    # Miller recurrence path (n comparable to or above x)
    for n, x in [(40, 20.0), (100, 30.0), (150, 49.0), (200, 13.0)]:
        assert sf.bessel_j(n, x) == pytest.approx(float(series_j(n, x)), abs=1e-10)


def test_order_cap_and_domain_errors():
    with pytest.raises(UnsupportedOrderError):
        sf.bessel_j(201, 1.0)
    with pytest.raises(DomainError):
        sf.bessel_j(0, -1.0)
    with pytest.raises(DomainError):
        sf.bessel_y(0, 0.0)
    with pytest.raises(DomainError):
        sf.bessel_y(0, -2.0)


def test_wronskian_identity():
    for n in range(21):
        for x in (0.5, 1.0, 2.0, 5.0, 10.0):
            w = sf.bessel_j(n + 1, x) * sf.bessel_y(n, x) - sf.bessel_j(n, x) * sf.bessel_y(
                n + 1, x
            )
            assert w == pytest.approx(2.0 / (math.pi * x), abs=1e-9)


def test_recurrence_consistency():
    for n in range(1, 21):
        for x in (0.5, 1.0, 2.0, 5.0, 10.0):
            lhs = sf.bessel_j(n - 1, x) + sf.bessel_j(n + 1, x)
            assert lhs == pytest.approx(2.0 * n / x * sf.bessel_j(n, x), abs=1e-9)


def test_green2d_value():
    g = sf.green2d(1.0, 1.0)
    assert g.real == pytest.approx(-0.0220642411, abs=1e-10)
    assert g.imag == pytest.approx(0.1912994217, abs=1e-10)
    expected = series_green2d(1.0, 1.0)
    assert abs(g - expected) < 1e-12


def test_green2d_depends_on_product_only():
    assert sf.green2d(2.5, 0.8) == pytest.approx(sf.green2d(1.0, 2.0), abs=1e-14)


def test_green2d_log_coefficient():
    # Re G ~ -(1/2pi) ln r + O(1): fit the leading coefficient over 3 decades
    rs = np.array([1e-3, 1e-4, 1e-5])
    re = np.array([sf.green2d(1.0, r).real for r in rs])
    slope = np.polyfit(np.log(rs), re, 1)[0]
    assert slope == pytest.approx(-1.0 / (2.0 * math.pi), rel=1e-3)


def test_green2d_continuity_towards_zero():
    rs = np.geomspace(1.0, 1e-8, 200)
    vals = np.array([sf.green2d(1.0, r) for r in rs])
    assert np.all(np.isfinite(vals))
    # imaginary part tends monotonically to 1/4, no branch jumps
    jumps = np.abs(np.diff(vals.imag))
    assert jumps.max() < 0.05


def test_green2d_singularity_error():
    with pytest.raises(SingularityError):
        sf.green2d(1.0, 0.0)
    with pytest.raises(SingularityError):
        sf.green2d(1.0, -1.0)


def test_vectorized_matches_scalar():
    x = np.array([1e-4, 0.3, 1.0, 5.0, 11.99, 12.0, 12.01, 30.0, 50.0])
    np.testing.assert_allclose(sf.j0v(x), [sf.bessel_j(0, v) for v in x], atol=1e-14)
    np.testing.assert_allclose(sf.j1v(x), [sf.bessel_j(1, v) for v in x], atol=1e-14)
    np.testing.assert_allclose(sf.y0v(x), [sf.bessel_y(0, v) for v in x], atol=1e-14)
    np.testing.assert_allclose(sf.y1v(x), [sf.bessel_y(1, v) for v in x], atol=1e-14)
    g = sf.green2d_array(2.0, x)
    np.testing.assert_allclose(g, [sf.green2d(2.0, v) for v in x], atol=1e-14)


def test_crossover_is_seamless():
    # series and asymptotic branches agree near the switch point
    for x in (11.999999, 12.000001):
        assert sf.bessel_j(0, x) == pytest.approx(float(series_j(0, x)), abs=1e-11)
        # Y loses ~3 digits to series cancellation right at the switch point;
        # still far inside the 1e-9 contract.
        assert sf.bessel_y(0, x) == pytest.approx(float(series_y(0, x)), abs=1e-10)


def test_jn_table_matches_scalar():
    x = np.array([0.0, 0.3, 1.7, 8.0, 20.0, 45.0])
    table = sf.jn_table(30, x)
    for n in (0, 1, 7, 18, 30):
        np.testing.assert_allclose(
            table[n], [sf.bessel_j(n, v) for v in x], atol=1e-12
        )


def test_yn_table_matches_scalar():
    x = np.array([0.5, 1.7, 8.0, 20.0, 45.0])
    table = sf.yn_table(12, x)
    for n in (0, 1, 5, 12):
        np.testing.assert_allclose(
            table[n], [sf.bessel_y(n, v) for v in x], rtol=1e-10, atol=1e-12
        )
