from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banana_nano.banana_coeffs import (
    build_coeff_table, check_refactorization, conifold_orientation_ok, half_integer_sum, lambda_expand,
    resum_lambda, sin_half_ratio, theta_numerator,
)
from banana_nano.errors import TableWindowExceeded
from banana_nano.qforms import extract_cdisc, psi


@pytest.fixture(scope="module")
def table():
    return build_coeff_table(8, 12)


def test_below_minus_one_vanishes(table):
    assert all(table.coeff(a, m) == 0 for a in range(-5, -1) for m in range(-12, 13))


def test_b_minus1_support(table):
    assert table.b_row(-1) == {0: -1}


def test_low_rows(table):
    assert table.b_row(0) == {-1: 1, 1: 1}
    assert [table.coeff(-1, m) for m in range(0, 5)] == [0, -1, -2, -3, -4]


def test_symmetry_recorded_not_assumed(table):
    conv = table.sign_convention
    assert conv["b_symmetric_in_m"] is True
    assert conv["c_symmetric_in_m"] is False


def test_calibration_unique(table):
    assert table.sign == -1
    assert table.sign_convention["calibrated"] is True
    assert not conifold_orientation_ok(build_coeff_table(3, 6, sign=1))


def test_refactorization(table):
    assert check_refactorization(table) == []


def test_support_bound(table):
    for (a, m) in table.b:
        assert abs(m) <= a + 2


def test_window_errors(table):
    with pytest.raises(TableWindowExceeded):
        table.coeff(9, 0)
    with pytest.raises(TableWindowExceeded):
        table.coeff(0, 13)
    with pytest.raises(TableWindowExceeded):
        resum_lambda(table, 9, 2)


def test_bad_arguments():
    with pytest.raises(ValueError):
        build_coeff_table(-1, 4)
    with pytest.raises(ValueError):
        build_coeff_table(2, 4, sign=3)


def test_resum_minus_one_values(table):
    assert resum_lambda(table, -1, 4) == {0: 1, 1: Fraction(1, 12), 2: Fraction(1, 240),
                                         3: Fraction(1, 6048), 4: Fraction(1, 172800)}


def test_resum_zero_matches_psi2(table):
    assert resum_lambda(table, 0, 2)[2] == extract_cdisc(psi(2, 4, 6))[0]


def test_numerator_and_half_sum_shapes():
    num = theta_numerator(4, 3)
    assert num.coeff((0, 0)) == 1 and num.coeff((2, 2)) == -1 and num.coeff((2, -2)) == -1
    h = half_integer_sum(3, 2)
    # m = +-1/2 at q^{1/2}: scaled exponents (1, +-1)
    assert h.coeff((1, 1)) == 1 and h.coeff((1, -1)) == -1


def test_sin_half_ratio():
    s = sin_half_ratio(4)
    assert s.coeff((2,)) == Fraction(-1, 24)
    assert s.coeff((4,)) == Fraction(1, 1920)


def test_json_export(table):
    js = table.to_json()
    assert js["sign_convention"]["sign"] == -1
    assert [-1, 0, -1] in js["b"]


@settings(max_examples=40, deadline=None)
@given(st.integers(-1, 8), st.integers(0, 4))
def test_two_way_property(d, g):
    t = build_coeff_table(8, 12)
    assert resum_lambda(t, d, 4)[g] == extract_cdisc(psi(g, 4, 8), g).get(d, 0)


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.integers(-3, 3), st.integers(-5, 5), max_size=4))
def test_lambda_expand_reflection(row):
    # m -> -m conjugates the trig polynomial; only even powers of lam are read, and those are real
    reflected = {-k: v for k, v in row.items()}
    assert lambda_expand(row, 3) == lambda_expand(reflected, 3)
