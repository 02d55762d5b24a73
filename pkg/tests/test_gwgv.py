from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banana_nano.dt_engine import TruncationCaps, banana_norm, table_for
from banana_nano.errors import NotFiberIntegral
from banana_nano.gwgv import (
    BananaBasisClass, FiberClass, GVTable, calibrate_sign, cdisc, check_gv_dt, check_gw_dt, class_norm,
    constant_term, epsilon, f_ban, fiber_norm, gv_invariant, gv_table, gw_potential, is_effective,
    smooth_fiber_form, verify_divisor_tables, zeta_negative,
)
from banana_nano.models import ALLOWED_N, NanoModel
from banana_nano.qforms import bernoulli

SMALL = {N: TruncationCaps(4, 2, 2, 2 * N) for N in ALLOWED_N}


@pytest.fixture(scope="module")
def gv():
    return gv_table(6)


@pytest.mark.parametrize("N", ALLOWED_N)
def test_fiber_norm_banana_basis(N):
    m = NanoModel(N)
    for k in m.theta:
        assert fiber_norm(m, BananaBasisClass(k, 0, 0, 1).to_fiber(m)) == -1
        assert fiber_norm(m, BananaBasisClass(k, 1, 1, 1).to_fiber(m)) == 3
    assert fiber_norm(m, FiberClass(0, 0, 0)) == 0


def test_epsilon_examples():
    assert epsilon(NanoModel(5), FiberClass(0, 0, 5)) == 4
    assert epsilon(NanoModel(6), FiberClass(3, 0, 0)) == 2
    # multiset count: theta (5,5,1,1) and both k = 1 entries qualify
    assert epsilon(NanoModel(5), FiberClass(1, 0, 0)) == 2


def test_effective():
    m = NanoModel(6)
    assert not is_effective(m, FiberClass(0, 0, -6))
    assert is_effective(m, FiberClass(0, 0, 6))
    assert not is_effective(m, FiberClass(1, 0, 3))


def test_gv_table_low_layers(gv):
    assert gv.get(0, -1) == 1
    assert all(gv.get(g, -1) == 0 for g in range(1, 5))
    assert gv.get(0, -2) == 0
    assert all(a >= -1 for (_, a) in gv.values)


def test_gv_table_needs_layer():
    with pytest.raises(ValueError):
        gv_table(0)


def test_gv_invariant_examples(gv):
    for N in ALLOWED_N:
        assert gv_invariant(NanoModel(N), FiberClass(0, 0, -N), 0, gv) == 4
    with pytest.raises(NotFiberIntegral):
        gv_invariant(NanoModel(6), FiberClass(1, 1, 2), 0, gv)
    assert gv_invariant(NanoModel(5), FiberClass(1, 0, 0), 0, gv) == 2 * gv.get(0, 0)


@pytest.mark.parametrize("g", (2, 3))
def test_f_ban_basics(g):
    F = f_ban(g, 3, 3, 8)
    assert F.constant_term() == constant_term(g)
    assert F.coeff((0, 0, 1)) == cdisc(g, 0)[-1]
    swapped = F.map_terms(lambda e: (e[1], e[0], e[2]))
    assert swapped == F


def test_f_ban_provisional_guard():
    with pytest.raises(ValueError):
        f_ban(1, 2, 2, 4)
    assert f_ban(1, 2, 2, 4, allow_provisional=True).constant_term() == 0


def test_constant_term_is_bernoulli_ratio():
    for g in (2, 3, 4):
        assert constant_term(g) == cdisc(g, 0)[0] * -bernoulli(2 * g - 2) / (4 * g - 4)


def test_gw_potential_y_multiples():
    F = gw_potential(NanoModel(6), 2, 2, 2, 12)
    assert all(e[2] % 6 == 0 for e, _ in F.items())


def test_gw_potential_n9_is_four_copies():
    F = gw_potential(NanoModel(9), 2, 3, 3, 18)
    base = f_ban(2, 1, 1, 2).map_terms(lambda e: (3 * e[0], 3 * e[1], 9 * e[2]), F.vars)
    assert F == base.scale(4)


@pytest.mark.parametrize("N", ALLOWED_N)
def test_gw_matches_dt(N):
    m = NanoModel(N)
    rep = check_gw_dt(m, table_for(m, SMALL[N]), SMALL[N], 3)
    assert rep["mismatches"] == []
    assert rep["comparisons"] > 0


@pytest.mark.parametrize("N", ALLOWED_N)
def test_gv_matches_dt(N, gv):
    m = NanoModel(N)
    rep = check_gv_dt(m, table_for(m, SMALL[N]), SMALL[N])
    assert rep["mismatches"] == []
    assert rep["conifold_orientation_ok"]


def test_gv_check_catches_empty_table():
    m = NanoModel(6)
    rep = check_gv_dt(m, table_for(m, SMALL[6]), SMALL[6], GVTable(6, {}))
    assert rep["mismatches"]


def test_calibrate_sign_unique():
    rep = calibrate_sign(NanoModel(6), TruncationCaps(3, 1, 1, 6))
    assert rep["passing_signs"] == [-1] and rep["unique"]


@pytest.mark.parametrize("N", ALLOWED_N)
def test_divisor_tables(N):
    assert verify_divisor_tables(NanoModel(N))["failures"] == []


def test_smooth_fiber_form():
    assert smooth_fiber_form(6, quotient=True) == [[-72, 0, 0], [0, 0, 6], [0, 6, 0]]


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(ALLOWED_N), st.integers(0, 3), st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
def test_class_norm_identity(N, ki, d1, d2, d3):
    m = NanoModel(N)
    k = m.theta[ki]
    beta = BananaBasisClass(k, d1, d2, d3)
    assert 2 * class_norm(m, beta) == fiber_norm(m, beta.to_fiber(m)) == banana_norm(d1, d2, d3)


@pytest.mark.parametrize("k", range(1, 10))
def test_zeta_negative(k):
    assert zeta_negative(k) == -bernoulli(k + 1) / (k + 1)
