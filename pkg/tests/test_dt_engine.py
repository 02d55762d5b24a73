from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banana_nano.banana_coeffs import build_coeff_table
from banana_nano.dt_engine import (
    TruncationCaps, banana_norm, box_vars, check_local_factorization, factor_types, table_for,
    z_banana_local, z_nano,
)
from banana_nano.errors import TableWindowExceeded
from banana_nano.models import ALLOWED_N, NanoModel
from banana_nano.series import MultiSeries

SMALL = {N: TruncationCaps(4, 2, 2, 2 * N) for N in ALLOWED_N}


@pytest.fixture(scope="module")
def table():
    return build_coeff_table(6, 12)


@pytest.fixture(scope="module")
def zs():
    return {N: z_nano(NanoModel(N), table_for(NanoModel(N), SMALL[N]), SMALL[N]) for N in ALLOWED_N}


@pytest.mark.parametrize("N", ALLOWED_N)
def test_model_invariants(N):
    m = NanoModel(N)
    assert sum(m.theta) == 12
    assert Counter(N // k for k in m.theta) == Counter(m.theta)
    assert m.d == {5: 1, 6: 1, 8: 2, 9: 3}[N]


def test_invalid_n():
    with pytest.raises(ValueError, match="N must be one of 5,6,8,9"):
        NanoModel(4)


def test_caps_positive():
    with pytest.raises(ValueError):
        TruncationCaps(0, 1, 1, 1)
    assert TruncationCaps.from_abcp(3, 2, 9, 8) == TruncationCaps(8, 3, 2, 9)


def test_local_pure_p_layer(table):
    loc = z_banana_local(table, 0, 0, 0, 0, 6)
    assert loc.coeff((1, 0, 0, 0)) == table.coeff(0, 1) == 2


def test_local_conifold_layer(table):
    loc = z_banana_local(table, 0, 0, 1, 0, 6)
    pure = z_banana_local(table, 0, 0, 0, 0, 6)
    # the Q3^1 p^m coefficient, divided out by the pure-p part, is the exponent c(-1, m) itself
    q3 = MultiSeries(pure.vars, {(ep, 0, 0, 0): c for (ep, _, _, d3), c in loc.items() if d3 == 1})
    layer = q3 * pure.inverse()
    for m in range(1, 7):
        assert layer.coeff((m, 0, 0, 0)) == table.coeff(-1, m) == -m


def test_local_symmetry():
    loc = z_banana_local(build_coeff_table(8, 12), 2, 2, 1, 0, 5)
    swapped = loc.map_terms(lambda e: (e[0], e[2], e[1], e[3]))
    assert swapped == loc


def test_banana_norm_examples():
    assert banana_norm(0, 0, 1) == -1
    assert banana_norm(1, 1, 1) == 3
    assert banana_norm(0, 0, 0) == 0


@pytest.mark.parametrize("N", ALLOWED_N)
def test_constant_term_and_integrality(zs, N):
    z = zs[N]
    assert z.constant_term() == 1
    assert all(int(c) == c for _, c in z.items())


@pytest.mark.parametrize("N", ALLOWED_N)
def test_local_to_global(N):
    m = NanoModel(N)
    rep = check_local_factorization(m, table_for(m, SMALL[N]), SMALL[N])
    assert rep["mismatches"] == []
    assert rep["terms"] > 1


@pytest.mark.parametrize("N", ALLOWED_N)
def test_degree_zero_part_is_fourth_power(zs, table, N):
    caps = SMALL[N]
    z = zs[N]
    vars = box_vars(N, caps)
    layer = MultiSeries(vars, {e: c for e, c in z.items() if e[2] == 0 and e[3] == 0})
    loc = z_banana_local(table, 0, 0, caps.y_cap // N, 0, caps.p_cap)
    one_family = MultiSeries(vars, {(ep, N * d3, 0, 0): c for (ep, _, _, d3), c in loc.items()})
    assert one_family.pow(4) == layer


@pytest.mark.parametrize("N", (6, 9))
def test_truncation_soundness(N):
    m = NanoModel(N)
    small, big = TruncationCaps(3, 1, 2, N), TruncationCaps(5, 2, 3, 2 * N)
    zs_ = z_nano(m, table_for(m, small), small)
    zb = z_nano(m, table_for(m, big), big)
    assert zb.restrict(box_vars(N, small), ()) == zs_


def test_table_too_small():
    m = NanoModel(6)
    caps = TruncationCaps(8, 2, 2, 12)
    with pytest.raises(TableWindowExceeded):
        z_nano(m, build_coeff_table(1, 4), caps)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(ALLOWED_N), st.integers(0, 5), st.integers(0, 5))
def test_factor_types_respect_bounds(N, A, B):
    for f in factor_types(NanoModel(N), A, B):
        assert f.a >= -1
        ey, eq, eQ = f.monomial
        assert eq <= A and eQ <= B
        assert f.r + f.s + f.t >= 0
        if f.r == f.s == 0:
            assert f.t in (0, 1)
        else:
            assert f.weight > 0
