from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from banana_nano.arithmetic import (
    count_points_ec, cube_root_of_unity, eta_identities, good_primes, j_invariant, j_pipeline, legendre_j,
    match_curve, rational_reconstruction, singular_lambdas, singular_values_mod_p, verify_ap,
    verify_group_action, weight2_form,
)
from banana_nano.errors import BadReduction, ReconstructionFailure, SingularQuartic
from banana_nano.models import ALLOWED_N, J_EXPECTED, NanoModel, WeierstrassCurve

CUBICS = {5: (1, 11, -1, 0), 6: (1, -10, 9, 0), 8: (1, 0, -1, 0), 9: (1, 0, 0, -27)}
PRIMES = list(sympy.primerange(5, 300))


def brute_count(curve, p):
    n = 1
    for x in range(p):
        rhs = (x ** 3 + curve.a2 * x * x + curve.a4 * x + curve.a6) % p
        n += sum(1 for y in range(p) if y * y % p == rhs)
    return n


def test_count_points_small_example():
    E = WeierstrassCurve("32.a3", 0, -1, 0)
    assert count_points_ec(E, 3) == 4
    assert count_points_ec(E, 5) == 8


def test_bad_reduction():
    E = NanoModel(6).curve
    with pytest.raises(BadReduction):
        count_points_ec(E, 2)
    with pytest.raises(BadReduction):
        count_points_ec(E, 3)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(ALLOWED_N), st.sampled_from(list(sympy.primerange(5, 120))))
def test_count_matches_brute_force(N, p):
    E = NanoModel(N).curve
    if E.discriminant % p == 0:
        return
    n = count_points_ec(E, p)
    assert n == brute_count(E, p)
    assert (p + 1 - n) ** 2 <= 4 * p


@pytest.mark.parametrize("N", ALLOWED_N)
def test_verify_ap_small(N):
    rep = verify_ap(NanoModel(N), 50)
    assert rep["mismatches"] == []
    assert rep["primes_checked"] == len(good_primes(NanoModel(N), 50))


def test_weight2_form_starts_at_q():
    f = weight2_form(NanoModel(9), 10)
    assert f[0] == 0 and f[1] == 1


@pytest.mark.parametrize("N", ALLOWED_N)
def test_eta_identities_small(N):
    assert eta_identities(NanoModel(N), order=300, mult_bound=60)["ok"]


@settings(max_examples=60, deadline=None)
@given(st.integers(-40, 40), st.integers(1, 40))
def test_rational_reconstruction_roundtrip(r, s):
    x = Fraction(r, s)
    m = 10007 * 10009
    a = x.numerator * pow(x.denominator, -1, m) % m
    assert rational_reconstruction(a, m) == x


def test_rational_reconstruction_failure():
    with pytest.raises(ReconstructionFailure):
        rational_reconstruction(71, 10007)


@pytest.mark.parametrize("N", ALLOWED_N)
def test_singular_cubic(N):
    rep = singular_lambdas(NanoModel(N), PRIMES[:12])
    assert rep.cubic == CUBICS[N]
    assert rep.held_out_ok and rep.infinity_singular


def test_singular_values_example():
    info = singular_values_mod_p(NanoModel(8), 13)
    assert info["finite"] == [0, 1, 12]


@pytest.mark.parametrize("N", ALLOWED_N)
def test_j_invariant(N):
    rep = j_invariant(CUBICS[N])
    assert rep["j"] == J_EXPECTED[N]
    if rep["split"]:
        assert rep["legendre_agrees"]


def test_legendre_and_singular_cubic():
    assert legendre_j(Fraction(-1)) == 1728
    with pytest.raises(SingularQuartic):
        j_invariant((1, -2, 1, 0))


def test_match_curve():
    assert match_curve(Fraction(1728))["matches"] == ["32.a3"]
    assert match_curve(Fraction(7))["matches"] == []


@pytest.mark.parametrize("N", ALLOWED_N)
def test_j_pipeline(N):
    assert j_pipeline(NanoModel(N), PRIMES[:12])["ok"]


@pytest.mark.parametrize("N", ALLOWED_N)
def test_group_action(N):
    p = 103 if N == 9 else 101
    rep = verify_group_action(NanoModel(N), p, trials=30)
    assert rep["ok"]
    assert not rep["invariance_failures"] and not rep["order_failures"] and not rep["commute_failures"]


def test_cube_root():
    w = cube_root_of_unity(7)
    assert w != 1 and pow(w, 3, 7) == 1
    with pytest.raises(ValueError):
        cube_root_of_unity(11)
