"""Acceptance criteria 1-13, each at its stated caps with exact arithmetic.

Every test prints one ``criterion N: PASS/FAIL`` line (visible with or without ``-s``).
"""
import time
from fractions import Fraction

import pytest
import sympy

from banana_nano import arithmetic, gwgv, siegel
from banana_nano.banana_coeffs import build_coeff_table, check_refactorization, resum_lambda
from banana_nano.dt_engine import TruncationCaps, check_local_factorization, table_for
from banana_nano.models import ALLOWED_N, J_EXPECTED, NanoModel, pencil_model
from banana_nano.qforms import extract_cdisc, phi_neg2_1, psi

CAPS_ABCP = TruncationCaps.from_abcp(3, 3, 9, 8)
ACTION_PRIMES = (103, 109, 127)
J_PRIMES = list(sympy.primerange(5, 300))


@pytest.fixture
def report(capsys):
    def _report(n, ok, start, note=""):
        with capsys.disabled():
            extra = f" {note}" if note else ""
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - start:.2f}s){extra}")
        assert ok
    return _report


@pytest.fixture(scope="module")
def big_table():
    return build_coeff_table(12, 16)


def test_criterion_01_coefficient_table(report):
    t0 = time.perf_counter()
    table = build_coeff_table(12, 16)
    below = [(a, m) for a in range(-8, -1) for m in range(-16, 17) if table.coeff(a, m)]
    ok = not below and check_refactorization(table) == [] and time.perf_counter() - t0 < 10
    report(1, ok, t0)


def test_criterion_02_two_way(report, big_table):
    t0 = time.perf_counter()
    bad = []
    for g in range(0, 6):
        ext = extract_cdisc(psi(g, 5, 10), g)
        for d in range(-1, 13):
            if resum_lambda(big_table, d, 5)[g] != ext.get(d, 0):
                bad.append((g, d))
    report(2, not bad and time.perf_counter() - t0 < 30, t0, f"mismatches={bad}")


def test_criterion_03_jacobi(report):
    t0 = time.perf_counter()
    bad = list(phi_neg2_1(12, 14).jacobi_violations())
    for g in range(0, 6):
        bad += psi(g, 12, 14).jacobi_violations()
    report(3, not bad, t0)


def test_criterion_04_dt_gw(report, big_table):
    t0 = time.perf_counter()
    reps = [gwgv.check_gw_dt(NanoModel(N), big_table, CAPS_ABCP, 4) for N in ALLOWED_N]
    ok = all(not r["mismatches"] and r["comparisons"] > 0 for r in reps)
    report(4, ok and time.perf_counter() - t0 < 300, t0, f"comparisons={[r['comparisons'] for r in reps]}")


def test_criterion_05_gv(report, big_table):
    t0 = time.perf_counter()
    ok = True
    for N in ALLOWED_N:
        m = NanoModel(N)
        rep = gwgv.check_gv_dt(m, big_table, CAPS_ABCP)
        cal = gwgv.calibrate_sign(m, CAPS_ABCP)
        ok &= not rep["mismatches"] and rep["terms"] > 0 and rep["conifold_orientation_ok"] and cal["unique"]
    report(5, ok, t0)


def test_criterion_06_local_to_global(report):
    t0 = time.perf_counter()
    ok = True
    for N in ALLOWED_N:
        m = NanoModel(N)
        caps = TruncationCaps(4, 2, 2, 2 * N)
        rep = check_local_factorization(m, table_for(m, caps), caps)
        ok &= not rep["mismatches"] and rep["terms"] > 1
    report(6, ok, t0)


def test_criterion_07_swap(report):
    t0 = time.perf_counter()
    reps = [siegel.check_swap_symmetry(NanoModel(N), g, 2, 2, 6) for N in ALLOWED_N for g in (2, 3)]
    report(7, not any(r["mismatches"] for r in reps), t0)


def test_criterion_08_groups(report):
    t0 = time.perf_counter()
    reps = [siegel.check_groups(NanoModel(N), samples=1000) for N in ALLOWED_N]
    ok = all(r["ok"] and r["iota_squared_identity"] and r["iota_symplectic"] for r in reps)
    report(8, ok and time.perf_counter() - t0 < 30, t0)


def test_criterion_09_eta(report):
    t0 = time.perf_counter()
    reps = [arithmetic.eta_identities(NanoModel(N), order=2000, mult_bound=200) for N in ALLOWED_N]
    ok = all(r["ok"] and r["square_identity"] and r["a1"] == 1 and not r["multiplicativity_failures"]
             for r in reps)
    report(9, ok and time.perf_counter() - t0 < 10, t0)


def test_criterion_10_point_counts(report):
    t0 = time.perf_counter()
    reps = [arithmetic.verify_ap(NanoModel(N), 1000) for N in ALLOWED_N]
    labels = sorted(r["label"] for r in reps)
    ok = all(not r["mismatches"] and r["primes_checked"] > 150 for r in reps)
    ok &= labels == ["20.a1", "24.a3", "32.a3", "36.a3"]
    report(10, ok and time.perf_counter() - t0 < 60, t0)


def test_criterion_11_j(report):
    t0 = time.perf_counter()
    ok = True
    for N in ALLOWED_N:
        rep = arithmetic.j_pipeline(NanoModel(N), J_PRIMES)
        ok &= rep["ok"] and Fraction(rep["j"]) == J_EXPECTED[N] and NanoModel(N).curve.label in rep["match"]["matches"]
    report(11, ok and time.perf_counter() - t0 < 300, t0)


def test_criterion_12_actions(report):
    t0 = time.perf_counter()
    ok = True
    for N in ALLOWED_N:
        shape = pencil_model(N).shape
        for p in ACTION_PRIMES:
            rep = arithmetic.verify_group_action(NanoModel(N), p, trials=100)
            ok &= rep["ok"] and rep["trials"] == 100 and tuple(rep["shape"]) == shape
            ok &= not (rep["invariance_failures"] or rep["order_failures"] or rep["commute_failures"])
    report(12, ok, t0)


def test_criterion_13_divisor_tables(report):
    t0 = time.perf_counter()
    failures = [f for N in ALLOWED_N for f in gwgv.verify_divisor_tables(NanoModel(N))["failures"]]
    report(13, not failures and time.perf_counter() - t0 < 1, t0)
