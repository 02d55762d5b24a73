"""Command-line front end.  Every command writes deterministic JSON (or CSV for series)."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import arithmetic, gwgv, siegel
from .banana_coeffs import build_coeff_table, check_refactorization, resum_lambda
from .dt_engine import TruncationCaps, check_local_factorization, table_for, z_nano
from .errors import BananaError
from .models import ALLOWED_N, NanoModel
from .qforms import extract_cdisc, psi

THREADS_ENV = "BANANA_NANO_THREADS"
DEFAULT_ACTION_PRIMES = (103, 109, 127)  # all 1 mod 3, so the N = 9 generator is defined
DEFAULT_J_PRIMES = (101, 151, 211, 241, 271, 283, 293)
SUITES = ("coeffs", "dtgwgv", "gv", "local", "siegel", "tables", "eta", "ap", "j", "action")


# -- argument types ---------------------------------------------------------------------

def n_value(s: str) -> int:
    try:
        n = int(s)
    except ValueError:
        n = None
    if n not in ALLOWED_N:
        raise argparse.ArgumentTypeError("N must be one of 5,6,8,9")
    return n


def n_selector(s: str) -> tuple:
    return ALLOWED_N if s == "all" else (n_value(s),)


def positive(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        v = 0
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s!r}")
    return v


def int_list(s: str) -> tuple:
    try:
        return tuple(int(x) for x in s.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


# -- output --------------------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):  # numpy scalars
        return x.item()
    return x


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def series_csv(series) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(series.names) + ["coeff"])
    for e, c in sorted(series.items()):
        w.writerow([str(Fraction(x, v.denom)) for x, v in zip(e, series.vars)] + [str(c)])
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- verification suites --------------------------------------------------------------------

def suite_coeffs(G: int = 5, d_max: int = 12) -> dict:
    table = build_coeff_table(d_max, 16)
    below = [(a, m) for a in range(-6, -1) for m in range(-16, 17) if table.coeff(a, m)]
    refactor = check_refactorization(table)
    q_cap, y_cap = d_max // 4 + 2, d_max // 2 + 4
    two_way = []
    for g in range(0, G + 1):
        ext = extract_cdisc(psi(g, q_cap, y_cap), g)
        for d in range(-1, d_max + 1):
            a, b = resum_lambda(table, d, G)[g], ext.get(d, 0)
            if a != b:
                two_way.append({"g": g, "d": d, "resum": a, "extract": b})
    return {"a_below_minus1_nonzero": below, "refactorization_failures": refactor,
            "two_way_mismatches": two_way, "sign_convention": table.sign_convention,
            "ok": not (below or refactor or two_way)}


def _caps(args) -> TruncationCaps:
    return TruncationCaps.from_abcp(args.A, args.B, args.C, args.P)


def suite_dtgwgv(N: int, args) -> dict:
    model = NanoModel(N)
    caps = _caps(args)
    table = build_coeff_table(12, max(16, caps.p_cap))
    rep = gwgv.check_gw_dt(model, table, caps, args.G)
    return {**rep, "ok": not rep["mismatches"]}


def suite_gv(N: int, args) -> dict:
    model = NanoModel(N)
    caps = _caps(args)
    table = build_coeff_table(12, max(16, caps.p_cap))
    rep = gwgv.check_gv_dt(model, table, caps)
    cal = gwgv.calibrate_sign(model, caps)
    return {**rep, "calibration": cal, "ok": not rep["mismatches"] and cal["unique"] and rep["conifold_orientation_ok"]}


def suite_local(N: int, args) -> dict:
    model = NanoModel(N)
    caps = TruncationCaps(4, 2, 2, 2 * N)
    rep = check_local_factorization(model, table_for(model, caps), caps)
    return {**rep, "ok": not rep["mismatches"]}


def suite_siegel(N: int, args) -> dict:
    model = NanoModel(N)
    groups = siegel.check_groups(model, args.samples)
    swaps = [siegel.check_swap_symmetry(model, g, 2, 2, 6) for g in (2, 3)]
    return {"groups": groups, "swap": swaps, "ok": groups["ok"] and not any(s["mismatches"] for s in swaps)}


def suite_tables(N: int, args) -> dict:
    rep = gwgv.verify_divisor_tables(NanoModel(N))
    return {**rep, "ok": not rep["failures"]}


def suite_eta(N: int, args) -> dict:
    return arithmetic.eta_identities(NanoModel(N))


def suite_ap(N: int, args) -> dict:
    rep = arithmetic.verify_ap(NanoModel(N), args.pmax)
    return {**rep, "ok": not rep["mismatches"]}


def suite_j(N: int, args) -> dict:
    return arithmetic.j_pipeline(NanoModel(N), list(args.primes or DEFAULT_J_PRIMES))


def suite_action(N: int, args) -> dict:
    reps = [arithmetic.verify_group_action(NanoModel(N), p, args.trials) for p in (args.primes or DEFAULT_ACTION_PRIMES)]
    return {"reports": reps, "ok": all(r["ok"] for r in reps)}


PER_N = {"dtgwgv": suite_dtgwgv, "gv": suite_gv, "local": suite_local, "siegel": suite_siegel,
         "tables": suite_tables, "eta": suite_eta, "ap": suite_ap, "j": suite_j, "action": suite_action}


def _run_one(job):
    name, N, args = job
    t0 = time.perf_counter()
    try:
        rep = suite_coeffs() if name == "coeffs" else PER_N[name](N, args)
    except BananaError as exc:
        rep = {"ok": False, "error": f"{type(exc).__name__}: {exc}"}
    return name, N, rep, time.perf_counter() - t0


def run_suites(names, Ns, args) -> list:
    jobs = []
    for name in names:
        jobs.extend([(name, None, args)] if name == "coeffs" else [(name, N, args) for N in Ns])
    threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_run_one, jobs))
    return [_run_one(j) for j in jobs]


# -- commands --------------------------------------------------------------------------------

def cmd_dt(args) -> int:
    model = NanoModel(args.N)
    caps = TruncationCaps(args.pcap, args.qcap, args.Qcap, args.ycap)
    z = z_nano(model, table_for(model, caps), caps)
    emit(series_csv(z) if args.format == "csv" else dump_json(z.to_json()), args.out)
    return 0


def cmd_verify(args) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    results = run_suites(names, args.N, args)
    summary, failing = [], None
    for name, N, rep, dt in results:
        key = name if N is None else f"{name}/N={N}"
        summary.append({"check": key, "ok": bool(rep.get("ok")), "report": rep})
        print(f"{key:<16} {'PASS' if rep.get('ok') else 'FAIL'} {dt:8.2f}s", file=sys.stderr)
        if not rep.get("ok") and failing is None:
            failing = key
    if args.suite == "dtgwgv":
        prov = sorted({g for _, _, rep, _ in results for g in rep.get("provisional_genera", [])})
        if prov:
            print(f"provisional genera: {prov}", file=sys.stderr)
    emit(dump_json({"suite": args.suite, "N": list(args.N), "ok": failing is None,
                    "first_failure": failing, "checks": summary}), args.out)
    if failing:
        print(f"first failing report: {failing}", file=sys.stderr)
        return 1
    return 0


def cmd_gv(args) -> int:
    model = NanoModel(args.N)
    u, v, w = args.beta
    beta = gwgv.FiberClass(u, v, w)
    a = gwgv.fiber_norm(model, beta)
    table = gwgv.gv_table(max(1, int(a) if a.denominator == 1 else 1))
    n = gwgv.gv_invariant(model, beta, args.g, table)
    eff = gwgv.is_effective(model, beta)
    out = {"N": args.N, "beta": [u, v, w], "g": args.g, "a": a, "effective": eff,
           "epsilon": gwgv.epsilon(model, beta) if eff else None,
           "n_a": table.get(args.g, int(a)) if a.denominator == 1 and a >= -1 else 0, "n": n}
    emit(dump_json(out), args.out)
    return 0


def cmd_gw(args) -> int:
    model = NanoModel(args.N)
    y_cap = args.ycap or args.N * (args.qcap + args.Qcap + 1)
    F = gwgv.gw_potential(model, args.g, args.qcap, args.Qcap, y_cap, allow_provisional=args.g < 2)
    emit(series_csv(F) if args.format == "csv" else dump_json(F.to_json()), args.out)
    return 0


def cmd_cuspform(args) -> int:
    model = NanoModel(args.N)
    f = arithmetic.weight4_form(model, args.terms) if args.weight == 4 else arithmetic.weight2_form(model, args.terms)
    out = f.to_json()
    out["coeffs"] = out["coeffs"][1:]  # a_1 .. a_terms
    out["N"] = args.N
    emit(dump_json(out), args.out)
    return 0


def cmd_siegel(args) -> int:
    results = run_suites(("siegel",), args.N, args)
    ok = all(rep["ok"] for _, _, rep, _ in results)
    emit(dump_json({"ok": ok, "checks": [{"N": N, "report": rep} for _, N, rep, _ in results]}), args.out)
    return 0 if ok else 1


def cmd_arith(args) -> int:
    model = NanoModel(args.N)
    if args.action == "verify-ap":
        rep = arithmetic.verify_ap(model, args.pmax)
        rep["ok"] = not rep["mismatches"]
    elif args.action == "j":
        rep = arithmetic.j_pipeline(model, list(args.primes or DEFAULT_J_PRIMES))
    else:
        rep = arithmetic.verify_group_action(model, args.p, args.trials)
    emit(dump_json(rep), args.out)
    return 0 if rep["ok"] else 1


# -- parser ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="banana-nano", description="Curve counts and modular checks for banana nano-manifolds.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, allow_all=False):
        p.add_argument("--N", required=not allow_all, type=n_selector if allow_all else n_value,
                       default=ALLOWED_N if allow_all else None)
        p.add_argument("--out", default=None, help="output file (default stdout)")

    p = sub.add_parser("dt", aliases=["dt-expand"], help="expand Z_N on a truncation box")
    common(p)
    p.add_argument("--pcap", type=positive, default=8)
    p.add_argument("--qcap", type=positive, default=4)
    p.add_argument("--Qcap", type=positive, default=4)
    p.add_argument("--ycap", type=positive, default=12)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(fn=cmd_dt)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("suite", choices=("all",) + SUITES)
    common(p, allow_all=True)
    p.add_argument("--A", type=positive, default=3)
    p.add_argument("--B", type=positive, default=3)
    p.add_argument("--C", type=positive, default=9)
    p.add_argument("--P", type=positive, default=8)
    p.add_argument("--G", type=int, default=4)
    p.add_argument("--pmax", type=positive, default=1000)
    p.add_argument("--primes", type=int_list, default=None)
    p.add_argument("--samples", type=positive, default=1000)
    p.add_argument("--trials", type=positive, default=100)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("gv", help="one Gopakumar-Vafa invariant")
    common(p)
    p.add_argument("--beta", type=int_list, required=True, help="u,v,w")
    p.add_argument("--g", type=int, default=0)
    p.set_defaults(fn=cmd_gv)

    p = sub.add_parser("gw", help="genus-g potential as a series")
    common(p)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--qcap", type=positive, default=2)
    p.add_argument("--Qcap", type=positive, default=2)
    p.add_argument("--ycap", type=positive, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(fn=cmd_gw)

    p = sub.add_parser("cuspform", help="eta-product coefficients a_1..a_terms")
    common(p)
    p.add_argument("--terms", type=positive, default=50)
    p.add_argument("--weight", type=int, choices=(2, 4), default=4)
    p.set_defaults(fn=cmd_cuspform)

    p = sub.add_parser("siegel", help="group predicates and swap symmetry")
    p.add_argument("action", choices=("verify",))
    common(p, allow_all=True)
    p.add_argument("--samples", type=positive, default=1000)
    p.set_defaults(fn=cmd_siegel)

    p = sub.add_parser("arith", help="elliptic-layer arithmetic")
    p.add_argument("action", choices=("verify-ap", "j", "action"))
    common(p)
    p.add_argument("--pmax", type=positive, default=1000)
    p.add_argument("--primes", type=int_list, default=None)
    p.add_argument("--p", type=positive, default=103)
    p.add_argument("--trials", type=positive, default=100)
    p.set_defaults(fn=cmd_arith)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "gv" and len(args.beta) != 3:
        build_parser().error("--beta needs three integers u,v,w")
    try:
        return args.fn(args)
    except (BananaError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
