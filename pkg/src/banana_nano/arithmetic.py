"""The elliptic layer over finite fields: point counts, a_p, singular fibers, j, group actions."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import numpy as np
import sympy
from sympy.ntheory.modular import crt

from .errors import BadReduction, DegenerateSample, ReconstructionFailure, SingularQuartic, WrongFiberCount
from .models import NanoModel, WeierstrassCurve, WEIERSTRASS
from .qforms import CuspForm, eta_product, theta_spec


# -- point counting -------------------------------------------------------------------

@lru_cache(maxsize=None)
def _chi_table(p: int) -> np.ndarray:
    """Quadratic character on ``0..p-1`` with ``chi(0) = 0``."""
    chi = -np.ones(p, dtype=np.int64)
    chi[0] = 0
    chi[np.unique((np.arange(1, p, dtype=np.int64) ** 2) % p)] = 1
    return chi


def count_points_ec(curve: WeierstrassCurve, p: int) -> int:
    """``#E(F_p)`` for ``y^2 = x^3 + a2 x^2 + a4 x + a6``, point at infinity included."""
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2 or curve.discriminant % p == 0:
        raise BadReduction(f"{curve.label} has bad reduction at {p}")
    x = np.arange(p, dtype=np.int64)
    rhs = (((x * x) % p * x) % p + curve.a2 * (x * x) % p + curve.a4 * x + curve.a6) % p
    n = 1 + p + int(_chi_table(p)[rhs].sum())
    a = p + 1 - n
    if a * a > 4 * p:
        raise AssertionError(f"Hasse bound fails at p={p}: a_p={a}")
    return n


def weight2_form(model: NanoModel, order: int) -> CuspForm:
    """``prod_{k in Theta} eta(q^{2k})``."""
    return eta_product(theta_spec(model.theta, 2), order, weight=2, label=f"f_E{model.N}")


def weight4_form(model: NanoModel, order: int) -> CuspForm:
    """``prod_{k in Theta} eta(q^k)^2``."""
    return eta_product(theta_spec(model.theta, 1, 2), order, weight=4, level=model.N, label=f"f_X{model.N}")


def good_primes(model: NanoModel, p_max: int) -> list:
    bad = 2 * model.N * abs(model.curve.discriminant)
    return [p for p in sympy.primerange(2, p_max) if bad % p]


def verify_ap(model: NanoModel, p_max: int) -> dict:
    """Compare eta-product coefficients with ``p + 1 - #E(F_p)`` for good ``p < p_max``."""
    curve = model.curve
    f = weight2_form(model, p_max)
    primes = good_primes(model, p_max)
    mismatches = []
    for p in primes:
        ap = p + 1 - count_points_ec(curve, p)
        if f[p] != ap:
            mismatches.append({"p": p, "eta": f[p], "count": ap})
    excluded = [p for p in sympy.primerange(2, p_max) if p not in set(primes)]
    return {"N": model.N, "label": curve.label, "p_max": p_max, "primes_checked": len(primes),
            "excluded": excluded, "mismatches": mismatches}


def eta_identities(model: NanoModel, order: int = 2000, mult_bound: int = 200) -> dict:
    """``f_E(q)^2 = f_X(q^2)``, ``a_1 = 1`` and multiplicativity of ``f_X``."""
    fe = weight2_form(model, order)
    fx = weight4_form(model, order)
    sq = np.convolve(np.array(fe.coeffs, dtype=object), np.array(fe.coeffs, dtype=object))[: order + 1]
    lifted = [0] * (order + 1)
    for n in range(0, order // 2 + 1):
        lifted[2 * n] = fx[n]
    square_ok = [int(c) for c in sq] == lifted
    bad_mult = [(m, n) for m in range(2, mult_bound + 1) for n in range(m + 1, mult_bound + 1)
                if gcd(m, n) == 1 and m * n <= order and fx[m * n] != fx[m] * fx[n]]
    return {"N": model.N, "order": order, "square_identity": square_ok, "a1": fx[1], "a1_E": fe[1],
            "multiplicativity_failures": bad_mult[:20], "ok": square_ok and fx[1] == 1 and fe[1] == 1 and not bad_mult}


# -- projective plane over F_p ---------------------------------------------------------

@lru_cache(maxsize=8)
def projective_points(p: int) -> np.ndarray:
    """All points of ``P^2(F_p)`` normalized with last nonzero coordinate 1, shape ``(p^2+p+1, 3)``."""
    a, b = np.meshgrid(np.arange(p, dtype=np.int64), np.arange(p, dtype=np.int64), indexing="ij")
    affine = np.stack([a.ravel(), b.ravel(), np.ones(p * p, dtype=np.int64)], axis=1)
    line = np.stack([np.arange(p, dtype=np.int64), np.ones(p, dtype=np.int64), np.zeros(p, dtype=np.int64)], axis=1)
    return np.concatenate([affine, line, np.array([[1, 0, 0]], dtype=np.int64)])


@lru_cache(maxsize=16)
def _pencil_values(N: int, p: int) -> tuple:
    """``G, H, grad G, grad H`` mod p on every point of ``P^2(F_p)``."""
    pts = projective_points(p)
    vals = NanoModel(N).pencil.eval_all(pts[:, 0], pts[:, 1], pts[:, 2])
    vals = [np.broadcast_to(np.asarray(v, dtype=np.int64), (len(pts),)) % p for v in vals]
    return vals[0], vals[1], np.stack(vals[2:5], axis=1), np.stack(vals[5:8], axis=1)


def _normalize(pt, p: int) -> tuple:
    pt = [c % p for c in pt]
    for c in reversed(pt):
        if c:
            inv = pow(c, -1, p)
            return tuple(x * inv % p for x in pt)
    return (0, 0, 0)


# -- singular fibers and j --------------------------------------------------------------------

def singular_values_mod_p(model: NanoModel, p: int) -> dict:
    """Finite ``lam`` in ``F_p`` whose member ``G - lam H`` is singular, and the check at infinity."""
    G, H, dG, dH = _pencil_values(model.N, p)
    cross = np.stack([dG[:, 1] * dH[:, 2] - dG[:, 2] * dH[:, 1],
                      dG[:, 2] * dH[:, 0] - dG[:, 0] * dH[:, 2],
                      dG[:, 0] * dH[:, 1] - dG[:, 1] * dH[:, 0]], axis=1) % p
    parallel = ~cross.any(axis=1)
    h_nonzero = dH.any(axis=1)
    idx = np.argmax(dH != 0, axis=1)  # first nonzero component of grad H
    rows = np.arange(len(G))
    inv = np.array([0] + [pow(r, -1, p) for r in range(1, p)], dtype=np.int64)
    lam = (dG[rows, idx] * inv[dH[rows, idx]]) % p
    on_member = (G - lam * H) % p == 0
    hit = parallel & h_nonzero & on_member
    both_zero = ~dG.any(axis=1) & ~h_nonzero & (G == 0) & (H == 0)
    if both_zero.any():
        raise WrongFiberCount(f"p={p}: a base point is singular on every member")
    inf_singular = bool((~h_nonzero & (H == 0)).any())
    return {"p": p, "finite": sorted(set(int(v) for v in lam[hit])), "infinity_singular": inf_singular}


def rational_reconstruction(a: int, m: int) -> Fraction:
    """``r/s = a mod m`` with ``|r|, |s| <= sqrt(m/2)``, via the half-way extended Euclid."""
    a %= m
    bound = isqrt(m // 2)
    r0, r1, s0, s1 = m, a, 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or gcd(r1, abs(s1)) != 1:
        raise ReconstructionFailure(f"no small rational for {a} mod {m}")
    return Fraction(r1, s1)


def _cubic_mod_p(roots: list, p: int) -> tuple:
    e1 = sum(roots) % p
    e2 = (roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2]) % p
    e3 = roots[0] * roots[1] * roots[2] % p
    return (-e1 % p, e2, -e3 % p)  # X^3 + c2 X^2 + c1 X + c0


@dataclass
class SingularFiberReport:
    N: int
    cubic: tuple  # (1, c2, c1, c0), descending
    used_primes: list
    skipped: list = field(default_factory=list)
    held_out: int | None = None
    held_out_ok: bool = False
    infinity_singular: bool = True

    def to_json(self) -> dict:
        return {"N": self.N, "cubic": [str(c) for c in self.cubic], "used_primes": self.used_primes,
                "skipped": self.skipped, "held_out": self.held_out, "held_out_ok": self.held_out_ok,
                "infinity_singular": self.infinity_singular}


def singular_lambdas(model: NanoModel, primes: list) -> SingularFiberReport:
    """The monic cubic whose roots are the finite singular ``lam``, reconstructed over Q.

    Primes with a count other than 3 are skipped and noted; the last usable
    prime is held out to check the reconstruction.
    """
    residues, skipped, inf_ok = [], [], True
    for p in primes:
        if p < 5:
            skipped.append({"p": p, "reason": "too small"})
            continue
        info = singular_values_mod_p(model, p)
        inf_ok &= info["infinity_singular"]
        if len(info["finite"]) != 3:
            skipped.append({"p": p, "reason": f"{len(info['finite'])} finite singular values"})
            continue
        residues.append((p, _cubic_mod_p(info["finite"], p)))
    if len(residues) < 2:
        raise ReconstructionFailure(f"N={model.N}: need at least two usable primes, got {len(residues)}")
    held_p, held = residues[-1]
    use = residues[:-1]
    moduli = [p for p, _ in use]
    M = 1
    for p in moduli:
        M *= p
    cubic = [Fraction(1)]
    for i in range(3):
        x, _ = crt(moduli, [r[i] for _, r in use])
        cubic.append(rational_reconstruction(int(x), M))
    ok = all(c.denominator % held_p and (c.numerator * pow(c.denominator, -1, held_p) - r) % held_p == 0
             for c, r in zip(cubic[1:], held))
    if not ok:
        raise ReconstructionFailure(f"N={model.N}: reconstruction fails at held-out prime {held_p}")
    return SingularFiberReport(model.N, tuple(cubic), moduli, skipped, held_p, ok, inf_ok)


def _cubic_invariants(c2, c1, c0) -> tuple:
    b2, b4, b6 = 4 * c2, 2 * c1, 4 * c0
    b8 = b2 * b6 / 4 - c1 * c1
    disc = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    c4 = b2 * b2 - 24 * b4
    return c4, disc


def legendre_j(lam: Fraction) -> Fraction:
    return Fraction(256) * (lam * lam - lam + 1) ** 3 / (lam * lam * (1 - lam) ** 2)


def j_invariant(cubic) -> dict:
    """j of ``y^2 = m(x)`` from ``c4^3 / Delta``; cross-checked by the Legendre form when m splits."""
    one, c2, c1, c0 = (Fraction(c) for c in cubic)
    if one != 1:
        raise ValueError("cubic must be monic")
    c4, disc = _cubic_invariants(c2, c1, c0)
    if disc == 0:
        raise SingularQuartic("the branch cubic has a repeated root")
    j = c4 ** 3 / disc
    X = sympy.Symbol("X")
    roots = [Fraction(int(r.p), int(r.q)) for r in
             sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in (one, c2, c1, c0)], X).ground_roots()]
    legendre = None
    if len(roots) == 3:
        p2, p3, p4 = sorted(roots)
        legendre = legendre_j((p3 - p2) / (p3 - p4))
    return {"j": j, "split": len(roots) == 3, "legendre_j": legendre,
            "legendre_agrees": None if legendre is None else legendre == j}


def match_curve(j: Fraction, curves=None) -> dict:
    """Labels of the tabulated Weierstrass models whose j equals ``j``."""
    if curves is None:
        curves = [WeierstrassCurve(label, *coeffs) for label, coeffs in WEIERSTRASS.values()]
    matches = [c.label for c in curves if c.j == j]
    return {"j": str(j), "matches": matches, "table_j": {c.label: str(c.j) for c in curves}}


def j_pipeline(model: NanoModel, primes: list) -> dict:
    rep = singular_lambdas(model, primes)
    jr = j_invariant(rep.cubic)
    mc = match_curve(jr["j"])
    ok = model.curve.label in mc["matches"] and rep.held_out_ok and rep.infinity_singular \
        and jr["legendre_agrees"] is not False
    return {"N": model.N, "singular": rep.to_json(), "j": str(jr["j"]), "split": jr["split"],
            "legendre_j": None if jr["legendre_j"] is None else str(jr["legendre_j"]),
            "match": mc, "ok": ok}


# -- group actions ---------------------------------------------------------------------------

def cube_root_of_unity(p: int) -> int:
    if p % 3 != 1:
        raise ValueError(f"F_{p} has no primitive cube root of unity")
    for g in range(2, p):
        w = pow(g, (p - 1) // 3, p)
        if w != 1:
            return w
    raise AssertionError("unreachable")


def _orbit_order(gen, pt, p: int, w: int, bound: int) -> int | None:
    start = _normalize(pt, p)
    cur = start
    for n in range(1, bound + 1):
        cur = _normalize(gen.apply_mod(cur, p, w), p)
        if cur == (0, 0, 0):
            return None
        if cur == start:
            return n
    return -1


def verify_group_action(model: NanoModel, p: int, trials: int = 100, seed: int = 0,
                        budget: int | None = None) -> dict:
    """Invariance, realized orders and commutation of the generators on random smooth points."""
    pencil = model.pencil
    w = cube_root_of_unity(p) if model.N == 9 else 0
    rng = random.Random(seed + p)
    pts = projective_points(p)
    G, H, dG, dH = _pencil_values(model.N, p)
    budget = 20 * trials if budget is None else budget
    gens = pencil.generators
    invariance_failures, order_failures, commute_failures = [], [], []
    resampled = 0
    done = 0
    orders: dict = {}
    while done < trials:
        if resampled > budget:
            raise DegenerateSample(f"N={model.N}, p={p}: resample budget exhausted")
        lam = rng.randrange(p)
        f = (G - lam * H) % p
        grad = (dG - lam * dH) % p
        smooth = np.flatnonzero((f == 0) & grad.any(axis=1))
        if len(smooth) == 0:
            resampled += 1
            continue
        P = tuple(int(c) for c in pts[rng.choice(smooth)])
        images = [_normalize(g.apply_mod(P, p, w), p) for g in gens]
        if any(im == (0, 0, 0) for im in images):
            resampled += 1
            continue
        realized = [_orbit_order(g, P, p, w, 2 * g.order) for g in gens]
        if any(r is None for r in realized):
            resampled += 1
            continue
        if len(gens) == 2:
            ab = _normalize(gens[0].apply_mod(images[1], p, w), p)
            ba = _normalize(gens[1].apply_mod(images[0], p, w), p)
            if ab == (0, 0, 0) or ba == (0, 0, 0):
                resampled += 1
                continue
            if ab != ba:
                commute_failures.append({"lam": lam, "point": P})
        for i, (g, im, r) in enumerate(zip(gens, images, realized)):
            vals = pencil.eval_all(*(np.int64(c) for c in im))
            if (int(vals[0]) - lam * int(vals[1])) % p:
                invariance_failures.append({"lam": lam, "point": P, "image": im})
            key = f"g{i + 1} (order {g.order})"
            orders.setdefault(key, {}).setdefault(r, 0)
            orders[key][r] += 1
            if r != g.order:
                order_failures.append({"lam": lam, "point": P, "claimed": g.order, "realized": r})
        done += 1
    return {
        "N": model.N, "p": p, "trials": trials, "resampled": resampled,
        "invariance_failures": invariance_failures, "order_failures": order_failures,
        "commute_failures": commute_failures,
        "realized_orders": {k: {str(r): n for r, n in sorted(v.items())} for k, v in sorted(orders.items())},
        "shape": list(pencil.shape),
        "ok": not (invariance_failures or order_failures or commute_failures),
    }
