"""Fiber-class DT partition functions: the local banana factor and the global product.

Global factors are ``(1 - p^m q^{l r} Q^{k s} y^{N t})^{-c(4rs - t^2, m)}`` for
``k`` in the singular-fiber tuple and ``l = N/k``.  Only ``r, s >= 0``,
``r + s + t >= 0`` contribute, and since ``c(a, .) = 0`` for ``a < -1`` the
``t`` range is finite: ``|t| <= isqrt(4rs + 1)``, and ``t in {0, 1}`` when
``r = s = 0`` (with ``m > 0`` at ``t = 0``).

Truncation.  ``p`` and ``y`` take both signs, so boxes in them are not
sound on their own.  Two gradings are non-negative on every factor:

* ``w = e_y + 2N (e_q + e_Q)``, which is ``N (t + 2(l r + k s)) > 0`` off the pure-p factors;
* ``G = e_p + kappa * w`` with ``kappa`` the largest ratio ``-m_min / w`` over the factors used.

Products are computed on the window ``e_q <= A, e_Q <= B, w <= W, G <= P + kappa W``
with ``W = C + 2N(A+B)``, which contains the requested box, and restricted at the end.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, comb, floor, isqrt

from .banana_coeffs import CoeffTable
from .errors import TableWindowExceeded
from .models import NanoModel
from .series import MultiSeries, VarSpec

__all__ = [
    "NanoModel", "TruncationCaps", "FactorType", "factor_types", "log_z_terms", "log_z",
    "z_nano", "z_banana_local", "z_nano_from_locals", "required_table_window",
    "table_for", "check_local_factorization",
]


@dataclass(frozen=True)
class TruncationCaps:
    """|e_p| <= p_cap, e_q <= q_cap, e_Q <= Q_cap, |e_y| <= y_cap."""

    p_cap: int
    q_cap: int
    Q_cap: int
    y_cap: int

    def __post_init__(self):
        if min(self.p_cap, self.q_cap, self.Q_cap, self.y_cap) < 1:
            raise ValueError("truncation caps must be positive")

    @classmethod
    def from_abcp(cls, A: int, B: int, C: int, P: int) -> "TruncationCaps":
        return cls(P, A, B, C)

    def in_box(self, ep: int, ey: int, eq: int, eQ: int) -> bool:
        return abs(ep) <= self.p_cap and 0 <= eq <= self.q_cap and 0 <= eQ <= self.Q_cap and abs(ey) <= self.y_cap


@dataclass(frozen=True)
class FactorType:
    """One ``(k, r, s, t)`` family; ``a = 4rs - t^2``."""

    k: int
    l: int
    r: int
    s: int
    t: int
    N: int

    @property
    def a(self) -> int:
        return 4 * self.r * self.s - self.t * self.t

    @property
    def monomial(self) -> tuple:
        """(e_y, e_q, e_Q) of ``X``."""
        return (self.N * self.t, self.l * self.r, self.k * self.s)

    @property
    def weight(self) -> int:
        ey, eq, eQ = self.monomial
        return ey + 2 * self.N * (eq + eQ)

    @property
    def is_pure_p(self) -> bool:
        return self.r == 0 and self.s == 0 and self.t == 0


def factor_types(model: NanoModel, q_cap: int, Q_cap: int, y_cap: int | None = None,
                 include_pure_p: bool = True) -> list:
    """All factor families whose monomial fits under the q/Q caps (and the |y| cap if given)."""
    N = model.N
    out = []
    for k in model.theta:
        l = model.cofactor(k)
        for r in range(q_cap // l + 1):
            for s in range(Q_cap // k + 1):
                if r == 0 and s == 0:
                    ts = (0, 1) if include_pure_p else (1,)
                else:
                    bound = isqrt(4 * r * s + 1)
                    ts = range(max(-bound, -(r + s)), bound + 1)
                for t in ts:
                    if y_cap is not None and abs(N * t) > y_cap:
                        continue
                    out.append(FactorType(k, l, r, s, t, N))
    return out


def required_table_window(model: NanoModel, caps: TruncationCaps) -> tuple:
    """(a_max, m_max) a table must cover for :func:`log_z` at ``caps``."""
    types = factor_types(model, caps.q_cap, caps.Q_cap)
    return max(f.a for f in types), caps.p_cap


def _m_range(table: CoeffTable, f: FactorType, m_lo: int, m_hi: int):
    if f.is_pure_p:
        m_lo = max(m_lo, 1)
    for m in range(m_lo, m_hi + 1):
        c = table.coeff(f.a, m)
        if c:
            yield m, c


def _n_max(m: int, ey: int, eq: int, eQ: int, caps: TruncationCaps) -> int:
    """Largest ``n`` with ``(p^m X)^n`` inside the box (the exponents scale linearly)."""
    bounds = []
    for e, cap in ((m, caps.p_cap), (ey, caps.y_cap), (eq, caps.q_cap), (eQ, caps.Q_cap)):
        if e:
            bounds.append(cap // abs(e))
    return min(bounds)


def log_z_terms(model: NanoModel, table: CoeffTable, caps: TruncationCaps) -> dict:
    """``log Z`` on the box as ``{(e_p, e_y, e_q, e_Q): coeff}``.

    Each factor contributes ``c * sum_n (p^m X)^n / n``; the sum of logs is
    exact termwise, so no window argument is needed.
    """
    P = caps.p_cap
    acc: dict = defaultdict(Fraction)
    for f in factor_types(model, caps.q_cap, caps.Q_cap, caps.y_cap):
        ey, eq, eQ = f.monomial
        for m, c in _m_range(table, f, -P, P):
            n_max = _n_max(m, ey, eq, eQ, caps)
            for n in range(1, n_max + 1):
                acc[(m * n, ey * n, eq * n, eQ * n)] += Fraction(c, n)
    return {e: v for e, v in acc.items() if v}


def box_vars(N: int, caps: TruncationCaps) -> tuple:
    return (
        VarSpec("p", 1, -caps.p_cap, caps.p_cap),
        VarSpec("y", 1, -caps.y_cap, caps.y_cap),
        VarSpec("q", 1, 0, caps.q_cap),
        VarSpec("Q", 1, 0, caps.Q_cap),
    )


def log_z(model: NanoModel, table: CoeffTable, caps: TruncationCaps) -> MultiSeries:
    return MultiSeries(box_vars(model.N, caps), log_z_terms(model, table, caps))


# -- graded window for products ------------------------------------------------------

@dataclass(frozen=True)
class _Window:
    N: int
    W: int
    kappa: Fraction
    p_lo: int
    p_hi: int
    caps: TruncationCaps

    @property
    def vars(self) -> tuple:
        c = self.caps
        return (
            VarSpec("p", 1, self.p_lo, self.p_hi),
            VarSpec("y", 1, -2 * self.N * (c.q_cap + c.Q_cap), self.W),
            VarSpec("q", 1, 0, c.q_cap),
            VarSpec("Q", 1, 0, c.Q_cap),
        )

    @property
    def cuts(self) -> tuple:
        N2 = 2 * self.N
        u, v = self.kappa.numerator, self.kappa.denominator
        return (
            ((0, 1, N2, N2), self.W),
            ((v, u, N2 * u, N2 * u), v * self.caps.p_cap + u * self.W),
        )

    @property
    def exp_grading(self) -> tuple:
        M = floor(self.kappa) + 1
        return (1, M, 2 * self.N * M, 2 * self.N * M)


def _window(model: NanoModel, table: CoeffTable, caps: TruncationCaps) -> _Window:
    N = model.N
    W = caps.y_cap + 2 * N * (caps.q_cap + caps.Q_cap)
    kappa = Fraction(0)
    for f in factor_types(model, caps.q_cap, caps.Q_cap):
        if f.is_pure_p or f.weight > W:
            continue
        lo = table.m_support(f.a)
        m_min = lo[0] if lo else 1
        if m_min < 0:
            kappa = max(kappa, Fraction(-m_min, f.weight))
    p_hi = caps.p_cap + ceil(kappa * W)
    p_lo = -floor(kappa * W)
    return _Window(N, W, kappa, p_lo, p_hi, caps)


def _factor_log_series(win: _Window, model: NanoModel, table: CoeffTable) -> MultiSeries:
    vars, cuts = win.vars, win.cuts
    probe = MultiSeries._raw(vars, cuts, {})
    acc: dict = defaultdict(Fraction)
    for f in factor_types(model, win.caps.q_cap, win.caps.Q_cap):
        ey, eq, eQ = f.monomial
        if f.weight > win.W:
            continue
        m_hi = win.p_hi
        if m_hi > table.m_max:
            raise TableWindowExceeded(f"need c({f.a}, m) up to m={m_hi}, table has m_max={table.m_max}")
        for m, c in _m_range(table, f, win.p_lo, m_hi):
            n = 1
            while True:
                e = (m * n, ey * n, eq * n, eQ * n)
                if not probe._inside(e):
                    break
                acc[e] += Fraction(c, n)
                n += 1
    return MultiSeries(vars, acc, cuts)


def z_nano(model: NanoModel, table: CoeffTable, caps: TruncationCaps) -> MultiSeries:
    """Truncated ``Z`` in ``(p, y, q, Q)`` on the box ``caps``; one graded exp of the summed logs."""
    win = _window(model, table, caps)
    logs = _factor_log_series(win, model, table)
    z = logs.exp(win.exp_grading)
    return z.restrict(box_vars(model.N, caps), ())


# -- local banana factor ------------------------------------------------------------------

def banana_norm(d1: int, d2: int, d3: int) -> int:
    return 2 * d1 * d2 + 2 * d2 * d3 + 2 * d3 * d1 - d1 * d1 - d2 * d2 - d3 * d3


def local_vars(D1: int, D2: int, D3: int, p_lo: int, p_hi: int) -> tuple:
    return (
        VarSpec("p", 1, p_lo, p_hi),
        VarSpec("Q1", 1, 0, D1),
        VarSpec("Q2", 1, 0, D2),
        VarSpec("Q3", 1, 0, D3),
    )


def _binomial_factor(vars, cuts, e: tuple, c: int) -> MultiSeries:
    """``(1 - x^e)^{-c}`` as an explicit binomial series on the window."""
    probe = MultiSeries._raw(vars, cuts, {})
    terms = {}
    j = 0
    while True:
        g = tuple(a * j for a in e)
        if not probe._inside(g):
            break
        # (1 - x)^{-c} = sum_j C(c + j - 1, j) x^j; a finite polynomial when c <= 0
        coeff = comb(c + j - 1, j) if c > 0 else (-1) ** j * comb(-c, j)
        if c <= 0 and j > -c:
            break
        if coeff:
            terms[g] = coeff
        j += 1
        if j > 0 and all(a == 0 for a in e):
            break
    return MultiSeries(vars, terms, cuts)


def z_banana_local(table: CoeffTable, D1: int, D2: int, D3: int, p_lo: int, p_hi: int,
                   cuts=()) -> MultiSeries:
    """``prod (1 - p^m Q1^d1 Q2^d2 Q3^d3)^{-c(d^2, m)}`` by direct factor multiplication.

    Every ``Q_i`` box is sound; a ``p`` range is sound only together with a
    non-negative grading in ``cuts`` that bounds ``p`` from below (callers
    used by :func:`z_nano_from_locals` supply it).
    """
    vars = local_vars(D1, D2, D3, p_lo, p_hi)
    probe = MultiSeries._raw(vars, tuple(cuts), {})
    out = MultiSeries.one(vars, cuts)
    for d1 in range(D1 + 1):
        for d2 in range(D2 + 1):
            for d3 in range(D3 + 1):
                a = banana_norm(d1, d2, d3)
                if a < -1:
                    continue
                zero = d1 == d2 == d3 == 0
                for m in range(max(p_lo, 1) if zero else p_lo, p_hi + 1):
                    e = (m, d1, d2, d3)
                    if not probe._inside(e):
                        continue
                    c = table.coeff(a, m)
                    if c:
                        out = out * _binomial_factor(vars, out.cuts, e, c)
    return out


def z_nano_from_locals(model: NanoModel, table: CoeffTable, caps: TruncationCaps) -> MultiSeries:
    """``prod_k`` of the local factor under ``Q1 -> q^l y^-N, Q2 -> Q^k y^-N, Q3 -> y^N``."""
    N = model.N
    win = _window(model, table, caps)
    u, v = win.kappa.numerator, win.kappa.denominator
    total = MultiSeries.one(win.vars, win.cuts)
    for k in model.theta:
        l = model.cofactor(k)
        D1, D2 = caps.q_cap // l, caps.Q_cap // k
        D3 = win.W // N
        # the global weight w in local exponents: N((2l-1) d1 + (2k-1) d2 + d3)
        wl = (0, N * (2 * l - 1), N * (2 * k - 1), N)
        cuts = ((wl, win.W), ((v,) + tuple(u * x for x in wl[1:]), v * caps.p_cap + u * win.W))
        local = z_banana_local(table, D1, D2, D3, win.p_lo, win.p_hi, cuts)
        image = {}
        for (ep, d1, d2, d3), c in local.items():
            g = (ep, N * (d3 - d1 - d2), l * d1, k * d2)
            image[g] = image.get(g, 0) + c
        total = total * MultiSeries(win.vars, image, win.cuts)
    return total.restrict(box_vars(N, caps), ())


def table_for(model: NanoModel, caps: TruncationCaps) -> CoeffTable:
    """A calibrated coefficient table large enough for ``caps``.

    The window's ``p`` range depends on the lowest ``m`` of each row, which the
    table size does not change, so one resize suffices.
    """
    from .banana_coeffs import build_coeff_table

    a_max, m_max = required_table_window(model, caps)
    a_max = max(a_max, 1)
    table = build_coeff_table(a_max, max(m_max, a_max + 3, 2))
    need = _window(model, table, caps).p_hi
    if need > table.m_max:
        table = build_coeff_table(a_max, need)
    return table


def check_local_factorization(model: NanoModel, table: CoeffTable, caps: TruncationCaps) -> dict:
    """Coefficientwise comparison of :func:`z_nano` with :func:`z_nano_from_locals`."""
    direct = z_nano(model, table, caps).terms()
    local = z_nano_from_locals(model, table, caps).terms()
    mismatches = [{"exponent": list(e), "direct": str(direct.get(e, 0)), "local": str(local.get(e, 0))}
                  for e in sorted(set(direct) | set(local)) if direct.get(e, 0) != local.get(e, 0)]
    return {"N": model.N, "caps": [caps.p_cap, caps.q_cap, caps.Q_cap, caps.y_cap],
            "terms": len(direct), "mismatches": mismatches}
