"""The coefficient table ``c(a, m)`` of the theta quotient and its resummation.

The quotient is

    sum_m q^{m^2} (-y)^m  /  ( sum_{m in Z+1/2} q^{2m^2} (-y)^m )^2 .

The half-integer powers ``(-y)^m`` are never evaluated: the half-integer
sum is built with the real surrogate sign ``(-1)^(m-1/2)`` on a lattice
with denominators 2 in ``q`` and ``y``, squared (which lands on integer
exponents) and multiplied by a free overall sign ``sign``.  Reading
``(-1)^(1/2)`` as ±i gives ``sign = -1`` either way; the value actually
used is fixed by calibrating against the resolved-conifold layer.

Writing the square as ``sign * q * (y^{1/2} - y^{-1/2})^2 * U^2`` with
``U = 1 + O(q^4)``, the finite table

    b(a, .) = [q^a]  numerator / (sign * q * U^2)

has finite support in ``m`` for each ``a``, and ``c(a, .)`` is ``b(a, .)``
times ``y/(1-y)^2 = sum_{k>=1} k y^k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, isqrt

from .errors import CalibrationFailure, TableWindowExceeded
from .series import MultiSeries, VarSpec


@dataclass
class CoeffTable:
    a_max: int
    m_max: int
    c: dict
    b: dict
    sign_convention: dict = field(default_factory=dict)

    @property
    def sign(self) -> int:
        return self.sign_convention["sign"]

    def coeff(self, a: int, m: int) -> int:
        """``c(a, m)``; zero for ``a < -1`` and raises outside the window."""
        if a < -1:
            return 0
        if a > self.a_max or abs(m) > self.m_max:
            raise TableWindowExceeded(f"c({a}, {m}) outside table window a<={self.a_max}, |m|<={self.m_max}")
        return self.c.get((a, m), 0)

    def b_row(self, a: int) -> dict:
        if a < -1:
            return {}
        if a > self.a_max:
            raise TableWindowExceeded(f"b({a}, .) outside table window a<={self.a_max}")
        return {m: v for (aa, m), v in self.b.items() if aa == a}

    def m_support(self, a: int) -> tuple:
        """Smallest ``m`` with ``c(a, m) != 0`` and the largest ``m`` of ``b(a, .)``."""
        row = self.b_row(a)
        if not row:
            return None
        return (min(row) + 1, max(row))

    def to_json(self) -> dict:
        return {
            "a_max": self.a_max,
            "m_max": self.m_max,
            "sign_convention": self.sign_convention,
            "c": [[a, m, v] for (a, m), v in sorted(self.c.items())],
            "b": [[a, m, v] for (a, m), v in sorted(self.b.items())],
        }


def _half_lattice(q_top: int, y_top: int) -> tuple:
    return (VarSpec("q", 2, 0, 2 * q_top), VarSpec("y", 2, -2 * y_top, 2 * y_top))


def theta_numerator(q_top: int, y_top: int) -> MultiSeries:
    """``sum_m q^{m^2} (-y)^m`` on the doubled lattice."""
    vars = _half_lattice(q_top, y_top)
    terms = {}
    for m in range(-isqrt(q_top), isqrt(q_top) + 1):
        terms[(2 * m * m, 2 * m)] = (-1) ** (m % 2)
    return MultiSeries(vars, terms)


def half_integer_sum(q_top: int, y_top: int) -> MultiSeries:
    """``sum_{m in Z+1/2} (-1)^(m-1/2) q^{2m^2} y^m`` (real surrogate for ``(-y)^m``)."""
    vars = _half_lattice(q_top, y_top)
    terms = {}
    n = 0
    while 2 * (n + 0.5) ** 2 <= q_top:
        for m2 in (2 * n + 1, -2 * n - 1):  # m2 = 2m
            sgn = (-1) ** (((m2 - 1) // 2) % 2)
            terms[(m2 * m2, m2)] = sgn  # q exponent 2m^2 = m2^2/2, scaled by 2
        n += 1
    return MultiSeries(vars, terms)


def _divide_by_y_kernel(layer: dict) -> dict:
    """Exact division of a Laurent polynomial in ``y`` by ``y - 2 + 1/y``."""
    if not layer:
        return {}
    lo, hi = min(layer), max(layer)
    # y - 2 + 1/y = y^{-1} (y - 1)^2: multiply by y^{-1}, divide by (y-1)^2
    poly = [layer.get(t, 0) for t in range(lo, hi + 1)]  # ascending powers from y^lo
    for _ in range(2):
        # synthetic division by (y - 1), descending order
        desc = poly[::-1]
        quot = []
        carry = 0
        for c in desc:
            carry = carry + c
            quot.append(carry)
        if quot[-1] != 0:
            raise CalibrationFailure("denominator layer not divisible by (y^{1/2}-y^{-1/2})^2")
        poly = quot[:-1][::-1]
    # remaining exponents: originally from lo, after /(y-1)^2 still start at lo, then times y
    return {lo + 1 + i: c for i, c in enumerate(poly) if c}


def _unit_squared(q_top: int, y_top: int) -> MultiSeries:
    """``U^2`` with ``S'^2 = q (y - 2 + 1/y) U^2`` on the integer lattice."""
    s = half_integer_sum(q_top + 1, y_top + 1)
    sq = s * s
    layers: dict = {}
    for (eq, ey), c in sq.items():
        if eq % 2 or ey % 2:
            raise CalibrationFailure("square of the half-integer sum left the integer lattice")
        layers.setdefault(eq // 2, {})[ey // 2] = c
    vars = (VarSpec("q", 1, 0, q_top), VarSpec("y", 1, -y_top, y_top))
    terms = {}
    for eq, layer in layers.items():
        if eq < 1:
            raise CalibrationFailure("denominator leads with q^0")
        for t, c in _divide_by_y_kernel(layer).items():
            terms[(eq - 1, t)] = c
    return MultiSeries(vars, terms)


def _b_table(a_max: int, sign: int) -> dict:
    q_top = a_max + 1
    y_top = a_max + 4
    vars = (VarSpec("q", 1, 0, q_top), VarSpec("y", 1, -y_top, y_top))
    num = theta_numerator(q_top, y_top)
    num_int = MultiSeries(vars, {(eq // 2, ey // 2): c for (eq, ey), c in num.items()})
    u2 = _unit_squared(q_top, y_top)
    if u2.constant_term() != 1:
        raise CalibrationFailure("unit part does not start with 1")
    layer = num_int * u2.inverse()
    b = {}
    for (eq, t), c in layer.items():
        a = eq - 1
        if a <= a_max:
            b[(a, t)] = sign * c
    return b


def _c_from_b(b: dict, a_max: int, m_max: int) -> dict:
    c = {}
    for a in range(-1, a_max + 1):
        row = {m: v for (aa, m), v in b.items() if aa == a}
        for m in range(-m_max, m_max + 1):
            v = sum(bv * (m - j) for j, bv in row.items() if j < m)
            if v:
                c[(a, m)] = v
    return c


def conifold_orientation_ok(table: CoeffTable) -> bool:
    """The ``a = -1`` layer gives ``prod (1 - p^m X)^m`` (one conifold curve, n^0 = 1)."""
    return all(table.coeff(-1, m) == (-m if m > 0 else 0) for m in range(-table.m_max, table.m_max + 1))


def build_coeff_table(a_max: int, m_max: int, sign: int | None = None) -> CoeffTable:
    """Tables ``c`` and ``b`` for ``-1 <= a <= a_max``, ``|m| <= m_max``.

    With ``sign=None`` the overall sign is calibrated: exactly one choice
    must pass :func:`conifold_orientation_ok`.
    """
    if a_max < 0 or m_max < 2:
        raise ValueError("need a_max >= 0 and m_max >= 2")
    if sign is None:
        passing = [s for s in (1, -1) if conifold_orientation_ok(build_coeff_table(a_max, m_max, s))]
        if len(passing) != 1:
            raise CalibrationFailure(f"sign calibration not unique: passing signs {passing}")
        table = build_coeff_table(a_max, m_max, passing[0])
        table.sign_convention["calibrated"] = True
        return table
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    b = _b_table(a_max, sign)
    for (a, m) in b:
        if abs(m) > a + 2:
            raise CalibrationFailure(f"b({a}, {m}) breaks the support bound |m| <= a + 2")
    c = _c_from_b(b, a_max, m_max)
    symmetric_c = all(c.get((a, m), 0) == c.get((a, -m), 0) for (a, m) in c)
    symmetric_b = all(b.get((a, m), 0) == b.get((a, -m), 0) for (a, m) in b)
    convention = {
        "sign": sign,
        "sign_from_i_squared": -1,
        "y_branch": "non-negative powers",
        "calibrated": False,
        "c_minus1": [c.get((-1, m), 0) for m in range(0, min(m_max, 6) + 1)],
        "c_symmetric_in_m": symmetric_c,
        "b_symmetric_in_m": symmetric_b,
    }
    return CoeffTable(a_max, m_max, c, b, convention)


def check_refactorization(table: CoeffTable) -> list:
    """Entries where ``b * y/(1-y)^2`` fails to reproduce ``c`` (empty when sound)."""
    bad = []
    for a in range(-1, table.a_max + 1):
        row = table.b_row(a)
        for m in range(-table.m_max, table.m_max + 1):
            # independent route: (1 - y)^2 c(a, .) = y * b(a, .) as Laurent polynomials
            lhs = table.coeff(a, m) - 2 * _c_or_extrapolate(table, a, m - 1) + _c_or_extrapolate(table, a, m - 2)
            if lhs != row.get(m - 1, 0):
                bad.append((a, m))
    return bad


def _c_or_extrapolate(table: CoeffTable, a: int, m: int) -> int:
    if m < -table.m_max:
        return 0  # c(a, m) vanishes below the b support, which lies inside the window
    return table.coeff(a, m)


# -- lambda resummation ---------------------------------------------------------------

def _lam_vars(top: int) -> tuple:
    return (VarSpec("lam", 1, 0, top),)


def sin_half_ratio(top: int) -> MultiSeries:
    """``sin(lam/2) / (lam/2)`` up to ``lam^top``."""
    terms = {}
    for k in range(0, top // 2 + 1):
        terms[(2 * k,)] = Fraction((-1) ** k, factorial(2 * k + 1) * 4 ** k)
    return MultiSeries(_lam_vars(top), terms)


def lambda_expand(row: dict, G: int) -> dict:
    """``[lam^{2g-2}]  sum_m row[m] e^{i m lam} / (e^{i lam/2} - e^{-i lam/2})^2`` for g <= G.

    The kernel is ``-1/(4 sin^2(lam/2)) = -lam^{-2} (sin(lam/2)/(lam/2))^{-2}``;
    only even powers of ``lam`` are requested, and those are real.
    """
    top = 2 * G
    numer = {}
    for j in range(0, top + 1, 2):
        s = sum(v * m ** j for m, v in row.items())
        if s:
            numer[(j,)] = Fraction((-1) ** (j // 2) * s, factorial(j))
    n = MultiSeries(_lam_vars(top), numer)
    kernel = sin_half_ratio(top).pow(-2)
    prod = n * kernel
    return {g: -prod.coeff((2 * g,)) for g in range(0, G + 1)}


def resum_lambda(table: CoeffTable, d: int, G: int) -> dict:
    """``g -> c_{2g-2}(d)`` from the finite ``b(d, .)`` row."""
    if d < -1:
        return {g: 0 for g in range(G + 1)}
    if d > table.a_max:
        raise TableWindowExceeded(f"resum_lambda({d}) outside table window a<={table.a_max}")
    return lambda_expand(table.b_row(d), G)
