"""Classical q-series: Dedekind eta, Eisenstein series, weak Jacobi forms.

Jacobi forms live in two variables ``(q, y)``; their ``q^n y^t``
coefficient depends only on the discriminant ``4n - t^2``.  The
non-negative ``y`` branch is used for every rational function of ``y``
(``y/(1-y)^2 = sum k y^k``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, isqrt

import numpy as np

from .errors import FractionalLeadingExponent, InconsistentDiscriminant
from .series import MultiSeries, VarSpec


@lru_cache(maxsize=None)
def _bernoulli_table(n: int) -> tuple:
    # sum_{j=0}^{m} C(m+1, j) B_j = 0, B_0 = 1 (so B_1 = -1/2)
    B = [Fraction(1)]
    for m in range(1, n + 1):
        s = sum(comb(m + 1, j) * B[j] for j in range(m))
        B.append(-s / (m + 1))
    return tuple(B)


def bernoulli(n: int) -> Fraction:
    if n < 0:
        raise ValueError("n must be non-negative")
    return _bernoulli_table(n)[n]


def alpha(g: int) -> Fraction:
    """|B_{2g}| / (2g (2g-2)!)."""
    if g < 2:
        raise ValueError("alpha is defined for g >= 2")
    from math import factorial
    return abs(bernoulli(2 * g)) / (2 * g * factorial(2 * g - 2))


def sigma(k: int, n: int) -> int:
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


def q_vars(q_cap: int) -> tuple:
    return (VarSpec("q", 1, 0, q_cap),)


def qy_vars(q_cap: int, y_cap: int) -> tuple:
    return (VarSpec("q", 1, 0, q_cap), VarSpec("y", 1, -y_cap, y_cap))


def eta(q_cap: int) -> MultiSeries:
    """``q^{1/24} prod (1 - q^n)`` with exponents up to ``q^{q_cap + 1/24}``."""
    if q_cap < 1:
        raise ValueError("q_cap must be >= 1")
    coeffs = euler_product(q_cap)
    vars = (VarSpec("q", 24, 0, 24 * q_cap + 1),)
    return MultiSeries(vars, {(24 * n + 1,): int(c) for n, c in enumerate(coeffs) if c})


def euler_product(order: int, step: int = 1) -> list:
    """Coefficients of ``prod_{n>=1} (1 - q^{step n})`` up to ``q^order`` (pentagonal numbers)."""
    out = [0] * (order + 1)
    k = 0
    while True:
        hit = False
        for j in ((k, -k) if k else (0,)):
            e = step * j * (3 * j - 1) // 2
            if e <= order:
                out[e] += -1 if j % 2 else 1
                hit = True
        if not hit and k:
            break
        k += 1
    return out


def eisenstein(g: int, q_cap: int) -> MultiSeries:
    """Weight-2g Eisenstein series with constant term 1."""
    if g < 1:
        raise ValueError("g must be >= 1")
    k = 2 * g
    factor = -Fraction(2 * k) / bernoulli(k)
    terms = {(0,): 1}
    for n in range(1, q_cap + 1):
        terms[(n,)] = factor * sigma(k - 1, n)
    return MultiSeries(q_vars(q_cap), terms)


@dataclass(frozen=True)
class JacobiSeries:
    series: MultiSeries
    weight: int
    index: int = 1

    def coeff(self, n: int, t: int):
        return self.series.coeff((n, t))

    def jacobi_violations(self) -> list:
        """(n, t) pairs whose coefficient disagrees with another pair of equal discriminant."""
        q_cap = self.series.vars[0].max_exp
        y_cap = self.series.vars[1].max_exp
        seen = {}
        bad = []
        for n in range(q_cap + 1):
            for t in range(-y_cap, y_cap + 1):
                d = 4 * self.index * n - t * t
                c = self.series.coeff((n, t))
                if d < -self.index and c:
                    bad.append((n, t))
                if d in seen and seen[d] != c:
                    bad.append((n, t))
                seen.setdefault(d, c)
        return bad


@dataclass
class CoeffByDiscriminant:
    genus: int | None
    values: dict = field(default_factory=dict)

    def __getitem__(self, d: int):
        if d < -1:
            return 0
        return self.values[d]

    def get(self, d: int, default=None):
        if d < -1:
            return 0
        return self.values.get(d, default)

    def to_json(self) -> list:
        return [[d, Fraction(c).numerator, Fraction(c).denominator] for d, c in sorted(self.values.items())]


def _jacobi_prefactor_product(q_cap: int, y_cap: int) -> MultiSeries:
    """``prod (1 - y q^n)^2 (1 - q^n/y)^2 (1 - q^n)^{-4}`` on a window with |y| <= y_cap."""
    vars = qy_vars(q_cap, y_cap)
    out = MultiSeries.one(vars)
    for n in range(1, q_cap + 1):
        a = MultiSeries(vars, {(0, 0): 1, (n, 1): -1})
        b = MultiSeries(vars, {(0, 0): 1, (n, -1): -1})
        c = MultiSeries(vars, {(0, 0): 1, (n, 0): -1})
        out = out * a * a * b * b
        out = out * c.inverse().pow(4)
    return out


def _restrict_y(s: MultiSeries, q_cap: int, y_cap: int) -> MultiSeries:
    return s.restrict(qy_vars(q_cap, y_cap))


def phi_neg2_1(q_cap: int, y_cap: int) -> JacobiSeries:
    """The weak Jacobi form of weight -2 and index 1 as an explicit product."""
    inner = q_cap + 2  # every term of the product has |t| <= n + 1
    ywin = max(y_cap, inner)
    prod = _jacobi_prefactor_product(q_cap, ywin)
    pre = MultiSeries(qy_vars(q_cap, ywin), {(0, 1): 1, (0, 0): -2, (0, -1): 1})
    return JacobiSeries(_restrict_y(pre * prod, q_cap, y_cap), -2, 1)


def weierstrass_p(q_cap: int, y_cap: int) -> MultiSeries:
    """``1/12 + y/(1-y)^2 + sum_n sum_{d|n} d (y^d - 2 + y^-d) q^n`` (non-negative y branch)."""
    terms = {(0, 0): Fraction(1, 12)}
    for k in range(1, y_cap + 1):
        terms[(0, k)] = k
    for n in range(1, q_cap + 1):
        for d in range(1, n + 1):
            if n % d:
                continue
            for t, c in ((d, d), (0, -2 * d), (-d, d)):
                if abs(t) <= y_cap:
                    terms[(n, t)] = terms.get((n, t), 0) + c
    return MultiSeries(qy_vars(q_cap, y_cap), terms)


def psi(g: int, q_cap: int, y_cap: int) -> JacobiSeries:
    """phi_{-2,1} times 1 (g=0), the Weierstrass function (g=1), alpha_g E_{2g} (g>1)."""
    if g < 0:
        raise ValueError("g must be >= 0")
    if g == 0:
        return phi_neg2_1(q_cap, y_cap)
    # the y/(1-y)^2 tail of wp meets the y-2+1/y prefactor; leave room for its edge terms
    ywin = y_cap + q_cap + 4
    phi = phi_neg2_1(q_cap, ywin).series
    if g == 1:
        other = weierstrass_p(q_cap, ywin)
    else:
        e = eisenstein(g, q_cap).scale(alpha(g))
        other = MultiSeries(qy_vars(q_cap, ywin), {(n, 0): c for (n,), c in e.items()})
    return JacobiSeries(_restrict_y(phi * other, q_cap, y_cap), 2 * g - 2, 1)


def extract_cdisc(f: JacobiSeries, genus: int | None = None) -> CoeffByDiscriminant:
    """Read ``c(4n - t^2)`` off every in-window pair, checking they agree."""
    values = {}
    for (n, t), c in sorted(f.series.items()):
        d = 4 * f.index * n - t * t
        if d < -f.index:
            raise InconsistentDiscriminant(f"nonzero coefficient {c} at q^{n} y^{t} with discriminant {d}")
    q_cap = f.series.vars[0].max_exp
    y_cap = f.series.vars[1].max_exp
    for n in range(q_cap + 1):
        for t in range(-y_cap, y_cap + 1):
            d = 4 * f.index * n - t * t
            if d < -f.index:
                continue
            c = f.series.coeff((n, t))
            if d in values:
                if values[d] != c:
                    raise InconsistentDiscriminant(
                        f"discriminant {d}: {values[d]} vs {c} at q^{n} y^{t}")
            else:
                values[d] = c
    if all(c == 0 for c in values.values()):
        values = {}
    else:
        values = {d: c for d, c in values.items()}
    return CoeffByDiscriminant(genus, values)


# -- eta products -------------------------------------------------------------------

@dataclass(frozen=True)
class CuspForm:
    """Integer q-series ``sum a_n q^n`` for ``n = 0..order``; ``coeffs[n] = a_n``."""

    coeffs: tuple
    weight: int
    level: int | None = None
    label: str = ""

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def to_series(self) -> MultiSeries:
        return MultiSeries(q_vars(self.order), {(n,): int(c) for n, c in enumerate(self.coeffs) if c})

    def to_json(self) -> dict:
        return {"label": self.label, "weight": self.weight, "level": self.level,
                "coeffs": [int(c) for c in self.coeffs]}


def eta_product(spec, order: int, weight: int | None = None, level: int | None = None,
                label: str = "") -> CuspForm:
    """``prod eta(q^k)^e`` for ``spec = [(k, e), ...]`` as integer coefficients up to ``q^order``."""
    spec = [(int(k), int(e)) for k, e in spec]
    if any(k < 1 or e < 1 for k, e in spec):
        raise ValueError("eta_product needs k >= 1 and e >= 1")
    lead = sum(k * e for k, e in spec)
    if lead % 24:
        raise FractionalLeadingExponent(f"leading exponent {lead}/24 is not an integer")
    shift = lead // 24
    if weight is None:
        weight = sum(e for _, e in spec) // 2
    body = order - shift
    a = np.zeros(max(body, 0) + 1, dtype=object)
    if body >= 0:
        a[0] = 1
        for k, e in spec:
            ep = np.array(euler_product(body, k), dtype=object)
            nz = [(i, int(c)) for i, c in enumerate(ep) if c]
            for _ in range(e):
                # sparse convolution with the pentagonal series
                b = np.zeros_like(a)
                for i, c in nz:
                    b[i:] += c * a[: len(a) - i]
                a = b
    coeffs = [0] * (order + 1)
    for i in range(max(body, 0) + 1):
        coeffs[i + shift] = int(a[i])
    return CuspForm(tuple(coeffs), weight, level, label)


def theta_spec(theta, scale: int = 1, power: int = 1) -> list:
    """Eta-product spec ``prod_{k in theta} eta(q^{scale k})^power`` with repeated k merged."""
    out = {}
    for k in theta:
        out[scale * k] = out.get(scale * k, 0) + power
    return sorted(out.items())
