"""Per-N constants: singular-fiber tuples, pencils, group generators, Weierstrass models.

Every polynomial is stored as a string in ``x, y, z`` (and ``w``, a
primitive cube root of unity, for one N=9 generator) so the data can be
reviewed and checksummed in one place.  ``POLY_CHECKSUM`` must be updated
deliberately whenever the strings change.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd

import sympy

ALLOWED_N = (5, 6, 8, 9)

# singular-fiber types I_k of the rational elliptic surface, as a multiset
THETA = {5: (5, 5, 1, 1), 6: (6, 3, 2, 1), 8: (4, 4, 2, 2), 9: (3, 3, 3, 3)}

# pencil mu*G - lam*H.  For N=5 the H member is yz(x-y) rather than xyz:
# with H = xyz the listed order-5 map does not preserve the pencil.
PENCILS = {
    5: ("x*(x - z)*(y - z)", "y*z*(x - y)"),
    6: ("(x + y + z)*(x*y + y*z + z*x)", "x*y*z"),
    8: ("x*(x**2 + z**2 + 2*z*y)", "z*(x**2 - y**2)"),
    9: ("x**3 + y**3 + z**3", "x*y*z"),
}

# (image triple, claimed order)
GENERATORS = {
    5: [(("y*(x - z)", "-y*z", "z*(x - y)"), 5)],
    6: [(("x*y", "y*z", "x*z"), 6)],
    8: [
        (("(x - y)*(x - z)**2*(x**2 + z*(2*y + z))",
          "(x - y)*(x - z)*(x**3 - x**2*z + x*z*(2*y + z) + z*(2*y**2 + 2*y*z + z**2))",
          "-(x + y)*(x**2 + z*(2*y + z))**2"), 4),
        (("x*(y + z)*(x**2 + y*z)**2*(x**2 + z*(2*y + z))",
          "(x**2 + y*z)*(x**6 + 3*x**4*y*z + y**3*z**3 + x**2*z*(y**3 + 6*y**2*z + 3*y*z**2 + z**3))",
          "-x**2*z*(y + z)**3*(x**2 + z*(2*y + z))"), 2),
    ],
    9: [(("y", "z", "x"), 3), (("x", "w*y", "w**2*z"), 3)],
}

GROUP_SHAPE = {5: (5,), 6: (6,), 8: (4, 2), 9: (3, 3)}

# y^2 = x^3 + a2 x^2 + a4 x + a6
WEIERSTRASS = {
    5: ("20.a1", (1, -41, -116)),
    6: ("24.a3", (-1, -24, -36)),
    8: ("32.a3", (0, -1, 0)),
    9: ("36.a3", (0, 0, -27)),
}

J_EXPECTED = {5: Fraction(488095744, 125), 6: Fraction(1556068, 81), 8: Fraction(1728), 9: Fraction(0)}


def poly_payload() -> str:
    return json.dumps({"pencils": PENCILS, "generators": GENERATORS}, sort_keys=True)


POLY_CHECKSUM = "39ee8ba575e1c83dca2a9fb5d82de00f62ad5d6bfb2499e52d7e13bc8f014111"


def poly_checksum() -> str:
    return hashlib.sha256(poly_payload().encode()).hexdigest()


X, Y, Z, W = sympy.symbols("x y z w")


def _parse(s: str) -> sympy.Expr:
    return sympy.sympify(s, locals={"x": X, "y": Y, "z": Z, "w": W})


@dataclass(frozen=True)
class WeierstrassCurve:
    label: str
    a2: int
    a4: int
    a6: int

    @property
    def discriminant(self) -> int:
        b2, b4, b6 = 4 * self.a2, 2 * self.a4, 4 * self.a6
        b8 = 4 * self.a2 * self.a6 - self.a4 ** 2  # a1 = a3 = 0
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def c4(self) -> int:
        b2, b4 = 4 * self.a2, 2 * self.a4
        return b2 * b2 - 24 * b4

    @property
    def c6(self) -> int:
        b2, b4, b6 = 4 * self.a2, 2 * self.a4, 4 * self.a6
        return -b2 ** 3 + 36 * b2 * b4 - 216 * b6

    @property
    def j(self) -> Fraction:
        return Fraction(self.c4 ** 3, self.discriminant)


@dataclass(frozen=True)
class Generator:
    images: tuple
    order: int

    @cached_property
    def exprs(self) -> tuple:
        return tuple(_parse(s) for s in self.images)

    @cached_property
    def _fn(self):
        return sympy.lambdify((X, Y, Z, W), self.exprs, modules=[{}, "math"])

    def apply_mod(self, pt, p: int, w: int = 0) -> tuple:
        x, y, z = (int(c) for c in pt)
        return tuple(int(c) % p for c in self._fn(x, y, z, w))


@dataclass(frozen=True)
class PencilModel:
    N: int
    G: str
    H: str
    generators: tuple
    shape: tuple

    @cached_property
    def G_expr(self) -> sympy.Expr:
        return _parse(self.G)

    @cached_property
    def H_expr(self) -> sympy.Expr:
        return _parse(self.H)

    def member(self, lam, mu=1) -> sympy.Expr:
        """``mu*G - lam*H``."""
        return sympy.expand(mu * self.G_expr - lam * self.H_expr)

    @cached_property
    def _gh(self):
        g, h = self.G_expr, self.H_expr
        exprs = [g, h] + [sympy.diff(g, v) for v in (X, Y, Z)] + [sympy.diff(h, v) for v in (X, Y, Z)]
        return sympy.lambdify((X, Y, Z), exprs, modules="numpy")

    def eval_all(self, x, y, z) -> list:
        """``[G, H, dG/dx, dG/dy, dG/dz, dH/dx, dH/dy, dH/dz]`` at integer (array) arguments."""
        return self._gh(x, y, z)


@dataclass(frozen=True)
class NanoModel:
    N: int
    theta: tuple = field(init=False)

    def __post_init__(self):
        if self.N not in ALLOWED_N:
            raise ValueError("N must be one of 5,6,8,9")
        object.__setattr__(self, "theta", THETA[self.N])

    @property
    def d(self) -> int:
        g = 0
        for k in self.theta:
            g = gcd(g, k)
        return g

    def cofactor(self, k: int) -> int:
        if k not in self.theta:
            raise ValueError(f"{k} is not in Theta_{self.N}")
        return self.N // k

    @property
    def pencil(self) -> PencilModel:
        return pencil_model(self.N)

    @property
    def curve(self) -> WeierstrassCurve:
        label, (a2, a4, a6) = WEIERSTRASS[self.N]
        return WeierstrassCurve(label, a2, a4, a6)


def pencil_model(N: int) -> PencilModel:
    if N not in ALLOWED_N:
        raise ValueError("N must be one of 5,6,8,9")
    G, H = PENCILS[N]
    gens = tuple(Generator(tuple(im), order) for im, order in GENERATORS[N])
    return _PENCIL_CACHE.setdefault(N, PencilModel(N, G, H, gens, GROUP_SHAPE[N]))


_PENCIL_CACHE: dict = {}


def all_models() -> list:
    return [NanoModel(N) for N in ALLOWED_N]
