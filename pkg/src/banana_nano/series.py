"""Truncated multivariate Laurent series with exact rational coefficients.

Every variable carries its own exponent scaling ``denom``: the stored
exponent ``e`` of a variable means the actual power ``e / denom``, so
``q^{1/24}`` or ``y^{1/2}`` are held exactly as integers.  A series only
keeps terms inside its window: per-variable bounds ``[min_exp, max_exp]``
(scaled) plus optional linear cuts ``sum(w_i * e_i) <= cap``.

Truncation is performed after each exact operation.  A product computed
this way agrees with the untruncated product on the window whenever every
window constraint is a non-negative grading on the operands (for instance
``min_exp == 0`` for a variable, or a cut whose functional is
non-negative on all stored exponents).  Callers that work with Laurent
variables choose windows wide enough for that to hold; see ``dt_engine``
for the graded windows used on the partition functions.
"""

from __future__ import annotations

import bisect
import heapq
import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import (
    ConstantTermPresent,
    DenomOverflow,
    NotAUnit,
    OutsideWindow,
    VarMismatch,
)

Rational = Union[int, Fraction]
Exponent = tuple  # tuple of scaled ints, one per variable


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


@dataclass(frozen=True)
class VarSpec:
    name: str
    denom: int = 1
    min_exp: int = 0
    max_exp: int = 0

    def __post_init__(self):
        if self.denom < 1:
            raise ValueError(f"denom must be >= 1, got {self.denom}")
        if self.min_exp > self.max_exp:
            raise ValueError(f"empty window for {self.name}: [{self.min_exp}, {self.max_exp}]")

    def scaled(self, power) -> int:
        """Scaled integer exponent of an actual (rational) power."""
        s = Fraction(power) * self.denom
        if s.denominator != 1:
            raise DenomOverflow(f"{self.name}^{power} not representable with denom {self.denom}")
        return s.numerator

    def with_window(self, min_exp: int, max_exp: int) -> "VarSpec":
        return VarSpec(self.name, self.denom, min_exp, max_exp)

    def to_list(self):
        return [self.name, self.denom, self.min_exp, self.max_exp]


def var(name: str, lo, hi, denom: int = 1) -> VarSpec:
    """VarSpec from actual (possibly fractional) exponent bounds."""
    v = VarSpec(name, denom, 0, 0)
    return VarSpec(name, denom, v.scaled(lo), v.scaled(hi))


class MultiSeries:
    """Immutable truncated Laurent series; see the module docstring."""

    __slots__ = ("vars", "cuts", "_terms", "_lo", "_hi")

    def __init__(self, vars: Sequence[VarSpec], terms: Mapping[Exponent, Rational] | None = None,
                 cuts: Iterable = ()):
        self.vars = tuple(vars)
        self.cuts = tuple((tuple(w), int(cap)) for w, cap in cuts)
        for w, _ in self.cuts:
            if len(w) != len(self.vars):
                raise VarMismatch("cut weight length differs from number of variables")
        self._lo = tuple(v.min_exp for v in self.vars)
        self._hi = tuple(v.max_exp for v in self.vars)
        out = {}
        if terms:
            n = len(self.vars)
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n:
                    raise VarMismatch(f"exponent {e} has wrong arity for {self.names}")
                if c and self._inside(e):
                    out[e] = _norm(c)
        self._terms = out

    # -- construction helpers -------------------------------------------------
    @classmethod
    def _raw(cls, vars, cuts, terms) -> "MultiSeries":
        s = cls.__new__(cls)
        s.vars = vars
        s.cuts = cuts
        s._lo = tuple(v.min_exp for v in vars)
        s._hi = tuple(v.max_exp for v in vars)
        s._terms = terms
        return s

    @classmethod
    def zero(cls, vars, cuts=()) -> "MultiSeries":
        return cls(vars, {}, cuts)

    @classmethod
    def constant(cls, vars, c: Rational = 1, cuts=()) -> "MultiSeries":
        return cls(vars, {(0,) * len(vars): c}, cuts)

    @classmethod
    def one(cls, vars, cuts=()) -> "MultiSeries":
        return cls.constant(vars, 1, cuts)

    @classmethod
    def monomial(cls, vars, powers: Mapping[str, Rational], coeff: Rational = 1, cuts=()) -> "MultiSeries":
        vars = tuple(vars)
        e = _exponent_from_powers(vars, powers)
        return cls(vars, {e: coeff}, cuts)

    def like(self, terms: Mapping[Exponent, Rational]) -> "MultiSeries":
        """A series on the same window as ``self``."""
        return MultiSeries(self.vars, terms, self.cuts)

    # -- basic queries --------------------------------------------------------
    @property
    def names(self) -> tuple:
        return tuple(v.name for v in self.vars)

    def _inside(self, e) -> bool:
        for x, lo, hi in zip(e, self._lo, self._hi):
            if x < lo or x > hi:
                return False
        for w, cap in self.cuts:
            if sum(a * b for a, b in zip(w, e)) > cap:
                return False
        return True

    def in_window(self, e: Exponent) -> bool:
        return len(e) == len(self.vars) and self._inside(tuple(e))

    def items(self) -> Iterator:
        return iter(self._terms.items())

    def terms(self) -> dict:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def exponent(self, powers) -> Exponent:
        if isinstance(powers, Mapping):
            return _exponent_from_powers(self.vars, powers)
        e = tuple(powers)
        if len(e) != len(self.vars):
            raise VarMismatch(f"exponent {e} has wrong arity for {self.names}")
        return e

    def coeff(self, powers) -> Rational:
        """Coefficient at an exponent given as scaled tuple or ``{name: power}``."""
        e = self.exponent(powers)
        if not self._inside(e):
            raise OutsideWindow(f"{e} outside window of {self.names}")
        return self._terms.get(e, 0)

    def constant_term(self) -> Rational:
        return self._terms.get((0,) * len(self.vars), 0)

    def same_window(self, other: "MultiSeries") -> bool:
        return self.vars == other.vars and self.cuts == other.cuts

    def _check(self, other: "MultiSeries"):
        if not isinstance(other, MultiSeries):
            raise TypeError(f"expected MultiSeries, got {type(other).__name__}")
        if not self.same_window(other):
            raise VarMismatch(f"variable specs differ: {self.vars}/{self.cuts} vs {other.vars}/{other.cuts}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return self.same_window(other) and self._terms == other._terms

    def __hash__(self):
        return hash((self.vars, self.cuts, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        if not self._terms:
            return "MultiSeries(0)"
        parts = []
        for e in sorted(self._terms)[:12]:
            mono = "*".join(
                f"{v.name}^{Fraction(x, v.denom)}" for v, x in zip(self.vars, e) if x
            )
            parts.append(f"{self._terms[e]}" + (f"*{mono}" if mono else ""))
        more = " + ..." if len(self._terms) > 12 else ""
        return "MultiSeries(" + " + ".join(parts) + more + ")"

    # -- ring operations --------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, MultiSeries):
            other = MultiSeries.constant(self.vars, other, self.cuts)
        self._check(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = _norm(s)
            else:
                out.pop(e, None)
        return MultiSeries._raw(self.vars, self.cuts, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiSeries._raw(self.vars, self.cuts, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiSeries):
            other = MultiSeries.constant(self.vars, other, self.cuts)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Rational) -> "MultiSeries":
        if not c:
            return MultiSeries._raw(self.vars, self.cuts, {})
        return MultiSeries._raw(self.vars, self.cuts, {e: _norm(v * c) for e, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiSeries):
            return self.scale(other)
        self._check(other)
        return MultiSeries._raw(self.vars, self.cuts, _mul_terms(self, self._terms, other._terms))

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        if isinstance(c, MultiSeries):
            return self * c.inverse()
        return self.scale(Fraction(1) / Fraction(c))

    def __pow__(self, e: int):
        return self.pow(e)

    def mul_monomial(self, e: Exponent, c: Rational = 1) -> "MultiSeries":
        out = {}
        for f, v in self._terms.items():
            g = tuple(a + b for a, b in zip(f, e))
            if self._inside(g):
                out[g] = _norm(v * c)
        return MultiSeries._raw(self.vars, self.cuts, out)

    def pow(self, e: int, pivot=None) -> "MultiSeries":
        if e < 0:
            return self.inverse(pivot).pow(-e)
        result = MultiSeries.one(self.vars, self.cuts)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def _power_sum(self, coeff_of_k) -> "MultiSeries":
        """``sum_{k>=1} coeff_of_k(k) * self^k`` for nilpotent ``self``."""
        if self.constant_term():
            raise ConstantTermPresent("series has a constant term")
        limit = 64 + 4 * sum(v.max_exp - v.min_exp for v in self.vars)
        total = {}
        power = self
        k = 1
        while not power.is_zero():
            if k > limit:
                raise NotAUnit("series is not nilpotent on this window")
            if (0,) * len(self.vars) in power._terms:
                raise NotAUnit("powers of the series return to the constant term")
            ck = coeff_of_k(k)
            if ck:
                for e, v in power._terms.items():
                    s = total.get(e, 0) + v * ck
                    if s:
                        total[e] = s
                    else:
                        total.pop(e, None)
            power = power * self
            k += 1
        return MultiSeries(self.vars, total, self.cuts)

    def inverse(self, pivot=None) -> "MultiSeries":
        """Inverse with respect to the monomial ``pivot`` (default: constant term).

        ``self = c * x^pivot * (1 - h)`` with ``h`` nilpotent on the window;
        the result is ``x^-pivot * sum h^k / c``.
        """
        zero = (0,) * len(self.vars)
        p = zero if pivot is None else self.exponent(pivot)
        c = self._terms.get(p, 0)
        if not c:
            raise NotAUnit(f"coefficient at pivot {p} is zero")
        # unit part lives on a window shifted by the pivot so that the final
        # shift by -pivot lands exactly on this window
        shifted = tuple(v.with_window(v.min_exp + pe, v.max_exp + pe) for v, pe in zip(self.vars, p))
        shifted_cuts = tuple((w, cap + sum(a * b for a, b in zip(w, p))) for w, cap in self.cuts)
        inv_c = Fraction(1) / Fraction(c)
        h = {}
        for e, v in self._terms.items():
            if e == p:
                continue
            h[tuple(a - b for a, b in zip(e, p))] = -v * inv_c
        hs = MultiSeries(shifted, h, shifted_cuts)
        unit_inv = hs._power_sum(lambda k: 1) + MultiSeries.one(shifted, shifted_cuts)
        out = {}
        for e, v in unit_inv._terms.items():
            g = tuple(a - b for a, b in zip(e, p))
            if self._inside(g):
                out[g] = _norm(v * inv_c)
        return MultiSeries._raw(self.vars, self.cuts, out)

    def log1p_neg(self, e: Rational) -> "MultiSeries":
        """``e * log(1 - self) = -e * sum_{n>=1} self^n / n``."""
        if self.constant_term():
            raise ConstantTermPresent("log(1 - x) needs x without constant term")
        if not e:
            return MultiSeries._raw(self.vars, self.cuts, {})
        if len(self._terms) == 1:
            (m, c), = self._terms.items()
            out = {}
            n = 1
            cur = m
            while self._inside(cur):
                out[cur] = _norm(Fraction(-e) * Fraction(c) ** n / n)
                n += 1
                cur = tuple(a * n for a in m)
                if n > 1 and cur == m:
                    break
            return MultiSeries._raw(self.vars, self.cuts, out)
        return self._power_sum(lambda n: Fraction(-e, n))

    def exp(self, grading: Sequence[int] | None = None) -> "MultiSeries":
        """Truncated exponential of a series without constant term.

        With ``grading`` (integer weights per variable, positive on every
        term of ``self``) the coefficients are produced by the recurrence
        ``d * f_d = sum_j j * x_j * f_{d-j}`` over graded pieces, which
        costs about one multiplication.
        """
        if self.constant_term():
            raise ConstantTermPresent("exp needs a series without constant term")
        one = MultiSeries.one(self.vars, self.cuts)
        if grading is None:
            return one + self._power_sum(lambda k: Fraction(1, factorial(k)))
        grading = tuple(grading)
        levels: dict[int, list] = {}
        for e, c in self._terms.items():
            d = sum(a * b for a, b in zip(grading, e))
            if d <= 0:
                raise ValueError(f"grading not positive on term {e}")
            levels.setdefault(d, []).append((e, c * d))
        for d in levels:
            levels[d].sort()
        zero = (0,) * len(self.vars)
        f_levels = {0: {zero: 1}}
        heap = list(levels)
        heapq.heapify(heap)
        seen = set(heap)
        inside = self._inside
        while heap:
            d = heapq.heappop(heap)
            acc = {}
            for j, xs in levels.items():
                fl = f_levels.get(d - j)
                if not fl:
                    continue
                for fe, fc in fl.items():
                    for xe, xc in xs:
                        g = tuple(a + b for a, b in zip(fe, xe))
                        if inside(g):
                            acc[g] = acc.get(g, 0) + fc * xc
            fd = {}
            for g, v in acc.items():
                if v:
                    fd[g] = _norm(Fraction(v) / d)
            if fd:
                f_levels[d] = fd
                for j in levels:
                    nd = d + j
                    if nd not in seen:
                        seen.add(nd)
                        heapq.heappush(heap, nd)
        out = {}
        for fl in f_levels.values():
            out.update(fl)
        return MultiSeries._raw(self.vars, self.cuts, out)

    # -- re-windowing and substitution -----------------------------------------
    def restrict(self, vars: Sequence[VarSpec] | None = None, cuts=None) -> "MultiSeries":
        """Same variables (names and denoms) on a new window."""
        vars = self.vars if vars is None else tuple(vars)
        if tuple((v.name, v.denom) for v in vars) != tuple((v.name, v.denom) for v in self.vars):
            raise VarMismatch("restrict keeps variable names and denominators")
        return MultiSeries(vars, self._terms, self.cuts if cuts is None else cuts)

    def reorder(self, target_vars: Sequence[VarSpec], target_cuts=()) -> "MultiSeries":
        """Move terms into ``target_vars`` by variable name (missing names must have exponent 0)."""
        return self.substitute_monomial(None, {}, target_vars, target_cuts)

    def substitute_monomial(self, var_name: str | None, image: Mapping[str, Rational],
                            target_vars: Sequence[VarSpec] | None = None, target_cuts=()) -> "MultiSeries":
        """Replace ``var_name`` by the monomial ``prod name^image[name]``.

        A term carrying ``var^a`` contributes ``image^a``; exponents are
        rational and must be representable in ``target_vars`` (default: the
        current variables).  Variables of ``self`` other than ``var_name``
        are matched to ``target_vars`` by name.
        """
        target = self.vars if target_vars is None else tuple(target_vars)
        tindex = {v.name: i for i, v in enumerate(target)}
        src = []
        sub_i = None
        for i, v in enumerate(self.vars):
            if v.name == var_name:
                sub_i = i
            else:
                src.append((i, v, tindex.get(v.name)))
        if var_name is not None and sub_i is None:
            raise VarMismatch(f"no variable {var_name!r} in {self.names}")
        img = []
        for name, power in image.items():
            if name not in tindex:
                raise VarMismatch(f"image variable {name!r} not in target")
            img.append((tindex[name], Fraction(power)))
        probe = MultiSeries._raw(target, tuple((tuple(w), int(c)) for w, c in target_cuts), {})
        out = {}
        n = len(target)
        for e, c in self._terms.items():
            new = [0] * n
            for i, v, ti in src:
                if e[i] == 0:
                    continue
                if ti is None:
                    raise VarMismatch(f"variable {v.name!r} missing from target")
                tv = target[ti]
                s = Fraction(e[i] * tv.denom, v.denom)
                if s.denominator != 1:
                    raise DenomOverflow(f"{v.name} exponent {Fraction(e[i], v.denom)} not representable")
                new[ti] += s.numerator
            if sub_i is not None and e[sub_i]:
                a = Fraction(e[sub_i], self.vars[sub_i].denom)
                for ti, power in img:
                    s = a * power * target[ti].denom
                    if s.denominator != 1:
                        raise DenomOverflow(
                            f"{var_name}^{a} -> {target[ti].name}^{a * power} not representable "
                            f"with denom {target[ti].denom}")
                    new[ti] += s.numerator
            g = tuple(new)
            if probe._inside(g):
                s = out.get(g, 0) + c
                if s:
                    out[g] = _norm(s)
                else:
                    out.pop(g, None)
        return MultiSeries._raw(target, probe.cuts, out)

    def map_terms(self, fn, target_vars=None, target_cuts=None) -> "MultiSeries":
        """Apply ``fn(exponent) -> exponent`` termwise (an injective lattice map)."""
        target = self.vars if target_vars is None else tuple(target_vars)
        cuts = self.cuts if target_cuts is None else target_cuts
        out = {}
        for e, c in self._terms.items():
            g = tuple(fn(e))
            out[g] = out.get(g, 0) + c
        return MultiSeries(target, out, cuts)

    # -- serialization ------------------------------------------------------------
    def to_json(self) -> dict:
        terms = []
        for e in sorted(self._terms):
            c = Fraction(self._terms[e])
            terms.append([list(e), c.numerator, c.denominator])
        return {
            "vars": [v.to_list() for v in self.vars],
            "cuts": [[list(w), cap] for w, cap in self.cuts],
            "terms": terms,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, data: Mapping) -> "MultiSeries":
        vars = [VarSpec(n, d, lo, hi) for n, d, lo, hi in data["vars"]]
        terms = {tuple(e): Fraction(num, den) for e, num, den in data["terms"]}
        return cls(vars, terms, [(w, cap) for w, cap in data.get("cuts", [])])


def _exponent_from_powers(vars, powers: Mapping[str, Rational]) -> Exponent:
    names = {v.name: i for i, v in enumerate(vars)}
    e = [0] * len(vars)
    for name, p in powers.items():
        if name not in names:
            raise VarMismatch(f"unknown variable {name!r}")
        i = names[name]
        e[i] = vars[i].scaled(p)
    return tuple(e)


def _mul_terms(series: MultiSeries, a: Mapping, b: Mapping) -> dict:
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    inside = series._inside
    hi0 = series._hi[0]
    bl = sorted(b.items())
    keys0 = [e[0] for e, _ in bl]
    out: dict = {}
    get = out.get
    for e1, c1 in a.items():
        stop = bisect.bisect_right(keys0, hi0 - e1[0])
        for idx in range(stop):
            e2, c2 = bl[idx]
            g = tuple(x + y for x, y in zip(e1, e2))
            if inside(g):
                out[g] = get(g, 0) + c1 * c2
    return {e: _norm(c) for e, c in out.items() if c}


def mul_all(factors: Iterable[MultiSeries]) -> MultiSeries:
    """Product of a non-empty iterable of series sharing one window."""
    it = iter(factors)
    result = next(it)
    for f in it:
        result = result * f
    return result
