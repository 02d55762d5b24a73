"""Exact predicates for the discrete groups acting on the lifted potentials.

Matrices are 4x4 tuples of exact numbers acting on the Siegel half space in
the usual block form ``(A B; C D)`` with ``J = (0 I; -I 0)``.  The involution
needs ``sqrt(N)``, handled by :class:`QuadraticNumber`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .errors import IrrationalConjugate
from .gwgv import f_ban
from .models import NanoModel
from .series import MultiSeries, VarSpec


@dataclass(frozen=True)
class QuadraticNumber:
    """``a + b sqrt(N)``; when ``N`` is a square the ``b`` part is folded into ``a``."""

    a: Fraction
    b: Fraction
    N: int

    def __post_init__(self):
        a, b = Fraction(self.a), Fraction(self.b)
        r = isqrt(self.N)
        if r * r == self.N and b:
            a, b = a + b * r, Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def lift(cls, x, N: int) -> "QuadraticNumber":
        if isinstance(x, QuadraticNumber):
            return x
        return cls(Fraction(x), Fraction(0), N)

    def _other(self, o) -> "QuadraticNumber":
        o = QuadraticNumber.lift(o, self.N)
        if o.N != self.N:
            raise ValueError("mixing different quadratic fields")
        return o

    def __add__(self, o):
        o = self._other(o)
        return QuadraticNumber(self.a + o.a, self.b + o.b, self.N)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.N)

    def __sub__(self, o):
        return self + (-self._other(o))

    def __rsub__(self, o):
        return self._other(o) - self

    def __mul__(self, o):
        o = self._other(o)
        return QuadraticNumber(self.a * o.a + self.N * self.b * o.b, self.a * o.b + self.b * o.a, self.N)

    __rmul__ = __mul__

    def __eq__(self, o):
        if not isinstance(o, (QuadraticNumber, int, Fraction)):
            return NotImplemented
        o = self._other(o)
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b, self.N))

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __repr__(self):
        return f"{self.a}+{self.b}*sqrt({self.N})" if self.b else str(self.a)


# -- matrix helpers -------------------------------------------------------------------------

def mat(rows) -> tuple:
    return tuple(tuple(x if isinstance(x, QuadraticNumber) else Fraction(x) for x in row) for row in rows)


def identity(n: int = 4) -> tuple:
    return mat([[1 if i == j else 0 for j in range(n)] for i in range(n)])


J = mat([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])


def matmul(A, B) -> tuple:
    n, m, p = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = [0] * p
        for k in range(m):
            a = A[i][k]
            if a == 0:
                continue
            Bk = B[k]
            for j in range(p):
                if Bk[j] != 0:
                    row[j] = a * Bk[j] + row[j]
        out.append(tuple(row))
    return tuple(out)


def transpose(A) -> tuple:
    return tuple(zip(*A))


def _j_times(M) -> tuple:
    """``J M`` as a signed row permutation."""
    return (M[2], M[3], tuple(-x for x in M[0]), tuple(-x for x in M[1]))


def is_symplectic(M) -> bool:
    return matmul(transpose(M), _j_times(M)) == J


def sp_inverse(M) -> tuple:
    """``M^{-1} = -J M^T J`` for symplectic ``M``."""
    minus_J = tuple(tuple(-x for x in row) for row in J)
    return matmul(matmul(minus_J, transpose(M)), J)


def _in_ideal(x, gen: Fraction) -> bool:
    """``x in gen * Z`` for rational ``x``."""
    return (Fraction(x) / gen).denominator == 1


# -- the groups -------------------------------------------------------------------------------

def pn_pattern(model: NanoModel) -> tuple:
    N, d = model.N, model.d
    F = Fraction
    return (
        (F(1), F(N, d), F(1, d), F(1, N)),
        (F(1, d), F(1), F(1, N), F(1, N * d)),
        (F(N, d), F(N), F(1), F(1, d)),
        (F(N), F(N * N, d), F(N, d), F(1)),
    )


def lnk_pattern(model: NanoModel, k: int) -> tuple:
    """Entry ideals of ``g^{-1} Sp4(Z) g``: ``M_ij in (g_j / g_i) Z`` for ``g = diag(N, Nk, k, 1)``."""
    N = model.N
    g = (N, N * k, k, 1)
    return tuple(tuple(Fraction(g[j], g[i]) for j in range(4)) for i in range(4))


def _rational(M) -> bool:
    return all(not isinstance(x, QuadraticNumber) or x.is_rational for row in M for x in row)


def _as_fraction(x) -> Fraction:
    return x.a if isinstance(x, QuadraticNumber) else Fraction(x)


def _fits(M, pattern) -> bool:
    return all(_in_ideal(_as_fraction(M[i][j]), pattern[i][j]) for i in range(4) for j in range(4))


def in_PN(model: NanoModel, M) -> bool:
    if not _rational(M):
        return False
    M = mat([[_as_fraction(x) for x in row] for row in M])
    return is_symplectic(M) and _fits(M, pn_pattern(model))


def in_LNk(model: NanoModel, k: int, M) -> bool:
    """``g M g^{-1}`` integral and ``M`` symplectic (``g`` is a similitude, so these agree)."""
    if not _rational(M):
        return False
    M = mat([[_as_fraction(x) for x in row] for row in M])
    N = model.N
    g = (N, N * k, k, 1)
    conj = [[Fraction(g[i]) * M[i][j] / g[j] for j in range(4)] for i in range(4)]
    return is_symplectic(M) and all(x.denominator == 1 for row in conj for x in row)


def g_matrix(model: NanoModel, k: int) -> tuple:
    N = model.N
    return mat([[N, 0, 0, 0], [0, N * k, 0, 0], [0, 0, k, 0], [0, 0, 0, 1]])


def iota(model: NanoModel) -> tuple:
    N = model.N
    s = QuadraticNumber(0, 1, N)  # sqrt(N)
    si = QuadraticNumber(0, Fraction(1, N), N)  # 1/sqrt(N)
    z = QuadraticNumber(0, 0, N)
    return (
        (z, s, z, z),
        (si, z, z, z),
        (z, z, z, si),
        (z, z, s, z),
    )


def _lift(M, N: int) -> tuple:
    return tuple(tuple(QuadraticNumber.lift(x, N) for x in row) for row in M)


def _monomial_form(A) -> tuple:
    """``(perm, scale)`` with ``A[i][perm[i]] = scale[i]`` the only nonzero entries of each row."""
    perm, scale = [], []
    for row in A:
        nz = [j for j, x in enumerate(row) if x != 0]
        if len(nz) != 1:
            raise ValueError("not a monomial matrix")
        perm.append(nz[0])
        scale.append(row[nz[0]])
    return perm, scale


def conjugate(model: NanoModel, M) -> tuple:
    """``iota M iota^{-1}`` as a rational matrix; raises if a sqrt(N) part survives.

    ``iota`` is monomial and its own inverse, so entry ``(i, j)`` is
    ``s_i s'_j M[pi(i)][pi(j)]`` with the scalar products taken in Q(sqrt N).
    """
    i = iota(model)
    perm, scale = _monomial_form(i)
    inv_perm, inv_scale = _monomial_form(transpose(i))  # columns of iota^{-1} = iota
    out = []
    for r in range(4):
        row = []
        for c in range(4):
            factor = scale[r] * inv_scale[c]
            if not factor.is_rational:
                x = M[perm[r]][inv_perm[c]]
                if x != 0:
                    raise IrrationalConjugate(f"conjugate has irrational entry {factor} * {x}")
                row.append(Fraction(0))
                continue
            row.append(factor.a * _as_fraction(M[perm[r]][inv_perm[c]]))
        out.append(tuple(row))
    return tuple(out)


def conjugate_dense(model: NanoModel, M) -> tuple:
    """Same as :func:`conjugate` through full products in Q(sqrt N); used as a cross-check."""
    i = iota(model)
    C = _lift(matmul(matmul(i, _lift(M, model.N)), i), model.N)
    for row in C:
        for x in row:
            if not x.is_rational:
                raise IrrationalConjugate(f"conjugate has irrational entry {x}")
    return mat([[x.a for x in row] for row in C])


# -- sampling -----------------------------------------------------------------------------------

def _upper(B) -> tuple:
    return mat([[1, 0, B[0][0], B[0][1]], [0, 1, B[1][0], B[1][1]], [0, 0, 1, 0], [0, 0, 0, 1]])


def _lower(C) -> tuple:
    return mat([[1, 0, 0, 0], [0, 1, 0, 0], [C[0][0], C[0][1], 1, 0], [C[1][0], C[1][1], 0, 1]])


def _block(A) -> tuple:
    (a, b), (c, d) = A
    det = Fraction(a) * d - Fraction(b) * c
    inv_t = [[Fraction(d) / det, -Fraction(c) / det], [-Fraction(b) / det, Fraction(a) / det]]
    return mat([[a, b, 0, 0], [c, d, 0, 0], [0, 0, inv_t[0][0], inv_t[0][1]], [0, 0, inv_t[1][0], inv_t[1][1]]])


def pn_generator(model: NanoModel, rng: random.Random, spread: int = 2) -> tuple:
    """A random elementary matrix of ``P_N``."""
    N, d = model.N, model.d
    F = Fraction
    r = lambda: rng.randint(-spread, spread)
    kind = rng.randrange(5)
    if kind == 0:
        x = F(r(), N)
        return _upper([[F(r(), d), x], [x, F(r(), N * d)]])
    if kind == 1:
        x = N * r()
        return _lower([[F(N * r(), d), x], [x, F(N * N * r(), d)]])
    if kind == 2:
        return _block([[1, F(N * r(), d)], [0, 1]])
    if kind == 3:
        return _block([[1, 0], [F(r(), d), 1]])
    return _block([[-1, 0], [0, -1]]) if rng.random() < 0.5 else identity()


def perturbed_generator(model: NanoModel, rng: random.Random) -> tuple:
    """A symplectic elementary matrix with a denominator one step too wide."""
    N, d = model.N, model.d
    F = Fraction
    p = rng.choice([2, 3, 5, 7])
    kind = rng.randrange(3)
    if kind == 0:
        x = F(1, N * p)
        return _upper([[F(1, d), x], [x, F(rng.randint(-2, 2), N * d)]])
    if kind == 1:
        return _lower([[F(N, d * p), 0], [0, 0]])
    return _block([[1, 0], [F(1, d * p), 1]])


def sample_PN(model: NanoModel, rng: random.Random, length: int = 5) -> tuple:
    M = identity()
    for _ in range(length):
        M = matmul(M, pn_generator(model, rng))
    return M


def sample_candidate(model: NanoModel, rng: random.Random) -> tuple:
    """Members, perturbed members and non-symplectic matrices, roughly a third each."""
    u = rng.random()
    M = sample_PN(model, rng, rng.randint(1, 5))
    if u < 0.35:
        return M
    if u < 0.7:
        pos = rng.randint(0, 2)
        for _ in range(pos):
            M = matmul(M, pn_generator(model, rng))
        M = matmul(M, perturbed_generator(model, rng))
        return matmul(M, sample_PN(model, rng, 2))
    rows = [list(row) for row in M]
    i, j = rng.randrange(4), rng.randrange(4)
    rows[i][j] = rows[i][j] + rng.choice([1, model.N, Fraction(1, model.N)])
    return mat(rows)


def check_groups(model: NanoModel, samples: int = 1000, seed: int = 0) -> dict:
    """Intersection equivalence, conjugation closure and group closure on random samples."""
    rng = random.Random(seed)
    failures = []
    i = iota(model)
    I4 = _lift(identity(), model.N)
    iota_square = matmul(i, i) == I4
    iota_symp = matmul(matmul(_lift(transpose(i), model.N), _lift(J, model.N)), i) == _lift(J, model.N)
    members = 0
    for n in range(samples):
        M = sample_candidate(model, rng)
        a = in_PN(model, M)
        b = all(in_LNk(model, k, M) for k in model.theta)
        members += a
        if a != b:
            failures.append({"sample": n, "check": "P_N vs intersection", "in_PN": a, "in_L": b})
    for n in range(samples):
        M = sample_PN(model, rng)
        try:
            C = conjugate(model, M)
        except IrrationalConjugate as exc:
            failures.append({"sample": n, "check": "rational conjugate", "error": str(exc)})
            continue
        if not in_PN(model, C):
            failures.append({"sample": n, "check": "conjugation closure"})
        if n < 20 and conjugate_dense(model, M) != C:
            failures.append({"sample": n, "check": "dense conjugate agrees"})
    for n in range(max(1, samples // 10)):
        A, B = sample_PN(model, rng), sample_PN(model, rng)
        if not (in_PN(model, matmul(A, B)) and in_PN(model, sp_inverse(A))):
            failures.append({"sample": n, "check": "group closure"})
    return {
        "N": model.N,
        "samples": samples,
        "members_among_candidates": members,
        "iota_squared_identity": iota_square,
        "iota_symplectic": iota_symp,
        "failures": failures,
        "ok": iota_square and iota_symp and not failures,
    }


# -- swap symmetry of the lifted potential ---------------------------------------------------

def lifted_potential(model: NanoModel, g: int, X: int, y_cap: int) -> MultiSeries:
    """``sum_k F^ban_g(Q^{Nk}, q^{N/k}, y^N)`` on ``e_q <= X, e_Q <= N X, |e_y| <= y_cap``.

    ``q`` carries denominator ``N`` so the swapped lattice is representable.
    """
    N = model.N
    vars = (VarSpec("Q", 1, 0, N * X), VarSpec("q", N, 0, N * X), VarSpec("y", 1, -y_cap, y_cap))
    total = MultiSeries.zero(vars)
    for k in model.theta:
        l = model.cofactor(k)
        fb = f_ban(g, X // l, X // k, y_cap // N)
        total = total + fb.map_terms(lambda e: (N * k * e[0], N * l * e[1], N * e[2]), vars)
    return total


def check_swap_symmetry(model: NanoModel, g: int, q_cap: int, Q_cap: int, y_cap: int) -> dict:
    """Coefficients agree under ``(e_Q, e_q, e_y) -> (N e_q, e_Q / N, e_y)``."""
    N = model.N
    X = min(q_cap, Q_cap)
    F = lifted_potential(model, g, X, y_cap)
    mismatches = []
    # with q stored in units of 1/N the swap is a transposition of the scaled exponents
    for (eQ, eq_scaled, ey), c in F.items():
        target = F.coeff((eq_scaled, eQ, ey))
        if target != c:
            mismatches.append({"exponent": [eQ, str(Fraction(eq_scaled, N)), ey],
                               "coeff": str(c), "image": str(target)})
    return {"N": N, "g": g, "box": [X, N * X, y_cap], "terms": len(F), "mismatches": mismatches}
