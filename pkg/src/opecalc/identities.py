"""Exact residuals of the Borcherds identity and its specialisations.

Every infinite sum is cut at an index computed from the supports of the
finitely many non-negative residue products involved, so a zero residual is
a proof for that instance rather than a numerical coincidence.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial

from .algebra import AlgebraDef
from .expr import NormalForm, OpecalcError, binomial
from .normal import Fieldlike, normal_form
from .rewrite import rewriter_for


class IdentityError(OpecalcError):
    pass


@dataclass(frozen=True)
class IdentityResidual:
    """LHS - RHS of one identity instance.

    ``terms`` holds every nonzero summand with the sign it enters the
    residual with, so two instances can be compared term by term.
    """

    name: str
    params: dict
    operands: tuple
    residual: NormalForm
    summands: tuple = field(default=(), repr=False)  # (coefficient, NormalForm) pairs

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()

    @property
    def terms(self) -> tuple:
        return tuple(nf * k for k, nf in self.summands)

    def term_multiset(self) -> Counter:
        return Counter(self.terms)


class _Ctx:
    def __init__(self, alg: AlgebraDef, *operands: Fieldlike):
        self.alg = alg
        self.rw = rewriter_for(alg)
        self.nfs = [normal_form(x, alg) for x in operands]
        self.parities = [self.rw.homogeneous_parity(x, role) for x, role in zip(self.nfs, ("first", "second", "third"))]
        self.summands: list = []
        self.total: dict = {}

    def prod(self, a: NormalForm, n: int, b: NormalForm) -> NormalForm:
        return self.rw.product_nf(a, n, b)

    def top(self, a: NormalForm, b: NormalForm) -> int:
        """Largest n >= 0 with a_(n) b != 0, or -1."""
        return max(self.rw.contract_nf(a, b), default=-1)

    def add(self, nf: NormalForm, coeff) -> None:
        if coeff and nf:
            self.summands.append((coeff, nf))
            total = self.total
            for mono, c in nf:
                value = total.get(mono, 0) + c * coeff
                if value:
                    total[mono] = value
                else:
                    del total[mono]

    def result(self, name: str, params: dict) -> IdentityResidual:
        return IdentityResidual(name, params, tuple(self.nfs), NormalForm(self.total),
                                tuple(self.summands))


def _pm(n: int) -> int:
    return -1 if n % 2 else 1


def _koszul(p: int, q: int) -> int:
    return -1 if p and q else 1


def borcherds_residual(a: Fieldlike, b: Fieldlike, c: Fieldlike, p: int, q: int, r: int,
                       alg: AlgebraDef) -> IdentityResidual:
    """sum_i binom(p,i) (a_(r+i) b)_(p+q-i) c
    - sum_i (-1)^i binom(r,i) [a_(p+r-i)(b_(q+i) c) - (-1)^r s b_(q+r-i)(a_(p+i) c)]

    with ``s`` the Koszul sign of ``a`` and ``b``.  Needs ``p >= 0`` or
    ``r >= 0``; otherwise the left side has infinitely many nonzero terms.
    """
    if p < 0 and r < 0:
        raise IdentityError("the Borcherds sums only truncate when p >= 0 or r >= 0")
    ctx = _Ctx(alg, a, b, c)
    A, B, C = ctx.nfs
    s = _koszul(ctx.parities[0], ctx.parities[1])
    if p >= 0:
        left_range = range(p + 1)
    else:
        left_range = range(max(ctx.top(A, B) - r + 1, 0))
    for i in left_range:
        ctx.add(ctx.prod(ctx.prod(A, r + i, B), p + q - i, C), binomial(p, i))
    if r >= 0:
        right_range = range(r + 1)
    else:
        right_range = range(max(ctx.top(B, C) - q, ctx.top(A, C) - p, -q - 1) + 1)
    for i in right_range:
        k = _pm(i) * binomial(r, i)
        ctx.add(ctx.prod(A, p + r - i, ctx.prod(B, q + i, C)), -k)
        ctx.add(ctx.prod(B, q + r - i, ctx.prod(A, p + i, C)), k * _pm(r) * s)
    return ctx.result("borcherds", {"p": p, "q": q, "r": r})


def ncwick_residual(a: Fieldlike, b: Fieldlike, c: Fieldlike, p: int, alg: AlgebraDef) -> IdentityResidual:
    """a_(p)(b_(-1)c) - (a_(p)b)_(-1)c - s b_(-1)(a_(p)c) - sum_{i<p} binom(p,i) (a_(i)b)_(p-i-1)c."""
    if p < 0:
        raise IdentityError("the non-commutative Wick formula needs p >= 0")
    ctx = _Ctx(alg, a, b, c)
    A, B, C = ctx.nfs
    s = _koszul(ctx.parities[0], ctx.parities[1])
    ctx.add(ctx.prod(A, p, ctx.prod(B, -1, C)), 1)
    ctx.add(ctx.prod(ctx.prod(A, p, B), -1, C), -1)
    ctx.add(ctx.prod(B, -1, ctx.prod(A, p, C)), -s)
    for i in range(p):
        ctx.add(ctx.prod(ctx.prod(A, i, B), p - i - 1, C), -binomial(p, i))
    return ctx.result("ncwick", {"p": p})


def newwick_residual(a: Fieldlike, b: Fieldlike, c: Fieldlike, q: int, alg: AlgebraDef) -> IdentityResidual:
    """(a_(-1)b)_(q)c - sum_{i>=0} [a_(-i-1)(b_(q+i)c) + s b_(q-i-1)(a_(i)c)]."""
    ctx = _Ctx(alg, a, b, c)
    A, B, C = ctx.nfs
    s = _koszul(ctx.parities[0], ctx.parities[1])
    ctx.add(ctx.prod(ctx.prod(A, -1, B), q, C), 1)
    for i in range(max(ctx.top(B, C) - q, ctx.top(A, C), -q - 1) + 1):
        ctx.add(ctx.prod(A, -i - 1, ctx.prod(B, q + i, C)), -1)
        ctx.add(ctx.prod(B, q - i - 1, ctx.prod(A, i, C)), -s)
    return ctx.result("newwick", {"q": q})


def skew_residual(a: Fieldlike, b: Fieldlike, m: int, alg: AlgebraDef) -> IdentityResidual:
    """b_(m)a - s sum_{i>=0} (-1)^(m+i+1) d^(i)(a_(m+i)b)."""
    ctx = _Ctx(alg, a, b)
    A, B = ctx.nfs
    s = _koszul(ctx.parities[0], ctx.parities[1])
    ctx.add(ctx.prod(B, m, A), 1)
    for i in range(max(ctx.top(A, B) - m, -m - 1) + 1):
        inner = ctx.prod(A, m + i, B)
        ctx.add(ctx.rw.derive_nf(inner, i), Fraction(-s * _pm(m + i + 1), factorial(i)))
    return ctx.result("skew", {"m": m})


def identity_pool(alg: AlgebraDef) -> list[NormalForm]:
    """Generators, their first derivatives and the nonzero degree-2 canonical
    monomials built from those factors."""
    rw = rewriter_for(alg)
    factors = sorted((g.name, d) for g in alg.generators for d in (0, 1))
    pool = [NormalForm.monomial((f,)) for f in factors]
    for f, h in combinations_with_replacement(factors, 2):
        nf = NormalForm(rw.insert(f, (h,)))
        if nf == NormalForm.monomial((f, h)):
            pool.append(nf)
    return pool
