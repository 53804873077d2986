"""Canonical normal forms of field expressions."""
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Union

from .algebra import AlgebraDef
from .expr import Deriv, FieldExpr, Gen, Nop, NormalForm, Sum, Unit
from .rewrite import Terms, add_into, rewriter_for

log = logging.getLogger(__name__)

INHOMOGENEOUS = "inhomogeneous"

Fieldlike = Union[FieldExpr, NormalForm, str]


def _terms(e: Fieldlike, alg: AlgebraDef) -> Terms:
    rw = rewriter_for(alg)
    if isinstance(e, str):
        from .parser import parse_expr
        e = parse_expr(e, alg)
    if isinstance(e, NormalForm):
        out: Terms = {}
        for mono, c in e:
            rw.parity(mono)
            add_into(out, rw.from_factors(mono), c)
        return out
    return _eval(e, alg, rw)


def _eval(e: FieldExpr, alg: AlgebraDef, rw) -> Terms:
    if isinstance(e, Unit):
        return {(): Fraction(1)}
    if isinstance(e, Gen):
        alg.generator(e.name)
        return {((e.name, 0),): Fraction(1)}
    if isinstance(e, Deriv):
        return rw.derive(_eval(e.child, alg, rw), e.order)
    if isinstance(e, Nop):
        return rw.nop_terms(_eval(e.left, alg, rw), _eval(e.right, alg, rw))
    if isinstance(e, Sum):
        out: Terms = {}
        for c, child in e.terms:
            add_into(out, _eval(child, alg, rw), c)
        return out
    raise TypeError(f"not a field expression: {e!r}")


def to_nf(terms: Terms, alg: AlgebraDef) -> NormalForm:
    return NormalForm(terms, unsorted=not alg.degree_reducing)


def normal_form(e: Fieldlike, alg: AlgebraDef) -> NormalForm:
    """Canonical form of ``e``.

    For algebras whose contraction table is not degree reducing the factor
    order is left as written and the result is flagged ``unsorted``.
    """
    if not alg.degree_reducing and not alg._cache.get("warned"):
        alg._cache["warned"] = True
        log.warning("algebra is not degree reducing; factors are left unsorted")
    if isinstance(e, NormalForm):
        memo = rewriter_for(alg).canonical
        hit = memo.get(e)
        if hit is None:
            hit = memo[e] = to_nf(_terms(e, alg), alg)
        return hit
    return to_nf(_terms(e, alg), alg)


def derive(e: Fieldlike, k: int, alg: AlgebraDef) -> NormalForm:
    """k-th ordinary derivative of ``e`` in normal form."""
    if k < 0:
        raise ValueError("derivative order must be non-negative")
    rw = rewriter_for(alg)
    return to_nf(rw.derive(_terms(e, alg), k), alg)


def parity_of(e: Fieldlike, alg: AlgebraDef):
    """0, 1, or :data:`INHOMOGENEOUS` when the monomials disagree."""
    rw = rewriter_for(alg)
    parities = {rw.parity(m) for m in _terms(e, alg)}
    if len(parities) > 1:
        return INHOMOGENEOUS
    return parities.pop() if parities else 0


def equals(a: Fieldlike, b: Fieldlike, alg: AlgebraDef) -> bool:
    return normal_form(a, alg) == normal_form(b, alg)


def weight_of_monomial(mono, alg: AlgebraDef) -> Fraction:
    return sum((alg.generator(g).weight + d for g, d in mono), Fraction(0))


def weights(nf: NormalForm, alg: AlgebraDef) -> set[Fraction]:
    return {weight_of_monomial(m, alg) for m, _ in nf}
