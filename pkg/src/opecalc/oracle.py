"""Reference OPEs for free-field algebras by summing over all cross pairings.

This module deliberately shares nothing with the rewriting engine except the
data types: it expands ``M(z) N(w)`` with the classical Wick theorem, Taylor
expands the surviving left factors around ``w`` and reorders the survivors
super-commutatively.  It is only valid when every generator contraction is a
multiple of the unit field.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .algebra import AlgebraDef
from .expr import Factor, Monomial, NormalForm, OpecalcError, SingularPart


class OracleError(OpecalcError):
    pass


def is_central(alg: AlgebraDef) -> bool:
    return all(not mono for entry in alg.contractions.values() for nf in entry.values() for mono, _ in nf)


def rising(m: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= m + j
    return out


def pole_derivative(a: int, b: int, m: int) -> tuple[int, int]:
    """``d_z^a d_w^b (z-w)^(-m) = coeff * (z-w)^(-m-a-b)``; returns ``(coeff, m+a+b)``."""
    return (-1) ** a * rising(m, a + b), m + a + b


@dataclass(frozen=True)
class PairingTerm:
    matching: frozenset  # {(left index, right index)}
    sign: int
    scalar: dict  # Laurent coefficients {exponent of (z-w): Fraction}
    survivors: tuple  # (left factors, right factors), original order


def _supersort(factors: list[Factor], parities: dict) -> tuple[int, Monomial]:
    """Sort super-commuting factors; sign 0 means a repeated fermion."""
    items = list(factors)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            if parities[items[j - 1][0]] and parities[items[j][0]]:
                sign = -sign
            items[j - 1], items[j] = items[j], items[j - 1]
            j -= 1
    for x, y in zip(items, items[1:]):
        if x == y and parities[x[0]]:
            return 0, ()
    return sign, tuple(items)


def _permutation_sign(order: list[int], odd: list[bool]) -> int:
    sign = 1
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if order[i] > order[j] and odd[order[i]] and odd[order[j]]:
                sign = -sign
    return sign


def _scalar_table(alg: AlgebraDef) -> dict:
    table = {}
    for pair, entry in alg.contractions.items():
        table[pair] = {pole: nf.scalar_value() for pole, nf in entry.items()}
    return table


def pairings(m: Monomial, n: Monomial, alg: AlgebraDef) -> list[PairingTerm]:
    """All nonempty matchings between factors of ``m`` (at z) and ``n`` (at w)."""
    if not is_central(alg):
        raise OracleError("the pairing oracle needs a central (free-field) algebra")
    parities = {g.name: g.parity for g in alg.generators}
    table = _scalar_table(alg)
    sequence = list(m) + list(n)
    odd = [bool(parities[g]) for g, _ in sequence]
    out = []

    def extend(i: int, used: tuple, pairs: list):
        if i == len(m):
            if not pairs:
                return
            order = []
            for li, rj in pairs:
                order += [li, len(m) + rj]
            paired_left = {li for li, _ in pairs}
            left_rest = [k for k in range(len(m)) if k not in paired_left]
            right_rest = [len(m) + k for k in range(len(n)) if k not in used]
            order += left_rest + right_rest
            scalar = {0: Fraction(1)}
            for li, rj in pairs:
                (g, a), (h, b) = m[li], n[rj]
                factor: dict = defaultdict(Fraction)
                for pole, k in table.get((g, h), {}).items():
                    coeff, order_ = pole_derivative(a, b, pole)
                    factor[-order_] += k * coeff
                product: dict = defaultdict(Fraction)
                for e1, c1 in scalar.items():
                    for e2, c2 in factor.items():
                        product[e1 + e2] += c1 * c2
                scalar = {e: c for e, c in product.items() if c}
            if scalar:
                out.append(PairingTerm(
                    frozenset(pairs), _permutation_sign(order, odd), scalar,
                    (tuple(m[k] for k in left_rest), tuple(n[k - len(m)] for k in right_rest))))
            return
        extend(i + 1, used, pairs)
        for j in range(len(n)):
            if j not in used and (m[i][0], n[j][0]) in table:
                extend(i + 1, used + (j,), pairs + [(i, j)])

    extend(0, (), [])
    return out


def _compositions(slots: int, total: int):
    if slots == 0:
        if total == 0:
            yield ()
        return
    for t in range(total + 1):
        for rest in _compositions(slots - 1, total - t):
            yield (t,) + rest


def _is_canonical(mono: Monomial, parities: dict) -> bool:
    sign, ordered = _supersort(list(mono), parities)
    return sign == 1 and ordered == tuple(mono)


def oracle_contract(m: Monomial, n: Monomial, alg: AlgebraDef) -> SingularPart:
    """Singular part of ``m(z) n(w)`` for canonical monomials of a central algebra."""
    parities = {g.name: g.parity for g in alg.generators}
    m, n = tuple(m), tuple(n)
    for mono in (m, n):
        for g, d in mono:
            if g not in parities or d < 0:
                raise OracleError(f"bad factor {(g, d)!r}")
        if not _is_canonical(mono, parities):
            raise OracleError(f"monomial {mono!r} is not canonical")
    poles: dict = defaultdict(lambda: defaultdict(Fraction))
    for term in pairings(m, n, alg):
        left, right = term.survivors
        lowest = min(term.scalar)
        for budget in range(0, max(-lowest, 0)):
            for shifts in _compositions(len(left), budget):
                taylor = Fraction(1)
                for t in shifts:
                    taylor /= factorial(t)
                moved = [(g, a + t) for (g, a), t in zip(left, shifts)]
                sign, mono = _supersort(moved + list(right), parities)
                if not sign:
                    continue
                for exponent, k in term.scalar.items():
                    power = exponent + budget
                    if power <= -1:
                        poles[-power][mono] += term.sign * sign * k * taylor
    return SingularPart({pole: NormalForm(terms) for pole, terms in poles.items()})
