"""Residue products, contractions and OPEs of arbitrary field expressions."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .algebra import AlgebraDef
from .expr import NormalForm, ParityError, SingularPart
from .normal import INHOMOGENEOUS, Fieldlike, _terms, parity_of, to_nf
from .rewrite import rewriter_for


def _homogeneous(e: Fieldlike, alg: AlgebraDef, role: str) -> int:
    p = parity_of(e, alg)
    if p == INHOMOGENEOUS:
        raise ParityError(f"{role} operand has inhomogeneous parity; split it into even and odd parts")
    return p


def nth_product(a: Fieldlike, n: int, b: Fieldlike, alg: AlgebraDef) -> NormalForm:
    """The n-th residue product ``a_(n) b`` for any integer n.

    ``n = -1`` is the normally ordered product, ``n <= -2`` gives
    ``:d^(k) a b:`` with ``k = -n - 1`` (divided power), and ``n >= 0`` the
    coefficient of ``(z-w)^(-n-1)`` in the OPE.
    """
    _homogeneous(a, alg, "left")
    _homogeneous(b, alg, "right")
    rw = rewriter_for(alg)
    return to_nf(rw.product(_terms(a, alg), n, _terms(b, alg)), alg)


def contract(a: Fieldlike, b: Fieldlike, alg: AlgebraDef) -> SingularPart:
    """Singular part of ``a(z) b(w)``: pole order ``n + 1`` -> ``a_(n) b``."""
    _homogeneous(a, alg, "left")
    _homogeneous(b, alg, "right")
    rw = rewriter_for(alg)
    products = rw.contract_terms(_terms(a, alg), _terms(b, alg))
    return SingularPart({n + 1: to_nf(t, alg) for n, t in products.items()})


@dataclass(frozen=True)
class OpeResult:
    singular: SingularPart
    regular0: NormalForm


def ope(a: Fieldlike, b: Fieldlike, alg: AlgebraDef) -> OpeResult:
    return OpeResult(contract(a, b, alg), nth_product(a, -1, b, alg))


@dataclass(frozen=True)
class VirasoroCheck:
    """Outcome of :func:`check_virasoro`.

    ``residuals`` maps each offending pole to what is left after subtracting
    the Virasoro shape; it is empty exactly when ``central_charge`` is set.
    """

    central_charge: Optional[Fraction]
    residuals: dict = field(default_factory=dict)
    table: Optional[SingularPart] = None

    @property
    def ok(self) -> bool:
        return not self.residuals


@dataclass(frozen=True)
class PrimaryCheck:
    weight: Optional[Fraction]
    residuals: dict = field(default_factory=dict)
    table: Optional[SingularPart] = None

    @property
    def ok(self) -> bool:
        return not self.residuals and self.weight is not None


def check_virasoro(t: Fieldlike, alg: AlgebraDef) -> VirasoroCheck:
    """Central charge ``c`` if ``T(z)T(w) ~ (c/2)/(z-w)^4 + 2T/(z-w)^2 + dT/(z-w)``."""
    rw = rewriter_for(alg)
    t_nf = to_nf(_terms(t, alg), alg)
    table = contract(t_nf, t_nf, alg)
    residuals: dict[int, NormalForm] = {}
    quartic = table.get(4)
    c = quartic.scalar_value()
    if c is None:
        residuals[4] = quartic
    expected = {
        2: t_nf * 2,
        1: to_nf(rw.derive(t_nf.as_dict(), 1), alg),
    }
    for pole in sorted(set(table) | set(expected), reverse=True):
        if pole == 4:
            continue
        diff = table.get(pole) - expected.get(pole, NormalForm())
        if not diff.is_zero():
            residuals[pole] = diff
    if residuals:
        return VirasoroCheck(None, residuals, table)
    return VirasoroCheck(2 * c, {}, table)


def check_primary(t: Fieldlike, phi: Fieldlike, alg: AlgebraDef) -> PrimaryCheck:
    """Conformal weight of ``phi`` if ``T(z)phi(w) ~ h phi/(z-w)^2 + d phi/(z-w)``.

    When ``phi`` is not primary the residual poles are reported; the weight
    is still returned whenever the second order pole is a multiple of ``phi``.
    """
    rw = rewriter_for(alg)
    phi_nf = to_nf(_terms(phi, alg), alg)
    table = contract(t, phi_nf, alg)
    residuals: dict[int, NormalForm] = {}
    weight = table.get(2).ratio_to(phi_nf)
    if weight is None:
        residuals[2] = table.get(2)
    d_phi = to_nf(rw.derive(phi_nf.as_dict(), 1), alg)
    first = table.get(1) - d_phi
    if not first.is_zero():
        residuals[1] = first
    for pole in table:
        if pole >= 3:
            residuals[pole] = table[pole]
    return PrimaryCheck(weight, dict(sorted(residuals.items(), reverse=True)), table)
