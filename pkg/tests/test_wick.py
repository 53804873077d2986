from fractions import Fraction
from math import factorial

import pytest

from opecalc import (
    NormalForm,
    SingularPart,
    check_primary,
    check_virasoro,
    contract,
    derive,
    normal_form,
    nth_product,
    ope,
    parity_of,
    parse_expr as parse,
)
from opecalc.expr import Deriv, Gen, Nop, Unit, skew_transform
from opecalc.normal import weights


def table(alg, entries):
    return SingularPart({pole: normal_form(text, alg) for pole, text in entries.items()})


def test_boson_products(boson):
    assert nth_product("J", 1, "J", boson) == NormalForm.unit()
    assert nth_product("J", 0, "J", boson).is_zero()
    assert nth_product("T", 3, "T", boson) == NormalForm.unit(Fraction(1, 2))


def test_minus_first_product_is_normal_ordering(ghost):
    assert nth_product("A", -1, "B", ghost) == normal_form(":A B:", ghost)


def test_negative_products_are_divided_derivatives(boson):
    # J_(-3)J = :d^(2)J J: = 1/2 :d{2} J J:
    assert nth_product("J", -3, "J", boson) == normal_form("1/2*:d{2} J J:", boson)


def test_fermion_product(fermion):
    assert nth_product("psi", 0, "psi", fermion) == NormalForm.unit()


def test_boson_tables(boson):
    assert contract("J", "T", boson) == table(boson, {2: "J"})
    assert contract("T", "T", boson) == table(boson, {4: "1/2", 2: "2*T", 1: "d T"})


@pytest.mark.parametrize("other", ["J", "T", "1", ":J d{2} J:"])
def test_unit_has_no_singular_part(boson, other):
    assert contract(Unit(), other, boson) == SingularPart()
    assert contract(other, Unit(), boson) == SingularPart()


def test_fermion_tables(fermion):
    assert contract("T", "psi", fermion) == table(fermion, {2: "1/2*psi", 1: "d psi"})
    assert contract("psi", "T", fermion) == table(fermion, {2: "1/2*psi", 1: "-1/2*d psi"})


def test_ghost_table(ghost):
    assert contract("A", "B", ghost) == table(ghost, {4: "2", 3: "-2*J", 2: "2*B", 1: "d B"})


def test_ope_results(fermion, boson, ghost):
    res = ope("psi", "psi", fermion)
    assert res.singular == table(fermion, {1: "1"})
    assert res.regular0.is_zero()
    res = ope("J", Unit(), boson)
    assert res.singular == SingularPart()
    assert res.regular0 == normal_form("J", boson)
    res = ope("b", "c", ghost)
    assert res.singular == table(ghost, {1: "1"})
    assert res.regular0 == normal_form("J", ghost)


def test_central_charges(boson, fermion, ghosts):
    assert check_virasoro("T", boson).central_charge == 1
    assert check_virasoro("T", fermion).central_charge == Fraction(1, 2)
    for lam, alg in ghosts.items():
        assert check_virasoro("T", alg).central_charge == -2 * (6 * lam * lam - 6 * lam + 1)


def test_virasoro_failure_reports_residual(boson):
    chk = check_virasoro(":J J:", boson)
    assert not chk.ok
    assert chk.central_charge is None
    assert 2 in chk.residuals


def test_primary_weights(ghosts, fermion):
    for lam, alg in ghosts.items():
        assert check_primary("T", "b", alg).weight == lam
        assert check_primary("T", "c", alg).weight == 1 - lam
    assert check_primary("T", "psi", fermion).weight == Fraction(1, 2)


def test_current_is_primary_only_at_half(ghosts):
    for lam, alg in ghosts.items():
        chk = check_primary("T", "J", alg)
        assert chk.ok == (lam == Fraction(1, 2))
        if lam != Fraction(1, 2):
            assert chk.residuals == {3: NormalForm.unit(2 * lam - 1)}
        assert chk.weight == 1


# ------------------------------------------------------------ properties

SAMPLE = {
    "free-boson": ["J", "d J", ":J J:", ":J d J:", "T", ":J :J J::"],
    "free-fermion": ["psi", "d psi", ":psi d psi:", ":psi d{2} psi:", ":d psi d{2} psi:"],
    "bc-ghost": ["b", "c", "d c", "J", "A", "B", "T", ":b d b:", ":c d c:", ":b :c d c::"],
}


def pairs(presets):
    for name, alg in presets.items():
        for a in SAMPLE[name]:
            for b in SAMPLE[name]:
                yield alg, a, b


def test_commutator_consistency(presets):
    # A_(n):h Y: through the right-composite route agrees with the engine
    for alg, a, b in pairs(presets):
        right = normal_form(b, alg)
        for mono, _ in right:
            if len(mono) < 2:
                continue
            h = NormalForm.monomial(mono[:1])
            rest = NormalForm.monomial(mono[1:])
            sign = -1 if parity_of(a, alg) and parity_of(h, alg) else 1
            for n in range(5):
                expected = nth_product(nth_product(a, n, h, alg), -1, rest, alg)
                expected += sign * nth_product(h, -1, nth_product(a, n, rest, alg), alg)
                for i in range(n):
                    k = Fraction(factorial(n), factorial(i) * factorial(n - i))
                    expected += k * nth_product(nth_product(a, i, h, alg), n - i - 1, rest, alg)
                assert nth_product(a, n, NormalForm.monomial(mono), alg) == expected


def test_derivative_covariance(presets):
    for alg, a, b in pairs(presets):
        for n in range(-3, 5):
            lhs = nth_product(Deriv(1, parse(a, alg)), n, b, alg)
            assert lhs == -n * nth_product(a, n - 1, b, alg)


def test_translation_covariance(presets):
    for alg, a, b in pairs(presets):
        for n in range(-2, 4):
            lhs = derive(nth_product(a, n, b, alg), 1, alg)
            rhs = nth_product(derive(a, 1, alg), n, b, alg) + nth_product(a, n, derive(b, 1, alg), alg)
            assert lhs == rhs


def test_skew_consistency(presets):
    for alg, a, b in pairs(presets):
        sign = -1 if parity_of(a, alg) and parity_of(b, alg) else 1
        forward = contract(a, b, alg).products()
        swapped = skew_transform(forward, sign, lambda nf, i: derive(nf, i, alg))
        assert SingularPart.from_products(swapped) == contract(b, a, alg)


def test_parity_and_weight_of_products(presets):
    for alg, a, b in pairs(presets):
        pa, pb = parity_of(a, alg), parity_of(b, alg)
        (wa,), (wb,) = weights(normal_form(a, alg), alg), weights(normal_form(b, alg), alg)
        for n in range(-3, 5):
            out = nth_product(a, n, b, alg)
            if out.is_zero():
                continue
            assert parity_of(out, alg) == (pa + pb) % 2
            assert weights(out, alg) == {wa + wb - n - 1}


def test_derivative_of_unit_vanishes(ghost):
    assert normal_form(Nop(Deriv(1, Unit()), Gen("b")), ghost).is_zero()
    assert nth_product(Deriv(2, Unit()), -1, "b", ghost).is_zero()
