import logging
from fractions import Fraction

import pytest

from opecalc import (
    INHOMOGENEOUS,
    NormalForm,
    ParityError,
    UnknownNameError,
    derive,
    equals,
    make_algebra,
    normal_form,
    parity_of,
    parse_algebra,
)
from opecalc.algebra import Generator
from opecalc.expr import Gen, Nop, Unit, format_nf
from opecalc.normal import weights


def nf(text, alg):
    return normal_form(text, alg)


def test_derivative_moves_right(boson):
    # :dJ J: = :J dJ:
    assert nf(":d J J:", boson) == nf(":J d J:", boson)
    assert format_nf(nf(":d J J:", boson)) == ":J d J:"


@pytest.mark.parametrize("text", ["J", "d J", ":J J:", "T", "1/2*J - d{2} J"])
def test_unit_is_absorbed(boson, text):
    assert nf(f":1 ({text}):", boson) == nf(text, boson)
    assert nf(f":({text}) 1:", boson) == nf(text, boson)


def test_fermion_square_vanishes(fermion):
    assert nf(":psi psi:", fermion).is_zero()
    assert nf(":d psi d psi:", fermion).is_zero()


def test_left_nested_reassociation(boson):
    # ::J J: J: = :J :J J:: + d^2 J   (ordinary second derivative)
    assert nf("::J J: J:", boson) == nf(":J :J J:: + d{2} J", boson)


def test_equals(boson):
    assert equals(":d J J:", ":J d J:", boson)
    assert equals("T", "T", boson)
    assert not equals("::J J: J:", ":J :J J::", boson)


def test_derive_examples(boson, fermion):
    assert derive("J", 1, boson) == NormalForm.monomial((("J", 1),))
    assert derive(":psi d psi:", 1, fermion) == nf(":psi d{2} psi:", fermion)
    assert derive(Unit(), 3, boson).is_zero()
    with pytest.raises(ValueError):
        derive("J", -1, boson)


def test_derive_is_leibniz(ghost):
    lhs = derive(":b :d c b::", 1, ghost)
    rhs = nf(":d b :d c b:: + :b :d{2} c b:: + :b :d c d b::", ghost)
    assert lhs == rhs


def test_parity(ghost, fermion, boson):
    assert parity_of(":b c:", ghost) == 0
    assert parity_of("b", ghost) == 1
    assert parity_of("psi", fermion) == 1
    assert parity_of("1", boson) == 0
    mixed = make_algebra([Generator("J", 0, Fraction(1)), Generator("psi", 1, Fraction(1, 2))])
    assert parity_of("J + psi", mixed) == INHOMOGENEOUS


def test_inhomogeneous_operand_rejected():
    from opecalc import contract

    mixed = make_algebra([Generator("J", 0, Fraction(1)), Generator("psi", 1, Fraction(1, 2))])
    with pytest.raises(ParityError):
        contract("J + psi", "J", mixed)


def test_unknown_generator_in_normal_form(boson):
    with pytest.raises(UnknownNameError):
        normal_form(NormalForm.monomial((("X", 0),)), boson)
    with pytest.raises(UnknownNameError):
        normal_form(Nop(Unit(), Gen("X")), boson)


def test_normal_form_sorts_supplied_normal_form(ghost):
    raw = NormalForm.monomial((("c", 0), ("b", 0)))
    assert normal_form(raw, ghost) == nf("-:b c:", ghost)


def test_sorting_sign_for_fermions(ghost):
    # :c b: = -:b c: with no correction (b_(0)c = 1 has no derivative left over)
    assert nf(":c b:", ghost) == nf("-:b c:", ghost)


def test_weights_of_normal_form(ghost):
    assert weights(nf("T", ghost), ghost) == {Fraction(2)}
    assert weights(nf(":b c:", ghost), ghost) == {Fraction(1)}


def test_non_degree_reducing_algebra_keeps_order(caplog):
    alg = parse_algebra(
        "generator X parity=0 weight=1\n"
        "generator Y parity=0 weight=1\n"
        "contract X Y = :X X:/dz^1\n")
    assert not alg.degree_reducing
    with caplog.at_level(logging.WARNING, logger="opecalc.normal"):
        a = normal_form(":Y X:", alg)
        normal_form(":Y X:", alg)
    assert a.unsorted
    assert a.monomials() == [(("Y", 0), ("X", 0))]
    assert sum("not degree reducing" in r.message for r in caplog.records) == 1
