from collections import Counter
from fractions import Fraction

import pytest

from opecalc import NormalForm, ParityError, make_algebra, normal_form
from opecalc.algebra import Generator
from opecalc.expr import Unit
from opecalc.identities import (
    IdentityError,
    borcherds_residual,
    identity_pool,
    ncwick_residual,
    newwick_residual,
    skew_residual,
)


def summed(res):
    total = NormalForm()
    for t in res.terms:
        total = total + t
    return total


def test_borcherds_examples(boson, fermion):
    assert borcherds_residual("J", "J", "J", 1, -1, 0, boson).ok
    assert borcherds_residual("psi", "psi", "psi", 0, -1, -1, fermion).ok


@pytest.mark.parametrize("ops", [("T", "T", "J"), ("T", "T", ":J d J:")])
def test_borcherds_jacobi_instance(boson, ops):
    res = borcherds_residual(*ops, 0, 0, 0, boson)
    assert res.ok
    assert res.terms  # nontrivial: the individual summands do not vanish


def test_ghost_jacobi_instance(ghost):
    res = borcherds_residual("T", "b", "J", 0, 0, 0, ghost)
    assert res.ok and res.terms


def test_residual_is_sum_of_terms(ghost):
    res = borcherds_residual("A", "B", "c", 1, -2, 1, ghost)
    assert res.residual == summed(res)
    assert res.params == {"p": 1, "q": -2, "r": 1}
    assert res.ok


def test_gate_rejects_doubly_negative(boson):
    with pytest.raises(IdentityError):
        borcherds_residual("J", "J", "J", -1, 0, -1, boson)
    with pytest.raises(IdentityError):
        ncwick_residual("J", "J", "J", -1, boson)


def test_inhomogeneous_operands_rejected():
    alg = make_algebra([Generator("J", 0, Fraction(1)), Generator("psi", 1, Fraction(1, 2))])
    with pytest.raises(ParityError):
        borcherds_residual("J + psi", "J", "J", 0, 0, 0, alg)


def test_ncwick_examples(boson, fermion):
    assert ncwick_residual("J", "J", "J", 1, boson).ok
    assert ncwick_residual("J", Unit(), "J", 0, boson).ok
    assert ncwick_residual("psi", "psi", ":psi d psi:", 1, fermion).ok


def test_newwick_examples(boson, ghost):
    assert newwick_residual("J", "J", "J", 1, boson).ok
    assert newwick_residual("b", "c", "J", 0, ghost).ok
    assert newwick_residual("A", "B", Unit(), -1, ghost).ok


def test_newwick_reproduces_stress_tensor_pole(boson):
    # (J_(-1)J)_(1)T carries the 2T/(z-w)^2 term of T(z)T(w), up to the factor 1/2
    res = newwick_residual("J", "J", "T", 1, boson)
    assert res.ok
    assert res.terms[0] == normal_form("4*T", boson)


def test_skew_examples(boson, fermion):
    assert skew_residual("d J", "J", -1, boson).ok
    assert skew_residual("psi", "psi", 0, fermion).ok
    assert skew_residual("T", Unit(), -1, boson).ok


@pytest.mark.parametrize("name", ["free-boson", "free-fermion", "bc-ghost"])
def test_specialisations_match_borcherds_termwise(presets, name):
    alg = presets[name]
    pool = identity_pool(alg)[:4]
    for a in pool:
        for b in pool:
            for c in pool:
                for q in range(-2, 3):
                    nw = newwick_residual(a, b, c, q, alg)
                    bor = borcherds_residual(a, b, c, 0, q, -1, alg)
                    assert nw.term_multiset() == bor.term_multiset()
                for p in range(3):
                    nc = ncwick_residual(a, b, c, p, alg)
                    bor = borcherds_residual(a, b, c, p, -1, 0, alg)
                    assert nc.term_multiset() == Counter(-t for t in bor.terms)


def test_pools(boson, fermion, ghost):
    assert [str(x) for x in identity_pool(boson)] == ["J", "d J", ":J J:", ":J d J:", ":d J d J:"]
    assert [str(x) for x in identity_pool(fermion)] == ["psi", "d psi", ":psi d psi:"]
    assert len(identity_pool(ghost)) == 10


def test_broken_bracket_is_detected():
    # [x,[y,z]] - [y,[x,z]] - [[x,y],z] = [x,z] = y, so Jacobi fails
    from opecalc import parse_algebra

    alg = parse_algebra(
        "generator x parity=0\ngenerator y parity=0\ngenerator z parity=0\n"
        "contract x y = z/dz^1\ncontract y z = z/dz^1\ncontract x z = y/dz^1")
    res = borcherds_residual("x", "y", "z", 0, 0, 0, alg)
    assert not res.ok
    assert res.residual == normal_form("-y", alg)
