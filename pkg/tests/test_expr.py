from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from opecalc.expr import (
    ZERO,
    Deriv,
    Gen,
    Nop,
    NormalForm,
    SingularPart,
    Sum,
    Unit,
    binomial,
    format_expr,
    format_nf,
    format_poles,
    format_scalar,
)

J = (("J", 0),)
DJ = (("J", 1),)
JJ = (("J", 0), ("J", 0))


def test_zero_prints_as_zero():
    assert format_nf(ZERO) == "0"
    assert ZERO.is_zero()
    assert NormalForm({J: 0}) == ZERO


def test_terms_sorted_and_merged():
    nf = NormalForm([(DJ, 1), (J, 2), (J, Fraction(-1, 2))])
    assert nf.terms() == ((J, Fraction(3, 2)), (DJ, Fraction(1)))


def test_equality_ignores_construction_order():
    assert NormalForm({J: 1, DJ: 2}) == NormalForm({DJ: 2, J: 1})
    assert hash(NormalForm({J: 1, DJ: 2})) == hash(NormalForm({DJ: 2, J: 1}))


def test_unsorted_flag_not_part_of_equality():
    assert NormalForm({J: 1}, unsorted=True) == NormalForm({J: 1})


def test_arithmetic():
    a = NormalForm({J: 1})
    b = NormalForm({J: -1, DJ: 1})
    assert a + b == NormalForm({DJ: 1})
    assert a - a == ZERO
    assert 3 * a == NormalForm({J: 3})
    assert -b == NormalForm({J: 1, DJ: -1})
    assert a * 0 == ZERO


def test_float_coefficient_rejected():
    with pytest.raises(TypeError):
        NormalForm({J: 1}) * 0.5


def test_scalar_value_and_ratio():
    assert NormalForm.unit(Fraction(1, 2)).scalar_value() == Fraction(1, 2)
    assert NormalForm({J: 1}).scalar_value() is None
    assert ZERO.scalar_value() == 0
    t = NormalForm({JJ: Fraction(1, 2)})
    assert NormalForm({JJ: 1}).ratio_to(t) == 2
    assert NormalForm({JJ: 1, J: 1}).ratio_to(t) is None
    assert ZERO.ratio_to(t) == 0
    assert t.ratio_to(ZERO) is None


def test_format_nf():
    assert format_nf(NormalForm({(): Fraction(1, 2)})) == "1/2*1"
    assert format_nf(NormalForm({JJ: Fraction(1, 2), DJ: -1})) == "1/2*:J J: - d J"
    assert format_nf(NormalForm({(("J", 2),): 3}), "·") == "3·d{2} J"
    assert format_nf(NormalForm({(("a", 0), ("b", 0), ("c", 1)): 1})) == ":a :b d c::"


@pytest.mark.parametrize("value, text", [
    (Fraction(3), "3"), (Fraction(-1, 2), "-1/2"), (Fraction(0), "0"),
])
def test_format_scalar(value, text):
    assert format_scalar(value) == text


def test_binomial_negative_top():
    assert binomial(-1, 3) == -1
    assert binomial(-2, 2) == 3
    assert binomial(5, 2) == 10
    assert binomial(2, 5) == 0
    assert binomial(3, -1) == 0


@given(st.integers(-6, 6), st.integers(0, 6))
def test_binomial_pascal(n, k):
    assert binomial(n, k + 1) == binomial(n - 1, k + 1) + binomial(n - 1, k)


def test_singular_part_drops_zero_and_orders_poles():
    sp = SingularPart({1: NormalForm({J: 1}), 3: ZERO, 2: NormalForm.unit()})
    assert list(sp) == [2, 1]
    assert sp.max_pole() == 2
    assert sp.get(5) == ZERO
    assert sp.products() == {1: NormalForm.unit(), 0: NormalForm({J: 1})}
    assert SingularPart.from_products(sp.products()) == sp


def test_singular_part_rejects_nonpositive_pole():
    with pytest.raises(ValueError):
        SingularPart({0: NormalForm.unit()})


def test_format_poles():
    sp = SingularPart({4: NormalForm.unit(Fraction(1, 2)), 1: NormalForm({DJ: 1})})
    assert format_poles(sp, "·") == "4: 1/2·1 | 1: d J"
    assert format_poles(SingularPart()) == "{}"


def test_expression_nodes_validate():
    with pytest.raises(ValueError):
        Deriv(0, Gen("J"))
    with pytest.raises(ValueError):
        Sum(())


def test_format_expr():
    tree = Sum(((Fraction(-1, 2), Nop(Gen("psi"), Deriv(1, Gen("psi")))),))
    assert format_expr(tree) == "-1/2*:psi d psi:"
    assert format_expr(Deriv(2, Nop(Unit(), Gen("J")))) == "d{2} :1 J:"
