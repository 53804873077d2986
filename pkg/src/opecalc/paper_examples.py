"""Reference OPE tables for the three worked free-field examples.

Each entry names a preset, two operands and the expected singular part,
written in the expression grammar (``L`` is the ghost parameter).  The
tables are recomputed from scratch by :func:`run_examples`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .expr import SingularPart
from .normal import normal_form
from .presets import load_preset
from .wick import check_virasoro, contract

GHOST_LAMBDAS = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))


@dataclass(frozen=True)
class Example:
    block: str
    preset: str
    left: str
    right: str
    expected: dict  # pole -> expression


BOSON = (
    Example("boson", "free-boson", "J", "T", {2: "J"}),
    Example("boson", "free-boson", "T", "T", {4: "1/2", 2: "2*T", 1: "d T"}),
)

FERMION = (
    Example("fermion", "free-fermion", "psi", "T", {2: "1/2*psi", 1: "-1/2*d psi"}),
    Example("fermion", "free-fermion", "d psi", "T", {3: "-psi", 2: "1/2*d psi"}),
    Example("fermion", "free-fermion", "T", "T", {4: "1/4", 2: "2*T", 1: "d T"}),
    Example("fermion", "free-fermion", "T", "psi", {2: "1/2*psi", 1: "d psi"}),
)

GHOST = (
    Example("ghost", "bc-ghost", "b", "J", {1: "-b"}),
    Example("ghost", "bc-ghost", "c", "J", {1: "c"}),
    Example("ghost", "bc-ghost", "b", "A", {1: "-d b"}),
    Example("ghost", "bc-ghost", "b", "B", {2: "b"}),
    Example("ghost", "bc-ghost", "c", "A", {2: "c"}),
    Example("ghost", "bc-ghost", "c", "B", {1: "-d c"}),
    Example("ghost", "bc-ghost", "J", "J", {2: "1"}),
    Example("ghost", "bc-ghost", "A", "b", {1: "d b"}),
    Example("ghost", "bc-ghost", "B", "b", {2: "b", 1: "d b"}),
    Example("ghost", "bc-ghost", "A", "c", {2: "c", 1: "d c"}),
    Example("ghost", "bc-ghost", "B", "c", {1: "d c"}),
    Example("ghost", "bc-ghost", "A", "J", {3: "-1", 2: "J", 1: "d J"}),
    Example("ghost", "bc-ghost", "B", "J", {3: "1", 2: "J", 1: "d J"}),
    Example("ghost", "bc-ghost", "T", "b", {2: "L*b", 1: "d b"}),
    Example("ghost", "bc-ghost", "T", "c", {2: "(1-L)*c", 1: "d c"}),
    Example("ghost", "bc-ghost", "T", "J", {3: "(2*L-1)", 2: "J", 1: "d J"}),
    Example("ghost", "bc-ghost", "A", "A", {4: "-1", 2: "2*A", 1: "d A"}),
    Example("ghost", "bc-ghost", "A", "B", {4: "2", 3: "-2*J", 2: "2*B", 1: "d B"}),
    Example("ghost", "bc-ghost", "B", "A", {4: "2", 3: "2*J", 2: "2*A", 1: "d A"}),
    Example("ghost", "bc-ghost", "B", "B", {4: "-1", 2: "2*B", 1: "d B"}),
    Example("ghost", "bc-ghost", "T", "T", {4: "-(6*L*L-6*L+1)", 2: "2*T", 1: "d T"}),
)

EXAMPLES = BOSON + FERMION + GHOST

# central charges quoted alongside the tables
CENTRAL_CHARGES = {"free-boson": "1", "free-fermion": "1/2", "bc-ghost": "-2*(6*L*L-6*L+1)"}


@dataclass(frozen=True)
class ExampleResult:
    block: str
    label: str
    params: dict
    expected: SingularPart
    actual: SingularPart

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


@dataclass(frozen=True)
class ChargeResult:
    preset: str
    params: dict
    expected: Fraction
    actual: Optional[Fraction]

    @property
    def ok(self) -> bool:
        return self.actual == self.expected


def _instances(preset: str):
    if preset == "bc-ghost":
        return [{"L": lam} for lam in GHOST_LAMBDAS]
    return [{}]


def run_examples():
    """Recompute every table; returns ``(ope_results, charge_results)``."""
    algebras = {}
    for preset in CENTRAL_CHARGES:
        for params in _instances(preset):
            algebras[preset, tuple(params.items())] = (params, load_preset(preset, params))
    opes = []
    for ex in EXAMPLES:
        for key, (params, alg) in algebras.items():
            if key[0] != ex.preset:
                continue
            expected = SingularPart({pole: normal_form(text, alg) for pole, text in ex.expected.items()})
            actual = contract(ex.left, ex.right, alg)
            opes.append(ExampleResult(ex.block, f"{ex.left} {ex.right}", params, expected, actual))
    charges = []
    for (preset, _), (params, alg) in algebras.items():
        expected = normal_form(CENTRAL_CHARGES[preset], alg).scalar_value()
        charges.append(ChargeResult(preset, params, expected, check_virasoro("T", alg).central_charge))
    return opes, charges
