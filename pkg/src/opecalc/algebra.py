"""Algebra definitions: generators, contraction tables and named fields."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction

from .expr import (
    FieldExpr,
    Monomial,
    NormalForm,
    OpecalcError,
    SingularPart,
    UnknownNameError,
    format_expr,
    format_nf,
    format_scalar,
    generator_names,
    skew_transform,
)

HEADER = "opecalc-algebra v1"
RESERVED_NAMES = frozenset({"d", "dz"})


class AlgebraError(OpecalcError):
    """Invalid algebra definition (duplicates, inconsistent tables, ...)."""


@dataclass(frozen=True)
class Generator:
    name: str
    parity: int
    weight: Fraction = Fraction(0)

    def __post_init__(self):
        if self.parity not in (0, 1):
            raise AlgebraError(f"parity of {self.name!r} must be 0 or 1, got {self.parity}")
        if not self.name or self.name in RESERVED_NAMES:
            raise AlgebraError(f"invalid generator name {self.name!r}")
        object.__setattr__(self, "weight", Fraction(self.weight))


@dataclass(frozen=True)
class AlgebraDef:
    """Generators, a completed contraction table and named composite fields.

    ``contractions[(g, h)]`` is the singular part of ``g(z) h(w)``.  Build
    instances through :func:`make_algebra` (or the parser) so that the table
    is completed and the flags are computed.
    """

    generators: tuple[Generator, ...] = ()
    contractions: dict = field(default_factory=dict)
    named_fields: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    degree_reducing: bool = True
    central: bool = True
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def generator(self, name: str) -> Generator:
        for g in self.generators:
            if g.name == name:
                return g
        raise UnknownNameError(f"unknown generator {name!r}")

    def generator_names(self) -> list[str]:
        return [g.name for g in self.generators]

    def parity(self, name: str) -> int:
        return self.generator(name).parity

    def check_names(self, e: FieldExpr) -> None:
        known = set(self.generator_names())
        missing = sorted(generator_names(e) - known)
        if missing:
            raise UnknownNameError(f"unknown generator {missing[0]!r}")

    def fingerprint(self) -> str:
        return hashlib.sha256(serialize_algebra(self).encode("utf-8")).hexdigest()[:16]


def _raw_derive(nf: NormalForm, k: int) -> NormalForm:
    # Leibniz rule without reordering; only used on table entries, which are
    # single factors for every algebra where sorting is enabled.
    for _ in range(k):
        out: dict[Monomial, Fraction] = {}
        for mono, c in nf:
            for j, (g, a) in enumerate(mono):
                new = mono[:j] + ((g, a + 1),) + mono[j + 1:]
                out[new] = out.get(new, 0) + c
        nf = NormalForm(out)
    return nf


def _check_entry_names(entry: SingularPart, known: set[str], pair) -> None:
    for nf in entry.values():
        for mono, _ in nf:
            for g, _ in mono:
                if g not in known:
                    raise UnknownNameError(f"contraction {pair[0]} {pair[1]} refers to unknown generator {g!r}")


def complete_contractions(alg: AlgebraDef) -> AlgebraDef:
    """Add reversed table entries by signed skew symmetry and compute the flags.

    Entries given in both orientations (including a generator with itself)
    must agree with the skew image; otherwise :class:`AlgebraError` is raised
    naming both the declared and the computed entry.
    """
    parities = {g.name: g.parity for g in alg.generators}
    table: dict = {}
    for (g, h), entry in alg.contractions.items():
        if g not in parities or h not in parities:
            raise UnknownNameError(f"contraction between unknown generators {g!r}, {h!r}")
        _check_entry_names(entry, set(parities), (g, h))
        if any(pole < 1 for pole in entry):
            raise AlgebraError(f"pole orders must be >= 1 in contraction {g} {h}")
        if entry:
            table[(g, h)] = SingularPart(entry)
    completed = dict(table)
    for (g, h), entry in table.items():
        sign = -1 if parities[g] and parities[h] else 1
        image = SingularPart.from_products(skew_transform(entry.products(), sign, _raw_derive))
        declared = completed.get((h, g))
        if declared is None:
            if image:
                completed[(h, g)] = image
        elif declared != image:
            raise AlgebraError(
                f"inconsistent contractions: {h} {g} declared as {format_table(declared)} "
                f"but skew symmetry of {g} {h} gives {format_table(image)}")
    names = [g.name for g in alg.generators]
    ordered = {}
    for g in names:
        for h in names:
            if (g, h) in completed:
                ordered[(g, h)] = completed[(g, h)]
    monos = [mono for entry in ordered.values() for nf in entry.values() for mono, _ in nf]
    return AlgebraDef(
        generators=alg.generators,
        contractions=ordered,
        named_fields=dict(alg.named_fields),
        params=dict(alg.params),
        degree_reducing=all(len(m) < 2 for m in monos),
        central=all(len(m) == 0 for m in monos),
    )


def make_algebra(generators, contractions=None, named_fields=None, params=None) -> AlgebraDef:
    gens = tuple(generators)
    seen = set()
    for g in gens:
        if g.name in seen:
            raise AlgebraError(f"duplicate generator {g.name!r}")
        seen.add(g.name)
    alg = AlgebraDef(generators=gens, contractions=dict(contractions or {}),
                     named_fields=dict(named_fields or {}), params=dict(params or {}))
    for name, e in alg.named_fields.items():
        if name in seen:
            raise AlgebraError(f"field {name!r} clashes with a generator name")
        alg.check_names(e)
    return complete_contractions(alg)


def format_table(entry: SingularPart) -> str:
    if not entry:
        return "0"
    parts = []
    for pole, nf in entry.items():
        for mono, coeff in nf:
            text = format_nf(NormalForm({mono: abs(coeff)}))
            sign = "-" if coeff < 0 else "+"
            parts.append((sign, f"{text}/dz^{pole}"))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, text in parts[1:]:
        out += f" {sign} {text}"
    return out


def serialize_algebra(alg: AlgebraDef) -> str:
    """Render ``alg`` in the v1 text format (completed table included)."""
    lines = [HEADER]
    for name, value in alg.params.items():
        lines.append(f"param {name} = {format_scalar(value)}")
    for g in alg.generators:
        lines.append(f"generator {g.name} parity={g.parity} weight={format_scalar(g.weight)}")
    for (g, h), entry in alg.contractions.items():
        lines.append(f"contract {g} {h} = {format_table(entry)}")
    for name, e in alg.named_fields.items():
        lines.append(f"field {name} = {format_expr(e)}")
    return "\n".join(lines) + "\n"
