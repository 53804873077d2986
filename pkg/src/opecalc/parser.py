"""Reader for the ``opecalc-algebra v1`` text format and field expressions.

Algebra files are line oriented::

    opecalc-algebra v1
    # free boson
    generator J parity=0 weight=1
    contract J J = 1/dz^2
    field T = 1/2*:J J:

Expressions follow::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := [scalar '*']... factor | scalar
    factor := name | '1' | 'd' factor | 'd{' int '}' factor
            | ':' factor factor ':' | '(' expr ')'

Scalars are rationals, parameter names, or parenthesised sums/products of
those.  Normal ordering is binary: ``:a b c:`` is rejected.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .algebra import HEADER, RESERVED_NAMES, AlgebraDef, AlgebraError, Generator, make_algebra
from .expr import (
    Deriv,
    FieldExpr,
    Gen,
    Monomial,
    Nop,
    NormalForm,
    OpecalcError,
    SingularPart,
    Sum,
    Unit,
    UnknownNameError,
)


class ParseError(OpecalcError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[^\W\d]\w*)|(?P<sym>[:(){}+\-*·/^=]))")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {text[col - 1]!r}", line, col)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    toks.append(_Tok("end", "", len(text) + 1))
    return toks


class _Backtrack(Exception):
    pass


class _Parser:
    def __init__(self, text: str, line: int, generators, fields, params):
        self.toks = _tokenize(text, line)
        self.pos = 0
        self.line = line
        self.generators = generators
        self.fields = fields
        self.params = params

    # token helpers
    def peek(self, offset: int = 0) -> _Tok:
        return self.toks[min(self.pos + offset, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind in ("sym", "name") and tok.text == text

    def take(self) -> _Tok:
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.peek()
        if not self.at(text):
            self.error(f"expected {text!r}, found {tok.text or 'end of line'!r}", tok)
        return self.take()

    def error(self, message: str, tok: Optional[_Tok] = None):
        tok = tok or self.peek()
        raise ParseError(message, self.line, tok.col)

    def expect_end(self):
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r}")

    # scalars
    def _int(self) -> int:
        tok = self.peek()
        if tok.kind != "int":
            self.error(f"expected an integer, found {tok.text or 'end of line'!r}")
        self.take()
        return int(tok.text)

    def _rational(self) -> Fraction:
        num = self._int()
        if self.at("/") and self.peek(1).kind == "int":
            self.take()
            den = int(self.take().text)
            if den == 0:
                self.error("zero denominator")
            return Fraction(num, den)
        return Fraction(num)

    def _scalar_atom(self) -> Fraction:
        tok = self.peek()
        if tok.kind == "int":
            return self._rational()
        if tok.kind == "name" and tok.text in self.params:
            self.take()
            return self.params[tok.text]
        if self.at("("):
            self.take()
            value = self.scalar_expr()
            self.expect(")")
            return value
        raise _Backtrack

    def _scalar_term(self) -> Fraction:
        sign = 1
        while self.at("-") or self.at("+"):
            if self.take().text == "-":
                sign = -sign
        value = self._scalar_atom()
        while self.at("*") or self.at("·"):
            self.take()
            value *= self._scalar_atom()
        return sign * value

    def scalar_expr(self) -> Fraction:
        try:
            value = self._scalar_term()
            while self.at("+") or self.at("-"):
                sign = 1 if self.take().text == "+" else -1
                value += sign * self._scalar_term()
            return value
        except _Backtrack:
            self.error(f"expected a rational scalar, found {self.peek().text or 'end of line'!r}")

    def _try_scalar_atom(self) -> Optional[Fraction]:
        start = self.pos
        try:
            return self._scalar_atom()
        except (_Backtrack, ParseError):
            self.pos = start
            return None

    # field expressions
    def expr(self) -> FieldExpr:
        terms = []
        sign = 1
        if self.at("+") or self.at("-"):
            sign = 1 if self.take().text == "+" else -1
            explicit = True
        else:
            explicit = False
        coeff, factor = self.term()
        terms.append((sign, coeff, factor))
        while self.at("+") or self.at("-"):
            sign = 1 if self.take().text == "+" else -1
            explicit = True
            coeff, factor = self.term()
            terms.append((sign, coeff, factor))
        if len(terms) == 1 and not explicit and terms[0][1] is None:
            return terms[0][2]
        return Sum(tuple((s * (c if c is not None else 1), f) for s, c, f in terms))

    def term(self) -> tuple[Optional[Fraction], FieldExpr]:
        coeffs = []
        first = self.peek()
        start = self.pos
        while True:
            value = self._try_scalar_atom()
            if value is None:
                break
            coeffs.append(value)
            if self.at("*") or self.at("·"):
                self.take()
                continue
            # a bare scalar stands for a multiple of the unit field
            if len(coeffs) == 1 and first.kind == "int" and first.text == "1" and self.pos == start + 1:
                return None, Unit()
            total = Fraction(1)
            for c in coeffs:
                total *= c
            return total, Unit()
        factor = self.factor()
        if not coeffs:
            return None, factor
        total = Fraction(1)
        for c in coeffs:
            total *= c
        return total, factor

    def factor(self) -> FieldExpr:
        tok = self.peek()
        if tok.kind == "name" and tok.text == "d":
            self.take()
            order = 1
            if self.at("{"):
                self.take()
                order = self._int()
                self.expect("}")
                if order < 1:
                    self.error("derivative order must be >= 1", tok)
            return Deriv(order, self.factor())
        if tok.kind == "name":
            self.take()
            if tok.text in self.generators:
                return Gen(tok.text)
            if tok.text in self.fields:
                return self.fields[tok.text]
            if tok.text in self.params:
                self.error(f"parameter {tok.text!r} used as a field; write {tok.text}*1", tok)
            raise UnknownNameError(f"line {self.line}, column {tok.col}: unknown identifier {tok.text!r}")
        if tok.kind == "int":
            value = self._rational()
            return Unit() if value == 1 else Sum(((value, Unit()),))
        if self.at(":"):
            self.take()
            left = self.factor()
            right = self.factor()
            if not self.at(":"):
                self.error("normal ordering takes exactly two factors; nest explicitly as ':a :b c::'")
            self.take()
            return Nop(left, right)
        if self.at("("):
            self.take()
            inner = self.expr()
            self.expect(")")
            return inner
        self.error(f"unexpected {tok.text or 'end of line'!r}", tok)

    # contraction tables
    def table(self) -> dict[int, FieldExpr]:
        poles: dict[int, list] = {}
        if self.peek().kind == "int" and self.peek().text == "0" and self.peek(1).kind == "end":
            self.take()
            return {}
        sign = 1
        if self.at("+") or self.at("-"):
            sign = 1 if self.take().text == "+" else -1
        while True:
            coeff, factor = self.term()
            self.expect("/")
            dz = self.take()
            if dz.text != "dz":
                self.error("expected 'dz' in pole term", dz)
            self.expect("^")
            pole_tok = self.peek()
            if self.at("-"):
                self.error("pole order must be >= 1", pole_tok)
            pole = self._int()
            if pole < 1:
                raise AlgebraError(f"line {self.line}, column {pole_tok.col}: pole order must be >= 1")
            poles.setdefault(pole, []).append((sign * (coeff if coeff is not None else 1), factor))
            if self.at("+") or self.at("-"):
                sign = 1 if self.take().text == "+" else -1
                continue
            break
        return {p: Sum(tuple(ts)) for p, ts in poles.items()}


def _raw_nf(e: FieldExpr) -> NormalForm:
    """Evaluate a table entry without any reordering."""
    if isinstance(e, Unit):
        return NormalForm.unit()
    if isinstance(e, Gen):
        return NormalForm.monomial(((e.name, 0),))
    if isinstance(e, Deriv):
        from .algebra import _raw_derive
        return _raw_derive(_raw_nf(e.child), e.order)
    if isinstance(e, Nop):
        left, right = _raw_nf(e.left), _raw_nf(e.right)
        out: dict[Monomial, Fraction] = {}
        for lm, lc in left:
            if len(lm) > 1:
                raise AlgebraError("contraction entries must be right-nested normally ordered products")
            for rm, rc in right:
                out[lm + rm] = out.get(lm + rm, 0) + lc * rc
        return NormalForm(out)
    total = NormalForm()
    for c, child in e.terms:
        total = total + _raw_nf(child) * c
    return total


def _statements(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield lineno, line


def parse_algebra(text: str, params: Optional[dict] = None) -> AlgebraDef:
    """Parse an algebra definition.

    ``params`` overrides (or supplies) ``param`` statements, e.g.
    ``{"L": Fraction(2)}``.  The ``opecalc-algebra v1`` header is optional but
    any other version line is rejected.
    """
    overrides = {k: Fraction(v) for k, v in (params or {}).items()}
    values: dict[str, Fraction] = dict(overrides)
    declared_params: list[str] = []
    generators: dict[str, Generator] = {}
    fields: dict[str, FieldExpr] = {}
    tables: dict[tuple[str, str], tuple[int, SingularPart]] = {}

    def taken(name: str) -> bool:
        return name in generators or name in fields or name in declared_params

    for index, (lineno, line) in enumerate(_statements(text)):
        stripped = line.strip()
        if stripped.startswith("opecalc-algebra"):
            if index != 0 or stripped != HEADER:
                raise ParseError(f"unsupported header {stripped!r}; expected {HEADER!r} on the first line", lineno, 1)
            continue
        p = _Parser(line, lineno, generators, fields, values)
        keyword = p.take()
        if keyword.kind != "name":
            p.error(f"expected a statement keyword, found {keyword.text!r}", keyword)
        if keyword.text == "param":
            name = p.take()
            if name.kind != "name":
                p.error("expected a parameter name", name)
            if taken(name.text) or name.text in RESERVED_NAMES:
                raise AlgebraError(f"line {lineno}: duplicate name {name.text!r}")
            p.expect("=")
            value = p.scalar_expr()
            p.expect_end()
            declared_params.append(name.text)
            values.setdefault(name.text, value)
        elif keyword.text == "generator":
            name = p.take()
            if name.kind != "name" or name.text in RESERVED_NAMES:
                p.error(f"invalid generator name {name.text!r}", name)
            if taken(name.text) or name.text in values:
                raise AlgebraError(f"line {lineno}: duplicate generator {name.text!r}")
            attrs: dict[str, Fraction] = {}
            while p.peek().kind != "end":
                key = p.take()
                if key.text not in ("parity", "weight") or key.text in attrs:
                    p.error(f"unexpected attribute {key.text!r}", key)
                p.expect("=")
                if key.text == "parity":
                    attrs["parity"] = Fraction(p._int())
                else:
                    attrs["weight"] = p.scalar_expr()
            if "parity" not in attrs:
                p.error("generator needs parity=0 or parity=1")
            if attrs["parity"] not in (0, 1):
                raise AlgebraError(f"line {lineno}: parity must be 0 or 1, got {attrs['parity']}")
            generators[name.text] = Generator(name.text, int(attrs["parity"]), attrs.get("weight", Fraction(0)))
        elif keyword.text == "contract":
            left, right = p.take(), p.take()
            for tok in (left, right):
                if tok.kind != "name":
                    p.error("expected a generator name", tok)
                if tok.text not in generators:
                    raise UnknownNameError(f"line {lineno}, column {tok.col}: unknown generator {tok.text!r}")
            p.expect("=")
            poles = p.table()
            p.expect_end()
            entry = SingularPart({pole: _raw_nf(e) for pole, e in poles.items()})
            pair = (left.text, right.text)
            if pair in tables and tables[pair][1] != entry:
                raise AlgebraError(
                    f"line {lineno}: inconsistent contractions: {pair[0]} {pair[1]} was declared "
                    f"differently on line {tables[pair][0]}")
            tables[pair] = (lineno, entry)
        elif keyword.text == "field":
            name = p.take()
            if name.kind != "name" or name.text in RESERVED_NAMES:
                p.error(f"invalid field name {name.text!r}", name)
            if taken(name.text) or name.text in values:
                raise AlgebraError(f"line {lineno}: duplicate name {name.text!r}")
            p.expect("=")
            fields[name.text] = p.expr()
            p.expect_end()
        else:
            p.error(f"unknown statement {keyword.text!r}", keyword)

    ordered_params = {name: values[name] for name in declared_params}
    for name, value in overrides.items():
        ordered_params.setdefault(name, value)
    return make_algebra(generators.values(), {k: v for k, (_, v) in tables.items()}, fields, ordered_params)


def parse_expr(text: str, alg: AlgebraDef) -> FieldExpr:
    """Parse a field expression in the context of ``alg``."""
    lines = text.splitlines() or [""]
    if len(lines) != 1:
        raise ParseError("expressions must fit on one line", 1, 1)
    generators = {name: None for name in alg.generator_names()}
    p = _Parser(lines[0], 1, generators, alg.named_fields, alg.params)
    if p.peek().kind == "end":
        p.error("empty expression")
    e = p.expr()
    p.expect_end()
    return e


def parse_rational(text: str) -> Fraction:
    p = _Parser(text, 1, {}, {}, {})
    value = p.scalar_expr()
    p.expect_end()
    return value
