"""Field expressions, canonical normal forms and their printed representation.

A field is written as a tree of :class:`FieldExpr` nodes.  Evaluating a tree in
an algebra produces a :class:`NormalForm`: a finite rational combination of
right-nested normally ordered monomials.  A monomial is a tuple of factors
``(generator, order)`` standing for ``:d{o1} g1 :d{o2} g2 ...::`` where
``d{k}`` is the ordinary k-th derivative; the empty tuple is the unit field.
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Union

Scalar = Fraction
Factor = tuple[str, int]
Monomial = tuple[Factor, ...]

UNIT_MONOMIAL: Monomial = ()


class OpecalcError(Exception):
    """Base class for all errors raised by the engine."""


class UnknownNameError(OpecalcError):
    pass


class ParityError(OpecalcError):
    pass


def as_scalar(value: Union[int, str, Fraction]) -> Fraction:
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; use a rational")
    return Fraction(value)


def binomial(top: int, k: int) -> Fraction:
    """Binomial coefficient valid for negative ``top`` (k >= 0)."""
    if k < 0:
        return Fraction(0)
    num = 1
    for j in range(k):
        num *= top - j
    return Fraction(num, factorial(k))


def format_scalar(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# --------------------------------------------------------------------------
# expression trees


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Gen:
    name: str


@dataclass(frozen=True)
class Deriv:
    order: int
    child: "FieldExpr"

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("derivative order must be >= 1")


@dataclass(frozen=True)
class Nop:
    """Normally ordered product ``:left right:``."""

    left: "FieldExpr"
    right: "FieldExpr"


@dataclass(frozen=True)
class Sum:
    terms: tuple[tuple[Fraction, "FieldExpr"], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("Sum needs at least one term")


FieldExpr = Union[Unit, Gen, Deriv, Nop, Sum]


def generator_names(e: FieldExpr) -> set[str]:
    if isinstance(e, Gen):
        return {e.name}
    if isinstance(e, Deriv):
        return generator_names(e.child)
    if isinstance(e, Nop):
        return generator_names(e.left) | generator_names(e.right)
    if isinstance(e, Sum):
        out: set[str] = set()
        for _, child in e.terms:
            out |= generator_names(child)
        return out
    return set()


# --------------------------------------------------------------------------
# normal forms


class NormalForm:
    """Immutable rational linear combination of canonical monomials.

    Terms are kept sorted by monomial (lexicographic on factor tuples) with
    zero coefficients removed, so two normal forms are equal exactly when
    their term lists are identical.  ``unsorted`` is set when the producing
    algebra could not sort factors; it does not take part in equality.
    """

    __slots__ = ("_terms", "_hash", "unsorted")

    def __init__(self, terms: Union[Mapping[Monomial, Fraction], Iterable[tuple[Monomial, Fraction]]] = (),
                 unsorted: bool = False):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Fraction] = {}
        for mono, coeff in items:
            acc[mono] = acc.get(mono, 0) + Fraction(coeff)
        self._terms: tuple[tuple[Monomial, Fraction], ...] = tuple(
            sorted(((m, c) for m, c in acc.items() if c != 0), key=lambda t: t[0]))
        self._hash = None
        self.unsorted = unsorted

    @classmethod
    def _clean(cls, terms: dict, unsorted: bool = False) -> "NormalForm":
        """Fast constructor for dicts of nonzero Fractions (no copying checks)."""
        self = cls.__new__(cls)
        self._terms = tuple(sorted(terms.items(), key=lambda t: t[0]))
        self._hash = None
        self.unsorted = unsorted
        return self

    @classmethod
    def unit(cls, coeff=1) -> "NormalForm":
        return cls({UNIT_MONOMIAL: Fraction(coeff)})

    @classmethod
    def monomial(cls, mono: Monomial, coeff=1) -> "NormalForm":
        return cls({tuple(mono): Fraction(coeff)})

    def terms(self) -> tuple[tuple[Monomial, Fraction], ...]:
        return self._terms

    def as_dict(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def monomials(self) -> list[Monomial]:
        return [m for m, _ in self._terms]

    def coefficient(self, mono: Monomial) -> Fraction:
        for m, c in self._terms:
            if m == mono:
                return c
        return Fraction(0)

    def is_zero(self) -> bool:
        return not self._terms

    def scalar_value(self):
        """The coefficient if this is a multiple of the unit field, else None."""
        if not self._terms:
            return Fraction(0)
        if len(self._terms) == 1 and self._terms[0][0] == UNIT_MONOMIAL:
            return self._terms[0][1]
        return None

    def ratio_to(self, other: "NormalForm"):
        """Return ``k`` with ``self == k * other``, or None if no such scalar exists."""
        if other.is_zero():
            return Fraction(0) if self.is_zero() else None
        if self.is_zero():
            return Fraction(0)
        if [m for m, _ in self._terms] != [m for m, _ in other._terms]:
            return None
        k = self._terms[0][1] / other._terms[0][1]
        if all(c == k * d for (_, c), (_, d) in zip(self._terms, other._terms)):
            return k
        return None

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, NormalForm):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __add__(self, other: "NormalForm") -> "NormalForm":
        if not isinstance(other, NormalForm):
            return NotImplemented
        return NormalForm(self._terms + other._terms, self.unsorted or other.unsorted)

    def __sub__(self, other: "NormalForm") -> "NormalForm":
        if not isinstance(other, NormalForm):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "NormalForm":
        return self * -1

    def __mul__(self, k) -> "NormalForm":
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        if not k:
            return NormalForm((), self.unsorted)
        k = Fraction(k)
        out = NormalForm.__new__(NormalForm)
        out._terms = tuple((m, c * k) for m, c in self._terms)
        out._hash = None
        out.unsorted = self.unsorted
        return out

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"NormalForm({format_nf(self)!r})"

    def __str__(self) -> str:
        return format_nf(self)


ZERO = NormalForm()


class SingularPart(Mapping):
    """Pole order -> NormalForm for the singular part of an OPE.

    The coefficient of ``(z-w)^(-k)`` is stored under key ``k``; it equals the
    residue product with index ``k - 1``.  Zero entries are dropped.
    """

    __slots__ = ("_poles",)

    def __init__(self, poles: Union[Mapping[int, NormalForm], Iterable[tuple[int, NormalForm]]] = ()):
        items = poles.items() if isinstance(poles, Mapping) else poles
        acc: dict[int, NormalForm] = {}
        for pole, nf in items:
            if pole < 1:
                raise ValueError(f"pole order must be >= 1, got {pole}")
            acc[pole] = acc[pole] + nf if pole in acc else nf
        self._poles = {k: acc[k] for k in sorted(acc, reverse=True) if not acc[k].is_zero()}

    @classmethod
    def from_products(cls, products: Mapping[int, NormalForm]) -> "SingularPart":
        """Build from residue products keyed by ``n >= 0``."""
        return cls({n + 1: nf for n, nf in products.items()})

    def products(self) -> dict[int, NormalForm]:
        return {k - 1: v for k, v in self._poles.items()}

    def max_pole(self) -> int:
        return max(self._poles, default=0)

    def __getitem__(self, pole: int) -> NormalForm:
        return self._poles[pole]

    def get(self, pole, default=ZERO):
        return self._poles.get(pole, default)

    def __iter__(self):
        return iter(self._poles)

    def __len__(self) -> int:
        return len(self._poles)

    def __eq__(self, other) -> bool:
        if isinstance(other, SingularPart):
            return self._poles == other._poles
        if isinstance(other, Mapping):
            return self._poles == {k: v for k, v in other.items() if not v.is_zero()}
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._poles.items()))

    def __add__(self, other: "SingularPart") -> "SingularPart":
        return SingularPart(list(self._poles.items()) + list(other._poles.items()))

    def __mul__(self, k) -> "SingularPart":
        return SingularPart({p: nf * k for p, nf in self._poles.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "SingularPart":
        return self * -1

    def __repr__(self) -> str:
        return f"SingularPart({format_poles(self)!r})"


def skew_transform(products: Mapping[int, NormalForm], sign: int, derive) -> dict[int, NormalForm]:
    """Residue products ``B_(m)A`` (m >= 0) from those of ``A_(n)B``.

    ``derive(nf, i)`` must return the i-th ordinary derivative of ``nf``;
    divided powers are applied here.
    """
    out: dict[int, NormalForm] = {}
    for n, nf in products.items():
        for m in range(0, n + 1):
            i = n - m
            term = derive(nf, i) * (Fraction(sign * (-1) ** (m + i + 1), factorial(i)))
            out[m] = out[m] + term if m in out else term
    return {m: nf for m, nf in out.items() if not nf.is_zero()}


# --------------------------------------------------------------------------
# printing


def format_factor(f: Factor) -> str:
    name, order = f
    if order == 0:
        return name
    if order == 1:
        return f"d {name}"
    return f"d{{{order}}} {name}"


def format_monomial(mono: Monomial) -> str:
    if not mono:
        return "1"
    if len(mono) == 1:
        return format_factor(mono[0])
    return f":{format_factor(mono[0])} {format_monomial(mono[1:])}:"


def format_nf(nf: NormalForm, times: str = "*") -> str:
    if nf.is_zero():
        return "0"
    parts = []
    for idx, (mono, coeff) in enumerate(nf):
        mag = abs(coeff)
        body = format_monomial(mono)
        if mag != 1:
            body = f"{format_scalar(mag)}{times}{body}"
        if idx == 0:
            parts.append(f"-{body}" if coeff < 0 else body)
        else:
            parts.append(f" - {body}" if coeff < 0 else f" + {body}")
    return "".join(parts)


def format_poles(sp: SingularPart, times: str = "*", render=None) -> str:
    """Pole table, highest pole first: ``"4: 1/2*1 | 2: 2*T | 1: d T"``."""
    if not sp:
        return "{}"
    render = render or (lambda nf: format_nf(nf, times))
    return " | ".join(f"{pole}: {render(nf)}" for pole, nf in sp.items())


def format_expr(e: FieldExpr, nested: bool = False) -> str:
    """Print a tree so that the expression parser rebuilds the same tree."""
    if isinstance(e, Unit):
        return "1"
    if isinstance(e, Gen):
        return e.name
    if isinstance(e, Deriv):
        prefix = "d" if e.order == 1 else f"d{{{e.order}}}"
        return f"{prefix} {format_expr(e.child, True)}"
    if isinstance(e, Nop):
        return f":{format_expr(e.left, True)} {format_expr(e.right, True)}:"
    parts = []
    for idx, (coeff, child) in enumerate(e.terms):
        body = f"{format_scalar(abs(coeff))}*{format_expr(child, True)}"
        if idx == 0:
            parts.append(f"-{body}" if coeff < 0 else body)
        else:
            parts.append(f" - {body}" if coeff < 0 else f" + {body}")
    text = "".join(parts)
    return f"({text})" if nested else text
