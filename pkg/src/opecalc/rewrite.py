"""Rewriting rules shared by normal ordering and residue products.

Everything here works on monomials of an algebra and on plain term
dictionaries ``{monomial: Fraction}``.  Results are memoised per algebra;
cached dictionaries are never mutated after they are stored.

Rules used (``s`` is the Koszul sign of the two operands that swap places):

* ``:f :h Y:: = s :h :f Y:: + sum_j (-1)^j (f_(j)h)_(-2-j) Y``   (sorting)
* ``(f_(-1)X)_(q)C = sum_i f_(-i-1)(X_(q+i)C) + s X_(q-i-1)(f_(i)C)``
  (re-association at q = -1 and products with a composite left operand)
* ``A_(n)(h_(-1)Y) = (A_(n)h)_(-1)Y + s h_(-1)(A_(n)Y)
  + sum_{i<n} binom(n, i) (A_(i)h)_(n-i-1)Y``
* ``(dA)_(n)B = -n A_(n-1)B`` and ``A_(n)dB = d(A_(n)B) + n A_(n-1)B``
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from math import factorial

from .algebra import AlgebraDef
from .expr import ZERO, Factor, Monomial, NormalForm, ParityError, UnknownNameError, binomial

Terms = dict  # {Monomial: Fraction}
Products = dict  # {n >= 0: Terms}


def add_into(acc: Terms, terms: Terms, coeff=1) -> None:
    if not coeff:
        return
    for mono, c in terms.items():
        value = acc.get(mono, 0) + c * coeff
        if value:
            acc[mono] = value
        else:
            acc.pop(mono, None)


def scaled(terms: Terms, coeff) -> Terms:
    if not coeff:
        return {}
    return {m: c * coeff for m, c in terms.items()}


def _clean(products) -> Products:
    return {n: t for n, t in sorted(products.items()) if t}


class Rewriter:
    def __init__(self, alg: AlgebraDef):
        self.alg = alg
        self.parities = {g.name: g.parity for g in alg.generators}
        self.sorting = alg.degree_reducing
        self.table: dict[tuple[str, str], Products] = {
            pair: {pole - 1: nf.as_dict() for pole, nf in entry.items()}
            for pair, entry in alg.contractions.items()
        }
        self._insert: dict = {}
        self._nop: dict = {}
        self._contract: dict = {}
        self._factor_contract: dict = {}
        self._derive: dict = {}
        self._nf_contract: dict = {}
        self._nf_product: dict = {}
        self._nf_parity: dict = {}
        self.canonical: dict = {}  # NormalForm -> its canonical form

    # ------------------------------------------------------------------ parity
    def parity(self, mono: Monomial) -> int:
        try:
            return sum(self.parities[g] for g, _ in mono) & 1
        except KeyError as exc:
            raise UnknownNameError(f"unknown generator {exc.args[0]!r}") from None

    def sign(self, a: Monomial, b: Monomial) -> int:
        return -1 if self.parity(a) and self.parity(b) else 1

    def is_fermion(self, f: Factor) -> bool:
        return self.parities[f[0]] == 1

    # ------------------------------------------------------------- derivatives
    def derive_mono(self, mono: Monomial, k: int) -> Terms:
        """Ordinary k-th derivative of a canonical monomial."""
        if k == 0:
            return {mono: Fraction(1)}
        if not mono:
            return {}
        key = (mono, k)
        hit = self._derive.get(key)
        if hit is not None:
            return hit
        if k == 1:
            out: Terms = {}
            for j, (g, a) in enumerate(mono):
                factors = mono[:j] + ((g, a + 1),) + mono[j + 1:]
                add_into(out, self.from_factors(factors))
        else:
            out = {}
            for m, c in self.derive_mono(mono, k - 1).items():
                add_into(out, self.derive_mono(m, 1), c)
        self._derive[key] = out
        return out

    def derive(self, terms: Terms, k: int) -> Terms:
        out: Terms = {}
        for m, c in terms.items():
            add_into(out, self.derive_mono(m, k), c)
        return out

    def from_factors(self, factors) -> Terms:
        acc: Terms = {(): Fraction(1)}
        for f in reversed(factors):
            acc = self.insert_terms(f, acc)
        return acc

    # ---------------------------------------------------------- normal order
    def insert(self, f: Factor, mono: Monomial) -> Terms:
        """``:f mono:`` for a single factor ``f`` and a canonical monomial."""
        if not self.sorting or not mono or f < mono[0]:
            return {(f,) + mono: Fraction(1)}
        key = (f, mono)
        hit = self._insert.get(key)
        if hit is not None:
            return hit
        h, rest = mono[0], mono[1:]
        if f == h and not self.is_fermion(f):
            out = {(f,) + mono: Fraction(1)}
        else:
            corr: Terms = {}
            for j, w in self.contract_factors(f, h).items():
                dw = self.derive(w, j + 1)
                add_into(corr, self.nop_terms(dw, {rest: Fraction(1)}), Fraction((-1) ** j, factorial(j + 1)))
            if f == h:
                out = scaled(corr, Fraction(1, 2))
            else:
                out = {}
                sign = -1 if self.is_fermion(f) and self.is_fermion(h) else 1
                add_into(out, self.insert_terms(h, self.insert(f, rest)), sign)
                add_into(out, corr)
        self._insert[key] = out
        return out

    def insert_terms(self, f: Factor, terms: Terms) -> Terms:
        out: Terms = {}
        for m, c in terms.items():
            add_into(out, self.insert(f, m), c)
        return out

    def nop(self, left: Monomial, right: Monomial) -> Terms:
        """Normally ordered product ``:left right:`` of canonical monomials."""
        if not left:
            return {right: Fraction(1)}
        if not right:
            return {left: Fraction(1)}
        if len(left) == 1:
            return self.insert(left[0], right)
        key = (left, right)
        hit = self._nop.get(key)
        if hit is not None:
            return hit
        f, rest = left[0], left[1:]
        g, a = f
        out = self.insert_terms(f, self.nop(rest, right))
        # f_(-i-1)(rest_(i-1) right) for i >= 1
        for k, w in self.contract(rest, right).items():
            i = k + 1
            add_into(out, self.insert_terms((g, a + i), w), Fraction(1, factorial(i)))
        # s rest_(-i-2)(f_(i) right) for i >= 0
        sign = self.sign((f,), rest)
        for i, w in self.contract((f,), right).items():
            d_rest = self.derive_mono(rest, i + 1)
            add_into(out, self.nop_terms(d_rest, w), Fraction(sign, factorial(i + 1)))
        self._nop[key] = out
        return out

    def nop_terms(self, left: Terms, right: Terms) -> Terms:
        out: Terms = {}
        for lm, lc in left.items():
            for rm, rc in right.items():
                add_into(out, self.nop(lm, rm), lc * rc)
        return out

    # ------------------------------------------------------ residue products
    def contract_factors(self, f: Factor, h: Factor) -> Products:
        key = (f, h)
        hit = self._factor_contract.get(key)
        if hit is not None:
            return hit
        (g, a), (k, b) = f, h
        out: defaultdict = defaultdict(dict)
        if a > 0:
            # (d^a g)_(n) X = (-1)^a n!/(n-a)! g_(n-a) X
            for m, w in self.contract_factors((g, 0), h).items():
                n = m + a
                add_into(out[n], w, Fraction((-1) ** a * factorial(n), factorial(m)))
        elif b > 0:
            for m, w in self.contract_factors(f, (k, b - 1)).items():
                add_into(out[m], self.derive(w, 1))
                add_into(out[m + 1], w, m + 1)
        else:
            if g not in self.parities or k not in self.parities:
                raise UnknownNameError(f"unknown generator {g if g not in self.parities else k!r}")
            for n, w in self.table.get((g, k), {}).items():
                add_into(out[n], w)
        result = _clean(out)
        self._factor_contract[key] = result
        return result

    def contract(self, left: Monomial, right: Monomial) -> Products:
        """All residue products ``left_(n) right`` with n >= 0."""
        if not left or not right:
            return {}
        if len(left) == 1 and len(right) == 1:
            return self.contract_factors(left[0], right[0])
        key = (left, right)
        hit = self._contract.get(key)
        if hit is not None:
            return hit
        out: defaultdict = defaultdict(dict)
        if len(left) >= 2:
            f, rest = left[0], left[1:]
            g, a = f
            sign = self.sign((f,), rest)
            for k, w in self.contract(rest, right).items():
                for q in range(k + 1):
                    i = k - q
                    add_into(out[q], self.insert_terms((g, a + i), w), Fraction(1, factorial(i)))
            for i, w in self.contract((f,), right).items():
                for q in range(i + 1):
                    j = i - q
                    d_rest = self.derive_mono(rest, j)
                    add_into(out[q], self.nop_terms(d_rest, w), Fraction(sign, factorial(j)))
                for m, v in self.contract_terms({rest: Fraction(1)}, w).items():
                    add_into(out[i + 1 + m], v, sign)
        else:
            h, rest = right[0], right[1:]
            sign = self.sign(left, (h,))
            with_h = self.contract(left, (h,))
            for n, w in with_h.items():
                add_into(out[n], self.nop_terms(w, {rest: Fraction(1)}))
            for n, w in self.contract(left, rest).items():
                add_into(out[n], self.insert_terms(h, w), sign)
            for i, w in with_h.items():
                for m, v in self.contract_terms(w, {rest: Fraction(1)}).items():
                    n = i + m + 1
                    add_into(out[n], v, binomial(n, i))
        result = _clean(out)
        self._contract[key] = result
        return result

    def contract_terms(self, left: Terms, right: Terms) -> Products:
        out: defaultdict = defaultdict(dict)
        for lm, lc in left.items():
            for rm, rc in right.items():
                for n, w in self.contract(lm, rm).items():
                    add_into(out[n], w, lc * rc)
        return _clean(out)

    def product(self, left: Terms, n: int, right: Terms) -> Terms:
        """``left_(n) right`` for any integer n."""
        if n >= 0:
            return self.contract_terms(left, right).get(n, {})
        k = -n - 1
        return scaled(self.nop_terms(self.derive(left, k), right), Fraction(1, factorial(k)))


    # NormalForm-level entry points, memoised on (a, n, b)
    def contract_nf(self, a: NormalForm, b: NormalForm) -> dict[int, NormalForm]:
        key = (a, b)
        hit = self._nf_contract.get(key)
        if hit is None:
            products = self.contract_terms(a.as_dict(), b.as_dict())
            hit = {n: NormalForm._clean(t) for n, t in products.items()}
            self._nf_contract[key] = hit
        return hit

    def product_nf(self, a: NormalForm, n: int, b: NormalForm) -> NormalForm:
        if n >= 0:
            return self.contract_nf(a, b).get(n, ZERO)
        key = (a, n, b)
        hit = self._nf_product.get(key)
        if hit is None:
            hit = NormalForm._clean(self.product(a.as_dict(), n, b.as_dict()))
            self._nf_product[key] = hit
        return hit

    def homogeneous_parity(self, a: NormalForm, role: str) -> int:
        hit = self._nf_parity.get(a)
        if hit is None:
            found = {self.parity(m) for m, _ in a}
            if len(found) > 1:
                raise ParityError(f"{role} operand has inhomogeneous parity; split it into even and odd parts")
            hit = self._nf_parity[a] = found.pop() if found else 0
        return hit

    def derive_nf(self, a: NormalForm, k: int) -> NormalForm:
        return NormalForm._clean(self.derive(a.as_dict(), k))


def rewriter_for(alg: AlgebraDef) -> Rewriter:
    rw = alg._cache.get("rewriter")
    if rw is None:
        rw = alg._cache.setdefault("rewriter", Rewriter(alg))
    return rw
