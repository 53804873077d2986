import random
from fractions import Fraction

import pytest

from opecalc import load_preset
from opecalc.expr import Deriv, Gen, Nop, Sum, Unit

LAMBDAS = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))


@pytest.fixture(scope="session")
def boson():
    return load_preset("free-boson")


@pytest.fixture(scope="session")
def fermion():
    return load_preset("free-fermion")


@pytest.fixture(scope="session")
def ghost():
    """bc system at lambda = 2."""
    return load_preset("bc-ghost", {"L": 2})


@pytest.fixture(scope="session")
def ghosts():
    return {lam: load_preset("bc-ghost", {"L": lam}) for lam in LAMBDAS}


@pytest.fixture(scope="session")
def presets(boson, fermion, ghost):
    return {"free-boson": boson, "free-fermion": fermion, "bc-ghost": ghost}


# ---------------------------------------------------------------- corpus


def random_monomial_tree(rng, names, max_factors=3, max_order=2):
    """A tree without sums: parity and weight homogeneous by construction."""
    n = rng.randint(1, max_factors)
    leaves = []
    for _ in range(n):
        leaf = Gen(rng.choice(names))
        order = rng.randint(0, max_order)
        leaves.append(Deriv(order, leaf) if order else leaf)
    while len(leaves) > 1:
        i = rng.randrange(len(leaves) - 1)
        node = Nop(leaves[i], leaves[i + 1])
        if rng.random() < 0.15:
            node = Deriv(1, node)
        leaves[i:i + 2] = [node]
    return leaves[0]


def random_tree(rng, names, max_factors=3):
    """A general tree; may mix parities and weights and contain the unit."""
    kind = rng.random()
    if kind < 0.1:
        return Unit()
    if kind < 0.7:
        return random_monomial_tree(rng, names, max_factors)
    terms = []
    for _ in range(rng.randint(1, 3)):
        coeff = Fraction(rng.randint(-4, 4) or 1, rng.randint(1, 3))
        terms.append((coeff, random_monomial_tree(rng, names, max_factors)))
    return Sum(tuple(terms))


def corpus(alg, count, seed, homogeneous=False, max_factors=3):
    rng = random.Random(seed)
    names = list(alg.generator_names())
    make = random_monomial_tree if homogeneous else random_tree
    return [make(rng, names, max_factors) for _ in range(count)]


@pytest.fixture(scope="session")
def make_corpus():
    return corpus
