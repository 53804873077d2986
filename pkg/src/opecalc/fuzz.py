"""Exhaustive small-case checking of the residue-product identities.

Every operand combination from :func:`identity_pool` is run through the
Borcherds identity for all ``(p, q, r)`` in a window, through skew symmetry,
and through the two Wick specialisations, which are also compared summand
by summand with the Borcherds instances they come from.  Work can be spread
over processes; the report is assembled in a fixed order so it does not
depend on the worker count.
"""
from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

from .algebra import AlgebraDef, serialize_algebra
from .expr import format_nf
from .normal import normal_form
from .identities import (borcherds_residual, identity_pool, ncwick_residual, newwick_residual,
                         skew_residual)

IDENTITIES = ("borcherds", "skew", "ncwick", "newwick", "ncwick~borcherds", "newwick~borcherds")


@dataclass(frozen=True)
class Failure:
    identity: str
    operands: tuple  # rendered operands
    params: dict
    residual: str

    def as_dict(self) -> dict:
        return {"identity": self.identity, "operands": list(self.operands),
                "params": dict(self.params), "residual": self.residual}


@dataclass
class FuzzReport:
    algebra: str
    window: tuple
    pool: tuple
    counts: Counter = field(default_factory=Counter)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _failure(res) -> Failure:
    return Failure(res.name, tuple(format_nf(x) for x in res.operands), res.params, format_nf(res.residual))


def _negated(terms) -> Counter:
    return Counter(-t for t in terms)


def _check_triple(alg: AlgebraDef, a, b, c, lo: int, hi: int):
    counts: Counter = Counter()
    failures = []
    window = range(lo, hi + 1)

    def record(res):
        counts[res.name] += 1
        if not res.ok:
            failures.append(_failure(res))

    for p, q, r in product(window, repeat=3):
        if p < 0 and r < 0:
            continue
        record(borcherds_residual(a, b, c, p, q, r, alg))
    for p in window:
        if p < 0:
            continue
        nc = ncwick_residual(a, b, c, p, alg)
        record(nc)
        bor = borcherds_residual(a, b, c, p, -1, 0, alg)
        counts["ncwick~borcherds"] += 1
        if nc.term_multiset() != _negated(bor.terms):
            failures.append(Failure("ncwick~borcherds", tuple(format_nf(x) for x in nc.operands),
                                    {"p": p}, "summands differ"))
    for q in window:
        nw = newwick_residual(a, b, c, q, alg)
        record(nw)
        bor = borcherds_residual(a, b, c, 0, q, -1, alg)
        counts["newwick~borcherds"] += 1
        if nw.term_multiset() != bor.term_multiset():
            failures.append(Failure("newwick~borcherds", tuple(format_nf(x) for x in nw.operands),
                                    {"q": q}, "summands differ"))
    return counts, failures


def _check_pair(alg: AlgebraDef, a, b, lo: int, hi: int):
    counts: Counter = Counter()
    failures = []
    for m in range(lo, hi + 1):
        res = skew_residual(a, b, m, alg)
        counts[res.name] += 1
        if not res.ok:
            failures.append(_failure(res))
    return counts, failures


_WORKER: dict = {}


def _init_worker(text: str, pool) -> None:
    from .parser import parse_algebra

    alg = parse_algebra(text)
    _WORKER["alg"] = alg
    _WORKER["pool"] = identity_pool(alg) if pool is None else pool


def _run_unit(unit):
    alg, pool = _WORKER["alg"], _WORKER["pool"]
    kind, idx, lo, hi = unit
    operands = [pool[i] for i in idx]
    if kind == "triple":
        return _check_triple(alg, *operands, lo, hi)
    return _check_pair(alg, *operands, lo, hi)


def fuzz_identities(alg: AlgebraDef, lo: int = -3, hi: int = 3, workers: int = 1,
                    pool=None) -> FuzzReport:
    """Check every identity on the pool of ``alg`` with indices in ``[lo, hi]``.

    ``pool`` replaces the default operand pool (normal forms or expressions).
    """
    if lo > hi:
        raise ValueError("empty index window")
    custom = pool is not None
    pool = [normal_form(x, alg) for x in pool] if custom else identity_pool(alg)
    n = len(pool)
    units = [("triple", idx, lo, hi) for idx in product(range(n), repeat=3)]
    units += [("pair", idx, lo, hi) for idx in product(range(n), repeat=2)]
    report = FuzzReport(alg.fingerprint(), (lo, hi), tuple(format_nf(x) for x in pool))
    if workers <= 1:
        _WORKER.update(alg=alg, pool=pool)
        results = [_run_unit(u) for u in units]
    else:
        with ProcessPoolExecutor(workers, initializer=_init_worker,
                                 initargs=(serialize_algebra(alg), pool if custom else None)) as ex:
            results = list(ex.map(_run_unit, units, chunksize=max(1, len(units) // (8 * workers))))
    for counts, failures in results:
        report.counts.update(counts)
        report.failures.extend(failures)
    return report
