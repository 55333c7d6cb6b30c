"""Machine verification of the generator algebra's structural identities.

Everything here is exact: results are identically-zero operators or exact
rational coefficients, never approximations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product

from .algebra import (
    GENERATOR_NAMES,
    GENERATORS,
    GammaOp,
    SpanSolver,
    box,
    box1,
    commutator,
    compose,
    d,
    in_span,
)
from .words import MultiIndex10, enumerate_words, word_operator


@dataclass
class ClosureReport:
    """Structure constants of all generator pairs, or the offending pair."""

    closed: bool
    table: list = field(default_factory=list)  # (i, j, 10-tuple of Fractions)
    failing_pair: tuple = None

    def constants(self):
        vals = set()
        for _, _, coeffs in self.table:
            vals.update(coeffs)
        return vals


def verify_lie_closure() -> ClosureReport:
    """Check every commutator of generator pairs lands back in the span."""
    table = []
    for i in range(10):
        for j in range(i + 1, 10):
            bracket = commutator(GENERATORS[i], GENERATORS[j])
            coeffs = in_span(bracket)
            if coeffs is None:
                raise AssertionError(
                    f"[{GENERATOR_NAMES[i]}, {GENERATOR_NAMES[j]}] left the span: {bracket}"
                )
            table.append((i, j, coeffs))
    return ClosureReport(closed=True, table=table)


@dataclass
class InvarianceReport:
    commuting: bool
    checked: list = field(default_factory=list)


def verify_box_invariance() -> InvarianceReport:
    """Each generator must commute with the wave operator and its mass form."""
    bx, bx1 = box(), box1()
    checked = []
    for name, gen in zip(GENERATOR_NAMES, GENERATORS):
        for label, op in (("box", bx), ("box1", bx1)):
            rem = commutator(gen, op)
            if not rem.is_zero():
                raise AssertionError(f"[{name}, {label}] = {rem} != 0")
            checked.append((name, label))
    return InvarianceReport(commuting=True, checked=checked)


def verify_jacobi(indices=None) -> int:
    """Jacobi identity over generator triples; returns the triple count."""
    if indices is None:
        indices = range(10)
    count = 0
    gens = GENERATORS
    for a, b, c in product(indices, repeat=3):
        total = (
            commutator(gens[a], commutator(gens[b], gens[c]))
            + commutator(gens[b], commutator(gens[c], gens[a]))
            + commutator(gens[c], commutator(gens[a], gens[b]))
        )
        if not total.is_zero():
            raise AssertionError(f"Jacobi fails on triple {(a, b, c)}: {total}")
        count += 1
    return count


def _partial_words(order: int):
    """Pure partial-derivative prefixes of the given order, as index tuples."""
    return list(combinations_with_replacement(range(4), order))


def _prefix_op(prefix: tuple) -> GammaOp:
    op = GammaOp.identity()
    for a in prefix:
        op = compose(op, d(a))
    return op


class OrderReductionBasis:
    """Span of { partial-prefix * word } with word order below a cap."""

    def __init__(self, word_cap: int, prefix_order: int):
        self.word_cap = word_cap
        self.prefix_order = prefix_order
        self.solver = SpanSolver()
        for beta in enumerate_words(word_cap):
            wop = word_operator(beta)
            for prefix in _partial_words(prefix_order):
                label = (prefix, beta.exponents)
                self.solver.insert(compose(_prefix_op(prefix), wop), label)

    def certify(self, op: GammaOp):
        return self.solver.express(op)


@dataclass
class OrderReductionReport:
    order: int
    certified: list = field(default_factory=list)  # (alpha, partial, n_terms)
    second_order: bool = False


def verify_commutator_order_reduction(
    n: int, samples: int = 20, seed: int = 0, second_order: bool = True
) -> OrderReductionReport:
    """Certify [word, d] (and [word, dd]) reduce to lower-order words.

    For random words of order exactly n, the commutator with a first
    partial must be an exact combination of (partial * word') terms whose
    word part has order <= n-1; the second-order variant uses two partials.
    """
    if n > 3:
        raise ValueError("order-reduction checks are capped at n=3")
    if n < 1:
        raise ValueError("need word order >= 1")
    rng = random.Random(seed)
    basis1 = OrderReductionBasis(n - 1, 1)
    basis2 = OrderReductionBasis(n - 1, 2) if second_order else None
    report = OrderReductionReport(order=n, second_order=second_order)

    for _ in range(samples):
        exps = [0] * 10
        for _ in range(n):
            exps[rng.randrange(10)] += 1
        alpha = MultiIndex10(tuple(exps))
        wop = word_operator(alpha)
        for c in range(4):
            bracket = commutator(wop, d(c))
            combo = basis1.certify(bracket)
            if combo is None:
                raise AssertionError(
                    f"[{alpha}, {GENERATOR_NAMES[c] if c else 'dt'}] escaped the "
                    f"first-order reduction basis"
                )
            report.certified.append((alpha.exponents, (c,), len(combo)))
        if second_order:
            c1, c2 = rng.randrange(4), rng.randrange(4)
            dd = compose(d(c1), d(c2))
            bracket = commutator(wop, dd)
            combo = basis2.certify(bracket)
            if combo is None:
                raise AssertionError(
                    f"[{alpha}, d{c1} d{c2}] escaped the second-order reduction basis"
                )
            report.certified.append((alpha.exponents, (c1, c2), len(combo)))
    return report


def structure_constant_rows():
    """CSV-ready closure table rows: generator names plus 10 exact rationals."""
    report = verify_lie_closure()
    rows = []
    for i, j, coeffs in report.table:
        rows.append(
            [GENERATOR_NAMES[i], GENERATOR_NAMES[j]] + [str(Fraction(c)) for c in coeffs]
        )
    return rows
