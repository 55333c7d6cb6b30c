"""Words in the ten generators, indexed by 10-component multi-indices."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

from .algebra import GENERATOR_NAMES, GENERATORS, GammaOp, compose


@dataclass(frozen=True)
class MultiIndex10:
    """Exponent vector over the published generator ordering."""

    exponents: tuple

    def __post_init__(self):
        if len(self.exponents) != 10:
            raise ValueError("need exactly 10 exponents")
        if any(e < 0 for e in self.exponents):
            raise ValueError("exponents must be non-negative")
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))

    @property
    def order(self) -> int:
        return sum(self.exponents)

    def factor_sequence(self, ordering=None) -> tuple:
        """Generator indices left to right; the rightmost applies first.

        ``ordering`` permutes the published generator sequence; exponents
        keep their published meaning either way.
        """
        if ordering is None:
            ordering = range(10)
        seq = []
        for i in ordering:
            seq.extend([i] * self.exponents[i])
        return tuple(seq)

    def __str__(self):
        bits = []
        for name, e in zip(GENERATOR_NAMES, self.exponents):
            if e == 1:
                bits.append(name)
            elif e > 1:
                bits.append(f"{name}^{e}")
        return "id" if not bits else " ".join(bits)


def enumerate_words(max_order: int) -> list[MultiIndex10]:
    """All multi-indices with order <= max_order, graded lexicographic.

    The count is C(max_order + 10, 10).
    """
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining + 1):
            rec(prefix + (e,), remaining - e, slots - 1)

    for total in range(max_order + 1):
        rec((), total, 10)
    return [MultiIndex10(e) for e in out]


def word_count(max_order: int) -> int:
    return comb(max_order + 10, 10)


@lru_cache(maxsize=4096)
def _word_operator_cached(seq: tuple) -> GammaOp:
    op = GammaOp.identity()
    for i in seq:
        op = compose(op, GENERATORS[i])
    return op


def word_operator(alpha: MultiIndex10, ordering=None) -> GammaOp:
    """Canonical form of the operator product selected by alpha."""
    return _word_operator_cached(alpha.factor_sequence(ordering))
