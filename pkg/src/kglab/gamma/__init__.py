"""Symbolic algebra of the ten symmetry generators and its discrete shadow."""

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
    d0,
    generator,
    generators,
    in_span,
    omega,
)
from .discrete import (
    apply_generator,
    apply_operator,
    apply_word,
    apply_word_window,
    leibniz_residual,
)
from .verify import (
    ClosureReport,
    structure_constant_rows,
    verify_box_invariance,
    verify_commutator_order_reduction,
    verify_jacobi,
    verify_lie_closure,
)
from .words import MultiIndex10, enumerate_words, word_count, word_operator

__all__ = [
    "GENERATOR_NAMES",
    "GENERATORS",
    "GammaOp",
    "SpanSolver",
    "MultiIndex10",
    "ClosureReport",
    "apply_generator",
    "apply_operator",
    "apply_word",
    "apply_word_window",
    "box",
    "box1",
    "commutator",
    "compose",
    "d",
    "d0",
    "enumerate_words",
    "generator",
    "generators",
    "in_span",
    "leibniz_residual",
    "omega",
    "structure_constant_rows",
    "verify_box_invariance",
    "verify_commutator_order_reduction",
    "verify_jacobi",
    "verify_lie_closure",
    "word_count",
    "word_operator",
]
