"""Exact symbolic algebra of polynomial-coefficient differential operators.

Operators live on functions of (t, x1, x2, x3).  A term is a monomial
coefficient t^a x1^b x2^c x3^d times a pure derivative word
dt^e d1^f d2^g d3^h, with an exact rational coefficient.  Canonical form
keeps every coefficient to the left of every derivative, merges like terms
and drops zeros, so structural equality decides operator equality and a
computed zero is an identity, not an approximation.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

# Variable order inside monomial and derivative exponent tuples: (t, x1, x2, x3).
_VAR_NAMES = ("t", "x1", "x2", "x3")
_DERIV_NAMES = ("dt", "d1", "d2", "d3")

Key = tuple  # ((poly exponents), (derivative orders))


class GammaOp:
    """A finite rational combination of monomial-coefficient derivative words."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for key, coeff in terms.items():
                c = Fraction(coeff)
                if c != 0:
                    clean[key] = clean.get(key, Fraction(0)) + c
            clean = {k: v for k, v in clean.items() if v != 0}
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("GammaOp is immutable")

    # --- constructors ---

    @classmethod
    def zero(cls) -> "GammaOp":
        return cls({})

    @classmethod
    def identity(cls) -> "GammaOp":
        return cls({((0, 0, 0, 0), (0, 0, 0, 0)): Fraction(1)})

    @classmethod
    def monomial(cls, coeff, poly=(0, 0, 0, 0), deriv=(0, 0, 0, 0)) -> "GammaOp":
        return cls({(tuple(poly), tuple(deriv)): Fraction(coeff)})

    @classmethod
    def coordinate(cls, a: int) -> "GammaOp":
        """Multiplication by x_a, with x_0 = t."""
        poly = [0, 0, 0, 0]
        poly[a] = 1
        return cls.monomial(1, poly=tuple(poly))

    @classmethod
    def derivative(cls, a: int) -> "GammaOp":
        """The plain partial d/dt (a=0) or d/dx_a."""
        deriv = [0, 0, 0, 0]
        deriv[a] = 1
        return cls.monomial(1, deriv=tuple(deriv))

    # --- ring structure ---

    def __add__(self, other: "GammaOp") -> "GammaOp":
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = terms.get(key, Fraction(0)) + coeff
        return GammaOp(terms)

    def __sub__(self, other: "GammaOp") -> "GammaOp":
        return self + (-other)

    def __neg__(self) -> "GammaOp":
        return GammaOp({k: -c for k, c in self.terms.items()})

    def scale(self, c) -> "GammaOp":
        c = Fraction(c)
        return GammaOp({k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, GammaOp):
            return compose(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other) -> bool:
        return isinstance(other, GammaOp) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> int:
        """Highest total derivative order appearing."""
        return max((sum(d) for _, d in self.terms), default=0)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (poly, deriv), coeff in self.terms.items():
            bits = []
            for name, e in zip(_VAR_NAMES, poly):
                if e == 1:
                    bits.append(name)
                elif e > 1:
                    bits.append(f"{name}^{e}")
            for name, e in zip(_DERIV_NAMES, deriv):
                if e == 1:
                    bits.append(name)
                elif e > 1:
                    bits.append(f"{name}^{e}")
            body = "*".join(bits) if bits else "1"
            if coeff == 1 and bits:
                parts.append(body)
            elif coeff == -1 and bits:
                parts.append(f"-{body}")
            else:
                parts.append(f"{coeff}*{body}" if bits else f"{coeff}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    __repr__ = __str__


def _deriv_of_monomial(poly: tuple, deriv: tuple):
    """Apply the derivative word to a coefficient monomial.

    Yields (coefficient, remaining monomial) for the single surviving term,
    or nothing when any exponent is exhausted.
    """
    coeff = 1
    out = []
    for e, d in zip(poly, deriv):
        if d > e:
            return None
        for j in range(d):
            coeff *= e - j
        out.append(e - d)
    return Fraction(coeff), tuple(out)


def compose(A: GammaOp, B: GammaOp) -> GammaOp:
    """Operator product AB in canonical form.

    Derivatives of A distribute over B's polynomial coefficients by the
    multivariate Leibniz rule before the residual derivatives concatenate
    with B's word.
    """
    terms: dict[Key, Fraction] = {}
    for (p1, d1), c1 in A.terms.items():
        for (p2, d2), c2 in B.terms.items():
            base = c1 * c2
            # split d1 = gamma + (d1 - gamma); gamma hits p2
            ranges = [range(min(a, b) + 1) for a, b in zip(d1, p2)]
            for g0 in ranges[0]:
                for g1 in ranges[1]:
                    for g2 in ranges[2]:
                        for g3 in ranges[3]:
                            gamma = (g0, g1, g2, g3)
                            hit = _deriv_of_monomial(p2, gamma)
                            if hit is None:
                                continue
                            dcoeff, prem = hit
                            mult = Fraction(1)
                            for a, g in zip(d1, gamma):
                                mult *= comb(a, g)
                            poly = tuple(a + b for a, b in zip(p1, prem))
                            deriv = tuple(a - g + b for a, g, b in zip(d1, gamma, d2))
                            key = (poly, deriv)
                            terms[key] = terms.get(key, Fraction(0)) + base * mult * dcoeff
    return GammaOp(terms)


def commutator(A: GammaOp, B: GammaOp) -> GammaOp:
    """[A, B] = AB - BA in canonical form."""
    return compose(A, B) - compose(B, A)


# --- the ten symmetry generators -------------------------------------------
#
# Published ordering: (dt, d1, d2, d3, O12, O23, O31, O01, O02, O03).
# The algebra exposes d/dt directly; identities that are usually written
# with the opposite-sign time derivative map onto this basis with a sign
# flip on the dt coefficient (see ``d0``).

GENERATOR_NAMES = ("dt", "d1", "d2", "d3", "O12", "O23", "O31", "O01", "O02", "O03")


def d(a: int) -> GammaOp:
    """d/dt for a=0, d/dx_a for a in 1..3."""
    return GammaOp.derivative(a)


def d0() -> GammaOp:
    """The signed time derivative -d/dt used in covariant-index identities."""
    return -GammaOp.derivative(0)


def omega(a: int, b: int) -> GammaOp:
    """Rotation x_a d_b - x_b d_a; mixed (0,i) pairs give t d_i + x_i dt."""
    if not (0 <= a <= 3 and 0 <= b <= 3 and a != b):
        raise ValueError("omega indices need distinct values in 0..3")
    da = d0() if a == 0 else d(a)
    db = d0() if b == 0 else d(b)
    return compose(GammaOp.coordinate(a), db) - compose(GammaOp.coordinate(b), da)


def generators() -> tuple:
    """The ten generators in the published ordering."""
    return (
        d(0), d(1), d(2), d(3),
        omega(1, 2), omega(2, 3), omega(3, 1),
        omega(0, 1), omega(0, 2), omega(0, 3),
    )


GENERATORS = generators()
_GEN_INDEX = {name: i for i, name in enumerate(GENERATOR_NAMES)}


def generator(which) -> GammaOp:
    if isinstance(which, str):
        which = _GEN_INDEX[which]
    return GENERATORS[which]


def box() -> GammaOp:
    """The wave operator dt^2 - d1^2 - d2^2 - d3^2."""
    return (
        GammaOp.monomial(1, deriv=(2, 0, 0, 0))
        - GammaOp.monomial(1, deriv=(0, 2, 0, 0))
        - GammaOp.monomial(1, deriv=(0, 0, 2, 0))
        - GammaOp.monomial(1, deriv=(0, 0, 0, 2))
    )


def box1() -> GammaOp:
    """The Klein-Gordon operator: wave operator plus the identity."""
    return box() + GammaOp.identity()


# --- exact span solving -----------------------------------------------------


class SpanSolver:
    """Incremental exact Gaussian elimination over canonical monomial keys.

    Basis operators are inserted once; ``express`` then writes a target as
    an exact rational combination of the inserted ones, or returns None as
    a certified non-membership (the reduced remainder is nonzero).
    """

    def __init__(self):
        # pivot invariant: pvec = sum(pcombo[lbl] * basis[lbl]), lead coeff 1
        self._pivots: dict[Key, tuple[dict, dict]] = {}

    def _reduce(self, vec: dict, combo: dict, sign: int):
        vec = dict(vec)
        combo = dict(combo)
        while vec:
            candidates = [k for k in vec if k in self._pivots]
            if not candidates:
                break
            key = max(candidates)
            factor = vec[key]
            pvec, pcombo = self._pivots[key]
            for k, c in pvec.items():
                nv = vec.get(k, Fraction(0)) - factor * c
                if nv == 0:
                    vec.pop(k, None)
                else:
                    vec[k] = nv
            for lbl, c in pcombo.items():
                nc = combo.get(lbl, Fraction(0)) + sign * factor * c
                if nc == 0:
                    combo.pop(lbl, None)
                else:
                    combo[lbl] = nc
        return vec, combo

    def insert(self, op: GammaOp, label) -> None:
        vec, combo = self._reduce(dict(op.terms), {label: Fraction(1)}, sign=-1)
        if not vec:
            return  # dependent on earlier basis elements
        lead = max(vec)
        inv = 1 / vec[lead]
        vec = {k: c * inv for k, c in vec.items()}
        combo = {lbl: c * inv for lbl, c in combo.items()}
        self._pivots[lead] = (vec, combo)

    def express(self, op: GammaOp):
        """Exact coefficients {label: c} with op = sum c * basis, else None."""
        vec, combo = self._reduce(dict(op.terms), {}, sign=+1)
        if vec:
            return None
        return combo


def in_span(A: GammaOp):
    """Write A as an exact combination of the ten generators.

    Returns a 10-tuple of Fractions in the published generator ordering, or
    None when A lies outside the span (the certified negative result).
    """
    solver = SpanSolver()
    for i, gen in enumerate(GENERATORS):
        solver.insert(gen, i)
    combo = solver.express(A)
    if combo is None:
        return None
    return tuple(combo.get(i, Fraction(0)) for i in range(10))
