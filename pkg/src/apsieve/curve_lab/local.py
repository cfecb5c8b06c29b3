"""Local square classes and bounded-precision point searches at finite and real places."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from apsieve.exact_arith import (
    QuadField,
    QuadFieldElem,
    element_valuation,
    prime_elements,
    valuation,
)

# A value at a place is "undecided" when the working precision cannot pin its square class.
UNDECIDED = None


def _den(x) -> int:
    if isinstance(x, QuadFieldElem):
        return math.lcm(x.u.denominator, x.v.denominator)
    return Fraction(x).denominator


@dataclass(frozen=True)
class Place:
    """A finite place of Q (``field is None``) or of Q(sqrt D), above the prime ``p``."""

    field: Optional[QuadField]
    p: int
    pi: Optional[QuadFieldElem] = None

    @property
    def e(self) -> int:
        if self.field is None:
            return 1
        return 2 if self.field.D % self.p == 0 or (self.p == 2 and self.field.D % 4 != 1) else 1

    @property
    def v2(self) -> int:
        """Valuation of 2 at this place."""
        return self.e if self.p == 2 else 0

    @property
    def square_precision(self) -> int:
        # units congruent to a square modulo 4*pi are squares
        return 2 * self.v2 + 1

    def val(self, x) -> int:
        if not x:
            raise ValueError("valuation of zero")
        if self.field is None:
            return valuation(Fraction(x), self.p)
        d = _den(x)
        x = x * d
        return element_valuation(x, self.pi) - self.e * valuation(d, self.p)

    def is_square(self, x) -> bool:
        if not x:
            return True
        if self.field is None:
            x = Fraction(x)
            v = valuation(x, self.p)
            if v % 2:
                return False
            unit = x / Fraction(self.p) ** v
            a = unit.numerator * unit.denominator  # same class, integral
            if self.p == 2:
                return a % 8 == 1
            return pow(a % self.p, (self.p - 1) // 2, self.p) == 1
        d = _den(x)
        x = x * (d * d)
        v = element_valuation(x, self.pi)
        if v % 2:
            return False
        unit = x / self.pi**v
        M = _table_modulus(self)
        return (int(unit.u) % M, int(unit.v) % M) in _unit_square_table(self)

    def __str__(self):
        if self.field is None:
            return f"Q_{self.p}"
        return f"{self.field}@({self.pi})"


def _table_modulus(place: Place) -> int:
    m = place.square_precision
    return place.p ** (-(-m // place.e))


@lru_cache(maxsize=None)
def _unit_square_table(place: Place) -> frozenset:
    """Residues (u mod M, v mod M) of integral units that are squares in the completion."""
    field, p, pi = place.field, place.p, place.pi
    M = _table_modulus(place)
    m = place.square_precision
    reps = [(a, b) for a in range(M) for b in range(M)]

    def is_unit(a, b):
        return not pi.divides(field(a, b))

    squares = set()
    for a, b in reps:
        if is_unit(a, b):
            s = field(a, b) ** 2
            squares.add((int(s.u) % M, int(s.v) % M))
    deep = [(a, b) for a, b in reps if (a, b) == (0, 0) or element_valuation(field(a, b), pi) >= m]
    return frozenset(((a + c) % M, (b + d) % M) for a, b in squares for c, d in deep)


def places_over(field: Optional[QuadField], p: int) -> list[Place]:
    if field is None:
        return [Place(None, p)]
    return [Place(field, p, pi) for pi in prime_elements(field, p)]


def decide_square(place: Place, value, scale_val: int, N: int):
    """Square class of ``value`` valid for every p^N-perturbation of the inputs.

    ``scale_val`` is the valuation of the constant multiplying the form, so the
    perturbation has valuation at least ``scale_val + N*e``.
    """
    limit = scale_val + N * place.e
    if not value:
        return UNDECIDED
    v = place.val(value)
    if v >= limit:
        return UNDECIDED
    if v % 2:
        return False
    if v + place.square_precision <= limit:
        return place.is_square(value)
    return UNDECIDED


@dataclass
class LocalCondition:
    """``form(x, z)`` must be a square at ``place``; ``form`` is homogeneous with
    integral coefficients times the constant of valuation ``scale_val``."""

    place: Place
    form: Callable
    scale_val: int


def _digits(field: Optional[QuadField], p: int, rational_x: bool):
    if field is None or rational_x:
        return [Fraction(d) for d in range(p)]
    return [field(a, b) for a in range(p) for b in range(p)]


def search_local_point(
    conditions: Sequence[LocalCondition],
    p: int,
    field: Optional[QuadField] = None,
    rational_x: bool = True,
    max_level: int = 8,
    node_budget: int = 200_000,
    hensel: Optional[Callable] = None,
):
    """Look for a primitive (x : z) over Z_p (or O_K completed) meeting every condition.

    Returns ``(x, z)`` residues of a witness, False when every branch was
    refuted, or None when the budget ran out with undecided branches.
    ``hensel(x, z, chart)``, when given, may certify a root near a node.
    """
    digits = _digits(field, p, rational_x)
    zero = Fraction(0) if (field is None or rational_x) else field(0)
    one = zero + 1
    # chart 1: z = 1, x free;  chart 2: x = 1, z divisible by p
    frontier = [(d, one, 1, 1) for d in digits] + [(one, zero, 1, 2)]
    nodes = 0
    unknown = False
    while frontier:
        nxt = []
        for x, z, level, chart in frontier:
            nodes += 1
            if nodes > node_budget:
                return None
            verdict = True
            for c in conditions:
                r = decide_square(c.place, c.form(x, z), c.scale_val, level)
                if r is False:
                    verdict = False
                    break
                if r is UNDECIDED:
                    verdict = UNDECIDED
            if verdict is True or (verdict is UNDECIDED and hensel is not None and hensel(x, z, chart)):
                return (x, z)
            if verdict is False:
                continue
            if level >= max_level:
                unknown = True
                continue
            step = Fraction(p) ** level
            for d in digits:
                if chart == 1:
                    nxt.append((x + step * d, z, level + 1, 1))
                else:
                    nxt.append((x, z + step * d, level + 1, 2))
        frontier = nxt
    return None if unknown else False


def hensel_root_test(coeffs: Sequence, place: Place) -> Callable:
    """Newton's criterion: v(f(a)) > 2 v(f'(a)) gives a root of f near a.

    Chart 1 uses f(X) = q(X); chart 2 uses the reversed polynomial in Z = 1/X.
    """
    rev = list(reversed(coeffs))

    def deriv(c):
        n = len(c) - 1
        return [c[k] * (n - k) for k in range(n)]

    polys = {1: (list(coeffs), deriv(list(coeffs))), 2: (rev, deriv(rev))}

    def test(x, z, chart):
        f, df = polys[chart]
        a = x if chart == 1 else z
        fa, dfa = _horner(f, a), _horner(df, a)
        if not dfa:
            return False
        if not fa:
            return True
        return place.val(fa) > 2 * place.val(dfa)

    return test


# ---------------------------------------------------------------------------
# real places


def real_embeddings(field: Optional[QuadField]) -> list[Callable]:
    if field is None:
        return [float]
    if field.D < 0:
        return []
    r = math.sqrt(field.D)
    return [lambda e, s=s: float(e.u) + s * r * float(e.v) for s in (1.0, -1.0)]


def exact_sign(x, sigma_sign: int = 1) -> int:
    """Sign of a real embedding of ``x`` (the one sending sqrt D to sigma_sign*sqrt D)."""
    if not isinstance(x, QuadFieldElem):
        x = Fraction(x)
        return (x > 0) - (x < 0)
    u, v = x.u, sigma_sign * x.v
    su, sv = (u > 0) - (u < 0), (v > 0) - (v < 0)
    if su == sv:
        return su
    if su == 0 or sv == 0:
        return su or sv
    # opposite signs: compare u^2 with D v^2
    diff = u * u - x.D * v * v
    return su if diff > 0 else (sv if diff < 0 else 0)


def search_real_point(polys: Sequence[Sequence], field: Optional[QuadField], shared_x: bool = True):
    """Is there a real X (or X = infinity) making every polynomial non-negative?

    ``polys`` are coefficient lists (highest degree first).  With a quadratic
    field and ``shared_x`` the same rational X must work in both embeddings.
    Returns True, False, or None (undetermined).
    """
    signs = [1] if field is None else [1, -1]
    embeds = real_embeddings(field)
    if not embeds:
        return True
    roots = []
    for poly in polys:
        for emb in embeds:
            coeffs = [emb(c) if isinstance(c, QuadFieldElem) else float(c) for c in poly]
            if any(coeffs):
                roots += [r.real for r in np.roots(coeffs) if abs(r.imag) < 1e-9]
    roots = sorted(set(round(r, 12) for r in roots))
    samples = []
    if roots:
        samples += [roots[0] - 1.0, roots[-1] + 1.0]
        samples += [(a + b) / 2 for a, b in zip(roots, roots[1:]) if b - a > 1e-9]
    else:
        samples.append(0.0)
    samples = [Fraction(s).limit_denominator(10**6) for s in samples]

    def ok_at(X, s):
        return all(exact_sign(_horner(poly, X), s) >= 0 for poly in polys)

    def ok_at_infinity(s, direction):
        for poly in polys:
            i0 = next((i for i, c in enumerate(poly) if c), None)
            if i0 is None:
                continue
            deg = len(poly) - 1 - i0
            sign = exact_sign(poly[i0], s) * (direction if deg % 2 else 1)
            if sign < 0:
                return False
        return True

    if shared_x:
        for X in samples:
            if all(ok_at(X, s) for s in signs):
                return True
        if any(all(ok_at_infinity(s, dr) for s in signs) for dr in (1, -1)):
            return True
    else:
        if all(any(ok_at(X, s) for X in samples) or ok_at_infinity(s, 1) or ok_at_infinity(s, -1) for s in signs):
            return True
    return False if not roots else None


def _horner(coeffs, x):
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc
