"""Ternary relations between three terms of a progression, and the genus-one family they induce."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence

from apsieve.exact_arith import (
    GAUSSIAN,
    QSQRT3,
    QuadField,
    QuadFieldElem,
    as_elem,
    factorint,
    is_square,
    rational_sqrt,
    squarefree_part,
)
from apsieve.tuple_enum import ATuple

SUPPORTED_FIELDS = (GAUSSIAN, QSQRT3)


@dataclass(frozen=True)
class TernaryRelation:
    """A*x_i^2 + B*x_j^2 = C*x_m^2, primitive (gcd(A, B, C) = 1).

    The identity behind it is (j-m)(n+id) + (m-i)(n+jd) = (j-i)(n+md).
    """

    i: int
    j: int
    m: int
    A: int
    B: int
    C: int

    def holds(self, x: Sequence[int]) -> bool:
        return self.A * x[self.i] ** 2 + self.B * x[self.j] ** 2 == self.C * x[self.m] ** 2

    def normalized(self) -> tuple:
        """Sign-free comparison key: {var: coefficient} with the equation moved to one side."""
        terms = {self.i: self.A, self.j: self.B, self.m: -self.C}
        first = next(v for v in terms.values() if v)
        s = 1 if first > 0 else -1
        return tuple(sorted((k, s * v) for k, v in terms.items()))

    def __str__(self):
        def term(c, idx):
            return f"{c}*x{idx}^2"

        return f"{term(self.A, self.i)} + {term(self.B, self.j)} = {term(self.C, self.m)}"


def _primitive(A: int, B: int, C: int) -> tuple[int, int, int]:
    g = math.gcd(A, B, C) or 1
    return A // g, B // g, C // g


def pivot_system(t: ATuple, i: int, j: int) -> list[TernaryRelation]:
    """One primitive relation for every index m outside the pivots {i, j}."""
    if not 0 <= i < j < t.k:
        raise ValueError("pivots must satisfy 0 <= i < j < k")
    a = t.a
    out = []
    for m in range(t.k):
        if m in (i, j):
            continue
        A, B, C = _primitive((j - m) * a[i], (m - i) * a[j], (j - i) * a[m])
        out.append(TernaryRelation(i, j, m, A, B, C))
    return out


# ---------------------------------------------------------------------------
# factoring relations over a quadratic field


def factor_class(rel: TernaryRelation) -> int:
    """Squarefree class of -A*B: B*X^2 + A splits over Q(sqrt D) iff this is 1 or D."""
    return squarefree_part(-rel.A * rel.B)


def splits_over(rel: TernaryRelation, field: QuadField) -> bool:
    return factor_class(rel) in (1, field.D)


def irrational_over(rel: TernaryRelation, field: QuadField) -> bool:
    return factor_class(rel) == field.D


@dataclass(frozen=True)
class LinearForm:
    """s*x + t*z with coefficients in a quadratic field."""

    s: QuadFieldElem
    t: QuadFieldElem

    def __call__(self, x, z):
        return self.s * x + self.t * z

    def resultant(self, other: "LinearForm") -> QuadFieldElem:
        return self.s * other.t - self.t * other.s

    def coeffs(self) -> list:
        return [self.s, self.t]

    def __str__(self):
        return f"({self.s})X + ({self.t})"


@dataclass(frozen=True)
class FactoredRelation:
    relation: TernaryRelation
    form: LinearForm
    partner: LinearForm
    # form*partner equals norm_const times a rational square, up to squares
    norm_const: int


def factor_relation(rel: TernaryRelation, field: QuadField) -> FactoredRelation:
    """Write B*X^2 + A (X = x_j/x_i) as a constant times (sX + t*w)(sX - t*w), w in {1, sqrt D}."""
    cls = factor_class(rel)
    if cls not in (1, field.D):
        raise ValueError(f"{rel} does not factor over {field}")
    w = field(1) if cls == 1 else field.gen
    w2 = 1 if cls == 1 else field.D
    ratio = rational_sqrt(Fraction(-rel.A, rel.B * w2))
    ratio = abs(ratio)
    s, tt = ratio.denominator, ratio.numerator
    form = LinearForm(field(s), tt * w)
    partner = LinearForm(field(s), -(tt * w))
    return FactoredRelation(rel, form, partner, squarefree_part(rel.B * rel.C))


# ---------------------------------------------------------------------------
# curve families


@dataclass(frozen=True)
class CurveFamily:
    """Data for C_delta: Y^2 = delta * c * L1 * L2 * (B3 X^2 + A3), X = x_j/x_i after scaling.

    ``scale_i`` and ``scale_j`` record substitutions x_i = scale_i*z and x_j = scale_j*w
    forced by divisibility, so that X = w/z.
    """

    atuple: ATuple
    i: int
    j: int
    field: QuadField
    factored: tuple[FactoredRelation, FactoredRelation]
    quadratic: TernaryRelation
    relations: tuple[TernaryRelation, ...]
    scale_i: int = 1
    scale_j: int = 1

    @property
    def const(self) -> int:
        return squarefree_part(self.quadratic.C)

    @property
    def forms(self) -> tuple[LinearForm, LinearForm]:
        return self.factored[0].form, self.factored[1].form

    def quartic_coeffs(self, delta) -> list:
        """Coefficients (degree 4 first) of delta * c * L1 * L2 * (B3 X^2 + A3)."""
        from apsieve.curve_lab.quartic import poly_mul

        L1, L2 = self.forms
        q = self.quadratic
        f = self.field
        poly = poly_mul(poly_mul(L1.coeffs(), L2.coeffs()), [f(q.B), f(0), f(q.A)])
        k = as_elem(f, delta) * self.const
        return [k * c for c in poly]

    def describe(self) -> str:
        L1, L2 = self.forms
        q = self.quadratic
        return f"delta*{self.const}*[{L1}]*[{L2}]*({q.B}X^2 + {q.A}) over {self.field}"


def _substitute(rel: TernaryRelation, which: str, p: int) -> TernaryRelation:
    A, B, C = rel.A, rel.B, rel.C
    if which == "i":
        A *= p * p
    else:
        B *= p * p
    A, B, C = _primitive(A, B, C)
    return replace(rel, A=A, B=B, C=C)


def forced_scaling(rels: Sequence[TernaryRelation]) -> tuple[list[TernaryRelation], int, int]:
    """Apply divisibility forced modulo single primes until nothing changes.

    If p divides B and C but not A then p | x_i (x_i, x_j coprime), and symmetrically.
    """
    rels = list(rels)
    si = sj = 1
    changed = True
    while changed:
        changed = False
        for r in rels:
            for p in factorint(abs(math.gcd(r.B, r.C)) or 1):
                if r.A % p:
                    rels = [_substitute(x, "i", p) for x in rels]
                    si *= p
                    changed = True
                    break
            if changed:
                break
            for p in factorint(abs(math.gcd(r.A, r.C)) or 1):
                if r.B % p:
                    rels = [_substitute(x, "j", p) for x in rels]
                    sj *= p
                    changed = True
                    break
            if changed:
                break
    return rels, si, sj


def choose_field(rels: Sequence[TernaryRelation]) -> Optional[QuadField]:
    best, score = None, 0
    for f in SUPPORTED_FIELDS:
        n = sum(1 for r in rels if irrational_over(r, f))
        if n > score:
            best, score = f, n
    return best


def select_relations(rels: Sequence[TernaryRelation], field: QuadField):
    """Two factoring relations (irrational ones first, by m) and the quadratic one (largest remaining m)."""
    irr = [r for r in rels if irrational_over(r, field)]
    rat = [r for r in rels if factor_class(r) == 1]
    chosen = (irr + rat)[:2]
    if len(chosen) < 2:
        raise ValueError("fewer than two relations factor over the field")
    rest = [r for r in rels if r not in chosen]
    if not rest:
        raise ValueError("no relation left for the quadratic factor")
    quad = max(rest, key=lambda r: r.m)
    return chosen, quad


# Pivots used for the tuples handled by explicit curve arguments.  The generic
# heuristic below does not always land on these choices.
KNOWN_PIVOTS: dict[tuple[int, ...], tuple[int, int]] = {
    (1, 5, 6, 7, 2, 1, 10): (0, 5),
    (2, 3, 1, 5, 6, 7, 2): (0, 4),
    (3, 1, 5, 6, 7, 2, 1): (0, 3),
    (-3, -5, 2, 1, 1): (0, 4),
    (2, 5, 2, -1, -1): (2, 3),
    (6, 5, 1, 3, 2): (0, 3),
}


def heuristic_pivots(t: ATuple) -> tuple[int, int]:
    """Prefer |a_i| = 1, then small |a_i a_j|, then pairs giving two factoring relations."""
    best = None
    for i in range(t.k):
        for j in range(i + 1, t.k):
            rels = pivot_system(t, i, j)
            field = choose_field(rels)
            nfac = 0 if field is None else sum(1 for r in rels if splits_over(r, field))
            key = (
                -(abs(t.a[i]) == 1) - (abs(t.a[j]) == 1),
                abs(t.a[i] * t.a[j]),
                -min(nfac, 2),
                i,
                j,
            )
            if best is None or key < best[0]:
                best = (key, (i, j))
    return best[1]


def pivots_for(t: ATuple) -> tuple[int, int]:
    if t.a in KNOWN_PIVOTS:
        return KNOWN_PIVOTS[t.a]
    return heuristic_pivots(t)


def derive_family(t: ATuple, pivots: Optional[tuple[int, int]] = None) -> CurveFamily:
    i, j = pivots if pivots is not None else pivots_for(t)
    rels = pivot_system(t, i, j)
    field = choose_field(rels)
    if field is None:
        raise ValueError(f"no relation of {t} factors irrationally over Q(i) or Q(sqrt 3)")
    chosen, quad = select_relations(rels, field)
    used = [*chosen, quad]
    used_scaled, si, sj = forced_scaling(used)
    scaled_all = []
    for r in rels:
        A, B, C = r.A * si * si, r.B * sj * sj, r.C
        scaled_all.append(replace(r, **dict(zip("ABC", _primitive(A, B, C)))))
    f1, f2 = (factor_relation(r, field) for r in used_scaled[:2])
    return CurveFamily(
        atuple=t,
        i=i,
        j=j,
        field=field,
        factored=(f1, f2),
        quadratic=used_scaled[2],
        relations=tuple(scaled_all),
        scale_i=si,
        scale_j=sj,
    )


# ---------------------------------------------------------------------------
# back-substitution


def backsubstitute(
    t: ATuple,
    pivots: tuple[int, int],
    X,
    scale_i: int = 1,
    scale_j: int = 1,
) -> Optional[tuple[int, int]]:
    """Recover the primitive (n, d) with x_j/x_i = X*scale_j/scale_i, normalized to d > 0.

    Returns None if no coprime progression realizes the whole tuple with that ratio.
    """
    i, j = pivots
    X = Fraction(X) * scale_j / scale_i
    if X == 0:
        return None
    p, q = abs(X.numerator), X.denominator
    # n + i d = a_i q^2 g, n + j d = a_j p^2 g for some rational g
    ai, aj = t.a[i], t.a[j]
    d0 = Fraction(aj * p * p - ai * q * q, j - i)
    n0 = ai * q * q - i * d0
    if d0 == 0:
        return None
    # scale so (n, d) is a coprime integral pair; the scale must be a rational square
    # of the right sign class, which the final tuple check enforces
    den = math.lcm(n0.denominator, d0.denominator)
    n1, d1 = int(n0 * den), int(d0 * den)
    g = math.gcd(n1, d1)
    n, d = n1 // g, d1 // g
    if d < 0:
        n, d = -n, -d
    for cand in ((n, d), (-n, -d)):
        nn, dd = cand
        if _realizes(t, nn, dd):
            if dd < 0:
                nn, dd = nn + (t.k - 1) * dd, -dd
            return nn, dd
    return None


def _realizes(t: ATuple, n: int, d: int) -> bool:
    for idx, a in enumerate(t.a):
        term = n + idx * d
        if term == 0 or term % a:
            return False
        if not is_square(term // a) or term // a <= 0:
            return False
    return True
