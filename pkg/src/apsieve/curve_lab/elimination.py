"""Deciding coefficient tuples from curve facts: rank-0 quadruple curves, and the
per-delta curve families resolved through Chabauty or rank-0 records."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Sequence, Union

from apsieve.exact_arith import QuadFieldElem, is_square
from apsieve.tuple_enum import ATuple
from apsieve.curve_lab.delta import delta_candidates
from apsieve.curve_lab.points import DEFAULT_HEIGHT, RankZeroEnumeration, _square_in, rank0_points
from apsieve.curve_lab.quartic import GenusOneQuartic, poly_mul
from apsieve.curve_lab.relations import CurveFamily, _realizes, backsubstitute, derive_family

# rank-0 searches stop as soon as torsion accounting closes; this bound only
# matters for curves where it never does
PIPELINE_HEIGHT = 300


@dataclass(frozen=True)
class Eliminated:
    reason: str
    certificate: dict

    outcome = "eliminated"


@dataclass(frozen=True)
class SurvivesWith:
    candidates: Optional[frozenset]  # None: no quadruple gave information
    details: tuple = ()

    outcome = "survives"


@dataclass(frozen=True)
class Unresolved:
    reason: str
    missing: tuple = ()

    outcome = "unresolved"


Verdict = Union[Eliminated, SurvivesWith, Unresolved]


def quadruple_quartic(t: ATuple, alpha: Sequence[int]) -> GenusOneQuartic:
    """y^2 = (prod a_alpha) * prod (X + alpha_i), X = n/d."""
    poly = [Fraction(math.prod(t.a[i] for i in alpha))]
    for i in alpha:
        poly = poly_mul(poly, [1, i])
    return GenusOneQuartic(None, tuple(poly), label=f"{t.a} alpha={tuple(alpha)}")


def admissible_pairs(t: ATuple, xs) -> list[tuple[int, int]]:
    """Coprime (n, d) with n/d in xs that realize t (both signs of d tried)."""
    out = []
    for X in xs:
        X = Fraction(X)
        for s in (1, -1):
            n, d = s * X.numerator, s * X.denominator
            if _realizes(t, n, d):
                out.append((n, d))
    return sorted(out)


def rank0_eliminate_tuple(t: ATuple, oracle, height: int = PIPELINE_HEIGHT) -> Verdict:
    """Decide a length-5 tuple from its four-term quartics with rank-0 Jacobians.

    A complete rank-0 enumeration pins n/d to finitely many values; the tuple is
    eliminated when one such curve leaves no progression with |d| > 1.
    """
    if t.k != 5:
        raise ValueError("rank-0 quadruple elimination is for k = 5")
    missing = []
    known = None
    details = []
    for alpha in itertools.combinations(range(5), 4):
        q = quadruple_quartic(t, alpha).canonical()
        rank = oracle.rank(q)
        if rank is None:
            from apsieve.oracle_client import key_for

            missing.append(key_for(q))
            continue
        if rank != 0:
            continue
        # scaled model carries the same points: canonicalization multiplies by a square
        enum = rank0_points(quadruple_quartic(t, alpha), rank, height=height)
        if not enum.complete:
            details.append({"alpha": list(alpha), "complete": False})
            continue
        pairs = admissible_pairs(t, enum.points)
        big = [(n, d) for n, d in pairs if abs(d) > 1]
        details.append({"alpha": list(alpha), "complete": True, "pairs": pairs})
        if not big:
            from apsieve.oracle_client import key_for

            return Eliminated(
                "rank0",
                {
                    "tuple": list(t.a),
                    "alpha": list(alpha),
                    "key": key_for(q),
                    "points": sorted(str(x) for x in enum.points),
                    "point_count": enum.point_count,
                    "torsion_order": enum.torsion_order,
                    "pairs": [list(p) for p in pairs],
                },
            )
        known = set(big) if known is None else known & set(big)
    if known is not None:
        if not known:
            return Eliminated("rank0-intersection", {"tuple": list(t.a), "details": details})
        return SurvivesWith(frozenset(known), tuple(map(str, details)))
    if missing:
        return Unresolved("missing rank records", tuple(missing))
    return SurvivesWith(None, tuple(map(str, details)))


# ---------------------------------------------------------------------------
# curve families


def family_roots_in_field(family: CurveFamily) -> list[QuadFieldElem]:
    """Irrational field roots of the family quartic (roots of the linear forms and,
    when it splits, of the quadratic factor)."""
    f = family.field
    roots = set()
    for L in family.forms:
        r = -L.t / L.s
        roots.add(r)
    q = family.quadratic
    c = Fraction(-q.A, q.B)
    if is_square(c) or is_square(c / f.D):
        from apsieve.exact_arith import is_square_in_field

        s = is_square_in_field(f(c))
        if s is not None:
            roots |= {s, -s}
    return sorted((r for r in roots if not r.is_rational()), key=lambda e: e.sort_key())


@dataclass
class DeltaResolution:
    delta: QuadFieldElem
    key: str
    method: str  # "chabauty:<p>", "rank0", "missing", "rank0-incomplete"
    xs: Optional[frozenset] = None
    enumeration: Optional[RankZeroEnumeration] = None

    def to_dict(self) -> dict:
        return {
            "delta": str(self.delta),
            "key": self.key,
            "method": self.method,
            "xs": None if self.xs is None else sorted(str(x) for x in self.xs),
        }


@dataclass
class FamilyResolution:
    family: CurveFamily
    deltas: list[DeltaResolution] = dc_field(default_factory=list)
    off_curve: list = dc_field(default_factory=list)

    @property
    def resolved(self) -> bool:
        return all(d.xs is not None for d in self.deltas)

    @property
    def xs(self) -> frozenset:
        out = set()
        for d in self.deltas:
            out |= d.xs or set()
        return frozenset(out)

    def solutions(self) -> list[tuple[int, int]]:
        f = self.family
        sols = set()
        for X in self.xs:
            nd = backsubstitute(f.atuple, (f.i, f.j), X, f.scale_i, f.scale_j)
            if nd is not None:
                sols.add(nd)
        return sorted(sols)

    def to_dict(self) -> dict:
        return {
            "tuple": list(self.family.atuple.a),
            "pivots": [self.family.i, self.family.j],
            "resolved": self.resolved,
            "deltas": [d.to_dict() for d in self.deltas],
            "solutions": [list(s) for s in self.solutions()] if self.resolved else None,
            "off_curve": self.off_curve,
        }


def resolve_family(
    family: CurveFamily,
    oracle,
    deltas: Optional[Sequence[QuadFieldElem]] = None,
    height: int = PIPELINE_HEIGHT,
) -> FamilyResolution:
    """Rational X on every C_delta, from Chabauty records or rank-0 enumeration."""
    from apsieve.oracle_client import key_for

    if deltas is None:
        deltas = delta_candidates(family).survivors
    out = FamilyResolution(family)
    froots = tuple(family_roots_in_field(family))
    for delta in deltas:
        q = GenusOneQuartic(family.field, tuple(family.quartic_coeffs(delta)), delta)
        key = key_for(q)
        chab = oracle.chabauty(q)
        if chab is not None:
            p, xs = chab
            for X in xs:
                if not _square_in(q.field, q(X)):
                    out.off_curve.append({"delta": str(delta), "X": str(X)})
            out.deltas.append(DeltaResolution(delta, key, f"chabauty:{p}", frozenset(xs)))
            continue
        rank = oracle.rank(q)
        if rank == 0:
            enum = rank0_points(q, 0, height=height, field_roots=froots)
            if enum.complete:
                out.deltas.append(DeltaResolution(delta, key, "rank0", frozenset(enum.points), enum))
            else:
                out.deltas.append(DeltaResolution(delta, key, "rank0-incomplete", None, enum))
            continue
        out.deltas.append(DeltaResolution(delta, key, "missing"))
    return out


def resolve_tuple(t: ATuple, oracle, pivots=None) -> FamilyResolution:
    return resolve_family(derive_family(t, pivots), oracle)
