"""Enumeration of the twisting classes delta for a product of two linear forms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from apsieve.exact_arith import (
    QuadField,
    QuadFieldElem,
    element_valuation,
    factorint,
    is_square,
    prime_elements,
    same_square_class,
    squarefree_class,
    squarefree_part,
)
from apsieve.curve_lab.local import (
    LocalCondition,
    Place,
    hensel_root_test,
    places_over,
    search_local_point,
    search_real_point,
)
from apsieve.curve_lab.quartic import GenusOneQuartic, discriminant, poly_mul
from apsieve.curve_lab.relations import CurveFamily, FactoredRelation, TernaryRelation

LOCAL_PRIMES = (2, 3, 5)


def _rational_primes(x) -> set[int]:
    if isinstance(x, QuadFieldElem):
        n = x.norm()
        out = set()
        for part in (n.numerator, n.denominator):
            out |= set(factorint(abs(part))) if abs(part) > 1 else set()
        return out
    x = Fraction(x)
    out = set()
    for part in (x.numerator, x.denominator):
        out |= set(factorint(abs(part))) if abs(part) > 1 else set()
    return out


def bad_primes(field: QuadField, factored: Sequence[FactoredRelation]) -> list[int]:
    """Rational primes below which a prime can divide the product of forms to an odd power.

    A prime dividing one form but not its partner has odd valuation only if it
    divides the norm constant; one dividing both divides their resultant.
    """
    S = {2} | set(factorint(abs(field.D)))
    for fr in factored:
        S |= _rational_primes(fr.form.resultant(fr.partner))
        S |= set(factorint(abs(fr.norm_const))) if abs(fr.norm_const) > 1 else set()
    return sorted(S)


def _relation_ok_mod_p(r: TernaryRelation, p: int, x: int, z: int) -> bool:
    """C*(A z^2 + B x^2) = (C x_m)^2 must be a square (or 0) mod p, and 0 when p | C."""
    v = r.C * (r.A * z * z + r.B * x * x) % p
    if r.C % p == 0:
        return v == 0
    return v == 0 or p == 2 or pow(v, (p - 1) // 2, p) == 1


def prime_can_divide(family: CurveFamily, p: int) -> bool:
    """Whether some primitive residue pair allowed by the curve's relations mod p
    makes a place above p divide L1 or L2."""
    used = (family.factored[0].relation, family.factored[1].relation, family.quadratic)
    forms = family.forms
    pis = prime_elements(family.field, p)
    for x in range(p):
        for z in range(p):
            if x == 0 and z == 0:
                continue
            if not all(_relation_ok_mod_p(r, p, x, z) for r in used):
                continue
            if any(pi.divides(L(x, z)) for L in forms for pi in pis):
                return True
    return False


def support_primes(family: CurveFamily) -> list[int]:
    """Bad primes that survive the residue test of ``prime_can_divide``."""
    return [p for p in bad_primes(family.field, family.factored) if prime_can_divide(family, p)]


def selmer_classes(field: QuadField, S: Iterable[int]) -> list[QuadFieldElem]:
    """Canonical representatives of the classes generated by units and primes above S."""
    unit_gens = _unit_generators(field)
    prime_gens = [pi for p in sorted(set(S)) for pi in prime_elements(field, p)]
    gens = unit_gens + prime_gens
    seen = {}
    for bits in itertools.product((0, 1), repeat=len(gens)):
        x = field(1)
        for b, g in zip(bits, gens):
            if b:
                x = x * g
        c = squarefree_class(x)
        seen[c] = True
    return sorted(seen, key=lambda e: e.sort_key())


def _unit_generators(field: QuadField) -> list[QuadFieldElem]:
    if field.D == -1:
        return [field.gen]
    return [field(-1), field.fundamental_unit()]


def norm_target(factored: Sequence[FactoredRelation]) -> int:
    """Squarefree class of N(L1 L2) over Q: forms with a rational partner contribute a square."""
    out = 1
    for fr in factored:
        if not fr.form.t.is_rational():
            out *= fr.norm_const
    return squarefree_part(out)


def norm_filter(candidates: Iterable[QuadFieldElem], target: int) -> list[QuadFieldElem]:
    return [d for d in candidates if is_square(Fraction(d.norm()) * target)]


# ---------------------------------------------------------------------------
# local conditions for the whole system


def system_conditions(family: CurveFamily, delta: QuadFieldElem, p: int) -> list[LocalCondition]:
    """delta*L1*L2 square at every place above p, and every relation C(A z^2 + B x^2) a square in Q_p."""
    L1, L2 = family.forms
    conds = []
    for place in places_over(family.field, p):
        def f(x, z, L1=L1, L2=L2):
            return delta * L1(x, z) * L2(x, z)

        conds.append(LocalCondition(place, f, place.val(delta)))
    qp = Place(None, p)
    for r in family.relations:
        def g(x, z, r=r):
            return r.C * (r.A * z * z + r.B * x * x)

        conds.append(LocalCondition(qp, g, qp.val(r.C)))
    return conds


def system_real_ok(family: CurveFamily, delta: QuadFieldElem) -> Optional[bool]:
    L1, L2 = family.forms
    polys = [[delta * c for c in poly_mul([L1.s, L1.t], [L2.s, L2.t])]]
    for r in family.relations:
        polys.append([r.C * r.B, 0, r.C * r.A])
    return search_real_point(polys, family.field, shared_x=True)


def system_locally_soluble(family: CurveFamily, delta: QuadFieldElem, p, max_level: int = 10) -> bool:
    """False only when a complete local search proves no point; undetermined counts as soluble."""
    if p in (None, "inf", "oo"):
        return system_real_ok(family, delta) is not False
    res = search_local_point(system_conditions(family, delta, p), p, family.field, rational_x=True, max_level=max_level)
    return res is not False


@dataclass(frozen=True)
class DeltaReport:
    S: tuple[int, ...]
    selmer: tuple[QuadFieldElem, ...]
    after_norm: tuple[QuadFieldElem, ...]
    survivors: tuple[QuadFieldElem, ...]


def delta_candidates(
    family: CurveFamily,
    local_primes: Optional[Sequence[int]] = None,
    local_filter: str = "quartic",
) -> DeltaReport:
    """Classes delta with L1*L2 = delta * square for coprime specializations.

    Candidates are products of units and primes over the support primes, cut by
    the norm equation and then by a local filter at the given primes and at
    infinity.  ``local_filter`` is one of:

    - ``"quartic"``: C_delta has a point over each completion (X in K_p);
    - ``"curve-rational"``: C_delta has a point with X in Q_p;
    - ``"system"``: the split system (delta*L1*L2 and every relation) is soluble with X in Q_p;
    - ``"none"``.

    The stronger filters are sound for the diophantine problem but can drop
    classes whose curves still carry points.
    """
    if local_filter not in ("quartic", "curve-rational", "system", "none"):
        raise ValueError(f"unknown local filter {local_filter!r}")
    field = family.field
    S = support_primes(family)
    allc = selmer_classes(field, S)
    normed = norm_filter(allc, norm_target(family.factored))
    primes = sorted(set(local_primes if local_primes is not None else LOCAL_PRIMES))
    keep = []
    for d in normed:
        if local_filter == "none":
            keep.append(d)
            continue
        if local_filter == "system":
            ok = all(system_locally_soluble(family, d, p) for p in ["inf", *primes])
        else:
            q = GenusOneQuartic(field, family.quartic_coeffs(d))
            rx = local_filter == "curve-rational"
            ok = all(curve_locally_soluble(q, p, rational_x=rx) for p in ["inf", *primes])
        if ok:
            keep.append(d)
    return DeltaReport(tuple(S), tuple(allc), tuple(normed), tuple(keep))


def same_class_sets(a: Iterable[QuadFieldElem], b: Iterable[QuadFieldElem]) -> bool:
    ca = {squarefree_class(x) for x in a}
    cb = {squarefree_class(x) for x in b}
    return ca == cb


# ---------------------------------------------------------------------------
# local solubility of a single quartic


def curve_locally_soluble(q: GenusOneQuartic, p, rational_x: bool = False) -> bool:
    if not rational_x:
        return local_solubility(q, p)
    if p in (None, "inf", "oo"):
        return search_real_point([list(q.coeffs)], q.field, shared_x=True) is not False
    conds = [
        LocalCondition(pl, q.homogeneous, min(pl.val(c) for c in q.coeffs if c))
        for pl in places_over(q.field, p)
    ]
    return search_local_point(conds, p, q.field, rational_x=True, max_level=10) is not False


def local_solubility(q: GenusOneQuartic, p, max_level: Optional[int] = None) -> bool:
    """Whether Y^2 = q(X) has a point over every completion above p (p a prime or "inf").

    The p-adic search lifts residues up to a bounded precision; branches left
    undecided at the bound count as soluble.
    """
    if p in (None, "inf", "oo"):
        if q.field is None:
            return search_real_point([list(q.coeffs)], None) is not False
        if q.field.D < 0:
            return True
        return search_real_point([list(q.coeffs)], q.field, shared_x=False) is not False
    disc = discriminant(q.coeffs)
    for place in places_over(q.field, p):
        level = max_level if max_level is not None else 2 * max(place.val(disc), 0) + 3
        scale = min(place.val(c) for c in q.coeffs if c)
        cond = LocalCondition(place, q.homogeneous, scale)
        split = q.field is not None and place.e == 1 and len(places_over(q.field, p)) == 2
        rational_x = q.field is None or split
        hensel = hensel_root_test(q.coeffs, place)
        if search_local_point([cond], p, q.field, rational_x=rational_x, max_level=level, hensel=hensel) is False:
            return False
    return True
