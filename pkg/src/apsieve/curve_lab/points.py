"""Torsion accounting and point enumeration on rank-0 genus-one quartics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterator, Optional

from apsieve.exact_arith import (
    QuadFieldElem,
    factorint,
    is_square_in_field,
    primes_up_to,
    rational_sqrt,
    sqrt_mod_prime,
)
from apsieve.curve_lab.quartic import GenusOneQuartic, WeierstrassModel, jacobian_model

DEFAULT_HEIGHT = 10**4
MIN_GOOD_PRIMES = 5


# ---------------------------------------------------------------------------
# reduction modulo primes


def _reduce(c, p: int, root: Optional[int]) -> Optional[int]:
    """Image of an element in F_p, or None if p divides a denominator."""
    if isinstance(c, QuadFieldElem):
        u, v = c.u, c.v
        if u.denominator % p == 0 or v.denominator % p == 0:
            return None
        return (u.numerator * pow(u.denominator, -1, p) + root * v.numerator * pow(v.denominator, -1, p)) % p
    c = Fraction(c)
    if c.denominator % p == 0:
        return None
    return c.numerator * pow(c.denominator, -1, p) % p


def count_points_mod_p(a2: int, a4: int, a6: int, p: int) -> int:
    """#E(F_p) for y^2 = x^3 + a2 x^2 + a4 x + a6, p an odd prime of good reduction."""
    sq = [0] * p
    for y in range(p):
        sq[y * y % p] += 1
    total = 1
    for x in range(p):
        total += sq[(x * x * x + a2 * x * x + a4 * x + a6) % p]
    return total


def _good_reductions(E: WeierstrassModel, bound: int):
    """(p, a2, a4, a6 mod p) for odd primes p < bound of good reduction.

    Over a quadratic field only split primes are used, via sqrt(D) -> r mod p.
    """
    disc = E.discriminant()
    for p in primes_up_to(bound):
        if p == 2:
            continue
        roots = [None]
        if E.field is not None:
            D = E.field.D
            if D % p == 0 or pow(D % p, (p - 1) // 2, p) != 1:
                continue
            r = sqrt_mod_prime(D % p, p)
            roots = [r, p - r]
        for r in roots:
            vals = [_reduce(c, p, r) for c in (E.a2, E.a4, E.a6, disc)]
            if any(v is None for v in vals) or vals[3] == 0:
                continue
            yield p, vals[0], vals[1], vals[2]


def torsion_bound(E: WeierstrassModel, bound: int = 200) -> int:
    """gcd of #E(F_p) over good odd primes below ``bound`` (split primes over a quadratic field).

    Reduction is injective on torsion at these primes, so the result is a
    multiple of the torsion order.
    """
    g = 0
    used = 0
    for p, a2, a4, a6 in _good_reductions(E, bound):
        g = math.gcd(g, count_points_mod_p(a2, a4, a6, p))
        used += 1
    if used < MIN_GOOD_PRIMES:
        raise ValueError(f"only {used} good primes below {bound}; raise the bound")
    return g


# ---------------------------------------------------------------------------
# exact torsion over Q (Nagell-Lutz)


def _integral_short_model(E: WeierstrassModel) -> tuple[int, int, int, Fraction]:
    """Integral model y^2 = x^3 + A x + B isomorphic to E, with the x-scale u^2 used."""
    if E.field is not None:
        raise ValueError("Nagell-Lutz needs a curve over Q")
    a2, a4, a6 = (Fraction(c) for c in (E.a2, E.a4, E.a6))
    # shift x -> x - a2/3, then scale to clear denominators
    A = a4 - a2 * a2 / 3
    B = a6 - a2 * a4 / 3 + 2 * a2**3 / 27
    u = 1
    while (A * u**4).denominator != 1 or (B * u**6).denominator != 1:
        u += 1
    return int(A * u**4), int(B * u**6), u, a2


def _integer_roots_monic_cubic(b: int, c: int, d: int) -> list[int]:
    """Integer roots of x^3 + b x^2 + c x + d, by bisection on monotone pieces."""
    f = lambda x: ((x + b) * x + c) * x + d  # noqa: E731
    B = 1 + max(abs(b), abs(c), abs(d))
    # critical points of 3x^2 + 2bx + c
    disc = 4 * b * b - 12 * c
    cuts = [-B - 1]
    if disc > 0:
        s = math.isqrt(disc)
        for num in (-2 * b - s, -2 * b + s):
            cuts.append(num // 6)
            cuts.append(num // 6 + 1)
    cuts.append(B + 1)
    cuts = sorted(set(cuts))
    roots = set()
    for lo, hi in zip(cuts, cuts[1:]):
        for x in (lo, hi):
            if f(x) == 0:
                roots.add(x)
        flo, fhi = f(lo), f(hi)
        if flo == 0 or fhi == 0 or (flo < 0) == (fhi < 0):
            continue
        a, z = lo, hi
        while z - a > 1:
            mid = (a + z) // 2
            if (f(mid) < 0) == (flo < 0):
                a = mid
            else:
                z = mid
        for x in (a, z):
            if f(x) == 0:
                roots.add(x)
    return sorted(roots)


def _add(P, Q, A):
    if P is None:
        return Q
    if Q is None:
        return P
    (x1, y1), (x2, y2) = P, Q
    if x1 == x2 and y1 == -y2:
        return None
    if P == Q:
        lam = (3 * x1 * x1 + A) / (2 * y1)
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam - x1 - x2
    return (x3, lam * (x1 - x3) - y1)


def torsion_points(E: WeierstrassModel) -> list:
    """All torsion points of E(Q) on the integral short model (None is the identity)."""
    A, B, _, _ = _integral_short_model(E)
    N = abs(4 * A**3 + 27 * B * B)
    ys = {0}
    fac = factorint(N) if N > 1 else {}
    divs = [1]
    for p, e in fac.items():
        divs = [d * p**k for d in divs for k in range(e // 2 + 1)]
    ys |= set(divs)
    pts = []
    for y in sorted(ys):
        for x in _integer_roots_monic_cubic(0, A, B - y * y):
            for yy in {y, -y}:
                P = (Fraction(x), Fraction(yy))
                Q = P
                for _ in range(12):
                    Q = _add(Q, P, A)
                    if Q is None:
                        pts.append(P)
                        break
                    if Q[0].denominator != 1:
                        break
    return [None] + sorted(set(pts))


def torsion_order(E: WeierstrassModel) -> int:
    return len(torsion_points(E))


# ---------------------------------------------------------------------------
# point enumeration on quartics


def _square_in(field, value) -> bool:
    if value == 0:
        return True
    if field is None:
        return rational_sqrt(Fraction(value)) is not None
    return is_square_in_field(value) is not None


def iter_heights(H: int) -> Iterator[tuple[int, int]]:
    """Coprime (n, d), d >= 1, each once, ordered by max(|n|, d), then d, then n."""
    yield 0, 1
    for h in range(1, H + 1):
        for d in range(1, h):
            for n in (-h, h):
                if math.gcd(n, d) == 1:
                    yield n, d
        for n in range(-h, h + 1):
            if n and math.gcd(n, h) == 1:
                yield n, h


@dataclass
class RankZeroEnumeration:
    curve: GenusOneQuartic
    torsion_bound: int
    points: set = dc_field(default_factory=set)
    point_count: int = 0
    complete: bool = False
    torsion_order: Optional[int] = None
    height_reached: int = 0
    roots_in_field: tuple = ()

    def to_dict(self) -> dict:
        return {
            "torsion_bound": self.torsion_bound,
            "torsion_order": self.torsion_order,
            "points": sorted(str(x) for x in self.points),
            "point_count": self.point_count,
            "complete": self.complete,
            "height": self.height_reached,
        }


class UnresolvedError(LookupError):
    """An oracle fact needed to decide the question is missing."""


def rank0_points(
    q: GenusOneQuartic,
    rank: Optional[int],
    height: int = DEFAULT_HEIGHT,
    field_roots: tuple = (),
    exact_torsion: bool = True,
) -> RankZeroEnumeration:
    """Rational X with q(X) a square, when the Jacobian has rank 0.

    Completeness is claimed only when the points found on the curve (each
    affine X contributing 1 or 2 points, plus points at infinity, plus known
    roots outside Q) reach the torsion count of the Jacobian.  That requires a
    known point, so the rational or field roots must be nonempty.
    """
    if rank is None:
        raise UnresolvedError("no rank record for this curve")
    if rank != 0:
        raise ValueError("rank0_points needs a rank-0 Jacobian")
    E = jacobian_model(q)
    tb = torsion_bound(E)
    target = tb
    tord = None
    if exact_torsion and q.field is None:
        tord = torsion_order(E)
        if tb % tord:
            raise ArithmeticError("torsion order does not divide the reduction bound")
        target = tord
    res = RankZeroEnumeration(q, tb, torsion_order=tord, roots_in_field=tuple(field_roots))
    count = 2 if _square_in(q.field, q.coeffs[0]) and q.coeffs[0] else 0
    count += len(field_roots)
    found = set()
    for n, d in iter_heights(height):
        res.height_reached = max(abs(n), d)
        if count >= target:
            break
        X = Fraction(n, d)
        v = q(X)
        if _square_in(q.field, v):
            found.add(X)
            count += 1 if v == 0 else 2
    res.points = found
    res.point_count = count
    res.complete = count == target and (bool(found) or bool(field_roots) or count > 0)
    return res
