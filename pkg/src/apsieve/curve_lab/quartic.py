"""Genus-one quartics Y^2 = q(X), their classical invariants and Jacobian models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Sequence, Union

from apsieve.exact_arith import (
    QuadField,
    QuadFieldElem,
    _class_order,
    _unit_square_orbit_min,
    factor_element,
    factorint,
    quad_int_gcd,
)

Coeff = Union[Fraction, QuadFieldElem]


def poly_mul(f: Sequence, g: Sequence) -> list:
    """Product of coefficient lists, highest degree first."""
    out = [0] * (len(f) + len(g) - 1)
    for a, x in enumerate(f):
        for b, y in enumerate(g):
            out[a + b] = x * y + out[a + b]
    return out


def poly_eval(coeffs: Sequence, x):
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc


def _coerce(field: Optional[QuadField], c) -> Coeff:
    if field is None:
        if isinstance(c, QuadFieldElem):
            if c.v:
                raise ValueError("irrational coefficient for a rational quartic")
            return c.u
        return Fraction(c)
    if isinstance(c, QuadFieldElem):
        if c.field != field:
            raise ValueError("coefficient from a different field")
        return c
    return field(Fraction(c))


@dataclass(frozen=True)
class GenusOneQuartic:
    """Y^2 = c4 X^4 + c3 X^3 + c2 X^2 + c1 X + c0 over Q (``field=None``) or Q(sqrt D)."""

    field: Optional[QuadField]
    coeffs: tuple
    delta: Optional[Coeff] = dc_field(default=None, compare=False)
    label: str = dc_field(default="", compare=False)

    def __post_init__(self):
        cs = tuple(_coerce(self.field, c) for c in self.coeffs)
        if len(cs) != 5:
            raise ValueError("a quartic needs exactly 5 coefficients")
        object.__setattr__(self, "coeffs", cs)
        if not cs[0] and not cs[1]:
            raise ValueError("degree below 3: not a genus-one quartic model")
        if discriminant(cs) == 0:
            raise ValueError("quartic has a repeated root (zero discriminant)")

    @property
    def D(self) -> int:
        return 1 if self.field is None else self.field.D

    def __call__(self, X):
        return poly_eval(self.coeffs, X)

    def homogeneous(self, x, z):
        acc = 0
        for k, c in enumerate(self.coeffs):
            acc = acc + c * x ** (4 - k) * z**k
        return acc

    def contains(self, X, Y) -> bool:
        return Y * Y == self(X)

    def scaled(self, lam) -> "GenusOneQuartic":
        return GenusOneQuartic(self.field, tuple(lam * c for c in self.coeffs), self.delta, self.label)

    def canonical(self) -> "GenusOneQuartic":
        return GenusOneQuartic(self.field, canonical_coeffs(self.field, self.coeffs), self.delta, self.label)

    def is_canonical(self) -> bool:
        return tuple(self.coeffs) == tuple(canonical_coeffs(self.field, self.coeffs))

    def invariants(self):
        return quartic_invariants(self.coeffs)

    def __str__(self):
        return " + ".join(f"({c})X^{4 - k}" for k, c in enumerate(self.coeffs) if c)


def build_quartic(delta, linear_forms: Sequence, quadratic: Sequence, field: Optional[QuadField], label: str = "") -> GenusOneQuartic:
    """delta times the product of linear forms [s, t] (sX + t) and a quadratic [a, b, c]."""
    poly = [_coerce(field, delta)]
    for lf in linear_forms:
        poly = poly_mul(poly, [_coerce(field, c) for c in lf])
    poly = poly_mul(poly, [_coerce(field, c) for c in quadratic])
    if len(poly) != 5:
        raise ValueError("total degree must be 4")
    return GenusOneQuartic(field, tuple(poly), _coerce(field, delta), label)


# ---------------------------------------------------------------------------
# canonical scaling


def _denominator(c) -> int:
    if isinstance(c, QuadFieldElem):
        return math.lcm(c.u.denominator, c.v.denominator)
    return Fraction(c).denominator


def canonical_coeffs(field: Optional[QuadField], coeffs: Sequence) -> tuple:
    """Representative of q modulo multiplication by nonzero squares of the field.

    Clears denominators, strips square factors from the content, then picks the
    unit-square multiple whose leading coefficient is least in the class order.
    """
    cs = [_coerce(field, c) for c in coeffs]
    den = math.lcm(*(_denominator(c) for c in cs))
    cs = [c * den * den for c in cs]
    if field is None:
        g = math.gcd(*(int(c) for c in cs))
        sq = math.prod(p ** (e // 2) for p, e in factorint(g).items()) if g > 1 else 1
        return tuple(Fraction(int(c) // (sq * sq)) for c in cs)
    g = None
    for c in cs:
        if c:
            g = c if g is None else quad_int_gcd(g, c)
    _, fac = factor_element(g)
    sq = field(1)
    for pi, e in fac:
        sq = sq * pi ** (e // 2)
    cs = [c / (sq * sq) for c in cs]
    lead = next(c for c in cs if c)
    u = _unit_square_orbit_min(lead) / lead
    return tuple(c * u for c in cs)


# ---------------------------------------------------------------------------
# invariants and Jacobians


def quartic_invariants(coeffs: Sequence):
    """Classical invariants (I, J) of a X^4 + b X^3 + c X^2 + d X + e."""
    a, b, c, d, e = coeffs
    I = 12 * a * e - 3 * b * d + c * c
    J = 72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c * c * c
    return I, J


def discriminant(coeffs: Sequence):
    I, J = quartic_invariants(coeffs)
    return (4 * I**3 - J * J) / 27


@dataclass(frozen=True)
class WeierstrassModel:
    """y^2 = x^3 + a2 x^2 + a4 x + a6 over Q (``field=None``) or Q(sqrt D)."""

    field: Optional[QuadField]
    a4: Coeff
    a6: Coeff
    a2: Coeff = 0

    def __post_init__(self):
        for name in ("a2", "a4", "a6"):
            object.__setattr__(self, name, _coerce(self.field, getattr(self, name)))
        if self.discriminant() == 0:
            raise ValueError("singular Weierstrass model")

    def c_invariants(self):
        b2, b4, b6 = 4 * self.a2, 2 * self.a4, 4 * self.a6
        c4 = b2 * b2 - 24 * b4
        c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
        return c4, c6

    def discriminant(self):
        c4, c6 = self.c_invariants()
        return (c4**3 - c6 * c6) / 1728

    def j_invariant(self):
        c4, _ = self.c_invariants()
        return c4**3 / self.discriminant()

    def contains(self, x, y) -> bool:
        return y * y == x**3 + self.a2 * x * x + self.a4 * x + self.a6

    def __str__(self):
        parts = ["x^3"]
        if self.a2:
            parts.append(f"({self.a2})x^2")
        parts.append(f"({self.a4})x")
        parts.append(f"({self.a6})")
        return "y^2 = " + " + ".join(parts)


def jacobian_model(q: GenusOneQuartic) -> WeierstrassModel:
    """Y^2 = X^3 - 27 I X - 27 J."""
    I, J = quartic_invariants(q.coeffs)
    return WeierstrassModel(q.field, -27 * I, -27 * J)


def j_invariant(curve) -> Coeff:
    if isinstance(curve, GenusOneQuartic):
        curve = jacobian_model(curve)
    return curve.j_invariant()


def neg_delta_map(q: GenusOneQuartic, X, Y):
    """(X, Y) on delta*f = Y^2 goes to (X, iY) on -delta*f = Y^2; returns the image curve and point."""
    if q.field is None or q.field.D != -1:
        raise ValueError("the map needs i in the field")
    i = q.field.gen
    image = q.scaled(-1)
    image = GenusOneQuartic(q.field, image.coeffs, -q.delta if q.delta is not None else None, q.label)
    return image, (X, i * Y)


def class_order_key(c) -> tuple:
    if isinstance(c, QuadFieldElem):
        return _class_order(c)
    c = Fraction(c)
    return (abs(c), -c)
