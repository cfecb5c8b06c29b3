"""Exact integer, rational and quadratic-field arithmetic.

Everything here is pure and exact: ``int`` and ``fractions.Fraction`` for the
rationals, and :class:`QuadFieldElem` for elements ``u + v*sqrt(D)`` of the two
fields that occur in the curve work, Q(i) (``D = -1``) and Q(sqrt 3) (``D = 3``).
Both rings of integers are Z[sqrt D], norm-Euclidean, of class number one.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional, Union

Rational = Union[int, Fraction]

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


# ---------------------------------------------------------------------------
# integers


@lru_cache(maxsize=None)
def primes_up_to(n: int) -> tuple[int, ...]:
    if n < 2:
        return ()
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24 (first 13 prime bases)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorint(n: int) -> dict[int, int]:
    """Prime factorisation of ``|n|`` (``n != 0``) as ``{prime: exponent}``."""
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    out: dict[int, int] = {}
    for p in primes_up_to(1000):
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m < 1000 * 1000 or is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        f = _pollard_brent(m)
        stack += [f, m // f]
    return out


@dataclass(frozen=True)
class SquarefreeDecomp:
    b: int
    y: int


def squarefree_decompose(m: int) -> SquarefreeDecomp:
    """Write ``m = b*y**2`` with ``b`` squarefree (sign of ``m``) and ``y >= 1``."""
    if m == 0:
        raise ValueError("squarefree_decompose: zero has no squarefree part")
    b, y = (1 if m > 0 else -1), 1
    for p, e in factorint(m).items():
        if e % 2:
            b *= p
        y *= p ** (e // 2)
    return SquarefreeDecomp(b, y)


def squarefree_part(m: int) -> int:
    return squarefree_decompose(m).b


def is_squarefree(m: int) -> bool:
    return m != 0 and all(e == 1 for e in factorint(m).values())


def greatest_prime_factor(m: int) -> int:
    """P(m): largest prime divisor of ``m``; P(1) = 1."""
    if m <= 0:
        raise ValueError("greatest_prime_factor needs m >= 1")
    if m == 1:
        return 1
    return max(factorint(m))


def is_square(n: Rational) -> bool:
    n = Fraction(n)
    if n < 0:
        return False
    a, b = n.numerator, n.denominator
    return math.isqrt(a) ** 2 == a and math.isqrt(b) ** 2 == b


def rational_sqrt(n: Rational) -> Optional[Fraction]:
    if not is_square(n):
        return None
    n = Fraction(n)
    return Fraction(math.isqrt(n.numerator), math.isqrt(n.denominator))


def jacobi_symbol(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime ``p``."""
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise ValueError(f"jacobi_symbol: modulus {p} is not an odd prime")
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod_prime(a: int, p: int) -> Optional[int]:
    """Tonelli-Shanks; returns the smaller root or None."""
    a %= p
    if p == 2 or a == 0:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return min(r, p - r)


def valuation(n: Rational, p: int) -> int:
    n = Fraction(n)
    if n == 0:
        raise ValueError("valuation of zero")
    v, a, b = 0, n.numerator, n.denominator
    while a % p == 0:
        a //= p
        v += 1
    while b % p == 0:
        b //= p
        v -= 1
    return v


# ---------------------------------------------------------------------------
# quadratic fields


@dataclass(frozen=True)
class QuadField:
    D: int

    def __post_init__(self):
        if self.D in (0, 1) or not is_squarefree(self.D):
            raise ValueError(f"Q(sqrt {self.D}) is not a quadratic field")

    def __call__(self, u: Rational = 0, v: Rational = 0) -> "QuadFieldElem":
        return QuadFieldElem(self, Fraction(u), Fraction(v))

    @property
    def gen(self) -> "QuadFieldElem":
        return self(0, 1)

    @property
    def one(self) -> "QuadFieldElem":
        return self(1)

    def units_mod_squares(self) -> tuple["QuadFieldElem", ...]:
        if self.D == -1:
            return (self(1), self(0, 1))
        if self.D == 3:
            eps = self(2, 1)
            return (self(1), self(-1), eps, -eps)
        raise NotImplementedError(f"unit group of Q(sqrt {self.D})")

    def fundamental_unit(self) -> "QuadFieldElem":
        if self.D == 3:
            return self(2, 1)
        raise NotImplementedError

    def __str__(self):
        return "Q(i)" if self.D == -1 else f"Q(sqrt {self.D})"


GAUSSIAN = QuadField(-1)
QSQRT3 = QuadField(3)


class QuadFieldElem:
    """Immutable ``u + v*sqrt(D)`` with rational ``u, v``."""

    __slots__ = ("field", "u", "v")

    def __init__(self, field: QuadField, u: Fraction, v: Fraction):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def __setattr__(self, name, value):
        raise AttributeError("QuadFieldElem is immutable")

    @property
    def D(self) -> int:
        return self.field.D

    def _coerce(self, other) -> "QuadFieldElem":
        if isinstance(other, QuadFieldElem):
            if other.field != self.field:
                raise ValueError(f"field mismatch: {self.field} vs {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadFieldElem(self.field, Fraction(other), Fraction(0))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadFieldElem(self.field, self.u + o.u, self.v + o.v)

    __radd__ = __add__

    def __neg__(self):
        return QuadFieldElem(self.field, -self.u, -self.v)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadFieldElem(self.field, self.u - o.u, self.v - o.v)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        D = self.field.D
        return QuadFieldElem(
            self.field, self.u * o.u + D * self.v * o.v, self.u * o.v + self.v * o.u
        )

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return (self.field.one / self) ** (-e)
        out, base = self.field.one, self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        q = self * o.conjugate()
        return QuadFieldElem(self.field, q.u / n, q.v / n)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.v == 0 and self.u == other
        if isinstance(other, QuadFieldElem):
            return self.field == other.field and self.u == other.u and self.v == other.v
        return NotImplemented

    def __hash__(self):
        if self.v == 0:
            return hash(self.u)
        return hash((self.field.D, self.u, self.v))

    def __bool__(self):
        return bool(self.u) or bool(self.v)

    def conjugate(self) -> "QuadFieldElem":
        return QuadFieldElem(self.field, self.u, -self.v)

    def norm(self) -> Fraction:
        return self.u * self.u - self.field.D * self.v * self.v

    def trace(self) -> Fraction:
        return 2 * self.u

    def is_integral(self) -> bool:
        return self.u.denominator == 1 and self.v.denominator == 1

    def is_rational(self) -> bool:
        return self.v == 0

    def divides(self, other: "QuadFieldElem") -> bool:
        if not self:
            return not other
        return (self._coerce(other) / self).is_integral()

    def sort_key(self) -> tuple:
        return (abs(self.norm()), self.u, self.v)

    def __repr__(self):
        return f"QuadFieldElem({self})"

    def __str__(self):
        root = "i" if self.field.D == -1 else f"√{self.field.D}"
        if self.v == 0:
            return str(self.u)
        vs = "" if abs(self.v) == 1 else str(abs(self.v))
        if self.u == 0:
            return f"{'-' if self.v < 0 else ''}{vs}{root}"
        return f"{self.u}{'-' if self.v < 0 else '+'}{vs}{root}"


def as_elem(field: QuadField, x) -> QuadFieldElem:
    if isinstance(x, QuadFieldElem):
        if x.field != field:
            raise ValueError("field mismatch")
        return x
    return field(Fraction(x))


def _round_half(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def _require_integral(*xs: QuadFieldElem):
    for x in xs:
        if not x.is_integral():
            raise ValueError(f"{x} is not an algebraic integer of {x.field}")
        if x.field.D not in (-1, 3):
            raise ValueError("only Z[i] and Z[sqrt 3] are supported")


def quad_int_gcd(a: QuadFieldElem, b: QuadFieldElem) -> QuadFieldElem:
    """Euclidean gcd in Z[i] or Z[sqrt 3]; defined up to a unit."""
    _require_integral(a, b)
    if not a and not b:
        raise ValueError("gcd(0, 0) is undefined")
    while b:
        q = a / b
        q = a.field(_round_half(q.u), _round_half(q.v))
        a, b = b, a - q * b
    return a


def is_unit(a: QuadFieldElem) -> bool:
    return a.is_integral() and abs(a.norm()) == 1


@lru_cache(maxsize=None)
def prime_elements(field: QuadField, p: int) -> tuple[QuadFieldElem, ...]:
    """Generators of the primes of Z[sqrt D] lying over the rational prime ``p``."""
    D = field.D
    if D not in (-1, 3):
        raise NotImplementedError
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return (field(1, 1),)
    if D % p == 0:
        return (field.gen,)
    if jacobi_symbol(D, p) == -1:
        return (field(p),)
    r = sqrt_mod_prime(D, p)
    pi = quad_int_gcd(field(p), field(r, 1))
    return (pi, pi.conjugate())


def element_valuation(a: QuadFieldElem, pi: QuadFieldElem) -> int:
    """Exponent of the prime ``pi`` in the nonzero integral element ``a``."""
    if not a:
        raise ValueError("valuation of zero")
    v = 0
    while True:
        q = a / pi
        if not q.is_integral():
            return v
        a, v = q, v + 1


def factor_element(a: QuadFieldElem) -> tuple[QuadFieldElem, list[tuple[QuadFieldElem, int]]]:
    """``a = unit * prod(pi**e)`` for a nonzero algebraic integer ``a``."""
    _require_integral(a)
    if not a:
        raise ValueError("cannot factor zero")
    out = []
    rest = a
    n = abs(rest.norm())
    for p in sorted(factorint(int(n))) if n > 1 else []:
        for pi in prime_elements(a.field, p):
            e = element_valuation(rest, pi)
            if e:
                rest = rest / pi**e
                out.append((pi, e))
    assert is_unit(rest), rest
    return rest, out


def _class_order(e: QuadFieldElem) -> tuple:
    return (abs(e.norm()), e.u * e.u + abs(e.field.D) * e.v * e.v, -e.u, -e.v)


def _unit_square_orbit_min(x: QuadFieldElem) -> QuadFieldElem:
    """Smallest element of ``x * (unit squares)`` under ``_class_order``."""
    field = x.field
    if field.D == -1:
        return min((x, -x), key=_class_order)
    eps2 = field.fundamental_unit() ** 2
    best = x
    for step in (eps2, field.one / eps2):
        cur = x * step
        # size is convex along the orbit, so stop once it starts growing
        while _class_order(cur)[:2] <= _class_order(best)[:2]:
            best = min(best, cur, key=_class_order)
            cur = cur * step
    return best


def _unit_class(u: QuadFieldElem) -> QuadFieldElem:
    """Representative among ``units_mod_squares`` of the unit ``u``."""
    for r in u.field.units_mod_squares():
        if is_square_in_field(u / r) is not None:
            return r
    raise AssertionError(f"unit {u} not classified")


def squarefree_class(a: QuadFieldElem) -> QuadFieldElem:
    """Canonical representative of ``a`` modulo squares of the field.

    The representative is integral with squarefree ideal content; among its
    unit-square multiples the choice minimises (|norm|, size, -u, -v), size
    being ``u^2 + |D| v^2``.
    """
    if not isinstance(a, QuadFieldElem):
        raise TypeError("squarefree_class expects a QuadFieldElem")
    if not a:
        raise ValueError("squarefree_class of zero")
    den = math.lcm(a.u.denominator, a.v.denominator)
    a = a * den * den
    unit, factors = factor_element(a)
    r = _unit_class(unit)
    for pi, e in factors:
        if e % 2:
            r = r * pi
    return _unit_square_orbit_min(r)


def same_square_class(a: QuadFieldElem, b: QuadFieldElem) -> bool:
    return is_square_in_field(a / b) is not None


def is_square_in_field(a: QuadFieldElem) -> Optional[QuadFieldElem]:
    """A square root of ``a`` inside its field, or None."""
    field = a.field
    if not a:
        return field(0)
    n = a.norm()
    root_n = rational_sqrt(n)
    if root_n is None:
        return None
    for s in (root_n, -root_n):
        x2 = (a.u + s) / 2
        x = rational_sqrt(x2)
        if x is None:
            continue
        if x != 0:
            y = a.v / (2 * x)
        else:
            y2 = a.u / field.D
            y = rational_sqrt(y2)
            if y is None:
                continue
        cand = field(x, y)
        if cand * cand == a:
            return cand
    return None


def iter_small_elements(field: QuadField, bound: int) -> Iterator[QuadFieldElem]:
    for u in range(-bound, bound + 1):
        for v in range(-bound, bound + 1):
            yield field(u, v)
