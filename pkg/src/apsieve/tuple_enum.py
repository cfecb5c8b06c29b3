"""Coefficient tuples: enumeration, mirroring, extraction and sub-progression reductions."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from apsieve.exact_arith import (
    greatest_prime_factor,
    is_squarefree,
    primes_up_to,
    squarefree_decompose,
)


@dataclass(frozen=True)
class ATuple:
    """Squarefree parts (a_0, ..., a_{k-1}) with n + i*d = a_i * x_i^2."""

    a: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        if len(self.a) < 2:
            raise ValueError("a tuple needs at least two coefficients")
        for v in self.a:
            if v == 0 or not is_squarefree(v):
                raise ValueError(f"coefficient {v} is not a nonzero squarefree integer")

    @property
    def k(self) -> int:
        return len(self.a)

    def __iter__(self):
        return iter(self.a)

    def __len__(self):
        return len(self.a)

    def __getitem__(self, i):
        return self.a[i]

    def __str__(self):
        return "(" + ",".join(map(str, self.a)) + ")"

    def to_json(self) -> str:
        return json.dumps({"k": self.k, "a": list(self.a)})

    @classmethod
    def from_json(cls, line: str) -> "ATuple":
        rec = json.loads(line)
        t = cls(rec["a"])
        if "k" in rec and rec["k"] != t.k:
            raise ValueError(f"k={rec['k']} does not match {len(t.a)} coefficients")
        return t


@dataclass(frozen=True)
class Progression:
    n: int
    d: int
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if math.gcd(self.n, self.d) != 1:
            raise ValueError(f"gcd({self.n}, {self.d}) != 1")

    def terms(self) -> list[int]:
        return [self.n + i * self.d for i in range(self.k)]

    def product(self) -> int:
        return math.prod(self.terms())

    def reversed(self) -> "Progression":
        return Progression(self.n + (self.k - 1) * self.d, -self.d, self.k)


@dataclass(frozen=True)
class Solution:
    progression: Progression
    b: int
    y: int
    x: tuple[int, ...]
    atuple: Optional[ATuple] = None

    def to_dict(self) -> dict:
        p = self.progression
        return {
            "n": p.n,
            "d": p.d,
            "k": p.k,
            "b": self.b,
            "y": self.y,
            "tuple": list(self.atuple.a) if self.atuple else None,
        }


@dataclass(frozen=True)
class TupleConstraints:
    pmax_b: int
    max_sign_changes: int = 1
    product_sign: int = 1
    forced_divisibility: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "forced_divisibility", frozenset(self.forced_divisibility))
        if self.product_sign not in (1, -1, 0):
            raise ValueError("product_sign must be +1, -1 or 0 (unconstrained)")


def coefficient_alphabet(pmax: int) -> list[int]:
    """All signed squarefree integers whose prime factors are at most ``pmax``, sorted."""
    ps = primes_up_to(pmax) if pmax >= 2 else ()
    mags = [math.prod(c) for r in range(len(ps) + 1) for c in itertools.combinations(ps, r)]
    return sorted([m for m in mags] + [-m for m in mags])


def sign_changes(t: Sequence[int]) -> int:
    a = list(t)
    return sum(1 for u, v in zip(a, a[1:]) if u * v < 0)


def mirror(t: ATuple) -> ATuple:
    return ATuple(tuple(reversed(t.a)))


def pair_gcd_ok(a: Sequence[int], i: int, j: int) -> bool:
    g = math.gcd(a[i], a[j])
    return g == 1 or g == greatest_prime_factor(j - i)


def satisfies(t: Sequence[int], c: TupleConstraints, check_forced: bool = True) -> bool:
    """The candidate predicate; ``generate_candidates`` emits exactly the alphabet tuples meeting it."""
    a = list(t)
    k = len(a)
    bound = max(c.pmax_b, k - 1)
    for v in a:
        if v == 0 or not is_squarefree(v) or greatest_prime_factor(abs(v)) > bound:
            return False
    if any(not pair_gcd_ok(a, i, j) for i in range(k) for j in range(i + 1, k)):
        return False
    if sign_changes(a) > c.max_sign_changes:
        return False
    if c.product_sign and (math.prod(a) > 0) != (c.product_sign > 0):
        return False
    if check_forced and any(a[i] % p for i, p in c.forced_divisibility):
        return False
    return True


def generate_candidates(k: int, c: TupleConstraints) -> Iterator[ATuple]:
    """Depth-first generation in lexicographic order with prefix pruning."""
    if k < 2:
        raise ValueError("k must be at least 2")
    alphabet = coefficient_alphabet(max(c.pmax_b, k - 1))
    forced: dict[int, list[int]] = {}
    for i, p in c.forced_divisibility:
        forced.setdefault(i, []).append(p)

    def extend(prefix: list[int], changes: int):
        i = len(prefix)
        if i == k:
            if not c.product_sign or (math.prod(prefix) > 0) == (c.product_sign > 0):
                yield ATuple(tuple(prefix))
            return
        for v in alphabet:
            if any(v % p for p in forced.get(i, ())):
                continue
            ch = changes + (1 if prefix and prefix[-1] * v < 0 else 0)
            if ch > c.max_sign_changes:
                continue
            if all(math.gcd(prefix[j], v) in (1, greatest_prime_factor(i - j)) for j in range(i)):
                prefix.append(v)
                yield from extend(prefix, ch)
                prefix.pop()

    yield from extend([], 0)


def generate_union(k: int, runs: Iterable[TupleConstraints]) -> list[ATuple]:
    """Union of several constraint runs, deduplicated, in lexicographic order."""
    seen = set()
    for c in runs:
        seen.update(generate_candidates(k, c))
    return sorted(seen, key=lambda t: t.a)


def k5_constraints(pmax_b: int = 5) -> list[TupleConstraints]:
    """The two k=5 runs: after reflecting, 5 divides the term at index 1 or index 2."""
    return [
        TupleConstraints(pmax_b, forced_divisibility={(1, 5)}),
        TupleConstraints(pmax_b, forced_divisibility={(2, 5)}),
    ]


def extract_tuple(p: Progression, pmax_b: Optional[int] = None) -> tuple[ATuple, tuple[int, ...]]:
    """Squarefree parts of the terms; ``pmax_b=None`` skips the prime bound."""
    a, x = [], []
    for i, term in enumerate(p.terms()):
        if term == 0:
            raise ValueError(f"term {i} of the progression is zero")
        sd = squarefree_decompose(term)
        a.append(sd.b)
        x.append(sd.y)
    if pmax_b is not None:
        bound = max(pmax_b, p.k - 1)
        worst = max(greatest_prime_factor(abs(v)) for v in a)
        if worst > bound:
            raise ValueError(f"coefficient prime {worst} exceeds max(P(b), k-1) = {bound}")
    return ATuple(tuple(a)), tuple(x)


def realize(t: ATuple, n: int, d: int) -> bool:
    """Whether (n, d) realizes t, i.e. every n+id is a_i times a nonzero square."""
    for i, ai in enumerate(t.a):
        term = n + i * d
        if term == 0 or term % ai:
            return False
        q = term // ai
        if q <= 0 or math.isqrt(q) ** 2 != q:
            return False
    return True


# ---------------------------------------------------------------------------
# reductions


def _parities(t: ATuple) -> list[tuple[int, int]]:
    """Residues (n mod 2, d mod 2) compatible with gcd(n, d) = 1 and with t.

    An even coefficient forces an even term.  An odd coefficient allows both.
    """
    out = []
    for n2, d2 in ((0, 1), (1, 0), (1, 1)):
        if all((n2 + i * d2) % 2 == 0 for i, ai in enumerate(t.a) if ai % 2 == 0):
            out.append((n2, d2))
    return out


def half_subprogression(t: ATuple, start: int, count: int) -> Optional[ATuple]:
    """Halve the terms start, start+2, ... when every one is provably even.

    Under the surviving parity assignments, selected terms must be even; then
    (n + start*d)/2 + j*d runs through halves of the selected terms and its
    tuple has a/2 for even a and 2a for odd a.
    """
    idx = [start + 2 * j for j in range(count)]
    if count < 1 or start < 0 or idx[-1] >= t.k:
        raise ValueError("selected indices out of range")
    pars = _parities(t)
    if not pars:
        return None
    for n2, d2 in pars:
        if any((n2 + i * d2) % 2 for i in idx):
            return None
    return ATuple(tuple(t.a[i] // 2 if t.a[i] % 2 == 0 else 2 * t.a[i] for i in idx))


def find_subtuple(t: ATuple, known: Iterable[ATuple]) -> Optional[tuple[int, ATuple]]:
    """First contiguous window of t equal to a known tuple or its mirror."""
    known = list(known)
    for off in range(t.k):
        for kt in known:
            w = t.a[off : off + kt.k]
            if len(w) == kt.k and (w == kt.a or w == mirror(kt).a):
                return off, kt
    return None


def read_tuples(lines: Iterable[str]) -> Iterator[ATuple]:
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        try:
            yield ATuple.from_json(line)
        except (ValueError, KeyError, TypeError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
