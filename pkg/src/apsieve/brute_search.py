"""Exhaustive search of (n, d) boxes for n(n+d)...(n+(k-1)d) = b*y^2, and solution checking."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

from apsieve.exact_arith import (
    factorint,
    greatest_prime_factor,
    is_squarefree,
)
from apsieve.tuple_enum import ATuple, Progression, Solution, extract_tuple


@dataclass(frozen=True)
class BCondition:
    """Constraint on the squarefree part b: ``eq`` (P(b) = p0), ``le`` (P(b) <= p0) or ``one``."""

    kind: str
    p0: int = 1

    def __post_init__(self):
        if self.kind not in ("eq", "le", "one"):
            raise ValueError(f"unknown b-condition {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "BCondition":
        if text == "one":
            return cls("one", 1)
        kind, _, p = text.partition(":")
        if kind not in ("eq", "le") or not p.isdigit():
            raise ValueError(f"bad b-condition {text!r}; expected eq:P, le:P or one")
        return cls(kind, int(p))

    @property
    def bound(self) -> int:
        return 1 if self.kind == "one" else self.p0

    def accepts(self, b: int) -> bool:
        if self.kind == "one":
            return b == 1
        P = greatest_prime_factor(b)
        return P == self.p0 if self.kind == "eq" else P <= self.p0

    def __str__(self):
        return "one" if self.kind == "one" else f"{self.kind}:{self.p0}"


@dataclass(frozen=True)
class SearchSpec:
    k: int
    n_min: int
    n_max: int
    d_min: int
    d_max: int
    bcond: BCondition = field(default_factory=lambda: BCondition("le", 1))

    def __post_init__(self):
        if self.d_min < 1 or self.d_min > self.d_max or self.n_min > self.n_max:
            raise ValueError("empty or invalid search box (d_min must be >= 1)")
        if self.k < 1:
            raise ValueError("k must be positive")


class KernelTable:
    """Squarefree kernel and greatest prime factor of every integer in [1, N], by sieving."""

    def __init__(self, N: int):
        self.N = N
        ker = list(range(N + 1))
        gpf = [1] * (N + 1)
        for p in range(2, N + 1):
            if gpf[p] != 1:
                continue
            for m in range(p, N + 1, p):
                gpf[m] = p
            pp = p * p
            for m in range(pp, N + 1, pp):
                while ker[m] % pp == 0:
                    ker[m] //= pp
        self.ker = ker
        self.gpf = gpf

    def kernel(self, m: int) -> int:
        a = abs(m)
        if a <= self.N:
            return self.ker[a]
        return _kernel_slow(a)

    def largest_prime(self, m: int) -> int:
        a = abs(m)
        if a <= self.N:
            return self.gpf[a]
        return greatest_prime_factor(a)


def _kernel_slow(a: int) -> int:
    return math.prod(p for p, e in factorint(a).items() if e % 2)


def _table_for(spec: SearchSpec) -> KernelTable:
    top = max(abs(spec.n_min), abs(spec.n_max)) + (spec.k - 1) * spec.d_max
    return KernelTable(min(top, 2_000_000))


def _check_pair(n: int, d: int, spec: SearchSpec, table: KernelTable) -> Optional[Solution]:
    k = spec.k
    terms = [n + i * d for i in range(k)]
    if 0 in terms:
        return None
    if sum(1 for t in terms if t < 0) % 2:
        return None
    # a prime dividing one term to an odd power and no other term survives in b;
    # primes shared by two terms divide their index gap, so are at most k-1.
    limit = max(spec.bcond.bound, k - 1)
    b = 1
    for t in terms:
        a = table.kernel(t)
        if a > 1 and table.largest_prime(a) > limit:
            return None
        g = math.gcd(b, a)
        b = (b // g) * (a // g)
    if not spec.bcond.accepts(b):
        return None
    prod = math.prod(terms)
    y = math.isqrt(prod // b)
    a, x = extract_tuple(Progression(n, d, k))
    return Solution(Progression(n, d, k), b, y, x, a)


def iter_search(spec: SearchSpec) -> Iterator[Solution]:
    """Solutions in the box, d ascending then n ascending."""
    table = _table_for(spec)
    for d in range(spec.d_min, spec.d_max + 1):
        for n in range(spec.n_min, spec.n_max + 1):
            if math.gcd(n, d) != 1:
                continue
            sol = _check_pair(n, d, spec, table)
            if sol is not None:
                yield sol


def search_box(spec: SearchSpec) -> list[Solution]:
    return list(iter_search(spec))


def _search_chunk(args):
    spec, d_lo, d_hi = args
    sub = SearchSpec(spec.k, spec.n_min, spec.n_max, d_lo, d_hi, spec.bcond)
    return search_box(sub)


def search_box_parallel(spec: SearchSpec, jobs: int) -> list[Solution]:
    """Partition by d across processes; results merged in (d, n) order."""
    if jobs <= 1:
        return search_box(spec)
    from concurrent.futures import ProcessPoolExecutor

    span = spec.d_max - spec.d_min + 1
    step = max(1, -(-span // jobs))
    chunks = [(spec, lo, min(lo + step - 1, spec.d_max)) for lo in range(spec.d_min, spec.d_max + 1, step)]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        parts = list(ex.map(_search_chunk, chunks))
    return [s for part in parts for s in part]


@dataclass
class VerifyReport:
    ok: bool
    reasons: list[str]
    atuple: Optional[ATuple] = None
    product: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "reasons": self.reasons,
            "tuple": list(self.atuple.a) if self.atuple else None,
            "product": self.product,
        }


def verify_solution(n: int, d: int, k: int, b: int, y: int) -> VerifyReport:
    reasons = []
    if math.gcd(n, d) != 1:
        reasons.append(f"gcd({n}, {d}) != 1")
    terms = [n + i * d for i in range(k)]
    prod = math.prod(terms)
    if prod != b * y * y:
        reasons.append(f"product {prod} != {b}*{y}^2")
    if b == 0 or not is_squarefree(b):
        reasons.append(f"b={b} is not squarefree")
    if b <= 0 or y <= 0:
        reasons.append("b and y must be positive")
    t = None
    if 0 in terms:
        reasons.append("a term is zero")
    elif math.gcd(n, d) == 1:
        t, _ = extract_tuple(Progression(n, d, k))
    return VerifyReport(not reasons, reasons, t, prod)


def solution_json(sol: Solution) -> str:
    return json.dumps(sol.to_dict())
