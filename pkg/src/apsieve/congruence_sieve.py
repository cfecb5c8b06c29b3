"""Modular elimination of coefficient tuples by full enumeration of (n mod p, d mod p)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from apsieve.exact_arith import is_prime, primes_up_to
from apsieve.tuple_enum import ATuple

DEFAULT_PRIMES = tuple(p for p in primes_up_to(31) if p > 2)


@dataclass(frozen=True)
class SieveVerdict:
    atuple: ATuple
    p: int
    witness: Optional[tuple[int, int]]

    @property
    def survives(self) -> bool:
        return self.witness is not None

    @property
    def outcome(self) -> str:
        return "survives" if self.survives else "eliminated"

    def to_dict(self) -> dict:
        return {
            "tuple": list(self.atuple.a),
            "p": self.p,
            "outcome": self.outcome,
            "witness": list(self.witness) if self.witness else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _check_prime(p: int):
    if p == 2 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")


def _square_set(p: int) -> set[int]:
    return {(t * t) % p for t in range(p)}


def consistent(t: Sequence[int], p: int, n: int, d: int, squares: Optional[set] = None) -> bool:
    """The local predicate for one residue pair (n, d) modulo p."""
    if n % p == 0 and d % p == 0:
        return False
    squares = squares if squares is not None else _square_set(p)
    for i, a in enumerate(t):
        v = (n + i * d) % p
        if a % p == 0:
            if v:
                return False
        elif v * pow(a, -1, p) % p not in squares:
            return False
    return True


def survives_mod_p(t: ATuple, p: int) -> SieveVerdict:
    _check_prime(p)
    sq = _square_set(p)
    for n in range(p):
        for d in range(p):
            if consistent(t.a, p, n, d, sq):
                return SieveVerdict(t, p, (n, d))
    return SieveVerdict(t, p, None)


@dataclass(frozen=True)
class SieveReport:
    atuple: ATuple
    verdicts: tuple[SieveVerdict, ...]

    @property
    def eliminated_at(self) -> Optional[int]:
        last = self.verdicts[-1] if self.verdicts else None
        return last.p if last is not None and not last.survives else None

    @property
    def survives(self) -> bool:
        return self.eliminated_at is None


def sieve_tuple(t: ATuple, primes: Iterable[int] = DEFAULT_PRIMES) -> SieveReport:
    out = []
    for p in primes:
        v = survives_mod_p(t, p)
        out.append(v)
        if not v.survives:
            break
    return SieveReport(t, tuple(out))


def auto_eliminate(tuples: Iterable[ATuple], primes: Sequence[int] = DEFAULT_PRIMES):
    """Split a stream into survivors and elimination certificates, keeping input order."""
    primes = list(primes)
    survivors, certificates = [], []
    for t in tuples:
        rep = sieve_tuple(t, primes)
        if rep.survives:
            survivors.append(t)
        else:
            certificates.append(rep.verdicts[-1])
    return survivors, certificates


def replay_certificate(rec: dict) -> bool:
    """Re-derive a certificate from scratch; True iff the recorded outcome is confirmed."""
    t = ATuple(rec["tuple"])
    p = int(rec["p"])
    _check_prime(p)
    if rec["outcome"] == "survives":
        w = rec.get("witness")
        return w is not None and consistent(t.a, p, int(w[0]), int(w[1]))
    if rec["outcome"] == "eliminated":
        sq = _square_set(p)
        return not any(consistent(t.a, p, n, d, sq) for n in range(p) for d in range(p))
    raise ValueError(f"unknown outcome {rec['outcome']!r}")
