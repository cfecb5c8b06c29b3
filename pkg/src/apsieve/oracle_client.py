"""Fixture store for curve facts that are consumed, never computed: Jacobian ranks and
Chabauty X-coordinate sets, keyed by a canonical serialization of the quartic model."""

from __future__ import annotations

import json
import os
import selectors
import subprocess
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Union

from apsieve.exact_arith import QuadFieldElem
from apsieve.curve_lab.quartic import GenusOneQuartic

ENV_VAR = "APSIEVE_FIXTURES"
LIVE_TIMEOUT = 600.0


class _MissingType:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Missing"

    def __bool__(self):
        return False


Missing = _MissingType()


class OracleError(ValueError):
    pass


class FixtureParseError(OracleError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class FixtureConflictError(OracleError):
    pass


# ---------------------------------------------------------------------------
# keys


def _coeff_text(c) -> str:
    if isinstance(c, QuadFieldElem):
        u, v = c.u, c.v
    else:
        u, v = Fraction(c), Fraction(0)
    return f"{u.numerator}/{u.denominator}+{v.numerator}/{v.denominator}*s"


def canonical_key(q: GenusOneQuartic) -> str:
    """``D=<d>|c4,c3,c2,c1,c0``, each coefficient written ``u/v+w/x*s`` with s = sqrt(D).

    Over Q, D is written as 1 and every w/x is 0/1.
    """
    if not q.is_canonical():
        raise OracleError("canonical_key needs a canonical quartic; call .canonical() first")
    return f"D={q.D}|" + ",".join(_coeff_text(c) for c in q.coeffs)


def key_for(q: GenusOneQuartic) -> str:
    """Key of the canonical representative of q."""
    return canonical_key(q.canonical())


def _check_question(q: str) -> str:
    # plain "chabauty" marks a Chabauty answer whose auxiliary prime was not recorded
    if q in ("rank", "chabauty"):
        return q
    kind, _, p = q.partition(":")
    if kind == "chabauty" and p.isdigit() and int(p) > 1:
        return q
    raise OracleError(f"bad question {q!r}; expected 'rank' or 'chabauty:<p>'")


def _chabauty_prime(q: str) -> int:
    """Auxiliary prime of a Chabauty question; 0 when unrecorded."""
    _, _, p = q.partition(":")
    return int(p) if p else 0


# ---------------------------------------------------------------------------
# records and stores

Answer = Union[int, frozenset]


@dataclass(frozen=True)
class OracleQuery:
    key: str
    question: str

    def __post_init__(self):
        _check_question(self.question)


@dataclass(frozen=True)
class OracleRecord:
    query: OracleQuery
    answer: Answer
    provenance: str = ""

    @property
    def key(self) -> str:
        return self.query.key

    @property
    def question(self) -> str:
        return self.query.question

    def to_json(self) -> str:
        if self.question == "rank":
            ans = self.answer
        else:
            ans = [str(x) for x in sorted(self.answer)]
        return json.dumps(
            {"key": self.key, "q": self.question, "answer": ans, "provenance": self.provenance},
            sort_keys=False,
        )

    @classmethod
    def from_obj(cls, obj: dict) -> "OracleRecord":
        if not isinstance(obj, dict):
            raise OracleError("record must be a JSON object")
        for name in ("key", "q", "answer"):
            if name not in obj:
                raise OracleError(f"missing field {name!r}")
        q = _check_question(obj["q"])
        ans = obj["answer"]
        if q == "rank":
            if not isinstance(ans, int) or isinstance(ans, bool) or ans < 0:
                raise OracleError("rank answer must be a non-negative integer")
        else:
            if not isinstance(ans, list):
                raise OracleError("chabauty answer must be a list of rationals")
            try:
                ans = frozenset(Fraction(str(x)) for x in ans)
            except (ValueError, ZeroDivisionError) as exc:
                raise OracleError(f"bad rational in answer: {exc}") from None
        return cls(OracleQuery(str(obj["key"]), q), ans, str(obj.get("provenance", "")))


class OracleStore:
    """Immutable map from (key, question) to records."""

    def __init__(self, records: Iterable[OracleRecord] = ()):
        table: dict[tuple[str, str], OracleRecord] = {}
        for r in records:
            k = (r.key, r.question)
            old = table.get(k)
            if old is not None and old.answer != r.answer:
                raise FixtureConflictError(f"conflicting answers for {r.key} {r.question}")
            if old is None:
                table[k] = r
        for (key, q), r in table.items():
            if q.startswith("chabauty"):
                rk = table.get((key, "rank"))
                if rk is not None and rk.answer == 0:
                    raise FixtureConflictError(f"chabauty record on a rank-0 curve: {key}")
        self._table: Mapping = MappingProxyType(table)

    def __len__(self):
        return len(self._table)

    def __iter__(self):
        return iter(self._table.values())

    def __eq__(self, other):
        return isinstance(other, OracleStore) and dict(self._table) == dict(other._table)

    def lookup(self, query: OracleQuery):
        r = self._table.get((query.key, query.question))
        return Missing if r is None else r.answer

    def record(self, query: OracleQuery) -> Optional[OracleRecord]:
        return self._table.get((query.key, query.question))

    def chabauty_records(self, key: str) -> list[OracleRecord]:
        return sorted(
            (r for (k, q), r in self._table.items() if k == key and q.startswith("chabauty")),
            key=lambda r: _chabauty_prime(r.question),
        )

    def dumps(self) -> str:
        lines = [r.to_json() for _, r in sorted(self._table.items())]
        return "".join(line + "\n" for line in lines)


def parse_fixtures(text: str) -> OracleStore:
    records = []
    for no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FixtureParseError(no, f"invalid JSON ({exc.msg})") from None
        try:
            records.append(OracleRecord.from_obj(obj))
        except OracleError as exc:
            raise FixtureParseError(no, str(exc)) from None
    return OracleStore(records)


def load_fixtures(path: Union[str, Path]) -> OracleStore:
    return parse_fixtures(Path(path).read_text())


def bundled_fixtures_text() -> str:
    return resources.files("apsieve.data").joinpath("curve_fixtures.jsonl").read_text()


def load_bundled() -> OracleStore:
    return parse_fixtures(bundled_fixtures_text())


def default_store(path: Optional[str] = None) -> OracleStore:
    """Explicit path, else $APSIEVE_FIXTURES, else the bundled file."""
    path = path or os.environ.get(ENV_VAR)
    if path:
        return load_fixtures(path)
    return load_bundled()


# ---------------------------------------------------------------------------
# live mode


class LiveOracle:
    """Line protocol to an external process: send ``<key> <q>``, read one JSON answer line."""

    def __init__(self, argv: list[str], timeout: float = LIVE_TIMEOUT):
        self.timeout = timeout
        self.proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, bufsize=1
        )
        self._sel = selectors.DefaultSelector()
        self._sel.register(self.proc.stdout, selectors.EVENT_READ)

    def ask(self, query: OracleQuery):
        self.proc.stdin.write(f"{query.key} {query.question}\n")
        self.proc.stdin.flush()
        if not self._sel.select(self.timeout):
            raise TimeoutError(f"no answer within {self.timeout} s")
        line = self.proc.stdout.readline()
        if not line:
            raise OracleError("live oracle closed its output")
        ans = json.loads(line)
        if ans is None:
            return Missing
        rec = OracleRecord.from_obj({"key": query.key, "q": query.question, "answer": ans})
        return rec.answer

    def close(self):
        if self.proc.poll() is None:
            self.proc.stdin.close()
            self.proc.wait(timeout=5)


class Oracle:
    """Fixture store with an optional live fallback; the facade used by the pipeline."""

    def __init__(self, store: Optional[OracleStore] = None, live: Optional[LiveOracle] = None):
        self.store = store if store is not None else OracleStore()
        self.live = live

    def lookup(self, query: OracleQuery):
        ans = self.store.lookup(query)
        if ans is Missing and self.live is not None:
            ans = self.live.ask(query)
        return ans

    def rank(self, q: GenusOneQuartic):
        ans = self.lookup(OracleQuery(key_for(q), "rank"))
        return None if ans is Missing else ans

    def chabauty(self, q: GenusOneQuartic) -> Optional[tuple[int, frozenset]]:
        """(prime, X-set) from a Chabauty record; all records for one curve must agree.

        The prime is 0 when the record does not name one.
        """
        recs = self.store.chabauty_records(key_for(q))
        if not recs:
            return None
        sets = {r.answer for r in recs}
        if len(sets) > 1:
            raise FixtureConflictError(f"Chabauty records disagree for {key_for(q)}")
        return _chabauty_prime(recs[0].question), recs[0].answer
