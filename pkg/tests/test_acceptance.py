"""End-to-end acceptance checks, one per criterion, at exact equality.

Each check prints a PASS/FAIL line; the same lines are repeated in the pytest
terminal summary.  Run standalone with ``python3 tests/test_acceptance.py``.
"""

import itertools
import math
import random
import time
from fractions import Fraction as F

import pytest

from apsieve.brute_search import BCondition, SearchSpec, search_box
from apsieve.congruence_sieve import DEFAULT_PRIMES, replay_certificate, sieve_tuple
from apsieve.curve_lab import reference
from apsieve.curve_lab.delta import delta_candidates, same_class_sets
from apsieve.curve_lab.elimination import quadruple_quartic
from apsieve.curve_lab.points import _square_in, iter_heights, rank0_points
from apsieve.curve_lab.quartic import GenusOneQuartic, j_invariant
from apsieve.curve_lab.relations import backsubstitute, derive_family, pivot_system
from apsieve.exact_arith import primes_up_to, squarefree_decompose
from apsieve.oracle_client import Oracle, load_bundled
from apsieve.pipeline import run_pipeline_k5, verify_theorem1
from apsieve.tuple_enum import ATuple, Progression, extract_tuple, realize

RESULTS: dict[int, str] = {}


def _record(cid: int, ok: bool, elapsed: float, limit, detail: str) -> str:
    in_time = limit is None or elapsed < limit
    status = "PASS" if ok and in_time else "FAIL"
    bound = "" if limit is None else f" (limit {limit:g} s)"
    line = f"{status} criterion {cid}: {detail} [{elapsed:.2f} s{bound}]"
    RESULTS[cid] = line
    print(line)
    return status


def _run(cid, fn, limit=None):
    t0 = time.perf_counter()
    ok, detail = fn()
    status = _record(cid, ok, time.perf_counter() - t0, limit, detail)
    assert status == "PASS", RESULTS[cid]


@pytest.fixture(scope="module")
def oracle():
    return Oracle(load_bundled())


# ---------------------------------------------------------------------------
# 1. displayed relation systems


def _norm(i, ci, j, cj, m, cm):
    g = math.gcd(ci, cj, cm)
    terms = sorted({i: ci // g, j: cj // g, m: -cm // g}.items())
    s = 1 if terms[0][1] > 0 else -1
    return tuple((k, s * v) for k, v in terms)


# (tuple, pivots, [(i, ci, j, cj, m, cm)]) for ci x_i^2 + cj x_j^2 = cm x_m^2
SYSTEMS = [
    (reference.T1, (0, 5), [(5, 1, 0, 4, 1, 25), (5, 4, 0, 1, 4, 10), (5, 6, 0, -1, 6, 50)]),
    (reference.T2, (0, 4), [(4, 1, 0, 1, 1, 2), (4, 9, 0, 1, 3, 10), (4, 9, 0, -1, 6, 2)]),
    (reference.T3, (0, 3), [(3, 2, 0, 2, 1, 1), (3, 4, 0, 1, 2, 5), (3, 12, 0, -3, 6, 1)]),
    # displayed as (1/4, -9/4 | -5), (1/2, -3/2 | 2), (3/4, -3/4 | 1); scaled by 4
    ((-3, -5, 2, 1, 1), (0, 4), [(4, 1, 0, -9, 1, -20), (4, 2, 0, -6, 2, 8), (4, 3, 0, -3, 3, 4)]),
]


def check_systems():
    missing = []
    for t, piv, rels in SYSTEMS:
        got = {_norm(r.i, r.A, r.j, r.B, r.m, r.C) for r in pivot_system(ATuple(t), *piv)}
        missing += [(t, r) for r in rels if _norm(*r) not in got]
    n = sum(len(r) for _, _, r in SYSTEMS)
    return not missing, f"{n - len(missing)}/{n} displayed relations reproduced"


def test_criterion_1():
    _run(1, check_systems, 1.0)


# ---------------------------------------------------------------------------
# 2. delta sets


def check_delta_sets():
    bad = []
    for t in (reference.T1, reference.T2, reference.T6):
        got = delta_candidates(derive_family(ATuple(t))).survivors
        if not same_class_sets(got, reference.DELTA_SETS[t]):
            bad.append((t, [str(x) for x in got]))
    return not bad, "delta sets match for 3 families" if not bad else f"mismatch {bad}"


def test_criterion_2():
    _run(2, check_delta_sets, 10.0)


# ---------------------------------------------------------------------------
# 3. j-invariants


def check_j():
    eq = 0
    for t, delta, E in reference.WEIERSTRASS_MODELS:
        fam = derive_family(ATuple(t))
        q = GenusOneQuartic(fam.field, tuple(fam.quartic_coeffs(delta)), delta)
        eq += j_invariant(q) == E.j_invariant()
    n = len(reference.WEIERSTRASS_MODELS)
    return eq == n == 12, f"{eq}/{n} j-invariants equal"


def test_criterion_3():
    _run(3, check_j, 5.0)


# ---------------------------------------------------------------------------
# 4. congruence sieve


def check_sieve():
    odd = [p for p in primes_up_to(31) if p > 2]
    ok = True
    for t in ((-2, -5, 3, 1, 1), (-1, -15, -1, -2, 3)):
        rep = sieve_tuple(ATuple(t), odd)
        cert = rep.verdicts[-1].to_dict()
        ok &= rep.eliminated_at == 3 and replay_certificate(cert)
    for t in ((-3, -5, 2, 1, 1), (2, 5, 2, -1, -1), (6, 5, 1, 3, 2)):
        rep = sieve_tuple(ATuple(t), odd)
        ok &= rep.survives and len(rep.verdicts) == len(odd)
        ok &= all(replay_certificate(v.to_dict()) for v in rep.verdicts)
    return ok, "2 eliminated at p=3 with replayed certificates, 3 survive p <= 31"


def test_criterion_4():
    _run(4, check_sieve, 1.0)


# ---------------------------------------------------------------------------
# 5. end-to-end k=5

FIVE = {(-3, -5, 2, 1, 1), (-2, -5, 3, 1, 1), (-1, -15, -1, -2, 3), (2, 5, 2, -1, -1), (6, 5, 1, 3, 2)}


def check_pipeline(oracle):
    rep = run_pipeline_k5(oracle, DEFAULT_PRIMES)
    stage = {t.a for t in rep.curve_stage}
    sols = set(rep.solutions)
    ok = stage == FIVE and sols == {(-12, 7), (-4, 3)} and rep.exit_code == 0 and rep.check_counts()
    return ok, f"curve stage {len(stage)} tuples, final {sorted(sols)}, exit {rep.exit_code}"


def test_criterion_5(oracle):
    _run(5, lambda: check_pipeline(oracle), 600.0)


# ---------------------------------------------------------------------------
# 6. closure for k >= 7


def check_theorem1(oracle):
    res = verify_theorem1(oracle)
    rows = res["rows"]
    ok = res["ok"] and res["conclusion"] == "no solutions with d>1" and len(rows) == 8
    for r in rows:
        if r["k"] == 7:
            ok &= r["via"] == "curves" and r["max_d"] == 1
        elif r["k"] in (13, 19):
            ok &= r["via"].startswith("subtuple")
        else:
            ok &= r["via"].startswith("half") and r["reduces_to"] == [3, 1, 5, 6, 7, 2, 1]
    return ok, f"{len(rows)} tuples resolved, conclusion: {res['conclusion']}"


def test_criterion_6(oracle):
    _run(6, lambda: check_theorem1(oracle), 60.0)


# ---------------------------------------------------------------------------
# 7. brute-force boxes

BOXES = {
    "a": (SearchSpec(5, -2000, 2000, 2, 200, BCondition("eq", 5)), {(-12, 7), (-4, 3)}),
    "b": (SearchSpec(5, -1000, 1000, 1, 100, BCondition("le", 3)), set()),
    "c": (SearchSpec(4, 1, 10**4, 1, 100, BCondition("one")), set()),
    "d": (SearchSpec(7, 1, 10**4, 1, 1, BCondition("eq", 7)), {(2, 1), (3, 1), (4, 1)}),
}


def run_boxes():
    out = {}
    for name, (spec, expected) in BOXES.items():
        t0 = time.perf_counter()
        found = {(s.progression.n, s.progression.d) for s in search_box(spec)}
        out[name] = (found, expected, time.perf_counter() - t0)
    return out


def check_boxes():
    res = run_boxes()
    parts, ok = [], True
    for name, (found, expected, dt) in res.items():
        good = found == expected and dt < 60
        ok &= good
        parts.append(f"({name}) {'ok' if good else 'got ' + str(sorted(found))}")
    return ok, "; ".join(parts)


@pytest.mark.xfail(
    strict=True,
    reason="(a) also finds (-3,2) with tuple (-3,-1,1,3,5), where 5 divides n; "
    "(d) also finds n=1 (1*2*...*7 = 35*12^2)",
)
def test_criterion_7():
    _run(7, check_boxes)


def test_brute_boxes_observed():
    # what the boxes actually contain; see the xfail reason above
    res = run_boxes()
    assert res["a"][0] == {(-3, 2), (-4, 3), (-12, 7)}
    assert res["b"][0] == set() and res["c"][0] == set()
    assert res["d"][0] == {(1, 1), (2, 1), (3, 1), (4, 1)}
    a, _ = extract_tuple(Progression(-3, 2, 5))
    assert a.a == (-3, -1, 1, 3, 5)
    assert all(dt < 60 for _, _, dt in res.values())


# ---------------------------------------------------------------------------
# 8. property suites


def check_properties(oracle):
    rng = random.Random(8)
    for _ in range(100_000):
        m = 0
        while not m:
            m = rng.randint(-10**12, 10**12)
        r = squarefree_decompose(m)
        if r.b * r.y * r.y != m or r.y < 1:
            return False, f"reconstruction failed at {m}"
    odd50 = [p for p in primes_up_to(50) if p > 2]
    done = 0
    while done < 1000:
        k = rng.randint(3, 7)
        n, d = rng.randint(-10**5, 10**5), rng.randint(1, 10**3)
        if math.gcd(n, d) != 1 or any(n + i * d == 0 for i in range(k)):
            continue
        a, x = extract_tuple(Progression(n, d, k))
        if not realize(a, n, d):
            return False, f"extract/realize mismatch at {(n, d, k)}"
        if not sieve_tuple(a, odd50).survives:
            return False, f"sieve eliminated a real progression {(n, d, k)}"
        done += 1
    curves = 0
    seen = set()
    rep = run_pipeline_k5(oracle, DEFAULT_PRIMES)
    for c in rep.certificates:
        if c["stage"] != "rank0" or "alpha" not in c:
            continue
        q = quadruple_quartic(ATuple(c["tuple"]), c["alpha"])
        if q.coeffs in seen:
            continue
        seen.add(q.coeffs)
        e = rank0_points(q, 0, height=300)
        if not e.complete or e.point_count != e.torsion_order:
            return False, f"completeness without torsion accounting for {c['tuple']}"
        H = max(2 * e.height_reached, 40)
        again = {F(n, d) for n, d in iter_heights(H) if _square_in(None, q(F(n, d)))}
        if again != e.points:
            return False, f"re-search at height {H} found new points for {c['tuple']}"
        curves += 1
    return True, f"1e5 decompositions, 1e3 progressions, {curves} rank-0 curves re-searched"


def test_criterion_8(oracle):
    _run(8, lambda: check_properties(oracle))


# ---------------------------------------------------------------------------
# 9. back-substitution


def check_backsub():
    t4 = ATuple((-3, -5, 2, 1, 1))
    sols4 = {backsubstitute(t4, (0, 4), F(X)) for X in (-3, -2, -1, 1, 2)}
    big4 = {s for s in sols4 if s is not None and s[1] > 1}
    t5 = ATuple((2, 5, 2, -1, -1))
    sols5 = {backsubstitute(t5, (2, 3), F(X)) for X in (1, -1)}
    rows = [r for r in reference.check_stated_backsubstitutions() if r["tuple"] == reference.T1 and r["X"] == -3]
    l1 = rows[0]
    ok = big4 == {(-12, 7)} and sols5 == {(-4, 3)} and l1["computed"] == (4, 1) and l1["discrepancy"]
    return ok, f"X in {{-3,-2,-1,1,2}} -> {sorted(big4)}, +-1 -> {sorted(sols5)}, X=-3 -> {l1['computed']} (stated {l1['stated']}, flagged)"


def test_criterion_9():
    _run(9, check_backsub)


if __name__ == "__main__":
    o = Oracle(load_bundled())
    checks = [
        (1, check_systems, 1.0),
        (2, check_delta_sets, 10.0),
        (3, check_j, 5.0),
        (4, check_sieve, 1.0),
        (5, lambda: check_pipeline(o), 600.0),
        (6, lambda: check_theorem1(o), 60.0),
        (7, check_boxes, None),
        (8, lambda: check_properties(o), None),
        (9, check_backsub, None),
    ]
    for cid, fn, limit in checks:
        t0 = time.perf_counter()
        ok, detail = fn()
        _record(cid, ok, time.perf_counter() - t0, limit, detail)
