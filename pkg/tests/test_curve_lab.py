import itertools
import math
from fractions import Fraction as F

import pytest

from apsieve.curve_lab import reference
from apsieve.curve_lab.delta import delta_candidates, local_solubility, same_class_sets
from apsieve.curve_lab.elimination import (
    Eliminated,
    admissible_pairs,
    quadruple_quartic,
    rank0_eliminate_tuple,
)
from apsieve.curve_lab.points import (
    UnresolvedError,
    _square_in,
    iter_heights,
    rank0_points,
    torsion_bound,
    torsion_order,
)
from apsieve.curve_lab.quartic import (
    GenusOneQuartic,
    WeierstrassModel,
    build_quartic,
    j_invariant,
    jacobian_model,
    neg_delta_map,
    poly_mul,
)
from apsieve.curve_lab.relations import backsubstitute, derive_family, pivot_system
from apsieve.exact_arith import GAUSSIAN as G, QSQRT3
from apsieve.oracle_client import Oracle, OracleStore
from apsieve.tuple_enum import ATuple


def key(i, ci, j, cj, m, cm):
    """ci*x_i^2 + cj*x_j^2 - cm*x_m^2 as sorted (index, coeff), sign fixed by the lowest index."""
    terms = sorted({i: ci, j: cj, m: -cm}.items())
    s = 1 if terms[0][1] > 0 else -1
    return tuple((k, s * v) for k, v in terms)


def rel_set(rels):
    return {key(r.i, r.A, r.j, r.B, r.m, r.C) for r in rels}


T1, T2, T3, T6 = (ATuple(t) for t in (reference.T1, reference.T2, reference.T3, reference.T6))
T4 = ATuple((-3, -5, 2, 1, 1))
T5 = ATuple((2, 5, 2, -1, -1))


def test_pivot_systems():
    got = rel_set(pivot_system(T1, 0, 5))
    assert key(5, 1, 0, 4, 1, 25) in got
    assert key(5, 4, 0, 1, 4, 10) in got
    assert key(5, 6, 0, -1, 6, 50) in got
    got = rel_set(pivot_system(T2, 0, 4))
    for k in (key(4, 1, 0, 1, 1, 2), key(4, 9, 0, 1, 3, 10), key(4, 9, 0, -1, 6, 2)):
        assert k in got
    got = rel_set(pivot_system(T3, 0, 3))
    for k in (key(3, 2, 0, 2, 1, 1), key(3, 4, 0, 1, 2, 5), key(3, 12, 0, -3, 6, 1)):
        assert k in got
    # displayed with fractional coefficients; times 4 gives integers
    got = rel_set(pivot_system(T4, 0, 4))
    for k in (key(4, 1, 0, -9, 1, -20), key(4, 1, 0, -3, 2, 4), key(4, 3, 0, -3, 3, 4)):
        assert k in got


def test_pivot_identities_on_solutions():
    # every relation holds at a real solution
    for t, (n, d) in ((T4, (-12, 7)), (T5, (8, -3)), (T1, (4, 1)), (T2, (2, 1)), (T3, (3, 1))):
        x = [math.isqrt((n + i * d) // a) for i, a in enumerate(t.a)]
        for i, j in itertools.combinations(range(t.k), 2):
            assert all(r.holds(x) for r in pivot_system(t, i, j))
    with pytest.raises(ValueError):
        pivot_system(T1, 3, 3)


@pytest.mark.parametrize("t", [T1, T2, T3, T6])
def test_delta_sets(t):
    got = delta_candidates(derive_family(t)).survivors
    assert same_class_sets(got, reference.DELTA_SETS[t.a])


def test_family_shapes():
    fam = derive_family(T2)
    lhs = fam.quartic_coeffs(G(1))
    rhs = poly_mul(poly_mul([G(2), G(0, 2)], [G(3), G(0, 1)]), [G(9), G(0), G(-1)])
    # same curve up to a square factor: compare ratios
    ratio = {c / r for c, r in zip(lhs, rhs) if r}
    assert len(ratio) == 1
    q4 = derive_family(T4)
    assert q4.field == QSQRT3
    c = build_quartic(1, [[1, QSQRT3(0, 1)], [1, 3]], [1, 0, -1], QSQRT3)
    assert c(F(2)) == (2 + QSQRT3(0, 1)) * 5 * 3


def test_j_invariants_match_models():
    for t, delta, E in reference.WEIERSTRASS_MODELS:
        fam = derive_family(ATuple(t))
        q = GenusOneQuartic(fam.field, tuple(fam.quartic_coeffs(delta)), delta)
        assert j_invariant(q) == E.j_invariant()


def test_j_invariance():
    fam = derive_family(T1)
    q = GenusOneQuartic(fam.field, tuple(fam.quartic_coeffs(G(1, -3))), G(1, -3))
    j = j_invariant(q)
    # shift X -> X + 2
    cs = [G(0)] * 5
    for k, c in enumerate(q.coeffs):
        e = 4 - k
        term = [G(1)]
        for _ in range(e):
            term = poly_mul(term, [G(1), G(2)])
        term = [G(0)] * (5 - len(term)) + term
        cs = [a + c * b for a, b in zip(cs, term)]
    assert j_invariant(GenusOneQuartic(q.field, tuple(cs))) == j
    assert j_invariant(q.scaled(G(0, 1))) == j
    assert j_invariant(q.scaled(4)) == j
    image, _ = neg_delta_map(q, F(0), G(0))
    assert j_invariant(image) == j


def test_neg_delta_map():
    fam = derive_family(T1)
    q = GenusOneQuartic(fam.field, tuple(fam.quartic_coeffs(G(3, -1))), G(3, -1))
    X = F(-3)
    from apsieve.exact_arith import is_square_in_field

    Y = is_square_in_field(q(X))
    assert Y is not None and q.contains(X, Y)
    img, (X1, Y1) = neg_delta_map(q, X, Y)
    assert img.delta == G(-3, 1) and img.contains(X1, Y1)
    back, (X2, Y2) = neg_delta_map(img, X1, Y1)
    assert (X2, Y2) == (X, -Y) and back == q
    with pytest.raises(ValueError):
        neg_delta_map(GenusOneQuartic(None, (1, 0, 0, 0, 1)), 0, 1)


def test_local_solubility_examples():
    assert local_solubility(GenusOneQuartic(None, (1, 0, 0, 0, 1)), 3)
    neg = GenusOneQuartic(None, (-1, 0, -2, 0, -2))
    assert not local_solubility(neg, "inf")
    fam = derive_family(T1)
    for delta in reference.DELTA_SETS[T1.a]:
        q = GenusOneQuartic(fam.field, tuple(fam.quartic_coeffs(delta)))
        assert all(local_solubility(q, p) for p in (2, 3, 5))


def test_torsion_bound_examples():
    assert torsion_bound(WeierstrassModel(None, -4, 0)) == 4
    assert torsion_bound(WeierstrassModel(None, 0, 1)) == 6
    assert torsion_bound(WeierstrassModel(None, 0, -2)) == 1
    assert torsion_order(WeierstrassModel(None, -4, 0)) == 4
    assert torsion_order(WeierstrassModel(None, 0, 1)) == 6


def test_iter_heights_distinct_and_ordered():
    seen = list(iter_heights(40))
    assert len(seen) == len(set(seen))
    hs = [max(abs(n), d) for n, d in seen]
    assert hs == sorted(hs)
    assert len(seen) == 1 + sum(1 for n in range(-40, 41) for d in range(1, 41) if n and F(n, d).denominator == d)


def _brute_points(q, H):
    return {F(n, d) for n, d in iter_heights(H) if _square_in(q.field, q(F(n, d)))}


def test_rank0_fermat_quartic():
    q = GenusOneQuartic(None, (1, 0, 0, 0, 1))
    e = rank0_points(q, 0)
    assert e.points == {0} and e.complete
    assert e.point_count == 4 == e.torsion_order
    with pytest.raises(UnresolvedError):
        rank0_points(q, None)
    with pytest.raises(ValueError):
        rank0_points(q, 1)


def test_rank0_completeness_rechecked_at_double_height():
    store = Oracle(_bundled())
    checked = 0
    for t in (ATuple((-6, -5, -1, -3, 2)), ATuple((-3, -1, -5, -1, 2)), ATuple((6, 5, 1, 3, 2))):
        for alpha in itertools.combinations(range(5), 4):
            q = quadruple_quartic(t, alpha)
            if store.rank(q.canonical()) != 0:
                continue
            e = rank0_points(q, 0, height=300)
            if not e.complete:
                continue
            H = max(2 * e.height_reached, 60)
            assert _brute_points(q, H) == e.points
            checked += 1
    assert checked >= 3


def _bundled():
    from apsieve.oracle_client import load_bundled

    return load_bundled()


def test_rank0_eliminate_examples():
    oracle = Oracle(_bundled())
    v = rank0_eliminate_tuple(ATuple((-6, -5, -1, -3, 2)), oracle)
    assert isinstance(v, Eliminated)
    assert v.certificate["pairs"] == []
    # trivial roots only; all are excluded as progressions
    assert {F(x) for x in v.certificate["points"]} <= {F(-a) for a in v.certificate["alpha"]}
    assert rank0_eliminate_tuple(T4, oracle).outcome != "eliminated"
    assert rank0_eliminate_tuple(T4, Oracle(OracleStore())).outcome == "unresolved"
    with pytest.raises(ValueError):
        rank0_eliminate_tuple(T1, oracle)


def test_all_ones_not_eliminated_without_complete_enumeration():
    ones = ATuple((1, 1, 1, 1, 1))
    assert admissible_pairs(ones, [F(1)]) == []
    v = rank0_eliminate_tuple(ones, Oracle(OracleStore()))
    assert v.outcome == "unresolved"


def test_backsubstitute_examples():
    assert backsubstitute(T4, (0, 4), F(2)) == (-12, 7)
    assert backsubstitute(T5, (2, 3), F(1)) == (-4, 3)
    assert backsubstitute(T5, (2, 3), F(-1)) == (-4, 3)
    assert backsubstitute(T1, (0, 5), F(-3), scale_i=2) == (4, 1)
    assert backsubstitute(T4, (0, 4), F(5)) is None


def test_xset_gives_only_minus12_7():
    fam = derive_family(T4)
    sols = {backsubstitute(T4, (fam.i, fam.j), X, fam.scale_i, fam.scale_j) for X in map(F, (-3, -2, -1, 1, 2))}
    assert {s for s in sols if s and s[1] > 1} == {(-12, 7)}
