"""Reference data for the explicit length-7 and length-5 curve families: expected
delta sets and Weierstrass models, used by the consistency checks."""

from __future__ import annotations

from apsieve.exact_arith import GAUSSIAN as G
from apsieve.curve_lab.quartic import WeierstrassModel

T1 = (1, 5, 6, 7, 2, 1, 10)
T2 = (2, 3, 1, 5, 6, 7, 2)
T3 = (3, 1, 5, 6, 7, 2, 1)
T6 = (6, 5, 1, 3, 2)


def _pm(u, v):
    """u + v*i and u - v*i."""
    return [G(u, v), G(u, -v)]


DELTA_SETS = {
    T1: _pm(-3, 1) + _pm(-1, 3) + _pm(1, 3) + _pm(3, 1),
    T2: _pm(-4, 2) + _pm(-2, 4) + _pm(2, 4) + _pm(4, 2),
    T3: _pm(-3, 1) + _pm(-1, 3) + _pm(1, 3) + _pm(3, 1),
    T6: _pm(1, 3) + _pm(3, 1),
}


def _w(a2, a4, a6):
    return WeierstrassModel(G, G(*a4), G(*a6), G(*a2))


# (tuple, delta, model); coefficient pairs are (real, imaginary)
WEIERSTRASS_MODELS = [
    (T1, G(1, -3), _w((0, 1), (-23, -17), (1597, 2291))),
    (T1, G(1, 3), _w((0, -1), (-23, 17), (1597, -2291))),
    (T1, G(3, -1), _w((1, 0), (23, -17), (-2291, -1597))),
    (T1, G(3, 1), _w((1, 0), (23, 17), (-2291, 1597))),
    (T2, G(2, -4), _w((0, 0), (-9, -12), (-104, -572))),
    (T2, G(2, 4), _w((0, 0), (-9, 12), (104, -572))),
    (T2, G(4, -2), _w((0, 0), (9, -12), (-572, -104))),
    (T2, G(4, 2), _w((0, 0), (9, 12), (572, -104))),
    (T3, G(1, -3), _w((0, 0), (36, 27), (-351, 243))),
    (T3, G(1, 3), _w((0, 0), (36, -27), (351, 243))),
    (T3, G(3, -1), _w((0, 0), (-36, 27), (243, -351))),
    (T3, G(3, 1), _w((0, 0), (-36, -27), (-243, -351))),
]


# Back-substitutions stated next to the curve results: (tuple, X, stated (n, d)).
# X is the ratio of the family's pivot coordinates before scaling.
STATED_BACKSUBSTITUTIONS = [
    (T1, -3, (2, 1)),
    (T1, 3, (2, 1)),
    ((-3, -5, 2, 1, 1), 2, (-12, 7)),
    ((2, 5, 2, -1, -1), 1, (-4, 3)),
    ((2, 5, 2, -1, -1), -1, (-4, 3)),
]


def check_stated_backsubstitutions() -> list[dict]:
    """Recompute each stated (n, d); ``discrepancy`` marks a mismatch."""
    from fractions import Fraction

    from apsieve.curve_lab.relations import backsubstitute, derive_family
    from apsieve.tuple_enum import ATuple

    out = []
    for t, X, stated in STATED_BACKSUBSTITUTIONS:
        fam = derive_family(ATuple(t))
        got = backsubstitute(fam.atuple, (fam.i, fam.j), Fraction(X), fam.scale_i, fam.scale_j)
        out.append({"tuple": t, "X": X, "stated": stated, "computed": got, "discrepancy": got != stated})
    return out
