import itertools
import math
import random

import pytest

from apsieve.exact_arith import greatest_prime_factor, squarefree_decompose
from apsieve.tuple_enum import (
    ATuple,
    Progression,
    TupleConstraints,
    coefficient_alphabet,
    extract_tuple,
    find_subtuple,
    generate_candidates,
    generate_union,
    half_subprogression,
    k5_constraints,
    mirror,
    read_tuples,
    realize,
    satisfies,
    sign_changes,
)


def test_alphabet_examples():
    assert coefficient_alphabet(5) == sorted(s * m for s in (1, -1) for m in (1, 2, 3, 5, 6, 10, 15, 30))
    assert coefficient_alphabet(1) == [-1, 1]
    assert coefficient_alphabet(2) == [-2, -1, 1, 2]


def test_generate_examples():
    k5 = generate_union(5, k5_constraints())
    assert ATuple((-3, -5, 2, 1, 1)) in k5
    plain = list(generate_candidates(5, TupleConstraints(5)))
    assert ATuple((1, 1, 1, 1, 1)) in plain
    assert ATuple((2, 2, 1, 1, 1)) not in plain
    assert [t.a for t in plain] == sorted(t.a for t in plain)


def test_generate_matches_grid_oracle():
    c = TupleConstraints(3)
    alpha = coefficient_alphabet(3)
    grid = [t for t in itertools.product(alpha, repeat=4) if satisfies(t, c)]
    assert [t.a for t in generate_candidates(4, c)] == grid
    # and the predicate spelled out directly
    def ok(t):
        if sign_changes(t) > 1 or math.prod(t) <= 0:
            return False
        return all(math.gcd(t[i], t[j]) in (1, greatest_prime_factor(j - i)) for i in range(4) for j in range(i + 1, 4))
    assert grid == [t for t in itertools.product(alpha, repeat=4) if ok(t)]


def test_forced_divisibility():
    runs = k5_constraints()
    for t in generate_union(5, runs):
        assert t.a[1] % 5 == 0 or t.a[2] % 5 == 0


def test_mirror_and_sign_changes():
    t = ATuple((2, 3, 1, 5, 6, 7, 2))
    assert mirror(t).a == (2, 7, 6, 5, 1, 3, 2)
    assert mirror(mirror(t)) == t
    assert sign_changes((-3, -5, 2, 1, 1)) == 1
    assert sign_changes((1, 2, 3)) == 0
    assert sign_changes((1, -1, 1, -1, 1)) == 4


def test_atuple_validation():
    with pytest.raises(ValueError):
        ATuple((4, 1))
    with pytest.raises(ValueError):
        ATuple((0, 1))
    with pytest.raises(ValueError):
        ATuple((1,))


def test_extract_examples():
    a, x = extract_tuple(Progression(-12, 7, 5))
    assert a.a == (-3, -5, 2, 1, 1) and x == (2, 1, 1, 3, 4)
    assert extract_tuple(Progression(2, 1, 7))[0].a == (2, 3, 1, 5, 6, 7, 2)
    assert extract_tuple(Progression(4, 1, 7))[0].a == (1, 5, 6, 7, 2, 1, 10)
    with pytest.raises(ValueError):
        extract_tuple(Progression(-2, 1, 5))
    with pytest.raises(ValueError):
        extract_tuple(Progression(1, 10, 3), pmax_b=3)
    with pytest.raises(ValueError):
        Progression(2, 4, 3)


def test_extract_realize_roundtrip_random():
    rng = random.Random(11)
    done = 0
    while done < 1000:
        k = rng.randint(3, 8)
        n, d = rng.randint(-10**6, 10**6), rng.randint(-10**4, 10**4)
        if d == 0 or math.gcd(n, d) != 1 or any(n + i * d == 0 for i in range(k)):
            continue
        p = Progression(n, d, k)
        a, x = extract_tuple(p)
        assert realize(a, n, d)
        assert all(ai * xi * xi == term for ai, xi, term in zip(a.a, x, p.terms()))
        assert all(squarefree_decompose(term).b == ai for ai, term in zip(a.a, p.terms()))
        # reading backwards gives the mirror
        assert extract_tuple(p.reversed())[0] == mirror(a)
        done += 1


def test_realize_negative():
    t = ATuple((-3, -5, 2, 1, 1))
    assert realize(t, -12, 7)
    assert not realize(t, -4, 3)


def test_half_subprogression():
    k23 = ATuple((5, 6, 7, 2, 1, 10, 11, 3, 13, 14, 15, 1, 17, 2, 19, 5, 21, 22, 23, 6, 1, 26, 3))
    assert half_subprogression(k23, 1, 7).a == (3, 1, 5, 6, 7, 2, 1)
    assert half_subprogression(ATuple((1, 3, 5, 7, 1)), 0, 3) is None
    with pytest.raises(ValueError):
        half_subprogression(k23, 20, 7)


def test_find_subtuple():
    known = [ATuple((1, 5, 6, 7, 2, 1, 10)), ATuple((3, 1, 5, 6, 7, 2, 1))]
    t13 = ATuple((3, 1, 5, 6, 7, 2, 1, 10, 11, 3, 13, 14, 15))
    assert find_subtuple(t13, known) == (0, known[1])
    t19 = ATuple((1, 5, 6, 7, 2, 1, 10, 11, 3, 13, 14, 15, 1, 17, 2, 19, 5, 21, 22))
    assert find_subtuple(t19, known) == (0, known[0])
    assert find_subtuple(ATuple((1, 2, 3, 5, 7, 11, 13)), known) is None
    assert find_subtuple(mirror(t13), known) is not None


def test_read_tuples():
    lines = ['{"k": 3, "a": [1, 2, 3]}', "", '{"a": [-1, 5]}']
    assert [t.a for t in read_tuples(lines)] == [(1, 2, 3), (-1, 5)]
    with pytest.raises(ValueError, match="line 2"):
        list(read_tuples(['{"a": [1, 2]}', '{"k": 4, "a": [1, 2]}']))
    with pytest.raises(ValueError, match="line 1"):
        list(read_tuples(["not json"]))
    t = ATuple((2, 5, 2, -1, -1))
    assert ATuple.from_json(t.to_json()) == t
