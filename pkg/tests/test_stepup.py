import itertools
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stepramsey import basegen, stepup
from stepramsey.core import (
    BinaryStepUp,
    ExplicitLeaf,
    ExplicitTripleColoring,
    MixedStepUp,
    PairColoring,
    VertexCode,
)
from stepramsey.errors import EqualVertices, OutOfUniverse
from stepramsey.oracle import disagreements, materialize
from stepramsey.stepup import GenPolicy


def code(v, radix=2, digits=8):
    return VertexCode(v, radix, digits)


def test_delta_examples():
    assert stepup.delta(code(5), code(1)) == 2
    assert stepup.delta(code(6), code(7)) == 0
    assert stepup.delta(code(2, 3, 2), code(5, 3, 2)) == 1
    with pytest.raises(EqualVertices):
        stepup.delta(code(3), code(3))
    with pytest.raises(ValueError):
        stepup.delta(code(3), code(4, 3, 8))


@given(st.integers(2, 40), st.integers(1, 12), st.data())
def test_delta_matches_digit_definition(radix, digits, data):
    top = radix**digits - 1
    u = data.draw(st.integers(0, top))
    v = data.draw(st.integers(0, top).filter(lambda x: x != u))
    a, b = VertexCode(u, radix, digits), VertexCode(v, radix, digits)
    expected = max(i for i in range(digits) if a.digit(i) != b.digit(i))
    assert stepup.delta(a, b) == expected == stepup.delta(b, a)


@pytest.fixture
def phi3():
    # phi(0,1)=0, phi(0,2)=1, phi(1,2)=2
    return PairColoring.from_function(3, 3, lambda i, j: {(0, 1): 0, (0, 2): 1, (1, 2): 2}[i, j])


def test_chi_binary_examples(phi3):
    assert stepup.chi_binary(phi3, 1, 2, 4) == 2
    assert stepup.chi_binary(phi3, 0, 1, 2) == 0
    assert stepup.chi_binary(phi3, 0, 1, 3) == 0
    assert stepup.chi_binary(BinaryStepUp(phi3), code(1, 2, 3), code(2, 2, 3), code(4, 2, 3)) == 2
    with pytest.raises(EqualVertices):
        stepup.chi_binary(phi3, 1, 1, 4)
    with pytest.raises(ValueError):
        stepup.chi_binary(phi3, 2, 1, 4)
    with pytest.raises(OutOfUniverse):
        stepup.chi_binary(phi3, 1, 2, 8)


def test_chi_binary_never_reads_a_diagonal(phi3):
    # every triple of the 8-vertex lift evaluates without tripping the assertion
    for tri in itertools.combinations(range(8), 3):
        assert 0 <= stepup.chi_binary(phi3, *tri) < 3


@pytest.fixture
def mixed_3_2(leaf5):
    # N3 = 3 (a 3-vertex triple leaf with its single triple colored 2), N2 = 2
    leaf = ExplicitTripleColoring(3, 3, [2])
    pair = PairColoring(2, 3, [1])
    return MixedStepUp(pair, ExplicitLeaf(leaf))


def test_chi_mixed_examples(mixed_3_2):
    lift = mixed_3_2
    assert lift.universe_size == 9
    assert stepup.chi_mixed(lift, 0, 1, 2) == 6 + 2
    assert stepup.chi_mixed(lift, 0, 3, 4) == lift.pair_base.color(0, 1) == 1
    assert stepup.chi_mixed(lift, 0, 1, 3) == 3 + lift.pair_base.color(0, 1) == 4


def test_chi_mixed_branches_by_digits(mixed125):
    lift = mixed125
    rng = random.Random(3)
    for _ in range(2000):
        v1, v2, v3 = sorted(rng.sample(range(lift.universe_size), 3))
        c = [VertexCode(v, 5, 3) for v in (v1, v2, v3)]
        d1, d2 = stepup.delta(c[0], c[1]), stepup.delta(c[1], c[2])
        got = stepup.chi_mixed(lift, v1, v2, v3)
        if d1 > d2:
            assert got == lift.pair_base.color(d1, d2)
        elif d1 < d2:
            assert got == 3 + lift.pair_base.color(d1, d2)
        else:
            digits = [x.digit(d1) for x in c]
            assert got == 6 + lift.triple_base.triple_coloring.color(*digits)


def test_evaluate_is_permutation_invariant(mixed125, k4_lift):
    rng = random.Random(8)
    for lift in (mixed125, k4_lift):
        for _ in range(300):
            tri = rng.sample(range(lift.universe_size), 3)
            want = stepup.evaluate(lift, *sorted(tri))
            for perm in itertools.permutations(tri):
                assert stepup.evaluate(lift, *perm) == want


def test_vectorized_matches_scalar(mixed125, k4_lift):
    nested = MixedStepUp(PairColoring(2, 3, [2]), mixed125)
    for lift in (mixed125, k4_lift, nested):
        rng = random.Random(1)
        rows = [sorted(rng.sample(range(lift.universe_size), 3)) for _ in range(500)]
        v = np.array(rows, dtype=np.int64).T
        fast = stepup.evaluate_many(lift, v[0], v[1], v[2])
        assert fast.tolist() == [stepup.evaluate(lift, *r) for r in rows]


def test_binary_lift_of_big_base_uses_exact_arithmetic():
    base = PairColoring.from_function(70, 5, lambda i, j: (i * 7 + j) % 5)
    lift = BinaryStepUp(base)
    v1, v2, v3 = 1, 1 << 40, (1 << 69) + 3
    assert stepup.evaluate(lift, v1, v2, v3) == base.color(40, 69)
    assert not stepup.supports_vectorized(lift)


def test_compose_micro_mixed():
    lift = stepup.compose(16, 9, GenPolicy(seed=4, pair_size=3, leaf_size=4))
    assert isinstance(lift, MixedStepUp)
    assert lift.universe_size == 64
    assert lift.num_colors == 9
    assert isinstance(lift.triple_base, ExplicitLeaf)
    assert lift.triple_base.triple_coloring.num_vertices == 4
    assert len(set(lift.triple_base.triple_coloring.colors.tolist())) == 3
    explicit = materialize(lift)
    assert explicit.colors.size == 41664
    assert disagreements(lift, explicit)[0] == 0


def test_compose_is_deterministic():
    policy = GenPolicy(seed=4, pair_size=3, leaf_size=4)
    assert stepup.compose(16, 9, policy) == stepup.compose(16, 9, policy)


def test_compose_leaf():
    leaf = stepup.compose(6, 3, GenPolicy(seed=1, leaf_size=6))
    assert isinstance(leaf, ExplicitLeaf)
    assert leaf.num_colors == 3


def test_plan_depth():
    levels = stepup.plan(1024, 15)
    assert [lv.q for lv in levels] == [15, 9, 3]
    assert levels[0].s == 10 and levels[0].r == 102
    assert levels[-1].is_leaf
    assert levels[0].exponent_condition
    with pytest.raises(ValueError):
        stepup.plan(10, 2)


def test_floor_n_over_log2():
    for n in range(2, 3000):
        r = stepup.floor_n_over_log2(n)
        # r <= n / log2 n < r + 1  <=>  n**r <= 2**n < n**(r+1)
        assert n**r <= 2**n < n ** (r + 1)


def test_bound_examples():
    assert stepup.bound_log2(24, 3) == 24
    assert stepup.bound_log2(24, 8) == 24
    with mpmath.workdps(60):
        hand = mpmath.root(1024, 4) / 2 * mpmath.mpf(102**2) / 24
        assert mpmath.almosteq(stepup.bound_log2(1024, 9), hand, rel_eps=mpmath.mpf(10) ** -50)
    assert stepup.bound_log2(16, 9) == Fraction(2, 2) * Fraction(4 * 4, 24)


def test_bound_simple_examples():
    assert stepup.bound_log2_simple(16, 2, 2) == 4
    assert stepup.bound_log2_simple(16, 4, 3) == 4
    assert stepup.bound_log2_simple(2**5, 4, 2) == Fraction(4**5, 4)
    with pytest.raises(ValueError):
        stepup.bound_log2_simple(12, 4, 2)
    general = stepup.bound_log2_simple(12, 4, 2, general=True)
    assert mpmath.almosteq(general, mpmath.mpf(144) / 4)


@pytest.mark.parametrize("q,t", [(4, 2), (9, 3), (6, 2)])
def test_bound_simple_relates_to_pair_universe(q, t):
    for m in (4, 8, 12, 16):
        M = basegen.pair_universe_size(q, t, m)
        rho = Fraction(q, t - 1)
        if rho.denominator == 1:
            assert M**4 == rho**m
            assert stepup.bound_log2_simple(2**m, q, t) == Fraction(M**4, 4)


def test_effective_exponent_q9():
    values = [stepup.effective_exponent(2**k, 9) for k in range(10, 31)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert all(v < 2.25 for v in values)


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 10**6), st.integers(3, 30))
def test_bound_recurrence(n, q):
    b = stepup.bound_log2(n, q)
    if q < 9:
        assert b == Fraction(n * n, 24)
    else:
        inner = stepup.bound_log2(stepup.floor_n_over_log2(n), q - 6)
        with mpmath.workdps(60):
            want = mpmath.root(n, 4) / 2 * stepup._mpf(inner)
            assert mpmath.almosteq(stepup._mpf(b), want, rel_eps=mpmath.mpf(10) ** -40)
