import math
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from itw1d.dispersion import Parity
from itw1d.model import RationalM, detect_rational, problem_for
from itw1d.strips import (
    AdjacentEmpty,
    AmbiguousStripError,
    ComplexPair,
    Quadruple,
    RealPair,
    classify,
    floor_parity,
    predicted_root_count,
    strips_in_window,
)


def problem_for_m(m: float):
    return problem_for((m + 1) / (m - 1), 2.0)


def test_floor_parity_examples():
    assert floor_parity(1, 3.0) == 1
    assert floor_parity(3, RationalM(3, 1, True)) == 0
    assert floor_parity(2, RationalM(5, 2, True)) == 0


def test_floor_parity_ambiguous_guard():
    with pytest.raises(AmbiguousStripError):
        floor_parity(3, 3.0 + 1e-14)


def test_classify_m3():
    p = problem_for_m(3.0)
    assert classify(1, p) == ComplexPair(carrier=Parity.EVEN)
    q = classify(3, p)
    assert q == Quadruple(z0=1.0, triple=Parity.ODD, simple=Parity.EVEN)
    assert classify(2, p) == AdjacentEmpty(owner=3)
    assert classify(0, p) == AdjacentEmpty(owner=0)


def test_classify_m52_real_pair_sides():
    p = problem_for_m(2.5)
    sc = classify(2, p)
    assert sc == RealPair(k0=1, left_parity=Parity.ODD, right_parity=Parity.EVEN)


def test_classify_rejects_negative_index():
    with pytest.raises(ValueError):
        classify(-1, problem_for_m(3.0))


def test_strips_in_window_m3():
    p = problem_for_m(3.0)
    entries = strips_in_window(p, 0.0, 1.0)
    kinds = [(s.j, type(c).__name__) for s, c in entries]
    assert kinds == [
        (0, "AdjacentEmpty"),
        (1, "ComplexPair"),
        (2, "AdjacentEmpty"),
        (3, "Quadruple"),
    ]
    assert entries[-1][1].z0 == 1.0


def test_strips_in_window_m2_quadruples_only():
    p = problem_for_m(2.0)
    entries = strips_in_window(p, 0.0, 1.0)
    quads = [c for _, c in entries if isinstance(c, Quadruple)]
    assert [q.z0 for q in quads] == [1.0]
    assert all(isinstance(c, (Quadruple, AdjacentEmpty)) for _, c in entries)


def test_strips_in_window_irrational_unambiguous():
    m = math.sqrt(5)
    p = problem_for_m(m)
    entries = strips_in_window(p, 0.0, 2.0 / m)
    assert len(entries) >= 2
    assert all(not isinstance(c, Quadruple) for _, c in entries[1:])


@given(j=st.integers(min_value=0, max_value=300), m=st.floats(min_value=1.05, max_value=10))
def test_exhaustive_single_classification(j, m):
    p = problem_for_m(m)
    try:
        sc = classify(j, p)
    except AmbiguousStripError:
        assume(False)
    assert isinstance(sc, (RealPair, ComplexPair, Quadruple, AdjacentEmpty))


@given(
    m=st.floats(min_value=1.05, max_value=10),
    j0=st.integers(min_value=0, max_value=60),
    count=st.integers(min_value=1, max_value=40),
)
def test_count_conservation(m, j0, count):
    """Any run of strips away from multiple points predicts 2 roots per strip."""
    p = problem_for_m(m)
    rm = detect_rational(m)
    try:
        classes = [classify(j, p, rm) for j in range(j0, j0 + count)]
    except AmbiguousStripError:
        assume(False)
    touches_multiple = any(isinstance(c, (Quadruple, AdjacentEmpty)) for c in classes)
    assume(not touches_multiple)
    assert sum(predicted_root_count(c) for c in classes) == 2 * count


@pytest.mark.parametrize("p_num", range(2, 13))
def test_rational_classification_periodicity(p_num):
    """Geometric strip content repeats with period p; the parity-tagged
    pattern repeats with period 2p."""
    for q in range(1, p_num):
        if math.gcd(p_num, q) != 1:
            continue
        rm = RationalM(p_num, q, exact=True)
        prob = problem_for_m(p_num / q)
        for j in range(1, 2 * p_num + 1):
            a = classify(j, prob, rm)
            b = classify(j + 2 * p_num, prob, rm)
            assert type(a) is type(b)
            if isinstance(a, RealPair):
                assert (a.left_parity, a.right_parity) == (b.left_parity, b.right_parity)
                assert b.k0 - a.k0 == 2 * q
            elif isinstance(a, ComplexPair):
                assert a.carrier == b.carrier
            elif isinstance(a, Quadruple):
                assert (a.triple, a.simple) == (b.triple, b.simple)
                assert b.z0 - a.z0 == pytest.approx(2 * q)
            # geometric kind (not factor tags) already repeats with period p
            c = classify(j + p_num, prob, rm)
            assert type(a) is type(c)


def test_quadruple_parity_depends_on_floor_parity():
    # m=2: the triple factor alternates between consecutive multiple points
    p = problem_for_m(2.0)
    q1 = classify(2, p)   # z0=1, jpfjm = 3 odd
    q2 = classify(4, p)   # z0=2, jpfjm = 6 even
    assert q1.triple is Parity.EVEN and q1.simple is Parity.ODD
    assert q2.triple is Parity.ODD and q2.simple is Parity.EVEN


def test_window_with_quadruple_at_right_edge():
    p = problem_for_m(2.5)
    entries = strips_in_window(p, 0.0, 2.0)
    quad = [c for _, c in entries if isinstance(c, Quadruple)]
    assert len(quad) == 1 and quad[0].z0 == 2.0
