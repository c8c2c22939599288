from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from shagate import classify as cl
from shagate.errors import PreconditionError
from shagate.ntheory import factor, is_squarefree

t1_family = st.integers(2, 3000).map(lambda m: 8 * m + 1).filter(
    lambda n: is_squarefree(n) and all(p % 4 == 1 for p in factor(n)))


def test_examples():
    r = cl.classify(17)
    assert (r.verdict, r.k, r.theorem, r.d, r.h8) == (cl.RANK0, 1, "h8_d_parity+delta_n", 17, 0)
    assert r.evidence["delta_n"]["delta_n"] == 1
    r = cl.classify(41)
    assert (r.verdict, r.h8) == (cl.FAILED, 1)
    r = cl.classify(3)
    assert r.verdict == cl.NA and r.family == cl.OUT
    assert cl.classify(221).verdict == cl.NA


def test_k2_examples():
    r = cl.classify(4777)
    assert (r.verdict, r.k, r.decomposition) == (cl.RANK0, 2, (17, 281))
    r = cl.classify(6497)
    assert (r.verdict, r.theorem) == (cl.RANK0, "a_star_check+rank_hypotheses")
    r = cl.classify(1513)
    assert r.verdict == cl.FAILED
    (att,) = r.evidence["attempts"]
    assert att["cor2"] is False and att["mainthm2"] is False


def test_explicit_decomposition():
    r = cl.classify(4777, decomposition=(17, 281))
    assert r.verdict == cl.RANK0
    r = cl.classify(4777, decomposition=(4777,))
    assert r.verdict == cl.NA and "h4" in r.reason


def test_bad_input():
    with pytest.raises(PreconditionError):
        cl.classify(0)
    with pytest.raises(PreconditionError):
        cl.classify(18)


def test_auto_decompose():
    assert cl.auto_decompose(17) == [(17,)]
    assert cl.auto_decompose(1513) == [(17, 89)]      # h4(1513) = 2 drops the single block
    assert cl.auto_decompose(697) == [(697,)]         # (17/41) = -1 keeps 17 and 41 together
    with pytest.raises(PreconditionError):
        cl.auto_decompose(221)


def test_point_search_examples():
    assert cl.point_search(5) == (Fraction(25, 4), Fraction(75, 8))
    assert cl.point_search(41) == (Fraction(841), Fraction(24360))
    assert cl.point_search(17) is None
    assert cl.point_search_sanity(17)
    assert not cl.point_search_sanity(5)
    assert not cl.point_search_sanity(41)


@pytest.mark.parametrize("n", [1, 2, 3, 10, 11, 17, 19, 26, 33, 35, 42, 43])
def test_no_points_on_non_congruent(n):
    assert cl.point_search(n) is None


@given(st.integers(1, 400).filter(is_squarefree))
def test_point_search_points_on_curve(n):
    pt = cl.point_search(n, 2000)
    if pt is not None:
        x, y = pt
        assert y != 0 and y * y == x ** 3 - n * n * x


@settings(max_examples=50)
@given(t1_family)
def test_classify_invariants(n):
    r = cl.classify(n, oracle=True)
    assert r.verdict in (cl.RANK0, cl.FAILED, cl.NA)
    again = cl.classify(n).to_dict()
    again["evidence"].pop("oracle", None)
    first = r.to_dict()
    first["evidence"].pop("oracle")
    assert again == first
    if r.verdict == cl.RANK0:
        assert r.s2 == 2 * r.k
        assert cl.point_search(n, 2000) is None
    if r.h4 == 1:
        assert r.theorem.startswith("h8_d_parity")
