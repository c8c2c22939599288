import math

import pytest
import sympy
from hypothesis import given, strategies as st

from shagate import genus
from shagate.classgroup import (QuadraticForm, class_group, compose, divisor_form, h2i_ranks,
                                ideal_class_in_2A, ideal_class_in_4A, principal_form, reduced_forms)
from shagate.errors import PreconditionError
from shagate.ntheory import is_squarefree


def dirichlet_class_number(n: int) -> int:
    """h(-4n) = -(1/|D|) sum chi(a) a, chi the Kronecker symbol of D = -4n."""
    disc = -4 * n
    if disc == -4:
        return 1
    total = sum(sympy.jacobi_symbol(disc % a, a) * a for a in range(1, -disc, 2))
    return -total // -disc


admissible = st.integers(1, 1000).filter(lambda n: n % 4 in (1, 2) and is_squarefree(n))


def test_examples():
    g = class_group(221)
    assert g.h == 16
    assert g.invariant_factors == (8, 2)
    assert class_group(1).h == 1
    assert class_group(17).invariant_factors == (4,)
    assert class_group(41).invariant_factors == (8,)
    assert h2i_ranks(g) == (2, 1, 1)
    assert h2i_ranks(class_group(17)) == (1, 1, 0)
    assert h2i_ranks(class_group(41)) == (1, 1, 1)


def test_rejects_3_mod_4():
    with pytest.raises(PreconditionError):
        class_group(7)


@given(admissible)
def test_class_number_vs_dirichlet(n):
    assert class_group(n).h == dirichlet_class_number(n)


@given(admissible)
def test_two_rank_is_genus_count(n):
    # h2 = number of prime divisors of D minus one
    g = class_group(n)
    t = len(sympy.primefactors(4 * n))
    assert h2i_ranks(g)[0] == t - 1


@given(admissible)
def test_invariant_factors(n):
    g = class_group(n)
    f = g.invariant_factors
    assert math.prod(f) == g.h
    assert all(f[i + 1] and f[i] % f[i + 1] == 0 for i in range(len(f) - 1))


@given(st.sampled_from([221, 145, 65, 17, 41, 1513, 246, 1365]), st.data())
def test_group_axioms(n, data):
    g = class_group(n)
    idx = st.integers(0, g.h - 1)
    i, j, k = data.draw(idx), data.draw(idx), data.draw(idx)
    e = g.identity
    assert g.mul(i, e) == i
    assert g.mul(i, j) == g.mul(j, i)
    assert g.mul(g.mul(i, j), k) == g.mul(i, g.mul(j, k))
    assert g.mul(i, g.index(g.elements[i].inverse())) == e


def test_reduced_forms_are_reduced():
    for f in reduced_forms(-4 * 221):
        assert f.is_reduced() and f.disc == -884


def test_compose_preserves_disc():
    f = QuadraticForm(2, 2, 111)
    g = QuadraticForm(13, 0, 17)
    assert compose(f, g).disc == -884
    assert compose(f, principal_form(-884)).reduce() == f.reduce()


def test_divisor_classes():
    g = class_group(221)
    assert ideal_class_in_4A(221, g)
    assert ideal_class_in_4A(13, g)
    assert ideal_class_in_2A(13, g)
    assert ideal_class_in_4A("2", class_group(17)) == genus.in_4A_genus("2", 17)
    with pytest.raises(PreconditionError):
        divisor_form(3, 221)
