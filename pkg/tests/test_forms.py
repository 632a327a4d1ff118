"""Wedge algebra and the theta split on the abstract coframe."""

from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from heisenberg_forms.forms import (DegreeError, Form, basis_form,
                                    decompose_theta, horizontal_part,
                                    merge_monomials, scalar_form,
                                    vertical_part, wedge, zero_form)
from heisenberg_forms.scalars import rat, sym


def monomials(n, k):
    return st.sampled_from(list(combinations(range(1, 2 * n + 2), k)))


def forms(n, k):
    coeff = st.fractions(min_value=-3, max_value=3, max_denominator=4)
    entry = st.tuples(monomials(n, k), st.sampled_from(["a", "b", "c"]), coeff)

    def build(entries):
        total = zero_form(k)
        for mono, name, q in entries:
            total = total + basis_form(mono, sym(name) * rat(q))
        return total

    return st.lists(entry, max_size=4).map(build)


def test_merge_monomials_examples():
    assert merge_monomials((), (1, 2)) == (1, (1, 2))
    assert merge_monomials((2,), (1,)) == (-1, (1, 2))
    assert merge_monomials((1, 2), (1,)) is None
    # (1,3)+(2,4): single inversion between 3 and 2
    assert merge_monomials((1, 3), (2, 4)) == (-1, (1, 2, 3, 4))
    assert merge_monomials((3,), (1, 2)) == (1, (1, 2, 3))


def test_form_constructor_validation():
    with pytest.raises(DegreeError):
        Form(1, {(1, 2): sym("a")})
    with pytest.raises(DegreeError):
        Form(-1)
    with pytest.raises(DegreeError):
        basis_form((1,)) + basis_form((1, 2))


def test_zero_coefficients_are_dropped():
    f = basis_form((1,), rat(0))
    assert f.is_zero()
    assert basis_form((1,)) - basis_form((1,)) == zero_form(1)


def test_scale_accepts_scalars_and_rationals():
    f = basis_form((1, 2))
    assert f.scale(3) == basis_form((1, 2), rat(3))
    assert f.scale(sym("g")) == basis_form((1, 2), sym("g"))
    assert f.scale(Fraction(1, 2)).scale(2) == f


def test_wedge_basics():
    a = basis_form((1,))
    b = basis_form((2,))
    assert wedge(a, b) == basis_form((1, 2))
    assert wedge(b, a) == basis_form((1, 2), rat(-1))
    assert wedge(a, a).is_zero()
    assert wedge(scalar_form(sym("g")), a) == a.scale(sym("g"))


@given(st.integers(0, 3), st.integers(0, 3), st.data())
def test_wedge_anticommutes(p, q, data):
    a = data.draw(forms(1, p))
    b = data.draw(forms(1, q))
    sign = (-1) ** (p * q)
    assert wedge(a, b) == wedge(b, a).scale(sign)


@given(forms(1, 1), forms(1, 1), forms(1, 1))
def test_wedge_associates(a, b, c):
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


@given(forms(1, 1), forms(1, 1), forms(1, 1))
def test_wedge_distributes(a, b, c):
    assert wedge(a + b, c) == wedge(a, c) + wedge(b, c)


@given(st.integers(1, 2), st.integers(0, 3), st.data())
def test_theta_split_reassembles(n, k, data):
    omega = data.draw(forms(n, k) if k <= 2 * n + 1 else st.just(zero_form(k)))
    hor = horizontal_part(omega, n)
    vert = vertical_part(omega, n)
    assert hor + vert == omega
    theta_idx = 2 * n + 1
    assert all(theta_idx not in m for m in hor.terms)
    assert all(theta_idx in m for m in vert.terms)
    prime, beta = decompose_theta(omega, n)
    assert prime == hor
    if k >= 1:
        assert prime + wedge(beta, basis_form((theta_idx,))) == omega
        assert all(theta_idx not in m for m in beta.terms)


def test_decompose_theta_keeps_sign():
    # theta is the last covector, so pulling it off a monomial costs nothing
    omega = basis_form((1, 3), sym("a"))
    prime, beta = decompose_theta(omega, 1)
    assert prime.is_zero()
    assert beta == basis_form((1,), sym("a"))
