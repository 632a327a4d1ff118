"""Normal ordering of derivative words and the derivation laws built on it."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from heisenberg_forms.scalars import (ZERO, FrameIndexError, ScalarExpr,
                                      canonical_word, derive, normalize, rat,
                                      rewrite_step, scalar_eq, sym, word_atom)


def letters(n):
    return st.integers(min_value=1, max_value=2 * n + 1)


def words(n, max_size=4):
    return st.lists(letters(n), max_size=max_size).map(tuple)


def scalars(n):
    coeff = st.fractions(min_value=-3, max_value=3, max_denominator=4)
    atom = st.tuples(st.sampled_from(["f", "g", "h"]), words(n, 3), coeff)

    def build(atoms):
        total = ZERO
        for name, word, q in atoms:
            total = total + word_atom(name, word, n, 1) * rat(q)
        return total

    return st.lists(atom, max_size=4).map(build)


def test_ordered_word_is_fixed():
    assert word_atom("f", (1, 2), 1).terms == {(("f", (1, 2)),): Fraction(1)}
    assert word_atom("f", (1, 2, 3), 1).terms == {(("f", (1, 2, 3)),): Fraction(1)}


def test_conjugate_pair_reduction():
    # Y1 X1 = X1 Y1 - T under the default bracket, + T under the flipped one
    got = word_atom("f", (2, 1), 1, bracket=1)
    assert got == word_atom("f", (1, 2), 1) - word_atom("f", (3,), 1)
    flipped = word_atom("f", (2, 1), 1, bracket=-1)
    assert flipped == word_atom("f", (1, 2), 1) + word_atom("f", (3,), 1)


def test_distinct_index_letters_commute_freely():
    # X2 and Y1 are not a conjugate pair at n=2
    assert word_atom("f", (2, 3), 2) == word_atom("f", (3, 2), 2)
    # T commutes with everything
    assert word_atom("f", (3, 1), 1) == word_atom("f", (1, 3), 1)
    assert word_atom("f", (5, 2), 2) == word_atom("f", (2, 5), 2)


def test_canonical_word_expansion():
    assert canonical_word((2, 1), 1) == (((1, 2), Fraction(1)), ((3,), Fraction(-1)))
    # nested reduction: Y1 Y1 X1 needs two passes
    expanded = dict(canonical_word((2, 2, 1), 1))
    assert expanded == {(1, 2, 2): Fraction(1), (2, 3): Fraction(-2)}


def test_frame_index_validation():
    with pytest.raises(FrameIndexError):
        word_atom("f", (4,), 1)
    with pytest.raises(FrameIndexError):
        derive(sym("f"), 0, 1)
    with pytest.raises(FrameIndexError):
        canonical_word((6,), 2)


def test_rewrite_step_rejects_ordered_positions():
    with pytest.raises(ValueError):
        rewrite_step((1, 2), 0, 1)


def test_bracket_identity_through_derive():
    f = sym("f")
    lhs = derive(derive(f, 2, 1), 1, 1) - derive(derive(f, 1, 1), 2, 1)
    assert scalar_eq(lhs, derive(f, 3, 1))
    lhs = derive(derive(f, 2, 1, -1), 1, 1, -1) - derive(derive(f, 1, 1, -1), 2, 1, -1)
    assert scalar_eq(lhs, -derive(f, 3, 1, -1))


def test_rat_and_zero():
    assert rat(0).is_zero()
    assert rat(0) == ZERO
    assert rat(Fraction(2, 4)) == rat("1/2")
    e = sym("f") * rat(3) - sym("f") * rat(3)
    assert e.is_zero()


def test_equal_scalars_hash_equal():
    a = word_atom("f", (2, 1), 1)
    b = word_atom("f", (1, 2), 1) - word_atom("f", (3,), 1)
    assert a == b and hash(a) == hash(b)


@given(scalars(2))
def test_normalize_is_identity_on_normal_forms(e):
    assert normalize(e, 2) == e


@given(scalars(2), scalars(2), letters(2))
def test_derive_is_linear(a, b, j):
    assert derive(a + b, j, 2) == derive(a, j, 2) + derive(b, j, 2)


@given(scalars(2), scalars(2), letters(2))
def test_derive_leibniz(a, b, j):
    lhs = derive(a * b, j, 2)
    rhs = derive(a, j, 2) * b + a * derive(b, j, 2)
    assert scalar_eq(lhs, rhs)


@given(scalars(2), scalars(2))
def test_product_commutes(a, b):
    assert a * b == b * a


@given(scalars(1), letters(1))
def test_t_is_central(e, j):
    assert derive(derive(e, j, 1), 3, 1) == derive(derive(e, 3, 1), j, 1)


@given(scalars(2))
def test_nonconjugate_derivations_commute(e):
    # X1 and Y2 act on different coordinates
    assert derive(derive(e, 4, 2), 1, 2) == derive(derive(e, 1, 2), 4, 2)


def _reduce_in_random_order(word, n, bracket, rng):
    """Drive rewrite_step at randomly chosen positions until canonical."""
    pending = {word: Fraction(1)}
    done = {}
    while pending:
        w = rng.choice(sorted(pending))
        c = pending.pop(w)
        spots = [i for i in range(len(w) - 1)
                 if dict(canonical_word((w[i], w[i + 1]), n, bracket)) != {(w[i], w[i + 1]): Fraction(1)}]
        if not spots:
            done[w] = done.get(w, Fraction(0)) + c
            continue
        for w2, c2 in rewrite_step(w, rng.choice(spots), n, bracket):
            pending[w2] = pending.get(w2, Fraction(0)) + c * c2
    return {w: c for w, c in done.items() if c}


@pytest.mark.parametrize("bracket", [1, -1])
def test_random_order_reduction_is_confluent(bracket):
    rng = random.Random(20240819 + bracket)
    for n in (1, 2):
        for _ in range(40):
            word = tuple(rng.randint(1, 2 * n + 1) for _ in range(rng.randint(2, 4)))
            expected = {w: c for w, c in canonical_word(word, n, bracket)}
            assert _reduce_in_random_order(word, n, bracket, rng) == expected
