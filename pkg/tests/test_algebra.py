import random
from fractions import Fraction

import pytest

from ncdef.algebra import (AlgebraPresentation, QuotientModule, expand_to_basis,
                           element_from_vector, format_element, multiply,
                           normal_form, parse_element, preset_presentation,
                           quotient_normal_form)
from ncdef.errors import (DegreeOverflow, StepBudgetExceeded, UnsupportedIdeal,
                          ValidationError)


@pytest.fixture(scope="module")
def weyl2():
    return preset_presentation("weyl2")


def test_normal_form_defining_relation(weyl2):
    assert format_element(normal_form(("Dx", "x"), weyl2)) == "x*Dx + 1"


def test_normal_form_already_normal(weyl2):
    assert format_element(normal_form(("x", "y"), weyl2)) == "x*y"


def test_normal_form_euler_square(weyl2):
    # (x Dx)(x Dx) = x^2 Dx^2 + x Dx, by hand rewriting
    a = normal_form(("x", "Dx"), weyl2)
    assert format_element(multiply(a, a)) == "x^2*Dx^2 + x*Dx"


def test_multiply_identity_and_relation(weyl2):
    a = weyl2.parse("2*x*y - Dy")
    assert multiply(weyl2.one(), a) == a
    assert format_element(multiply(weyl2.gen("Dx"), weyl2.gen("x"))) == "x*Dx + 1"


def test_multiply_mixed(weyl2):
    out = multiply(weyl2.parse("x + Dy"), weyl2.gen("y"))
    assert out == weyl2.parse("x*y + y*Dy + 1")


def test_expand_to_basis(weyl2):
    assert expand_to_basis(weyl2.zero(), 3) == [Fraction(0)] * len(weyl2.normal_words(3))
    a = weyl2.parse("x*Dx + 1")
    vec = expand_to_basis(a, 2)
    words = weyl2.normal_words(2)
    assert vec[words.index(())] == 1
    assert vec[words.index(("x", "Dx"))] == 1
    assert sum(1 for c in vec if c) == 2


def test_expand_round_trip(weyl2):
    a = weyl2.parse("x^2*Dx^2 + x*Dx")
    vec = expand_to_basis(a, 4)
    assert element_from_vector(weyl2, vec, 4) == a
    words = weyl2.normal_words(4)
    assert vec[words.index(("x", "x", "Dx", "Dx"))] == 1
    assert vec[words.index(("x", "Dx"))] == 1


def test_expand_overflow(weyl2):
    with pytest.raises(DegreeOverflow):
        expand_to_basis(weyl2.parse("x^3"), 2)


def test_quotient_normal_form_examples(weyl2):
    assert quotient_normal_form(weyl2.parse("x*Dx + 1"), ["Dx", "Dy"]) == weyl2.one()
    m4 = weyl2.parse("Dx^2")
    assert quotient_normal_form(m4, ["x", "y"]) == m4
    assert quotient_normal_form(weyl2.parse("y*Dy"), ["Dx", "y"]) == weyl2.parse("-1")


def test_quotient_idempotent_and_linear(weyl2):
    mod = QuotientModule(weyl2, ["Dx", "y"])
    rng = random.Random(7)
    words = weyl2.normal_words(3)
    for _ in range(25):
        a = weyl2.element({words[rng.randrange(len(words))]: rng.randint(-3, 3)
                           for _ in range(3)})
        b = weyl2.element({words[rng.randrange(len(words))]: rng.randint(-3, 3)
                           for _ in range(3)})
        ra, rb = mod.reduce(a), mod.reduce(b)
        assert mod.reduce(ra) == ra
        assert mod.reduce(a + b) == ra + rb
        assert mod.reduce(a.scale(Fraction(2, 3))) == ra.scale(Fraction(2, 3))


def test_quotient_unsupported_pair(weyl2):
    with pytest.raises(UnsupportedIdeal):
        QuotientModule(weyl2, ["x", "Dx"])
    with pytest.raises(UnsupportedIdeal):
        QuotientModule(weyl2, ["z"])


def _random_element(pres, rng, max_degree=3, nterms=3):
    words = pres.normal_words(max_degree)
    terms = {}
    for _ in range(nterms):
        w = words[rng.randrange(len(words))]
        terms[w] = terms.get(w, 0) + Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return pres.element({w: c for w, c in terms.items() if c})


def test_associativity_on_random_triples(weyl2):
    rng = random.Random(2024)
    for _ in range(100):
        a = _random_element(weyl2, rng)
        b = _random_element(weyl2, rng)
        c = _random_element(weyl2, rng)
        assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


def test_degree_subadditivity(weyl2):
    rng = random.Random(5)
    for _ in range(50):
        a = _random_element(weyl2, rng)
        b = _random_element(weyl2, rng)
        ab = multiply(a, b)
        if not (a.is_zero() or b.is_zero() or ab.is_zero()):
            assert ab.degree() <= a.degree() + b.degree()


def test_confluence_overlaps(weyl2):
    # every length-3 word whose two adjacent pairs are both reducible must
    # reduce to the same normal form along either reduction order
    gens = weyl2.generators
    for a in gens:
        for b in gens:
            for c in gens:
                if (a, b) not in weyl2.rules or (b, c) not in weyl2.rules:
                    continue
                left_first = weyl2.zero()
                for rw, rc in weyl2.rules[(a, b)]:
                    left_first = left_first + normal_form(rw + (c,), weyl2).scale(rc)
                right_first = weyl2.zero()
                for rw, rc in weyl2.rules[(b, c)]:
                    right_first = right_first + normal_form((a,) + rw, weyl2).scale(rc)
                assert left_first == right_first


def test_step_budget():
    looping = AlgebraPresentation(
        ["a", "b"],
        [(("a", "b"), [(("b", "a"), 1)]), (("b", "a"), [(("a", "b"), 1)])],
        step_budget=500)
    with pytest.raises(StepBudgetExceeded):
        normal_form(("a", "b"), looping)


def test_parse_format_round_trip(weyl2):
    for text in ["x*Dx + 1", "-2/3*y^2 + x", "0", "1", "Dy"]:
        elem = parse_element(weyl2, text)
        again = parse_element(weyl2, format_element(elem))
        assert again == elem


def test_presentation_json_round_trip(weyl2):
    clone = AlgebraPresentation.from_json(weyl2.to_json())
    assert clone.generators == weyl2.generators
    assert clone.rules == weyl2.rules
    assert multiply(clone.gen("Dx"), clone.gen("x")) == clone.parse("x*Dx + 1")


def test_rule_validation():
    with pytest.raises(ValidationError):
        AlgebraPresentation(["a"], [(("a",), [((), 1)])])
    with pytest.raises(ValidationError):
        AlgebraPresentation(["a", "b"], [(("a", "b"), [(("a", "b", "b"), 1)])])
