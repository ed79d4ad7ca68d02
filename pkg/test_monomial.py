"""
Test monomial algebras: normal words, cyclic words and admissible degrees
"""
import random

import pytest

from app.models import MonomialPresentationModel
from app.services.datum_service import datum_service
from app.services.monomial_service import (
    INCONCLUSIVE,
    NONE_EXISTS,
    WITNESS,
    AvoidanceAutomaton,
    MonomialPresentation,
    MonomialService,
    closed_form_normal_words,
    monomial_service,
    non_overlapping,
    strongly_free,
)
from app.services.series_service import TruncSeries, sym_exp


def test_non_overlapping():
    assert non_overlapping("xy", "xy")
    assert not non_overlapping("xx", "xx")
    assert non_overlapping("xxyy", "xyxyy")
    assert not non_overlapping("xy", "yx")
    # containment
    assert not non_overlapping("xy", "xxyy")


def test_strongly_free():
    assert strongly_free(MonomialPresentation.from_words("xy", ["xxyy", "xyxyy"]))
    assert not strongly_free(MonomialPresentation.from_words("xy", ["xyx"]))


def test_automaton_rejects_factors():
    automaton = AvoidanceAutomaton(2, [(0, 0, 1, 1)])
    state = 0
    for letter in (1, 0, 0, 1):
        state = automaton.step(state, letter)
    assert not automaton.dead[state]
    assert automaton.dead[automaton.step(state, 1)]
    # 16 words of length 4 less the relation itself
    assert automaton.walk_counts([1, 1], 4) == [1, 2, 4, 8, 15]


def test_normal_words_without_relations():
    p = MonomialPresentation.from_words("xy", [])
    assert monomial_service.count_normal_words(p, 4) == TruncSeries([1, 2, 4, 8, 16])


def test_normal_words_match_closed_form():
    p = MonomialPresentation.from_words("xy", ["xxyy"])
    assert monomial_service.count_normal_words(p, 6) == TruncSeries([1, 2, 4, 8, 15, 28, 52])
    assert closed_form_normal_words(p, 6) == monomial_service.count_normal_words(p, 6)


def test_weighted_letters():
    p = MonomialPresentation.from_words("xy", ["xy"], degrees=[1, 2])
    assert monomial_service.count_normal_words(p, 8) == closed_form_normal_words(p, 8)


def test_cyclic_words_without_relations_are_necklaces():
    p = MonomialPresentation.from_words("xy", [])
    assert monomial_service.count_cyclic_avoiding(p, 6) == TruncSeries([1, 2, 3, 4, 6, 8, 14])


def test_cyclic_words_avoiding_xy():
    p = MonomialPresentation.from_words("xy", ["xy"])
    assert monomial_service.count_cyclic_avoiding(p, 5) == TruncSeries([1, 2, 2, 2, 2, 2])


@pytest.mark.parametrize("words", [["xy"], ["xxyy"], ["xxyy", "xyxyy"], ["xxxy"]])
def test_cyclic_words_give_zeta(words):
    p = MonomialPresentation.from_words("xy", words)
    d = datum_service.datum_from_presentation(p.to_presentation())
    assert datum_service.lambda_poly(d, 10) == TruncSeries.one(10)
    cyclic = monomial_service.count_cyclic_avoiding(p, 10)
    assert sym_exp(cyclic - 1) == datum_service.zeta(d, 10)


def test_adding_a_relation_never_adds_normal_words():
    rng = random.Random(5)
    words = []
    previous = monomial_service.count_normal_words(MonomialPresentation.from_words("xy", words), 8)
    for _ in range(6):
        words.append("".join(rng.choice("xy") for _ in range(rng.randint(2, 5))))
        current = monomial_service.count_normal_words(MonomialPresentation.from_words("xy", words), 8)
        assert all(a <= b for a, b in zip(current.coeffs, previous.coeffs))
        previous = current


@pytest.mark.parametrize("words", [["xy"], ["xxyy"], ["xyx", "yy"], ["xxxy", "xyy"]])
def test_cyclic_words_are_at_most_necklaces(words):
    free = monomial_service.count_cyclic_avoiding(MonomialPresentation.from_words("xy", []), 8)
    cyclic = monomial_service.count_cyclic_avoiding(MonomialPresentation.from_words("xy", words), 8)
    assert all(a <= b for a, b in zip(cyclic.coeffs, free.coeffs))


def test_random_strongly_free_sets():
    rng = random.Random(11)
    for _ in range(5):
        words = monomial_service.random_strongly_free(rng, letters=2, max_length=6)
        p = MonomialPresentation(("x", "y"), (1, 1), tuple(words))
        assert strongly_free(p)
        assert monomial_service.count_normal_words(p, 12) == closed_form_normal_words(p, 12)


def test_admissible_witnesses():
    verdict = monomial_service.admissible_search([1, 1], [4])
    assert verdict.status == WITNESS
    assert len(verdict.words[0]) == 4
    assert monomial_service.admissible_search([1, 1], [4, 5]).admissible


@pytest.mark.parametrize("s", [1, 2, 3, 4, 5, 6])
def test_degree_two_relation_admits_no_partner(s):
    assert monomial_service.admissible_search([1, 1], [2, s]).status == NONE_EXISTS


def test_minimal_admissible_partner():
    assert monomial_service.minimal_admissible_partner(4, 8) == 5


def test_search_budget():
    verdict = monomial_service.admissible_search([1, 1], [2, 6], budget=1)
    assert verdict.status == INCONCLUSIVE


def test_necklace_cap():
    p = MonomialPresentation.from_words("xy", [])
    with pytest.raises(RuntimeError, match="necklace cap"):
        MonomialService(necklace_cap=5).count_cyclic_avoiding(p, 6)


def test_presentation_from_model():
    model = MonomialPresentationModel.model_validate({
        "alphabet": [{"name": "x"}, {"name": "y", "degree": 2}],
        "relations": [["x", "y"]],
    })
    p = MonomialPresentation.from_model(model)
    assert p.degrees == (1, 2)
    assert p.weight(p.relations[0]) == 3


def test_unknown_letter():
    with pytest.raises(ValueError):
        MonomialPresentation.from_words("xy", ["xz"])
