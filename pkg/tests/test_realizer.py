import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraseo.features import (
    FeatureBundle,
    Gender,
    LexicalCategory,
    Mood,
    Number,
    Person,
    Tense,
)
from fraseo.grammar import parse_grammar
from fraseo.lexicon import Lexicon, LexicalEntry, WordForm, lookup_form
from fraseo.pipeline import generate
from fraseo.planner import (
    SentenceMode,
    SlotFill,
    plan_structures,
    tokenize_and_resolve,
)
from fraseo.realizer import (
    PROVENANCE_DEFAULT,
    PROVENANCE_SUBJECT,
    apply_contractions,
    apply_negation,
    infer_agreement,
    load_polarity_pairs,
    realize,
    select_tense,
)


def fill_for(lexicon, surface, category):
    for entry, form in lookup_form(lexicon, surface):
        if entry.category is category:
            return SlotFill(category=category, surface=surface, entry=entry, form=form)
    raise AssertionError("no %s reading for %r" % (category.value, surface))


def heads(lexicon, *surfaces):
    out = []
    for index, surface in enumerate(surfaces):
        if index:
            out.append(fill_for(lexicon, "y", LexicalCategory.conjunction))
        category = LexicalCategory.pronoun
        hits = lookup_form(lexicon, surface)
        if any(entry.category is LexicalCategory.noun for entry, _ in hits):
            category = LexicalCategory.noun
        out.append(fill_for(lexicon, surface, category))
    return out


def test_agreement_empty_subject_defaults(lexicon):
    result = infer_agreement([])
    assert (result.person, result.number, result.gender) == (
        Person.first,
        Number.singular,
        Gender.masculine,
    )
    assert result.provenance["person"] == PROVENANCE_DEFAULT
    assert str(result) == "person=first number=singular gender=masculine"


def test_agreement_person_priority(lexicon):
    first = infer_agreement(heads(lexicon, "cuidadora", "nosotros"))
    assert first.person is Person.first
    assert first.number is Number.plural
    assert first.gender is Gender.masculine
    second = infer_agreement(heads(lexicon, "tú", "ella"))
    assert second.person is Person.second
    third = infer_agreement(heads(lexicon, "perro", "gato"))
    assert third.person is Person.third
    assert third.number is Number.plural  # coordination forces plural


def test_agreement_number_from_plural_head(lexicon):
    assert infer_agreement(heads(lexicon, "niñas")).number is Number.plural
    assert infer_agreement(heads(lexicon, "niña")).number is Number.singular


def test_agreement_gender_all_feminine_rule(lexicon):
    assert infer_agreement(heads(lexicon, "niña", "abuela")).gender is Gender.feminine
    assert infer_agreement(heads(lexicon, "niña", "perro")).gender is Gender.masculine
    result = infer_agreement(heads(lexicon, "niña"))
    assert result.gender is Gender.feminine
    assert result.provenance["gender"] == PROVENANCE_SUBJECT


def test_select_tense_from_time_adverbs(lexicon):
    assert select_tense(tokenize_and_resolve(["comer", "ayer"], lexicon)) is Tense.past
    assert select_tense(tokenize_and_resolve(["comer", "mañana"], lexicon)) is Tense.future
    assert select_tense(tokenize_and_resolve(["comer", "bien"], lexicon)) is Tense.present
    assert select_tense(tokenize_and_resolve(["comer"], lexicon)) is Tense.present


def test_polarity_pairs_load():
    pairs = load_polarity_pairs()
    assert pairs["siempre"] == "nunca"
    assert pairs["también"] == "tampoco"
    assert pairs["algo"] == "nada"
    assert pairs["alguien"] == "nadie"


def test_contractions_fuse_pinned_pairs():
    assert apply_contractions(["voy", "a", "el", "colegio"]) == ["voy", "al", "colegio"]
    assert apply_contractions(["la", "barriga", "de", "el", "lobo"]) == [
        "la",
        "barriga",
        "del",
        "lobo",
    ]
    assert apply_contractions(["come", "con", "yo"]) == ["come", "conmigo"]
    assert apply_contractions(["habla", "con", "ti"]) == ["habla", "contigo"]
    assert apply_contractions(["lleva", "algo", "con", "sí"]) == ["lleva", "algo", "consigo"]
    assert apply_contractions([]) == []
    assert apply_contractions(["de", "la", "casa"]) == ["de", "la", "casa"]


@settings(derandomize=True, max_examples=300)
@given(
    st.lists(
        st.sampled_from(
            ["a", "el", "de", "con", "yo", "ti", "sí", "la", "los", "casa", "al", "del"]
        ),
        max_size=8,
    )
)
def test_contractions_idempotent(words):
    once = apply_contractions(words)
    assert apply_contractions(once) == once


def test_negation_inserts_before_finite_verb(lexicon):
    words = ["yo", "voy", "siempre", "a", "el", "teatro"]
    negated = apply_negation(words, SentenceMode.negative, lexicon)
    assert negated == ["yo", "no", "voy", "nunca", "a", "el", "teatro"]
    assert apply_contractions(negated) == ["yo", "no", "voy", "nunca", "al", "teatro"]


def test_negation_keeps_clitic_attached(lexicon):
    words = ["mamá", "se", "seca", "el", "pelo"]
    negated = apply_negation(words, SentenceMode.negative, lexicon)
    assert negated == ["mamá", "no", "se", "seca", "el", "pelo"]


def test_negation_noop_for_affirmative(lexicon):
    words = ["yo", "voy"]
    assert apply_negation(words, SentenceMode.affirmative, lexicon) == words
    assert apply_negation(words, SentenceMode.interrogative, lexicon) == words


def test_negation_without_finite_verb_prepends(lexicon):
    assert apply_negation(["caminar"], SentenceMode.negative, lexicon) == ["no", "caminar"]


def realize_top(resources, words):
    tokens = tokenize_and_resolve(words, resources.lexicon)
    plans = plan_structures(
        tokens, resources.grammar, resources.lexicon, resources.lm
    )
    return realize(plans[0], resources.lexicon, resources.lm)


def test_realize_contraction_in_trace(resources):
    result = realize_top(resources, ["él", "comer", "con", "yo"])
    assert result.text == "Él come conmigo."
    assert "contraction con yo -> conmigo" in result.trace


def test_realize_question_orthography(resources):
    result = realize_top(resources, ["pájaros", "poder", "volar", "?"])
    assert result.text == "¿Los pájaros pueden volar?"
    assert result.text.startswith("¿") and result.text.endswith("?")


def test_realize_past_tense_from_adverb(resources):
    result = realize_top(resources, ["yo", "comer", "ayer"])
    assert result.text == "Yo comí ayer."
    assert "tense past" in result.trace


def test_realize_reflexive_clitic_from_usage_model(resources):
    result = realize_top(resources, ["mamá", "secar", "pelo"])
    assert "se seca" in result.text
    assert any(line == "reflexive clitic se" for line in result.trace)


def test_realize_capitalizes_oov_as_proper_name(resources):
    result = realize_top(resources, ["ana", "ir", "colegio"])
    assert result.text.startswith("Ana ")
    assert any(line.startswith("proper name") for line in result.trace)


def test_realize_subject_agreement_reinflects_adjective(resources):
    result = realize_top(resources, ["niñas", "ser", "contento"])
    assert result.text == "Las niñas son contentas."


def test_realize_inflection_miss_keeps_surface():
    lexicon = Lexicon.from_entries(
        [
            LexicalEntry(
                lemma="nadar",
                category=LexicalCategory.verb,
                forms=(WordForm("nadar", FeatureBundle(mood=Mood.infinitive)),),
            )
        ]
    )
    grammar = parse_grammar("S -> PRED\nPRED -> verb\n")
    tokens = tokenize_and_resolve(["nadar"], lexicon)
    plans = plan_structures(tokens, grammar, lexicon, None)
    elided = [plan for plan in plans if plan.subject_leaf_count == 0]
    result = realize(elided[0], lexicon, None)
    assert result.text == "Nadar."
    assert any(line.startswith("inflection miss nadar") for line in result.trace)
