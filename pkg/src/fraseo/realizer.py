"""Morphological and orthographic realization of sentence plans.

Final stage of the generation pipeline: infer sentence-wide agreement
from the subject, pick the tense, inflect every slot, add the reflexive
clitic when the verb calls for one, negate, contract adjacent function
words, and punctuate.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass

from .errors import InflectionMiss
from .features import (
    AdverbClass,
    FeatureBundle,
    Gender,
    LexicalCategory,
    Mood,
    Number,
    Person,
    Tense,
)
from .lexicon import inflect, lookup_form
from .planner import SentenceMode

PROVENANCE_DEFAULT = "default"
PROVENANCE_SUBJECT = "derived-from-subject"

NEGATION_WORD = "no"

# Reflexive clitic by (person, plural?).
_CLITICS = {
    (Person.first, False): "me",
    (Person.second, False): "te",
    (Person.third, False): "se",
    (Person.first, True): "nos",
    (Person.second, True): "os",
    (Person.third, True): "se",
}
_CLITIC_WORDS = frozenset(_CLITICS.values())

REFLEXIVE_THRESHOLD = 0.5

# Obligatory fusions of adjacent function words.
CONTRACTIONS = {
    ("a", "el"): "al",
    ("de", "el"): "del",
    ("con", "yo"): "conmigo",
    ("con", "ti"): "contigo",
    ("con", "sí"): "consigo",
}

_HEAD_CATEGORIES = (
    LexicalCategory.noun,
    LexicalCategory.pronoun,
    LexicalCategory.proper_name,
)


@dataclass(frozen=True)
class AgreementResult:
    person: Person
    number: Number
    gender: Gender
    provenance: dict

    def __str__(self):
        return "person=%s number=%s gender=%s" % (
            self.person.value,
            self.number.value,
            self.gender.value,
        )


@dataclass(frozen=True)
class RealizedSentence:
    text: str
    plan: object
    trace: tuple


def infer_agreement(subject_slots):
    """Sentence agreement features from the subject's slot fills.

    ``subject_slots`` is the flat list of fills covering the subject
    constituent (determiners and conjunctions included). Person obeys the
    strict order first > second > third; number is plural for coordinated
    subjects or any plural constituent; gender is feminine only when at
    least one constituent carries gender and all that do are feminine.
    An empty subject falls back to first person singular masculine.
    """
    heads = [
        fill
        for fill in subject_slots
        if fill.category in _HEAD_CATEGORIES
    ]
    coordinated = any(
        fill.category is LexicalCategory.conjunction for fill in subject_slots
    )
    provenance = {}

    if not heads:
        provenance = {
            "person": PROVENANCE_DEFAULT,
            "number": PROVENANCE_DEFAULT,
            "gender": PROVENANCE_DEFAULT,
        }
        return AgreementResult(Person.first, Number.singular, Gender.masculine, provenance)

    persons = set()
    numbers = set()
    genders = set()
    for fill in heads:
        features = fill.form.features if fill.form is not None else FeatureBundle()
        persons.add(features.person)
        numbers.add(features.number)
        if features.gender is not Gender.unspecified:
            genders.add(features.gender)

    if Person.first in persons:
        person = Person.first
    elif Person.second in persons:
        person = Person.second
    else:
        person = Person.third

    if coordinated or Number.plural in numbers:
        number = Number.plural
    else:
        number = Number.singular

    if genders and genders == {Gender.feminine}:
        gender = Gender.feminine
    else:
        gender = Gender.masculine

    provenance = {
        "person": PROVENANCE_SUBJECT,
        "number": PROVENANCE_SUBJECT,
        "gender": PROVENANCE_SUBJECT if genders else PROVENANCE_DEFAULT,
    }
    return AgreementResult(person, number, gender, provenance)


def select_tense(tokens, lexicon=None):
    """Tense from the first time adverb among the tokens; present otherwise."""
    for token in tokens:
        for entry, _form in getattr(token, "resolved", ()):
            if entry.category is not LexicalCategory.adverb:
                continue
            if entry.adverb_class is AdverbClass.time_past:
                return Tense.past
            if entry.adverb_class is AdverbClass.time_future:
                return Tense.future
    return Tense.present


def load_polarity_pairs(path=None):
    """Read the positive -> negative adverb table (tab separated)."""
    if path is None:
        resource = importlib.resources.files("fraseo.data") / "polarity_pairs.txt"
        text = resource.read_text(encoding="utf-8")
    else:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    pairs = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        positive, _, negative = line.partition("\t")
        positive = positive.strip()
        negative = negative.strip()
        if positive and negative:
            pairs[positive] = negative
    return pairs


def _contract_once(words):
    out = []
    trace = []
    i = 0
    while i < len(words):
        if i + 1 < len(words) and (words[i], words[i + 1]) in CONTRACTIONS:
            fused = CONTRACTIONS[(words[i], words[i + 1])]
            trace.append("contraction %s %s -> %s" % (words[i], words[i + 1], fused))
            out.append(fused)
            i += 2
        else:
            out.append(words[i])
            i += 1
    return out, trace


def apply_contractions(words):
    """Fuse adjacent function-word pairs (a+el, de+el, con+yo, ...).

    Single left-to-right pass; idempotent because no fused form starts
    another pair.
    """
    out, _trace = _contract_once(list(words))
    return out


def _find_finite_verb(words, lexicon):
    for index, word in enumerate(words):
        for entry, form in lookup_form(lexicon, word):
            if entry.category is not LexicalCategory.verb:
                continue
            if form.features.mood is Mood.indicative:
                return index
    return None


def _negate(words, pairs, verb_index, trace):
    words = list(words)
    for index, word in enumerate(words):
        if word in pairs:
            trace.append("polarity %s -> %s" % (word, pairs[word]))
            words[index] = pairs[word]
    position = verb_index if verb_index is not None else 0
    if position > 0 and words[position - 1] in _CLITIC_WORDS:
        position -= 1
    anchor = words[verb_index] if verb_index is not None else words[0] if words else ""
    words.insert(position, NEGATION_WORD)
    trace.append("negation no before %s" % anchor)
    return words


def apply_negation(words, mode, lexicon, pairs=None):
    """Insert ``no`` before the finite verb and swap polarity adverbs.

    Modes without negation return the words unchanged. The finite verb is
    located through the lexicon; a preceding reflexive clitic stays glued
    to its verb (``no se seca``).
    """
    if not mode.is_negative:
        return list(words)
    if pairs is None:
        pairs = load_polarity_pairs()
    verb_index = _find_finite_verb(words, lexicon)
    return _negate(words, pairs, verb_index, [])


def _phrase_targets(tree, fills, agreement):
    """Agreement targets for determiner and adjective slots, by leaf index."""
    leaves = []

    def collect(node):
        if node.is_leaf:
            leaves.append(node)
            return
        for child in node.children:
            collect(child)

    collect(tree)
    position = {id(leaf): index for index, leaf in enumerate(leaves)}
    targets = {}

    def adjective_leaf(sadj_node):
        for child in sadj_node.children:
            if child.is_leaf and child.symbol.name == LexicalCategory.adjective.value:
                return child
        return None

    def visit(node):
        if node.is_leaf:
            return
        name = node.symbol.name
        if name in ("SNS", "SN"):
            noun_features = None
            for child in node.children:
                if child.is_leaf and child.symbol.name == LexicalCategory.noun.value:
                    fill = fills[position[id(child)]]
                    if fill.form is not None:
                        noun_features = fill.form.features
            if noun_features is not None:
                target = (noun_features.gender, noun_features.number)
                for child in node.children:
                    if child.is_leaf and child.symbol.name == LexicalCategory.determiner.value:
                        targets[position[id(child)]] = target
                    elif not child.is_leaf and child.symbol.name == "SADJ":
                        leaf = adjective_leaf(child)
                        if leaf is not None:
                            targets[position[id(leaf)]] = target
        elif name == "PRED":
            for child in node.children:
                if not child.is_leaf and child.symbol.name == "SADJ":
                    leaf = adjective_leaf(child)
                    if leaf is not None:
                        targets[position[id(leaf)]] = (agreement.gender, agreement.number)
        for child in node.children:
            visit(child)

    visit(tree)
    return targets


def _capitalized(surface):
    if not surface:
        return surface
    return surface[0].upper() + surface[1:]


def _inflect_slot(fill, index, targets, agreement, tense, verb_seen, trace):
    """Surface for one slot. Returns (word, is_finite_verb)."""
    category = fill.category

    if category is LexicalCategory.proper_name or fill.entry is None:
        word = _capitalized(fill.surface)
        if fill.token is not None and fill.token.is_oov:
            trace.append("proper name %s" % word)
        return word, False

    if category is LexicalCategory.verb:
        if not verb_seen:
            target = FeatureBundle(
                person=agreement.person,
                number=agreement.number,
                tense=tense,
                mood=Mood.indicative,
            )
        else:
            target = FeatureBundle(mood=Mood.infinitive)
        try:
            word = inflect(fill.entry, target)
        except InflectionMiss:
            word = fill.surface
            trace.append("inflection miss %s kept %s" % (fill.entry.lemma, word))
        return word, not verb_seen

    if category in (LexicalCategory.determiner, LexicalCategory.adjective):
        gender, number = targets.get(index, (Gender.unspecified, Number.unspecified))
        target = FeatureBundle(gender=gender, number=number)
        try:
            word = inflect(fill.entry, target)
        except InflectionMiss:
            word = fill.surface
            trace.append("inflection miss %s kept %s" % (fill.entry.lemma, word))
        return word, False

    # Nouns and pronouns keep their resolved form; invariable categories
    # surface their single form.
    if fill.form is not None:
        return fill.form.surface, False
    return fill.surface, False


def _insertion_label(rationale):
    return rationale.replace("_", " ")


def realize(plan, lexicon, lm, polarity_pairs=None):
    """Turn one SentencePlan into the final sentence text.

    Pipeline: agreement -> tense -> slot inflection -> reflexive clitic ->
    negation -> contractions -> orthography. Every transformation is
    recorded in the trace.
    """
    trace = ["mode %s" % plan.mode.value]

    agreement = infer_agreement(plan.subject_fills)
    trace.append("agreement %s" % agreement)

    tokens = list(plan.subject_tokens) + list(plan.predicate_tokens)
    tense = select_tense(tokens, lexicon)
    trace.append("tense %s" % tense.value)

    targets = _phrase_targets(plan.tree, plan.slot_assignment, agreement)

    words = []
    finite_index = None
    verb_seen = False
    for index, fill in enumerate(plan.slot_assignment):
        word, is_finite = _inflect_slot(
            fill, index, targets, agreement, tense, verb_seen, trace
        )
        if fill.category is LexicalCategory.verb:
            verb_seen = True
        if is_finite:
            finite_index = len(words)
        if fill.rationale is not None:
            trace.append("insert %s %s" % (_insertion_label(fill.rationale), word))
        words.append(word)

    reflexive = plan.reflexive_forced
    if not reflexive and plan.main_verb_lemma and lm is not None:
        reflexive = lm.reflexive_probability(plan.main_verb_lemma) > REFLEXIVE_THRESHOLD
    if reflexive and finite_index is not None:
        clitic = _CLITICS[(agreement.person, agreement.number is Number.plural)]
        words.insert(finite_index, clitic)
        trace.append("reflexive clitic %s" % clitic)
        finite_index += 1

    if plan.mode.is_negative:
        pairs = polarity_pairs if polarity_pairs is not None else load_polarity_pairs()
        words = _negate(words, pairs, finite_index, trace)

    words, contraction_trace = _contract_once(words)
    trace.extend(contraction_trace)

    text = " ".join(words)
    for index, char in enumerate(text):
        if char.isalpha():
            text = text[:index] + char.upper() + text[index + 1 :]
            break
    if plan.mode.is_interrogative:
        text = "¿%s?" % text
    else:
        text = "%s." % text
    trace.append("orthography %s" % text)

    return RealizedSentence(text=text, plan=plan, trace=tuple(trace))
