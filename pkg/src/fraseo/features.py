"""Morphosyntactic feature axes and feature bundles.

Every axis carries an ``unspecified`` value so partially specified bundles can
describe invariable words (prepositions, many adverbs) and underdetermined
forms (an adjective like "azul" that serves both genders).
"""

from dataclasses import dataclass
from enum import Enum


class Gender(Enum):
    unspecified = "unspecified"
    masculine = "masculine"
    feminine = "feminine"


class Number(Enum):
    unspecified = "unspecified"
    singular = "singular"
    plural = "plural"


class Person(Enum):
    unspecified = "unspecified"
    first = "first"
    second = "second"
    third = "third"


class Tense(Enum):
    unspecified = "unspecified"
    present = "present"
    past = "past"
    future = "future"
    conditional = "conditional"


class Mood(Enum):
    unspecified = "unspecified"
    indicative = "indicative"
    subjunctive = "subjunctive"
    imperative = "imperative"
    infinitive = "infinitive"
    gerund = "gerund"
    participle = "participle"


NON_FINITE_MOODS = frozenset({Mood.infinitive, Mood.gerund, Mood.participle})


class LexicalCategory(Enum):
    noun = "noun"
    verb = "verb"
    adjective = "adjective"
    adverb = "adverb"
    determiner = "determiner"
    pronoun = "pronoun"
    conjunction = "conjunction"
    preposition = "preposition"
    # Assigned to out-of-vocabulary tokens at runtime; never stored in a lexicon.
    proper_name = "proper_name"


# Categories whose entries hold exactly one form equal to the lemma.
INVARIABLE_CATEGORIES = frozenset(
    {LexicalCategory.adverb, LexicalCategory.conjunction, LexicalCategory.preposition}
)


class AdverbClass(Enum):
    time_past = "time_past"
    time_future = "time_future"
    negation_polarity = "negation_polarity"
    other = "other"


AXES = ("gender", "number", "person", "tense", "mood")


@dataclass(frozen=True)
class FeatureBundle:
    gender: Gender = Gender.unspecified
    number: Number = Number.unspecified
    person: Person = Person.unspecified
    tense: Tense = Tense.unspecified
    mood: Mood = Mood.unspecified

    def validate(self):
        """Check internal consistency; raises ValueError on violation.

        A specified tense only makes sense on indicative or subjunctive
        forms, and non-finite forms carry neither tense nor person.
        """
        if self.tense is not Tense.unspecified and self.mood not in (
            Mood.indicative,
            Mood.subjunctive,
        ):
            raise ValueError(
                "tense %s requires indicative or subjunctive mood, got %s"
                % (self.tense.value, self.mood.value)
            )
        if self.mood in NON_FINITE_MOODS:
            if self.tense is not Tense.unspecified or self.person is not Person.unspecified:
                raise ValueError(
                    "non-finite mood %s cannot carry tense or person" % self.mood.value
                )
        return self

    def specified_axes(self):
        return [
            axis for axis in AXES if getattr(self, axis).value != "unspecified"
        ]

    def matches(self, target):
        """True when this bundle is usable where ``target`` is requested.

        Axes compare as equal when either side leaves them unspecified.
        """
        for axis in AXES:
            mine = getattr(self, axis)
            wanted = getattr(target, axis)
            if mine.value == "unspecified" or wanted.value == "unspecified":
                continue
            if mine is not wanted:
                return False
        return True

    def agrees_with(self, other):
        """Symmetric variant of matches(); bundles unify on specified axes."""
        return self.matches(other)

    def merged_with(self, other):
        """Union of two compatible bundles; specified axes win."""
        if not self.agrees_with(other):
            raise ValueError("cannot merge conflicting bundles %s and %s" % (self, other))
        kwargs = {}
        for axis in AXES:
            mine = getattr(self, axis)
            theirs = getattr(other, axis)
            kwargs[axis] = mine if mine.value != "unspecified" else theirs
        return FeatureBundle(**kwargs)

    def replaced(self, **kwargs):
        current = {axis: getattr(self, axis) for axis in AXES}
        current.update(kwargs)
        return FeatureBundle(**current)

    def __str__(self):
        parts = [
            "%s=%s" % (axis, getattr(self, axis).value)
            for axis in AXES
            if getattr(self, axis).value != "unspecified"
        ]
        return "{%s}" % ", ".join(parts) if parts else "{unspecified}"


EMPTY_BUNDLE = FeatureBundle()
