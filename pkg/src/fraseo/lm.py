"""Verb-centric usage statistics from a tagged corpus.

The training input is one sentence per line, each token written as
``surface/lemma/category`` (categories as in features.LexicalCategory).
Blank lines and ``#`` comments are ignored; lines with malformed tokens are
skipped and counted, never fatal.

For every verb occurrence the model counts:

* which preposition follows it directly (weight 1.0) or one token later
  (weight 0.5, counted regardless of what sits in between),
* whether the clitic ``se`` is adjacent on either side (reflexive evidence),
* the occurrence itself.

Queries normalize the preposition weights into a distribution and turn the
reflexive tally into a relative frequency.
"""

import os
import tempfile
from dataclasses import dataclass, field

from .errors import ModelError
from .features import LexicalCategory

ADJACENT_WEIGHT = 1.0
SKIP_ONE_WEIGHT = 0.5
REFLEXIVE_LEMMA = "se"

_CATEGORY_VALUES = frozenset(cat.value for cat in LexicalCategory)


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    lemma: str
    category: str


def parse_tagged_line(line):
    """Split one corpus line into TaggedTokens; ValueError if malformed."""
    tokens = []
    for chunk in line.split():
        parts = chunk.split("/")
        if len(parts) != 3 or not all(parts):
            raise ValueError("malformed token %r" % chunk)
        surface, lemma, category = parts
        if category not in _CATEGORY_VALUES:
            raise ValueError("unknown category %r in token %r" % (category, chunk))
        tokens.append(TaggedToken(surface=surface, lemma=lemma, category=category))
    return tokens


@dataclass
class VerbStats:
    total: int = 0
    reflexive: int = 0
    preps: dict = field(default_factory=dict)


class NGramModel:
    def __init__(self):
        self._verbs = {}
        self.skipped_lines = 0

    def verbs(self):
        return sorted(self._verbs)

    def known(self, verb):
        return verb in self._verbs

    def total_count(self, verb):
        stats = self._verbs.get(verb)
        return stats.total if stats else 0

    def observe_sentence(self, tokens):
        for index, token in enumerate(tokens):
            if token.category != LexicalCategory.verb.value:
                continue
            stats = self._verbs.setdefault(token.lemma, VerbStats())
            stats.total += 1
            for neighbor in (index - 1, index + 1):
                if 0 <= neighbor < len(tokens) and tokens[neighbor].lemma == REFLEXIVE_LEMMA:
                    stats.reflexive += 1
                    break
            for offset, weight in ((1, ADJACENT_WEIGHT), (2, SKIP_ONE_WEIGHT)):
                position = index + offset
                if position >= len(tokens):
                    continue
                follower = tokens[position]
                if follower.category == LexicalCategory.preposition.value:
                    stats.preps[follower.lemma] = stats.preps.get(follower.lemma, 0.0) + weight

    def preposition_after(self, verb):
        """Distribution over prepositions seen after the verb.

        Returns (preposition, probability) pairs, highest first, ties broken
        alphabetically; probabilities sum to 1.0. Empty for unseen verbs or
        verbs with no observed preposition.
        """
        stats = self._verbs.get(verb)
        if not stats or not stats.preps:
            return []
        mass = sum(stats.preps.values())
        ranked = sorted(stats.preps.items(), key=lambda item: (-item[1], item[0]))
        return [(prep, weight / mass) for prep, weight in ranked]

    def top_preposition(self, verb):
        ranked = self.preposition_after(verb)
        return ranked[0] if ranked else None

    def reflexive_probability(self, verb):
        stats = self._verbs.get(verb)
        if not stats or not stats.total:
            return 0.0
        return stats.reflexive / stats.total

    def raw_preposition_weight(self, verb, prep):
        stats = self._verbs.get(verb)
        if not stats:
            return 0.0
        return stats.preps.get(prep, 0.0)

    def save(self, path):
        lines = ["# verb usage model v1"]
        for verb in sorted(self._verbs):
            stats = self._verbs[verb]
            lines.append("V %s %d %d" % (verb, stats.total, stats.reflexive))
            for prep in sorted(stats.preps):
                lines.append("P %s %s %s" % (verb, prep, repr(stats.preps[prep])))
        payload = "\n".join(lines) + "\n"
        directory = os.path.dirname(os.path.abspath(path))
        handle, temp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(handle, "w", encoding="utf-8") as out:
                out.write(payload)
            os.replace(temp_path, path)
        except BaseException:
            if os.path.exists(temp_path):
                os.unlink(temp_path)
            raise

    @classmethod
    def load(cls, path):
        model = cls()
        try:
            with open(path, "r", encoding="utf-8") as handle:
                raw_lines = handle.read().splitlines()
        except OSError as exc:
            raise ModelError("cannot read model file %s: %s" % (path, exc)) from exc
        for number, raw in enumerate(raw_lines, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                if parts[0] == "V" and len(parts) == 4:
                    verb, total, reflexive = parts[1], int(parts[2]), int(parts[3])
                    stats = model._verbs.setdefault(verb, VerbStats())
                    stats.total = total
                    stats.reflexive = reflexive
                elif parts[0] == "P" and len(parts) == 4:
                    verb, prep, weight = parts[1], parts[2], float(parts[3])
                    stats = model._verbs.setdefault(verb, VerbStats())
                    stats.preps[prep] = weight
                else:
                    raise ValueError("unrecognized record")
            except (ValueError, IndexError) as exc:
                raise ModelError("bad model line %d: %r" % (number, raw)) from exc
        return model


def train_model(lines):
    """Build a model from an iterable of corpus lines."""
    model = NGramModel()
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            tokens = parse_tagged_line(line)
        except ValueError:
            model.skipped_lines += 1
            continue
        model.observe_sentence(tokens)
    return model


def train_file(path):
    with open(path, "r", encoding="utf-8") as handle:
        return train_model(handle)
