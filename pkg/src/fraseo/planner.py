"""Keyword interpretation and sentence planning.

First two stages of the generation pipeline: resolve the user's keywords
against the lexicon, detect the sentence mode, split the keywords into
subject and predicate around the main verb, then search the grammar for
every structure that fits the keyword sequence once function words
(determiners, prepositions, conjunctions) are interleaved where the
grammar demands them.

Candidate plans are ranked by how far their insertions stray from the
house realization policy (fewer deviations first), with grammar search
order breaking ties.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import EmptyInputError, NoStructureError, NoVerbError
from .features import LexicalCategory, Number
from .lexicon import Lexicon, LexicalEntry, WordForm, lookup_form, lookup_lemma

NEGATION_WORD = "no"
QUESTION_WORD = "?"

MARKER_NEGATION = "negation"
MARKER_QUESTION = "question"

DEFAULT_SUBJECT_LEMMA = "yo"
DEFAULT_DETERMINER = "el"
DEFAULT_CONJUNCTION = "y"
NOUN_PREPOSITION = "de"
REFLEXIVE_LEMMA = "se"

# An inserted preposition must be this likely under the verb's usage
# profile before the planner will commit to it.
LM_PREPOSITION_THRESHOLD = 0.5

# Rationale labels recorded for inserted words.
RATIONALE_DETERMINER = "determiner"
RATIONALE_PREPOSITION = "preposition"
RATIONALE_CONJUNCTION = "conjunction"
RATIONALE_DEFAULT_SUBJECT = "default_subject"


class SentenceMode(enum.Enum):
    affirmative = "affirmative"
    negative = "negative"
    interrogative = "interrogative"
    negative_interrogative = "negative_interrogative"

    @property
    def is_negative(self):
        return self in (SentenceMode.negative, SentenceMode.negative_interrogative)

    @property
    def is_interrogative(self):
        return self in (SentenceMode.interrogative, SentenceMode.negative_interrogative)


@dataclass(frozen=True)
class InputToken:
    """One user keyword, resolved against the lexicon."""

    raw: str
    resolved: tuple = ()  # tuple of (LexicalEntry, WordForm) pairs
    marker: str | None = None
    is_default_subject: bool = False
    is_reflexive_marker: bool = False

    @property
    def is_marker(self):
        return self.marker is not None

    @property
    def is_oov(self):
        return self.marker is None and not self.resolved

    @property
    def categories(self):
        return frozenset(entry.category for entry, _ in self.resolved)

    def matches_category(self, category):
        if self.marker is not None:
            return False
        if self.is_oov:
            return category is LexicalCategory.proper_name
        return any(entry.category is category for entry, _ in self.resolved)

    def resolutions_for(self, category):
        """(entry, form) readings of this token under the given category.

        Out-of-vocabulary tokens read as proper names with no entry.
        """
        if self.is_oov and category is LexicalCategory.proper_name:
            return ((None, None),)
        return tuple(
            (entry, form) for entry, form in self.resolved if entry.category is category
        )

    def resolves_lemma(self, lemma, category=None):
        for entry, _ in self.resolved:
            if entry.lemma == lemma and (category is None or entry.category is category):
                return True
        return False


@dataclass(frozen=True)
class SlotFill:
    """Assignment of one grammar leaf: a user token or an inserted word."""

    category: LexicalCategory
    surface: str
    token: InputToken | None = None
    entry: LexicalEntry | None = None
    form: WordForm | None = None
    rationale: str | None = None

    @property
    def is_inserted(self):
        return self.token is None

    @property
    def is_function_insertion(self):
        return self.rationale in (
            RATIONALE_DETERMINER,
            RATIONALE_PREPOSITION,
            RATIONALE_CONJUNCTION,
        )


@dataclass(frozen=True)
class SentencePlan:
    """A fully lexicalized structure candidate, ready for realization."""

    mode: SentenceMode
    subject_tokens: tuple
    predicate_tokens: tuple
    tree: object  # grammar.TreeNode
    slot_assignment: tuple  # SlotFill per leaf, in leaf order
    inserted: tuple  # (leaf position, LexicalCategory, rationale)
    deviations: int
    discovery_index: int
    reflexive_forced: bool = False
    main_verb_lemma: str | None = None
    subject_leaf_count: int = 0

    @property
    def subject_fills(self):
        return self.slot_assignment[: self.subject_leaf_count]

    @property
    def predicate_fills(self):
        return self.slot_assignment[self.subject_leaf_count :]


def _resolve_word(word, lexicon):
    pairs = lookup_form(lexicon, word)
    if not pairs and word != word.lower():
        pairs = lookup_form(lexicon, word.lower())
    if not pairs:
        entries = lookup_lemma(lexicon, word.lower())
        pairs = tuple((entry, entry.forms[0]) for entry in entries)
    return InputToken(raw=word, resolved=tuple(pairs))


def tokenize_and_resolve(words, lexicon):
    """Resolve keywords to lexicon readings, separating mode markers.

    ``no`` becomes the negation marker and ``?`` the question marker; every
    other word resolves through the surface index (as given, then
    lower-cased) and finally the lemma index. Unresolvable words stay as
    out-of-vocabulary tokens. Raises EmptyInputError when nothing but
    markers remains.
    """
    tokens = []
    for word in words:
        word = word.strip()
        if not word:
            continue
        if word.lower() == NEGATION_WORD:
            tokens.append(InputToken(raw=word, marker=MARKER_NEGATION))
        elif word == QUESTION_WORD:
            tokens.append(InputToken(raw=word, marker=MARKER_QUESTION))
        else:
            tokens.append(_resolve_word(word, lexicon))
    if not any(token.marker is None for token in tokens):
        raise EmptyInputError("input has no content words")
    return tokens


def detect_mode(tokens):
    """Sentence mode from the markers alone."""
    negative = any(token.marker == MARKER_NEGATION for token in tokens)
    question = any(token.marker == MARKER_QUESTION for token in tokens)
    if negative and question:
        return SentenceMode.negative_interrogative
    if negative:
        return SentenceMode.negative
    if question:
        return SentenceMode.interrogative
    return SentenceMode.affirmative


def split_subject_predicate(tokens):
    """Split content tokens around the first verb-readable token."""
    content = [token for token in tokens if token.marker is None]
    for index, token in enumerate(content):
        if token.matches_category(LexicalCategory.verb):
            return content[:index], content[index:]
    words = " ".join(token.raw for token in content)
    raise NoVerbError("no verb among the input words: %s" % words)


def insert_default_subject(subject_tokens, lexicon):
    """Give an empty subject the first-person pronoun, flagged as default."""
    if subject_tokens:
        return list(subject_tokens)
    pairs = lookup_form(lexicon, DEFAULT_SUBJECT_LEMMA)
    token = InputToken(
        raw=DEFAULT_SUBJECT_LEMMA, resolved=tuple(pairs), is_default_subject=True
    )
    return [token]


# Where a prepositional slot sits decides how it may be filled when no
# user token supplies the preposition.
_PREP_CTX_NOUN = "noun"  # inside a nominal syntagm: default "de"
_PREP_CTX_PREDICATE = "predicate"  # predicate complement: verb usage model
_PREP_CTX_VERB_LINK = "verb_link"  # between two verbs: verb usage model


@dataclass
class _Search:
    grammar: object
    lexicon: Lexicon
    lm: object
    tokens: list


def _fill_terminal(search, name, pos, verb_lemma, prep_ctx):
    """Yield (fill, new_pos, new_verb_lemma) choices for a terminal slot."""
    category = LexicalCategory(name)
    tokens = search.tokens
    token = tokens[pos] if pos < len(tokens) else None
    if token is not None and token.matches_category(category):
        for entry, form in token.resolutions_for(category):
            new_verb = verb_lemma
            if category is LexicalCategory.verb and verb_lemma is None and entry:
                new_verb = entry.lemma
            rationale = (
                RATIONALE_DEFAULT_SUBJECT if token.is_default_subject else None
            )
            fill = SlotFill(
                category=category,
                surface=token.raw,
                token=token,
                entry=entry,
                form=form,
                rationale=rationale,
            )
            yield fill, pos + 1, new_verb
        return
    # The pending token does not fit: only function words may be invented.
    if category is LexicalCategory.determiner:
        yield _inserted_fill(search, category, DEFAULT_DETERMINER, RATIONALE_DETERMINER), pos, verb_lemma
    elif category is LexicalCategory.conjunction:
        yield _inserted_fill(search, category, DEFAULT_CONJUNCTION, RATIONALE_CONJUNCTION), pos, verb_lemma
    elif category is LexicalCategory.preposition:
        if prep_ctx == _PREP_CTX_NOUN:
            yield _inserted_fill(search, category, NOUN_PREPOSITION, RATIONALE_PREPOSITION), pos, verb_lemma
        elif verb_lemma is not None:
            top = search.lm.top_preposition(verb_lemma) if search.lm else None
            if top and top[1] >= LM_PREPOSITION_THRESHOLD:
                yield _inserted_fill(search, category, top[0], RATIONALE_PREPOSITION), pos, verb_lemma


def _inserted_fill(search, category, surface, rationale):
    entry = None
    form = None
    for candidate in lookup_lemma(search.lexicon, surface, category):
        entry = candidate
        form = candidate.forms[0]
        break
    return SlotFill(
        category=category,
        surface=surface,
        token=None,
        entry=entry,
        form=form,
        rationale=rationale,
    )


def _child_prep_ctx(parent_name, child_name, inherited):
    if child_name == "SP":
        return _PREP_CTX_PREDICATE if parent_name == "PRED" else _PREP_CTX_NOUN
    if child_name == LexicalCategory.preposition.value:
        if parent_name == "SP":
            return inherited
        if parent_name == "PRED":
            return _PREP_CTX_VERB_LINK
        return _PREP_CTX_NOUN
    return inherited


def _match_symbol(search, name, pos, verb_lemma, usage, prep_ctx):
    """Yield (tree, fills, new_pos, new_verb_lemma) for one symbol.

    Walks rules in grammar order, consuming tokens left to right; the
    yield order is the planner's DFS discovery order.
    """
    from . import grammar as grammar_mod

    if name in grammar_mod.TERMINALS:
        for fill, new_pos, new_verb in _fill_terminal(search, name, pos, verb_lemma, prep_ctx):
            # Fresh node per slot: scoring tells leaves apart by identity.
            leaf = grammar_mod.TreeNode(symbol=grammar_mod.SymbolRef(name))
            yield leaf, (fill,), new_pos, new_verb
        return

    rules = search.grammar.rules_for.get(name, ())
    count = usage.get(name, 0) + 1
    if count > search.grammar.depth_limit:
        return
    child_usage = dict(usage)
    child_usage[name] = count
    for rule in rules:
        yield from _match_body(search, rule, 0, pos, verb_lemma, child_usage, prep_ctx, (), ())


def _match_body(search, rule, body_index, pos, verb_lemma, usage, prep_ctx, children, fills):
    from . import grammar as grammar_mod

    if body_index == len(rule.body):
        node = grammar_mod.TreeNode(
            symbol=grammar_mod.SymbolRef(rule.head.name),
            children=children,
            rule_index=rule.index,
        )
        yield node, fills, pos, verb_lemma
        return
    symbol = rule.body[body_index]
    child_ctx = _child_prep_ctx(rule.head.name, symbol.name, prep_ctx)
    for child, child_fills, new_pos, new_verb in _match_symbol(
        search, symbol.name, pos, verb_lemma, usage, child_ctx
    ):
        yield from _match_body(
            search,
            rule,
            body_index + 1,
            new_pos,
            new_verb,
            usage,
            prep_ctx,
            children + (child,),
            fills + child_fills,
        )


def _iter_parses(search):
    start = search.grammar.start
    usage = {}
    yield from _match_symbol(search, start, 0, None, usage, _PREP_CTX_NOUN)


def _collect_leaves(node, out):
    if node.is_leaf:
        out.append(node)
        return
    for child in node.children:
        _collect_leaves(child, out)


def _noun_phrase_flags(tree, fills):
    """Per-leaf context flags used by the deviation scoring.

    Returns a list aligned with the leaf order holding dicts with keys
    in_subject, in_sp, coord_member, plus the index of the leaf's phrase
    parent node.
    """
    flags = []

    def walk(node, in_subject, in_sp, coord_member, leaf_counter):
        if node.is_leaf:
            flags.append(
                {
                    "in_subject": in_subject,
                    "in_sp": in_sp,
                    "coord_member": coord_member,
                    "parent": None,
                }
            )
            return
        name = node.symbol.name
        for index, child in enumerate(node.children):
            child_subject = in_subject
            child_sp = in_sp or name == "SP"
            child_coord = coord_member
            if name == "S" and len(node.children) == 2 and index == 0:
                child_subject = True
            if name == "S" and index == len(node.children) - 1:
                child_subject = False
            if name == "SNC" and node.children[index].symbol.name == "SNS":
                child_coord = True
            start = len(flags)
            walk(child, child_subject, child_sp, child_coord, leaf_counter)
            if child.symbol.name in ("SNS", "SN"):
                for i in range(start, len(flags)):
                    if flags[i]["parent"] is None:
                        flags[i]["parent"] = child

    walk(tree, False, False, False, None)
    return flags


def _determiner_state(parent, fills, leaf_index, leaf_positions):
    """How the noun at leaf_index got its determiner: explicit/inserted/bare."""
    if parent is None:
        return "bare"
    children = parent.children
    if not children or children[0].symbol.name != LexicalCategory.determiner.value:
        return "bare"
    det_leaf_pos = leaf_positions[id(children[0])]
    det_fill = fills[det_leaf_pos]
    return "inserted" if det_fill.is_inserted else "explicit"


def _score_deviations(search, tree, fills, elided_default):
    """Count how far a parse strays from the preferred realization policy.

    Policy: keep the default subject; give subject nouns, coordination
    members, and preposition-internal nouns a determiner; give singular
    direct objects a determiner but leave plural ones bare; and let a verb
    with a dominant preposition profile introduce its first complement
    with that preposition. Explicit user words never count against a plan.
    """
    deviations = 1 if elided_default else 0

    leaves = []
    _collect_leaves(tree, leaves)
    leaf_positions = {id(leaf): i for i, leaf in enumerate(leaves)}
    flags = _noun_phrase_flags(tree, fills)

    for index, fill in enumerate(fills):
        if fill.category is not LexicalCategory.noun:
            continue
        info = flags[index]
        det_state = _determiner_state(info["parent"], fills, index, leaf_positions)
        if det_state == "explicit":
            continue
        if info["in_sp"] or info["coord_member"] or info["in_subject"]:
            wants_determiner = True
        else:
            plural = fill.form is not None and fill.form.features.number is Number.plural
            wants_determiner = not plural
        if wants_determiner and det_state == "bare":
            deviations += 1
        elif not wants_determiner and det_state == "inserted":
            deviations += 1

    deviations += _verb_profile_deviation(search, tree, fills, leaf_positions)
    return deviations


def _verb_profile_deviation(search, tree, fills, leaf_positions):
    pred = None
    for child in tree.children:
        if child.symbol.name == "PRED":
            pred = child
    if pred is None or len(pred.children) < 2:
        return 0
    verb_fill = fills[leaf_positions[id(pred.children[0])]]
    if verb_fill.entry is None:
        return 0
    top = search.lm.top_preposition(verb_fill.entry.lemma) if search.lm else None
    if not top or top[1] < LM_PREPOSITION_THRESHOLD:
        return 0
    complement = pred.children[1]
    if complement.symbol.name == "SP":
        return 0
    if complement.symbol.name == LexicalCategory.preposition.value:
        return 0
    return 1


def _plan_from_parse(search, mode, subject_tokens, predicate_tokens, tree, fills,
                     elided_default, reflexive_forced, discovery_index):
    subject_leaves = 0
    if len(tree.children) == 2:
        subject_leaves = len(tree.children[0].leaf_sequence())
    inserted = tuple(
        (index, fill.category, fill.rationale)
        for index, fill in enumerate(fills)
        if fill.rationale is not None
    )
    verb_lemma = None
    for fill in fills:
        if fill.category is LexicalCategory.verb and fill.entry is not None:
            verb_lemma = fill.entry.lemma
            break
    deviations = _score_deviations(search, tree, fills, elided_default)
    return SentencePlan(
        mode=mode,
        subject_tokens=tuple(subject_tokens),
        predicate_tokens=tuple(predicate_tokens),
        tree=tree,
        slot_assignment=tuple(fills),
        inserted=inserted,
        deviations=deviations,
        discovery_index=discovery_index,
        reflexive_forced=reflexive_forced,
        main_verb_lemma=verb_lemma,
        subject_leaf_count=subject_leaves,
    )


def plan_structures(tokens, grammar, lexicon, lm, max_plans=0):
    """Rank every grammar structure that fits the resolved keywords.

    Returns SentencePlans sorted by (policy deviations, discovery order).
    Raises NoStructureError when the grammar offers no fit, NoVerbError
    when no keyword reads as a verb.
    """
    mode = detect_mode(tokens)
    subject, predicate = split_subject_predicate(tokens)

    reflexive_forced = False
    if subject and subject[-1].resolves_lemma(REFLEXIVE_LEMMA, LexicalCategory.pronoun):
        reflexive_forced = True
        subject = subject[:-1]

    if not subject and any(
        token.matches_category(LexicalCategory.preposition) for token in predicate
    ):
        raise NoStructureError(
            "explicit preposition with no subject does not fit the grammar"
        )

    attempts = []
    if subject:
        attempts.append((list(subject), False))
    else:
        attempts.append((insert_default_subject([], lexicon), False))
        attempts.append(([], True))

    plans = []
    discovery = 0
    for subject_tokens, elided_default in attempts:
        search = _Search(
            grammar=grammar,
            lexicon=lexicon,
            lm=lm,
            tokens=list(subject_tokens) + list(predicate),
        )
        for tree, fills, pos, _verb in _iter_parses(search):
            if pos != len(search.tokens):
                continue
            if elided_default and len(tree.children) == 2:
                continue
            if not elided_default and subject_tokens and len(tree.children) != 2:
                continue
            plans.append(
                _plan_from_parse(
                    search,
                    mode,
                    subject_tokens,
                    predicate,
                    tree,
                    fills,
                    elided_default,
                    reflexive_forced,
                    discovery,
                )
            )
            discovery += 1

    if not plans:
        words = " ".join(token.raw for token in tokens if token.marker is None)
        raise NoStructureError("no grammar structure fits: %s" % words)

    plans.sort(key=lambda plan: (plan.deviations, plan.discovery_index))
    if max_plans and max_plans > 0:
        plans = plans[:max_plans]
    return plans
