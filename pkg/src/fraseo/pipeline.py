"""End-to-end keyword-to-sentence driver and bundled resource loading."""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass

from .errors import EmptyInputError, NoStructureError, NoVerbError
from .grammar import load_grammar
from .lexicon import load_lexicon
from .lm import NGramModel
from .planner import plan_structures, tokenize_and_resolve
from .realizer import load_polarity_pairs, realize

_BUNDLED_LEXICON = "sample_lexicon.xml"
_BUNDLED_GRAMMAR = "spanish.grammar"
_BUNDLED_LM = "toy.lm"


@dataclass(frozen=True)
class Resources:
    lexicon: object
    grammar: object
    lm: object
    polarity_pairs: dict


@dataclass(frozen=True)
class GenerationResult:
    input_words: tuple
    mode: object  # SentenceMode, None when echoing
    candidates: tuple  # RealizedSentence, best first, deduplicated
    echo: bool

    @property
    def echo_text(self):
        return " ".join(self.input_words)

    @property
    def texts(self):
        return [candidate.text for candidate in self.candidates]


def _bundled(name):
    return importlib.resources.files("fraseo.data") / name


def load_resources(lexicon_path=None, grammar_path=None, lm_path=None):
    """Load generation resources, falling back to the bundled ones."""
    if lexicon_path is None:
        with importlib.resources.as_file(_bundled(_BUNDLED_LEXICON)) as path:
            lexicon = load_lexicon(path)
    else:
        lexicon = load_lexicon(lexicon_path)
    if grammar_path is None:
        with importlib.resources.as_file(_bundled(_BUNDLED_GRAMMAR)) as path:
            grammar = load_grammar(path)
    else:
        grammar = load_grammar(grammar_path)
    if lm_path is None:
        with importlib.resources.as_file(_bundled(_BUNDLED_LM)) as path:
            lm = NGramModel.load(path)
    else:
        lm = NGramModel.load(lm_path)
    return Resources(
        lexicon=lexicon,
        grammar=grammar,
        lm=lm,
        polarity_pairs=load_polarity_pairs(),
    )


def load_default_resources():
    return load_resources()


def generate(words, resources, max_candidates=0):
    """Generate ranked sentences for a keyword list.

    Inputs the pipeline cannot handle (no content words, no verb, no
    fitting structure) produce an echo result carrying the original words
    instead of sentences. ``max_candidates`` caps the number of distinct
    sentences returned; 0 means no cap.
    """
    words = tuple(words)
    try:
        tokens = tokenize_and_resolve(words, resources.lexicon)
        plans = plan_structures(tokens, resources.grammar, resources.lexicon, resources.lm)
    except (EmptyInputError, NoVerbError, NoStructureError):
        return GenerationResult(input_words=words, mode=None, candidates=(), echo=True)

    candidates = []
    seen = set()
    for plan in plans:
        sentence = realize(plan, resources.lexicon, resources.lm, resources.polarity_pairs)
        if sentence.text in seen:
            continue
        seen.add(sentence.text)
        candidates.append(sentence)
        if max_candidates and len(candidates) >= max_candidates:
            break
    return GenerationResult(
        input_words=words,
        mode=plans[0].mode,
        candidates=tuple(candidates),
        echo=False,
    )
