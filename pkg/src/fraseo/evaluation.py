"""Evaluation toolkit: exact-match scoring and annotator agreement.

Two halves: a corpus harness that scores a generator by exact target
match, and nominal-data reliability measures (coincidence matrices,
Krippendorff's alpha, accuracy, pairwise breakdowns) over annotation
records.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import EvaluationError

ERROR_TYPES = ("a", "b", "c", "d", "e", "f")
RATING_RANGE = range(0, 6)

NO_CONSENSUS = "no-consensus"


@dataclass(frozen=True)
class CorpusItem:
    target: str
    keywords: tuple

    def validate(self):
        if not self.target:
            raise ValueError("corpus item without target")
        if not self.keywords:
            raise ValueError("corpus item without keywords")
        return self


def load_corpus(path):
    """Read a TSV evaluation corpus: ``target<TAB>kw1,kw2,...`` per line."""
    items = []
    with open(path, "r", encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            target, sep, keywords = line.partition("\t")
            if not sep:
                raise EvaluationError("line %d: missing tab separator" % number)
            target = target.strip()
            words = tuple(word.strip() for word in keywords.split(",") if word.strip())
            if not target or not words:
                raise EvaluationError("line %d: empty target or keyword list" % number)
            items.append(CorpusItem(target=target, keywords=words))
    return items


def _normalize(text):
    return " ".join(text.split())


def _candidate_texts(result):
    """Accept either a generation result object or a plain iterable of texts."""
    if hasattr(result, "echo") and hasattr(result, "texts"):
        return ([] if result.echo else list(result.texts)), bool(result.echo)
    if isinstance(result, str):
        return [result], False
    return list(result), False


@dataclass
class ExactMatchReport:
    matched: int
    total: int
    rate: float
    outcomes: list

    def to_dict(self):
        return {
            "matched": self.matched,
            "total": self.total,
            "rate": self.rate,
            "outcomes": list(self.outcomes),
        }


def exact_match_rate(items, generator):
    """Score a generator on a corpus by exact target match.

    ``generator`` maps a keyword list to candidate sentences (any object
    with ``texts``/``echo``, a string, or an iterable of strings). An
    item counts as matched when any candidate equals the target after
    whitespace normalization. Echoes and generator errors count as
    unmatched with a recorded outcome.
    """
    outcomes = []
    matched = 0
    total = 0
    for item in items:
        total += 1
        outcome = {"target": item.target, "keywords": list(item.keywords)}
        try:
            texts, echoed = _candidate_texts(generator(list(item.keywords)))
        except Exception as exc:  # defensive: errors must not sink the run
            outcome["status"] = "error"
            outcome["detail"] = str(exc)
            outcomes.append(outcome)
            continue
        if echoed:
            outcome["status"] = "echo"
            outcomes.append(outcome)
            continue
        want = _normalize(item.target)
        hit = None
        for index, text in enumerate(texts):
            if _normalize(text) == want:
                hit = index
                break
        if hit is None:
            outcome["status"] = "unmatched"
            outcome["candidates"] = len(texts)
        else:
            outcome["status"] = "matched"
            outcome["candidate_index"] = hit
            matched += 1
        outcomes.append(outcome)
    rate = matched / total if total else 0.0
    return ExactMatchReport(matched=matched, total=total, rate=rate, outcomes=outcomes)


@dataclass(frozen=True)
class AnnotationRecord:
    sentence_id: str
    annotator_id: str
    error_type: str
    rating: int
    best_generation: int | None = None
    suggestion: str | None = None

    def validate(self):
        if self.error_type not in ERROR_TYPES:
            raise ValueError("error type must be one of %s" % (ERROR_TYPES,))
        if self.rating not in RATING_RANGE:
            raise ValueError("rating must be an integer in 0..5")
        return self


def load_annotations(path):
    """Read annotation records from XML.

    Format: ``<annotations>`` holding one ``<annotation sentence=..
    annotator=..>`` per judgement with ``<error>``, ``<rating>`` and
    optional ``<best>``/``<suggestion>`` children.
    """
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        raise EvaluationError("unparseable annotation file %s: %s" % (path, exc))
    except OSError as exc:
        raise EvaluationError("cannot read annotation file %s: %s" % (path, exc))
    root = tree.getroot()
    if root.tag != "annotations":
        raise EvaluationError("annotation root must be <annotations>, got <%s>" % root.tag)
    records = []
    for element in root:
        if element.tag != "annotation":
            raise EvaluationError("unexpected element <%s>" % element.tag)
        sentence = element.get("sentence")
        annotator = element.get("annotator")
        if not sentence or not annotator:
            raise EvaluationError("annotation needs sentence and annotator attributes")
        error = element.findtext("error", "").strip()
        rating_text = element.findtext("rating", "").strip()
        best_text = element.findtext("best")
        suggestion = element.findtext("suggestion")
        try:
            rating = int(rating_text)
        except ValueError:
            raise EvaluationError(
                "bad rating %r for sentence %s annotator %s" % (rating_text, sentence, annotator)
            )
        best = None
        if best_text is not None and best_text.strip():
            try:
                best = int(best_text.strip())
            except ValueError:
                raise EvaluationError("bad best index %r" % best_text)
        record = AnnotationRecord(
            sentence_id=sentence,
            annotator_id=annotator,
            error_type=error,
            rating=rating,
            best_generation=best,
            suggestion=suggestion.strip() if suggestion else None,
        )
        try:
            record.validate()
        except ValueError as exc:
            raise EvaluationError(
                "invalid annotation for sentence %s annotator %s: %s"
                % (sentence, annotator, exc)
            )
        records.append(record)
    return records


@dataclass
class ReliabilityMatrix:
    """Observers x units table of nominal labels; None marks missing data."""

    observers: tuple
    units: tuple
    values: dict  # (observer, unit) -> label

    @classmethod
    def from_rows(cls, rows, observers=None, units=None):
        if observers is None:
            observers = tuple("obs%d" % index for index in range(1, len(rows) + 1))
        width = max((len(row) for row in rows), default=0)
        if units is None:
            units = tuple("u%d" % index for index in range(1, width + 1))
        values = {}
        for observer, row in zip(observers, rows):
            for unit, label in zip(units, row):
                if label is not None:
                    values[(observer, unit)] = label
        return cls(observers=tuple(observers), units=tuple(units), values=values)

    @classmethod
    def from_annotations(cls, records, label="error_type"):
        observers = tuple(sorted({record.annotator_id for record in records}))
        units = tuple(sorted({record.sentence_id for record in records}))
        values = {}
        for record in records:
            values[(record.annotator_id, record.sentence_id)] = getattr(record, label)
        return cls(observers=observers, units=units, values=values)

    def label(self, observer, unit):
        return self.values.get((observer, unit))

    def unit_labels(self, unit):
        labels = []
        for observer in self.observers:
            value = self.label(observer, unit)
            if value is not None:
                labels.append(value)
        return labels

    def restrict(self, observers):
        observers = tuple(observers)
        values = {
            (observer, unit): label
            for (observer, unit), label in self.values.items()
            if observer in observers
        }
        return ReliabilityMatrix(observers=observers, units=self.units, values=values)


@dataclass
class CoincidenceMatrix:
    labels: tuple
    o: dict = field(default_factory=dict)  # (c, k) -> pairable count
    n_c: dict = field(default_factory=dict)
    n: float = 0.0

    def cell(self, c, k):
        return self.o.get((c, k), 0.0)

    @property
    def is_degenerate(self):
        return self.expected_disagreement() == 0.0

    def observed_disagreement(self):
        if self.n <= 0:
            return 0.0
        off_diagonal = sum(
            value for (c, k), value in self.o.items() if c != k
        )
        return off_diagonal / self.n

    def expected_disagreement(self):
        if self.n <= 1:
            return 0.0
        total = 0.0
        for c in self.labels:
            for k in self.labels:
                if c != k:
                    total += self.n_c.get(c, 0.0) * self.n_c.get(k, 0.0)
        return total / (self.n * (self.n - 1.0))


def coincidence_matrix(matrix):
    """Pairable-value coincidence counts from a reliability matrix.

    Every ordered pair of labels within a unit contributes 1/(m_u - 1),
    m_u being the number of labels the unit received; units with fewer
    than two labels are excluded.
    """
    cells = {}
    labels = set()
    n = 0.0
    for unit in matrix.units:
        unit_labels = matrix.unit_labels(unit)
        m_u = len(unit_labels)
        if m_u < 2:
            continue
        weight = 1.0 / (m_u - 1)
        for i, c in enumerate(unit_labels):
            labels.add(c)
            for j, k in enumerate(unit_labels):
                if i == j:
                    continue
                cells[(c, k)] = cells.get((c, k), 0.0) + weight
                n += weight
    ordered = tuple(sorted(labels))
    n_c = {}
    for c in ordered:
        n_c[c] = sum(cells.get((c, k), 0.0) for k in ordered)
    return CoincidenceMatrix(labels=ordered, o=cells, n_c=n_c, n=n)


def krippendorff_alpha(matrix):
    """Nominal-data alpha: 1 - observed/expected disagreement.

    ``matrix`` may be a CoincidenceMatrix or a ReliabilityMatrix. When
    expected disagreement is zero (all labels identical, or nothing
    pairable) alpha is defined as 1.0; check ``is_degenerate`` on the
    coincidence matrix to detect that case.
    """
    if isinstance(matrix, ReliabilityMatrix):
        matrix = coincidence_matrix(matrix)
    expected = matrix.expected_disagreement()
    if expected == 0.0:
        return 1.0
    return 1.0 - matrix.observed_disagreement() / expected


def accuracy(matrix):
    """Share of pairable agreement: the normalized diagonal mass."""
    if isinstance(matrix, ReliabilityMatrix):
        matrix = coincidence_matrix(matrix)
    if matrix.n <= 0:
        return 1.0
    diagonal = sum(matrix.cell(c, c) for c in matrix.labels)
    return diagonal / matrix.n


def pairwise_agreement(matrix, measure="alpha"):
    """Measure over every two-observer restriction, upper triangular.

    Returns {(observer_i, observer_j): value} for i before j in the
    matrix's observer order.
    """
    if measure == "alpha":
        func = krippendorff_alpha
    elif measure == "accuracy":
        func = accuracy
    else:
        raise ValueError("measure must be 'alpha' or 'accuracy'")
    out = {}
    observers = matrix.observers
    for i in range(len(observers)):
        for j in range(i + 1, len(observers)):
            pair = (observers[i], observers[j])
            out[pair] = func(matrix.restrict(pair))
    return out


def consensus(records):
    """Aggregate one sentence's annotations.

    Strict majority decides the error type and the best generation
    (``no-consensus``/None otherwise); the rating is the arithmetic mean.
    """
    by_sentence = {}
    for record in records:
        by_sentence.setdefault(record.sentence_id, []).append(record)
    out = {}
    for sentence_id in sorted(by_sentence):
        group = by_sentence[sentence_id]
        out[sentence_id] = {
            "error_type": _strict_majority([r.error_type for r in group], NO_CONSENSUS),
            "rating": sum(r.rating for r in group) / len(group),
            "best_generation": _strict_majority(
                [r.best_generation for r in group if r.best_generation is not None], None
            ),
        }
    return out


def _strict_majority(values, fallback):
    if not values:
        return fallback
    counts = {}
    for value in values:
        counts[value] = counts.get(value, 0) + 1
    best, best_count = None, 0
    for value, count in sorted(counts.items(), key=lambda item: str(item[0])):
        if count > best_count:
            best, best_count = value, count
    if best_count * 2 > len(values):
        return best
    return fallback
