"""Merged-lexicon construction from heterogeneous source lexica.

Three-stage batch pipeline: extract records from a primary source and
expand them through a second one (following cross-reference links to a
fixed point), verify every record against a pluggable oracle, then merge
per (lemma, category) by unifying compatible feature bundles. A
MergeReport tallies every stage.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import LexiconParseError
from .features import AXES, AdverbClass, LexicalCategory
from .lexicon import LexicalEntry, Lexicon, WordForm, _parse_bundle

# Source tags never admitted into the merged lexicon.
DROPPED_CATEGORIES = frozenset({"interjection", "numeral", "proper_name"})

# Extras key holding comma-separated cross-referenced lemmas.
RELATED_KEY = "related"

# Upper bound on cross-reference expansion waves.
EXPANSION_CAP = 10

_INVARIABLE = frozenset(
    {LexicalCategory.adverb, LexicalCategory.conjunction, LexicalCategory.preposition}
)


@dataclass(frozen=True)
class SourceRecord:
    """One entry as read from a source lexicon, category kept verbatim."""

    source_id: str
    lemma: str
    category: str
    forms: tuple = ()
    adverb_class: str | None = None
    reflexive_capable: bool = False
    extras: tuple = ()  # ((key, value), ...)

    def extras_dict(self):
        return dict(self.extras)

    def related_lemmas(self):
        related = self.extras_dict().get(RELATED_KEY, "")
        return [lemma.strip() for lemma in related.split(",") if lemma.strip()]


@dataclass
class SourceCounts:
    extracted_records: int = 0
    extracted_forms: int = 0
    verified_records: int = 0
    verified_forms: int = 0
    rejected_records: int = 0
    rejected_forms: int = 0


@dataclass
class MergeReport:
    sources: dict = field(default_factory=dict)
    dropped_records: int = 0
    expansion_misses: int = 0
    merged_common: int = 0
    merged_unique: int = 0
    conflicts: list = field(default_factory=list)

    def counts_for(self, source_id):
        if source_id not in self.sources:
            self.sources[source_id] = SourceCounts()
        return self.sources[source_id]

    def note_extracted(self, record):
        counts = self.counts_for(record.source_id)
        counts.extracted_records += 1
        counts.extracted_forms += len(record.forms)

    def note_verified(self, record, kept):
        counts = self.counts_for(record.source_id)
        if kept:
            counts.verified_records += 1
            counts.verified_forms += len(record.forms)
        else:
            counts.rejected_records += 1
            counts.rejected_forms += len(record.forms)

    def to_flat_dict(self):
        flat = {}
        for source_id in sorted(self.sources):
            counts = self.sources[source_id]
            flat["%s_extracted_records" % source_id] = counts.extracted_records
            flat["%s_extracted_forms" % source_id] = counts.extracted_forms
            flat["%s_verified_records" % source_id] = counts.verified_records
            flat["%s_verified_forms" % source_id] = counts.verified_forms
            flat["%s_rejected_records" % source_id] = counts.rejected_records
            flat["%s_rejected_forms" % source_id] = counts.rejected_forms
        flat["dropped_records"] = self.dropped_records
        flat["expansion_misses"] = self.expansion_misses
        flat["merged_common"] = self.merged_common
        flat["merged_unique"] = self.merged_unique
        flat["conflicts"] = list(self.conflicts)
        return flat


def load_source_records(path, default_source=None):
    """Read a source lexicon file into SourceRecords.

    Same XML shape as the lexicon format plus a ``source`` attribute on
    the root (or per entry); ``x-`` prefixed entry attributes become
    extras; categories are kept verbatim for later mapping.
    """
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        raise LexiconParseError("unparseable source file %s: %s" % (path, exc))
    except OSError as exc:
        raise LexiconParseError("cannot read source file %s: %s" % (path, exc))
    root = tree.getroot()
    if root.tag != "lexicon":
        raise LexiconParseError("source root must be <lexicon>, got <%s>" % root.tag)
    root_source = root.get("source") or default_source or str(path)
    records = []
    for element in root:
        if element.tag != "entry":
            raise LexiconParseError("unexpected element <%s> in source" % element.tag)
        lemma = element.get("lemma", "").strip()
        if not lemma:
            raise LexiconParseError("source entry without lemma")
        forms = []
        for child in element:
            if child.tag != "form":
                raise LexiconParseError(
                    "unexpected element <%s> under source entry %r" % (child.tag, lemma)
                )
            surface = child.get("surface")
            if not surface:
                raise LexiconParseError("form without surface under source entry %r" % lemma)
            forms.append(WordForm(surface=surface, features=_parse_bundle(child.attrib, None)))
        extras = tuple(
            (key[2:], value)
            for key, value in element.attrib.items()
            if key.startswith("x-")
        )
        records.append(
            SourceRecord(
                source_id=element.get("source", root_source),
                lemma=lemma,
                category=element.get("cat", ""),
                forms=tuple(forms),
                adverb_class=element.get("adverb-class"),
                reflexive_capable=element.get("reflexive", "false").lower() == "true",
                extras=extras,
            )
        )
    return records


def build_expansion_index(records):
    """Index expansion-source records by lemma."""
    index = {}
    for record in records:
        index.setdefault(record.lemma, []).append(record)
    return index


def normalize_category(raw):
    return raw.strip().lower().replace("-", "_").replace(" ", "_")


def map_category(raw):
    """Map a verbatim source tag onto a lexicon category.

    Returns None both for deliberately dropped tags (interjections,
    numerals, proper names) and for unknown ones.
    """
    name = normalize_category(raw)
    if name in DROPPED_CATEGORIES:
        return None
    try:
        category = LexicalCategory(name)
    except ValueError:
        return None
    if category is LexicalCategory.proper_name:
        return None
    return category


def _map_record(record, report):
    category = map_category(record.category)
    if category is None:
        if report is not None:
            report.dropped_records += 1
        return None
    mapped = SourceRecord(
        source_id=record.source_id,
        lemma=record.lemma,
        category=category.value,
        forms=record.forms,
        adverb_class=record.adverb_class,
        reflexive_capable=record.reflexive_capable,
        extras=record.extras,
    )
    if report is not None:
        report.note_extracted(mapped)
    return mapped


def _lookup_expansion(expansion_source, lemma):
    if expansion_source is None:
        return []
    if callable(expansion_source):
        found = expansion_source(lemma)
    else:
        found = expansion_source.get(lemma)
    return list(found) if found else []


def extract_and_map(primary_records, expansion_source, report=None):
    """Map primary records to the common format and expand cross-references.

    Returns (primary set, expansion set). Every lemma surviving the
    category filter is looked up in the expansion source; lemmas its
    records reference through the ``related`` extra are followed
    breadth-first until no new lemma appears (bounded by EXPANSION_CAP
    waves). Lookup misses are counted, never fatal.
    """
    mapped_primary = []
    for record in primary_records:
        mapped = _map_record(record, report)
        if mapped is not None:
            mapped_primary.append(mapped)

    mapped_expansion = []
    visited = set()
    frontier = []
    for record in mapped_primary:
        if record.lemma not in visited:
            visited.add(record.lemma)
            frontier.append(record.lemma)

    for _wave in range(EXPANSION_CAP):
        if not frontier:
            break
        next_frontier = []
        for lemma in frontier:
            found = _lookup_expansion(expansion_source, lemma)
            if not found:
                if report is not None:
                    report.expansion_misses += 1
                continue
            for record in found:
                mapped = _map_record(record, report)
                if mapped is None:
                    continue
                mapped_expansion.append(mapped)
                for related in mapped.related_lemmas():
                    if related not in visited:
                        visited.add(related)
                        next_frontier.append(related)
        frontier = next_frontier

    return mapped_primary, mapped_expansion


class AllowlistOracle:
    """Verification oracle backed by a lemma allowlist file.

    One line per lemma: ``lemma<TAB>cat1,cat2``. Queries are pure.
    """

    def __init__(self, table):
        self._table = {
            lemma: frozenset(categories) for lemma, categories in table.items()
        }

    @classmethod
    def load(cls, path):
        table = {}
        with open(path, "r", encoding="utf-8") as handle:
            for number, raw in enumerate(handle, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                lemma, _, cats = line.partition("\t")
                lemma = lemma.strip()
                if not lemma or not cats.strip():
                    raise LexiconParseError("bad allowlist line", number)
                categories = set()
                for name in cats.split(","):
                    name = normalize_category(name)
                    if not name:
                        continue
                    try:
                        categories.add(LexicalCategory(name))
                    except ValueError:
                        raise LexiconParseError(
                            "unknown category %r in allowlist" % name, number
                        )
                table[lemma] = categories
        return cls(table)

    def contains(self, lemma):
        return lemma in self._table

    def categories(self, lemma):
        return set(self._table.get(lemma, frozenset()))


def verify(records, oracle, report=None):
    """Keep records whose lemma and category the oracle vouches for."""
    kept = []
    for record in records:
        category = map_category(record.category)
        accepted = (
            category is not None
            and oracle.contains(record.lemma)
            and category in oracle.categories(record.lemma)
        )
        if report is not None:
            report.note_verified(record, accepted)
        if accepted:
            kept.append(record)
    return kept


def _bundle_key(features):
    return tuple(getattr(features, axis).value for axis in AXES)


def _form_key(form):
    return (form.surface, _bundle_key(form.features))


def _cluster_forms(forms):
    """Group compatible bundles of one surface, most-supported first.

    Forms are considered in canonical order so the outcome is independent
    of source order. Each cluster carries (merged bundle, support count).
    """
    ordered = sorted(forms, key=_form_key)
    clusters = []
    for form in ordered:
        for index, (bundle, support) in enumerate(clusters):
            try:
                merged = bundle.merged_with(form.features)
            except ValueError:
                continue
            clusters[index] = (merged, support + 1)
            break
        else:
            clusters.append((form.features, 1))
    clusters.sort(key=lambda item: (-item[1], _bundle_key(item[0])))
    return clusters


def _merge_surface(surface, forms, label, conflicts):
    """Resolve one surface's pooled bundles to at most one form."""
    clusters = _cluster_forms(forms)
    if len(clusters) == 1:
        return WordForm(surface=surface, features=clusters[0][0])
    top, runner_up = clusters[0][1], clusters[1][1]
    if top > runner_up:
        conflicts.append(
            "%s: surface %r has %d incompatible readings; kept the majority one"
            % (label, surface, len(clusters))
        )
        return WordForm(surface=surface, features=clusters[0][0])
    conflicts.append(
        "%s: surface %r has %d incompatible readings with no majority; excluded"
        % (label, surface, len(clusters))
    )
    return None


def _pick_adverb_class(records, label, conflicts):
    classes = sorted({r.adverb_class for r in records if r.adverb_class})
    if not classes:
        return None
    if len(classes) > 1:
        conflicts.append(
            "%s: conflicting adverb classes %s; kept %r"
            % (label, ", ".join(classes), classes[0])
        )
    try:
        return AdverbClass(classes[0])
    except ValueError:
        conflicts.append("%s: unknown adverb class %r dropped" % (label, classes[0]))
        return None


def _merge_extras(records, label, conflicts):
    values = {}
    for record in records:
        for key, value in record.extras:
            values.setdefault(key, set()).add(value)
    extras = []
    for key in sorted(values):
        options = sorted(values[key])
        if len(options) > 1:
            conflicts.append(
                "%s: extras key %r has conflicting values %s; kept %r"
                % (label, key, ", ".join(options), options[0])
            )
        extras.append((key, options[0]))
    return tuple(extras)


def _entry_from_records(lemma, category, records, conflicts):
    label = "%s/%s" % (lemma, category.value)
    if category in _INVARIABLE:
        forms = (WordForm(surface=lemma),)
    else:
        by_surface = {}
        for record in records:
            for form in record.forms:
                by_surface.setdefault(form.surface, []).append(form)
        forms = []
        for surface in sorted(by_surface):
            merged = _merge_surface(surface, by_surface[surface], label, conflicts)
            if merged is not None:
                forms.append(merged)
        if not forms:
            # Lemma-only records still yield a usable entry.
            forms = [WordForm(surface=lemma)]
        forms = tuple(sorted(forms, key=_form_key))
    return LexicalEntry(
        lemma=lemma,
        category=category,
        forms=forms,
        adverb_class=_pick_adverb_class(records, label, conflicts),
        reflexive_capable=any(r.reflexive_capable for r in records),
        extras=_merge_extras(records, label, conflicts),
    ).validate()


def _record_to_entry(record):
    category = LexicalCategory(record.category)
    conflicts = []
    return _entry_from_records(record.lemma, category, [record], conflicts)


def unify_entries(a, b):
    """Merge two entries for the same lemma and category.

    Returns the unified entry, or None when any shared surface carries
    irreconcilable feature bundles. Raises ValueError when the entries do
    not describe the same word.
    """
    if a.lemma != b.lemma or a.category is not b.category:
        raise ValueError(
            "cannot unify %r/%s with %r/%s"
            % (a.lemma, a.category.value, b.lemma, b.category.value)
        )
    if a.category in _INVARIABLE:
        forms = (WordForm(surface=a.lemma),)
    else:
        by_surface = {}
        for form in list(a.forms) + list(b.forms):
            by_surface.setdefault(form.surface, []).append(form)
        forms = []
        for surface in sorted(by_surface):
            clusters = _cluster_forms(by_surface[surface])
            if len(clusters) > 1:
                return None
            forms.append(WordForm(surface=surface, features=clusters[0][0]))
        forms = tuple(sorted(forms, key=_form_key))
    values = {}
    for entry in (a, b):
        for key, value in entry.extras:
            values.setdefault(key, set()).add(value)
    extras = tuple((key, sorted(values[key])[0]) for key in sorted(values))
    classes = sorted(
        {entry.adverb_class for entry in (a, b) if entry.adverb_class is not None},
        key=lambda item: item.value,
    )
    return LexicalEntry(
        lemma=a.lemma,
        category=a.category,
        forms=forms,
        adverb_class=classes[0] if classes else None,
        reflexive_capable=a.reflexive_capable or b.reflexive_capable,
        extras=extras,
    ).validate()


def merge(record_sets, report=None):
    """Merge verified record sets into one lexicon.

    Records sharing (lemma, category) anywhere are pooled and unified;
    singletons pass through unchanged. The result does not depend on the
    order of the record sets.
    """
    if report is None:
        report = MergeReport()
    groups = {}
    for records in record_sets:
        for record in records:
            category = map_category(record.category)
            if category is None:
                continue
            groups.setdefault((record.lemma, category), []).append(record)

    entries = []
    for (lemma, category) in sorted(groups, key=lambda key: (key[0], key[1].value)):
        records = groups[(lemma, category)]
        if len(records) == 1:
            report.merged_unique += 1
            entries.append(_record_to_entry(records[0]))
        else:
            report.merged_common += 1
            entries.append(_entry_from_records(lemma, category, records, report.conflicts))
    return Lexicon.from_entries(entries), report


def build_lexicon(primary_path, expansion_path, oracle, report=None):
    """Full pipeline: load, extract/expand, verify, merge."""
    if report is None:
        report = MergeReport()
    primary = load_source_records(primary_path)
    expansion_index = build_expansion_index(load_source_records(expansion_path))
    primary_set, expansion_set = extract_and_map(primary, expansion_index, report)
    verified_primary = verify(primary_set, oracle, report)
    verified_expansion = verify(expansion_set, oracle, report)
    return merge([verified_primary, verified_expansion], report)
