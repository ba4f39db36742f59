"""Year-window segmentation and per-window incidence matrices.

A window's matrix is built by a filtering cascade run to a fixed point:
attributes need at least ``min_occ`` supporting documents, documents need at
least one surviving word or author attribute, and each removal can retrigger
the other rule.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

import numpy as np

from .ingest import BiblioRecord, Corpus, StopwordSet, normalize_author


class YearBeforeOrigin(ValueError):
    """A record year precedes the windowing origin."""


class Kind(IntEnum):
    """Attribute kinds; numeric order doubles as the column sort order."""

    WORD = 0
    AUTHOR = 1
    JOURNAL = 2
    ANCHOR = 3


@dataclass(frozen=True, order=True)
class Attribute:
    """A typed network node, identified by (kind, label) across all windows."""

    kind: Kind
    label: str

    def key(self) -> str:
        return f"{self.kind.name.lower()}:{self.label}"


@dataclass(frozen=True)
class TimeWindow:
    index: int
    start_year: int
    end_year: int
    label: str


class EmptyWindow(Exception):
    """No documents survive filtering; the slice is empty but the run goes on."""

    def __init__(self, window: TimeWindow):
        super().__init__(f"window {window.label}: no documents survive filtering")
        self.window = window


def window_at(index: int, origin: int, length: int) -> TimeWindow:
    start = origin + index * length
    end = start + length - 1
    return TimeWindow(index, start, end, f"{start}-{end}")


def window_of(year: int, origin: int, length: int) -> TimeWindow:
    """The window containing `year` for a partition starting at `origin`."""
    if length < 1:
        raise ValueError(f"window length must be >= 1, got {length}")
    if year < origin:
        raise YearBeforeOrigin(f"year {year} precedes origin {origin}")
    return window_at((year - origin) // length, origin, length)


def windows_for(corpus: Corpus, origin: int, length: int) -> list[TimeWindow]:
    """Consecutive windows from the origin through the last record year.

    Windows that happen to contain no records are included, so downstream
    stages see one slice per period.
    """
    if not corpus.records:
        return []
    last = max(r.year for r in corpus.records)
    count = window_of(last, origin, length).index + 1
    return [window_at(i, origin, length) for i in range(count)]


_PLAIN_TOKEN = re.compile(r"[0-9a-z]+")
_HYPHEN_TOKEN = re.compile(r"[0-9a-z]+(?:-[0-9a-z]+)*")


def tokenize_title(title: str, stopwords: StopwordSet,
                   keep_hyphens: bool = False) -> list[str]:
    """Lowercased alphanumeric tokens with stopwords and 1-char tokens removed."""
    pattern = _HYPHEN_TOKEN if keep_hyphens else _PLAIN_TOKEN
    return [t for t in pattern.findall(title.lower())
            if len(t) >= 2 and t not in stopwords]


def extract_attributes(record: BiblioRecord, stopwords: StopwordSet,
                       keep_hyphens: bool = False) -> Counter:
    """Word attributes with title multiplicity; authors and journal once each."""
    attrs: Counter = Counter(
        Attribute(Kind.WORD, t)
        for t in tokenize_title(record.title, stopwords, keep_hyphens))
    for author in record.authors:
        attrs[Attribute(Kind.AUTHOR, author)] = 1
    attrs[Attribute(Kind.JOURNAL, record.journal)] = 1
    return attrs


@dataclass(frozen=True, eq=False)
class IncidenceMatrix:
    """Documents (rows) by attributes (columns) occurrence counts for one window."""

    window: TimeWindow
    documents: tuple[str, ...]
    attributes: tuple[Attribute, ...]
    counts: tuple[tuple[int, ...], ...]

    def array(self) -> np.ndarray:
        if not self.documents or not self.attributes:
            return np.zeros((len(self.documents), len(self.attributes)))
        return np.array(self.counts, dtype=float)

    def column(self, j: int) -> np.ndarray:
        return np.array([row[j] for row in self.counts], dtype=float)

    def to_tsv(self) -> str:
        """Debug dump: rows = doc ids, columns = kind:label, cells = counts."""
        header = "id\t" + "\t".join(a.key() for a in self.attributes)
        lines = [header]
        for doc, row in zip(self.documents, self.counts):
            lines.append(doc + "\t" + "\t".join(str(c) for c in row))
        return "\n".join(lines) + "\n"


def empty_incidence(window: TimeWindow) -> IncidenceMatrix:
    return IncidenceMatrix(window, (), (), ())


def build_incidence(corpus: Corpus, window: TimeWindow, stopwords: StopwordSet,
                    min_occ: int = 2, anchor: str | None = None, *,
                    binarize: bool = False,
                    keep_hyphens: bool = False) -> IncidenceMatrix:
    """Build the filtered incidence matrix for one window.

    Steps: take the window's records, extract attributes, drop attributes
    with document frequency below `min_occ`, drop documents left without any
    surviving word or author attribute (a journal alone does not retain a
    document), and iterate the two drops to a fixed point.  If `anchor` is
    set, a constant all-ones column for that label is appended afterwards;
    it is never subject to filtering.  Rows are sorted by document id and
    columns by (kind, label).

    Raises EmptyWindow when nothing survives.
    """
    if min_occ < 1:
        raise ValueError(f"min_occ must be >= 1, got {min_occ}")
    docs = sorted((r for r in corpus.records
                   if window.start_year <= r.year <= window.end_year),
                  key=lambda r: r.id)
    bags = {r.id: extract_attributes(r, stopwords, keep_hyphens) for r in docs}
    alive = [r.id for r in docs]
    keep: set[Attribute] = set()
    while True:
        df: Counter = Counter()
        for doc in alive:
            for attr in bags[doc]:
                df[attr] += 1
        keep = {a for a, n in df.items() if n >= min_occ}
        survivors = [doc for doc in alive
                     if any(a.kind in (Kind.WORD, Kind.AUTHOR) and a in keep
                            for a in bags[doc])]
        if survivors == alive:
            break
        alive = survivors
    if not alive:
        raise EmptyWindow(window)

    attrs = sorted(keep)
    if anchor is not None:
        label = normalize_author(anchor)
        if not label:
            raise ValueError("anchor label is empty after normalization")
        attrs.append(Attribute(Kind.ANCHOR, label))

    rows = []
    for doc in alive:
        bag = bags[doc]
        row = []
        for attr in attrs:
            if attr.kind is Kind.ANCHOR:
                n = 1
            else:
                n = bag.get(attr, 0)
            row.append(min(n, 1) if binarize else n)
        rows.append(tuple(row))
    return IncidenceMatrix(window, tuple(alive), tuple(attrs), tuple(rows))
