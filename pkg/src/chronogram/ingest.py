"""Bibliographic ingestion: field-tagged exports, a TSV fallback, stopword
lists, and corpus-level filters.

The field-tagged reader understands the plain-text export dialect in which
every line is either ``XY value`` (two uppercase letters, a space, a value)
or a continuation line (three leading spaces).  Records end with ``ER`` and
the file ends with ``EF``.
"""
from __future__ import annotations

import csv
import io
import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

StopwordSet = frozenset  # lowercase, whitespace-free tokens

#: Tags whose values we keep.  Anything else is skipped, continuations included.
_KNOWN_TAGS = {"AU", "TI", "SO", "PY", "UT", "ER", "EF"}

_TAG_RE = re.compile(r"^([A-Z][A-Z0-9]) (.*)$|^([A-Z][A-Z0-9])\s*$")
_WS_RE = re.compile(r"\s+")


class MalformedRecord(ValueError):
    """A record block (or the file framing) could not be parsed."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class BiblioRecord:
    """One publication: a row of the eventual document/attribute matrices."""

    id: str
    authors: tuple[str, ...]
    title: str
    journal: str
    year: int


@dataclass(frozen=True)
class Corpus:
    """Validated records plus provenance: where they came from and what was
    filtered out on the way in."""

    records: tuple[BiblioRecord, ...]
    source: str = ""
    filter_log: tuple[str, ...] = ()


def normalize_author(name: str) -> str:
    """Canonical author form: uppercase, periods/commas dropped, single spaces.

    ``"Garfield, E."`` and ``"GARFIELD E"`` collapse to the same node so that
    name-string matching does not split one person into several.
    """
    cleaned = name.replace(".", " ").replace(",", " ").replace('"', " ")
    return _WS_RE.sub(" ", cleaned).strip().upper()


def normalize_journal(name: str) -> str:
    """Uppercase, whitespace-collapsed journal name; empty becomes ``(NONE)``."""
    cleaned = _WS_RE.sub(" ", name.replace('"', " ")).strip().upper()
    return cleaned if cleaned else "(NONE)"


def _normalize_space(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


class _RecordBuilder:
    """Accumulates tag values for one ``ER``-terminated block."""

    def __init__(self, start_line: int):
        self.start_line = start_line
        self.authors: list[str] = []
        self.title_parts: list[str] = []
        self.journal_parts: list[str] = []
        self.year_parts: list[str] = []
        self.year_line = start_line
        self.ut: str | None = None

    def empty(self) -> bool:
        return not (self.authors or self.title_parts or self.journal_parts
                    or self.year_parts or self.ut)

    def add(self, tag: str, value: str, line_no: int) -> None:
        if tag == "AU":
            self.authors.append(value)
        elif tag == "TI":
            self.title_parts.append(value)
        elif tag == "SO":
            self.journal_parts.append(value)
        elif tag == "PY":
            if not self.year_parts:
                self.year_line = line_no
            self.year_parts.append(value)
        elif tag == "UT":
            self.ut = value.strip()

    def finish(self, seq: int, er_line: int) -> BiblioRecord:
        if not self.year_parts:
            raise MalformedRecord(er_line, "record has no PY (year) tag")
        year_text = " ".join(self.year_parts).strip()
        try:
            year = int(year_text)
        except ValueError:
            raise MalformedRecord(
                self.year_line, f"unparseable year {year_text!r}") from None
        if year <= 0:
            raise MalformedRecord(self.year_line, f"invalid year {year}")
        authors = tuple(a for a in (normalize_author(a) for a in self.authors) if a)
        title = _normalize_space(" ".join(self.title_parts))
        if not authors and not title:
            raise MalformedRecord(er_line, "record has neither authors nor title")
        return BiblioRecord(
            id=self.ut if self.ut else f"R{seq:04d}",
            authors=authors,
            title=title,
            journal=normalize_journal(" ".join(self.journal_parts)),
            year=year,
        )


def parse_field_tagged(text: str) -> list[BiblioRecord]:
    """Parse a field-tagged export into records.

    Raises MalformedRecord for a missing/unparseable year, an unterminated
    record, a duplicate id, or (file level) a missing ``EF`` marker.
    """
    if not text.strip():
        return []

    records: list[BiblioRecord] = []
    seen_ids: set[str] = set()
    builder: _RecordBuilder | None = None
    current_tag: str | None = None
    saw_ef = False
    line_no = 0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        if saw_ef:
            break  # trailing content after EF is ignored
        if not raw.strip():
            continue
        if raw.startswith("   ") and raw[3:].strip():
            # continuation of the previous tag
            if builder is None or current_tag is None:
                continue
            value = raw[3:].strip()
            if current_tag == "AU":
                builder.add("AU", value, line_no)
            elif current_tag in _KNOWN_TAGS:
                builder.add(current_tag, value, line_no)
            continue
        m = _TAG_RE.match(raw)
        if not m:
            continue  # not a tag line and not a continuation: ignore
        tag = m.group(1) or m.group(3)
        value = (m.group(2) or "").strip()
        if tag == "EF":
            if builder is not None and not builder.empty():
                raise MalformedRecord(line_no, "record not terminated by ER before EF")
            saw_ef = True
            continue
        if tag == "ER":
            if builder is None or builder.empty():
                builder = None
                current_tag = None
                continue
            record = builder.finish(len(records) + 1, line_no)
            if record.id in seen_ids:
                raise MalformedRecord(line_no, f"duplicate record id {record.id!r}")
            seen_ids.add(record.id)
            records.append(record)
            builder = None
            current_tag = None
            continue
        if tag not in _KNOWN_TAGS:
            current_tag = tag  # swallow its continuations too
            continue
        if builder is None:
            builder = _RecordBuilder(line_no)
        builder.add(tag, value, line_no)
        current_tag = tag

    if builder is not None and not builder.empty():
        raise MalformedRecord(line_no, "last record not terminated by ER")
    if not saw_ef:
        raise MalformedRecord(line_no, "file not terminated by EF")
    return records


def render_field_tagged(records: Iterable[BiblioRecord]) -> str:
    """Canonical inverse of parse_field_tagged over normalized records."""
    out: list[str] = []
    for rec in records:
        for i, author in enumerate(rec.authors):
            out.append(f"AU {author}" if i == 0 else f"   {author}")
        if rec.title:
            out.append(f"TI {rec.title}")
        out.append(f"SO {rec.journal}")
        out.append(f"PY {rec.year}")
        out.append(f"UT {rec.id}")
        out.append("ER")
    out.append("EF")
    return "\n".join(out) + "\n"


def parse_tsv(text: str) -> list[BiblioRecord]:
    """Minimal TSV fallback: id, year, journal, title, ;-separated authors."""
    records: list[BiblioRecord] = []
    seen_ids: set[str] = set()
    reader = csv.reader(io.StringIO(text), delimiter="\t")
    for line_no, row in enumerate(reader, start=1):
        if not row or not any(cell.strip() for cell in row):
            continue
        if line_no == 1 and row[0].strip().lower() == "id":
            continue
        if len(row) < 5:
            raise MalformedRecord(line_no, f"expected 5 columns, got {len(row)}")
        rec_id, year_text, journal, title, authors_text = (c.strip() for c in row[:5])
        try:
            year = int(year_text)
        except ValueError:
            raise MalformedRecord(line_no, f"unparseable year {year_text!r}") from None
        if year <= 0:
            raise MalformedRecord(line_no, f"invalid year {year}")
        authors = tuple(a for a in (normalize_author(a) for a in authors_text.split(";")) if a)
        title = _normalize_space(title)
        if not authors and not title:
            raise MalformedRecord(line_no, "record has neither authors nor title")
        if not rec_id:
            rec_id = f"R{len(records) + 1:04d}"
        if rec_id in seen_ids:
            raise MalformedRecord(line_no, f"duplicate record id {rec_id!r}")
        seen_ids.add(rec_id)
        records.append(BiblioRecord(rec_id, authors, title,
                                    normalize_journal(journal), year))
    return records


def load_records(path: str | Path) -> list[BiblioRecord]:
    """Read a corpus file, dispatching on extension (.tsv vs field-tagged)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".tsv":
        return parse_tsv(text)
    return parse_field_tagged(text)


def load_stopwords(text: str) -> StopwordSet:
    """One token per line; blank lines and ``#`` comments allowed."""
    words = set()
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words.add(line.split()[0].lower())
    return frozenset(words)


def bundled_stopwords() -> StopwordSet:
    """The stopword list shipped with the package (429 entries)."""
    text = resources.files("chronogram.data").joinpath("stopwords.txt").read_text("utf-8")
    return load_stopwords(text)


def bundled_fixture_path() -> Path:
    """Path of the bundled 40-record synthetic corpus."""
    return Path(str(resources.files("chronogram.data").joinpath("garfield_synthetic.txt")))


def filter_corpus(records: Sequence[BiblioRecord],
                  excluded_journals: Iterable[str] = (),
                  year_range: tuple[int, int] | None = None,
                  source: str = "") -> Corpus:
    """Drop records from excluded journals or outside the year range.

    Journal matching is case-insensitive and exact.  Every removal is logged
    with its reason, so len(records) == len(kept) + len(filter_log).
    """
    excluded = {normalize_journal(j) for j in excluded_journals}
    lo, hi = year_range if year_range is not None else (None, None)
    if lo is not None and hi is not None and lo > hi:
        raise ValueError(f"invalid year range {lo}-{hi}")

    kept: list[BiblioRecord] = []
    removals: list[str] = []
    for rec in records:
        if rec.journal in excluded:
            removals.append(f"{rec.id}: journal excluded ({rec.journal})")
        elif lo is not None and hi is not None and not lo <= rec.year <= hi:
            removals.append(f"{rec.id}: year {rec.year} outside {lo}-{hi}")
        else:
            kept.append(rec)

    ids = [r.id for r in kept]
    if len(ids) != len(set(ids)):
        dup = sorted({i for i in ids if ids.count(i) > 1})[0]
        raise ValueError(f"duplicate record id {dup!r} in corpus")
    kept.sort(key=lambda r: (r.year, r.id))
    for entry in removals:
        log.debug("filtered %s", entry)
    return Corpus(records=tuple(kept), source=source, filter_log=tuple(removals))
