import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chronogram.ingest import (BiblioRecord, MalformedRecord, bundled_fixture_path,
                               bundled_stopwords, filter_corpus, load_records,
                               load_stopwords, normalize_author, normalize_journal,
                               parse_field_tagged, parse_tsv, render_field_tagged)

ONE_BLOCK = """AU GARFIELD E
TI Citation Indexes for Science
SO SCIENCE
PY 1955
ER
EF
"""


def test_parse_empty_input():
    assert parse_field_tagged("") == []
    assert parse_field_tagged("   \n\n") == []


def test_parse_single_block():
    records = parse_field_tagged(ONE_BLOCK)
    assert len(records) == 1
    rec = records[0]
    assert rec.authors == ("GARFIELD E",)
    assert rec.title == "Citation Indexes for Science"
    assert rec.journal == "SCIENCE"
    assert rec.year == 1955
    assert rec.id == "R0001"


def test_parse_unparseable_year_reports_line():
    text = "AU SMITH J\nTI Some title\nSO NATURE\nPY abc\nER\nEF\n"
    with pytest.raises(MalformedRecord) as exc:
        parse_field_tagged(text)
    assert exc.value.line_no == 4


def test_parse_missing_year():
    text = "AU SMITH J\nTI Some title\nSO NATURE\nER\nEF\n"
    with pytest.raises(MalformedRecord, match="no PY"):
        parse_field_tagged(text)


def test_parse_year_must_be_positive():
    text = "AU SMITH J\nTI T t\nSO X\nPY 0\nER\nEF\n"
    with pytest.raises(MalformedRecord, match="invalid year"):
        parse_field_tagged(text)


def test_parse_unterminated_record():
    with pytest.raises(MalformedRecord, match="not terminated"):
        parse_field_tagged("AU SMITH J\nTI A title\nSO X\nPY 1990\nEF\n")
    with pytest.raises(MalformedRecord, match="not terminated"):
        parse_field_tagged("AU SMITH J\nTI A title\nSO X\nPY 1990\n")


def test_parse_missing_ef():
    with pytest.raises(MalformedRecord, match="EF"):
        parse_field_tagged("AU SMITH J\nTI A title\nSO X\nPY 1990\nER\n")


def test_parse_author_continuations():
    text = ("AU Garfield, E.\n   Small, H\n   Price, D\n"
            "TI Networks of scientific papers revisited\nSO SCIENCE\nPY 1965\nER\nEF\n")
    rec = parse_field_tagged(text)[0]
    assert rec.authors == ("GARFIELD E", "SMALL H", "PRICE D")


def test_parse_title_continuation_joined_with_space():
    text = ("AU SMITH J\nTI Citation analysis\n   as a tool\nSO X\nPY 1972\nER\nEF\n")
    rec = parse_field_tagged(text)[0]
    assert rec.title == "Citation analysis as a tool"


def test_parse_unknown_tags_and_their_continuations_ignored():
    text = ("FN Some provenance\nVR 1.0\n"
            "AU SMITH J\nAB An abstract line\n   continued abstract\n"
            "TI Real title\nSO X\nPY 1980\nER\nEF\n")
    rec = parse_field_tagged(text)[0]
    assert rec.title == "Real title"
    assert rec.authors == ("SMITH J",)


def test_parse_ut_ids_and_duplicates():
    base = "AU A B\nTI T u\nSO X\nPY 1990\nUT W123\nER\n"
    assert parse_field_tagged(base + "EF\n")[0].id == "W123"
    with pytest.raises(MalformedRecord, match="duplicate"):
        parse_field_tagged(base + base + "EF\n")


def test_parse_record_needs_author_or_title():
    with pytest.raises(MalformedRecord, match="neither"):
        parse_field_tagged("SO X\nPY 1990\nER\nEF\n")
    # title alone is fine
    assert parse_field_tagged("TI Only title\nSO X\nPY 1990\nER\nEF\n")[0].authors == ()


def test_normalize_author():
    assert normalize_author("Garfield, E.") == "GARFIELD E"
    assert normalize_author("  van  der   Berg,  J. ") == "VAN DER BERG J"
    assert normalize_author("...") == ""


def test_normalize_journal():
    assert normalize_journal("  the   Lancet ") == "THE LANCET"
    assert normalize_journal("") == "(NONE)"
    assert normalize_journal("   ") == "(NONE)"


_NAME = st.text(alphabet="abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789",
                min_size=1, max_size=8)
_AUTHOR = st.lists(_NAME, min_size=1, max_size=3).map(
    lambda parts: normalize_author(" ".join(parts)))
_RECORD_PARTS = st.tuples(
    st.lists(_AUTHOR, min_size=1, max_size=4),
    st.lists(_NAME, min_size=0, max_size=6).map(" ".join),
    st.lists(_NAME, min_size=0, max_size=3).map(lambda p: normalize_journal(" ".join(p))),
    st.integers(min_value=1, max_value=2100),
)


@given(st.lists(_RECORD_PARTS, min_size=0, max_size=8))
@settings(max_examples=50)
def test_render_parse_roundtrip(parts):
    records = [BiblioRecord(f"T{i:04d}", tuple(authors), title, journal, year)
               for i, (authors, title, journal, year) in enumerate(parts)]
    assert parse_field_tagged(render_field_tagged(records)) == records


def _rec(i, year, journal="SCIENCE"):
    return BiblioRecord(f"R{i:04d}", ("SMITH J",), f"title {i}", journal, year)


def test_filter_corpus_excludes_journal_case_insensitively():
    records = [_rec(1, 1960), _rec(2, 1961, "CURRENT CONTENTS"), _rec(3, 1962)]
    corpus = filter_corpus(records, ["Current Contents"], (1950, 1990))
    assert [r.id for r in corpus.records] == ["R0001", "R0003"]
    assert len(corpus.filter_log) == 1
    assert "R0002" in corpus.filter_log[0]


def test_filter_corpus_identity_resorts():
    records = [_rec(2, 1970), _rec(1, 1960), _rec(3, 1960)]
    corpus = filter_corpus(records)
    assert [r.id for r in corpus.records] == ["R0001", "R0003", "R0002"]
    assert corpus.filter_log == ()


def test_filter_corpus_year_range_logs_each_removal():
    records = [_rec(i, 1948 + i) for i in range(1, 13)]  # 1949..1960
    corpus = filter_corpus(records, (), (1950, 1959))
    assert len(corpus.records) == 10
    assert len(corpus.filter_log) == 2
    assert len(corpus.records) + len(corpus.filter_log) == len(records)


def test_filter_corpus_rejects_bad_range_and_duplicate_ids():
    with pytest.raises(ValueError):
        filter_corpus([_rec(1, 1960)], (), (1970, 1960))
    with pytest.raises(ValueError, match="duplicate"):
        filter_corpus([_rec(1, 1960), _rec(1, 1961)])


@given(st.lists(st.tuples(st.integers(1940, 1980),
                          st.sampled_from(["SCIENCE", "NATURE", "CURRENT CONTENTS"])),
                max_size=20))
@settings(max_examples=50)
def test_filter_corpus_size_law(rows):
    records = [BiblioRecord(f"R{i:04d}", ("A B",), "t t", journal, year)
               for i, (year, journal) in enumerate(rows)]
    corpus = filter_corpus(records, ["CURRENT CONTENTS"], (1950, 1970))
    assert len(corpus.records) + len(corpus.filter_log) == len(records)


def test_load_stopwords_basics():
    assert load_stopwords("") == frozenset()
    assert load_stopwords("The\nand\nAND\n") == frozenset({"the", "and"})
    assert load_stopwords("# comment\n\nthe # trailing\n") == frozenset({"the"})


def test_bundled_stopwords_list():
    words = bundled_stopwords()
    assert len(words) == 429
    assert all(w == w.lower() and " " not in w for w in words)
    assert "the" in words and "for" in words


def test_parse_tsv():
    text = ("id\tyear\tjournal\ttitle\tauthors\n"
            "X1\t1990\tNature\tGenome mapping\tSmith, J.; Doe, A\n"
            "\t1991\tScience\tProtein folding\tLee K\n")
    records = parse_tsv(text)
    assert records[0] == BiblioRecord("X1", ("SMITH J", "DOE A"),
                                      "Genome mapping", "NATURE", 1990)
    assert records[1].id == "R0002"
    with pytest.raises(MalformedRecord, match="5 columns"):
        parse_tsv("a\tb\tc\n")
    with pytest.raises(MalformedRecord, match="year"):
        parse_tsv("X1\tnope\tJ\tT t\tA B\n")


def test_load_records_dispatches_on_extension(tmp_path):
    tagged = tmp_path / "corpus.txt"
    tagged.write_text(ONE_BLOCK, encoding="utf-8")
    tsv = tmp_path / "corpus.tsv"
    tsv.write_text("X1\t1990\tJ\tSome title\tA B\n", encoding="utf-8")
    assert load_records(tagged)[0].journal == "SCIENCE"
    assert load_records(tsv)[0].id == "X1"


def test_bundled_fixture_parses():
    records = load_records(bundled_fixture_path())
    assert len(records) == 40
    assert len({r.id for r in records}) == 40
    assert all(1950 <= r.year <= 2009 for r in records)
    assert all(r.authors or r.title for r in records)
