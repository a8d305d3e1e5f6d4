import pytest
from hypothesis import given, settings, strategies as st

from tweetsurv.queryproto import (
    HEALTH_PROTOCOL,
    Query,
    QueryParseError,
    Term,
    default_protocol,
    matches,
    parse_query,
    render,
)


def words(clause):
    return [(t.text, t.negated, t.quoted) for t in clause]


def test_two_clause_example():
    q = parse_query("demam OR panas -cuaca")
    assert [words(c) for c in q.clauses] == [
        [("demam", False, False)],
        [("panas", False, False), ("cuaca", True, False)],
    ]


def test_single_term():
    q = parse_query("a")
    assert q.clauses == ((Term("a"),),)


def test_protocol_structure():
    q = default_protocol()
    assert len(q.clauses) == 14
    assert q == parse_query(HEALTH_PROTOCOL)
    assert words(q.clauses[5]) == [("panas", False, False), ("cuaca", True, False)]
    assert words(q.clauses[13]) == [(":'(", False, True)]
    # the duplicated "badan" is kept as two clauses
    assert q.clauses[9] == q.clauses[11] == (Term("badan"),)
    singles = [c[0].text for i, c in enumerate(q.clauses) if i not in (5, 13)]
    assert singles == ["rumah", "sakit", "rawat", "inap", "demam", "berdarah", "pendarahan",
                       "trombosit", "badan", "muntah", "badan", "tua"]


def test_protocol_round_trip():
    q = default_protocol()
    assert parse_query(render(q)) == q


@pytest.mark.parametrize(
    "text, offset",
    [
        ("-cuaca", 0),
        ("a OR -b", 5),
        ("OR a", 0),
        ("a OR", 2),
        ("a OR OR b", 5),
        ("a 'unclosed", 2),
        ('"x y', 0),
        ("", 0),
        ("   ", 0),
    ],
)
def test_parse_errors(text, offset):
    with pytest.raises(QueryParseError) as info:
        parse_query(text)
    assert info.value.offset == offset


def test_error_offset_is_in_bytes():
    with pytest.raises(QueryParseError) as info:
        parse_query("démam 'x")
    assert info.value.offset == len("démam ".encode("utf-8"))


def test_lowercase_or_is_a_term():
    q = parse_query("a or b")
    assert len(q.clauses) == 1 and [t.text for t in q.clauses[0]] == ["a", "or", "b"]


def test_quoted_phrase_with_spaces():
    q = parse_query('"rumah sakit" OR demam')
    assert q.clauses[0] == (Term("rumah sakit", quoted=True),)
    assert matches(q, "Dibawa ke RUMAH SAKIT tadi")
    assert not matches(q, "rumah yang sakit")


P = default_protocol()

# 20 hand-labelled texts against the built-in protocol
CASES = [
    ("Aku demam tinggi sejak kemarin", True),
    ("panas banget cuaca hari ini", False),
    ("panas banget hari ini", True),
    ("sedih banget :'(", True),
    ("sedih banget :(", False),
    ("Masuk RUMAH sakit lagi", True),
    ("harus rawat inap dua hari", True),
    ("DBD berdarah, trombosit turun", True),
    ("pendarahan hebat", True),
    ("badan remuk semua", True),
    ("muntah terus dari pagi", True),
    ("sudah tua ternyata", True),
    ("makan siang enak sekali", False),
    ("besok libur ke pantai", False),
    ("rumahnya jauh", False),
    ("#demam di kota", True),
    ("demam-berdarah lagi", True),
    ("suhu panas, cuaca cerah", False),
    ("i love this song", False),
    ("Sakit!!!", True),
]


@pytest.mark.parametrize("text, expected", CASES)
def test_protocol_matching(text, expected):
    assert matches(P, text) is expected


def test_negated_word_blocks_only_its_clause():
    q = parse_query("panas -cuaca OR cuaca")
    assert matches(q, "panas cuaca")  # second clause fires


# -- generated ASTs -----------------------------------------------------------

_word_chars = st.sampled_from(list("abcdemnrstuAZ019éü:;!?.,()#@_-'\"/"))


def _valid_term(text, negated, quoted):
    try:
        return Term(text, negated, quoted)
    except ValueError:
        return None


unquoted = st.builds(
    _valid_term,
    st.text(_word_chars, min_size=1, max_size=8),
    st.booleans(),
    st.just(False),
).filter(lambda t: t is not None)

quoted = st.builds(
    _valid_term,
    st.text(st.sampled_from(list("abc :'(\")x-OR")), min_size=1, max_size=8),
    st.booleans(),
    st.just(True),
).filter(lambda t: t is not None)

terms = st.one_of(unquoted, quoted)
clauses = st.lists(terms, min_size=1, max_size=4).filter(lambda c: any(not t.negated for t in c))
queries = st.builds(Query, st.lists(clauses, min_size=1, max_size=5).map(tuple))


@settings(max_examples=500, deadline=None)
@given(queries)
def test_render_parse_round_trip(q):
    assert parse_query(render(q)) == q


@given(queries, clauses, st.text(max_size=40))
def test_adding_clause_is_monotone(q, extra, text):
    if matches(q, text):
        bigger = Query(q.clauses + (tuple(extra),))
        assert matches(bigger, text)


ascii_words = st.text(st.sampled_from(list("abcdeinrstu")), min_size=1, max_size=6)


@given(ascii_words, st.lists(ascii_words, max_size=6))
def test_negated_word_never_matches_text_containing_it(w, others):
    q = Query(((Term("x" + w), Term(w, negated=True)),))
    text = " ".join(others + ["x" + w, w.upper()])
    assert not matches(q, text)


@given(queries, st.text(st.sampled_from(list("abcdeinrstuABC :'()!,.0")), max_size=40))
def test_matching_is_case_invariant(q, text):
    assert matches(q, text) == matches(q, text.upper()) == matches(q, text.lower())
