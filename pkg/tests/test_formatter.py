import datetime as dt

from hypothesis import given, settings
from hypothesis import strategies as st

from dslake.lang.ast import (
    DateLit,
    DurationLit,
    GeoBox,
    IntLit,
    Offset,
    OutItem,
    QueryAst,
    Ref,
    SelectStmt,
    SimulateStmt,
    TimeRange,
)
from dslake.lang.formatter import format_query
from dslake.lang.parser import parse
from dslake.lang.tokens import KEYWORDS

# --- a random AST generator -------------------------------------------------

words = st.from_regex(r"[a-z][a-z0-9_]{0,6}", fullmatch=True).filter(
    lambda w: w not in KEYWORDS
)
idents = st.one_of(
    words,
    st.tuples(words, words).map(lambda ws: "-".join(ws)),
    st.from_regex(r"[A-Z][A-Za-z0-9]{0,6}", fullmatch=True),
)
values = st.one_of(
    words,
    st.integers(0, 10**6).map(str),
    st.integers(0, 400).map(lambda h: f"{h}h"),
)
coords = st.integers(-89_0000, 89_0000).map(lambda n: n / 10000)
lons = st.integers(-179_0000, 179_0000).map(lambda n: n / 10000)
dates = st.dates(min_value=dt.date(1980, 1, 1), max_value=dt.date(2099, 12, 28))
durations = st.integers(0, 500).map(DurationLit)

offsettable = st.one_of(idents.map(Ref), dates.map(DateLit))
exprs = st.one_of(
    offsettable,
    st.integers(0, 10**6).map(IntLit),
    durations,
    st.builds(
        Offset, base=offsettable, sign=st.sampled_from((-1, 1)), delta=durations
    ),
    st.builds(
        Offset,
        base=st.builds(
            Offset, base=offsettable, sign=st.sampled_from((-1, 1)), delta=durations
        ),
        sign=st.sampled_from((-1, 1)),
        delta=durations,
    ),
)

out_items = st.builds(
    OutItem,
    name=idents,
    indices=st.lists(st.one_of(idents.map(Ref), st.integers(0, 999).map(IntLit)),
                     max_size=3).map(tuple),
)
out_lists = st.lists(out_items, max_size=3).map(tuple)

selects = st.builds(
    SelectStmt,
    object_type=idents,
    filters=st.lists(st.tuples(words, values), max_size=3).map(tuple),
    out=out_lists,
)
simulates = st.builds(
    SimulateStmt,
    package=idents,
    options=st.lists(st.tuples(words, values), max_size=2).map(tuple),
    in_bindings=st.lists(st.tuples(idents, exprs), max_size=3).map(tuple),
    out=out_lists,
)

geo_boxes = st.builds(
    lambda a, b, c, d: GeoBox(min(a, c), min(b, d), max(a, c), max(b, d)),
    coords, lons, coords, lons,
)
time_ranges = st.builds(
    lambda a, b: TimeRange(min(a, b), max(a, b)), dates, dates
)

asts = st.builds(
    QueryAst,
    area=st.none() | geo_boxes,
    time=st.none() | time_ranges,
    statements=st.lists(st.one_of(selects, simulates), min_size=1, max_size=4).map(tuple),
)


# --- tests -------------------------------------------------------------------

def test_fig5_round_trip(fig5_script):
    ast = parse(fig5_script)
    assert parse(format_query(ast)) == ast


def test_no_headers_starts_with_statement():
    text = format_query(QueryAst(statements=(SelectStmt(object_type="x"),)))
    assert text.startswith("select x")


def test_canonical_layout():
    ast = parse(
        "area 1.0,2.0 - 3.0,4.0\nselect foo a b out(p)\nsimulate with Q in(t: R - 1h)"
    )
    assert format_query(ast) == (
        "area 1.0,2.0 - 3.0,4.0\n"
        "\n"
        "select foo\n"
        "  a b\n"
        "  out(p)\n"
        "\n"
        "simulate\n"
        "  with Q\n"
        "  in(t: R - 1h)\n"
    )


def test_empty_ast_formats_empty():
    assert format_query(QueryAst()) == ""


@settings(max_examples=100)
@given(asts)
def test_round_trip_random_asts(ast):
    assert parse(format_query(ast)) == ast


@settings(max_examples=100)
@given(asts)
def test_format_idempotent(ast):
    once = format_query(ast)
    assert format_query(parse(once)) == once
