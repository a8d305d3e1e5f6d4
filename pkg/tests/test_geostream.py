import csv
import json
from collections import Counter
from datetime import date, datetime, timedelta, timezone

import pytest
from hypothesis import given, strategies as st

from tweetsurv import synth
from tweetsurv.cart import Node, SplitRule, Tree
from tweetsurv.corpus import TweetRecord
from tweetsurv.geostream import (
    INDONESIA,
    BBox,
    ClassifiedHit,
    GridSpec,
    InsufficientHitsError,
    ReplayOrderError,
    StreamAggregator,
    aggregate_grid,
    audit_sample,
    daily_series,
    dumps_hit,
    grid_geojson,
    in_bbox,
    load_hits,
    replay,
    write_daily_csv,
    write_grid_csv,
)
from tweetsurv.queryproto import parse_query
from tweetsurv.textpipe import Vocabulary, default_stopwords

T0 = datetime(2016, 7, 26, tzinfo=timezone.utc)

VOCAB = Vocabulary((("demam", 1),))
DEMAM_TREE = Tree(Node((1, 1), SplitRule(0, 0.5), Node((1, 0)), Node((0, 1))), ("demam",))
NEVER_TREE = Tree(Node((3, 1)), ("demam",))


def rec(i, lat=-6.2, lon=106.8, text="demam", minutes=0):
    return TweetRecord(f"r{i}", T0 + timedelta(minutes=minutes), text, "id", False, lat, lon)


def hit(lat, lon, predicted=True, when=T0, i=0):
    return ClassifiedHit(TweetRecord(f"h{i}", when, "x", "id", False, lat, lon), predicted, float(predicted))


@pytest.mark.parametrize(
    "lat, lon, inside",
    [(-6.2, 106.8, True), (35.6, 139.7, False), (-11.0, 95.0, True), (6.0, 141.0, True), (6.0001, 120, False), (0, 94.99, False)],
)
def test_in_bbox(lat, lon, inside):
    assert in_bbox(lat, lon, INDONESIA) is inside


def test_bbox_validation():
    with pytest.raises(ValueError):
        BBox(6, -11, 95, 141)


def test_replay_drops_outside_and_missing_coordinates():
    corpus = [rec(i) for i in range(6)] + [rec(6, 35.6, 139.7), rec(7, 14.6, 121.0), rec(8, 50, 10), rec(9, 0, 150)]
    hits = list(replay(corpus, DEMAM_TREE, VOCAB))
    assert len(hits) == 6
    assert all(in_bbox(h.tweet.lat, h.tweet.lon) for h in hits)
    no_geo = TweetRecord("g", T0, "demam", "id")
    assert list(replay([no_geo], DEMAM_TREE, VOCAB)) == []


def test_replay_predictions():
    corpus = [rec(0, text="Demam tinggi!"), rec(1, text="makan siang")]
    hits = list(replay(corpus, DEMAM_TREE, VOCAB))
    assert [(h.predicted, h.p_true) for h in hits] == [(True, 1.0), (False, 0.0)]
    assert not any(h.predicted for h in replay(corpus, NEVER_TREE, VOCAB))


def test_replay_query_filter():
    corpus = [rec(0, text="demam"), rec(1, text="panas cuaca"), rec(2, text="panas badan")]
    q = parse_query("demam OR panas -cuaca")
    assert [h.tweet.id for h in replay(corpus, DEMAM_TREE, VOCAB, query=q)] == ["r0", "r2"]


def test_replay_orders_by_time_with_stable_ties():
    corpus = [rec(0, minutes=5), rec(1, minutes=1), rec(2, minutes=5), rec(3, minutes=1)]
    assert [h.tweet.id for h in replay(corpus, DEMAM_TREE, VOCAB)] == ["r1", "r3", "r0", "r2"]


def test_replay_unsorted_iterator_rejected():
    stream = iter([rec(0, minutes=5), rec(1, minutes=1)])
    with pytest.raises(ReplayOrderError):
        list(replay(stream, DEMAM_TREE, VOCAB))


def test_dimension_mismatch_before_emission():
    consumed = []

    def source():
        for i in range(3):
            consumed.append(i)
            yield rec(i)

    wide = Vocabulary((("demam", 2), ("sakit", 1)))
    with pytest.raises(ValueError, match="does not match"):
        replay(source(), DEMAM_TREE, wide)
    assert consumed == []


def test_replay_is_lazy():
    pulled = []

    def source():
        for i in range(10**9):
            pulled.append(i)
            yield rec(i, minutes=i)

    it = replay(source(), DEMAM_TREE, VOCAB)
    first = [next(it) for _ in range(3)]
    assert [h.tweet.id for h in first] == ["r0", "r1", "r2"]
    assert len(pulled) == 3


def test_grid_single_cell_and_empty():
    hits = [hit(-6.2, 106.8), hit(-6.1, 106.9), hit(-6.3, 106.7)]
    assert list(aggregate_grid(hits).values()) == [3]
    assert aggregate_grid([]) == {}


def test_grid_border_floor_rule():
    g = GridSpec(INDONESIA, 0.5)
    below, on = g.cell(-11 + 0.5 - 1e-9, 100), g.cell(-11 + 0.5, 100)
    assert on[0] == below[0] + 1
    assert g.cell(-11, 95) == (0, 0)


def test_grid_max_edge_maps_to_last_cell():
    g = GridSpec(INDONESIA, 0.5)
    rows, cols = g.shape
    assert (rows, cols) == (34, 92)
    assert g.cell(6.0, 141.0) == (rows - 1, cols - 1)
    with pytest.raises(ValueError):
        g.cell(7.0, 100)


def test_grid_predicted_only():
    hits = [hit(-6.2, 106.8, True), hit(-6.2, 106.8, False), hit(3.6, 98.7, False)]
    assert sum(aggregate_grid(hits, predicted_only=True).values()) == 1
    assert sum(aggregate_grid(hits).values()) == 3


def test_daily_zero_fill():
    hits = [hit(0, 100, when=T0 + timedelta(days=d)) for d in (0, 0, 3, 6)]
    series = daily_series(hits)
    assert len(series) == 7 and list(series.values()).count(0) == 4
    assert series[date(2016, 7, 26)] == 2
    window = (date(2016, 7, 26), date(2016, 8, 1))
    same_day = daily_series([hit(0, 100), hit(0, 100)], window=window)
    assert [v for v in same_day.values() if v] == [2] and len(same_day) == 7


def test_daily_utc_boundary():
    late = hit(0, 100, when=datetime(2016, 7, 26, 23, 59, 59, tzinfo=timezone.utc))
    early = hit(0, 100, when=datetime(2016, 7, 27, 0, 0, 0, tzinfo=timezone.utc))
    assert daily_series([late, early]) == {date(2016, 7, 26): 1, date(2016, 7, 27): 1}


def strata(n_true, n_false):
    return [hit(0, 100, predicted=i < n_true, i=i) for i in range(n_true + n_false)]


def test_audit_sample_strata():
    hits = strata(500, 5000)
    sample = audit_sample(hits, 100, 100, seed=1)
    assert len(sample) == 200
    assert all(h.predicted for h in sample[:100]) and not any(h.predicted for h in sample[100:])
    assert len({h.tweet.id for h in sample}) == 200
    assert audit_sample(hits, 100, 100, seed=1) == sample
    assert audit_sample(hits, 100, 100, seed=2) != sample


def test_audit_sample_insufficient():
    with pytest.raises(InsufficientHitsError, match="5 TRUE") as info:
        audit_sample(strata(5, 50), 10, 10, seed=0)
    assert info.value.available == (5, 50)


def test_reservoir_is_uniform():
    # each of 20 items should land in a 5-item sample with probability 1/4
    counts = Counter()
    trials = 4000
    for s in range(trials):
        for h in audit_sample(strata(20, 0), 5, 0, seed=s):
            counts[h.tweet.id] += 1
    expected = trials * 5 / 20
    assert len(counts) == 20
    # loose 5-sigma bound on a binomial(4000, 0.25)
    assert all(abs(c - expected) < 5 * (trials * 0.25 * 0.75) ** 0.5 for c in counts.values())


@given(st.lists(st.tuples(st.floats(-11, 6), st.floats(95, 141), st.booleans(), st.integers(0, 10 * 86400)), max_size=60))
def test_aggregate_sums_agree(rows):
    hits = [hit(a, b, p, T0 + timedelta(seconds=s), i) for i, (a, b, p, s) in enumerate(rows)]
    for only in (True, False):
        n = sum(h.predicted or not only for h in hits)
        assert sum(aggregate_grid(hits, predicted_only=only).values()) == n
        assert sum(daily_series(hits, predicted_only=only).values()) == n
        agg = StreamAggregator(predicted_only=only).consume(hits)
        assert dict(agg.grid_counts) == aggregate_grid(hits, predicted_only=only)
        assert agg.daily() == daily_series(hits, predicted_only=only)


def test_stream_aggregator_audit_matches_batch():
    hits = strata(50, 80)
    agg = StreamAggregator(audit=(10, 10), seed=9).consume(hits)
    assert agg.audit() == audit_sample(hits, 10, 10, seed=9)


# -- synthetic week -----------------------------------------------------------


@pytest.fixture(scope="module")
def week_hits(week_stream, trained):
    records, truth = week_stream
    clf = trained.classifier
    return truth, list(replay(records, clf.tree, clf.vocab, default_stopwords()))


def test_week_true_rate_close_to_planted(week_hits):
    truth, hits = week_hits
    assert len(hits) == truth.n_in_bbox
    rate = sum(h.predicted for h in hits) / len(hits)
    planted = len(truth.true_ids) / truth.n_in_bbox
    assert abs(rate - planted) <= 0.002


def test_week_ten_thousand_records(trained):
    records, truth = synth.stream_week(n=10_000, seed=3)
    clf = trained.classifier
    hits = list(replay(records, clf.tree, clf.vocab, default_stopwords()))
    rate = sum(h.predicted for h in hits) / len(hits)
    assert abs(rate - 0.005) <= 0.002


def test_week_aggregates(week_hits):
    _, hits = week_hits
    n_true = sum(h.predicted for h in hits)
    assert sum(aggregate_grid(hits, predicted_only=True).values()) == n_true
    series = daily_series(hits, predicted_only=True)
    assert len(series) == 7 and sum(series.values()) == n_true
    assert min(series) == date(2016, 7, 26) and max(series) == date(2016, 8, 1)


def test_exports_deterministic(tmp_path, week_hits):
    _, hits = week_hits
    hits = hits[:2000]
    grid = GridSpec()
    counts = aggregate_grid(hits)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_grid_csv(counts, grid, a)
    write_grid_csv(aggregate_grid(hits), grid, b)
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.DictReader(a.open()))
    assert list(rows[0]) == ["lat_index", "lon_index", "lat_center", "lon_center", "count"]
    assert sum(int(r["count"]) for r in rows) == len(hits)
    gj = grid_geojson(counts, grid)
    assert gj["type"] == "FeatureCollection"
    assert sum(f["properties"]["count"] for f in gj["features"]) == len(hits)
    lon, lat = gj["features"][0]["geometry"]["coordinates"]
    assert in_bbox(lat, lon)
    d = tmp_path / "daily.csv"
    write_daily_csv(daily_series(hits), d)
    assert d.read_text().splitlines()[0] == "date,count"


def test_hit_round_trip(tmp_path, week_hits):
    _, hits = week_hits
    p = tmp_path / "hits.ndjson"
    p.write_text("".join(dumps_hit(h) + "\n" for h in hits[:50]), encoding="utf-8")
    assert load_hits(p) == hits[:50]
    first = json.loads(p.read_text().splitlines()[0])
    assert {"predicted", "p_true", "id", "created_at", "text"} <= set(first)
