"""Replay of a geo-tagged corpus through the classifier, with aggregation.

Records are replayed in timestamp order, filtered to a bounding box (and
optionally a keyword query), classified, and counted on a lat/lon grid and
per UTC day.  Audit samples are drawn per predicted class with a seeded
reservoir so they can be taken in one pass.
"""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterable, Iterator

from ._rng import make_rng
from .cart import Tree
from .corpus import CorpusError, TweetRecord, iter_json_lines, dumps_record, record_from_dict
from .queryproto import Query, matches
from .textpipe import Vocabulary, prepare, vectorize

__all__ = [
    "BBox",
    "INDONESIA",
    "GridSpec",
    "ClassifiedHit",
    "InsufficientHitsError",
    "ReplayOrderError",
    "in_bbox",
    "replay",
    "aggregate_grid",
    "daily_series",
    "ReservoirSampler",
    "audit_sample",
    "StreamAggregator",
    "dumps_hit",
    "load_hits",
    "grid_rows",
    "grid_geojson",
]


@dataclass(frozen=True)
class BBox:
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float

    def __post_init__(self):
        if not (self.lat_min < self.lat_max and self.lon_min < self.lon_max):
            raise ValueError(f"degenerate bounding box {self}")
        if not (-90 <= self.lat_min and self.lat_max <= 90 and -180 <= self.lon_min and self.lon_max <= 180):
            raise ValueError(f"bounding box outside valid coordinates: {self}")

    def contains(self, lat: float, lon: float) -> bool:
        return self.lat_min <= lat <= self.lat_max and self.lon_min <= lon <= self.lon_max


# 11S-6N, 95E-141E
INDONESIA = BBox(-11.0, 6.0, 95.0, 141.0)


def in_bbox(lat: float, lon: float, bbox: BBox = INDONESIA) -> bool:
    """Inclusive containment on both axes."""
    return bbox.contains(lat, lon)


@dataclass(frozen=True)
class GridSpec:
    bbox: BBox = INDONESIA
    cell_deg: float = 0.5

    def __post_init__(self):
        if not self.cell_deg > 0:
            raise ValueError("cell_deg must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        b = self.bbox
        # round() guards against 17/0.5 landing a hair above 34
        rows = math.ceil(round((b.lat_max - b.lat_min) / self.cell_deg, 9))
        cols = math.ceil(round((b.lon_max - b.lon_min) / self.cell_deg, 9))
        return max(rows, 1), max(cols, 1)

    def cell(self, lat: float, lon: float) -> tuple[int, int]:
        if not self.bbox.contains(lat, lon):
            raise ValueError(f"point ({lat}, {lon}) outside grid bbox")
        rows, cols = self.shape
        i = math.floor((lat - self.bbox.lat_min) / self.cell_deg)
        j = math.floor((lon - self.bbox.lon_min) / self.cell_deg)
        return min(i, rows - 1), min(j, cols - 1)

    def center(self, i: int, j: int) -> tuple[float, float]:
        return (
            self.bbox.lat_min + (i + 0.5) * self.cell_deg,
            self.bbox.lon_min + (j + 0.5) * self.cell_deg,
        )


@dataclass(frozen=True)
class ClassifiedHit:
    tweet: TweetRecord
    predicted: bool
    p_true: float


class ReplayOrderError(ValueError):
    pass


class InsufficientHitsError(ValueError):
    def __init__(self, requested_true, requested_false, available_true, available_false):
        self.available = (available_true, available_false)
        super().__init__(
            f"audit needs {requested_true} TRUE / {requested_false} FALSE predictions, "
            f"only {available_true} TRUE / {available_false} FALSE available"
        )


def _ordered(corpus) -> Iterator[TweetRecord]:
    if isinstance(corpus, Sequence):
        # stable sort: equal timestamps keep file order
        yield from sorted(corpus, key=lambda r: r.created_at)
        return
    last = None
    for rec in corpus:
        if last is not None and rec.created_at < last:
            raise ReplayOrderError(f"record {rec.id} is earlier than its predecessor; sort the stream first")
        last = rec.created_at
        yield rec


def replay(
    corpus: Iterable[TweetRecord],
    tree: Tree,
    vocab: Vocabulary,
    stopwords=frozenset(),
    bbox: BBox = INDONESIA,
    query: Query | None = None,
    binary: bool = False,
) -> Iterator[ClassifiedHit]:
    """Yield a :class:`ClassifiedHit` per in-bbox (and query-matching) record.

    A list/tuple corpus is replayed sorted by ``created_at`` (ties keep file
    order); any other iterable must already be time-ordered and is consumed
    lazily.  Records without coordinates are skipped.
    """
    if tuple(vocab.words) != tuple(tree.feature_names):
        raise ValueError(
            f"vocabulary ({len(vocab)} terms) does not match the model's {tree.n_features} features"
        )
    return _replay(corpus, tree, vocab, stopwords, bbox, query, binary)


def _replay(corpus, tree, vocab, stopwords, bbox, query, binary):
    for rec in _ordered(corpus):
        if rec.lat is None or not bbox.contains(rec.lat, rec.lon):
            continue
        if query is not None and not matches(query, rec.text):
            continue
        x = vectorize(prepare(rec.id, rec.text, stopwords), vocab, binary)
        leaf = tree.leaf(x)
        yield ClassifiedHit(rec, leaf.predicted_class, leaf.p_true)


def _counted(hits, predicted_only):
    return (h for h in hits if h.predicted or not predicted_only)


def aggregate_grid(hits: Iterable[ClassifiedHit], grid: GridSpec = GridSpec(), predicted_only: bool = False) -> dict[tuple[int, int], int]:
    """Hit counts per (lat_index, lon_index) cell."""
    counts = Counter()
    for h in _counted(hits, predicted_only):
        counts[grid.cell(h.tweet.lat, h.tweet.lon)] += 1
    return dict(counts)


def _date_range(first: date, last: date) -> list[date]:
    return [first + timedelta(days=k) for k in range((last - first).days + 1)]


def daily_series(hits: Iterable[ClassifiedHit], predicted_only: bool = False, window: tuple[date, date] | None = None) -> dict[date, int]:
    """Counts per UTC calendar day, zero-filled across the window.

    ``window`` is an inclusive (first, last) date pair; by default it spans
    the earliest to latest day among all ``hits`` (counted or not).
    """
    counts = Counter()
    seen = []
    for h in hits:
        d = h.tweet.created_at.date()
        seen.append(d)
        if h.predicted or not predicted_only:
            counts[d] += 1
    if window is None:
        if not seen:
            return {}
        window = (min(seen), max(seen))
    return {d: counts.get(d, 0) for d in _date_range(*window)}


class ReservoirSampler:
    """Uniform fixed-size sample without replacement from a stream (Algorithm R)."""

    def __init__(self, size: int, rng):
        if size < 0:
            raise ValueError("sample size must be non-negative")
        self.size = size
        self.rng = rng
        self.seen = 0
        self.items = []

    def add(self, item) -> None:
        self.seen += 1
        if len(self.items) < self.size:
            self.items.append(item)
            return
        k = int(self.rng.integers(self.seen))
        if k < self.size:
            self.items[k] = item


def audit_sample(hits: Iterable[ClassifiedHit], n_true: int, n_false: int, seed) -> list[ClassifiedHit]:
    """Random predicted-TRUE and predicted-FALSE hits for manual checking.

    Returns the TRUE sample followed by the FALSE sample.
    """
    rng = make_rng(seed)
    true_s = ReservoirSampler(n_true, rng)
    false_s = ReservoirSampler(n_false, rng)
    for h in hits:
        (true_s if h.predicted else false_s).add(h)
    return _finish_audit(true_s, false_s)


def _finish_audit(true_s, false_s):
    if true_s.seen < true_s.size or false_s.seen < false_s.size:
        raise InsufficientHitsError(true_s.size, false_s.size, true_s.seen, false_s.seen)
    return true_s.items + false_s.items


class StreamAggregator:
    """Single-pass accumulation of grid, daily and audit state.

    Memory grows with the number of occupied cells and days, not with the
    number of hits.
    """

    def __init__(self, grid: GridSpec = GridSpec(), predicted_only: bool = True, audit: tuple[int, int] | None = None, seed=0):
        self.grid = grid
        self.predicted_only = predicted_only
        self.grid_counts = Counter()
        self.day_counts = Counter()
        self.first_day = None
        self.last_day = None
        self.n_hits = 0
        self.n_true = 0
        self._audit = None
        if audit is not None:
            rng = make_rng(seed)
            self._audit = (ReservoirSampler(audit[0], rng), ReservoirSampler(audit[1], rng))

    def add(self, hit: ClassifiedHit) -> None:
        self.n_hits += 1
        self.n_true += hit.predicted
        d = hit.tweet.created_at.date()
        if self.first_day is None or d < self.first_day:
            self.first_day = d
        if self.last_day is None or d > self.last_day:
            self.last_day = d
        if hit.predicted or not self.predicted_only:
            self.grid_counts[self.grid.cell(hit.tweet.lat, hit.tweet.lon)] += 1
            self.day_counts[d] += 1
        if self._audit is not None:
            (self._audit[0] if hit.predicted else self._audit[1]).add(hit)

    def consume(self, hits: Iterable[ClassifiedHit]) -> "StreamAggregator":
        for h in hits:
            self.add(h)
        return self

    def daily(self, window: tuple[date, date] | None = None) -> dict[date, int]:
        if window is None:
            if self.first_day is None:
                return {}
            window = (self.first_day, self.last_day)
        return {d: self.day_counts.get(d, 0) for d in _date_range(*window)}

    def audit(self) -> list[ClassifiedHit]:
        if self._audit is None:
            raise ValueError("aggregator was created without an audit request")
        return _finish_audit(*self._audit)


# -- exports ------------------------------------------------------------------


def dumps_hit(hit: ClassifiedHit) -> str:
    return dumps_record(hit.tweet, predicted=hit.predicted, p_true=hit.p_true)


def load_hits(path) -> list[ClassifiedHit]:
    """Read hits written by :func:`dumps_hit` (corpus schema + predicted, p_true)."""
    out = []
    for lineno, obj in iter_json_lines(path):
        rec = record_from_dict(obj, lineno)
        pred, p = obj.get("predicted"), obj.get("p_true")
        if not isinstance(pred, bool):
            raise CorpusError("missing or non-boolean 'predicted'", lineno)
        if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0.0 <= p <= 1.0:
            raise CorpusError("missing or invalid 'p_true'", lineno)
        out.append(ClassifiedHit(rec, pred, float(p)))
    return out


def grid_rows(counts: dict[tuple[int, int], int], grid: GridSpec) -> list[tuple[int, int, float, float, int]]:
    """(lat_index, lon_index, lat_center, lon_center, count), sorted by cell."""
    rows = []
    for (i, j), c in sorted(counts.items()):
        lat, lon = grid.center(i, j)
        rows.append((i, j, lat, lon, c))
    return rows


def write_grid_csv(counts, grid: GridSpec, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lat_index", "lon_index", "lat_center", "lon_center", "count"])
        w.writerows(grid_rows(counts, grid))


def grid_geojson(counts, grid: GridSpec) -> dict:
    """FeatureCollection of cell-center points with a ``count`` property."""
    features = []
    for i, j, lat, lon, c in grid_rows(counts, grid):
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [lon, lat]},
            "properties": {"lat_index": i, "lon_index": j, "count": c},
        })
    return {"type": "FeatureCollection", "features": features}


def write_grid_geojson(counts, grid: GridSpec, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(grid_geojson(counts, grid), fh, separators=(",", ":"))
        fh.write("\n")


def write_daily_csv(series: dict[date, int], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "count"])
        for d in sorted(series):
            w.writerow([d.isoformat(), series[d]])
