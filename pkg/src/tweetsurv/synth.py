"""Synthetic Bahasa Indonesia tweet corpora with planted, known structure.

Real labeled tweets are not redistributable, so tests, demos and the
bundled data use these generators.  Every generator is deterministic for a
given seed and records the ground truth it planted.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

import numpy as np

from ._rng import make_rng
from .corpus import LabeledTweet, TweetRecord

__all__ = [
    "HEALTH_WORDS",
    "HEARTBREAK_WORDS",
    "FILLER_WORDS",
    "labeled_corpus",
    "stream_week",
    "association_corpus",
    "presence_dataset",
    "StreamTruth",
]

# words that push a tweet towards TRUE (illness) or FALSE (heartbreak)
HEALTH_WORDS = ("nak", "pendarahan", "demam", "sakit")
HEARTBREAK_WORDS = ("orang", "hati", "lemah", "rasa")
HEALTH_CONTEXT = ("rumah", "rawat", "inap", "badan", "perut", "panas", "muntah", "trombosit", "dokter", "obat")
FILLER_WORDS = (
    "hari", "malam", "pagi", "kerja", "makan", "tidur", "jalan", "teman", "kopi",
    "hujan", "macet", "kantor", "kuliah", "nonton", "film", "lagu", "libur", "besok",
    "capek", "senang", "mantap", "baru", "pulang", "main", "bola", "liburan", "pantai",
)
STOP_SPRINKLE = ("kamu", "aja", "yang", "dan", "banget", "sih", "ya", "udah")
DECORATION = ("", "", "", "!!", " :(", " :'(", " 39", ".", "...", " #sehat", " @teman")

# (lat, lon, weight) population centres; Java dominates
CITIES = (
    (-6.2, 106.8, 30), (-7.25, 112.75, 12), (-6.9, 107.6, 12), (-7.8, 110.37, 8),
    (-6.97, 110.42, 6), (3.59, 98.67, 8), (-0.95, 100.35, 3), (-2.99, 104.76, 4),
    (-5.14, 119.42, 5), (-1.24, 116.85, 3), (-0.03, 109.33, 2), (1.47, 124.84, 2),
    (-8.65, 115.22, 4), (-2.53, 140.7, 1),
)
# points outside the Indonesian box: Manila, Darwin, Bangkok, Perth
OUTSIDE = ((14.6, 120.98), (-12.46, 130.84), (13.75, 100.5), (-31.95, 115.86))
_CITY_CDF = np.cumsum([c[2] for c in CITIES], dtype=float)
_CITY_CDF /= _CITY_CDF[-1]

WEEK_START = datetime(2016, 7, 26, tzinfo=timezone.utc)


def _pick(rng, words, k):
    return [words[i] for i in rng.integers(len(words), size=k)]


def _assemble(rng, words):
    words = list(words)
    rng.shuffle(words)
    text = " ".join(words)
    if rng.random() < 0.3:
        text = text.capitalize()
    return text + DECORATION[rng.integers(len(DECORATION))]


def _true_text(rng, mixed_rate=0.0):
    words = _pick(rng, HEALTH_WORDS, 1 + int(rng.random() < 0.4))
    words += _pick(rng, HEALTH_CONTEXT, 1 + int(rng.integers(2)))
    if rng.random() < mixed_rate:
        words += _pick(rng, HEARTBREAK_WORDS, 1)
    words += _pick(rng, FILLER_WORDS, 1 + int(rng.integers(3)))
    words += _pick(rng, STOP_SPRINKLE, int(rng.integers(3)))
    return _assemble(rng, words)


def _false_text(rng, heartbreak_rate=0.45, mixed_rate=0.0):
    words = []
    if rng.random() < mixed_rate:
        words += _pick(rng, HEALTH_CONTEXT + HEALTH_WORDS, 1)
    if rng.random() < heartbreak_rate:
        words += ["sakit", "hati"] if rng.random() < 0.5 else ["hati"]
        words += _pick(rng, HEARTBREAK_WORDS, 1 + int(rng.integers(2)))
    words += _pick(rng, FILLER_WORDS, 2 + int(rng.integers(3)))
    words += _pick(rng, STOP_SPRINKLE, int(rng.integers(3)))
    return _assemble(rng, words)


def _stamp(rng, start=WEEK_START, days=7):
    return start + timedelta(seconds=int(rng.integers(days * 86400)))


def _city_point(rng):
    lat, lon, _ = CITIES[int(np.searchsorted(_CITY_CDF, rng.random(), side="right"))]
    dlat, dlon = rng.normal(0, 0.3, size=2)
    lat = min(max(lat + dlat, -11.0), 6.0)
    lon = min(max(lon + dlon, 95.0), 141.0)
    return round(lat, 5), round(lon, 5)


def labeled_corpus(n: int = 390, n_retweets: int = 10, true_fraction: float = 0.45, mixed_rate: float = 0.08, seed=2016) -> list[LabeledTweet]:
    """Labeled tweets with a learnable but imperfect keyword signal.

    TRUE tweets always mention an illness word; FALSE tweets often talk
    about heartbreak ("sakit hati").  A ``mixed_rate`` share of each class
    borrows a word from the other side.  ``n_retweets`` extra retweets (with
    their own ids) are inserted at random positions, so cleaning the output
    leaves exactly ``n`` originals.
    """
    rng = make_rng(seed, "labeled")
    n_true = int(round(n * true_fraction))
    labels = np.array([True] * n_true + [False] * (n - n_true))
    rng.shuffle(labels)
    out = []
    for i, lab in enumerate(labels):
        text = _true_text(rng, mixed_rate) if lab else _false_text(rng, mixed_rate=mixed_rate)
        lat, lon = _city_point(rng) if rng.random() < 0.6 else (None, None)
        rec = TweetRecord(f"t{i:04d}", _stamp(rng, datetime(2016, 7, 1, tzinfo=timezone.utc), 21), text, "id", False, lat, lon)
        out.append(LabeledTweet(rec, bool(lab)))
    for k in range(n_retweets):
        src = out[int(rng.integers(len(out)))]
        rt = TweetRecord(
            f"rt{k:04d}", src.tweet.created_at + timedelta(minutes=5), "RT @user: " + src.tweet.text,
            "id", True, src.tweet.lat, src.tweet.lon,
        )
        out.insert(int(rng.integers(len(out) + 1)), LabeledTweet(rt, src.label))
    return out


@dataclass(frozen=True)
class StreamTruth:
    n_records: int
    n_in_bbox: int
    n_no_coords: int
    true_ids: frozenset


def stream_week(n: int = 100_000, true_rate: float = 0.005, outside_rate: float = 0.1, no_coords_rate: float = 0.05, seed=726) -> tuple[list[TweetRecord], StreamTruth]:
    """One week (2016-07-26 .. 2016-08-01 UTC) of geo-tagged chatter, time-ordered.

    Exactly ``round(true_rate * n_in_bbox)`` in-bbox records carry an
    illness mention; everything else is everyday or heartbreak chatter.
    """
    rng = make_rng(seed, "stream")
    kind = rng.random(n)
    no_coords = kind < no_coords_rate
    outside = (kind >= no_coords_rate) & (kind < no_coords_rate + outside_rate)
    inside_idx = np.flatnonzero(~no_coords & ~outside)
    n_true = int(round(true_rate * len(inside_idx)))
    true_idx = set(rng.choice(inside_idx, size=n_true, replace=False).tolist())
    stamps = np.sort(rng.integers(7 * 86400, size=n))
    records = []
    true_ids = set()
    for i in range(n):
        rid = f"s{i:06d}"
        if i in true_idx:
            text = _true_text(rng)
            true_ids.add(rid)
        else:
            text = _false_text(rng, heartbreak_rate=0.1)
        if no_coords[i]:
            lat = lon = None
        elif outside[i]:
            base = OUTSIDE[int(rng.integers(len(OUTSIDE)))]
            lat, lon = round(base[0] + rng.normal(0, 0.2), 5), round(base[1] + rng.normal(0, 0.2), 5)
        else:
            lat, lon = _city_point(rng)
        created = WEEK_START + timedelta(seconds=int(stamps[i]))
        records.append(TweetRecord(rid, created, text, "id", False, lat, lon))
    truth = StreamTruth(n, len(inside_idx), int(no_coords.sum()), frozenset(true_ids))
    return records, truth


def association_corpus(n: int = 300, seed=7) -> list[tuple[str, str]]:
    """(doc_id, text) pairs where "hati" co-occurs most strongly with "sakit".

    "rasa" and "perut" co-occur more weakly; filler words are independent.
    """
    rng = make_rng(seed, "assoc")
    docs = []
    for i in range(n):
        words = _pick(rng, FILLER_WORDS, 3)
        if rng.random() < 0.4:
            words.append("sakit")
            if rng.random() < 0.75:
                words.append("hati")
            if rng.random() < 0.35:
                words.append("rasa")
            if rng.random() < 0.25:
                words.append("perut")
        else:
            if rng.random() < 0.08:
                words.append("hati")
            if rng.random() < 0.15:
                words.append("rasa")
            if rng.random() < 0.1:
                words.append("perut")
        docs.append((f"a{i:04d}", " ".join(words)))
    return docs


def presence_dataset(n: int = 200, n_noise: int = 5, seed=11):
    """Token lists whose label is exactly "demam occurs at least once".

    Returns (token_lists, labels).
    """
    rng = make_rng(seed, "presence")
    noise_words = FILLER_WORDS[:n_noise]
    labels = np.zeros(n, dtype=bool)
    labels[: n // 2] = True
    rng.shuffle(labels)
    token_lists = []
    for lab in labels:
        toks = _pick(rng, noise_words, 1 + int(rng.integers(4)))
        if lab:
            toks += ["demam"] * (1 + int(rng.integers(3)))
        rng.shuffle(toks)
        token_lists.append(toks)
    return token_lists, labels
