"""Loading, validating and filtering newline-delimited tweet records.

Every line of a corpus file is a JSON object with the keys ``id``,
``created_at`` (ISO-8601 UTC), ``text``, ``lang`` and ``retweet``, plus
optional ``lat``/``lon``.  Labeled corpora add a boolean ``label``.
Unknown keys are ignored.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Iterator, TypeVar

__all__ = [
    "CorpusError",
    "TweetRecord",
    "LabeledTweet",
    "parse_timestamp",
    "format_timestamp",
    "record_from_dict",
    "record_to_dict",
    "iter_json_lines",
    "iter_corpus",
    "load_corpus",
    "load_labeled_corpus",
    "dump_corpus",
    "dumps_record",
    "dedupe",
    "drop_retweets",
    "filter_lang",
]


class CorpusError(ValueError):
    """A corpus line failed to parse or validate.

    ``line`` is the 1-based line number (``None`` when the record did not
    come from a file).
    """

    def __init__(self, reason: str, line: int | None = None):
        self.reason = reason
        self.line = line
        msg = reason if line is None else f"line {line}: {reason}"
        super().__init__(msg)


@dataclass(frozen=True)
class TweetRecord:
    id: str
    created_at: datetime
    text: str
    lang: str
    retweet: bool = False
    lat: float | None = None
    lon: float | None = None

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise CorpusError("id must be a non-empty string")
        if not isinstance(self.text, str) or not self.text:
            raise CorpusError("text must be a non-empty string")
        if not isinstance(self.lang, str):
            raise CorpusError("lang must be a string")
        if (self.lat is None) != (self.lon is None):
            raise CorpusError("lat and lon must be both present or both absent")
        if self.lat is not None:
            if not (math.isfinite(self.lat) and -90.0 <= self.lat <= 90.0):
                raise CorpusError(f"lat out of range: {self.lat}")
            if not (math.isfinite(self.lon) and -180.0 <= self.lon <= 180.0):
                raise CorpusError(f"lon out of range: {self.lon}")
        if self.created_at.tzinfo is None:
            raise CorpusError("created_at must be timezone-aware")
        # canonical clock: UTC, whole seconds
        utc = self.created_at.astimezone(timezone.utc).replace(microsecond=0)
        object.__setattr__(self, "created_at", utc)
        object.__setattr__(self, "lang", self.lang.lower())

    @property
    def has_coords(self) -> bool:
        return self.lat is not None


@dataclass(frozen=True)
class LabeledTweet:
    tweet: TweetRecord
    label: bool

    def __post_init__(self):
        if not isinstance(self.label, bool):
            raise CorpusError("label must be a boolean")


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp into an aware UTC datetime.

    A trailing ``Z`` is accepted; a timestamp without offset is rejected.
    """
    if not isinstance(value, str):
        raise ValueError("timestamp must be a string")
    s = value.strip()
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp has no UTC offset: {value!r}")
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


_REQUIRED = ("id", "created_at", "text", "lang", "retweet")


def _coord(obj, key):
    v = obj.get(key)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise CorpusError(f"{key} must be a number")
    return float(v)


def record_from_dict(obj: dict, line: int | None = None) -> TweetRecord:
    if not isinstance(obj, dict):
        raise CorpusError("record is not an object", line)
    for key in _REQUIRED:
        if key not in obj:
            raise CorpusError(f"missing required field {key!r}", line)
    if not isinstance(obj["retweet"], bool):
        raise CorpusError("retweet must be a boolean", line)
    try:
        created = parse_timestamp(obj["created_at"])
    except ValueError as exc:
        raise CorpusError(f"bad created_at: {exc}", line) from None
    try:
        return TweetRecord(
            id=obj["id"],
            created_at=created,
            text=obj["text"],
            lang=obj["lang"],
            retweet=obj["retweet"],
            lat=_coord(obj, "lat"),
            lon=_coord(obj, "lon"),
        )
    except CorpusError as exc:
        raise CorpusError(exc.reason, line) from None


def record_to_dict(rec: TweetRecord) -> dict:
    out = {
        "id": rec.id,
        "created_at": format_timestamp(rec.created_at),
        "text": rec.text,
        "lang": rec.lang,
        "retweet": rec.retweet,
    }
    if rec.has_coords:
        out["lat"] = rec.lat
        out["lon"] = rec.lon
    return out


def dumps_record(rec: TweetRecord | LabeledTweet, **extra) -> str:
    """Serialize one record as a canonical single JSON line (no newline)."""
    if isinstance(rec, LabeledTweet):
        obj = record_to_dict(rec.tweet)
        obj["label"] = rec.label
    else:
        obj = record_to_dict(rec)
    obj.update(extra)
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def iter_json_lines(path) -> Iterator[tuple[int, dict]]:
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw.decode("utf-8"))
            except UnicodeDecodeError:
                raise CorpusError("invalid UTF-8", lineno) from None
            except json.JSONDecodeError as exc:
                raise CorpusError(f"malformed JSON ({exc.msg})", lineno) from None
            yield lineno, obj


def iter_corpus(path) -> Iterator[TweetRecord]:
    """Lazily yield records from an NDJSON file, in file order."""
    for lineno, obj in iter_json_lines(path):
        yield record_from_dict(obj, lineno)


def load_corpus(path) -> list[TweetRecord]:
    """Read every record of an NDJSON corpus file.

    Raises :class:`CorpusError` (with the 1-based line number) on a
    malformed line and :class:`OSError` if the file cannot be read.
    """
    return list(iter_corpus(path))


def load_labeled_corpus(path) -> list[LabeledTweet]:
    out = []
    for lineno, obj in iter_json_lines(path):
        rec = record_from_dict(obj, lineno)
        if "label" not in obj:
            raise CorpusError("missing required field 'label'", lineno)
        if not isinstance(obj["label"], bool):
            raise CorpusError("label must be a boolean", lineno)
        out.append(LabeledTweet(rec, obj["label"]))
    return out


def dump_corpus(records: Iterable[TweetRecord | LabeledTweet], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(dumps_record(rec))
            fh.write("\n")
            n += 1
    return n


# The filters accept plain or labeled records alike.
R = TypeVar("R", TweetRecord, LabeledTweet)


def _tweet(r) -> TweetRecord:
    return r.tweet if isinstance(r, LabeledTweet) else r


def dedupe(records: Iterable[R]) -> list[R]:
    """Keep the first occurrence of every id, preserving order."""
    seen = set()
    out = []
    for r in records:
        key = _tweet(r).id
        if key not in seen:
            seen.add(key)
            out.append(r)
    return out


def drop_retweets(records: Iterable[R]) -> list[R]:
    return [r for r in records if not _tweet(r).retweet]


def filter_lang(records: Iterable[R], lang_code: str) -> list[R]:
    if not lang_code:
        raise ValueError("lang_code must be non-empty")
    code = lang_code.lower()
    return [r for r in records if _tweet(r).lang == code]
