"""Text normalization, vocabulary building and term-document counts."""

from __future__ import annotations

import csv
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "TokenizedDoc",
    "Vocabulary",
    "TermDocMatrix",
    "normalize",
    "tokenize",
    "remove_stopwords",
    "load_stopwords",
    "default_stopwords",
    "prepare",
    "build_vocab",
    "vectorize",
    "build_tdm",
    "term_correlation",
    "top_associations",
]


class _SpaceTable(dict):
    """str.translate table mapping punctuation, symbols and digits to a space.

    Filled lazily so only code points actually seen are classified.
    """

    def __missing__(self, cp):
        ch = chr(cp)
        cat = unicodedata.category(ch)
        value = " " if cat[0] in "PS" or ch.isdigit() else None
        self[cp] = value if value is not None else cp
        return self[cp]


_TABLE = _SpaceTable()


def normalize(text: str) -> str:
    """Lowercase, blank out punctuation/symbols/digits, collapse whitespace.

    >>> normalize("Demam tinggi, panas 39!!")
    'demam tinggi panas'
    """
    return " ".join(text.lower().translate(_TABLE).split())


def tokenize(normalized: str) -> list[str]:
    return normalized.split()


def remove_stopwords(tokens: Iterable[str], stopwords) -> list[str]:
    return [t for t in tokens if t not in stopwords]


def load_stopwords(path) -> frozenset[str]:
    """Read a stopword file: one token per line, ``#`` lines are comments."""
    with open(path, encoding="utf-8") as fh:
        return _parse_stopwords(fh.read())


def _parse_stopwords(content: str) -> frozenset[str]:
    words = set()
    for line in content.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line.lower())
    return frozenset(words)


_DEFAULT = None


def default_stopwords() -> frozenset[str]:
    global _DEFAULT
    if _DEFAULT is None:
        content = resources.files("tweetsurv").joinpath("data/stopwords_id.txt").read_text("utf-8")
        _DEFAULT = _parse_stopwords(content)
    return _DEFAULT


@dataclass(frozen=True)
class TokenizedDoc:
    doc_id: str
    tokens: tuple[str, ...]


def prepare(doc_id: str, text: str, stopwords=None) -> TokenizedDoc:
    """normalize -> tokenize -> remove_stopwords in one call."""
    tokens = tokenize(normalize(text))
    if stopwords:
        tokens = remove_stopwords(tokens, stopwords)
    return TokenizedDoc(doc_id, tuple(tokens))


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[tuple[str, int], ...]
    min_freq: int = 1
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        terms = tuple((str(t), int(f)) for t, f in self.terms)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "index", {t: i for i, (t, _) in enumerate(terms)})
        if len(self.index) != len(terms):
            raise ValueError("duplicate vocabulary terms")
        if any(f < self.min_freq for _, f in terms):
            raise ValueError("vocabulary term below min_freq")
        if list(terms) != sorted(terms, key=lambda tf: (-tf[1], tf[0])):
            raise ValueError("vocabulary terms must be sorted by (-frequency, term)")

    @property
    def words(self) -> list[str]:
        return [t for t, _ in self.terms]

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.index


def build_vocab(docs: Iterable[TokenizedDoc], min_freq: int) -> Vocabulary:
    """Terms occurring at least ``min_freq`` times across ``docs``.

    Sorted by descending frequency, ties alphabetical.
    """
    if min_freq < 1:
        raise ValueError("min_freq must be >= 1")
    counts = Counter()
    for d in docs:
        counts.update(d.tokens)
    kept = [(t, f) for t, f in counts.items() if f >= min_freq]
    kept.sort(key=lambda tf: (-tf[1], tf[0]))
    return Vocabulary(tuple(kept), min_freq)


def vectorize(doc: TokenizedDoc, vocab: Vocabulary, binary: bool = False) -> np.ndarray:
    """Per-term occurrence counts (or 0/1 presence when ``binary``)."""
    vec = np.zeros(len(vocab), dtype=np.int64)
    index = vocab.index
    for tok in doc.tokens:
        i = index.get(tok)
        if i is not None:
            vec[i] += 1
    if binary:
        np.minimum(vec, 1, out=vec)
    return vec


@dataclass(frozen=True)
class TermDocMatrix:
    vocabulary: Vocabulary
    doc_ids: tuple[str, ...]
    counts: np.ndarray  # shape (n_docs, n_terms)

    def __post_init__(self):
        if self.counts.shape != (len(self.doc_ids), len(self.vocabulary)):
            raise ValueError("count matrix shape does not match docs x vocabulary")
        if self.counts.size and self.counts.min() < 0:
            raise ValueError("negative counts")

    def column(self, term: str) -> np.ndarray:
        try:
            return self.counts[:, self.vocabulary.index[term]]
        except KeyError:
            raise KeyError(f"term not in vocabulary: {term!r}") from None

    def row(self, doc_id: str) -> np.ndarray:
        return self.counts[self.doc_ids.index(doc_id)]

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["doc_id", *self.vocabulary.words])
            for doc_id, row in zip(self.doc_ids, self.counts):
                w.writerow([doc_id, *(int(v) for v in row)])


def build_tdm(docs: Sequence[TokenizedDoc], vocab: Vocabulary, binary: bool = False) -> TermDocMatrix:
    counts = np.zeros((len(docs), len(vocab)), dtype=np.int64)
    for i, d in enumerate(docs):
        counts[i] = vectorize(d, vocab, binary)
    return TermDocMatrix(vocab, tuple(d.doc_id for d in docs), counts)


def _pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    x = x.astype(float) - x.mean()
    y = y.astype(float) - y.mean()
    sxx = float(x @ x)
    syy = float(y @ y)
    if sxx == 0.0 or syy == 0.0:
        return None
    r = float(x @ y) / np.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def term_correlation(tdm: TermDocMatrix, a: str, b: str) -> float:
    """Pearson correlation of the count columns of terms ``a`` and ``b``."""
    r = _pearson(tdm.column(a), tdm.column(b))
    if r is None:
        raise ValueError(f"correlation of {a!r} and {b!r} undefined: zero-variance column")
    return r


def top_associations(tdm: TermDocMatrix, term: str, threshold: float) -> list[tuple[str, float]]:
    """Other terms whose correlation with ``term`` is at least ``threshold``.

    Zero-variance columns have no defined correlation and are skipped.
    """
    anchor = tdm.column(term)
    out = []
    for other in tdm.vocabulary.words:
        if other == term:
            continue
        r = _pearson(anchor, tdm.column(other))
        if r is not None and r >= threshold:
            out.append((other, r))
    out.sort(key=lambda tr: (-tr[1], tr[0]))
    return out
