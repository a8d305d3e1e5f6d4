"""Training and evaluation glue: labeled tweets -> vocabulary -> tree -> report."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import cart, metrics
from .corpus import LabeledTweet
from .textpipe import TokenizedDoc, Vocabulary, build_tdm, build_vocab, prepare, vectorize

__all__ = [
    "DegenerateDataError",
    "Classifier",
    "TrainResult",
    "tokenize_corpus",
    "train",
    "evaluate",
    "save_classifier",
    "load_classifier",
]


class DegenerateDataError(ValueError):
    """Data or configuration that leaves nothing to learn or measure."""


@dataclass(frozen=True)
class Classifier:
    """A fitted tree together with the vocabulary that defines its features."""

    tree: cart.Tree
    vocab: Vocabulary
    binary: bool = False

    def __post_init__(self):
        if tuple(self.vocab.words) != self.tree.feature_names:
            raise ValueError("vocabulary terms and tree features differ")

    def features(self, text: str, stopwords=frozenset()) -> np.ndarray:
        return vectorize(prepare("", text, stopwords), self.vocab, self.binary)

    def predict_text(self, text: str, stopwords=frozenset()) -> tuple[bool, float]:
        leaf = self.tree.leaf(self.features(text, stopwords))
        return leaf.predicted_class, leaf.p_true


@dataclass
class TrainResult:
    classifier: Classifier
    unpruned: cart.Tree
    n_train: int
    n_valid: int
    confusion: metrics.ConfusionMatrix
    auc: float | None
    report: dict = field(default_factory=dict)


def tokenize_corpus(labeled: Sequence[LabeledTweet], stopwords) -> list[TokenizedDoc]:
    return [prepare(lt.tweet.id, lt.tweet.text, stopwords) for lt in labeled]


def _scores(tree, X):
    leaves = [tree.leaf(x) for x in X]
    return np.array([lf.predicted_class for lf in leaves]), np.array([lf.p_true for lf in leaves])


def _safe_auc(scores, labels):
    if labels.all() or not labels.any():
        return None
    return metrics.roc_auc(scores, labels)


def train(
    labeled: Sequence[LabeledTweet],
    stopwords=frozenset(),
    min_freq: int = 10,
    params: cart.FitParams = cart.FitParams(),
    train_fraction: float = 0.7,
    seed=0,
    binary: bool = False,
) -> TrainResult:
    """Build the vocabulary on all tweets, split, grow, prune, validate.

    ``seed`` drives only the train/validation partition.
    """
    docs = tokenize_corpus(labeled, stopwords)
    vocab = build_vocab(docs, min_freq)
    if len(vocab) == 0:
        raise DegenerateDataError(f"no term occurs at least {min_freq} times; vocabulary is empty")
    tdm = build_tdm(docs, vocab, binary)
    labels = np.array([lt.label for lt in labeled], dtype=bool)
    data = cart.Dataset(tdm.counts, labels, tuple(vocab.words))
    try:
        train_set, valid_set = cart.train_valid_split(data, train_fraction, seed)
    except ValueError as exc:
        raise DegenerateDataError(str(exc)) from None
    if train_set.labels.all() or not train_set.labels.any():
        raise DegenerateDataError("training labels contain a single class")
    grown = cart.grow(train_set, params)
    tree = cart.prune(grown, params.cp)
    pred, score = _scores(tree, valid_set.features)
    cm = metrics.confusion(pred, valid_set.labels)
    auc = _safe_auc(score, valid_set.labels)
    return TrainResult(
        Classifier(tree, vocab, binary),
        grown,
        train_set.n,
        valid_set.n,
        cm,
        auc,
        metrics.report_rows(cm, auc),
    )


def evaluate(clf: Classifier, labeled: Sequence[LabeledTweet], stopwords=frozenset()) -> tuple[metrics.ConfusionMatrix, dict]:
    if not labeled:
        raise DegenerateDataError("no labeled tweets to evaluate")
    X = np.array([clf.features(lt.tweet.text, stopwords) for lt in labeled])
    labels = np.array([lt.label for lt in labeled], dtype=bool)
    pred, score = _scores(clf.tree, X)
    cm = metrics.confusion(pred, labels)
    return cm, metrics.report_rows(cm, _safe_auc(score, labels))


def save_classifier(clf: Classifier, path) -> None:
    extra = {
        "binary": clf.binary,
        "min_freq": clf.vocab.min_freq,
        "vocabulary": [[t, f] for t, f in clf.vocab.terms],
    }
    cart.save_model(clf.tree, path, extra)


def load_classifier(path) -> Classifier:
    tree, extra = cart.load_model(path)
    try:
        vocab = Vocabulary(tuple(tuple(tf) for tf in extra["vocabulary"]), int(extra.get("min_freq", 1)))
        return Classifier(tree, vocab, bool(extra.get("binary", False)))
    except (KeyError, TypeError, ValueError) as exc:
        raise cart.ModelFormatError(f"model vocabulary invalid: {exc}") from None
