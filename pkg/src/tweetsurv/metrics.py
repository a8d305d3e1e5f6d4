"""Confusion-matrix rates, ROC curves and AUC for binary classifiers."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, NamedTuple

import numpy as np

__all__ = [
    "ConfusionMatrix",
    "ScoredLabel",
    "RocCurve",
    "confusion",
    "rates",
    "roc",
    "auc",
    "roc_auc",
    "percent",
    "RATE_NAMES",
    "report_rows",
    "report_csv",
    "report_table",
]

RATE_NAMES = ("sensitivity", "specificity", "ppv", "npv", "accuracy")

_LABELS = {
    "sensitivity": "Sensitivity",
    "specificity": "Specificity",
    "ppv": "Positive Predictive Value",
    "npv": "Negative Predictive Value",
    "accuracy": "Accuracy",
    "auc": "AUC",
}


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion cells must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion(predictions, labels) -> ConfusionMatrix:
    pred = np.asarray(predictions, dtype=bool)
    true = np.asarray(labels, dtype=bool)
    if pred.shape != true.shape or pred.ndim != 1:
        raise ValueError(f"length mismatch: {pred.shape} predictions vs {true.shape} labels")
    if pred.size == 0:
        raise ValueError("confusion matrix of empty input")
    return ConfusionMatrix(
        tp=int(np.sum(pred & true)),
        fp=int(np.sum(pred & ~true)),
        fn=int(np.sum(~pred & true)),
        tn=int(np.sum(~pred & ~true)),
    )


def _ratio(num, den):
    return None if den == 0 else num / den


def rates(cm: ConfusionMatrix) -> dict[str, float | None]:
    """Sensitivity, specificity, PPV, NPV and accuracy.

    A rate whose denominator is zero is reported as ``None`` (undefined).
    """
    return {
        "sensitivity": _ratio(cm.tp, cm.tp + cm.fn),
        "specificity": _ratio(cm.tn, cm.tn + cm.fp),
        "ppv": _ratio(cm.tp, cm.tp + cm.fp),
        "npv": _ratio(cm.tn, cm.tn + cm.fn),
        "accuracy": _ratio(cm.tp + cm.tn, cm.total),
    }


class ScoredLabel(NamedTuple):
    score: float
    label: bool


@dataclass(frozen=True)
class RocCurve:
    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(a), float(b)) for a, b in self.points)
        if len(pts) < 2 or pts[0] != (0.0, 0.0) or pts[-1] != (1.0, 1.0):
            raise ValueError("ROC curve must run from (0, 0) to (1, 1)")
        for (f0, t0), (f1, t1) in zip(pts, pts[1:]):
            if f1 < f0 or t1 < t0:
                raise ValueError("ROC coordinates must be non-decreasing")
        object.__setattr__(self, "points", pts)

    @property
    def fpr(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def tpr(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


def roc(scores, labels=None) -> RocCurve:
    """Sweep thresholds over the distinct scores, highest first.

    At threshold t every item with score >= t is called positive.  Accepts
    parallel ``scores``/``labels`` vectors or a single sequence of
    :class:`ScoredLabel` pairs.
    """
    if labels is None:
        pairs = list(scores)
        scores = [p[0] for p in pairs]
        labels = [p[1] for p in pairs]
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=bool)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("scores and labels must be equal-length vectors")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs at least one positive and one negative label")
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    tp = np.cumsum(y)
    fp = np.cumsum(~y)
    # last index of each run of equal scores
    ends = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    points = [(0.0, 0.0)]
    for i in ends:
        points.append((fp[i] / n_neg, tp[i] / n_pos))
    points.append((1.0, 1.0))
    deduped = [points[0]]
    for pt in points[1:]:
        if pt != deduped[-1]:
            deduped.append(pt)
    return RocCurve(tuple(deduped))


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under the curve."""
    x, y = curve.fpr, curve.tpr
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2.0))


def roc_auc(scores, labels=None) -> float:
    return auc(roc(scores, labels))


def percent(value: float | None) -> str:
    """Format a rate as a percentage with one decimal, rounding half away from zero."""
    if value is None:
        return "undefined"
    d = Decimal(repr(value)) * 100
    return str(d.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def report_rows(cm: ConfusionMatrix, auc_value: float | None = None) -> dict[str, float | None]:
    """Rates plus AUC as one ordered mapping."""
    out = dict(rates(cm))
    out["auc"] = auc_value
    return out


def _fmt_value(name, value):
    if value is None:
        return "undefined"
    if name == "auc":
        return f"{value:.2f}"
    return percent(value)


def report_csv(report: Mapping[str, float | None], extra: Mapping[str, object] | None = None) -> str:
    """``metric,value`` rows; rates as fractions, undefined values as ``undefined``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric", "value"])
    for key, value in (extra or {}).items():
        w.writerow([key, value])
    for key, value in report.items():
        w.writerow([key, "undefined" if value is None else repr(float(value))])
    return buf.getvalue()


def report_table(columns: Mapping[str, Mapping[str, float | None]]) -> str:
    """Plain-text table with one column per dataset (e.g. Validation, Testing).

    Rates print as percentages with one decimal; AUC with two decimals.
    """
    names = list(columns)
    keys = [k for k in (*RATE_NAMES, "auc") if any(k in col for col in columns.values())]
    label_w = max(len(_LABELS[k]) for k in keys)
    col_w = max(10, *(len(n) for n in names))
    lines = ["Model Accuracy", f"{'':<{label_w}}  " + "  ".join(f"{n:>{col_w}}" for n in names)]
    for k in keys:
        cells = [_fmt_value(k, columns[n].get(k)) for n in names]
        lines.append(f"{_LABELS[k]:<{label_w}}  " + "  ".join(f"{c:>{col_w}}" for c in cells))
    return "\n".join(lines) + "\n"
