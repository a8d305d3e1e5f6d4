"""Independent reference computations used to check the library.

Written deliberately naively: direct formulas, exhaustive enumeration,
no shared code with the package under test.
"""

from fractions import Fraction
from itertools import product
import math


def gini_exact(labels):
    n = len(labels)
    p1 = Fraction(sum(labels), n)
    p0 = 1 - p1
    return 1 - p0 * p0 - p1 * p1


def brute_force_split(X, y, min_split, min_bucket):
    """Exhaustive (feature, midpoint) search; returns (feature, threshold, gain) or None.

    Ties keep the first candidate seen: lowest feature, then lowest threshold.
    """
    n = len(y)
    if n < min_split or len(set(y)) < 2:
        return None
    parent = gini_exact(y)
    best = None
    for f in range(len(X[0])):
        values = sorted(set(row[f] for row in X))
        for a, b in zip(values, values[1:]):
            thr = (a + b) / 2
            left = [y[i] for i in range(n) if X[i][f] < thr]
            right = [y[i] for i in range(n) if not X[i][f] < thr]
            if len(left) < min_bucket or len(right) < min_bucket:
                continue
            gain = parent - Fraction(len(left), n) * gini_exact(left) - Fraction(len(right), n) * gini_exact(right)
            if gain > 0 and (best is None or gain > best[2]):
                best = (f, thr, gain)
    return best


def mann_whitney_auc(scores, labels):
    """(concordant + 0.5 * tied) / (P * N) over all positive/negative pairs."""
    pos = [s for s, l in zip(scores, labels) if l]
    neg = [s for s, l in zip(scores, labels) if not l]
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


def pearson(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    return sxy / math.sqrt(sxx * syy)


def round_half_up_tenths(num, den):
    """Exact percentage of num/den rounded half-up to one decimal, as tenths."""
    tenths = Fraction(num * 1000, den)
    return int(math.floor(tenths + Fraction(1, 2)))


def confusion_matrices_matching(n, sens, spec, ppv, npv):
    """All (tp, fp, fn, tn) summing to n whose rounded percentages match.

    Targets are given in tenths of a percent, e.g. 800 for 80.0.
    """
    found = []
    for tp in range(n + 1):
        for fn in range(n + 1 - tp):
            if tp + fn == 0 or round_half_up_tenths(tp, tp + fn) != sens:
                continue
            for fp in range(n + 1 - tp - fn):
                tn = n - tp - fn - fp
                if tn + fp == 0 or tp + fp == 0 or tn + fn == 0:
                    continue
                if (
                    round_half_up_tenths(tn, tn + fp) == spec
                    and round_half_up_tenths(tp, tp + fp) == ppv
                    and round_half_up_tenths(tn, tn + fn) == npv
                ):
                    found.append((tp, fp, fn, tn))
    return found


def leaf_errors(counts):
    n_false, n_true = counts
    return n_false if n_true > n_false else n_true


def all_prunings(node):
    """Every subtree obtainable by collapsing internal nodes, as (errors, leaves) pairs."""
    options = {(leaf_errors(node.class_counts), 1)}
    if node.split is not None:
        for (el, ll), (er, lr) in product(all_prunings(node.left), all_prunings(node.right)):
            options.add((el + er, ll + lr))
    return options
