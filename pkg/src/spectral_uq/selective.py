"""Selective-answering evaluation: rejection curves, AUARC, AUROC.

Questions are ranked by uncertainty; rejecting the most uncertain first
traces an accuracy-rejection curve (ARC).  AUARC is its mean height on the
uniform rejection grid k/n, k = 0..n-1.  AUROC is the probability that a
randomly chosen incorrect answer carries higher uncertainty than a
randomly chosen correct one (ties count half).  Both are rank statistics:
any strictly monotone rescaling of the scores leaves them unchanged.
"""

from dataclasses import dataclass

import numpy as np


class UndefinedMetricError(ValueError):
    """AUROC is undefined when all labels agree; never reported as a number."""


@dataclass(eq=False)
class CurvePoints:
    """Accuracy at each rejection fraction k/n, k = 0..n-1, ascending."""

    fractions: np.ndarray
    accuracies: np.ndarray

    def __len__(self):
        return len(self.fractions)


def _sorted_correct(uncertainties, correct, question_ids):
    """Correctness flags ordered by descending uncertainty.

    Ties break by question_id (lexicographic), then by input position, so
    the curve is reproducible bit-for-bit.
    """
    u = np.asarray(uncertainties, dtype=np.float64)
    c = np.asarray(correct, dtype=bool)
    if u.shape != c.shape or u.ndim != 1:
        raise ValueError("uncertainties and correctness must be parallel 1-D arrays")
    if u.size == 0:
        raise ValueError("need at least one row")
    if not np.isfinite(u).all():
        raise ValueError("uncertainties must be finite")
    if question_ids is None:
        order = sorted(range(u.size), key=lambda i: (-u[i], i))
    else:
        order = sorted(range(u.size), key=lambda i: (-u[i], question_ids[i]))
    return c[np.array(order)]


def arc_curve(uncertainties, correct, question_ids=None):
    """Accuracy-rejection curve: reject the k most-uncertain, score the rest."""
    ranked = _sorted_correct(uncertainties, correct, question_ids)
    n = ranked.size
    retained = np.cumsum(ranked[::-1])[::-1]  # correct count among rows k..n-1
    accuracies = retained / np.arange(n, 0, -1)
    return CurvePoints(fractions=np.arange(n) / n, accuracies=accuracies)


def auarc(curve):
    """Mean accuracy over the rejection grid (exact rectangle rule)."""
    return float(np.asarray(curve.accuracies).mean())


def oracle_curve(correct):
    """Best achievable ARC: rejections hit only the incorrect answers.

    Accuracy after k rejections is min(1, c / (n - k)) with c correct rows.
    """
    c = np.asarray(correct, dtype=bool)
    if c.size == 0:
        raise ValueError("need at least one row")
    n = c.size
    total = int(c.sum())
    accuracies = np.minimum(1.0, total / np.arange(n, 0, -1))
    return CurvePoints(fractions=np.arange(n) / n, accuracies=accuracies)


def auroc(uncertainties, correct):
    """P(incorrect row outranks correct row), ties at half weight.

    Exact Mann-Whitney counting: results match full pair enumeration.
    Raises UndefinedMetricError when labels are all the same.
    """
    u = np.asarray(uncertainties, dtype=np.float64)
    c = np.asarray(correct, dtype=bool)
    if u.shape != c.shape or u.ndim != 1:
        raise ValueError("uncertainties and correctness must be parallel 1-D arrays")
    u_cor = np.sort(u[c])
    u_inc = u[~c]
    if u_cor.size == 0 or u_inc.size == 0:
        raise UndefinedMetricError(
            "undefined: AUROC needs at least one correct and one incorrect row"
        )
    lo = np.searchsorted(u_cor, u_inc, side="left")
    hi = np.searchsorted(u_cor, u_inc, side="right")
    wins = int(lo.sum())
    ties = int((hi - lo).sum())
    return (wins + 0.5 * ties) / (u_inc.size * u_cor.size)
