"""
Evaluation products: ROC curves, AUC, confusion matrices, error histograms
and training summaries.
"""
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from sklearn import metrics

from cogsense.exceptions import InputError


@dataclass(frozen=True)
class RocCurve:
    points: List[Tuple[float, float]]
    thresholds: List[float]

    @property
    def p_fa(self):
        return np.array([point[0] for point in self.points])

    @property
    def p_d(self):
        return np.array([point[1] for point in self.points])

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class ConfusionMatrix:
    true_positive: int
    false_positive: int
    false_negative: int
    true_negative: int

    @property
    def counts(self):
        """2x2 counts; rows are predictions (1, 0), columns are labels (1, 0)."""
        return [
            [self.true_positive, self.false_positive],
            [self.false_negative, self.true_negative],
        ]

    @property
    def total(self):
        return (
            self.true_positive
            + self.false_positive
            + self.false_negative
            + self.true_negative
        )

    @property
    def percentages(self):
        """Counts as percentages of all samples."""
        total = self.total
        if not total:
            return [[0.0, 0.0], [0.0, 0.0]]
        return [[100.0 * count / total for count in row] for row in self.counts]

    @property
    def accuracy(self):
        if not self.total:
            return math.nan
        return (self.true_positive + self.true_negative) / self.total

    @property
    def detection_rate(self):
        positives = self.true_positive + self.false_negative
        return self.true_positive / positives if positives else math.nan

    @property
    def false_alarm_rate(self):
        negatives = self.false_positive + self.true_negative
        return self.false_positive / negatives if negatives else math.nan


@dataclass(frozen=True)
class ErrorHistogram:
    bin_edges: np.ndarray
    counts: np.ndarray


def _labels(labels):
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise InputError("Labels must be one-dimensional.")
    if not np.isin(labels, (0, 1)).all():
        raise InputError("Labels must be 0 or 1.")
    return labels.astype(int)


def roc_from_scores(scores, labels):
    """
    Exact ROC sweep over every distinct score.

    A window counts as positive at threshold ``t`` when its score is ``>= t``.
    The curve starts at ``(0, 0)`` (threshold ``+inf``) and ends at ``(1, 1)``
    (threshold ``-inf``).
    """
    scores = np.asarray(scores, dtype=float)
    labels = _labels(labels)
    if scores.shape != labels.shape:
        raise InputError(
            "scores and labels differ in length (%d vs %d)." % (len(scores), len(labels))
        )
    if np.isnan(scores).any():
        raise InputError("Scores must not contain NaN.")

    positives = int(labels.sum())
    negatives = len(labels) - positives
    if not positives or not negatives:
        raise InputError("ROC curves need both classes among the labels.")

    p_fa, p_d, cuts = metrics.roc_curve(labels, scores, drop_intermediate=False)
    # The sweep closes with every window declared positive.
    p_fa = np.append(p_fa, 1.0)
    p_d = np.append(p_d, 1.0)
    thresholds = [math.inf] + cuts[1:].tolist() + [-math.inf]

    return RocCurve(
        points=list(zip(p_fa.tolist(), p_d.tolist())), thresholds=thresholds
    )


def auc(curve):
    """Trapezoidal area under ``curve``."""
    return float(metrics.auc(curve.p_fa, curve.p_d))


def confusion(predictions, labels):
    predictions = _labels(predictions)
    labels = _labels(labels)
    if predictions.shape != labels.shape:
        raise InputError(
            "predictions and labels differ in length (%d vs %d)."
            % (len(predictions), len(labels))
        )
    if not len(labels):
        return ConfusionMatrix(0, 0, 0, 0)
    # Rows are true labels, columns predictions, both ordered (0, 1).
    (tn, fp), (fn, tp) = metrics.confusion_matrix(labels, predictions, labels=[0, 1])
    return ConfusionMatrix(
        true_positive=int(tp),
        false_positive=int(fp),
        false_negative=int(fn),
        true_negative=int(tn),
    )


def rates(predictions, labels):
    """Returns ``(p_d, p_fa)`` for hard predictions."""
    matrix = confusion(predictions, labels)
    return matrix.detection_rate, matrix.false_alarm_rate


def error_histogram(errors, n_bins):
    errors = np.asarray(errors, dtype=float).ravel()
    if errors.size == 0:
        raise InputError("An error histogram needs at least one error value.")
    if isinstance(n_bins, bool) or not isinstance(n_bins, (int, np.integer)) or n_bins < 1:
        raise InputError("n_bins must be an integer >= 1, got %r." % (n_bins,))

    low, high = float(errors.min()), float(errors.max())
    if low == high:
        low, high = low - 0.5, high + 0.5
    counts, edges = np.histogram(errors, bins=n_bins, range=(low, high))
    return ErrorHistogram(bin_edges=edges, counts=counts)


def summarize_training(record):
    """Best epoch, its validation error, and the final gradient norm."""
    if record is None or not len(record):
        return {
            "epochs": 0,
            "best_epoch": 0,
            "best_val_mse": None,
            "final_grad_norm": None,
        }

    by_epoch = {item.epoch: item for item in record.epochs}
    best = by_epoch.get(record.best_epoch)
    best_val = None
    if best is not None and not math.isnan(best.val_mse):
        best_val = best.val_mse
    final = record.epochs[-1].grad_norm
    return {
        "epochs": len(record),
        "best_epoch": record.best_epoch,
        "best_val_mse": best_val,
        "final_grad_norm": None if math.isnan(final) else final,
    }


def validate_curve(curve):
    """Raises ``InputError`` unless ``curve`` is a well-formed ROC curve."""
    p_fa, p_d = curve.p_fa, curve.p_d
    if len(curve) < 2 or len(curve.thresholds) != len(curve):
        raise InputError("A ROC curve needs matching points and thresholds.")
    if (np.diff(p_fa) < 0).any() or (np.diff(p_d) < 0).any():
        raise InputError("ROC points must be non-decreasing.")
    if tuple(curve.points[0]) != (0.0, 0.0) or tuple(curve.points[-1]) != (1.0, 1.0):
        raise InputError("ROC curves must run from (0, 0) to (1, 1).")
    if ((p_fa < 0) | (p_fa > 1) | (p_d < 0) | (p_d > 1)).any():
        raise InputError("ROC rates must lie in [0, 1].")


def validate_rate(value, name):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return
    if not 0.0 <= value <= 1.0:
        raise InputError("%s must lie in [0, 1], got %r." % (name, value))
