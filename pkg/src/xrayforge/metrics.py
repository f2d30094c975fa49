"""Detector scoring: AUC, AP, EER over score/label pairs.

Also provides the pixel-level cross-entropy used as an X-ray quality
measure, and a helper collapsing an X-ray map to a scalar score so
generated datasets can be sanity-checked without training a detector.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CorruptManifestError,
    DimensionMismatchError,
    NoPositivesError,
    OneClassOnlyError,
)


@dataclass(frozen=True)
class ScoredSet:
    scores: tuple[float, ...]
    labels: tuple[int, ...]
    ids: tuple[str, ...] | None = None
    groups: tuple[str, ...] | None = None

    def __post_init__(self):
        if len(self.scores) != len(self.labels):
            raise DimensionMismatchError(
                f"{len(self.scores)} scores vs {len(self.labels)} labels"
            )
        if any(l not in (0, 1) for l in self.labels):
            raise ValueError("labels must be 0 or 1")
        if any(not math.isfinite(s) for s in self.scores):
            raise ValueError("scores must be finite")
        for extra in (self.ids, self.groups):
            if extra is not None and len(extra) != len(self.scores):
                raise DimensionMismatchError("id/group column length mismatch")

    def __len__(self) -> int:
        return len(self.scores)

    @staticmethod
    def from_pairs(scores, labels) -> "ScoredSet":
        return ScoredSet(
            scores=tuple(float(s) for s in scores),
            labels=tuple(int(l) for l in labels),
        )

    def grouped(self) -> "ScoredSet":
        """Collapse to one record per group: mean score, shared label.

        Records without a group key pass through individually.
        """
        if self.groups is None:
            return self
        order: list[str] = []
        acc: dict[str, list] = {}
        loose_scores, loose_labels = [], []
        for i, g in enumerate(self.groups):
            if not g:
                loose_scores.append(self.scores[i])
                loose_labels.append(self.labels[i])
                continue
            if g not in acc:
                acc[g] = [0.0, 0, self.labels[i]]
                order.append(g)
            if self.labels[i] != acc[g][2]:
                raise CorruptManifestError(f"group {g!r} mixes labels")
            acc[g][0] += self.scores[i]
            acc[g][1] += 1
        scores = [acc[g][0] / acc[g][1] for g in order] + loose_scores
        labels = [acc[g][2] for g in order] + loose_labels
        return ScoredSet.from_pairs(scores, labels)


def _split(s: ScoredSet) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(s.scores, dtype=np.float64)
    labels = np.asarray(s.labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    if len(pos) == 0 or len(neg) == 0:
        raise OneClassOnlyError("need at least one positive and one negative")
    return pos, neg


def roc_auc(s: ScoredSet) -> float:
    """Mann-Whitney statistic: P(pos score > neg score), ties counted 0.5."""
    pos, neg = _split(s)
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return float((wins + 0.5 * ties) / (len(pos) * len(neg)))


def average_precision(s: ScoredSet) -> float:
    """Mean precision at each positive's rank, scores descending.

    Equal scores keep their original relative order.
    """
    labels = np.asarray(s.labels)
    if not (labels == 1).any():
        raise NoPositivesError("no positive labels")
    scores = np.asarray(s.scores, dtype=np.float64)
    order = np.argsort(-scores, kind="stable")
    ranked = labels[order]
    hits = np.cumsum(ranked)
    ranks = np.arange(1, len(ranked) + 1)
    precisions = hits[ranked == 1] / ranks[ranked == 1]
    return float(precisions.mean())


def equal_error_rate(s: ScoredSet) -> tuple[float, float]:
    """Operating point where false-positive and false-negative rates meet.

    Sweeps every distinct score as a threshold (predict positive when
    score >= t) and returns (eer, threshold) minimizing |FPR - FNR|, with
    eer the midpoint of the two rates there.  The lowest qualifying
    threshold wins ties.
    """
    pos, neg = _split(s)
    best = None
    for t in sorted(set(s.scores)):
        fpr = float((neg >= t).mean())
        fnr = float((pos < t).mean())
        gap = abs(fpr - fnr)
        if best is None or gap < best[0] - 1e-15:
            best = (gap, (fpr + fnr) / 2.0, t)
    return best[1], best[2]


def pixel_cross_entropy(pred: np.ndarray, gt: np.ndarray) -> float:
    """Mean per-pixel binary cross-entropy between two maps.

    Predictions are clipped to [1e-7, 1 - 1e-7] before the log.
    """
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise DimensionMismatchError(f"pred {pred.shape} vs gt {gt.shape}")
    eps = 1e-7
    p = np.clip(pred, eps, 1.0 - eps)
    return float(-(gt * np.log(p) + (1.0 - gt) * np.log(1.0 - p)).mean())


def xray_to_score(xray: np.ndarray) -> float:
    """Collapse an X-ray map to a scalar: the mean pixel value."""
    return float(np.asarray(xray, dtype=np.float64).mean())


def accuracy_at_half(s: ScoredSet) -> float:
    """Fraction of records classified correctly at the fixed threshold 0.5."""
    scores = np.asarray(s.scores, dtype=np.float64)
    labels = np.asarray(s.labels)
    return float(((scores >= 0.5).astype(int) == labels).mean())


def read_scores_jsonl(path) -> ScoredSet:
    """Load a scored set from JSON-lines records {id, score, label, group?}."""
    ids, scores, labels, groups = [], [], [], []
    any_group = False
    with open(path, "r", encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptManifestError(f"{path}:{ln}: bad JSON: {exc}") from None
            if not isinstance(rec, dict) or "score" not in rec or "label" not in rec:
                raise CorruptManifestError(f"{path}:{ln}: need score and label fields")
            try:
                scores.append(float(rec["score"]))
                labels.append(int(rec["label"]))
            except (TypeError, ValueError):
                raise CorruptManifestError(f"{path}:{ln}: non-numeric score/label") from None
            ids.append(str(rec.get("id", ln)))
            g = rec.get("group")
            if g is not None:
                any_group = True
            groups.append("" if g is None else str(g))
    if not scores:
        raise CorruptManifestError(f"{path}: no records")
    return ScoredSet(
        scores=tuple(scores),
        labels=tuple(labels),
        ids=tuple(ids),
        groups=tuple(groups) if any_group else None,
    )
