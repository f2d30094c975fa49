"""Donor search by landmark similarity, and landmark-driven registration.

A corpus is an immutable collection of (id, image path, landmark set)
entries.  Donor selection ranks a random candidate pool by Euclidean
landmark distance to the background face and picks uniformly among the
nearest ``nn_top_k``; distances are taken on raw pixel coordinates, which
assumes the corpus holds roughly aligned face crops.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import GenerationParams
from .errors import CountMismatchError, EmptyPoolError, UnknownIdError


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    image_path: str
    landmarks: np.ndarray          # (K, 2) float64, read-only
    source: str | None = None      # provenance group, when known


@dataclass(frozen=True)
class Corpus:
    entries: tuple[CorpusEntry, ...]
    index: dict[str, CorpusEntry] = field(default_factory=dict)
    skipped: tuple[str, ...] = ()  # files skipped at load time, for reporting
    root: str = ""                 # directory the corpus was loaded from

    @classmethod
    def build(cls, entries: list[CorpusEntry], skipped: list[str] | None = None,
              root: str = "") -> "Corpus":
        entries = sorted(entries, key=lambda e: e.id)
        return cls(
            entries=tuple(entries),
            index={e.id: e for e in entries},
            skipped=tuple(skipped or ()),
            root=root,
        )

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, entry_id: str) -> CorpusEntry:
        try:
            return self.index[entry_id]
        except KeyError:
            raise UnknownIdError(f"no corpus entry {entry_id!r}") from None

    def ids(self) -> list[str]:
        return [e.id for e in self.entries]


def landmark_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean distance between two landmark sets.

    sqrt of the summed squared coordinate differences over all K points;
    zero iff the sets coincide.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise CountMismatchError(f"landmark sets differ in shape: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def ranked_candidates(
    bg_id: str,
    corpus: Corpus,
    params: GenerationParams,
    rng: np.random.Generator,
) -> list[str]:
    """Candidate donors for ``bg_id``, nearest first.

    Draws a random pool of up to ``nn_pool_size`` entries (excluding the
    background itself, and its provenance group when known), ranks the pool
    by landmark distance with lexicographic id tie-break, and keeps the
    ``nn_top_k`` nearest.
    """
    bg = corpus.get(bg_id)
    candidates = [
        e for e in corpus.entries
        if e.id != bg_id
        and not (
            params.exclude_same_source
            and bg.source is not None
            and e.source == bg.source
        )
    ]
    if not candidates:
        raise EmptyPoolError(f"no donor candidates for {bg_id!r}")
    if len(candidates) > params.nn_pool_size:
        picks = rng.choice(len(candidates), size=params.nn_pool_size, replace=False)
        pool = [candidates[i] for i in sorted(picks)]
    else:
        pool = candidates
    ranked = sorted(pool, key=lambda e: (landmark_distance(e.landmarks, bg.landmarks), e.id))
    return [e.id for e in ranked[: params.nn_top_k]]


def find_foreground(
    bg_id: str,
    corpus: Corpus,
    params: GenerationParams,
    rng: np.random.Generator,
) -> str:
    """Pick a donor id uniformly among the nearest candidates for ``bg_id``."""
    ranked = ranked_candidates(bg_id, corpus, params, rng)
    return ranked[int(rng.integers(len(ranked)))]


@dataclass(frozen=True)
class SimilarityTransform:
    """p -> scale * R @ p + t, with R a pure rotation."""

    scale: float
    rotation: np.ndarray   # (2, 2)
    translation: np.ndarray  # (2,)

    def apply(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        return self.scale * points @ self.rotation.T + self.translation

    def apply_inverse(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        return (points - self.translation) @ self.rotation / self.scale


def estimate_similarity(src: np.ndarray, dst: np.ndarray) -> SimilarityTransform:
    """Least-squares similarity (scale, rotation, translation) src -> dst.

    Closed-form orthogonal-Procrustes solution; minimizes the summed squared
    distance between mapped source points and destination points, so the
    mapped set is never farther from ``dst`` than ``src`` itself was.
    """
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    if src.shape != dst.shape:
        raise CountMismatchError(f"landmark sets differ in shape: {src.shape} vs {dst.shape}")
    mu_s = src.mean(axis=0)
    mu_d = dst.mean(axis=0)
    cs = src - mu_s
    cd = dst - mu_d
    var_s = float(np.sum(cs**2)) / len(src)
    if var_s <= 0.0:
        # all source points coincide; only a translation is identifiable
        return SimilarityTransform(1.0, np.eye(2), mu_d - mu_s)
    cov = cd.T @ cs / len(src)
    u, s, vt = np.linalg.svd(cov)
    d = np.sign(np.linalg.det(u @ vt))
    fix = np.diag([1.0, d])
    rotation = u @ fix @ vt
    scale = float(np.trace(np.diag(s) @ fix)) / var_s
    translation = mu_d - scale * rotation @ mu_s
    return SimilarityTransform(scale, rotation, translation)
