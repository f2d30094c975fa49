"""End-to-end dataset generation.

A corpus of real face crops with landmarks goes in; out comes a directory
of composite images, their boundary maps, and a JSON-lines manifest:

    <out>/images/s000000.png     composite (or untouched real) image
    <out>/xrays/s000000.png      boundary map, all-zero for real samples
    <out>/manifest.jsonl         header line + one record per sample

Sample ids encode the generation index (``s%06d``), which together with the
manifest's global seed is enough to regenerate any sample bit-exactly.
All randomness flows from per-sample generators derived from
(global_seed, sample_index), so a dataset's content does not depend on the
worker count or scheduling.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage

from .compositing import color_transfer_means, poisson_blend
from .core import (
    BLENDED,
    REAL,
    GenerationParams,
    Sample,
    sample_rng,
    sample_seed_value,
)
from .errors import (
    CorruptManifestError,
    MissingFileError,
    NoEntriesError,
    UnknownIdError,
    VersionMismatchError,
    XrayForgeError,
)
from .interp import bilinear_sample, resize_bilinear
from .io import (
    LANDMARK_SUFFIX,
    landmark_path_for,
    load_image,
    load_landmarks,
    save_image,
    save_map,
)
from .landmarks import (
    Corpus,
    CorpusEntry,
    SimilarityTransform,
    estimate_similarity,
    ranked_candidates,
)
from .maskgen import deform_mask, feather_mask, hull_mask
from .xray import alpha_blend, compute_xray

MANIFEST_VERSION = "xrayforge/1"
MANIFEST_NAME = "manifest.jsonl"
IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg")


def load_corpus(root: str | os.PathLike) -> Corpus:
    """Scan a directory of ``<id>.<png|jpg>`` + ``<id>.<ext>.landmarks.json`` pairs.

    Images without a landmark file are skipped and recorded in
    ``Corpus.skipped``; a malformed landmark file is an error.
    """
    root = os.fspath(root)
    if not os.path.isdir(root):
        raise NoEntriesError(f"corpus root {root!r} is not a directory")
    entries: list[CorpusEntry] = []
    skipped: list[str] = []
    for name in sorted(os.listdir(root)):
        base, ext = os.path.splitext(name)
        if ext.lower() not in IMAGE_EXTENSIONS:
            continue
        image_path = os.path.join(root, name)
        lm_path = landmark_path_for(image_path)
        if not os.path.isfile(lm_path):
            skipped.append(f"{name}: no {name}{LANDMARK_SUFFIX}")
            continue
        with PILImage.open(image_path) as im:
            width, height = im.size
        points, source = load_landmarks(lm_path, width=width, height=height)
        entries.append(CorpusEntry(id=base, image_path=image_path,
                                   landmarks=points, source=source))
    if not entries:
        raise NoEntriesError(f"no usable (image, landmarks) pairs under {root!r}")
    return Corpus.build(entries, skipped, root=root)


def is_real_index(sample_index: int, real_fraction: float) -> bool:
    """Deterministic real/blended allocation for one sample index.

    True when the running target count floor(f * (i + 1)) advances at this
    index; any prefix 0..n-1 then contains floor(f * n) real samples, which
    keeps the realized ratio within one sample of ``real_fraction``.
    """
    f = float(real_fraction)
    return math.floor(f * (sample_index + 1)) > math.floor(f * sample_index)


def _scaled_landmarks(points: np.ndarray, src_w: int, src_h: int, size: int) -> np.ndarray:
    """Map landmark coordinates through a bilinear resize to ``size`` square."""
    points = np.asarray(points, dtype=np.float64)
    out = np.empty_like(points)
    out[:, 0] = (points[:, 0] + 0.5) * (size / src_w) - 0.5
    out[:, 1] = (points[:, 1] + 0.5) * (size / src_h) - 0.5
    return np.clip(out, 0.0, size - 1.0)


def _load_scaled(entry: CorpusEntry, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Entry's image resized to size x size, with landmarks mapped along."""
    img = load_image(entry.image_path)
    h, w = img.shape[:2]
    points = _scaled_landmarks(entry.landmarks, w, h, size)
    if (h, w) != (size, size):
        img = np.clip(resize_bilinear(img, size, size), 0.0, 1.0)
    return img, points


def align_donor(
    fg: np.ndarray,
    fg_landmarks: np.ndarray,
    bg_landmarks: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, SimilarityTransform]:
    """Warp the donor so its landmarks sit on the background's.

    Uses the least-squares similarity transform; the warped image is
    resampled bilinearly (border pixels replicate).  Returns the warped
    image, the mapped landmarks, and the transform itself.
    """
    if np.array_equal(fg_landmarks, bg_landmarks):
        ident = SimilarityTransform(1.0, np.eye(2), np.zeros(2))
        return fg.copy(), np.asarray(fg_landmarks, np.float64).copy(), ident
    t = estimate_similarity(fg_landmarks, bg_landmarks)
    h, w = fg.shape[:2]
    gx, gy = np.meshgrid(np.arange(w, dtype=np.float64),
                         np.arange(h, dtype=np.float64))
    src = t.apply_inverse(np.stack([gx, gy], axis=-1))
    warped = bilinear_sample(fg, src[..., 0], src[..., 1])
    return np.clip(warped, 0.0, 1.0), t.apply(fg_landmarks), t


def _sample_paths(sample_id: str) -> tuple[str, str]:
    return f"images/{sample_id}.png", f"xrays/{sample_id}.png"


def generate_sample(
    bg_id: str,
    corpus: Corpus,
    params: GenerationParams,
    sample_index: int,
    rng: np.random.Generator | None = None,
) -> tuple[Sample, np.ndarray, np.ndarray]:
    """Produce one training sample: (record, image, boundary map).

    Randomness comes from a generator derived from
    (params.global_seed, sample_index); passing ``rng`` explicitly lets the
    caller continue an already-derived stream.  Real indices (see
    :func:`is_real_index`) emit the background resized and untouched, with
    an all-zero map.  Blended indices run donor search, mask construction,
    color correction, and blending; a donor whose composite fails is
    replaced by the next-ranked candidate, up to 3 attempts.
    """
    if rng is None:
        rng = sample_rng(params.global_seed, sample_index)
    sample_id = f"s{sample_index:06d}"
    img_rel, xray_rel = _sample_paths(sample_id)
    size = params.output_size
    bg_entry = corpus.get(bg_id)
    bg_img, bg_points = _load_scaled(bg_entry, size)

    if is_real_index(sample_index, params.real_fraction):
        sample = Sample(
            id=sample_id, label=REAL, blended_path=img_rel, xray_path=xray_rel,
            fg_source=bg_id, bg_source=bg_id, params=params,
            seed=sample_seed_value(params.global_seed, sample_index),
        )
        return sample, bg_img, np.zeros((size, size))

    donors = ranked_candidates(bg_id, corpus, params, rng)
    first = int(rng.integers(len(donors)))
    last_error: XrayForgeError | None = None
    for attempt in range(min(3, len(donors))):
        fg_id = donors[(first + attempt) % len(donors)]
        try:
            fg_img, fg_points = _load_scaled(corpus.get(fg_id), size)
            fg_img, _, _ = align_donor(fg_img, fg_points, bg_points)
            mask = hull_mask(bg_points, size, size)
            mask = deform_mask(mask, params, rng)
            mask = feather_mask(mask, params, rng)
            if params.color_correct:
                fg_img = color_transfer_means(fg_img, bg_img, mask)
            if params.blend_mode == "poisson":
                blended = poisson_blend(fg_img, bg_img, mask)
            else:
                blended = alpha_blend(fg_img, bg_img, mask)
            xray = compute_xray(mask)
        except XrayForgeError as exc:
            last_error = exc
            continue
        sample = Sample(
            id=sample_id, label=BLENDED, blended_path=img_rel, xray_path=xray_rel,
            fg_source=fg_id, bg_source=bg_id, params=params,
            seed=sample_seed_value(params.global_seed, sample_index),
        )
        return sample, blended, xray
    raise XrayForgeError(
        f"sample {sample_id}: no donor worked after {min(3, len(donors))} attempts; "
        f"last error: {type(last_error).__name__}: {last_error}"
    )


def generate_indexed(
    sample_index: int,
    corpus: Corpus,
    params: GenerationParams,
) -> tuple[Sample, np.ndarray, np.ndarray]:
    """Generate sample ``sample_index`` with its background drawn by the stream.

    This is the unit of work ``generate_dataset`` schedules: the background
    id is the first draw of the per-sample stream, so the whole sample is a
    function of (corpus, params, sample_index) alone.
    """
    rng = sample_rng(params.global_seed, sample_index)
    ids = corpus.ids()
    bg_id = ids[int(rng.integers(len(ids)))]
    return generate_sample(bg_id, corpus, params, sample_index, rng=rng)


@dataclass(frozen=True)
class Manifest:
    version: str
    params: GenerationParams
    samples: tuple[Sample, ...]
    corpus_root: str = ""
    base_dir: str = ""             # directory holding the manifest file
    skipped: tuple[str, ...] = ()  # generation-time skip reports, not serialized

    def __len__(self) -> int:
        return len(self.samples)

    def get(self, sample_id: str) -> Sample:
        for s in self.samples:
            if s.id == sample_id:
                return s
        raise UnknownIdError(f"no sample {sample_id!r} in manifest")

    def resolve(self, rel_path: str) -> str:
        return os.path.join(self.base_dir, rel_path) if self.base_dir else rel_path

    def counts(self) -> tuple[int, int]:
        n_real = sum(1 for s in self.samples if s.label == REAL)
        return n_real, len(self.samples) - n_real

    def validate(self) -> None:
        ids = [s.id for s in self.samples]
        if len(set(ids)) != len(ids):
            raise CorruptManifestError("duplicate sample ids")
        n_real, _ = self.counts()
        target = self.params.real_fraction * len(self.samples)
        if abs(n_real - target) > 1.0 + 1e-9:
            raise CorruptManifestError(
                f"{n_real} real of {len(self.samples)} violates real_fraction "
                f"{self.params.real_fraction} (±1)"
            )


def write_manifest(manifest: Manifest, path: str | os.PathLike) -> None:
    """Serialize as JSON-lines: header, then one record per sample.

    The write is atomic: content lands in a temp file first and is renamed
    over the destination.
    """
    path = os.fspath(path)
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            header = {
                "version": manifest.version,
                "params": manifest.params.to_dict(),
                "corpus": manifest.corpus_root,
            }
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            for s in manifest.samples:
                fh.write(json.dumps(s.to_dict(), sort_keys=True) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_manifest(path: str | os.PathLike) -> Manifest:
    """Parse and fully validate a manifest; referenced files must exist."""
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise MissingFileError(f"no manifest at {path!r}")
    base_dir = os.path.dirname(os.path.abspath(path))
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in (l.strip() for l in fh) if ln]
    if not lines:
        raise CorruptManifestError(f"{path}: empty file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CorruptManifestError(f"{path}: bad header: {exc}") from None
    if not isinstance(header, dict) or "version" not in header:
        raise CorruptManifestError(f"{path}: header lacks a version field")
    if header["version"] != MANIFEST_VERSION:
        raise VersionMismatchError(
            f"{path}: version {header['version']!r}, expected {MANIFEST_VERSION!r}"
        )
    try:
        params = GenerationParams.from_dict(header["params"])
    except (KeyError, TypeError, XrayForgeError) as exc:
        raise CorruptManifestError(f"{path}: bad params: {exc}") from None
    samples = []
    for ln, line in enumerate(lines[1:], start=2):
        try:
            rec = Sample.from_dict(json.loads(line))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError, XrayForgeError) as exc:
            raise CorruptManifestError(f"{path}:{ln}: bad sample record: {exc}") from None
        if rec.params != params:
            raise CorruptManifestError(f"{path}:{ln}: sample params differ from header")
        samples.append(rec)
    manifest = Manifest(
        version=MANIFEST_VERSION, params=params, samples=tuple(samples),
        corpus_root=str(header.get("corpus", "")), base_dir=base_dir,
    )
    manifest.validate()
    for s in samples:
        for rel in (s.blended_path, s.xray_path):
            if not os.path.isfile(manifest.resolve(rel)):
                raise MissingFileError(f"{path}: {s.id} references missing file {rel!r}")
    return manifest


# per-process state for pool workers, set once by the initializer
_WORKER: dict = {}


def _init_worker(corpus: Corpus, params: GenerationParams, out_dir: str) -> None:
    _WORKER["corpus"] = corpus
    _WORKER["params"] = params
    _WORKER["out_dir"] = out_dir


def _run_indexed(sample_index: int) -> tuple[int, dict | None, str | None]:
    return _materialize(
        sample_index, _WORKER["corpus"], _WORKER["params"], _WORKER["out_dir"]
    )


def _materialize(
    sample_index: int,
    corpus: Corpus,
    params: GenerationParams,
    out_dir: str,
) -> tuple[int, dict | None, str | None]:
    """Generate one sample and write its rasters; never raises."""
    try:
        sample, img, xray = generate_indexed(sample_index, corpus, params)
        save_image(os.path.join(out_dir, sample.blended_path), img)
        save_map(os.path.join(out_dir, sample.xray_path), xray)
        return sample_index, sample.to_dict(), None
    except XrayForgeError as exc:
        return sample_index, None, f"s{sample_index:06d}: {type(exc).__name__}: {exc}"


def generate_dataset(
    corpus: Corpus,
    n: int,
    params: GenerationParams,
    workers: int = 1,
    out_dir: str | os.PathLike = ".",
) -> Manifest:
    """Materialize ``n`` samples (indices 0..n-1) and their manifest.

    Output content is independent of ``workers``; scheduling only changes
    wall time.  Samples that fail all donor retries are skipped and
    reported in ``Manifest.skipped``.
    """
    if n < 1:
        raise CorruptManifestError(f"need n >= 1, got {n}")
    if len(corpus) == 0:
        raise NoEntriesError("corpus is empty")
    out_dir = os.fspath(out_dir)
    os.makedirs(os.path.join(out_dir, "images"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "xrays"), exist_ok=True)

    if workers <= 1:
        results = [_materialize(i, corpus, params, out_dir) for i in range(n)]
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(corpus, params, out_dir),
        ) as pool:
            results = list(pool.map(_run_indexed, range(n), chunksize=8))

    samples, reports = [], []
    for _, rec, report in sorted(results, key=lambda r: r[0]):
        if rec is not None:
            samples.append(Sample.from_dict(rec))
        else:
            reports.append(report)
    manifest = Manifest(
        version=MANIFEST_VERSION, params=params, samples=tuple(samples),
        corpus_root=corpus.root, base_dir=os.path.abspath(out_dir),
        skipped=tuple(reports),
    )
    write_manifest(manifest, os.path.join(out_dir, MANIFEST_NAME))
    return manifest
