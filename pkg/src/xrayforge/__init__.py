"""xrayforge: blended-face forgery training data with ground-truth boundary maps.

The package synthesizes composite face images from a corpus of real face
crops by landmark-matched donor search, mask deformation and feathering,
color correction, and alpha or gradient-domain blending.  Every composite
carries its exact blending-boundary map (4 * M * (1 - M) of the final soft
mask), so detectors can be trained and audited against ground truth that
never touched a manipulation method.  Forensic map rendering (noise, ELA)
and detector scoring (AUC / AP / EER) round out the toolkit.
"""

from .compositing import color_transfer_means, poisson_blend, solve_poisson
from .core import (
    BLENDED,
    REAL,
    GenerationParams,
    Sample,
    sample_rng,
    sample_seed_sequence,
    validate_image,
    validate_landmarks,
    validate_mask,
)
from .errors import XrayForgeError
from .forensics import ForensicMap, error_level_analysis, noise_residual
from .interp import bilinear_sample, resize_bilinear
from .io import (
    load_image,
    load_landmarks,
    load_map,
    save_image,
    save_landmarks,
    save_map,
)
from .landmarks import (
    Corpus,
    CorpusEntry,
    SimilarityTransform,
    estimate_similarity,
    find_foreground,
    landmark_distance,
    ranked_candidates,
)
from .maskgen import blur_mask, deform_mask, feather_mask, hull_mask
from .metrics import (
    ScoredSet,
    accuracy_at_half,
    average_precision,
    equal_error_rate,
    pixel_cross_entropy,
    read_scores_jsonl,
    roc_auc,
    xray_to_score,
)
from .pipeline import (
    Manifest,
    generate_dataset,
    generate_indexed,
    generate_sample,
    load_corpus,
    read_manifest,
    write_manifest,
)
from .synthcorpus import synth_corpus
from .xray import alpha_blend, compute_xray, is_trivial, soften_mask

__version__ = "0.1.0"

__all__ = [
    "BLENDED",
    "REAL",
    "Corpus",
    "CorpusEntry",
    "ForensicMap",
    "GenerationParams",
    "Manifest",
    "Sample",
    "ScoredSet",
    "SimilarityTransform",
    "XrayForgeError",
    "__version__",
    "accuracy_at_half",
    "alpha_blend",
    "average_precision",
    "bilinear_sample",
    "blur_mask",
    "color_transfer_means",
    "compute_xray",
    "deform_mask",
    "equal_error_rate",
    "error_level_analysis",
    "estimate_similarity",
    "feather_mask",
    "find_foreground",
    "generate_dataset",
    "generate_indexed",
    "generate_sample",
    "hull_mask",
    "is_trivial",
    "landmark_distance",
    "load_corpus",
    "load_image",
    "load_landmarks",
    "load_map",
    "noise_residual",
    "pixel_cross_entropy",
    "poisson_blend",
    "ranked_candidates",
    "read_manifest",
    "read_scores_jsonl",
    "resize_bilinear",
    "roc_auc",
    "sample_rng",
    "sample_seed_sequence",
    "save_image",
    "save_landmarks",
    "save_map",
    "soften_mask",
    "solve_poisson",
    "synth_corpus",
    "validate_image",
    "validate_landmarks",
    "validate_mask",
    "write_manifest",
    "xray_to_score",
]
