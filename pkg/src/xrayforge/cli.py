"""Command-line surface.

Four subcommands: ``generate`` (materialize a dataset), ``forensics``
(render a noise or ELA map for one image), ``eval`` (score a JSONL file of
detector outputs), ``inspect`` (audit one sample of a manifest).

Options resolve as: command-line flag > environment variable
(XRAYFORGE_OUT, XRAYFORGE_SEED) > --config JSON file > built-in default.
Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
Failures print one JSON object to stderr: {"error": <class>, "message": ...}.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .core import GenerationParams
from .errors import UnknownIdError, UnreadableFileError, XrayForgeError
from .forensics import error_level_analysis, noise_residual
from .io import load_image, load_map, save_map
from .metrics import (
    ScoredSet,
    accuracy_at_half,
    average_precision,
    equal_error_rate,
    read_scores_jsonl,
    roc_auc,
)
from .pipeline import (
    generate_dataset,
    generate_indexed,
    is_real_index,
    load_corpus,
    read_manifest,
)
from .xray import is_trivial

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here says 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        _error_line("UsageError", message)
        raise SystemExit(EXIT_USAGE)


def _error_line(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UnreadableFileError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UnreadableFileError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise UnreadableFileError(f"config {path} must hold a JSON object")
    return cfg


def _resolve(flag, env_name: str | None, cfg: dict, key: str, default):
    """flag > env > config > default."""
    if flag is not None:
        return flag
    if env_name and os.environ.get(env_name):
        return os.environ[env_name]
    if key in cfg:
        return cfg[key]
    return default


def _write_sidecar(target_path: str, command: str, details: dict) -> None:
    meta = {"tool": "xrayforge", "tool_version": __version__, "command": command}
    meta.update(details)
    with open(target_path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _params_from(args, cfg: dict) -> GenerationParams:
    def pick(flag, key, default):
        return _resolve(flag, None, cfg, key, default)

    seed = _resolve(args.seed, "XRAYFORGE_SEED", cfg, "global_seed", 0)
    kernels = pick(args.blur_kernels, "blur_kernels", "5,7,9,11,13,15")
    if isinstance(kernels, str):
        kernels = tuple(int(k) for k in kernels.split(",") if k.strip())
    else:
        kernels = tuple(int(k) for k in kernels)
    return GenerationParams(
        global_seed=int(seed),
        output_size=int(pick(args.size, "output_size", 256)),
        nn_pool_size=int(pick(args.nn_pool_size, "nn_pool_size", 500)),
        nn_top_k=int(pick(args.nn_top_k, "nn_top_k", 100)),
        deform_grid=int(pick(args.deform_grid, "deform_grid", 4)),
        deform_max_offset_frac=float(
            pick(args.deform_max_offset, "deform_max_offset_frac", 0.10)
        ),
        blur_kernels=kernels,
        blend_mode=str(pick(args.blend_mode, "blend_mode", "alpha")),
        color_correct=bool(pick(args.color_correct, "color_correct", True)),
        real_fraction=float(pick(args.real_fraction, "real_fraction", 0.5)),
        exclude_same_source=bool(
            pick(args.exclude_same_source, "exclude_same_source", True)
        ),
    )


def cmd_generate(args) -> int:
    cfg = _load_config(args.config)
    params = _params_from(args, cfg)
    corpus_path = _resolve(args.corpus, None, cfg, "corpus", None)
    if corpus_path is None:
        _error_line("UsageError", "no corpus directory given (--corpus)")
        return EXIT_USAGE
    out_dir = _resolve(args.out, "XRAYFORGE_OUT", cfg, "out", "dataset")
    n = int(_resolve(args.count, None, cfg, "count", 100))
    workers = int(_resolve(args.workers, None, cfg, "workers", 1))
    if n < 1 or workers < 1:
        _error_line("UsageError", "count and workers must be >= 1")
        return EXIT_USAGE

    t0 = time.monotonic()
    corpus = load_corpus(corpus_path)
    for line in corpus.skipped:
        print(f"corpus skip: {line}")
    n_real = sum(1 for i in range(n) if is_real_index(i, params.real_fraction))
    if args.dry_run:
        print(f"dry run: would write {n} samples ({n_real} real, {n - n_real} blended) "
              f"from {len(corpus)} corpus entries to {out_dir}")
        return EXIT_OK

    manifest = generate_dataset(corpus, n, params, workers=workers, out_dir=out_dir)
    for line in manifest.skipped:
        print(f"sample skip: {line}")
    got_real, got_blended = manifest.counts()
    elapsed = time.monotonic() - t0
    _write_sidecar(
        os.path.join(out_dir, "manifest.jsonl"), "generate",
        {"params": params.to_dict(), "corpus": str(corpus_path), "count": n,
         "workers": workers, "elapsed_s": round(elapsed, 3)},
    )
    print(f"wrote {len(manifest)} samples ({got_real} real, {got_blended} blended, "
          f"{len(manifest.skipped)} skipped) to {out_dir} in {elapsed:.1f}s")
    return EXIT_OK


def cmd_forensics(args) -> int:
    cfg = _load_config(args.config)
    kind = args.kind
    img = load_image(args.image)
    if kind == "noise":
        amp = float(_resolve(args.amplification, None, cfg, "amplification", 8.0))
        result = noise_residual(img, amplification=amp)
        details = {"amplification": amp}
    else:
        quality = int(_resolve(args.quality, None, cfg, "quality", 90))
        scale = float(_resolve(args.scale, None, cfg, "scale", 15.0))
        result = error_level_analysis(img, quality=quality, scale=scale)
        details = {"quality": quality, "scale": scale}
    out_path = args.image + f".{result.kind}.png"
    save_map(out_path, result.data)
    _write_sidecar(out_path, "forensics", {"kind": result.kind, "input": args.image,
                                           **details})
    print(f"wrote {out_path} (mean {result.data.mean():.4f}, max {result.data.max():.4f})")
    return EXIT_OK


def cmd_eval(args) -> int:
    scored = read_scores_jsonl(args.scores)
    rows = [("records", float(len(scored)))]
    variants = [("", scored)]
    if scored.groups is not None and args.grouped:
        variants.append(("grouped_", scored.grouped()))
    for prefix, s in variants:
        auc = roc_auc(s)
        ap = average_precision(s)
        eer, thr = equal_error_rate(s)
        rows += [
            (prefix + "auc", auc),
            (prefix + "ap", ap),
            (prefix + "eer", eer),
            (prefix + "eer_threshold", thr),
            (prefix + "accuracy_at_0.5", accuracy_at_half(s)),
        ]
    for name, value in rows:
        print(f"{name}: {value:.6f}")
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["metric", "value"])
            for name, value in rows:
                writer.writerow([name, f"{value:.10g}"])
        _write_sidecar(args.csv, "eval", {"scores": args.scores,
                                          "grouped": bool(args.grouped)})
        print(f"wrote {args.csv}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    manifest = read_manifest(args.manifest)
    sample = manifest.get(args.id)
    print(f"id: {sample.id}")
    print(f"label: {sample.label}")
    print(f"bg_source: {sample.bg_source}")
    print(f"fg_source: {sample.fg_source}")
    print(f"seed: {sample.seed}")
    print(f"params: {json.dumps(sample.params.to_dict(), sort_keys=True)}")
    stored = load_map(manifest.resolve(sample.xray_path))
    trivial = is_trivial(stored, tol=2.0 / 255.0)
    print(f"trivial X-ray: {'true' if trivial else 'false'}")

    if not os.path.isdir(manifest.corpus_root):
        raise UnreadableFileError(
            f"corpus root {manifest.corpus_root!r} not available; cannot recompute"
        )
    corpus = load_corpus(manifest.corpus_root)
    index = int(sample.id.lstrip("s"))
    _, _, xray = generate_indexed(index, corpus, manifest.params)
    deviation = float(np.abs(xray - stored).max())
    print(f"recomputed X-ray max deviation: {deviation:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xrayforge",
                     description="Blended-face training data synthesis and scoring.")
    parser.add_argument("--version", action="version", version=f"xrayforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="materialize a labeled dataset")
    g.add_argument("--config", help="JSON config file; flags override it")
    g.add_argument("--corpus", help="directory of images + landmark files")
    g.add_argument("--out", help="output directory (env XRAYFORGE_OUT)")
    g.add_argument("-n", "--count", type=int, help="number of samples")
    g.add_argument("--workers", type=int, help="parallel worker processes")
    g.add_argument("--seed", type=int, help="global seed (env XRAYFORGE_SEED)")
    g.add_argument("--size", type=int, help="output raster size")
    g.add_argument("--blend-mode", choices=["alpha", "poisson"])
    g.add_argument("--real-fraction", type=float)
    g.add_argument("--nn-pool-size", type=int)
    g.add_argument("--nn-top-k", type=int)
    g.add_argument("--deform-grid", type=int)
    g.add_argument("--deform-max-offset", type=float)
    g.add_argument("--blur-kernels", help="comma-separated odd sizes, e.g. 5,7,9")
    g.add_argument("--color-correct", dest="color_correct", action="store_true",
                   default=None)
    g.add_argument("--no-color-correct", dest="color_correct", action="store_false")
    g.add_argument("--exclude-same-source", dest="exclude_same_source",
                   action="store_true", default=None)
    g.add_argument("--allow-same-source", dest="exclude_same_source",
                   action="store_false")
    g.add_argument("--dry-run", action="store_true", help="plan only; write nothing")
    g.set_defaults(func=cmd_generate)

    f = sub.add_parser("forensics", help="render a forensic map for one image")
    f.add_argument("image", help="input image path")
    f.add_argument("--kind", choices=["noise", "ela"], default="noise")
    f.add_argument("--config", help="JSON config file; flags override it")
    f.add_argument("--amplification", type=float, help="noise map gain")
    f.add_argument("--quality", type=int, help="ELA probe quality")
    f.add_argument("--scale", type=float, help="ELA map gain")
    f.set_defaults(func=cmd_forensics)

    e = sub.add_parser("eval", help="score a JSONL file of {id, score, label}")
    e.add_argument("scores", help="JSON-lines scored set")
    e.add_argument("--csv", help="write a metric,value CSV report here")
    e.add_argument("--grouped", action="store_true",
                   help="also report group-averaged metrics when groups present")
    e.set_defaults(func=cmd_eval)

    i = sub.add_parser("inspect", help="audit one sample of a manifest")
    i.add_argument("manifest", help="manifest.jsonl path")
    i.add_argument("id", help="sample id, e.g. s000012")
    i.set_defaults(func=cmd_inspect)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UnknownIdError as exc:
        _error_line(type(exc).__name__, str(exc))
        return EXIT_DATA
    except XrayForgeError as exc:
        _error_line(type(exc).__name__, str(exc))
        return EXIT_DATA
    except KeyboardInterrupt:
        _error_line("Interrupted", "interrupted")
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 -- last-resort mapping to exit 3
        _error_line(type(exc).__name__, str(exc))
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
