"""Corpus loading, sample generation, and manifest round-trips."""

import json
import math
import os
import shutil

import numpy as np
import pytest

from xrayforge.core import BLENDED, REAL, GenerationParams, sample_rng
from xrayforge.errors import (
    CorruptManifestError,
    MalformedLandmarksError,
    MissingFileError,
    NoEntriesError,
    UnknownIdError,
    VersionMismatchError,
)
from xrayforge.io import load_image, load_map, save_image, save_landmarks
from xrayforge.landmarks import landmark_distance
from xrayforge.pipeline import (
    MANIFEST_NAME,
    align_donor,
    generate_dataset,
    generate_indexed,
    generate_sample,
    is_real_index,
    load_corpus,
    read_manifest,
    write_manifest,
)
from xrayforge.synthcorpus import synth_corpus
from xrayforge.xray import is_trivial


def small_params(**overrides):
    base = dict(global_seed=7, output_size=64, nn_pool_size=10, nn_top_k=4,
                blur_kernels=(3, 5), real_fraction=0.5)
    base.update(overrides)
    return GenerationParams(**base)


class TestLoadCorpus:
    def test_session_corpus(self, corpus, corpus_dir):
        assert len(corpus) == 20
        assert corpus.root == str(corpus_dir)
        assert corpus.skipped == ()
        assert corpus.ids() == sorted(corpus.ids())

    def test_missing_landmarks_skipped(self, tmp_path):
        synth_corpus(tmp_path, identities=2, frames_per_identity=2, size=64, seed=1)
        victims = sorted(tmp_path.glob("*.landmarks.json"))
        victims[0].unlink()
        c = load_corpus(tmp_path)
        assert len(c) == 3
        assert len(c.skipped) == 1
        assert "landmarks" in c.skipped[0]

    def test_malformed_landmarks_raise(self, tmp_path):
        synth_corpus(tmp_path, identities=1, frames_per_identity=1, size=64, seed=1)
        lm = next(tmp_path.glob("*.landmarks.json"))
        lm.write_text("{not json")
        with pytest.raises(MalformedLandmarksError):
            load_corpus(tmp_path)

    def test_empty_dir(self, tmp_path):
        with pytest.raises(NoEntriesError):
            load_corpus(tmp_path)

    def test_not_a_directory(self, tmp_path):
        with pytest.raises(NoEntriesError):
            load_corpus(tmp_path / "nope")

    def test_non_image_files_ignored(self, tmp_path):
        synth_corpus(tmp_path, identities=1, frames_per_identity=2, size=64, seed=1)
        (tmp_path / "notes.txt").write_text("hello")
        assert len(load_corpus(tmp_path)) == 2

    def test_source_tags_attached(self, corpus):
        for e in corpus.entries:
            assert e.source == e.id.split("_")[0]


class TestRealAllocation:
    def test_half_fraction_alternates(self):
        flags = [is_real_index(i, 0.5) for i in range(6)]
        assert flags == [False, True, False, True, False, True]

    def test_prefix_counts_match_floor(self):
        for f in (0.0, 0.25, 1 / 3, 0.5, 0.7, 1.0):
            running = 0
            for n in range(1, 200):
                running += is_real_index(n - 1, f)
                assert running == math.floor(f * n)

    def test_extremes(self):
        assert not any(is_real_index(i, 0.0) for i in range(50))
        assert all(is_real_index(i, 1.0) for i in range(50))


class TestAlignDonor:
    def test_identity_short_circuit(self, rng):
        img = rng.random((32, 32, 3))
        lm = rng.random((5, 2)) * 20 + 5
        warped, mapped, t = align_donor(img, lm, lm.copy())
        assert np.array_equal(warped, img)
        assert warped is not img
        assert np.array_equal(mapped, lm)
        assert t.scale == 1.0

    def test_alignment_never_hurts(self, rng):
        for _ in range(20):
            img = rng.random((24, 24, 3))
            fg = rng.random((8, 2)) * 16 + 4
            bg = fg + rng.normal(0, 2.0, fg.shape)
            _, mapped, _ = align_donor(img, fg, bg)
            assert (landmark_distance(mapped, bg)
                    <= landmark_distance(fg, bg) + 1e-9)

    def test_constant_image_stays_constant(self, rng):
        img = np.full((24, 24, 3), 0.4)
        fg = rng.random((6, 2)) * 12 + 6
        bg = fg + np.array([1.5, -2.0])
        warped, _, _ = align_donor(img, fg, bg)
        assert np.allclose(warped, 0.4, atol=1e-12)


class TestGenerateSample:
    def test_real_branch(self, corpus):
        params = small_params()
        bg_id = corpus.ids()[0]
        sample, img, xray = generate_sample(bg_id, corpus, params, sample_index=1)
        assert sample.label == REAL
        assert sample.fg_source == sample.bg_source == bg_id
        assert sample.id == "s000001"
        assert img.shape == (64, 64, 3)
        assert np.array_equal(xray, np.zeros((64, 64)))

    def test_blended_branch(self, corpus):
        params = small_params()
        bg_id = corpus.ids()[0]
        sample, img, xray = generate_sample(bg_id, corpus, params, sample_index=0)
        assert sample.label == BLENDED
        assert sample.bg_source == bg_id
        assert sample.fg_source != bg_id
        # same-source donors are off the table by default
        assert sample.fg_source.split("_")[0] != bg_id.split("_")[0]
        assert img.min() >= 0.0 and img.max() <= 1.0
        assert xray.min() >= 0.0 and xray.max() <= 1.0
        assert not is_trivial(xray, tol=2.0 / 255.0)

    def test_rerun_is_bit_identical(self, corpus):
        params = small_params()
        bg_id = corpus.ids()[3]
        a = generate_sample(bg_id, corpus, params, sample_index=0)
        b = generate_sample(bg_id, corpus, params, sample_index=0)
        assert a[0] == b[0]
        assert np.array_equal(a[1], b[1])
        assert np.array_equal(a[2], b[2])

    def test_index_changes_content(self, corpus):
        params = small_params()
        bg_id = corpus.ids()[3]
        a = generate_sample(bg_id, corpus, params, sample_index=0)
        b = generate_sample(bg_id, corpus, params, sample_index=2)
        assert not np.array_equal(a[1], b[1])

    def test_degenerate_settings_reproduce_background(self, tmp_path, corpus):
        # zero deformation + kernel-1 blur keeps the mask binary, and a donor
        # identical to the background makes the composite equal it exactly
        synth_corpus(tmp_path, identities=1, frames_per_identity=1, size=64, seed=9)
        img_path = next(tmp_path.glob("*.png"))
        lm_path = next(tmp_path.glob("*.landmarks.json"))
        points = np.asarray(json.loads(lm_path.read_text())["points"])
        for name, src in (("aa", "s1"), ("bb", "s2")):
            shutil.copy(img_path, tmp_path / f"{name}.png")
            save_landmarks(tmp_path / f"{name}.png.landmarks.json", points, source=src)
        img_path.unlink()
        lm_path.unlink()
        twin_corpus = load_corpus(tmp_path)
        assert len(twin_corpus) == 2

        params = small_params(real_fraction=0.0, deform_max_offset_frac=0.0,
                              blur_kernels=(1,), nn_pool_size=2, nn_top_k=1)
        sample, img, xray = generate_sample("aa", twin_corpus, params, sample_index=0)
        assert sample.label == BLENDED
        bg_img = load_image(tmp_path / "aa.png")
        assert np.array_equal(img, bg_img)
        assert np.array_equal(xray, np.zeros((64, 64)))


class TestGenerateIndexed:
    def test_background_drawn_from_stream(self, corpus):
        params = small_params()
        rng = sample_rng(params.global_seed, 0)
        expected = corpus.ids()[int(rng.integers(len(corpus)))]
        sample, _, _ = generate_indexed(0, corpus, params)
        assert sample.bg_source == expected

    def test_deterministic(self, corpus):
        params = small_params()
        a = generate_indexed(4, corpus, params)
        b = generate_indexed(4, corpus, params)
        assert a[0] == b[0]
        assert np.array_equal(a[1], b[1])


class TestGenerateDataset:
    def test_counts_and_files(self, corpus, tmp_path):
        params = small_params()
        out = tmp_path / "ds"
        manifest = generate_dataset(corpus, 6, params, out_dir=out)
        assert len(manifest) == 6
        assert manifest.counts() == (3, 3)
        assert manifest.skipped == ()
        for s in manifest.samples:
            assert os.path.isfile(manifest.resolve(s.blended_path))
            assert os.path.isfile(manifest.resolve(s.xray_path))
        reread = read_manifest(out / MANIFEST_NAME)
        assert reread.samples == manifest.samples
        assert reread.params == params
        assert reread.corpus_root == corpus.root

    def test_real_samples_have_zero_maps(self, corpus, tmp_path):
        params = small_params()
        manifest = generate_dataset(corpus, 6, params, out_dir=tmp_path / "ds")
        for s in manifest.samples:
            stored = load_map(manifest.resolve(s.xray_path))
            if s.label == REAL:
                assert np.array_equal(stored, np.zeros_like(stored))
            else:
                assert stored.max() > 2.0 / 255.0

    def test_rerun_byte_identical(self, corpus, tmp_path):
        params = small_params()
        m1 = generate_dataset(corpus, 6, params, out_dir=tmp_path / "a")
        m2 = generate_dataset(corpus, 6, params, out_dir=tmp_path / "b")
        assert m1.samples == m2.samples
        for s in m1.samples:
            for rel in (s.blended_path, s.xray_path):
                b1 = open(os.path.join(tmp_path, "a", rel), "rb").read()
                b2 = open(os.path.join(tmp_path, "b", rel), "rb").read()
                assert b1 == b2

    def test_worker_count_does_not_change_output(self, corpus, tmp_path):
        params = small_params()
        m1 = generate_dataset(corpus, 6, params, workers=1, out_dir=tmp_path / "w1")
        m2 = generate_dataset(corpus, 6, params, workers=2, out_dir=tmp_path / "w2")
        assert m1.samples == m2.samples
        for s in m1.samples:
            b1 = open(os.path.join(tmp_path, "w1", s.blended_path), "rb").read()
            b2 = open(os.path.join(tmp_path, "w2", s.blended_path), "rb").read()
            assert b1 == b2

    def test_bad_count(self, corpus, tmp_path):
        with pytest.raises(CorruptManifestError):
            generate_dataset(corpus, 0, small_params(), out_dir=tmp_path)


class TestManifestIO:
    @pytest.fixture()
    def dataset(self, corpus, tmp_path):
        out = tmp_path / "ds"
        manifest = generate_dataset(corpus, 6, small_params(), out_dir=out)
        return out, manifest

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(MissingFileError):
            read_manifest(tmp_path / "manifest.jsonl")

    def test_empty_manifest(self, tmp_path):
        p = tmp_path / "manifest.jsonl"
        p.write_text("")
        with pytest.raises(CorruptManifestError):
            read_manifest(p)

    def test_version_mismatch(self, dataset):
        out, _ = dataset
        p = out / MANIFEST_NAME
        lines = p.read_text().splitlines()
        header = json.loads(lines[0])
        header["version"] = "xrayforge/999"
        lines[0] = json.dumps(header)
        p.write_text("\n".join(lines) + "\n")
        with pytest.raises(VersionMismatchError):
            read_manifest(p)

    def test_corrupt_sample_line_reports_line_number(self, dataset):
        out, _ = dataset
        p = out / MANIFEST_NAME
        lines = p.read_text().splitlines()
        lines[3] = "garbage {"
        p.write_text("\n".join(lines) + "\n")
        with pytest.raises(CorruptManifestError, match=":4"):
            read_manifest(p)

    def test_duplicate_ids_rejected(self, dataset):
        out, _ = dataset
        p = out / MANIFEST_NAME
        lines = p.read_text().splitlines()
        lines.append(lines[1])
        p.write_text("\n".join(lines) + "\n")
        with pytest.raises(CorruptManifestError, match="duplicate"):
            read_manifest(p)

    def test_sample_params_must_match_header(self, dataset):
        out, _ = dataset
        p = out / MANIFEST_NAME
        lines = p.read_text().splitlines()
        rec = json.loads(lines[1])
        rec["params"]["global_seed"] = 999
        lines[1] = json.dumps(rec)
        p.write_text("\n".join(lines) + "\n")
        with pytest.raises(CorruptManifestError, match="params"):
            read_manifest(p)

    def test_ratio_violation_rejected(self, dataset):
        out, manifest = dataset
        p = out / MANIFEST_NAME
        lines = p.read_text().splitlines()
        keep = [lines[0]]
        for line in lines[1:]:
            if json.loads(line)["label"] == REAL:
                keep.append(line)
        p.write_text("\n".join(keep) + "\n")
        with pytest.raises(CorruptManifestError, match="real_fraction"):
            read_manifest(p)

    def test_missing_referenced_file(self, dataset):
        out, manifest = dataset
        os.unlink(manifest.resolve(manifest.samples[0].blended_path))
        with pytest.raises(MissingFileError):
            read_manifest(out / MANIFEST_NAME)

    def test_unknown_id_lookup(self, dataset):
        _, manifest = dataset
        with pytest.raises(UnknownIdError):
            manifest.get("s999999")

    def test_write_leaves_no_temp_file(self, dataset, tmp_path):
        _, manifest = dataset
        target = tmp_path / "copy.jsonl"
        write_manifest(manifest, target)
        assert target.is_file()
        assert not (tmp_path / "copy.jsonl.tmp").exists()

    def test_manifest_paths_are_relative(self, dataset):
        out, _ = dataset
        for line in (out / MANIFEST_NAME).read_text().splitlines()[1:]:
            rec = json.loads(line)
            assert not os.path.isabs(rec["blended_path"])
            assert not os.path.isabs(rec["xray_path"])
