import json

import numpy as np
import pytest

from spectral_uq.bundles import (
    BundleFormatError,
    Dataset,
    DatasetMeta,
    ResponseBundle,
    load_bundles,
    validate_bundle,
    write_bundles,
)

from conftest import make_bundle


def full_bundle(qid, m=5, d=8, seed=0):
    rng = np.random.default_rng(seed)
    return make_bundle(
        question_id=qid,
        m=m,
        d=d,
        rng=rng,
        with_logits=True,
        with_logprobs=True,
        external_scores={"gpt_correctness": rng.uniform(0, 1, size=m)},
    )


class TestValidation:
    def test_minimal_bundle_is_clean(self):
        b = make_bundle(m=2, with_embeddings=False)
        assert validate_bundle(b) == []

    def test_paper_scale_minimal_bundle(self):
        # m = 20 responses, only responses/references populated
        b = make_bundle(m=20, with_embeddings=False)
        assert validate_bundle(b) == []
        assert b.m == 20

    def test_nan_embedding_reported_with_position(self):
        b = make_bundle(m=3, d=4)
        b.embeddings[1, 2] = np.nan
        errs = validate_bundle(b)
        assert len(errs) == 1
        assert errs[0].field == "embeddings"
        assert "non-finite at (1,2)" in errs[0].reason

    def test_nli_logits_bad_last_axis(self):
        b = make_bundle(m=3, nli_logits=np.zeros((3, 3, 2, 2)))
        errs = validate_bundle(b)
        assert [str(e) for e in errs] == ["nli_logits: last axis must be 3"]

    def test_single_response_rejected(self):
        b = make_bundle(m=1, with_embeddings=False)
        assert any(e.field == "responses" for e in validate_bundle(b))

    def test_positive_logprob_rejected(self):
        b = make_bundle(m=2, with_embeddings=False,
                        seq_logprobs=[0.5, -1.0], token_counts=[3, 3])
        assert any("<= 0" in e.reason for e in validate_bundle(b))

    def test_zero_token_count_rejected(self):
        b = make_bundle(m=2, with_embeddings=False,
                        seq_logprobs=[-0.5, -1.0], token_counts=[0, 3])
        assert any(e.field == "token_counts" for e in validate_bundle(b))

    def test_logprobs_without_counts_rejected(self):
        b = make_bundle(m=2, with_embeddings=False, seq_logprobs=[-0.5, -1.0])
        assert any("go together" in e.reason for e in validate_bundle(b))


class TestRoundTrip:
    def test_inline_round_trip_bit_exact(self, tmp_path):
        ds = Dataset(
            bundles=[full_bundle("a", seed=1), full_bundle("b", seed=2)],
            meta=DatasetMeta(encoder_id="enc-x", nli_model_id="nli-y"),
        )
        path = tmp_path / "data.jsonl"
        write_bundles(ds, path)
        assert load_bundles(path) == ds

    def test_sidecar_round_trip_bit_exact_for_f32_payload(self, tmp_path):
        rng = np.random.default_rng(3)
        bundles = []
        for i in range(3):
            b = full_bundle(f"q{i}", seed=i)
            # sidecar stores float32; make the payload exactly representable
            b.embeddings = rng.standard_normal((b.m, 8)).astype(np.float32).astype(np.float64)
            bundles.append(b)
        ds = Dataset(bundles=bundles)
        path = tmp_path / "data.jsonl"
        write_bundles(ds, path, sidecar=True)
        assert (tmp_path / "data.embed").exists()
        loaded = load_bundles(path)
        assert loaded == ds
        # the jsonl itself must carry offsets, not arrays
        first = json.loads(path.read_text().splitlines()[0])
        assert set(first["embeddings"]) == {"sidecar_offset"}

    def test_load_preserves_line_order(self, tmp_path):
        ds = Dataset(bundles=[full_bundle(q, seed=i) for i, q in enumerate("zyx")])
        path = tmp_path / "data.jsonl"
        write_bundles(ds, path)
        assert [b.question_id for b in load_bundles(path)] == ["z", "y", "x"]

    def test_two_line_file_loads(self, tmp_path):
        ds = Dataset(bundles=[full_bundle("a", m=5, d=8), full_bundle("b", m=5, d=8, seed=9)])
        path = tmp_path / "two.jsonl"
        write_bundles(ds, path)
        out = load_bundles(path)
        assert len(out) == 2
        assert out.dim == 8


class TestLoadErrors:
    def test_parse_failure_reports_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        good = json.dumps(
            {"question_id": "a", "question_text": "t", "references": ["r"],
             "responses": ["x", "y"]}
        )
        path.write_text(good + "\n{not json\n")
        with pytest.raises(BundleFormatError, match="line 2"):
            load_bundles(path)

    def test_mixed_embedding_row_lengths_name_the_bundle(self, tmp_path):
        obj = {
            "question_id": "ragged", "question_text": "t",
            "references": ["r"], "responses": ["x", "y"],
            "embeddings": [[1.0] * 8, [1.0] * 7],
        }
        path = tmp_path / "ragged.jsonl"
        path.write_text(json.dumps(obj) + "\n")
        with pytest.raises(BundleFormatError, match="ragged"):
            load_bundles(path)

    def test_duplicate_question_id(self, tmp_path):
        ds_line = json.dumps(
            {"question_id": "dup", "question_text": "t", "references": ["r"],
             "responses": ["x", "y"]}
        )
        path = tmp_path / "dup.jsonl"
        path.write_text(ds_line + "\n" + ds_line + "\n")
        with pytest.raises(BundleFormatError, match="duplicate question_id 'dup'"):
            load_bundles(path)

    def test_nan_payload_rejected(self, tmp_path):
        obj = {
            "question_id": "n", "question_text": "t", "references": ["r"],
            "responses": ["x", "y"], "seq_logprobs": [-1.0, float("nan")],
            "token_counts": [1, 1],
        }
        path = tmp_path / "nan.jsonl"
        path.write_text(json.dumps(obj) + "\n")
        with pytest.raises(BundleFormatError, match="non-finite"):
            load_bundles(path)

    def test_bundles_disagreeing_on_d_rejected(self, tmp_path):
        lines = []
        for qid, d in [("a", 4), ("b", 5)]:
            lines.append(json.dumps({
                "question_id": qid, "question_text": "t", "references": ["r"],
                "responses": ["x", "y"], "embeddings": [[0.5] * d, [0.25] * d],
            }))
        path = tmp_path / "dims.jsonl"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(BundleFormatError, match="embedding width"):
            load_bundles(path)

    def test_bad_sidecar_magic(self, tmp_path):
        path = tmp_path / "x.jsonl"
        obj = {"question_id": "a", "question_text": "t", "references": ["r"],
               "responses": ["x", "y"], "embeddings": {"sidecar_offset": 6}}
        path.write_text(json.dumps(obj) + "\n")
        (tmp_path / "x.embed").write_bytes(b"NOPE" + b"\x01\x00" + b"\x00" * 32)
        with pytest.raises(BundleFormatError, match="magic"):
            load_bundles(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(BundleFormatError, match="no such bundle"):
            load_bundles(tmp_path / "absent.jsonl")

    def test_empty_dataset_rejected(self):
        with pytest.raises(BundleFormatError, match="at least one"):
            Dataset(bundles=[])
