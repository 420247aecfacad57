import json
import os
import shutil
import subprocess
import sys

import numpy as np
import pytest

from trait.cli import main, run_pipeline
from trait.config import RunConfig, load_config, validate_config

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SAMPLE = os.path.join(REPO, "sample")


def _sample_config(tmp_path, **overrides):
    cfg = RunConfig(
        seed=42, out_dir=str(tmp_path / "run"),
        raw=os.path.join(SAMPLE, "raw.jsonl"),
        sent_emb=os.path.join(SAMPLE, "sent.trem"),
        word_emb=os.path.join(SAMPLE, "word.trem"),
        T=4, epsilon=0.3, rho=0.7, iterations=20, burn_in=20,
        coherence_top_n=8, profile_top_k=4)
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


class TestValidateConfig:
    def test_negative_lambda_violation_names_constraint(self, tmp_path):
        cfg = _sample_config(tmp_path, lam=-1.0)
        violations = validate_config(cfg)
        assert any("lambda >= 0" in v for v in violations)

    def test_default_rho_passes(self, tmp_path):
        cfg = _sample_config(tmp_path)
        assert cfg.rho == 0.7
        assert validate_config(cfg) == []

    def test_epsilon_without_word_embeddings_flagged(self, tmp_path):
        cfg = _sample_config(tmp_path, word_emb=None)
        violations = validate_config(cfg)
        assert any("word_emb" in v and "epsilon" in v for v in violations)

    def test_t_zero_rejected_before_any_stage(self, tmp_path):
        cfg = _sample_config(tmp_path, T=0)
        code, manifest = run_pipeline(cfg)
        assert code == 2
        assert manifest.get("error") == "validation"
        assert not os.path.exists(os.path.join(cfg.out_dir, "corpus.jsonl"))

    def test_missing_input_path_flagged(self, tmp_path):
        cfg = _sample_config(tmp_path, raw=str(tmp_path / "nope.jsonl"))
        violations = validate_config(cfg)
        assert any("does not exist" in v for v in violations)


class TestSubcommands:
    def test_preprocess_graph_train_estimate_chain(self, tmp_path):
        corpus = str(tmp_path / "corpus.jsonl")
        graph = str(tmp_path / "graph.bin")
        model = str(tmp_path / "model.bin")
        est = str(tmp_path / "est.json")
        profiles = str(tmp_path / "profiles.json")

        assert main(["preprocess", "--in", os.path.join(SAMPLE, "raw.jsonl"),
                     "--out", corpus]) == 0
        assert main(["graph", "--corpus", corpus,
                     "--sent-emb", os.path.join(SAMPLE, "sent.trem"),
                     "--rho", "0.7", "--out", graph]) == 0
        assert main(["train", "--corpus", corpus, "--graph", graph,
                     "--word-emb", os.path.join(SAMPLE, "word.trem"),
                     "--T", "4", "--S", "2", "--iters", "10", "--burn", "10",
                     "--lambda", "1.0", "--epsilon", "0.3", "--seed", "42",
                     "--out", model]) == 0
        assert main(["estimate", "--model", model, "--corpus", corpus,
                     "--word-emb", os.path.join(SAMPLE, "word.trem"),
                     "--out", est]) == 0
        assert main(["profile", "--est", est, "--top", "3",
                     "--out", profiles]) == 0

        payload = json.load(open(est))
        assert set(payload) == {"phi", "psi", "theta", "meta"}
        prof = json.load(open(profiles))
        assert len(prof) == 3  # three cities
        assert all(len(p["sentiments"]["positive"]["ranked"]) == 3 for p in prof)

        out = str(tmp_path / "coh.json")
        assert main(["coherence", "--est", est, "--corpus", corpus,
                     "--word-emb", os.path.join(SAMPLE, "word.trem"),
                     "--topn", "8", "--out", out]) == 0
        report = json.load(open(out))
        assert "npmi_mean" in report and "w2v_mean" in report

        out = str(tmp_path / "cls.json")
        assert main(["classify", "--est", est, "--corpus", corpus,
                     "--out", out]) == 0
        assert 0.0 <= json.load(open(out))["accuracy"] <= 1.0

        out = str(tmp_path / "sim.json")
        tsv = str(tmp_path / "sim.tsv")
        assert main(["similarity", "--profiles", profiles, "--out", out,
                     "--tsv", tsv]) == 0
        assert os.path.exists(tsv)

        out = str(tmp_path / "base.json")
        assert main(["baseline-sim", "--corpus", corpus,
                     "--sent-emb", os.path.join(SAMPLE, "sent.trem"),
                     "--out", out]) == 0
        base = json.load(open(out))
        assert len(base["labels"]) == 3

    def test_train_resume_continues_chain(self, tmp_path):
        corpus = str(tmp_path / "corpus.jsonl")
        main(["preprocess", "--in", os.path.join(SAMPLE, "raw.jsonl"),
              "--out", corpus])
        full = str(tmp_path / "full.bin")
        main(["train", "--corpus", corpus, "--T", "3", "--epsilon", "0",
              "--iters", "6", "--burn", "0", "--seed", "7", "--out", full,
              "--check-every", "0"])
        half = str(tmp_path / "half.bin")
        main(["train", "--corpus", corpus, "--T", "3", "--epsilon", "0",
              "--iters", "3", "--burn", "0", "--seed", "7", "--out", half,
              "--check-every", "0"])
        resumed = str(tmp_path / "resumed.bin")
        main(["train", "--corpus", corpus, "--resume", half, "--epsilon", "0",
              "--iters", "3", "--out", resumed, "--check-every", "0"])
        from trait.sampler.state import load_checkpoint
        meta_f, _, s_f, t_f = load_checkpoint(full)
        meta_r, _, s_r, t_r = load_checkpoint(resumed)
        assert meta_f["sweep_index"] == meta_r["sweep_index"] == 6
        np.testing.assert_array_equal(s_f, s_r)
        np.testing.assert_array_equal(t_f, t_r)

    def test_preprocess_config_file_controls_rules(self, tmp_path):
        raw = tmp_path / "raw.jsonl"
        raw.write_text(json.dumps({"id": "a", "attribute": "x",
                                   "text": "The amazing locations here."}) + "\n")
        cfg = tmp_path / "norm.toml"
        cfg.write_text('[normalize]\nstemming = false\nstop_words = ["the", "here"]\n')
        out = str(tmp_path / "c.jsonl")
        assert main(["preprocess", "--in", str(raw), "--out", out,
                     "--config", str(cfg)]) == 0
        rec = json.loads(open(out).read())
        assert rec["sentences"] == [["amazing", "locations"]]  # unstemmed

    def test_preprocess_bad_config_key_is_validation_error(self, tmp_path):
        raw = tmp_path / "raw.jsonl"
        raw.write_text(json.dumps({"id": "a", "attribute": "x", "text": "Hi."}) + "\n")
        cfg = tmp_path / "norm.toml"
        cfg.write_text('[normalize]\nbogus = 1\n')
        assert main(["preprocess", "--in", str(raw), "--out",
                     str(tmp_path / "c.jsonl"), "--config", str(cfg)]) == 2

    def test_train_chains_reports_and_saves_best(self, tmp_path, capsys):
        corpus = str(tmp_path / "corpus.jsonl")
        main(["preprocess", "--in", os.path.join(SAMPLE, "raw.jsonl"),
              "--out", corpus])
        model = str(tmp_path / "model.bin")
        assert main(["train", "--corpus", corpus, "--T", "3", "--epsilon", "0",
                     "--iters", "4", "--burn", "4", "--seed", "5",
                     "--chains", "3", "--out", model, "--check-every", "0"]) == 0
        lines = capsys.readouterr().out
        assert lines.count("final log-joint") == 3
        from trait.sampler.state import load_checkpoint
        meta, _, _, _ = load_checkpoint(model)
        assert meta["seed"] in (5, 6, 7)

    def test_synth_writes_corpus_truth_and_embeddings(self, tmp_path):
        out = str(tmp_path / "synth")
        assert main(["synth", "--out-dir", out, "--docs", "20", "--T", "3",
                     "--W", "30", "--seed", "5", "--scenario", "recovery",
                     "--emb"]) == 0
        assert os.path.exists(os.path.join(out, "corpus.jsonl"))
        truth = json.load(open(os.path.join(out, "truth.json")))
        assert np.asarray(truth["phi"]).shape == (2, 3, 30)
        from trait.graph.embeddings import load_trem
        table = load_trem(os.path.join(out, "sent.trem"))
        assert len(table) == len(truth["sent_t"])

    def test_unreadable_input_is_runtime_error(self, tmp_path):
        code = main(["preprocess", "--in", str(tmp_path / "missing.jsonl"),
                     "--out", str(tmp_path / "out.jsonl")])
        assert code == 3


class TestPipeline:
    def test_full_pipeline_produces_all_artifacts(self, tmp_path):
        cfg = _sample_config(tmp_path)
        code, manifest = run_pipeline(cfg)
        assert code == 0
        for name in ("corpus.jsonl", "graph.bin", "model.bin", "estimates.json",
                     "profiles.json", "coherence.json", "classification.json",
                     "similarity.json", "similarity.tsv", "baseline.json",
                     "manifest.json"):
            assert os.path.exists(os.path.join(cfg.out_dir, name)), name
        assert all(entry["status"] == "run" for entry in manifest["stages"].values())
        assert "trait" in manifest["versions"]

    def test_rerun_hits_cache_and_force_reruns(self, tmp_path):
        cfg = _sample_config(tmp_path)
        assert run_pipeline(cfg)[0] == 0
        code, manifest = run_pipeline(cfg)
        assert code == 0
        assert all(entry["status"] == "cached" for entry in manifest["stages"].values())
        code, manifest = run_pipeline(cfg, force=True)
        assert code == 0
        assert all(entry["status"] == "run" for entry in manifest["stages"].values())

    def test_manifest_records_input_hashes_and_timings(self, tmp_path):
        cfg = _sample_config(tmp_path)
        _, manifest = run_pipeline(cfg)
        train_entry = manifest["stages"]["train"]
        assert train_entry["seconds"] >= 0
        assert any(k.endswith("corpus.jsonl") for k in train_entry["inputs"])
        assert all(len(v) == 64 for v in train_entry["inputs"].values())

    def test_stage_failure_sets_runtime_exit(self, tmp_path):
        bad_trem = tmp_path / "bad.trem"
        bad_trem.write_bytes(b"NOPE" + b"\x00" * 20)
        cfg = _sample_config(tmp_path, sent_emb=str(bad_trem))
        code, manifest = run_pipeline(cfg)
        assert code == 3
        assert manifest["stages"]["graph"]["status"] == "failed"

    def test_pipeline_from_pretokenized_corpus(self, tmp_path):
        synth = str(tmp_path / "synth")
        assert main(["synth", "--out-dir", synth, "--docs", "30", "--T", "3",
                     "--W", "40", "--seed", "3", "--emb"]) == 0
        cfg = RunConfig(
            seed=3, out_dir=str(tmp_path / "run"),
            corpus=os.path.join(synth, "corpus.jsonl"),
            sent_emb=os.path.join(synth, "sent.trem"),
            word_emb=os.path.join(synth, "word.trem"),
            T=3, epsilon=0.3, rho=0.7, iterations=10, burn_in=10,
            coherence_top_n=5, profile_top_k=3)
        code, manifest = run_pipeline(cfg)
        assert code == 0
        assert "preprocess" not in manifest["stages"]
        assert manifest["stages"]["train"]["status"] == "run"
        assert os.path.exists(os.path.join(cfg.out_dir, "estimates.json"))

    def test_classify_without_ratings_is_runtime_error(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        corpus.write_text(json.dumps({
            "id": "a", "attribute": "x", "rating": None,
            "sentences": [["quiet", "room"], ["slow", "elevator"]]}) + "\n")
        model = str(tmp_path / "m.bin")
        est = str(tmp_path / "e.json")
        assert main(["train", "--corpus", str(corpus), "--T", "2",
                     "--epsilon", "0", "--iters", "2", "--burn", "2",
                     "--seed", "0", "--out", model, "--check-every", "0"]) == 0
        assert main(["estimate", "--model", model, "--corpus", str(corpus),
                     "--out", est]) == 0
        assert main(["classify", "--est", est, "--corpus", str(corpus),
                     "--out", str(tmp_path / "cls.json")]) == 3

    def test_config_file_roundtrip(self, tmp_path):
        cfg_path = tmp_path / "c.toml"
        cfg_path.write_text(
            'seed = 7\nout_dir = "x"\n\n[paths]\nraw = "sample/raw.jsonl"\n'
            '\n[hyper]\nT = 6\nlambda = 0.5\nepsilon = 0.0\n')
        cfg = load_config(cfg_path)
        assert cfg.seed == 7 and cfg.T == 6 and cfg.lam == 0.5
        assert cfg.epsilon == 0.0

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg_path = tmp_path / "c.toml"
        cfg_path.write_text('[hyper]\nbogus = 1\n')
        from trait.errors import ConfigError
        with pytest.raises(ConfigError, match="bogus"):
            load_config(cfg_path)


def test_console_entry_point_runs():
    out = subprocess.run([sys.executable, "-m", "trait", "--help"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    for name in ("preprocess", "graph", "train", "estimate", "profile",
                 "coherence", "classify", "similarity", "baseline-sim",
                 "synth", "pipeline"):
        assert name in out.stdout
