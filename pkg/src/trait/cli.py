"""Command-line interface and pipeline orchestration.

Subcommands mirror the pipeline stages: preprocess, graph, train,
estimate, profile, coherence, classify, similarity, baseline-sim, synth,
and pipeline. Exit codes: 0 success, 2 validation failure, 3 runtime
failure. The pipeline is idempotent: stages whose outputs already exist
are skipped unless --force is given, and every run writes a manifest with
input hashes, the seed, versions, and per-stage wall time.
"""

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

import trait
from trait.config import RunConfig, load_config, validate_config
from trait.corpus.model import load_corpus, partition_by_attribute
from trait.corpus.normalize import NormalizationConfig
from trait.errors import ConfigError, TraitError
from trait.estimates import (PosteriorEstimates, build_profiles, estimate_all,
                             load_profiles, save_profiles, top_words)
from trait.evaluate import (baseline_similarity_matrix, classification_report,
                            coherence_report, profile_distance_matrix)
from trait.graph.build import (build_correspondence_graph, build_promotion_table,
                               empty_graph, load_graph, save_graph)
from trait.graph.embeddings import load_trem, save_trem
from trait.sampler.gibbs import resume as resume_chain
from trait.sampler.gibbs import train
from trait.sampler.hyper import Hyperparams
from trait.sampler.state import init_state, load_checkpoint
from trait.sampler.synthetic import (SyntheticSpec, aspect_aligned_embeddings,
                                     block_word_embeddings, blocked_phi,
                                     generate_synthetic, lexicon_seeded_phi)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _load_corpus_arg(path, args=None):
    rules = None
    if args is not None and getattr(args, "no_stem", False):
        rules = NormalizationConfig(stemming=False)
    min_freq = getattr(args, "min_freq", 1) if args is not None else 1
    return load_corpus(path, rules=rules, min_freq=min_freq)


# ---------------------------------------------------------------------------
# subcommand implementations


def _load_normalization_config(path):
    """Normalization rules from a TOML file's [normalize] section (or the
    top level): stemming, min_token_freq, stop_words, abbreviations,
    negators, placeholders."""
    try:
        import tomllib
    except ImportError:
        import tomli as tomllib
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    body = raw.get("normalize", raw)
    known = {"stemming", "min_token_freq", "stop_words", "abbreviations",
             "negators", "placeholders"}
    unknown = set(body) - known
    if unknown:
        raise ConfigError(f"unknown normalization keys: {sorted(unknown)}")
    from trait.corpus.normalize import (DEFAULT_ABBREVIATIONS, DEFAULT_NEGATORS,
                                        DEFAULT_PLACEHOLDERS, DEFAULT_STOP_WORDS)
    rules = NormalizationConfig(
        stop_words=frozenset(body.get("stop_words", DEFAULT_STOP_WORDS)),
        abbreviations=dict(body.get("abbreviations", DEFAULT_ABBREVIATIONS)),
        placeholders=tuple(tuple(p) for p in body.get("placeholders",
                                                      DEFAULT_PLACEHOLDERS)),
        negators=frozenset(body.get("negators", DEFAULT_NEGATORS)),
        stemming=bool(body.get("stemming", True)),
    )
    return rules, int(body.get("min_token_freq", 1))


def _cmd_preprocess(args):
    if args.config:
        rules, min_freq = _load_normalization_config(args.config)
        if args.no_stem:
            rules = NormalizationConfig(
                stop_words=rules.stop_words, abbreviations=rules.abbreviations,
                placeholders=rules.placeholders, negators=rules.negators,
                stemming=False)
        if args.min_freq != 1:
            min_freq = args.min_freq
    else:
        rules = NormalizationConfig(stemming=not args.no_stem)
        min_freq = args.min_freq
    corpus = load_corpus(args.infile, fmt="auto", rules=rules, min_freq=min_freq)
    corpus.save_jsonl(args.out)
    print(f"preprocess: {corpus.n_documents} documents, {corpus.n_sentences} sentences, "
          f"vocabulary {len(corpus.vocabulary)}")
    return EXIT_OK


def _cmd_graph(args):
    corpus = _load_corpus_arg(args.corpus)
    table = load_trem(args.sent_emb)
    parts = partition_by_attribute(corpus)
    graph = build_correspondence_graph(table, parts, args.rho, corpus.sentence_keys())
    save_graph(args.out, graph)
    print(f"graph: {graph.n_sentences} sentences, {graph.n_edges} edges at rho={args.rho}")
    return EXIT_OK


def _make_hyper(args, corpus):
    return Hyperparams(
        T=args.T, S=args.S, beta=args.beta,
        gamma=args.gamma if args.gamma is not None else None,
        lam=getattr(args, "lam"), epsilon=args.epsilon,
        iterations=args.iters, burn_in=args.burn, seed=args.seed,
        alpha_high=args.alpha_high, alpha_zero=args.alpha_zero,
        alpha_base=args.alpha_base,
    )


def _build_promotion(args, corpus):
    if args.word_emb and args.epsilon > 0:
        table = load_trem(args.word_emb)
        return build_promotion_table(table, corpus.vocabulary, args.epsilon,
                                     args.promotion_threshold, args.promotion_top_k)
    if args.epsilon > 0:
        raise ConfigError("epsilon > 0 requires --word-emb")
    return None


def _cmd_train(args):
    corpus = _load_corpus_arg(args.corpus)
    graph = load_graph(args.graph) if args.graph else None
    promotion = _build_promotion(args, corpus)

    if args.resume:
        meta, alpha, sent_s, sent_t = load_checkpoint(args.resume)
        hyper = Hyperparams(
            T=meta["T"], S=meta["S"], alpha=alpha, beta=np.asarray(meta["beta"]),
            gamma=np.asarray(meta["gamma"]), lam=meta["lambda"],
            epsilon=meta["epsilon"], iterations=meta["iterations"],
            burn_in=meta["burn_in"], seed=meta["seed"],
            alpha_high=meta["alpha_high"], alpha_zero=meta["alpha_zero"],
            alpha_base=meta["alpha_base"])
        state = init_state(corpus, graph, promotion, hyper)
        if state.flat.n_sentences != meta["n_sentences"]:
            raise ConfigError("checkpoint does not match this corpus")
        state.sent_s[:] = sent_s
        state.sent_t[:] = sent_t
        state.counts = state.rebuild_counts()
        state.rng.bit_generator.state = meta["rng_state"]
        state.sweep_index = meta["sweep_index"]
        state, trace = resume_chain(state, args.iters, check_every=args.check_every)
    elif args.chains > 1:
        # independent seeded chains, run one after another; the chain with
        # the best final log-joint becomes the saved checkpoint
        best = None
        trace = []
        for c in range(args.chains):
            hyper = _make_hyper(args, corpus)
            hyper.seed = args.seed + c
            chain_state, chain_trace = train(corpus, graph, promotion, hyper,
                                             check_every=args.check_every)
            final = chain_trace[-1] if chain_trace else float("-inf")
            print(f"train: chain {c} (seed {hyper.seed}) final log-joint {final:.2f}")
            if best is None or final > best[0]:
                best = (final, chain_state, chain_trace)
        _, state, trace = best
    else:
        hyper = _make_hyper(args, corpus)
        state, trace = train(corpus, graph, promotion, hyper,
                             check_every=args.check_every)
    state.save_checkpoint(args.out)
    if trace:
        print(f"train: {len(trace)} sweeps, log-joint {trace[0]:.2f} -> {trace[-1]:.2f}")
    else:
        print("train: 0 sweeps, initial state saved")
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            json.dump(trace, fh)
    return EXIT_OK


def _rebuild_state(args):
    """Reconstruct a trained state from a checkpoint for estimation."""
    corpus = _load_corpus_arg(args.corpus)
    meta, alpha, sent_s, sent_t = load_checkpoint(args.model)
    hyper = Hyperparams(
        T=meta["T"], S=meta["S"], alpha=alpha, beta=np.asarray(meta["beta"]),
        gamma=np.asarray(meta["gamma"]), lam=meta["lambda"], epsilon=meta["epsilon"],
        iterations=meta["iterations"], burn_in=meta["burn_in"], seed=meta["seed"],
        alpha_high=meta["alpha_high"], alpha_zero=meta["alpha_zero"],
        alpha_base=meta["alpha_base"])
    promotion = None
    if meta["epsilon"] > 0:
        if not getattr(args, "word_emb", None):
            raise ConfigError("this model used promotion; pass --word-emb to rebuild counts")
        table = load_trem(args.word_emb)
        promotion = build_promotion_table(
            table, corpus.vocabulary, meta["epsilon"],
            getattr(args, "promotion_threshold", 0.5),
            getattr(args, "promotion_top_k", 10))
    state = init_state(corpus, None, promotion, hyper)
    if state.flat.n_sentences != meta["n_sentences"]:
        raise ConfigError("checkpoint does not match this corpus")
    state.sent_s[:] = sent_s
    state.sent_t[:] = sent_t
    state.counts = state.rebuild_counts()
    return corpus, state


def _cmd_estimate(args):
    corpus, state = _rebuild_state(args)
    est = estimate_all(state, corpus)
    est.save_json(args.out)
    print(f"estimate: phi {est.phi.shape}, psi {est.psi.shape}, theta {est.theta.shape}")
    return EXIT_OK


def _cmd_profile(args):
    est = PosteriorEstimates.load_json(args.est)
    attr_index = {v: k for k, v in enumerate(est.attribute_values)}
    profiles = build_profiles(est.psi, attr_index, top_k=args.top)
    save_profiles(args.out, profiles)
    print(f"profile: {len(profiles)} attribute profiles, top {args.top} aspects each")
    return EXIT_OK


def _cmd_coherence(args):
    est = PosteriorEstimates.load_json(args.est)
    corpus = _load_corpus_arg(args.corpus)
    word_table = load_trem(args.word_emb) if args.word_emb else None
    report = coherence_report(est.phi, corpus.vocabulary, corpus,
                              word_embeddings=word_table, top_n=args.topn,
                              window=args.window)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report.as_dict(), fh, sort_keys=True)
    npmi = report.npmi_mean
    w2v = report.w2v_mean
    print(f"coherence: npmi_mean={npmi if npmi is None else round(npmi, 4)} "
          f"w2v_mean={w2v if w2v is None else round(w2v, 4)}")
    return EXIT_OK


def _cmd_classify(args):
    est = PosteriorEstimates.load_json(args.est)
    corpus = _load_corpus_arg(args.corpus)
    report = classification_report(est.theta, corpus)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report.as_dict(), fh, sort_keys=True)
    print(f"classify: accuracy={report.accuracy:.4f} auc={report.auc:.4f} "
          f"(excluded {report.excluded} unrated)")
    return EXIT_OK


def _cmd_similarity(args):
    profiles = load_profiles(args.profiles)
    matrix = profile_distance_matrix(profiles)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(matrix.as_dict(), fh, sort_keys=True)
    if args.tsv:
        matrix.save_tsv(args.tsv)
    print(f"similarity: {len(matrix.labels)} profiles compared")
    return EXIT_OK


def _cmd_baseline_sim(args):
    corpus = _load_corpus_arg(args.corpus)
    table = load_trem(args.sent_emb)
    matrix = baseline_similarity_matrix(corpus, table)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(matrix.as_dict(), fh, sort_keys=True)
    print(f"baseline-sim: {len(matrix.labels)} attribute groups compared")
    return EXIT_OK


def _cmd_synth(args):
    os.makedirs(args.out_dir, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    spec = SyntheticSpec(n_docs=args.docs, T=args.T, S=args.S, vocab_size=args.W,
                         attribute_values=tuple(f"a{k}" for k in range(args.attrs)))
    if args.scenario == "recovery":
        spec.phi = blocked_phi(args.S, args.T, args.W, rng)
    elif args.scenario == "classification":
        w = args.W
        pos_ids = list(range(0, max(w // 20, 1)))
        neg_ids = list(range(max(w // 20, 1), max(w // 10, 2)))
        spec.phi = lexicon_seeded_phi(args.S, args.T, w, rng, pos_ids, neg_ids)
        spec.theta_dirichlet = (2.0, 0.5)
    elif args.scenario == "mrf":
        spec.phi = blocked_phi(args.S, args.T, args.W, rng, overlap=0.5)
    corpus, truth = generate_synthetic(spec, args.seed)
    corpus_path = os.path.join(args.out_dir, "corpus.jsonl")
    corpus.save_jsonl(corpus_path)
    with open(os.path.join(args.out_dir, "truth.json"), "w", encoding="utf-8") as fh:
        json.dump({"phi": truth.phi.tolist(), "psi": truth.psi.tolist(),
                   "theta": truth.theta.tolist(),
                   "sent_s": truth.sent_s.tolist(),
                   "sent_t": truth.sent_t.tolist()}, fh, sort_keys=True)
    if args.emb:
        keys, vecs = aspect_aligned_embeddings(corpus, truth, args.seed)
        save_trem(os.path.join(args.out_dir, "sent.trem"), keys, vecs)
        wkeys, wvecs = block_word_embeddings(spec, args.seed)
        save_trem(os.path.join(args.out_dir, "word.trem"), wkeys, wvecs)
    print(f"synth: {corpus.n_documents} documents, {corpus.n_sentences} sentences "
          f"-> {args.out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# pipeline


def run_pipeline(cfg: RunConfig, force: bool = False):
    """Execute the configured stages in dependency order.

    Returns (exit_code, manifest). Stages whose outputs all exist are
    recorded as cache hits unless ``force``; a stage failure marks the
    manifest and aborts with the runtime exit code."""
    violations = validate_config(cfg)
    if violations:
        for item in violations:
            print(f"config violation: {item}", file=sys.stderr)
        return EXIT_VALIDATION, {"error": "validation", "violations": violations}

    os.makedirs(cfg.out_dir, exist_ok=True)
    if cfg.corpus and os.path.exists(cfg.corpus):
        corpus_path = cfg.corpus
    elif cfg.corpus:
        corpus_path = cfg.resolve("corpus")
    else:
        corpus_path = os.path.join(cfg.out_dir, "corpus.jsonl")
    graph_path = cfg.resolve("graph")
    model_path = cfg.resolve("model")
    est_path = cfg.resolve("estimates")
    prof_path = cfg.resolve("profiles")

    def preprocess_stage():
        rules = NormalizationConfig(stemming=cfg.stemming)
        corpus = load_corpus(cfg.raw, rules=rules, min_freq=cfg.min_token_freq)
        corpus.save_jsonl(corpus_path)

    def graph_stage():
        corpus = load_corpus(corpus_path)
        table = load_trem(cfg.sent_emb)
        parts = partition_by_attribute(corpus)
        graph = build_correspondence_graph(table, parts, cfg.rho, corpus.sentence_keys())
        save_graph(graph_path, graph)

    def train_stage():
        corpus = load_corpus(corpus_path)
        graph = load_graph(graph_path) if cfg.sent_emb else None
        promotion = None
        if cfg.epsilon > 0 and cfg.word_emb:
            table = load_trem(cfg.word_emb)
            promotion = build_promotion_table(table, corpus.vocabulary, cfg.epsilon,
                                              cfg.promotion_threshold, cfg.promotion_top_k)
        hyper = Hyperparams(T=cfg.T, S=cfg.S, beta=cfg.beta, gamma=cfg.gamma,
                            lam=cfg.lam, epsilon=cfg.epsilon,
                            iterations=cfg.iterations, burn_in=cfg.burn_in,
                            seed=cfg.seed, alpha_high=cfg.alpha_high,
                            alpha_zero=cfg.alpha_zero, alpha_base=cfg.alpha_base)
        state, _ = train(corpus, graph, promotion, hyper, check_every=cfg.check_every)
        state.save_checkpoint(model_path)

    def estimate_stage():
        ns = argparse.Namespace(corpus=corpus_path, model=model_path,
                                word_emb=cfg.word_emb,
                                promotion_threshold=cfg.promotion_threshold,
                                promotion_top_k=cfg.promotion_top_k)
        corpus, state = _rebuild_state(ns)
        estimate_all(state, corpus).save_json(est_path)

    def profile_stage():
        est = PosteriorEstimates.load_json(est_path)
        attr_index = {v: k for k, v in enumerate(est.attribute_values)}
        save_profiles(prof_path, build_profiles(est.psi, attr_index, cfg.profile_top_k))

    def coherence_stage():
        est = PosteriorEstimates.load_json(est_path)
        corpus = load_corpus(corpus_path)
        table = load_trem(cfg.word_emb) if cfg.word_emb else None
        report = coherence_report(est.phi, corpus.vocabulary, corpus,
                                  word_embeddings=table, top_n=cfg.coherence_top_n,
                                  window=cfg.coherence_window)
        with open(os.path.join(cfg.out_dir, "coherence.json"), "w", encoding="utf-8") as fh:
            json.dump(report.as_dict(), fh, sort_keys=True)

    def classify_stage():
        est = PosteriorEstimates.load_json(est_path)
        corpus = load_corpus(corpus_path)
        report = classification_report(est.theta, corpus)
        with open(os.path.join(cfg.out_dir, "classification.json"), "w", encoding="utf-8") as fh:
            json.dump(report.as_dict(), fh, sort_keys=True)

    def similarity_stage():
        profiles = load_profiles(prof_path)
        matrix = profile_distance_matrix(profiles)
        with open(os.path.join(cfg.out_dir, "similarity.json"), "w", encoding="utf-8") as fh:
            json.dump(matrix.as_dict(), fh, sort_keys=True)
        matrix.save_tsv(os.path.join(cfg.out_dir, "similarity.tsv"))

    def baseline_stage():
        corpus = load_corpus(corpus_path)
        table = load_trem(cfg.sent_emb)
        matrix = baseline_similarity_matrix(corpus, table)
        with open(os.path.join(cfg.out_dir, "baseline.json"), "w", encoding="utf-8") as fh:
            json.dump(matrix.as_dict(), fh, sort_keys=True)

    stages = []
    if cfg.raw:
        stages.append(("preprocess", [cfg.raw], [corpus_path], preprocess_stage))
    if cfg.sent_emb:
        stages.append(("graph", [corpus_path, cfg.sent_emb], [graph_path], graph_stage))
    train_inputs = [corpus_path] + ([graph_path] if cfg.sent_emb else []) \
        + ([cfg.word_emb] if cfg.word_emb else [])
    stages.append(("train", train_inputs, [model_path], train_stage))
    stages.append(("estimate", [model_path, corpus_path], [est_path], estimate_stage))
    stages.append(("profile", [est_path], [prof_path], profile_stage))
    stages.append(("coherence", [est_path, corpus_path],
                   [os.path.join(cfg.out_dir, "coherence.json")], coherence_stage))
    stages.append(("classify", [est_path, corpus_path],
                   [os.path.join(cfg.out_dir, "classification.json")], classify_stage))
    stages.append(("similarity", [prof_path],
                   [os.path.join(cfg.out_dir, "similarity.json"),
                    os.path.join(cfg.out_dir, "similarity.tsv")], similarity_stage))
    if cfg.sent_emb:
        stages.append(("baseline-sim", [corpus_path, cfg.sent_emb],
                       [os.path.join(cfg.out_dir, "baseline.json")], baseline_stage))
    if cfg.stages:
        keep = set(cfg.stages)
        stages = [st for st in stages if st[0] in keep]

    manifest = {
        "seed": cfg.seed,
        "versions": {"trait": trait.__version__, "numpy": np.__version__},
        "stages": {},
    }
    try:
        import numba
        manifest["versions"]["numba"] = numba.__version__
    except ImportError:
        pass

    code = EXIT_OK
    for name, inputs, outputs, fn in stages:
        entry = {"inputs": {}, "outputs": outputs}
        for path in inputs:
            if path and os.path.exists(path):
                entry["inputs"][path] = _sha256(path)
        if not force and outputs and all(os.path.exists(p) for p in outputs):
            entry["status"] = "cached"
            manifest["stages"][name] = entry
            print(f"pipeline: {name} cached")
            continue
        started = time.perf_counter()
        try:
            fn()
        except Exception as exc:  # noqa: BLE001 - report any stage failure
            entry["status"] = "failed"
            entry["error"] = str(exc)
            entry["seconds"] = round(time.perf_counter() - started, 3)
            manifest["stages"][name] = entry
            print(f"pipeline: {name} failed: {exc}", file=sys.stderr)
            code = EXIT_RUNTIME
            break
        entry["status"] = "run"
        entry["seconds"] = round(time.perf_counter() - started, 3)
        manifest["stages"][name] = entry
        print(f"pipeline: {name} done in {entry['seconds']}s")

    with open(os.path.join(cfg.out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
    return code, manifest


def _cmd_pipeline(args):
    cfg = load_config(args.config)
    if args.out_dir:
        cfg.out_dir = args.out_dir
    if args.seed is not None:
        cfg.seed = args.seed
    code, _ = run_pipeline(cfg, force=args.force)
    return code


# ---------------------------------------------------------------------------
# argument parsing


def _add_train_flags(p):
    p.add_argument("--T", type=int, default=20)
    p.add_argument("--S", type=int, default=2)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--burn", type=int, default=500)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=0.3)
    p.add_argument("--beta", type=float, default=5.0)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--alpha-high", type=float, default=5.0)
    p.add_argument("--alpha-zero", type=float, default=0.0)
    p.add_argument("--alpha-base", type=float, default=0.05)
    p.add_argument("--promotion-threshold", type=float, default=0.5)
    p.add_argument("--promotion-top-k", type=int, default=10)
    p.add_argument("--check-every", type=int, default=100)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="trait",
        description="Attribute-conditioned aspect and sentiment discovery.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="normalize raw text into an indexed corpus")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None, help="normalization rules TOML")
    p.add_argument("--no-stem", action="store_true")
    p.add_argument("--min-freq", type=int, default=1)
    p.set_defaults(fn=_cmd_preprocess)

    p = sub.add_parser("graph", help="build the sentence correspondence graph")
    p.add_argument("--corpus", required=True)
    p.add_argument("--sent-emb", required=True)
    p.add_argument("--rho", type=float, default=0.7)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_graph)

    p = sub.add_parser("train", help="run the collapsed Gibbs sampler")
    p.add_argument("--corpus", required=True)
    p.add_argument("--graph", default=None)
    p.add_argument("--word-emb", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--resume", default=None)
    p.add_argument("--trace-out", default=None)
    p.add_argument("--chains", type=int, default=1,
                   help="independent seeded chains; the best final log-joint wins")
    _add_train_flags(p)
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("estimate", help="posterior estimates from a checkpoint")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--word-emb", default=None)
    p.add_argument("--promotion-threshold", type=float, default=0.5)
    p.add_argument("--promotion-top-k", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_estimate)

    p = sub.add_parser("profile", help="attribute profiles from estimates")
    p.add_argument("--est", required=True)
    p.add_argument("--top", type=int, default=30)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_profile)

    p = sub.add_parser("coherence", help="NPMI and embedding topic coherence")
    p.add_argument("--est", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--word-emb", default=None)
    p.add_argument("--topn", type=int, default=20)
    p.add_argument("--window", choices=["document", "sentence"], default="document")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_coherence)

    p = sub.add_parser("classify", help="document sentiment classification report")
    p.add_argument("--est", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("similarity", help="profile distance matrix")
    p.add_argument("--profiles", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tsv", default=None)
    p.set_defaults(fn=_cmd_similarity)

    p = sub.add_parser("baseline-sim", help="embedding-baseline attribute similarity")
    p.add_argument("--corpus", required=True)
    p.add_argument("--sent-emb", required=True)
    p.add_argument("--group-by", choices=["attribute"], default="attribute")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_baseline_sim)

    p = sub.add_parser("synth", help="generate a synthetic corpus with ground truth")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--docs", type=int, default=200)
    p.add_argument("--T", type=int, default=4)
    p.add_argument("--S", type=int, default=2)
    p.add_argument("--W", type=int, default=200)
    p.add_argument("--attrs", type=int, default=2)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--scenario", choices=["basic", "recovery", "classification", "mrf"],
                   default="basic")
    p.add_argument("--emb", action="store_true",
                   help="also write aspect-aligned sentence/word embeddings")
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("pipeline", help="run all configured stages")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--force", action="store_true")
    p.set_defaults(fn=_cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except TraitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
