from trait.sampler.gibbs import (
    fold_in,
    gibbs_conditional,
    gibbs_sweep,
    log_joint,
    mrf_bonus,
    resume,
    sample_assignment,
    train,
    update_counts,
)
from trait.sampler.hyper import (
    NEGATIVE,
    POSITIVE,
    Hyperparams,
    SentimentLexicon,
    build_alpha,
)
from trait.sampler.state import (
    CountTables,
    FlatCorpus,
    ModelState,
    init_state,
    load_checkpoint,
)
from trait.sampler.synthetic import (
    SyntheticSpec,
    SyntheticTruth,
    aspect_aligned_embeddings,
    block_word_embeddings,
    blocked_phi,
    generate_synthetic,
    lexicon_seeded_phi,
)

__all__ = [
    "fold_in", "gibbs_conditional", "gibbs_sweep", "log_joint", "mrf_bonus",
    "resume", "sample_assignment", "train", "update_counts",
    "NEGATIVE", "POSITIVE", "Hyperparams", "SentimentLexicon", "build_alpha",
    "CountTables", "FlatCorpus", "ModelState", "init_state", "load_checkpoint",
    "SyntheticSpec", "SyntheticTruth", "aspect_aligned_embeddings",
    "block_word_embeddings", "blocked_phi", "generate_synthetic",
    "lexicon_seeded_phi",
]
