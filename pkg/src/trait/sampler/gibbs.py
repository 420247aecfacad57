"""Collapsed Gibbs operations over a ModelState.

A chain is strictly sequential: each sweep resamples every sentence in
corpus order against the latest counts, removing the sentence's own
contribution first (the -i convention), scoring all (sentiment, aspect)
cells, drawing one cell with a single uniform variate, and adding the
sentence back. Multiple chains with distinct seeds may run concurrently
over the shared immutable corpus and graph.
"""

import math

import numpy as np
from scipy.special import gammaln

from trait.errors import ConsistencyError, TraitError
from trait.sampler import kernels
from trait.sampler.hyper import Hyperparams
from trait.sampler.state import ModelState, init_state


def mrf_bonus(state: ModelState, i: int, t: int) -> float:
    """exp(lambda * fraction of i's neighbors currently assigned t).

    Exactly 1.0 for an empty neighborhood (defined as exp(0): no
    correspondence means no regularization).
    """
    frac = kernels.mrf_agreement(i, t, state.sent_t, state.nbr_ids, state.nbr_ptr)
    return math.exp(state.hyper.lam * frac)


def gibbs_conditional(state: ModelState, i: int) -> np.ndarray:
    """Unnormalized (S, T) sampling weights for sentence i.

    The caller must already have removed sentence i's count contributions
    (see ``update_counts``). Entries are the product of the aspect,
    sentiment, word, and edge-agreement factors; for sentences longer than
    the log-space cutoff the matrix is jointly rescaled by its max, which
    leaves the normalized conditional unchanged.
    """
    f = state.flat
    out = np.empty((state.hyper.S, state.hyper.T), dtype=np.float64)
    mrf_cnt = np.zeros(state.hyper.T, dtype=np.int64)
    kernels.conditional_matrix(
        i, f.sent_doc, f.sent_attr, f.uniq_ids, f.uniq_cnt, f.uniq_ptr,
        f.tok_count, state.nbr_ids, state.nbr_ptr, state.sent_t,
        state.counts.n_word, state.counts.n_word_total,
        state.counts.n_aspect, state.counts.n_aspect_total,
        state.counts.n_sent, state.counts.n_sent_total,
        state.alpha, state.alpha_sum, state.hyper.beta, state.beta_sum,
        state.hyper.gamma, state.gamma_sum, state.hyper.lam, out, mrf_cnt)
    return out


def sample_assignment(matrix, rng) -> tuple:
    """Draw (sentiment, aspect) proportional to the matrix entries.

    Consumes exactly one uniform variate. Raises on negative entries or an
    all-zero matrix.
    """
    matrix = np.ascontiguousarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise TraitError("sample_assignment expects a 2-D matrix")
    if np.any(matrix < 0.0):
        raise TraitError("sampling weights must be nonnegative")
    u = rng.random()
    try:
        cell = kernels.pick_cell(matrix.reshape(-1), u)
    except ValueError as exc:
        raise TraitError(str(exc)) from exc
    return int(cell) // matrix.shape[1], int(cell) % matrix.shape[1]


def update_counts(state: ModelState, i: int, assignment, direction: str) -> None:
    """Apply (+) or invert (-) sentence i's contribution at ``assignment``.

    Every token occurrence moves its own count by one and each promoted
    word by the promotion weight; removal exactly inverts addition.
    """
    if direction not in ("add", "remove"):
        raise TraitError(f"direction must be 'add' or 'remove', got {direction!r}")
    s, t = assignment
    f = state.flat
    try:
        kernels.apply_sentence(
            i, s, t, 1 if direction == "add" else -1,
            f.sent_doc, f.sent_attr, f.uniq_ids, f.uniq_cnt, f.uniq_ptr,
            state.promo_ids, state.promo_wt, state.promo_ptr,
            state.counts.n_word, state.counts.n_word_total,
            state.counts.n_aspect, state.counts.n_aspect_total,
            state.counts.n_sent, state.counts.n_sent_total)
    except ValueError as exc:
        raise ConsistencyError(str(exc)) from exc


def gibbs_sweep(state: ModelState) -> ModelState:
    """Resample every sentence once, in corpus order, in place."""
    f = state.flat
    uniforms = state.rng.random(f.n_sentences)
    try:
        kernels.gibbs_sweep_kernel(
            state.sent_s, state.sent_t, uniforms,
            f.sent_doc, f.sent_attr, f.uniq_ids, f.uniq_cnt, f.uniq_ptr,
            f.tok_count, state.nbr_ids, state.nbr_ptr,
            state.promo_ids, state.promo_wt, state.promo_ptr,
            state.counts.n_word, state.counts.n_word_total,
            state.counts.n_aspect, state.counts.n_aspect_total,
            state.counts.n_sent, state.counts.n_sent_total,
            state.alpha, state.alpha_sum, state.hyper.beta, state.beta_sum,
            state.hyper.gamma, state.gamma_sum, state.hyper.lam,
            state._out, state._mrf_cnt)
    except ValueError as exc:
        raise ConsistencyError(str(exc)) from exc
    state.sweep_index += 1
    return state


def log_joint(state: ModelState) -> float:
    """Collapsed log joint of the current assignments, up to a constant.

    Sums the integrated word, aspect, and sentiment closed forms over the
    current tables plus the full edge-agreement potential. Cells where
    count + prior is zero are excluded (empty components of a degenerate
    prior). With urn promotion the word counts are fractional, so this is
    a trend diagnostic rather than an exact probability.
    """
    c = state.counts
    lj = 0.0

    word = c.n_word + state.alpha[:, None, :]
    mask = word > 0.0
    lj += float(gammaln(np.where(mask, word, 1.0)).sum(where=mask))
    lj -= float(gammaln(c.n_word_total + state.alpha_sum[:, None]).sum())

    aspect = c.n_aspect + state.hyper.gamma[None, None, :]
    lj += float(gammaln(aspect).sum())
    lj -= float(gammaln(c.n_aspect_total + state.gamma_sum).sum())

    sent = c.n_sent + state.hyper.beta[None, :]
    lj += float(gammaln(sent).sum())
    lj -= float(gammaln(c.n_sent_total + state.beta_sum).sum())

    if state.hyper.lam > 0.0 and state.nbr_ids.size:
        agree = 0.0
        for i in range(state.flat.n_sentences):
            agree += kernels.mrf_agreement(i, state.sent_t[i], state.sent_t,
                                           state.nbr_ids, state.nbr_ptr)
        lj += state.hyper.lam * agree
    return lj


def train(corpus, graph, promotion, hyper: Hyperparams, *,
          check_every: int = 100, progress=None):
    """Run burn-in plus sampling sweeps and return (state, trace).

    The trace holds the log-joint diagnostic after each sweep. Parameter
    estimation downstream uses this single final sample. ``check_every``
    controls the periodic rebuild consistency check (0 disables it).
    """
    state = init_state(corpus, graph, promotion, hyper)
    trace = []
    total = hyper.burn_in + hyper.iterations
    for sweep in range(total):
        gibbs_sweep(state)
        trace.append(log_joint(state))
        if check_every and (sweep + 1) % check_every == 0:
            state.check_consistency()
        if progress is not None:
            progress(sweep + 1, total, trace[-1])
    return state, trace


def resume(state: ModelState, extra_sweeps: int, *, check_every: int = 100,
           progress=None):
    """Continue a chain for ``extra_sweeps`` more sweeps."""
    trace = []
    for sweep in range(extra_sweeps):
        gibbs_sweep(state)
        trace.append(log_joint(state))
        if check_every and (sweep + 1) % check_every == 0:
            state.check_consistency()
        if progress is not None:
            progress(sweep + 1, extra_sweeps, trace[-1])
    return state, trace


def fold_in(trained: ModelState, test_corpus, *, sweeps: int = 100,
            seed: int = 0, graph=None) -> np.ndarray:
    """Infer sentiment mixtures for held-out documents.

    Global word and aspect tables stay frozen at their trained values;
    only the held-out documents' sentence-sentiment counts are sampled.
    Returns theta with shape (len(test_corpus.documents), S) estimated
    from the final sample. ``graph`` optionally regularizes the held-out
    sentences among themselves; by default there is no edge structure.
    """
    from trait.sampler.state import FlatCorpus, _empty_graph_csr

    hyper = trained.hyper
    flat = FlatCorpus.from_corpus(test_corpus)
    if flat.vocab_size != trained.flat.vocab_size:
        raise ConsistencyError("held-out corpus must share the training vocabulary")
    if flat.sent_attr.size and flat.sent_attr.max() >= trained.flat.n_attrs:
        raise ConsistencyError("held-out corpus names unknown attribute values")

    if graph is None:
        nbr_ids, nbr_ptr = _empty_graph_csr(flat.n_sentences)
    else:
        if graph.n_sentences != flat.n_sentences:
            raise ConsistencyError("fold-in graph does not cover the held-out sentences")
        nbr_ids, nbr_ptr = graph.to_csr()

    rng = np.random.default_rng(seed)
    sent_s = rng.integers(0, hyper.S, flat.n_sentences).astype(np.int64)
    sent_t = rng.integers(0, hyper.T, flat.n_sentences).astype(np.int64)

    n_doc = np.zeros((flat.n_docs, hyper.S), dtype=np.int64)
    n_doc_total = np.zeros(flat.n_docs, dtype=np.int64)
    for i in range(flat.n_sentences):
        n_doc[flat.sent_doc[i], sent_s[i]] += 1
        n_doc_total[flat.sent_doc[i]] += 1

    out = np.empty((hyper.S, hyper.T), dtype=np.float64)
    mrf_cnt = np.zeros(hyper.T, dtype=np.int64)
    for _ in range(sweeps):
        uniforms = rng.random(flat.n_sentences)
        kernels.foldin_sweep_kernel(
            sent_s, sent_t, uniforms,
            flat.sent_doc, flat.sent_attr, flat.uniq_ids, flat.uniq_cnt,
            flat.uniq_ptr, flat.tok_count, nbr_ids, nbr_ptr,
            trained.counts.n_word, trained.counts.n_word_total,
            trained.counts.n_aspect, trained.counts.n_aspect_total,
            n_doc, n_doc_total,
            trained.alpha, trained.alpha_sum, hyper.beta, trained.beta_sum,
            hyper.gamma, trained.gamma_sum, hyper.lam, out, mrf_cnt)

    theta = (n_doc + hyper.beta[None, :]) / (
        n_doc_total[:, None] + hyper.beta.sum())
    return theta
