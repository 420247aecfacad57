"""Hot inner loops of the collapsed Gibbs sampler.

Every function here is numba-compatible and is jitted when the backend
enables numba; with ``TRAIT_NO_NUMBA=1`` the same functions run as plain
Python over numpy arrays, producing bit-identical results. The caller
owns the -i convention: these kernels only read and update count tables.

Count tables: n_word (S,T,W) float64 holds fractional urn counts;
n_word_total (S,T); n_aspect (S,A,T) int64; n_aspect_total (S,A);
n_doc (D,S) int64 sentence-sentiment counts; n_doc_total (D).
"""

import numpy as np

from trait.backend import njit

# Sentences longer than this switch the word factor to log space; shorter
# ones use the plain rising-factorial product.
LOG_SPACE_TOKENS = 20


@njit(cache=True)
def apply_sentence(i, s, t, delta,
                   sent_doc, sent_attr, uniq_ids, uniq_cnt, uniq_ptr,
                   promo_ids, promo_wt, promo_ptr,
                   n_word, n_word_total, n_aspect, n_aspect_total,
                   n_doc, n_doc_total):
    """Add (delta=+1) or remove (delta=-1) sentence i at assignment (s, t).

    Each token occurrence moves its own count by delta and each promoted
    word of that token by delta * weight; removal therefore inverts
    addition exactly.
    """
    d = sent_doc[i]
    a = sent_attr[i]
    n_doc[d, s] += delta
    n_doc_total[d] += delta
    n_aspect[s, a, t] += delta
    n_aspect_total[s, a] += delta
    if n_doc[d, s] < 0 or n_aspect[s, a, t] < 0:
        raise ValueError("sentence count went negative; tables are inconsistent")
    fdelta = float(delta)
    for k in range(uniq_ptr[i], uniq_ptr[i + 1]):
        v = uniq_ids[k]
        c = float(uniq_cnt[k])
        n_word[s, t, v] += fdelta * c
        n_word_total[s, t] += fdelta * c
        if n_word[s, t, v] < -1e-9:
            raise ValueError("word count went negative; tables are inconsistent")
        for p in range(promo_ptr[v], promo_ptr[v + 1]):
            w = promo_ids[p]
            e = fdelta * c * promo_wt[p]
            n_word[s, t, w] += e
            n_word_total[s, t] += e
            if n_word[s, t, w] < -1e-9:
                raise ValueError("promoted count went negative; tables are inconsistent")


@njit(cache=True)
def rebuild_tables(sent_s, sent_t,
                   sent_doc, sent_attr, uniq_ids, uniq_cnt, uniq_ptr,
                   promo_ids, promo_wt, promo_ptr,
                   n_word, n_word_total, n_aspect, n_aspect_total,
                   n_doc, n_doc_total):
    """Fill zeroed tables from scratch by adding every sentence."""
    for i in range(sent_s.shape[0]):
        apply_sentence(i, sent_s[i], sent_t[i], 1,
                       sent_doc, sent_attr, uniq_ids, uniq_cnt, uniq_ptr,
                       promo_ids, promo_wt, promo_ptr,
                       n_word, n_word_total, n_aspect, n_aspect_total,
                       n_doc, n_doc_total)


@njit(cache=True)
def mrf_agreement(i, t, sent_t, nbr_ids, nbr_ptr):
    """Fraction of sentence i's graph neighbors currently assigned t.

    Zero when the neighborhood is empty (the exp(0) convention)."""
    lo = nbr_ptr[i]
    hi = nbr_ptr[i + 1]
    if hi == lo:
        return 0.0
    hits = 0
    for k in range(lo, hi):
        if sent_t[nbr_ids[k]] == t:
            hits += 1
    return hits / (hi - lo)


@njit(cache=True)
def conditional_matrix(i,
                       sent_doc, sent_attr, uniq_ids, uniq_cnt, uniq_ptr,
                       tok_count, nbr_ids, nbr_ptr, sent_t,
                       n_word, n_word_total, n_aspect, n_aspect_total,
                       n_doc, n_doc_total,
                       alpha, alpha_sum, beta, beta_sum, gamma, gamma_sum,
                       lam, out, mrf_cnt):
    """Unnormalized sampling weights over (sentiment, aspect) for sentence i.

    Assumes the caller already removed sentence i from the tables. Each
    entry is the product of the aspect, sentiment, word, and edge-agreement
    factors; long sentences are evaluated in log space and jointly rescaled
    by the max, which leaves the normalized distribution unchanged.
    """
    S = n_word.shape[0]
    T = n_word.shape[1]
    d = sent_doc[i]
    a = sent_attr[i]
    c_i = tok_count[i]
    use_log = c_i > LOG_SPACE_TOKENS

    deg = nbr_ptr[i + 1] - nbr_ptr[i]
    for t in range(T):
        mrf_cnt[t] = 0
    for k in range(nbr_ptr[i], nbr_ptr[i + 1]):
        mrf_cnt[sent_t[nbr_ids[k]]] += 1

    for s in range(S):
        sent_f = (n_doc[d, s] + beta[s]) / (n_doc_total[d] + beta_sum)
        for t in range(T):
            aspect_f = (n_aspect[s, a, t] + gamma[t]) / (n_aspect_total[s, a] + gamma_sum)
            bonus_exponent = 0.0
            if deg > 0:
                bonus_exponent = lam * mrf_cnt[t] / deg
            if use_log:
                lw = 0.0
                dead = False
                for k in range(uniq_ptr[i], uniq_ptr[i + 1]):
                    v = uniq_ids[k]
                    base = n_word[s, t, v] + alpha[s, v]
                    for c in range(uniq_cnt[k]):
                        term = base + c
                        if term <= 0.0:
                            dead = True
                            break
                        lw += np.log(term)
                    if dead:
                        break
                if dead:
                    out[s, t] = -np.inf
                else:
                    den_base = n_word_total[s, t] + alpha_sum[s]
                    for c in range(c_i):
                        lw -= np.log(den_base + c)
                    out[s, t] = np.log(aspect_f) + np.log(sent_f) + lw + bonus_exponent
            else:
                num = 1.0
                for k in range(uniq_ptr[i], uniq_ptr[i + 1]):
                    v = uniq_ids[k]
                    base = n_word[s, t, v] + alpha[s, v]
                    for c in range(uniq_cnt[k]):
                        num *= base + c
                den = 1.0
                den_base = n_word_total[s, t] + alpha_sum[s]
                for c in range(c_i):
                    den *= den_base + c
                out[s, t] = aspect_f * sent_f * (num / den) * np.exp(bonus_exponent)

    if use_log:
        hi = -np.inf
        for s in range(S):
            for t in range(T):
                if out[s, t] > hi:
                    hi = out[s, t]
        if hi == -np.inf:
            raise ValueError("conditional matrix is identically zero")
        for s in range(S):
            for t in range(T):
                out[s, t] = np.exp(out[s, t] - hi)


@njit(cache=True)
def pick_cell(weights, u):
    """Index of the cell drawn from a flat nonnegative weight vector with a
    single uniform variate; raises when the weights sum to zero."""
    total = 0.0
    for k in range(weights.shape[0]):
        total += weights[k]
    if total <= 0.0:
        raise ValueError("cannot sample from an all-zero weight matrix")
    target = u * total
    acc = 0.0
    last = -1
    for k in range(weights.shape[0]):
        w = weights[k]
        if w > 0.0:
            last = k
            acc += w
            if acc > target:
                return k
    return last


@njit(cache=True)
def gibbs_sweep_kernel(sent_s, sent_t, uniforms,
                       sent_doc, sent_attr, uniq_ids, uniq_cnt, uniq_ptr,
                       tok_count, nbr_ids, nbr_ptr,
                       promo_ids, promo_wt, promo_ptr,
                       n_word, n_word_total, n_aspect, n_aspect_total,
                       n_doc, n_doc_total,
                       alpha, alpha_sum, beta, beta_sum, gamma, gamma_sum,
                       lam, out, mrf_cnt):
    """One pass over all sentences in corpus order: remove, score, draw, add."""
    T = n_word.shape[1]
    for i in range(sent_s.shape[0]):
        apply_sentence(i, sent_s[i], sent_t[i], -1,
                       sent_doc, sent_attr, uniq_ids, uniq_cnt, uniq_ptr,
                       promo_ids, promo_wt, promo_ptr,
                       n_word, n_word_total, n_aspect, n_aspect_total,
                       n_doc, n_doc_total)
        conditional_matrix(i, sent_doc, sent_attr, uniq_ids, uniq_cnt, uniq_ptr,
                           tok_count, nbr_ids, nbr_ptr, sent_t,
                           n_word, n_word_total, n_aspect, n_aspect_total,
                           n_doc, n_doc_total,
                           alpha, alpha_sum, beta, beta_sum, gamma, gamma_sum,
                           lam, out, mrf_cnt)
        cell = pick_cell(out.reshape(-1), uniforms[i])
        s_new = cell // T
        t_new = cell % T
        sent_s[i] = s_new
        sent_t[i] = t_new
        apply_sentence(i, s_new, t_new, 1,
                       sent_doc, sent_attr, uniq_ids, uniq_cnt, uniq_ptr,
                       promo_ids, promo_wt, promo_ptr,
                       n_word, n_word_total, n_aspect, n_aspect_total,
                       n_doc, n_doc_total)


@njit(cache=True)
def foldin_sweep_kernel(sent_s, sent_t, uniforms,
                        sent_doc, sent_attr, uniq_ids, uniq_cnt, uniq_ptr,
                        tok_count, nbr_ids, nbr_ptr,
                        n_word, n_word_total, n_aspect, n_aspect_total,
                        n_doc, n_doc_total,
                        alpha, alpha_sum, beta, beta_sum, gamma, gamma_sum,
                        lam, out, mrf_cnt):
    """Fold-in pass for held-out documents.

    Global word and aspect tables stay frozen (no -i removal, no update);
    only the held-out documents' sentence-sentiment counts evolve.
    """
    T = n_word.shape[1]
    for i in range(sent_s.shape[0]):
        d = sent_doc[i]
        n_doc[d, sent_s[i]] -= 1
        n_doc_total[d] -= 1
        conditional_matrix(i, sent_doc, sent_attr, uniq_ids, uniq_cnt, uniq_ptr,
                           tok_count, nbr_ids, nbr_ptr, sent_t,
                           n_word, n_word_total, n_aspect, n_aspect_total,
                           n_doc, n_doc_total,
                           alpha, alpha_sum, beta, beta_sum, gamma, gamma_sum,
                           lam, out, mrf_cnt)
        cell = pick_cell(out.reshape(-1), uniforms[i])
        s_new = cell // T
        t_new = cell % T
        sent_s[i] = s_new
        sent_t[i] = t_new
        n_doc[d, s_new] += 1
        n_doc_total[d] += 1
