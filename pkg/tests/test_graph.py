import itertools
import os
import string

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trait.corpus.model import partition_by_attribute
from trait.errors import EmbeddingFormatError, GraphError
from trait.graph.build import (build_correspondence_graph, build_promotion_table,
                               cosine_similarity, load_graph, save_graph)
from trait.graph.embeddings import EmbeddingTable, load_trem, save_trem

from conftest import make_corpus, write_trem


def _table(keys, vectors):
    vectors = np.asarray(vectors, dtype=np.float32)
    return EmbeddingTable(dim=vectors.shape[1], keys=list(keys), vectors=vectors)


class TestCosine:
    def test_identical_vectors(self):
        assert cosine_similarity([1.0, 0.0], [1.0, 0.0]) == pytest.approx(1.0)

    def test_orthogonal_vectors(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.0)

    def test_hand_value(self):
        got = cosine_similarity([1.0, 1.0], [1.0, 0.0])
        assert got == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-9)

    def test_zero_norm_rejected(self):
        with pytest.raises(GraphError):
            cosine_similarity([0.0, 0.0], [1.0, 0.0])

    def test_dim_mismatch_rejected(self):
        with pytest.raises(GraphError):
            cosine_similarity([1.0], [1.0, 0.0])


class TestTremFormat:
    def test_roundtrip(self, tmp_path):
        keys = ["d0#0", "d0#1", "d1#0"]
        vecs = np.random.default_rng(0).normal(size=(3, 5)).astype(np.float32)
        path = write_trem(tmp_path / "e.trem", keys, vecs)
        table = load_trem(path)
        assert table.keys == keys
        assert table.dim == 5
        np.testing.assert_array_equal(table.vectors, vecs)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.trem"
        path.write_bytes(b"NOPE" + b"\x00" * 32)
        with pytest.raises(EmbeddingFormatError, match="magic"):
            load_trem(path)

    def test_truncated_rejected(self, tmp_path):
        path = write_trem(tmp_path / "e.trem", ["k"], np.ones((1, 4)))
        data = path.read_bytes()
        path.write_bytes(data[:-3])
        with pytest.raises(EmbeddingFormatError, match="truncated"):
            load_trem(path)

    def test_trailing_bytes_rejected(self, tmp_path):
        path = write_trem(tmp_path / "e.trem", ["k"], np.ones((1, 4)))
        path.write_bytes(path.read_bytes() + b"xx")
        with pytest.raises(EmbeddingFormatError, match="trailing"):
            load_trem(path)

    def test_zero_norm_vector_rejected(self, tmp_path):
        path = write_trem(tmp_path / "e.trem", ["k"], np.zeros((1, 4)))
        with pytest.raises(EmbeddingFormatError, match="zero-norm"):
            load_trem(path)

    def test_unicode_keys(self, tmp_path):
        path = write_trem(tmp_path / "e.trem", ["café#0"], np.ones((1, 2)))
        assert load_trem(path).keys == ["café#0"]

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.text(alphabet=string.printable, min_size=1, max_size=30),
                    min_size=1, max_size=8, unique=True),
           st.integers(1, 16), st.integers(0, 2**31 - 1))
    def test_roundtrip_property(self, keys, dim, seed):
        import tempfile
        rng = np.random.default_rng(seed)
        vecs = rng.normal(size=(len(keys), dim)).astype(np.float32)
        vecs[np.linalg.norm(vecs, axis=1) == 0.0, 0] = 1.0
        with tempfile.TemporaryDirectory() as tmp:
            path = write_trem(os.path.join(tmp, "p.trem"), keys, vecs)
            table = load_trem(path)
        assert table.keys == keys
        np.testing.assert_array_equal(table.vectors, vecs)


def _six_sentence_setup():
    corpus = make_corpus([
        ("d0", "attr_x", None, [["a"], ["b"], ["c"]]),
        ("d1", "attr_y", None, [["d"], ["e"], ["f"]]),
    ])
    vectors = np.array([
        [1.0, 0.0, 0.0],   # 0 (x)
        [0.9, 0.1, 0.0],   # 1 (x) close to 0
        [0.0, 1.0, 0.0],   # 2 (x) far from both
        [0.0, 0.0, 1.0],   # 3 (y)
        [0.1, 0.0, 0.9],   # 4 (y) close to 3
        [1.0, 0.0, 0.0],   # 5 (y) far from 3 and 4, same direction as 0
    ])
    table = _table(corpus.sentence_keys(), vectors)
    return corpus, table, vectors


def test_graph_matches_bruteforce_at_rho_07():
    corpus, table, vectors = _six_sentence_setup()
    parts = partition_by_attribute(corpus)
    graph = build_correspondence_graph(table, parts, 0.7, corpus.sentence_keys())

    attr = [0, 0, 0, 1, 1, 1]
    expected = {}
    for i, j in itertools.combinations(range(6), 2):
        if attr[i] != attr[j]:
            continue
        if cosine_similarity(vectors[i], vectors[j]) > 0.7:
            expected.setdefault(i, []).append(j)
            expected.setdefault(j, []).append(i)
    assert graph.neighbors == expected
    assert graph.neighbors[0] == [1]
    assert graph.neighbors[3] == [4]
    assert 5 not in graph.neighbors  # same direction as 0 but other attribute


def test_rho_one_yields_empty_graph():
    corpus, table, _ = _six_sentence_setup()
    parts = partition_by_attribute(corpus)
    graph = build_correspondence_graph(table, parts, 1.0, corpus.sentence_keys())
    assert graph.neighbors == {}
    assert graph.n_edges == 0


def test_identical_embeddings_form_complete_triangle():
    corpus = make_corpus([("d0", "x", None, [["a"], ["b"], ["c"]])])
    table = _table(corpus.sentence_keys(), np.tile([0.5, 0.5], (3, 1)))
    parts = partition_by_attribute(corpus)
    graph = build_correspondence_graph(table, parts, 0.99, corpus.sentence_keys())
    assert all(graph.degree(i) == 2 for i in range(3))


def test_graph_symmetry_and_no_self_loops():
    rng = np.random.default_rng(5)
    corpus = make_corpus([
        ("d0", "x", None, [["a"]] * 8),
        ("d1", "y", None, [["b"]] * 7,),
    ])
    table = _table(corpus.sentence_keys(), rng.normal(size=(15, 4)))
    parts = partition_by_attribute(corpus)
    graph = build_correspondence_graph(table, parts, 0.3, corpus.sentence_keys())
    for i, nbrs in graph.neighbors.items():
        assert i not in nbrs
        for j in nbrs:
            assert i in graph.neighbors[j]


def test_random_edge_sample_recheck():
    # re-verify cosine > rho on a random sample of 100 edges
    rng = np.random.default_rng(11)
    corpus = make_corpus([("d0", "x", None, [["a"]] * 40),
                          ("d1", "y", None, [["b"]] * 40)])
    vecs = rng.normal(size=(80, 6))
    keys = corpus.sentence_keys()
    table = _table(keys, vecs)
    rho = 0.2
    graph = build_correspondence_graph(table, partition_by_attribute(corpus),
                                       rho, keys)
    edges = [(i, j) for i, nbrs in graph.neighbors.items() for j in nbrs]
    assert len(edges) >= 100
    for k in rng.choice(len(edges), size=100, replace=False):
        i, j = edges[k]
        assert cosine_similarity(vecs[i], vecs[j]) > rho


def test_raising_rho_never_adds_edges():
    rng = np.random.default_rng(6)
    corpus = make_corpus([("d0", "x", None, [["a"]] * 12)])
    table = _table(corpus.sentence_keys(), rng.normal(size=(12, 3)))
    parts = partition_by_attribute(corpus)
    keys = corpus.sentence_keys()
    edges = {}
    for rho in (0.0, 0.4, 0.8):
        g = build_correspondence_graph(table, parts, rho, keys)
        edges[rho] = {(i, j) for i, nbrs in g.neighbors.items() for j in nbrs}
    assert edges[0.8] <= edges[0.4] <= edges[0.0]


def test_order_independence_under_permutation():
    rng = np.random.default_rng(7)
    corpus = make_corpus([("d0", "x", None, [["a"]] * 9)])
    vecs = rng.normal(size=(9, 4))
    keys = corpus.sentence_keys()
    parts = partition_by_attribute(corpus)
    g1 = build_correspondence_graph(_table(keys, vecs), parts, 0.4, keys)
    perm_parts = {"x": list(reversed(parts["x"]))}
    g2 = build_correspondence_graph(_table(keys, vecs), perm_parts, 0.4, keys)
    assert g1.neighbors == g2.neighbors


def test_missing_embedding_names_sentence():
    corpus, table, _ = _six_sentence_setup()
    short = _table(table.keys[:-1], table.vectors[:-1])
    parts = partition_by_attribute(corpus)
    with pytest.raises(GraphError, match="d1#2"):
        build_correspondence_graph(short, parts, 0.5, corpus.sentence_keys())


def test_graph_file_roundtrip(tmp_path):
    corpus, table, _ = _six_sentence_setup()
    parts = partition_by_attribute(corpus)
    graph = build_correspondence_graph(table, parts, 0.7, corpus.sentence_keys())
    path = tmp_path / "g.bin"
    save_graph(path, graph)
    loaded = load_graph(path)
    assert loaded.neighbors == graph.neighbors
    assert loaded.rho == graph.rho
    assert loaded.n_sentences == graph.n_sentences


class TestPromotionTable:
    def _vocab(self, terms):
        corpus = make_corpus([("d", "x", None, [list(terms)])])
        return corpus.vocabulary

    def test_no_neighbor_above_threshold(self):
        vocab = self._vocab(["alpha", "beta"])
        table = _table(["alpha", "beta"], [[1.0, 0.0], [0.0, 1.0]])
        promo = build_promotion_table(table, vocab, epsilon=0.3, threshold=0.5)
        assert promo.related == {}

    def test_every_weight_is_epsilon(self):
        vocab = self._vocab(["a", "b", "c"])
        table = _table(["a", "b", "c"], [[1, 0], [0.9, 0.1], [0.8, 0.2]])
        promo = build_promotion_table(table, vocab, epsilon=0.3, threshold=0.5)
        weights = {w for pairs in promo.related.values() for _, w in pairs}
        assert weights == {0.3}

    def test_matches_bruteforce_ranking(self):
        terms = ["w0", "w1", "w2", "w3"]
        vocab = self._vocab(terms)
        vecs = np.array([[1.0, 0.0], [0.9, 0.4], [0.0, 1.0], [0.5, 0.5]])
        table = _table(terms, vecs)
        promo = build_promotion_table(table, vocab, epsilon=0.2,
                                      threshold=0.4, top_k=2)
        for v in range(4):
            sims = []
            for w in range(4):
                if w == v:
                    continue
                c = cosine_similarity(vecs[v], vecs[w])
                if c >= 0.4:
                    sims.append((-c, w))
            expected = [(w, 0.2) for _, w in sorted(sims)[:2]]
            assert promo.related.get(v, []) == expected

    def test_word_without_embedding_gets_empty_list(self):
        vocab = self._vocab(["known", "unknown"])
        table = _table(["known"], [[1.0, 0.0]])
        promo = build_promotion_table(table, vocab, epsilon=0.3)
        assert promo.related == {}

    def test_csr_shape(self):
        vocab = self._vocab(["a", "b"])
        table = _table(["a", "b"], [[1, 0], [0.9, 0.1]])
        promo = build_promotion_table(table, vocab, epsilon=0.3, threshold=0.5)
        ids, wts, ptr = promo.to_csr()
        assert ptr.shape == (3,)
        assert ids.size == wts.size == len(promo)
