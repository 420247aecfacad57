"""Corpus data model, the JSONL loader, and attribute partitioning.

A corpus is a list of attribute-tagged documents whose sentences hold
vocabulary-indexed tokens. Documents arrive through a JSONL file with one
record per line, either raw (``{"id", "attribute", "rating", "text"}``)
or pre-tokenized (``{"id", "attribute", "rating", "sentences"}``).
"""

import json
from dataclasses import dataclass, field

from trait.corpus.normalize import NormalizationConfig, normalize_text
from trait.errors import CorpusFormatError


@dataclass(frozen=True)
class Token:
    surface: str
    vocab_id: int


@dataclass
class Sentence:
    tokens: list
    doc_ref: str
    index_in_doc: int

    def __len__(self):
        return len(self.tokens)

    def surfaces(self):
        return [t.surface for t in self.tokens]

    def vocab_ids(self):
        return [t.vocab_id for t in self.tokens]


@dataclass
class Document:
    id: str
    attribute_value: str
    rating: int | None
    sentences: list


@dataclass
class Vocabulary:
    terms: list
    frequencies: list
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {t: i for i, t in enumerate(self.terms)}
        if len(self.index) != len(self.terms):
            raise CorpusFormatError("vocabulary terms are not unique")

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.index

    def id_of(self, term: str) -> int:
        return self.index[term]

    def term_of(self, vocab_id: int) -> str:
        return self.terms[vocab_id]


@dataclass
class Corpus:
    documents: list
    vocabulary: Vocabulary
    attribute_index: dict
    attribute_values: list

    @property
    def n_documents(self):
        return len(self.documents)

    @property
    def n_sentences(self):
        return sum(len(d.sentences) for d in self.documents)

    def iter_sentences(self):
        """Yield (global_index, document, sentence) in corpus order."""
        g = 0
        for doc in self.documents:
            for sent in doc.sentences:
                yield g, doc, sent
                g += 1

    def sentence_keys(self):
        """Embedding keys, ``<doc_id>#<sentence_index>`` in corpus order."""
        return [f"{d.id}#{s.index_in_doc}" for _, d, s in self.iter_sentences()]

    def subset(self, doc_indices) -> "Corpus":
        """A corpus over selected documents sharing this vocabulary and
        attribute index (for train/test splits and fold-in)."""
        docs = [self.documents[i] for i in doc_indices]
        return Corpus(docs, self.vocabulary, self.attribute_index, self.attribute_values)

    def save_jsonl(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for doc in self.documents:
                rec = {
                    "id": doc.id,
                    "attribute": doc.attribute_value,
                    "rating": doc.rating,
                    "sentences": [s.surfaces() for s in doc.sentences],
                }
                fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def build_corpus(records, min_freq: int = 1) -> Corpus:
    """Index (doc_id, attribute, rating, token_lists) records into a Corpus.

    Vocabulary ids follow first occurrence; terms rarer than ``min_freq``
    are dropped from sentences. Sentences left empty, and then documents
    left empty, are discarded.
    """
    freq = {}
    for _, _, _, sent_tokens in records:
        for toks in sent_tokens:
            for tok in toks:
                freq[tok] = freq.get(tok, 0) + 1

    terms, counts, index = [], [], {}
    for _, _, _, sent_tokens in records:
        for toks in sent_tokens:
            for tok in toks:
                if tok not in index and freq[tok] >= min_freq:
                    index[tok] = len(terms)
                    terms.append(tok)
                    counts.append(freq[tok])
    vocabulary = Vocabulary(terms, counts, index)

    documents = []
    attribute_index, attribute_values = {}, []
    for doc_id, attribute, rating, sent_tokens in records:
        sentences = []
        for toks in sent_tokens:
            kept = [Token(t, index[t]) for t in toks if t in index]
            if kept:
                sentences.append(Sentence(kept, doc_id, len(sentences)))
        if not sentences:
            continue
        if attribute not in attribute_index:
            attribute_index[attribute] = len(attribute_values)
            attribute_values.append(attribute)
        documents.append(Document(doc_id, attribute, rating, sentences))

    return Corpus(documents, vocabulary, attribute_index, attribute_values)


def _parse_record(obj, lineno: int, fmt: str, rules):
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"line {lineno}: record is not a JSON object")
    if "id" not in obj:
        raise CorpusFormatError(f"line {lineno}: missing 'id' field")
    if "attribute" not in obj or not isinstance(obj["attribute"], str):
        raise CorpusFormatError(f"line {lineno}: missing 'attribute' field")
    rating = obj.get("rating")
    if rating is not None:
        if not isinstance(rating, int) or isinstance(rating, bool) or not 1 <= rating <= 5:
            raise CorpusFormatError(f"line {lineno}: rating must be an integer in 1..5 or null")

    if fmt == "auto":
        fmt = "tokens" if "sentences" in obj else "raw"
    if fmt == "tokens":
        sents = obj.get("sentences")
        if not isinstance(sents, list) or any(
            not isinstance(s, list) or any(not isinstance(t, str) or not t for t in s)
            for s in sents
        ):
            raise CorpusFormatError(f"line {lineno}: 'sentences' must be a list of string lists")
        token_lists = [list(s) for s in sents if s]
    elif fmt == "raw":
        text = obj.get("text")
        if not isinstance(text, str):
            raise CorpusFormatError(f"line {lineno}: missing 'text' field")
        token_lists = normalize_text(text, rules)
    else:
        raise CorpusFormatError(f"unknown corpus format {fmt!r}")
    return str(obj["id"]), obj["attribute"], rating, token_lists


def load_corpus(path, fmt: str = "auto", rules: NormalizationConfig | None = None,
                min_freq: int = 1) -> Corpus:
    """Load and index a JSONL corpus file.

    ``fmt`` is one of ``raw``, ``tokens``, or ``auto`` (per-record detection
    on the presence of a ``sentences`` key). Malformed records raise
    CorpusFormatError naming the offending line.
    """
    if fmt not in ("auto", "raw", "tokens"):
        raise CorpusFormatError(f"unknown corpus format {fmt!r}")
    records = []
    seen_ids = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            rec = _parse_record(obj, lineno, fmt, rules)
            if rec[0] in seen_ids:
                raise CorpusFormatError(f"line {lineno}: duplicate document id {rec[0]!r}")
            seen_ids.add(rec[0])
            records.append(rec)
    return build_corpus(records, min_freq=min_freq)


def partition_by_attribute(corpus: Corpus) -> dict:
    """Map each attribute value to the global indices of its sentences.

    Partitions are exhaustive and disjoint: every sentence lands in exactly
    the partition of its document's attribute value.
    """
    parts = {value: [] for value in corpus.attribute_values}
    for g, doc, _ in corpus.iter_sentences():
        parts[doc.attribute_value].append(g)
    return parts
