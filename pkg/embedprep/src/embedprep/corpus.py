"""Minimal reader for the engine's corpus JSONL format.

Pre-tokenized records carry the final sentence segmentation, so embedding
keys line up with the engine's ``<doc_id>#<sentence_index>`` scheme by
construction. Raw records are split here on terminal punctuation; when
the engine's preprocessing would drop or merge sentences differently, run
``trait preprocess`` first and embed the pre-tokenized output instead.
"""

import json
import re

_SENT_SPLIT = re.compile(r"[.!?]+")


class CorpusFormatError(ValueError):
    pass


def iter_documents(path):
    """Yield (doc_id, attribute, sentence_texts) per record."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(rec, dict) or "id" not in rec:
                raise CorpusFormatError(f"line {lineno}: missing 'id' field")
            if "sentences" in rec:
                sentences = [" ".join(toks) for toks in rec["sentences"] if toks]
            elif "text" in rec:
                sentences = [piece.strip() for piece in _SENT_SPLIT.split(rec["text"])
                             if piece.strip()]
            else:
                raise CorpusFormatError(
                    f"line {lineno}: record has neither 'sentences' nor 'text'")
            yield str(rec["id"]), rec.get("attribute"), sentences


def sentence_entries(path):
    """All (key, text) pairs, keys ``<doc_id>#<index>`` in corpus order."""
    entries = []
    for doc_id, _, sentences in iter_documents(path):
        for k, text in enumerate(sentences):
            entries.append((f"{doc_id}#{k}", text))
    return entries


def vocabulary_terms(path):
    """Distinct tokens of a pre-tokenized corpus in first-occurrence order;
    raw records are whitespace-tokenized after lowercasing."""
    seen = {}
    for _, _, sentences in iter_documents(path):
        for text in sentences:
            for tok in text.lower().split():
                if tok not in seen:
                    seen[tok] = len(seen)
    return list(seen)
