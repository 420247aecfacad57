"""Text normalization: cleanup, placeholders, splitting, negation, stemming.

The pipeline per sentence is: strip HTML, substitute placeholder patterns
(URLs, money, bare numbers), expand abbreviations and contractions, split
on terminal punctuation, tokenize, merge negator bigrams into ``not_<head>``
tokens, drop stop words and stray negators, and stem what remains.
Negation merging runs before stop-word removal, so the merged head is
whatever word literally follows the negator.
"""

import re
from dataclasses import dataclass, field

from trait.corpus.porter import stem

DEFAULT_NEGATORS = frozenset({"no", "not", "nothing"})

# Compact English stop-word list. Negators are handled separately and are
# deliberately absent so the merge pass sees them.
DEFAULT_STOP_WORDS = frozenset(
    """a about above after again against all am an and any are as at be because
    been before being below between both but by could did do does doing down
    during each few for from further had has have having he her here hers
    herself him himself his how i if in into is it its itself just me more most
    my myself nor now of off on once only or other our ours ourselves out over
    own same she should so some such than that the their theirs them themselves
    then there these they this those through to too under until up very was we
    were what when where which while who whom why will with would you your yours
    yourself yourselves s t d ll m o re ve y""".split()
)

DEFAULT_ABBREVIATIONS = {
    "mr.": "mr",
    "mrs.": "mrs",
    "ms.": "ms",
    "dr.": "dr",
    "st.": "st",
    "vs.": "vs",
    "etc.": "etc",
    "e.g.": "eg",
    "i.e.": "ie",
    "approx.": "approx",
    "dept.": "dept",
    "can't": "cannot",
    "won't": "will not",
    "don't": "do not",
    "didn't": "did not",
    "doesn't": "does not",
    "isn't": "is not",
    "wasn't": "was not",
    "aren't": "are not",
    "weren't": "were not",
    "couldn't": "could not",
    "wouldn't": "would not",
    "shouldn't": "should not",
    "hasn't": "has not",
    "haven't": "have not",
    "hadn't": "had not",
    "it's": "it is",
    "i'm": "i am",
    "i've": "i have",
    "we've": "we have",
    "you're": "you are",
}

# Applied in order; URLs first so their dots and digits never reach the
# money/number rules or the sentence splitter.
DEFAULT_PLACEHOLDERS = (
    (r"(?:https?://|www\.)[^\s<>\"]+", "#LINK#"),
    (r"[$€£]\s?\d+(?:[.,]\d+)*", "#MONEY#"),
    (r"\b\d+(?:[.,]\d+)*(?:st|nd|rd|th)?\b", "#NUM#"),
)

_HTML_RE = re.compile(r"<[^>]+>")
_SENT_SPLIT_RE = re.compile(r"[.!?]+")
# Placeholder tokens, or words that may carry internal underscores from a
# previous normalization pass (kept whole so re-normalizing is a no-op).
_TOKEN_RE = re.compile(r"#[A-Z]+#|[A-Za-z]+(?:_[A-Za-z]+)*")


@dataclass(frozen=True)
class NormalizationConfig:
    stop_words: frozenset = DEFAULT_STOP_WORDS
    abbreviations: dict = field(default_factory=lambda: dict(DEFAULT_ABBREVIATIONS))
    placeholders: tuple = DEFAULT_PLACEHOLDERS
    negators: frozenset = DEFAULT_NEGATORS
    stemming: bool = True

    def compiled_abbreviations(self):
        rules = []
        for key, repl in self.abbreviations.items():
            pat = re.compile(r"(?<![A-Za-z])" + re.escape(key) + r"(?![A-Za-z])", re.IGNORECASE)
            rules.append((pat, repl))
        return rules

    def compiled_placeholders(self):
        return [(re.compile(pat), tok) for pat, tok in self.placeholders]


def _is_plain_word(token: str) -> bool:
    return token.isalpha()


def _merge_negations(tokens, rules: NormalizationConfig):
    out = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok in rules.negators and i + 1 < len(tokens):
            nxt = tokens[i + 1]
            if _is_plain_word(nxt) and nxt not in rules.negators:
                head = stem(nxt) if rules.stemming else nxt
                out.append("not_" + head)
                i += 2
                continue
        out.append(tok)
        i += 1
    return out


def normalize_text(raw: str, rules: NormalizationConfig | None = None):
    """Normalize raw text into a list of sentences (token-string lists).

    Empty sentences are discarded, so the result may be shorter than the
    number of punctuation-delimited segments; degenerate input yields [].
    """
    if rules is None:
        rules = NormalizationConfig()
    if not raw or not raw.strip():
        return []

    text = _HTML_RE.sub(" ", raw)
    for pat, tok in rules.compiled_placeholders():
        text = pat.sub(" " + tok + " ", text)
    for pat, repl in rules.compiled_abbreviations():
        text = pat.sub(repl, text)

    sentences = []
    for piece in _SENT_SPLIT_RE.split(text):
        tokens = [
            t if t.startswith("#") else t.lower() for t in _TOKEN_RE.findall(piece)
        ]
        if not tokens:
            continue
        tokens = _merge_negations(tokens, rules)
        kept = []
        for tok in tokens:
            if "_" in tok or tok.startswith("#"):
                kept.append(tok)
                continue
            if tok in rules.stop_words or tok in rules.negators:
                continue
            kept.append(stem(tok) if rules.stemming else tok)
        if kept:
            sentences.append(kept)
    return sentences
