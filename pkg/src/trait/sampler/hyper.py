"""Hyperparameters, the sentiment lexicon, and the asymmetric word prior.

Sentiment index 0 is positive and 1 is negative throughout the package.
The word prior is asymmetric: a lexicon word gets a high prior under its
own polarity, a zero prior under the opposite one, and every other word
gets a small base prior.
"""

from dataclasses import dataclass, field

import numpy as np

from trait.corpus.porter import stem
from trait.errors import ConfigError

POSITIVE = 0
NEGATIVE = 1

DEFAULT_POSITIVE_WORDS = (
    "amazing", "attractive", "awesome", "best", "comfortable", "correct",
    "enjoy", "excellent", "fantastic", "favorite", "fortunate", "free",
    "fun", "glad", "good", "great", "happy", "impressive", "love", "nice",
    "not_bad", "perfect", "positive", "recommend", "satisfied", "superior",
    "thank", "worth",
)

DEFAULT_NEGATIVE_WORDS = (
    "annoying", "bad", "complain", "disappointed", "hate", "inferior",
    "junk", "mess", "nasty", "negative", "not_good", "not_like",
    "not_recommend", "not_worth", "poor", "problem", "regret", "slow",
    "small", "sorry", "terrible", "trouble", "unacceptable", "unfortunate",
    "upset", "waste", "worst", "worthless", "wrong",
)


def _stem_term(term: str) -> str:
    """Stem a lexicon term; negated terms stem their head word only."""
    if term.startswith("not_"):
        return "not_" + stem(term[4:])
    return stem(term)


@dataclass(frozen=True)
class SentimentLexicon:
    positive: frozenset
    negative: frozenset

    def __post_init__(self):
        overlap = self.positive & self.negative
        if overlap:
            raise ConfigError(f"lexicon polarity overlap: {sorted(overlap)[:5]}")

    @classmethod
    def default(cls) -> "SentimentLexicon":
        return cls(frozenset(DEFAULT_POSITIVE_WORDS), frozenset(DEFAULT_NEGATIVE_WORDS))

    def stemmed(self):
        """(positive, negative) with each term stemmed, matching corpus
        surfaces which are stemmed during normalization."""
        pos = frozenset(_stem_term(t) for t in self.positive)
        neg = frozenset(_stem_term(t) for t in self.negative)
        both = pos & neg
        if both:
            raise ConfigError(f"lexicon polarities collide after stemming: {sorted(both)[:5]}")
        return pos, neg


def build_alpha(lexicon: SentimentLexicon, vocabulary, high: float = 5.0,
                zero: float = 0.0, base: float = 0.05) -> np.ndarray:
    """Asymmetric word prior, shape (2, W).

    Positive-lexicon words get ``high`` under the positive sentiment and
    ``zero`` under the negative one; negative-lexicon words are mirrored;
    all other words get ``base``. Lexicon terms are matched against their
    stemmed forms.
    """
    if not high > base > zero >= 0.0:
        raise ConfigError(f"alpha levels must satisfy high > base > zero >= 0, "
                          f"got {high}, {base}, {zero}")
    pos, neg = lexicon.stemmed()
    w = len(vocabulary)
    alpha = np.full((2, w), base, dtype=np.float64)
    for v in range(w):
        term = vocabulary.term_of(v)
        if term in pos:
            alpha[POSITIVE, v] = high
            alpha[NEGATIVE, v] = zero
        elif term in neg:
            alpha[POSITIVE, v] = zero
            alpha[NEGATIVE, v] = high
    return alpha


def _as_array(value, size, name):
    arr = np.full(size, float(value), dtype=np.float64) if np.isscalar(value) \
        else np.asarray(value, dtype=np.float64)
    if arr.shape != (size,):
        raise ConfigError(f"{name} must be a scalar or length-{size} vector")
    return arr


@dataclass
class Hyperparams:
    T: int
    S: int = 2
    alpha: np.ndarray | None = None        # (S, W); built from the lexicon when None
    beta: object = 5.0                     # per-sentiment Dirichlet prior
    gamma: object = None                   # per-aspect prior, default 50/T
    lam: float = 1.0                       # correspondence reinforcement weight
    epsilon: float = 0.3                   # urn promotion weight
    iterations: int = 1000
    burn_in: int = 500
    seed: int = 42
    alpha_high: float = 5.0
    alpha_zero: float = 0.0
    alpha_base: float = 0.05
    lexicon: SentimentLexicon = field(default_factory=SentimentLexicon.default)

    def __post_init__(self):
        if self.T < 1 or self.S < 1:
            raise ConfigError(f"T and S must be >= 1, got T={self.T}, S={self.S}")
        self.beta = _as_array(self.beta, self.S, "beta")
        if self.gamma is None:
            self.gamma = 50.0 / self.T
        self.gamma = _as_array(self.gamma, self.T, "gamma")
        self.validate()

    def validate(self):
        if np.any(self.beta <= 0.0):
            raise ConfigError("beta must be positive for every sentiment")
        if np.any(self.gamma <= 0.0):
            raise ConfigError("gamma must be positive for every aspect")
        if self.lam < 0.0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.iterations < 0 or self.burn_in < 0:
            raise ConfigError("iterations and burn_in must be >= 0")
        if self.alpha is not None:
            self.alpha = np.asarray(self.alpha, dtype=np.float64)
            if self.alpha.shape[0] != self.S:
                raise ConfigError(f"alpha must have {self.S} sentiment rows")
            if np.any(self.alpha < 0.0):
                raise ConfigError("alpha entries must be >= 0")
            if np.any(self.alpha.sum(axis=1) <= 0.0):
                raise ConfigError("alpha must have a positive row sum per sentiment")

    def resolve_alpha(self, vocabulary) -> np.ndarray:
        """The (S, W) word prior, building the lexicon default if unset."""
        if self.alpha is None:
            if self.S != 2:
                raise ConfigError("the lexicon-based alpha default requires S = 2")
            self.alpha = build_alpha(self.lexicon, vocabulary, self.alpha_high,
                                     self.alpha_zero, self.alpha_base)
        if self.alpha.shape[1] != len(vocabulary):
            raise ConfigError(f"alpha has {self.alpha.shape[1]} columns for a "
                              f"vocabulary of {len(vocabulary)}")
        return self.alpha
