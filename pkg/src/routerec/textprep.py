"""Review text preparation: stopword filtering, RAKE phrases, lexicon labels."""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterable, Optional

from .corpus import NEGATIVE, POSITIVE, TagDictionary

# Phrase boundary marker emitted for punctuation and stopwords.
BOUNDARY = None

_WORD_RE = re.compile(r"[a-z0-9]+")
_TOKEN_RE = re.compile(r"[a-z0-9]+|[^\sa-z0-9]")


@dataclass(frozen=True)
class Stoplist:
    words: frozenset[str]

    def __contains__(self, word: str) -> bool:
        return word in self.words


@dataclass(frozen=True)
class ScoredPhrase:
    words: tuple[str, ...]
    score: float


@dataclass(frozen=True)
class SentimentLexicon:
    positive: frozenset[str]
    negative: frozenset[str]
    negations: frozenset[str]

    def __post_init__(self) -> None:
        overlap = self.positive & self.negative
        if overlap:
            raise ValueError(f"lexicon polarity overlap: {sorted(overlap)[:5]}")


def load_stoplist(path: str) -> Stoplist:
    """One lowercase word per line; '#' starts a comment."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.split("#", 1)[0].strip().lower()
            if word:
                words.add(word)
    return Stoplist(frozenset(words))


def default_stoplist() -> Stoplist:
    text = resources.files("routerec.data").joinpath("stopwords.txt").read_text("utf-8")
    words = {w.split("#", 1)[0].strip().lower() for w in text.splitlines()}
    return Stoplist(frozenset(w for w in words if w))


def load_lexicon(path: str) -> SentimentLexicon:
    """Sections [positive], [negative], [negation]; one word per line."""
    with open(path, encoding="utf-8") as fh:
        return _parse_lexicon(fh.read())


def default_lexicon() -> SentimentLexicon:
    text = resources.files("routerec.data").joinpath("lexicon.txt").read_text("utf-8")
    return _parse_lexicon(text)


def _parse_lexicon(text: str) -> SentimentLexicon:
    sections: dict[str, set[str]] = {"positive": set(), "negative": set(), "negation": set()}
    current: Optional[set[str]] = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip().lower()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1]
            if name not in sections:
                raise ValueError(f"unknown lexicon section [{name}]")
            current = sections[name]
        elif current is None:
            raise ValueError("lexicon entries before any section header")
        else:
            current.add(line)
    return SentimentLexicon(
        positive=frozenset(sections["positive"]),
        negative=frozenset(sections["negative"]),
        negations=frozenset(sections["negation"]),
    )


def tokenize_and_filter(text: str, stoplist: Stoplist) -> list[Optional[str]]:
    """Lowercased word tokens in order, with BOUNDARY (None) markers.

    Punctuation characters and stoplist words both become boundaries;
    boundaries split RAKE candidate phrases.
    """
    out: list[Optional[str]] = []
    for token in _TOKEN_RE.findall(text.lower()):
        if _WORD_RE.fullmatch(token) and token not in stoplist:
            out.append(token)
        else:
            out.append(BOUNDARY)
    return out


def _candidate_phrases(
    tokens: list[Optional[str]], max_phrase_words: int
) -> list[tuple[str, ...]]:
    phrases: list[tuple[str, ...]] = []
    run: list[str] = []

    def flush() -> None:
        # Runs longer than the cap split into consecutive cap-sized chunks
        # so comma-poor reviews still yield usable phrases.
        for start in range(0, len(run), max_phrase_words):
            phrases.append(tuple(run[start : start + max_phrase_words]))
        run.clear()

    for token in tokens:
        if token is BOUNDARY:
            if run:
                flush()
        else:
            run.append(token)
    if run:
        flush()
    return phrases


def rake_extract(
    text: str, stoplist: Stoplist, max_phrase_words: int = 4
) -> list[ScoredPhrase]:
    """RAKE keyword extraction.

    Candidate phrases are maximal runs of content words between boundaries.
    Each word w gets score deg(w)/freq(w), where freq counts occurrences
    across candidates and deg adds the co-occurrence count with other words
    inside candidates; a phrase scores the sum of its word scores. Distinct
    phrases are returned in descending score, ties by first occurrence.
    """
    tokens = tokenize_and_filter(text, stoplist)
    candidates = _candidate_phrases(tokens, max_phrase_words)
    if not candidates:
        return []
    freq: dict[str, int] = {}
    degree: dict[str, int] = {}
    for phrase in candidates:
        for word in phrase:
            freq[word] = freq.get(word, 0) + 1
            degree[word] = degree.get(word, 0) + len(phrase)
    word_score = {w: degree[w] / freq[w] for w in freq}
    seen: dict[tuple[str, ...], int] = {}
    for order, phrase in enumerate(candidates):
        seen.setdefault(phrase, order)
    scored = [
        ScoredPhrase(words=phrase, score=sum(word_score[w] for w in phrase))
        for phrase in seen
    ]
    scored.sort(key=lambda p: (-p.score, seen[p.words]))
    return scored


def phrase_term(phrase: ScoredPhrase) -> str:
    return "_".join(phrase.words)


def phrases_to_tags(
    phrases: list[ScoredPhrase], dictionary: TagDictionary, top_n: int
) -> frozenset[int]:
    """Intern the top_n highest-scoring phrases as underscore-joined tags."""
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    return frozenset(dictionary.intern(phrase_term(p)) for p in phrases[:top_n])


def make_rake_tagger(
    stoplist: Optional[Stoplist] = None,
    top_n: int = 10,
    max_phrase_words: int = 4,
) -> Callable[[str], list[str]]:
    """Tagger for corpus.build_database: review text -> top RAKE phrase terms."""
    stops = stoplist if stoplist is not None else default_stoplist()

    def tag(text: str) -> list[str]:
        phrases = rake_extract(text, stops, max_phrase_words=max_phrase_words)
        return [phrase_term(p) for p in phrases[:top_n]]

    return tag


def lexicon_label(
    text: str, lexicon: SentimentLexicon, negation_window: int = 2
) -> Optional[str]:
    """Bootstrap label from polarity word counts; None when undecided.

    A negation word within ``negation_window`` tokens before a polarity hit
    flips that hit. Ground-truth labels always take precedence over this.
    """
    words = _WORD_RE.findall(text.lower())
    pos_hits = 0
    neg_hits = 0
    for i, word in enumerate(words):
        polarity = 0
        if word in lexicon.positive:
            polarity = 1
        elif word in lexicon.negative:
            polarity = -1
        else:
            continue
        window = words[max(0, i - negation_window) : i]
        if any(w in lexicon.negations for w in window):
            polarity = -polarity
        if polarity > 0:
            pos_hits += 1
        else:
            neg_hits += 1
    if pos_hits > neg_hits:
        return POSITIVE
    if neg_hits > pos_hits:
        return NEGATIVE
    return None
