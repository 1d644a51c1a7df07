from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

_WORD = re.compile(r"[^\W\d_]+")


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Stopwords from a one-token-per-line file; the bundled English list by default."""
    if path is None:
        text = resources.files("fxlab.textmine").joinpath("stopwords.txt").read_text()
    else:
        text = Path(path).read_text()
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def tokenize_text(text: str, stopwords: Iterable[str], min_len: int = 2) -> list[str]:
    """Lowercase alphabetic runs of at least ``min_len`` characters that are not stopwords."""
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    return [w for w in _WORD.findall(text.lower()) if len(w) >= min_len and w not in stop]


@dataclass
class TokenizedCorpus:
    vocabulary: dict[str, int]
    docs: list[np.ndarray]
    doc_dates: np.ndarray
    doc_categories: list[str]
    words: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.words:
            self.words = sorted(self.vocabulary, key=self.vocabulary.__getitem__)

    @property
    def n_docs(self) -> int:
        return len(self.docs)

    @property
    def n_tokens(self) -> int:
        return int(sum(d.size for d in self.docs))

    def flat(self) -> tuple[np.ndarray, np.ndarray]:
        """Concatenated word ids and the document index of each token."""
        if self.n_tokens == 0:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        words = np.concatenate(self.docs).astype(np.int64)
        doc_of = np.repeat(np.arange(self.n_docs), [d.size for d in self.docs]).astype(np.int64)
        return words, doc_of

    def doc_frequency(self) -> np.ndarray:
        df = np.zeros(len(self.vocabulary), dtype=np.int64)
        for d in self.docs:
            df[np.unique(d)] += 1
        return df


def tokenize(
    docs: Sequence,
    stopwords: Iterable[str] | None = None,
    min_len: int = 2,
    min_doc_freq: int = 2,
) -> TokenizedCorpus:
    """Build a corpus from :class:`DocumentRecord` items (or plain strings).

    The vocabulary keeps tokens appearing in at least ``min_doc_freq``
    documents, with ids assigned in alphabetical order. Documents keep their
    positions even when nothing survives filtering.
    """
    stop = load_stopwords() if stopwords is None else frozenset(stopwords)
    texts, dates, cats = [], [], []
    for d in docs:
        if isinstance(d, str):
            texts.append(d)
            dates.append(np.datetime64("NaT"))
            cats.append("")
        else:
            texts.append(d.text)
            dates.append(d.date)
            cats.append(d.category)
    token_lists = [tokenize_text(t, stop, min_len) for t in texts]
    df = Counter(w for toks in token_lists for w in set(toks))
    words = sorted(w for w, c in df.items() if c >= min_doc_freq)
    if not words:
        raise ValueError("all documents are empty after filtering")
    vocab = {w: i for i, w in enumerate(words)}
    ids = [np.asarray([vocab[w] for w in toks if w in vocab], dtype=np.int64) for toks in token_lists]
    return TokenizedCorpus(vocab, ids, np.asarray(dates, dtype="datetime64[D]"), cats, words)
