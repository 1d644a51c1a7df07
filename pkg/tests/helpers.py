"""Independent oracles shared by the test modules."""

from __future__ import annotations

import string
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from fxlab.ingest import DocumentRecord


def word(prefix: str, i: int) -> str:
    letters = string.ascii_lowercase
    return prefix + letters[i // 26] + letters[i % 26]


@dataclass
class PlantedCorpus:
    docs: list[DocumentRecord]
    words: list[str]
    phi: np.ndarray  # (K, V) true topic-word distributions over ``words``
    theta: np.ndarray  # (D, K) true document mixtures


def planted_corpus(n_topics=4, n_docs=2000, topic_words=50, shared=5, doc_alpha=0.1,
                   mean_len=40, seed=0, start="2020-01-01", late_topic=None) -> PlantedCorpus:
    """Near-disjoint topics: each owns ``topic_words`` words; ``shared`` words belong to all.

    With ``late_topic`` set, that topic's share of each document grows with
    the document date.
    """
    rng = np.random.default_rng(seed)
    prefixes = ["qx", "zv", "jk", "wp", "fg", "hb", "mc", "ry"]
    words = [word(prefixes[k], i) for k in range(n_topics) for i in range(topic_words)]
    words += [word("shared", i) for i in range(shared)]
    V = len(words)
    phi = np.zeros((n_topics, V))
    for k in range(n_topics):
        own = 1.0 / np.arange(1, topic_words + 1) ** 0.5
        phi[k, k * topic_words:(k + 1) * topic_words] = own / own.sum() * 0.95
        phi[k, n_topics * topic_words:] = 0.05 / shared
    dates = np.datetime64(start, "D") + np.sort(rng.integers(0, 365, n_docs))
    theta = rng.dirichlet(np.full(n_topics, doc_alpha), size=n_docs)
    if late_topic is not None:
        frac = np.linspace(0.0, 1.0, n_docs)
        theta = theta * (1 - frac[:, None])
        theta[:, late_topic] += frac
    docs = []
    for d in range(n_docs):
        n = max(1, rng.poisson(mean_len))
        z = rng.choice(n_topics, size=n, p=theta[d])
        toks = [words[rng.choice(V, p=phi[k])] for k in z]
        docs.append(DocumentRecord(dates[d], "news", " ".join(toks)))
    return PlantedCorpus(docs, words, phi, theta)


def matched_cosines(true_phi: np.ndarray, true_words: list[str], model) -> np.ndarray:
    """Cosine similarity of each true topic with its Hungarian-matched fitted topic."""
    col = {w: j for j, w in enumerate(true_words)}
    fitted = np.zeros((model.K, len(true_words)))
    for v, w in enumerate(model.words):
        if w in col:
            fitted[:, col[w]] = model.phi[:, v]
    a = true_phi / np.linalg.norm(true_phi, axis=1, keepdims=True)
    b = fitted / np.linalg.norm(fitted, axis=1, keepdims=True)
    cos = a @ b.T
    rows, cols = linear_sum_assignment(-cos)
    return cos[rows, cols]


def central_difference(f, x: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Numerical gradient of scalar ``f`` with respect to array ``x`` (modified in place)."""
    g = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        i = it.multi_index
        old = x[i]
        x[i] = old + eps
        up = f()
        x[i] = old - eps
        down = f()
        x[i] = old
        g[i] = (up - down) / (2 * eps)
    return g


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b) / np.maximum(1e-8, np.abs(a) + np.abs(b))))


def tiny_overrides(**extra) -> dict:
    """A config small enough for unit tests: short series, few epochs, tiny search."""
    base = {
        "seed": 0,
        "data": {"synthetic": {"n_days": 200, "seed": 0}},
        "segmentation": {"mode": "counts", "train": 120, "context": 30, "forecast": 40},
        "features": {"lda": {"K": 4, "iterations": 20, "burn_in": 5}},
        "models": ["LSTM", "Linear"],
        "rnn": {"defaults": {"hidden_units": 4, "timesteps": 3, "learning_rate": 0.01, "batch_size": 32},
                "epochs": 3},
        "search": {
            "swarm_size": 3,
            "iterations": 2,
            "space": [
                {"name": "hidden_units", "kind": "integer", "lower": 2, "upper": 6},
                {"name": "timesteps", "kind": "integer", "lower": 2, "upper": 4},
                {"name": "learning_rate", "kind": "log-continuous", "lower": 1e-3, "upper": 3e-2},
                {"name": "batch_size", "kind": "choice", "choices": [16, 32]},
            ],
        },
        "baselines": {"var_max_lag": 2},
        "text_ablation": {"models": ["Linear", "VAR"]},
        "kind_ablation": {"model": "Linear"},
        "dm": {"models": ["LSTM", "Linear", "AR"]},
    }
    from fxlab.config import deep_merge

    return deep_merge(base, extra)
