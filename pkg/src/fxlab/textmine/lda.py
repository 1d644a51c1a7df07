"""Latent Dirichlet allocation fitted by collapsed Gibbs sampling."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numba
import numpy as np

from .tokenize import TokenizedCorpus


@numba.njit(cache=True)
def _gibbs_sweep(words, doc_of, z, ndk, nkw, nk, alpha, beta, vbeta, uniforms):
    """Resample every token's topic given all other assignments.

    p(z_i = k | rest) is proportional to
    (n_dk + alpha) * (n_kw + beta) / (n_k + V * beta), with token i removed
    from the counts. ``uniforms`` supplies one U(0,1) draw per token.
    """
    K = nk.shape[0]
    p = np.empty(K)
    for i in range(words.shape[0]):
        w = words[i]
        d = doc_of[i]
        k = z[i]
        ndk[d, k] -= 1
        nkw[k, w] -= 1
        nk[k] -= 1
        total = 0.0
        for t in range(K):
            total += (ndk[d, t] + alpha) * (nkw[t, w] + beta) / (nk[t] + vbeta)
            p[t] = total
        u = uniforms[i] * total
        k = 0
        while k < K - 1 and p[k] <= u:
            k += 1
        z[i] = k
        ndk[d, k] += 1
        nkw[k, w] += 1
        nk[k] += 1


@dataclass
class TopicModel:
    K: int
    alpha: float
    beta: float
    phi: np.ndarray  # (K, V) topic-word distributions
    theta: np.ndarray  # (D, K) document-topic distributions
    assignments: np.ndarray  # topic of every token, corpus order
    seed: int
    iterations: int
    burn_in: int
    words: list[str] = field(default_factory=list)

    def top_words(self, k: int, n: int = 10) -> list[tuple[str, float]]:
        """The ``n`` heaviest words of topic ``k`` with their weights."""
        order = np.argsort(-self.phi[k], kind="stable")[:n]
        return [(self.words[i], float(self.phi[k, i])) for i in order]

    def doc_topics(self) -> np.ndarray:
        """Most probable topic per document (lowest index on ties)."""
        return np.argmax(self.theta, axis=1)

    def to_dict(self) -> dict:
        return {
            "K": self.K, "alpha": self.alpha, "beta": self.beta, "seed": self.seed,
            "iterations": self.iterations, "burn_in": self.burn_in,
            "vocabulary": self.words,
            "phi": self.phi.tolist(), "theta": self.theta.tolist(),
            "assignments": self.assignments.tolist(),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "TopicModel":
        K = int(obj["K"])
        return cls(
            K=K, alpha=float(obj["alpha"]), beta=float(obj["beta"]),
            phi=np.asarray(obj["phi"], dtype=float).reshape(K, -1),
            theta=np.asarray(obj["theta"], dtype=float).reshape(-1, K),
            assignments=np.asarray(obj["assignments"], dtype=np.int64),
            seed=int(obj["seed"]), iterations=int(obj["iterations"]),
            burn_in=int(obj["burn_in"]), words=list(obj["vocabulary"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path: str | Path) -> "TopicModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def count_tables(corpus: TokenizedCorpus, z: np.ndarray, K: int):
    words, doc_of = corpus.flat()
    ndk = np.zeros((corpus.n_docs, K), dtype=np.int64)
    nkw = np.zeros((K, len(corpus.vocabulary)), dtype=np.int64)
    np.add.at(ndk, (doc_of, z), 1)
    np.add.at(nkw, (z, words), 1)
    return ndk, nkw, nkw.sum(axis=1)


def fit_lda_gibbs(
    corpus: TokenizedCorpus,
    K: int,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 1000,
    burn_in: int = 200,
    seed: int = 0,
) -> TopicModel:
    """Collapsed Gibbs sampler for LDA with symmetric priors.

    ``alpha`` defaults to 50/K. phi and theta are averaged over the
    smoothed count estimates of every post-burn-in sweep.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if not iterations > burn_in >= 0:
        raise ValueError("need iterations > burn_in >= 0")
    alpha = 50.0 / K if alpha is None else float(alpha)
    words, doc_of = corpus.flat()
    N, V, D = words.size, len(corpus.vocabulary), corpus.n_docs
    if K > N:
        raise ValueError(f"K={K} exceeds the corpus token count {N}")

    rng = np.random.default_rng(seed)
    z = rng.integers(0, K, size=N).astype(np.int64)
    ndk, nkw, nk = count_tables(corpus, z, K)
    doc_len = ndk.sum(axis=1)

    phi_sum = np.zeros((K, V))
    theta_sum = np.zeros((D, K))
    for it in range(iterations):
        _gibbs_sweep(words, doc_of, z, ndk, nkw, nk, alpha, beta, V * beta, rng.random(N))
        if it >= burn_in:
            phi_sum += (nkw + beta) / (nk[:, None] + V * beta)
            theta_sum += (ndk + alpha) / (doc_len[:, None] + K * alpha)
    n_samples = iterations - burn_in
    phi = phi_sum / n_samples
    theta = theta_sum / n_samples
    # renormalize away accumulated rounding
    phi /= phi.sum(axis=1, keepdims=True)
    theta /= theta.sum(axis=1, keepdims=True)
    return TopicModel(K, alpha, beta, phi, theta, z, seed, iterations, burn_in, list(corpus.words))


def umass_coherence(model: TopicModel, corpus: TokenizedCorpus, top_n: int = 10) -> np.ndarray:
    """Per-topic UMass coherence of each topic's top words.

    sum over ordered pairs (i > j) of log((D(w_i, w_j) + 1) / D(w_j)), with
    D counting documents containing the word(s) and words ranked by phi.
    """
    V = len(corpus.vocabulary)
    n = min(top_n, V)
    tops = [np.argsort(-model.phi[k], kind="stable")[:n] for k in range(model.K)]
    needed = np.unique(np.concatenate(tops))
    col = {w: j for j, w in enumerate(needed)}
    present = np.zeros((corpus.n_docs, needed.size), dtype=np.int64)
    mask = np.zeros(V, dtype=bool)
    mask[needed] = True
    for d, ids in enumerate(corpus.docs):
        for w in np.unique(ids):
            if mask[w]:
                present[d, col[w]] = 1
    co = present.T @ present
    scores = np.zeros(model.K)
    for k, top in enumerate(tops):
        s = 0.0
        for i in range(1, n):
            for j in range(i):
                a, b = col[top[i]], col[top[j]]
                dj = co[b, b]
                if dj == 0:
                    continue
                s += np.log((co[a, b] + 1.0) / dj)
        scores[k] = s
    return scores


def select_topic_count(
    corpus: TokenizedCorpus,
    K_range: Sequence[int],
    fit_params: dict | None = None,
    top_n: int = 10,
) -> tuple[int, dict[int, float], dict[int, TopicModel]]:
    """K maximizing mean UMass coherence over ``K_range`` (ties go to the smaller K)."""
    K_range = list(K_range)
    if not K_range:
        raise ValueError("K_range is empty")
    fit_params = dict(fit_params or {})
    scores, models = {}, {}
    for K in K_range:
        model = fit_lda_gibbs(corpus, K, **fit_params)
        models[K] = model
        scores[K] = float(np.mean(umass_coherence(model, corpus, top_n)))
    best = max(sorted(scores), key=lambda k: (scores[k], -k))
    return best, scores, models
