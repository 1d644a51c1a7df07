from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..ingest import DataError, DocumentRecord, SeriesFrame, snap_to_trading_day
from .lda import TopicModel
from .tokenize import TokenizedCorpus

# topic score family -> per-document score key
SCORE_KEYS = {"P": "polarity", "S": "subjectivity", "C": "class_prob"}


@dataclass
class TopicDayScores:
    dates: np.ndarray
    scores: dict[str, np.ndarray]  # family -> (K, n_dates)
    counts: np.ndarray  # (K, n_dates) documents per topic and day

    @property
    def K(self) -> int:
        return int(self.counts.shape[0])

    def to_frame(self) -> SeriesFrame:
        """Columns named ``topic{k}_{family}``, e.g. ``topic0_P``."""
        cols = {}
        for fam, arr in self.scores.items():
            for k in range(self.K):
                cols[f"topic{k}_{fam}"] = arr[k]
        return SeriesFrame(self.dates, cols)


def topic_day_scores(
    model: TopicModel,
    docs: Sequence[DocumentRecord],
    dates: np.ndarray,
    families: Mapping[str, str] | None = None,
    assignment_rule: str = "argmax_theta",
) -> TopicDayScores:
    """Mean member-document score per (topic, trading day).

    Each document joins the topic with the largest theta. Non-trading
    document dates roll to the next trading date. Cells with no documents
    carry the previous day's value forward (0 before the first document).
    """
    if assignment_rule != "argmax_theta":
        raise ValueError(f"unsupported assignment rule {assignment_rule!r}")
    if len(docs) != model.theta.shape[0]:
        raise ValueError("model theta rows must match the documents")
    families = dict(SCORE_KEYS if families is None else families)
    dates = np.asarray(dates, dtype="datetime64[D]")
    K, T = model.K, dates.size
    topic = model.doc_topics()
    day = np.array([snap_to_trading_day(dates, d.date) for d in docs], dtype=np.int64)
    in_range = day < T

    counts = np.zeros((K, T), dtype=np.int64)
    np.add.at(counts, (topic[in_range], day[in_range]), 1)
    out = {}
    for fam, key in families.items():
        has = np.array([key in d.scores for d in docs], dtype=bool)
        if not has.any():
            raise DataError(f"no document carries a {key!r} score")
        sel = has & in_range
        vals = np.array([d.scores.get(key, 0.0) for d in docs])
        total = np.zeros((K, T))
        n = np.zeros((K, T))
        np.add.at(total, (topic[sel], day[sel]), vals[sel])
        np.add.at(n, (topic[sel], day[sel]), 1)
        mean = np.full((K, T), np.nan)
        np.divide(total, n, out=mean, where=n > 0)
        for k in range(K):
            last = 0.0
            for t in range(T):
                if np.isnan(mean[k, t]):
                    mean[k, t] = last
                else:
                    last = mean[k, t]
        out[fam] = mean
    return TopicDayScores(dates, out, counts)


@dataclass
class TopicTrend:
    slice_starts: np.ndarray
    slice_ends: np.ndarray
    prevalence: np.ndarray  # (n_slices, K); NaN rows for empty slices
    n_docs: np.ndarray

    @property
    def present(self) -> np.ndarray:
        return self.n_docs > 0


def topic_trend(model: TopicModel, corpus: TokenizedCorpus, n_slices: int) -> TopicTrend:
    """Mean theta per equal-width calendar slice between the first and last document date."""
    if n_slices < 1:
        raise ValueError("n_slices must be >= 1")
    dates = corpus.doc_dates.astype("datetime64[D]").astype(np.int64)
    lo, hi = int(dates.min()), int(dates.max())
    edges = lo + (hi - lo + 1) * np.arange(n_slices + 1) / n_slices
    which = np.clip(np.searchsorted(edges, dates, side="right") - 1, 0, n_slices - 1)
    prev = np.full((n_slices, model.K), np.nan)
    n_docs = np.zeros(n_slices, dtype=np.int64)
    for s in range(n_slices):
        members = which == s
        n_docs[s] = int(members.sum())
        if n_docs[s]:
            prev[s] = model.theta[members].mean(axis=0)
    starts = np.floor(edges[:-1]).astype(np.int64).astype("datetime64[D]")
    ends = (np.ceil(edges[1:]).astype(np.int64) - 1).astype("datetime64[D]")
    return TopicTrend(starts, ends, prev, n_docs)
