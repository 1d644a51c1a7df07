"""Assemble the model-ready feature frame from price series and documents."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ingest import DataError, DocumentRecord, SeriesFrame, snap_to_trading_day
from .sentiment import daily_sentiment_value, sentiment_index
from .textmine import (
    TopicModel,
    fit_lda_gibbs,
    load_stopwords,
    select_topic_count,
    tokenize,
    topic_day_scores,
)

logger = logging.getLogger(__name__)

TARGET = "ret"
TEXT_RECIPES = ("si_news", "si_analysis", "class_news", "class_analysis", "topic_scores")
KINDS = {
    "kind1": ("si_news", "si_analysis"),
    "kind2": ("class_news", "class_analysis"),
    # per-topic score series stand in for the undefined "LDA1 and LDA2"
    "kind3": ("topic_scores",),
}


@dataclass
class FeatureData:
    frame: SeriesFrame  # raw (unscaled) target and features
    financial: list[str]
    text: dict[str, list[str]]  # recipe name -> columns
    topic_model: TopicModel | None = None
    coherence: dict[int, float] = field(default_factory=dict)
    close: np.ndarray | None = None  # close aligned with frame rows

    def columns(self, recipes: Sequence[str]) -> list[str]:
        """Expand recipe names (``lagged_indicators``, text recipes, ``topic<k>``) to columns."""
        cols: list[str] = []
        for r in recipes:
            if r == "lagged_indicators":
                new = self.financial
            elif r in self.text:
                new = self.text[r]
            elif r.startswith("topic") and r[5:].isdigit():
                new = [c for c in self.text.get("topic_scores", []) if c.startswith(f"{r}_")]
                if not new:
                    raise DataError(f"no topic scores for {r!r}")
            else:
                raise DataError(f"unknown feature recipe {r!r}")
            cols.extend(c for c in new if c not in cols)
        return cols

    def kind_columns(self, kinds: Sequence[str]) -> list[str]:
        recipes: list[str] = []
        for k in kinds:
            if k not in KINDS:
                raise DataError(f"unknown textual kind {k!r}")
            recipes.extend(KINDS[k])
        return self.columns(recipes)

    @property
    def text_columns(self) -> list[str]:
        return self.columns(list(self.text))


def daily_mean_score(docs: Sequence[DocumentRecord], category: str, dates: np.ndarray,
                     score: str, empty: float) -> np.ndarray:
    """Mean score per trading day; days without documents take ``empty``."""
    total = np.zeros(dates.size)
    count = np.zeros(dates.size)
    for d in docs:
        if d.category == category and score in d.scores:
            i = snap_to_trading_day(dates, d.date)
            if i < dates.size:
                total[i] += d.scores[score]
                count[i] += 1
    if not count.any():
        raise DataError(f"no {category} documents carry {score!r}")
    out = np.full(dates.size, empty)
    np.divide(total, count, out=out, where=count > 0)
    return out


def log_returns(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if np.all(values > 0):
        return np.diff(np.log(values))
    return np.diff(values)


def build_features(
    series: SeriesFrame,
    docs: Sequence[DocumentRecord] | None,
    close_column: str = "close",
    text_recipes: Sequence[str] = TEXT_RECIPES,
    decay_scale: float = 7.0,
    si_window: int | None = None,
    lda: dict | None = None,
    stopwords: frozenset[str] | None = None,
) -> FeatureData:
    """Target ``ret`` (log return of the close), financial returns, and text series.

    Financial features are the close return itself plus the return of every
    other series (``ret_<name>``). Text features are computed per trading day;
    the first row is dropped because returns need a previous close.
    """
    if close_column not in series.columns:
        raise DataError(f"series has no {close_column!r} column")
    dates = series.dates
    cols = {TARGET: log_returns(series[close_column])}
    financial = [TARGET]
    for name in series.names:
        if name == close_column:
            continue
        cols[f"ret_{name}"] = log_returns(series[name])
        financial.append(f"ret_{name}")

    text: dict[str, list[str]] = {}
    model = None
    coherence: dict[int, float] = {}
    if docs:
        for recipe in text_recipes:
            if recipe.startswith("si_"):
                cat = recipe[3:]
                sv = daily_sentiment_value(docs, cat, dates)
                cols[recipe] = sentiment_index(sv, decay_scale, si_window)[1:]
                text[recipe] = [recipe]
            elif recipe.startswith("class_"):
                cat = recipe[6:]
                cols[recipe] = daily_mean_score(docs, cat, dates, "class_prob", 0.5)[1:]
                text[recipe] = [recipe]
            elif recipe == "topic_scores":
                model, coherence = fit_topics(docs, lda or {}, stopwords)
                tds = topic_day_scores(model, docs, dates)
                names = []
                for k in range(model.K):
                    for fam in tds.scores:
                        name = f"topic{k}_{fam}"
                        cols[name] = tds.scores[fam][k][1:]
                        names.append(name)
                text["topic_scores"] = names
            else:
                raise DataError(f"unknown text recipe {recipe!r}")
    frame = SeriesFrame(dates[1:], cols)
    return FeatureData(frame, financial, text, model, coherence,
                       close=np.asarray(series[close_column])[1:].copy())


def fit_topics(docs: Sequence[DocumentRecord], lda: dict, stopwords=None) -> tuple[TopicModel, dict[int, float]]:
    """Fit LDA on all documents; K comes from ``lda['K']`` or coherence over ``lda['K_range']``."""
    stop = load_stopwords() if stopwords is None else stopwords
    corpus = tokenize(docs, stop, min_len=int(lda.get("min_len", 2)),
                      min_doc_freq=int(lda.get("min_doc_freq", 2)))
    fit = {
        "alpha": lda.get("alpha"),
        "beta": float(lda.get("beta", 0.01)),
        "iterations": int(lda.get("iterations", 1000)),
        "burn_in": int(lda.get("burn_in", 200)),
        "seed": int(lda.get("seed", 0)),
    }
    if lda.get("K_range"):
        K, scores, models = select_topic_count(corpus, lda["K_range"], fit)
        logger.info("topic count %d selected (coherence %s)", K, scores)
        return models[K], scores
    return fit_lda_gibbs(corpus, int(lda.get("K", 4)), **fit), {}
