"""Synthetic market data and documents with a planted text-to-price link.

Daily log returns are

    r_t = drift + signal_strength * g(z(SI_news_{t-1}, SI_analysis_{t-1})) + u_t,
    u_t = ar * u_{t-1} + e_t,

where SI is the decayed sentiment index computed from the generated
documents exactly as the pipeline computes it, so text features carry real
predictive information while price-only features carry almost none. The
link ``g`` defaults to a dead-zone threshold: sentiment moves prices only
when it is extreme, so a network needs enough capacity and learning rate to
pick the effect up.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ingest import DocumentRecord, SeriesFrame, write_documents_jsonl
from .sentiment import daily_sentiment_value, sentiment_index
from .textmine.lexicon import lexicon_scores

TOPIC_WORDS = [
    # monetary policy and fundamentals
    "ecb inflation fed interest policy economic data rate rates hike cut cpi pmi central bank "
    "lagarde powell minutes meeting outlook tightening easing yields bond eurozone payrolls "
    "employment gdp consumer prices deposit statement guidance decision macro fiscal budget "
    "deficit wages labour retail industrial output survey sentiment index forecast growth",
    # technical analysis and price levels
    "support resistance level levels moving average momentum pivot fibonacci retracement "
    "oscillator rsi macd channel trendline daily chart candle weekly hourly zone target stop "
    "entry overbought oversold divergence signal crossover indicator band bollinger swing "
    "high low close open figure handle threshold barrier floor ceiling",
    # market expectations
    "market continue break term forecast traders expect expectations outlook positioning "
    "risk appetite flows investors demand haven speculative bets hedge funds options volatility "
    "week ahead scenario probability consensus surprise reaction pricing repricing narrative "
    "tone mood confidence uncertainty caution watch focus attention",
    # trend dynamics, bulls versus bears
    "trend range breakout reversal bulls bears buyers sellers pressure strength weakness "
    "upside downside extension consolidation correction pullback impulse wave bounce rejection "
    "squeeze rally selloff slide climb advance decline sideways choppy direction control "
    "dominance battle exhaustion continuation acceleration",
]

POSITIVE = ["strong", "rally", "gain", "bullish", "rise", "growth", "optimism", "upbeat", "surge", "robust"]
NEGATIVE = ["weak", "selloff", "loss", "bearish", "fall", "recession", "fear", "gloomy", "slump", "fragile"]
FILLER = ["the", "is", "at", "and", "of", "to", "in", "on", "for", "with", "a"]

INDICATORS = ("usd_index", "gold", "us10y")

LINKS = {
    "linear": lambda z: z,
    "threshold": lambda z: np.sign(z) * np.maximum(np.abs(z) - 0.75, 0.0),
    "square": lambda z: z * np.abs(z),
    "interaction": lambda z: z * (1.0 + np.tanh(3.0 * z)),
}


@dataclass
class SyntheticData:
    series: SeriesFrame
    docs: list[DocumentRecord]
    latent_sentiment: np.ndarray

    def write(self, directory: str | Path) -> dict[str, Path]:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        paths = {"series": d / "series.csv", "documents": d / "documents.jsonl"}
        self.series.to_csv(paths["series"])
        write_documents_jsonl(self.docs, paths["documents"])
        return paths


def business_days(start: str, n: int) -> np.ndarray:
    first = np.busday_offset(np.datetime64(start, "D"), 0, roll="forward")
    return np.busday_offset(first, np.arange(n), roll="forward").astype("datetime64[D]")


def _zscore(x: np.ndarray) -> np.ndarray:
    sd = x.std()
    return (x - x.mean()) / sd if sd > 0 else np.zeros_like(x)


def _doc_text(rng, topic_vocab: list[list[str]], topic: int, sentiment: float, length: int) -> str:
    words = []
    for _ in range(length):
        u = rng.random()
        if u < 0.12:
            pool = POSITIVE if rng.random() < 0.5 + 0.45 * sentiment else NEGATIVE
            words.append(pool[rng.integers(len(pool))])
        elif u < 0.25:
            words.append(FILLER[rng.integers(len(FILLER))])
        elif u < 0.30:
            other = topic_vocab[rng.integers(len(topic_vocab))]
            words.append(other[rng.integers(len(other))])
        else:
            vocab = topic_vocab[topic]
            # Zipf-like preference for the head of each topic's list
            idx = min(int(rng.pareto(1.2) * 3), len(vocab) - 1)
            words.append(vocab[idx])
    return " ".join(words)


def generate(
    n_days: int = 600,
    seed: int = 0,
    start: str = "2017-02-13",
    news_per_day: float = 3.0,
    analysis_per_day: float = 2.0,
    doc_length: int = 30,
    signal_strength: float = 0.004,
    noise_scale: float = 0.003,
    ar: float = 0.2,
    drift: float = 0.0001,
    sentiment_persistence: float = 0.8,
    decay_scale: float = 7.0,
    link: str = "threshold",
) -> SyntheticData:
    rng = np.random.default_rng(seed)
    dates = business_days(start, n_days)
    topic_vocab = [t.split() for t in TOPIC_WORDS]

    latent = np.zeros(n_days)
    for t in range(1, n_days):
        latent[t] = sentiment_persistence * latent[t - 1] + rng.normal(0, 0.35)
    latent = np.tanh(latent)

    docs = []
    for t in range(n_days):
        for cat, rate in (("news", news_per_day), ("analysis", analysis_per_day)):
            for _ in range(rng.poisson(rate)):
                topic = int(rng.integers(len(topic_vocab)))
                s = float(np.clip(latent[t] + rng.normal(0, 0.25), -1, 1))
                text = _doc_text(rng, topic_vocab, topic, s, max(5, rng.poisson(doc_length)))
                lex = lexicon_scores(text.split())
                class_prob = float(1.0 / (1.0 + np.exp(-(3.0 * latent[t] + rng.normal(0, 0.5)))))
                polarity = float(np.clip(0.5 * s + 0.5 * lex["polarity"], -1, 1))
                subjectivity = float(np.clip(0.3 + 0.4 * lex["subjectivity"] + rng.normal(0, 0.05), 0, 1))
                docs.append(DocumentRecord(
                    date=dates[t], category=cat, text=text,
                    scores={"sentiment": round(s, 6), "class_prob": round(class_prob, 6),
                            "polarity": round(polarity, 6), "subjectivity": round(subjectivity, 6)},
                ))

    si = {}
    for cat in ("news", "analysis"):
        si[cat] = sentiment_index(daily_sentiment_value(docs, cat, dates), decay_scale)
    signal = _zscore(0.6 * _zscore(si["news"]) + 0.4 * _zscore(si["analysis"]))
    signal = _zscore(LINKS[link](signal))

    u = np.zeros(n_days)
    ret = np.zeros(n_days)
    for t in range(1, n_days):
        u[t] = ar * u[t - 1] + rng.normal(0, noise_scale)
        ret[t] = drift + signal_strength * signal[t - 1] + u[t]
    close = 1.10 * np.exp(np.cumsum(ret))

    cols = {"close": close}
    # indicators co-move with the day's own return, so their lags say little about tomorrow
    loadings = {"usd_index": -0.8, "gold": 0.3, "us10y": -0.2}
    base = {"usd_index": 95.0, "gold": 1250.0, "us10y": 2.4}
    for name in INDICATORS:
        r = loadings[name] * ret + rng.normal(0, 0.004, n_days)
        cols[name] = base[name] * np.exp(np.cumsum(r))
    return SyntheticData(SeriesFrame(dates, cols), docs, latent)
