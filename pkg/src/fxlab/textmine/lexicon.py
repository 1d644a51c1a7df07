"""Small additive valence lexicon used to score synthetic documents.

Real inputs carry their own per-document scores; this scorer only exists so
that generated corpora can be scored without an external model.
"""

from __future__ import annotations

from typing import Iterable

VALENCE = {
    "strong": 0.6, "rally": 0.8, "gain": 0.6, "gains": 0.6, "bullish": 0.9, "bulls": 0.5,
    "rise": 0.5, "rises": 0.5, "growth": 0.6, "optimism": 0.7, "upbeat": 0.7, "surge": 0.8,
    "recovery": 0.5, "robust": 0.6, "breakout": 0.4, "support": 0.2, "hawkish": 0.3,
    "weak": -0.6, "selloff": -0.8, "loss": -0.6, "losses": -0.6, "bearish": -0.9, "bears": -0.5,
    "fall": -0.5, "falls": -0.5, "recession": -0.8, "fear": -0.7, "gloomy": -0.7, "slump": -0.8,
    "crisis": -0.9, "fragile": -0.6, "breakdown": -0.4, "resistance": -0.2, "dovish": -0.3,
}


def lexicon_scores(tokens: Iterable[str]) -> dict[str, float]:
    """Polarity = mean valence of matched tokens clamped to [-1, 1]; subjectivity = matched share."""
    tokens = list(tokens)
    hits = [VALENCE[t] for t in tokens if t in VALENCE]
    polarity = sum(hits) / len(hits) if hits else 0.0
    subjectivity = len(hits) / len(tokens) if tokens else 0.0
    return {"polarity": max(-1.0, min(1.0, polarity)), "subjectivity": subjectivity}
