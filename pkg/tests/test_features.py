import numpy as np
import pytest

from fxlab.features import KINDS, TARGET, build_features, daily_mean_score, log_returns
from fxlab.ingest import DataError, DocumentRecord, SeriesFrame
from fxlab.sentiment import daily_sentiment_value, sentiment_index
from fxlab.synth import generate

LDA = {"K": 2, "iterations": 20, "burn_in": 5}


@pytest.fixture(scope="module")
def synth():
    return generate(n_days=80, seed=1)


@pytest.fixture(scope="module")
def feats(synth):
    return build_features(synth.series, synth.docs, lda=LDA)


def test_log_returns():
    np.testing.assert_allclose(log_returns([1.0, np.e, 1.0]), [1.0, -1.0], atol=1e-15)
    # non-positive levels fall back to differences
    np.testing.assert_array_equal(log_returns([0.0, 2.0, 1.0]), [2.0, -1.0])


def test_daily_mean_fill():
    dates = np.array(["2020-01-01", "2020-01-02", "2020-01-03"], dtype="datetime64[D]")
    docs = [DocumentRecord("2020-01-02", "news", "x", {"class_prob": 0.9}),
            DocumentRecord("2020-01-02", "news", "y", {"class_prob": 0.7}),
            DocumentRecord("2020-01-02", "analysis", "z", {"class_prob": 0.1})]
    np.testing.assert_allclose(daily_mean_score(docs, "news", dates, "class_prob", 0.5), [0.5, 0.8, 0.5])
    with pytest.raises(DataError):
        daily_mean_score(docs, "news", dates, "polarity", 0.5)


def test_financial_only():
    s = generate(n_days=30, seed=0).series
    f = build_features(s, None)
    assert f.financial == [TARGET, "ret_usd_index", "ret_gold", "ret_us10y"]
    assert f.text == {} and f.topic_model is None
    np.testing.assert_array_equal(f.frame.dates, s.dates[1:])
    np.testing.assert_allclose(f.frame[TARGET], np.diff(np.log(s["close"])), atol=1e-15)
    np.testing.assert_array_equal(f.close, s["close"][1:])


def test_missing_close():
    s = SeriesFrame(np.arange(3).astype("datetime64[D]"), {"x": np.ones(3)})
    with pytest.raises(DataError):
        build_features(s, None)


def test_text_columns(feats, synth):
    assert feats.columns(["si_news"]) == ["si_news"]
    assert len(feats.text["topic_scores"]) == 2 * 3
    si = sentiment_index(daily_sentiment_value(synth.docs, "news", synth.series.dates))
    np.testing.assert_array_equal(feats.frame["si_news"], si[1:])


def test_recipe_expansion(feats):
    assert feats.columns(["topic1"]) == ["topic1_P", "topic1_S", "topic1_C"]
    assert feats.columns(["lagged_indicators", "si_news", "si_news"]) == feats.financial + ["si_news"]
    with pytest.raises(DataError):
        feats.columns(["topic9"])
    with pytest.raises(DataError):
        feats.columns(["wordcount"])


def test_kinds(feats):
    assert feats.kind_columns(["kind1"]) == list(KINDS["kind1"])
    assert feats.kind_columns(["kind1", "kind2", "kind3"]) == feats.text_columns
    with pytest.raises(DataError):
        feats.kind_columns(["kind4"])


def test_no_lookahead(synth):
    # documents dated after day t must not change any text feature up to t
    cut = synth.series.dates[50]
    early = [d for d in synth.docs if d.date <= cut]
    a = build_features(synth.series, synth.docs, text_recipes=("si_news", "class_analysis"))
    b = build_features(synth.series, early, text_recipes=("si_news", "class_analysis"))
    for c in ("si_news", "class_analysis"):
        np.testing.assert_array_equal(a.frame[c][:50], b.frame[c][:50])
