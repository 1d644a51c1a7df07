import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fxlab.ingest import DataError, DocumentRecord
from fxlab.sentiment import (
    daily_sentiment_value,
    sentiment_frame,
    sentiment_index,
    sentiment_index_direct,
)

DATES = np.array(["2020-01-06", "2020-01-07", "2020-01-08"], dtype="datetime64[D]")
finite = st.floats(-1, 1, allow_nan=False)


def doc(date, s, cat="news"):
    return DocumentRecord(date, cat, "x", {"sentiment": s})


class TestDaily:
    def test_single(self):
        assert daily_sentiment_value([doc("2020-01-07", 0.6)], "news", DATES)[1] == 0.6

    def test_symmetric_pair(self):
        sv = daily_sentiment_value([doc("2020-01-06", 0.2), doc("2020-01-06", -0.2)], "news", DATES)
        assert sv[0] == 0.0

    def test_empty_day_between(self):
        sv = daily_sentiment_value([doc("2020-01-06", 0.5), doc("2020-01-08", 0.3)], "news", DATES)
        np.testing.assert_array_equal(sv, [0.5, 0.0, 0.3])

    def test_weekend_rolls_forward(self):
        sv = daily_sentiment_value([doc("2020-01-04", 0.4)], "news", DATES)
        assert sv[0] == 0.4

    def test_category_filter(self):
        docs = [doc("2020-01-06", 0.5, "analysis"), doc("2020-01-07", -0.5)]
        np.testing.assert_array_equal(daily_sentiment_value(docs, "analysis", DATES), [0.5, 0, 0])

    def test_no_scored_documents(self):
        with pytest.raises(DataError):
            daily_sentiment_value([DocumentRecord("2020-01-06", "news", "x")], "news", DATES)


class TestIndex:
    def test_no_history(self):
        np.testing.assert_array_equal(sentiment_index([1.0]), [1.0])

    def test_one_day_decay(self):
        assert sentiment_index([1.0, 0.0])[1] == pytest.approx(0.86688, abs=5e-6)
        assert sentiment_index([1.0, 0.0])[1] == pytest.approx(math.exp(-1 / 7), abs=1e-15)

    def test_decay_plus_today(self):
        assert sentiment_index([1.0, 0.5])[1] == pytest.approx(1.36688, abs=5e-6)

    def test_impulse(self):
        sv = np.zeros(60)
        sv[0] = 1.0
        si = sentiment_index(sv)
        m = np.arange(60)
        np.testing.assert_allclose(si, np.exp(-m / 7), rtol=0, atol=1e-12)

    def test_bad_scale(self):
        with pytest.raises(ValueError):
            sentiment_index([1.0], decay_scale=0)

    @settings(max_examples=100, deadline=None)
    @given(arrays(float, st.integers(1, 60), elements=finite), st.floats(0.5, 30))
    def test_recurrence_matches_sum(self, sv, scale):
        np.testing.assert_allclose(sentiment_index(sv, scale), sentiment_index_direct(sv, scale),
                                   rtol=0, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(arrays(float, st.integers(1, 40), elements=finite), st.floats(-5, 5))
    def test_linear(self, sv, a):
        np.testing.assert_allclose(sentiment_index(a * sv), a * sentiment_index(sv), rtol=0, atol=1e-12)

    def test_zero_in_zero_out(self):
        np.testing.assert_array_equal(sentiment_index(np.zeros(10)), 0.0)

    def test_window_truncates(self):
        sv = np.zeros(20)
        sv[0] = 1.0
        si = sentiment_index(sv, window=7)
        assert si[7] == pytest.approx(math.exp(-1))
        assert si[8] == 0.0


def test_frame_columns():
    docs = [doc("2020-01-06", 0.5), doc("2020-01-07", 0.1, "analysis")]
    f = sentiment_frame(docs, DATES)
    assert f.names == ["sv_news", "si_news", "sv_analysis", "si_analysis"]
