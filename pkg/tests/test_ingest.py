import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fxlab.ingest import (
    DataError,
    DocumentRecord,
    SegmentationSpec,
    SeriesFrame,
    align_and_fill,
    load_documents_jsonl,
    load_series_csv,
    make_direction_labels,
    make_supervised_windows,
    minmax_normalize,
    segment,
    segment_by_counts,
    snap_to_trading_day,
    write_documents_jsonl,
)


def write(tmp_path, text, name="s.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def frame(dates, **cols):
    return SeriesFrame(np.array(dates, dtype="datetime64[D]"), cols)


class TestLoadSeries:
    def test_three_rows(self, tmp_path):
        p = write(tmp_path, "date,close\n2020-01-01,1.1\n2020-01-02,1.2\n2020-01-03,1.3\n")
        f = load_series_csv(p)
        assert len(f) == 3
        assert f.names == ["close"]
        np.testing.assert_array_equal(f["close"], [1.1, 1.2, 1.3])

    def test_shuffled_dates_sorted(self, tmp_path):
        p = write(tmp_path, "date,close\n2020-01-03,3\n2020-01-01,1\n2020-01-02,2\n")
        f = load_series_csv(p)
        assert list(f.dates.astype(str)) == ["2020-01-01", "2020-01-02", "2020-01-03"]
        np.testing.assert_array_equal(f["close"], [1, 2, 3])

    def test_duplicate_date(self, tmp_path):
        p = write(tmp_path, "date,close\n2020-01-01,1\n2020-01-01,2\n")
        with pytest.raises(DataError, match="duplicate date"):
            load_series_csv(p)

    def test_malformed_row_names_line(self, tmp_path):
        p = write(tmp_path, "date,close\n2020-01-01,1\n2020-01-02,abc\n")
        with pytest.raises(DataError, match="line 3"):
            load_series_csv(p)

    def test_wrong_field_count(self, tmp_path):
        p = write(tmp_path, "date,close\n2020-01-01,1,2\n")
        with pytest.raises(DataError, match="line 2"):
            load_series_csv(p)

    def test_empty_cell_is_missing(self, tmp_path):
        p = write(tmp_path, "date,a,b\n2020-01-01,1,\n2020-01-02,2,3\n")
        f = load_series_csv(p)
        assert f.missing.tolist() == [[False, True], [False, False]]

    def test_value_columns_subset(self, tmp_path):
        p = write(tmp_path, "date,a,b\n2020-01-01,1,5\n")
        assert load_series_csv(p, value_columns=["b"]).names == ["b"]


def test_documents_roundtrip(tmp_path):
    docs = [DocumentRecord("2020-01-04", "news", "EUR rallies", {"sentiment": 0.5}),
            DocumentRecord("2020-01-06", "analysis", "support holds")]
    p = tmp_path / "d.jsonl"
    write_documents_jsonl(docs, p)
    back = load_documents_jsonl(p)
    assert back == docs


def test_document_validation():
    with pytest.raises(DataError):
        DocumentRecord("2020-01-01", "blog", "x")
    with pytest.raises(DataError):
        DocumentRecord("2020-01-01", "news", "x", {"class_prob": 1.5})


class TestAlign:
    def test_identical_frames(self):
        a = frame(["2020-01-01", "2020-01-02"], x=[1.0, 2.0])
        b = frame(["2020-01-01", "2020-01-02"], y=[3.0, 4.0])
        out = align_and_fill([a, b], "forward_fill")
        np.testing.assert_array_equal(out.dates, a.dates)
        np.testing.assert_array_equal(out["x"], [1, 2])
        np.testing.assert_array_equal(out["y"], [3, 4])

    def test_single_frame_unchanged(self):
        a = frame(["2020-01-01", "2020-01-02"], x=[1.0, 2.0])
        out = align_and_fill([a], "drop_incomplete")
        np.testing.assert_array_equal(out["x"], a["x"])

    def test_forward_fill_missing_cell(self):
        a = frame(["2020-01-03", "2020-01-04", "2020-01-06"], x=[1.0, 2.0, 3.0])
        b = frame(["2020-01-03", "2020-01-06"], y=[10.0, 30.0])
        out = align_and_fill([a, b], "forward_fill")
        assert out["y"][1] == 10.0
        assert not out.missing.any()

    def test_leading_incomplete_rows_dropped(self):
        a = frame(["2020-01-01", "2020-01-02"], x=[1.0, 2.0])
        b = frame(["2020-01-02"], y=[5.0])
        out = align_and_fill([a, b], "forward_fill")
        assert len(out) == 1

    def test_disjoint_drop_incomplete(self):
        a = frame(["2020-01-01"], x=[1.0])
        b = frame(["2020-02-01"], y=[1.0])
        with pytest.raises(DataError):
            align_and_fill([a, b], "drop_incomplete")

    def test_unknown_policy(self):
        with pytest.raises(DataError):
            align_and_fill([frame(["2020-01-01"], x=[1.0])], "interpolate")

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.booleans(), min_size=3, max_size=30))
    def test_no_missing_after_fill(self, mask):
        n = len(mask)
        dates = np.arange(n).astype("datetime64[D]")
        a = frame(dates, x=np.arange(n, dtype=float))
        keep = np.array(mask)
        keep[0] = True
        b = frame(dates[keep], y=np.arange(keep.sum(), dtype=float))
        out = align_and_fill([a, b], "forward_fill")
        assert not out.missing.any()
        assert len(out) == n


class TestNormalize:
    def test_fit_on_self(self):
        f = frame(["2020-01-01", "2020-01-02"], x=[1.0, 3.0])
        out, _ = minmax_normalize(f, [0, 1])
        np.testing.assert_array_equal(out["x"], [0, 1])

    def test_fit_on_prefix(self):
        f = frame(["2020-01-01", "2020-01-02", "2020-01-03"], x=[1.0, 2.0, 3.0])
        out, _ = minmax_normalize(f, [0, 1])
        np.testing.assert_array_equal(out["x"], [0, 1, 2])

    def test_constant_column(self):
        f = frame(["2020-01-01", "2020-01-02"], x=[5.0, 5.0])
        out, _ = minmax_normalize(f, [0, 1])
        np.testing.assert_array_equal(out["x"], [0.5, 0.5])

    @settings(max_examples=100, deadline=None)
    @given(arrays(float, st.integers(2, 40), elements=st.floats(-1e6, 1e6)))
    def test_roundtrip(self, x):
        if np.ptp(x) < 1e-6:
            return
        f = frame(np.arange(x.size).astype("datetime64[D]"), x=x)
        out, sc = minmax_normalize(f, np.arange(x.size))
        assert out["x"].min() >= 0 and out["x"].max() <= 1
        np.testing.assert_allclose(sc.inverse(out)["x"], x, rtol=0, atol=1e-12 * max(1.0, np.abs(x).max()))


class TestLabels:
    def test_equality_counts_as_up(self):
        np.testing.assert_array_equal(make_direction_labels([1.0, 1.1, 1.05, 1.05]), [1, 0, 1])

    def test_monotone(self):
        assert make_direction_labels(np.arange(10.0)).tolist() == [1] * 9
        assert make_direction_labels(-np.arange(10.0)).tolist() == [0] * 9

    def test_too_short(self):
        with pytest.raises(DataError):
            make_direction_labels([1.0])

    @given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=50))
    def test_length_and_values(self, xs):
        lab = make_direction_labels(xs)
        assert lab.size == len(xs) - 1
        assert set(lab.tolist()) <= {0, 1}


class TestWindows:
    def frame5(self, n=5):
        return frame(np.arange(n).astype("datetime64[D]"), y=np.arange(n) * 10.0, z=np.arange(n) * 1.0)

    def test_count(self):
        assert len(make_supervised_windows(self.frame5(), "y", 2, 1)) == 3

    def test_one_window(self):
        assert len(make_supervised_windows(self.frame5(), "y", 4)) == 1

    def test_too_few_rows(self):
        with pytest.raises(DataError):
            make_supervised_windows(self.frame5(), "y", 5)

    @given(st.integers(8, 30), st.integers(1, 5), st.integers(1, 3))
    def test_alignment(self, n, ts, h):
        f = self.frame5(n)
        s = make_supervised_windows(f, "y", ts, h)
        assert len(s) == n - ts - h + 1
        for k in range(len(s)):
            np.testing.assert_array_equal(s.windows[k, :, 1], f["z"][k:k + ts])
            assert s.targets[k] == f["y"][k + ts + h - 1]


class TestSegment:
    def test_sizes(self):
        f = frame(np.arange(100).astype("datetime64[D]"), x=np.zeros(100))
        d = f.dates
        spec = SegmentationSpec(d[0], d[69], 15, d[85], d[99])
        seg = segment(f, spec)
        assert tuple(v.size for v in seg.values()) == (70, 15, 15)
        assert seg["context"][-1] + 1 == seg["forecast"][0]

    def test_context_carved_from_train(self):
        f = frame(np.arange(100).astype("datetime64[D]"), x=np.zeros(100))
        d = f.dates
        seg = segment(f, SegmentationSpec(d[0], d[84], 15, d[85], d[99]))
        assert tuple(v.size for v in seg.values()) == (70, 15, 15)

    def test_train_end_not_before_forecast(self):
        with pytest.raises(DataError):
            SegmentationSpec("2020-01-01", "2020-02-01", 0, "2020-02-01", "2020-03-01")

    def test_long_history_shape(self):
        n = 1520 + 300 + 155
        f = frame(np.arange(n).astype("datetime64[D]"), x=np.zeros(n))
        d = f.dates
        seg = segment(f, SegmentationSpec(d[0], d[1519], 300, d[1820], d[-1]))
        assert tuple(v.size for v in seg.values()) == (1520, 300, 155)

    def test_weekend_snaps_forward(self):
        dates = np.array(["2020-01-03", "2020-01-06"], dtype="datetime64[D]")
        assert snap_to_trading_day(dates, "2020-01-04") == 1

    def test_by_counts(self):
        seg = segment_by_counts(50, 30, 10, 5)
        assert seg["train"][0] == 5 and seg["forecast"][-1] == 49
        with pytest.raises(DataError):
            segment_by_counts(10, 8, 2, 2)
