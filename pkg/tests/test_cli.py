import csv
import json

import numpy as np
import pytest
import yaml

from fxlab.cli import EXIT_ALL_FAILED, EXIT_CONFIG, EXIT_OK, main
from helpers import tiny_overrides


def write_cfg(path, **extra):
    path.write_text(yaml.safe_dump(tiny_overrides(**extra)))
    return str(path)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def cfg_path(tmp_path):
    return write_cfg(tmp_path / "c.yaml")


def test_synth(tmp_path):
    assert main(["synth", "--out", str(tmp_path), "--n-days", "30"]) == EXIT_OK
    assert (tmp_path / "series.csv").exists() and (tmp_path / "documents.jsonl").exists()


@pytest.mark.parametrize("cmd, files", [
    ("ingest", ["features.csv", "ingest.json"]),
    ("features", ["features.csv", "features_normalized.csv", "features.json"]),
    ("lda", ["topic_model.json", "top_words.csv"]),
    ("sentiment", ["sentiment.csv"]),
])
def test_data_commands(cmd, files, cfg_path, tmp_path):
    out = tmp_path / "out"
    assert main([cmd, "--config", cfg_path, "--out", str(out)]) == EXIT_OK
    for f in files:
        assert (out / f).exists()


def test_train(cfg_path, tmp_path):
    out = tmp_path / "out"
    assert main(["train", "--config", cfg_path, "--model", "Linear", "--features", "financial",
                 "--out", str(out)]) == EXIT_OK
    rows = read_csv(out / "predictions.csv")
    assert len(rows) == 40 and list(rows[0]) == ["date", "actual", "predicted"]


def test_compare_table_columns(cfg_path, tmp_path):
    out = tmp_path / "out"
    assert main(["compare", "--config", cfg_path, "--out", str(out)]) == EXIT_OK
    rows = read_csv(out / "compare.csv")
    assert list(rows[0])[:7] == ["method", "model", "MAE", "rank_MAE", "RMSE", "rank_RMSE", "weighted_rank"]
    summary = json.loads((out / "report.json").read_text())
    assert summary["provenance"]["seed"] == 0


def test_harnesses_and_plot_data(cfg_path, tmp_path):
    for cmd, table in (("ablate-text", "ablate_text.csv"), ("ablate-kinds", "ablate_kinds.csv"),
                       ("dm", "dm_rank.csv")):
        out = tmp_path / cmd
        assert main([cmd, "--config", cfg_path, "--out", str(out)]) == EXIT_OK
        assert (out / table).exists()
    assert (tmp_path / "dm" / "dm_statistic.csv").exists()
    assert main(["plot-data", "--report", str(tmp_path / "ablate-text" / "report.json"),
                 "--what", "forecast_vs_actual", "--model", "Linear|combined", "--out", str(tmp_path / "p")]) == EXIT_OK
    rows = read_csv(tmp_path / "p" / "forecast_vs_actual.csv")
    assert len(rows) == 80


def test_byte_identical(cfg_path, tmp_path):
    for run in ("a", "b"):
        assert main(["compare", "--config", cfg_path, "--out", str(tmp_path / run)]) == EXIT_OK
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()
    assert (tmp_path / "a" / "compare.csv").read_bytes() == (tmp_path / "b" / "compare.csv").read_bytes()


def test_seed_override(cfg_path, tmp_path):
    assert main(["ingest", "--config", cfg_path, "--seed", "9", "--out", str(tmp_path)]) == EXIT_OK
    assert json.loads((tmp_path / "ingest.json").read_text())["seed"] == 9


def test_config_error(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text("rnn: {epoch: 3}\n")
    assert main(["compare", "--config", str(p), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "unknown config key" in capsys.readouterr().err


def test_missing_file(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text(yaml.safe_dump({"data": {"series": "nowhere.csv"}}))
    assert main(["ingest", "--config", str(p), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_all_rows_failed(tmp_path):
    dates = np.busday_offset("2020-01-01", np.arange(200), roll="forward")
    rng = np.random.default_rng(0)
    lines = ["date,close,gold"] + [f"{d},1.1,{1000 + x}" for d, x in zip(dates, rng.normal(size=200))]
    (tmp_path / "s.csv").write_text("\n".join(lines) + "\n")
    extra = tiny_overrides(models=["GARCH"], external_models=[])
    extra["data"] = {"series": "s.csv"}
    (tmp_path / "c.yaml").write_text(yaml.safe_dump(extra))
    code = main(["compare", "--config", str(tmp_path / "c.yaml"), "--out", str(tmp_path / "o")])
    assert code == EXIT_ALL_FAILED
    assert not (tmp_path / "o" / "report.json").exists()


def test_unknown_plot_kind(tmp_path):
    with pytest.raises(SystemExit):
        main(["plot-data", "--report", "r.json", "--what", "heatmap", "--out", str(tmp_path)])
