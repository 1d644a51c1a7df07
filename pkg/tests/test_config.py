import pytest
import yaml

from fxlab.config import DEFAULT_CONFIG, ConfigError, config_hash, deep_merge, load_config, resolve_config


def test_defaults():
    cfg = resolve_config()
    assert cfg == DEFAULT_CONFIG and cfg is not DEFAULT_CONFIG


def test_deep_merge_keeps_siblings():
    out = deep_merge({"a": {"b": 1, "c": 2}}, {"a": {"b": 5}})
    assert out == {"a": {"b": 5, "c": 2}}


def test_override_nested():
    cfg = resolve_config({"rnn": {"epochs": 3}})
    assert cfg["rnn"]["epochs"] == 3 and cfg["rnn"]["patience"] == 20


def test_unknown_key():
    with pytest.raises(ConfigError, match="rnn.epoch"):
        resolve_config({"rnn": {"epoch": 3}})


def test_missing_data_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        resolve_config({"data": {"series": str(tmp_path / "none.csv")}})


def test_bad_mode():
    with pytest.raises(ConfigError):
        resolve_config({"segmentation": {"mode": "ratio"}})


def test_yaml_relative_paths(tmp_path):
    (tmp_path / "s.csv").write_text("date,close\n2020-01-01,1\n")
    p = tmp_path / "c.yaml"
    p.write_text(yaml.safe_dump({"data": {"series": "s.csv"}, "seed": 4}))
    cfg = load_config(p)
    assert cfg["data"]["series"] == [str(tmp_path / "s.csv")]
    assert cfg["seed"] == 4


def test_unreadable(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("seed: [1,\n")
    with pytest.raises(ConfigError):
        load_config(p)
    p.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")


def test_hash():
    assert config_hash(resolve_config()) == config_hash(resolve_config())
    assert config_hash(resolve_config()) != config_hash(resolve_config({"seed": 1}))


def test_shipped_configs():
    from pathlib import Path
    root = Path(__file__).resolve().parents[1] / "configs"
    cfg = load_config(root / "synthetic_fast.yaml")
    assert cfg["search"]["swarm_size"] == 6
