import yaml

from utils.config_loader import DEFAULT_CONFIG, load_config, settings, tolerance


def test_missing_file_falls_back_to_defaults(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("SASAKI_BUDGET", raising=False)
    config = load_config(str(tmp_path / "absent.yaml"))
    assert config == DEFAULT_CONFIG
    assert "not found" in capsys.readouterr().out


def test_partial_file_is_merged(tmp_path, monkeypatch):
    monkeypatch.delenv("SASAKI_BUDGET", raising=False)
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump({"tolerances": {"exact": 1e-7}, "sweep": {"seed": 99}}))
    config = load_config(str(path))
    assert config["tolerances"]["exact"] == 1e-7
    assert config["tolerances"]["chained"] == DEFAULT_CONFIG["tolerances"]["chained"]
    assert config["sweep"]["seed"] == 99
    assert config["sweep"]["batch_size"] == DEFAULT_CONFIG["sweep"]["batch_size"]
    assert DEFAULT_CONFIG["tolerances"]["exact"] == 1e-9


def test_budget_override(tmp_path, monkeypatch):
    monkeypatch.setenv("SASAKI_BUDGET", "2.5e6")
    assert load_config(str(tmp_path / "absent.yaml"))["equivariant"]["budget"] == 2_500_000
    monkeypatch.setenv("SASAKI_BUDGET", "lots")
    assert load_config(str(tmp_path / "absent.yaml"))["equivariant"]["budget"] == DEFAULT_CONFIG["equivariant"]["budget"]


def test_settings_follow_config_path(tmp_path, monkeypatch):
    path = tmp_path / "tight.yaml"
    path.write_text(yaml.safe_dump({"tolerances": {"chained": 1e-11}}))
    monkeypatch.setenv("SASAKI_CONFIG", str(path))
    assert tolerance("chained") == 1e-11
    assert settings()["equivariant"]["refuse_large_lambda3"] is True
