import json

import pytest

from mimolink.config import (
    ConfigError,
    DEFAULTS,
    antenna_pattern,
    interferer_inrs_db,
    load_config,
    parse_antenna_configs,
    path_loss_model,
    sim_config,
)


def write(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_config_defaults_when_no_path():
    cfg = load_config(None)
    assert cfg == DEFAULTS
    assert cfg is not DEFAULTS  # caller owns a private copy


def test_load_config_merges_toml(tmp_path):
    path = write(tmp_path, "[sim]\nn_t = 4\nseed = 9\n")
    cfg = load_config(path)
    assert cfg["sim"]["n_t"] == 4
    assert cfg["sim"]["seed"] == 9
    assert cfg["sim"]["n_r"] == DEFAULTS["sim"]["n_r"]


def test_load_config_rejects_unknown_key(tmp_path):
    path = write(tmp_path, "[sim]\nbogus = 1\n")
    with pytest.raises(ConfigError, match="bogus"):
        load_config(path)


def test_load_config_rejects_wrong_type(tmp_path):
    path = write(tmp_path, '[sim]\nn_t = "four"\n')
    with pytest.raises(ConfigError, match="integer"):
        load_config(path)
    path = write(tmp_path, "[sim]\ninr_from_network = 1\n", name="b.toml")
    with pytest.raises(ConfigError, match="boolean"):
        load_config(path)


def test_load_config_float_accepts_int(tmp_path):
    path = write(tmp_path, "[channel]\nk_factor = 2\n")
    cfg = load_config(path)
    assert cfg["channel"]["k_factor"] == 2.0
    assert isinstance(cfg["channel"]["k_factor"], float)


def test_load_config_reports_parse_error(tmp_path):
    path = write(tmp_path, "[sim\nbroken")
    with pytest.raises(ConfigError, match="cannot parse"):
        load_config(path)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.toml")


def test_load_config_unwraps_manifest(tmp_path):
    inner = load_config(None)
    inner["sim"]["seed"] = 777
    manifest = {"command": "simulate", "seed": 777, "outputs": [], "config": inner}
    path = tmp_path / "manifest_simulate.json"
    path.write_text(json.dumps(manifest))
    cfg = load_config(path)
    assert cfg["sim"]["seed"] == 777


def test_parse_antenna_configs():
    cfg = load_config(None)
    assert parse_antenna_configs(cfg) == [(2, 2)]
    cfg["sim"]["antenna_configs"] = ["2x2", "4x4"]
    assert parse_antenna_configs(cfg) == [(2, 2), (4, 4)]
    cfg["sim"]["antenna_configs"] = ["2by2"]
    with pytest.raises(ConfigError, match="2x2"):
        parse_antenna_configs(cfg)


def test_interferer_inrs_prefers_explicit_list():
    cfg = load_config(None)
    cfg["sim"]["interferer_inrs_db"] = [3.0, 1.0]
    cfg["sim"]["n_interferers"] = 5
    assert interferer_inrs_db(cfg) == (3.0, 1.0)
    cfg["sim"]["interferer_inrs_db"] = []
    assert interferer_inrs_db(cfg) == (3.0,) * 5
    cfg["sim"]["n_interferers"] = 0
    assert interferer_inrs_db(cfg) == ()


def test_sim_config_builds_engine_config():
    cfg = load_config(None)
    cfg["sim"]["n_interferers"] = 2
    scfg = sim_config(cfg, n_t=4, n_r=4, stream_key=1)
    assert scfg.n_t == 4
    assert scfg.stream_key == 1
    assert scfg.interferer_inrs_db == (3.0, 3.0)
    assert scfg.interferer_n_t == 1


def test_sim_config_wraps_value_errors():
    cfg = load_config(None)
    cfg["sim"]["receiver"] = "ml"
    with pytest.raises(ConfigError, match="receiver"):
        sim_config(cfg)


def test_antenna_pattern_from_config():
    cfg = load_config(None)
    pat = antenna_pattern(cfg)
    assert pat.g_max == 18.0
    cfg["antenna"]["theta_3db_v_deg"] = -1.0
    with pytest.raises(ConfigError, match="antenna"):
        antenna_pattern(cfg)


def test_path_loss_model_from_config():
    cfg = load_config(None)
    model = path_loss_model(cfg)
    assert model.exponent == 3.5
    cfg["network"]["path_loss_exponent"] = 9.0
    with pytest.raises(ConfigError, match="network"):
        path_loss_model(cfg)
