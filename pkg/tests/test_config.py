import json

import pytest

from airsgd.config import (
    ConfigError,
    apply_overrides,
    config_to_dict,
    load_config,
    parse_config,
    resolved_json,
    template,
)


def test_templates_validate():
    for kind in ("minimal", "paper_scale"):
        config = parse_config(template(kind))
        assert config.T >= 1


def test_paper_scale_template_values():
    doc = template("paper_scale")
    assert doc["T"] == 800
    assert doc["M"] == 20
    assert doc["d"] == 7850
    assert doc["s"] == 3925
    assert doc["power"] == {"kind": "linear_ramp", "alpha0": 1.0, "slope": 0.001}


def test_unknown_key_rejected():
    doc = template("minimal")
    doc["antennas"] = 4
    with pytest.raises(ConfigError, match="antennas"):
        parse_config(doc)


def test_unknown_nested_key_rejected():
    doc = template("minimal")
    doc["optimizer"]["momentum"] = 0.9
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_missing_required_key_rejected():
    doc = template("minimal")
    del doc["K"]
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_s_larger_than_d_rejected():
    doc = template("minimal")
    doc["s"] = doc["d"] + 1
    with pytest.raises(ConfigError, match="exceeds"):
        parse_config(doc)


def test_dimension_must_match_dataset():
    doc = template("minimal")
    doc["d"] = doc["d"] + 2
    doc["s"] = 1
    with pytest.raises(ConfigError, match="classes"):
        parse_config(doc)


def test_batch_size_bounded_by_per_device():
    doc = template("minimal")
    doc["batch_size"] = doc["partition"]["per_device"] + 1
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_only_iid_subchannels_accepted():
    doc = template("minimal")
    doc["subchannel_correlation"] = "exponential"
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_overrides_nested_and_typed():
    doc = template("minimal")
    out = apply_overrides(doc, ["K=5", "optimizer.learning_rate=0.5", "mode=error_free"])
    assert out["K"] == 5
    assert out["optimizer"]["learning_rate"] == 0.5
    assert out["mode"] == "error_free"
    # the original document is untouched
    assert doc["K"] == template("minimal")["K"]
    assert doc["optimizer"]["learning_rate"] == template("minimal")["optimizer"]["learning_rate"]


def test_override_unknown_key_rejected():
    with pytest.raises(ConfigError, match="does not match"):
        apply_overrides(template("minimal"), ["Q=3"])
    with pytest.raises(ConfigError, match="KEY=VALUE"):
        apply_overrides(template("minimal"), ["K"])


def test_load_config_missing_file(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(ConfigError, match="nope.json"):
        load_config(missing)


def test_load_config_applies_overrides(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(template("minimal")))
    config = load_config(path, ["K=3", "T=5"])
    assert config.K == 3
    assert config.T == 5


def test_roundtrip_through_dict():
    config = parse_config(template("minimal"))
    doc = config_to_dict(config)
    again = parse_config(doc)
    assert again == config


def test_resolved_json_is_stable_and_sorted():
    config = parse_config(template("minimal"))
    a = resolved_json(config)
    b = resolved_json(config)
    assert a == b
    keys = list(json.loads(a).keys())
    assert keys == sorted(keys)


def test_n_blocks_property():
    doc = template("minimal")
    doc["s"] = 20  # d = 132 -> ceil(132/40) = 4 blocks
    config = parse_config(doc)
    assert config.n_blocks == 4
