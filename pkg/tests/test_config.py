import json

import pytest

from lexevolve.config import ConfigError, config_from_dict, load_config, parse_override


def test_defaults():
    cfg = load_config(None)
    assert (cfg.scorer, cfg.gain, cfg.seed, cfg.evolve.steps) == ("bm25", "exponential", 0, 20)
    assert cfg.tag == "bm25"


def test_overrides(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"datasets": [{"path": "a"}, "b"], "scorer": "bm25"}))
    cfg = load_config(p, ["scorer=ql-dir", "params.mu=1500", "datasets.1=c", "evolve.mutator.kind=marker"])
    assert cfg.scorer == "ql-dir" and cfg.params == {"mu": 1500}
    assert [d.path for d in cfg.datasets] == ["a", "c"]
    assert cfg.evolve.mutator == {"kind": "marker"}


def test_parse_override_string_fallback():
    assert parse_override("run_tag=hello world") == (["run_tag"], "hello world")
    assert parse_override("a.b=[1,2]") == (["a", "b"], [1, 2])
    with pytest.raises(ConfigError):
        parse_override("novalue")


@pytest.mark.parametrize(
    "data",
    [{"bogus": 1}, {"datasets": "x"}, {"evolve": {"steps": 1, "what": 2}}, {"datasets": [{"path": "a", "zz": 1}]}],
)
def test_unknown_keys(data):
    with pytest.raises(ConfigError):
        config_from_dict(data)


def test_validate(tmp_path):
    with pytest.raises(ConfigError, match="unknown scorer"):
        config_from_dict({"scorer": "tfidf"}).validate(require_datasets=False)
    with pytest.raises(ConfigError, match="missing"):
        config_from_dict({"datasets": [str(tmp_path)]}).validate()
    with pytest.raises(ConfigError):
        config_from_dict({"channels": ["nope"]}).validate(require_datasets=False)


def test_bad_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError):
        load_config(bad)
