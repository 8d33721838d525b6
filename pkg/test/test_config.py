from pathlib import Path

import pytest
from tripx.extract.config import (
    RunConfig,
    dumpconfig,
    fromdict,
    loadconfig,
    override,
    todict,
)
from tripx.extract.errors import ConfigError

CONFIGS = Path(__file__).parent.parent / "configs"


def test_loadconfig_desk():
    config = loadconfig(CONFIGS / "desk.yaml")
    assert config.encoder.dim == 32
    assert config.encoder.mixer == "conv"
    assert config.training.encoderlr == 3e-3
    assert config.training.tagging == "dual"
    assert config.synth.counts == {"Normal": 100, "SEO": 60, "EPO": 50, "SOO": 40}
    assert config.synth.lengthrange == (5, 14)
    assert config.inference.lambda1 == 0.5


def test_loadconfig_large():
    config = loadconfig(CONFIGS / "large.yaml")
    assert config.encoder.mixer == "attention"
    assert config.encoder.dim % config.encoder.heads == 0


def test_loadconfig_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("", encoding="utf-8")
    assert loadconfig(path) == RunConfig()


def test_loadconfig_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="does not exist"):
        loadconfig(tmp_path / "nope.yaml")


def test_loadconfig_invalid_yaml(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("encoder: [dim: 3\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        loadconfig(path)


def test_fromdict_reads_exponent_strings():
    config = fromdict({"training": {"decoderlr": "1e-3", "epochs": 3}})
    assert config.training.decoderlr == 1e-3
    assert config.training.epochs == 3


@pytest.mark.parametrize(
    "raw, message",
    [
        ({"decoding": {}}, "unknown section"),
        ({"encoder": {"depth": 2}}, "unknown key encoder.depth"),
        ({"encoder": 3}, "must be a mapping"),
        ({"encoder": {"dim": "big"}}, "must be an integer"),
        ({"encoder": {"positions": 1}}, "must be a boolean"),
        ({"training": {"decoderlr": "fast"}}, "must be a number"),
        ({"training": {"tagging": "triple"}}, "must be one of"),
        ({"inference": {"lambda1": 1.5}}, "inference.lambda1"),
        ({"encoder": {"window": 4}}, "odd"),
        ({"encoder": {"mixer": "attention", "dim": 10, "heads": 4}}, "divisible"),
        ({"synth": {"counts": {"Weird": 2}}}, "unknown pattern"),
        ({"synth": {"counts": {"SEO": -1}}}, "non-negative"),
        ({"synth": {"lengthrange": [4]}}, "list of 2"),
        ({"synth": {"clauses": [0, 2]}}, "synth.clauses"),
        ({"synth": {"lengthrange": [5, 120]}}, "encoder.maxlen"),
        ({"encoder": {"maxlen": 10}}, "encoder.maxlen"),
        ({"data": {"soo": "inside"}}, "must be one of"),
    ],
)
def test_fromdict_rejects_bad_values(raw, message):
    with pytest.raises(ConfigError, match=message):
        fromdict(raw)


def test_override_ignores_missing_values():
    config = RunConfig()
    assert override(config, "training", epochs=None) is config
    changed = override(config, "training", epochs=4, tagging="single")
    assert changed.training.epochs == 4
    assert changed.training.tagging == "single"
    assert config.training.epochs == 100
    with pytest.raises(ConfigError):
        override(config, "inference", lambda2=0.0)
    with pytest.raises(ConfigError, match="encoder.maxlen"):
        override(config, "encoder", maxlen=12)
    assert override(config, "synth", lengthrange=[5, 12], clauses=[1, 2]).synth.clauses == (1, 2)


def test_dumpconfig_roundtrip(tmp_path):
    config = override(loadconfig(CONFIGS / "desk.yaml"), "inference", pairing="nearest")
    path = tmp_path / "config.yaml"
    dumpconfig(config, path)
    assert loadconfig(path) == config
    assert todict(config)["synth"]["lengthrange"] == [5, 14]
