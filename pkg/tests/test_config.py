import pytest
import yaml

from lotstab.config import PRESETS, build_source, load_config, parse_config, preset
from lotstab.errors import ConfigError


def test_defaults():
    cfg = parse_config({"sweep": [0.1, 0.2]})
    assert cfg.resolution == 512 and cfg.targets["family"] == "shift"
    assert cfg.sweep_values == [0.1, 0.2] and cfg.seed == 0
    assert build_source(cfg.source).dim == 1


def test_range_sweep_and_overrides():
    cfg = parse_config({"sweep": {"values": {"start": 0.0, "stop": 1.0, "num": 5}},
                        "source": {"domain": {"kind": "box", "params": [0, 0, 1, 1]}}})
    assert cfg.sweep_values == [0.0, 0.25, 0.5, 0.75, 1.0] and cfg.resolution == 256
    c2 = cfg.with_overrides(seed=9, resolution=128, output_dir="x")
    assert (c2.seed, c2.resolution, c2.output_dir) == (9, 128, "x")


@pytest.mark.parametrize("raw", [
    {"sweep": []},
    {},
    {"sweep": [0.1], "bogus": 1},
    {"sweep": [0.1], "source": {"resolution": 32}},
    {"sweep": [0.1], "source": {"resolution": 5000}},
    {"sweep": [0.1], "targets": {"family": "nope"}},
    {"sweep": [0.1], "targets": {"family": "files", "files": ["missing.csv"]}},
    {"sweep": [0.1], "checks": {"fits": [{"x": "eps", "y": "nope"}]}},
    {"sweep": ["a"]},
    {"sweep": [0.1], "seed": "x"},
    {"sweep": [0.1], "source": {"domain": {"kind": "triangle"}}},
])
def test_invalid(raw):
    with pytest.raises(ConfigError):
        parse_config(raw)


def test_load_yaml(tmp_path):
    (tmp_path / "t.csv").write_text("x1,weight\n0.2,0.5\n0.7,0.5\n")
    p = tmp_path / "c.yaml"
    p.write_text(yaml.safe_dump({"name": "demo", "targets": {"family": "files", "files": ["t.csv"]}}))
    cfg = load_config(p)
    assert cfg.name == "demo" and cfg.targets["files"][0] == str(tmp_path / "t.csv")
    bad = tmp_path / "bad.yaml"
    bad.write_text("a: [1,\n")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")


def test_presets_parse():
    for name in PRESETS:
        assert preset(name).name == name
    with pytest.raises(ConfigError):
        preset("nope")
