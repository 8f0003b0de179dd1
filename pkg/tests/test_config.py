import json
import logging

import pytest

from raypath.core.frames import NeighborhoodSpec
from raypath.core.mixture import DEFAULT_MIN_GAP, DEFAULT_SIGMA_FLOOR
from raypath.core.mocomp import DEFAULT_MIN_PAIRS
from raypath.services.config import Config
from raypath.services.config.settings import DEFAULT_FIT_SETTINGS, DEFAULT_MATCH_SETTINGS
from raypath.shared.dicts import DotDict
from raypath.shared.errors import ConfigError


def write_config(tmp_path, data):
    path = tmp_path / "config.json"
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return path


def test_defaults_without_file(tmp_path, monkeypatch):
    monkeypatch.setenv("HOME", str(tmp_path))
    config = Config()
    assert config.log_level == "WARNING"
    assert config.use_colors is True
    assert config.defaults_for("tcdf") == {}


def test_explicit_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        Config(tmp_path / "missing.json")


def test_sections_map_to_flag_destinations(tmp_path):
    path = write_config(tmp_path, {"log_level": "debug", "mocomp": {"radius": 3, "min-pairs": 9}})
    config = Config(path)
    assert config.log_level == "DEBUG"
    assert config.defaults_for("mocomp") == {"radius": 3, "min_pairs": 9}
    assert config.section("mocomp").radius == 3
    assert config.defaults_for("fit-gmm") == {}


def test_unknown_section_is_ignored(tmp_path, caplog):
    path = write_config(tmp_path, {"tcfd": {"ray": "0,0"}})
    with caplog.at_level(logging.WARNING):
        config = Config(path)
    assert "tcfd" in caplog.text
    assert config.defaults_for("tcfd") == {}


@pytest.mark.parametrize(
    "text", ["{not json", "[1, 2]", '{"log_level": "LOUD"}', '{"tcdf": 5}'], ids=["syntax", "list", "level", "section"]
)
def test_malformed_config(tmp_path, text):
    with pytest.raises(ConfigError):
        Config(write_config(tmp_path, text))


def test_defaults_track_library_constants():
    assert DEFAULT_MATCH_SETTINGS.min_pairs == DEFAULT_MIN_PAIRS
    assert DEFAULT_FIT_SETTINGS.min_gap == DEFAULT_MIN_GAP
    assert DEFAULT_FIT_SETTINGS.sigma_floor == DEFAULT_SIGMA_FLOOR
    assert str(NeighborhoodSpec.from_patch(DEFAULT_MATCH_SETTINGS.patch)) == "5x5"


def test_dot_dict():
    section = DotDict({"tcdf": {"radius": 2}})
    assert section.tcdf.radius == 2
    assert section.missing is None
    assert section.section("tcdf") == {"radius": 2}
    assert section.section("nope") == {}
    assert section.tcdf.patch is None
