import pytest

from measgeom.config import ConfigError, config_hash, parse_config, parse_config_text


def test_btz_depth_resolved():
    cfg = parse_config_text("experiment: btz\nL: 512\nl: 0.5\nr_h: 0.5\n")
    assert cfg.params["T"] == 128
    assert cfg.params["initial"] == "volume"
    assert cfg.samples == 100 and cfg.seed == 0


def test_odd_size_names_field():
    with pytest.raises(ConfigError, match="even") as info:
        parse_config_text("experiment: btz\nL: 511\nl: 0.5\nr_h: 0.5\n")
    assert info.value.field == "L" and info.value.line == 2


def test_misspelled_key_gets_suggestion():
    with pytest.raises(ConfigError, match="rho_c") as info:
        parse_config_text("experiment: btz\nL: 64\nl: 0.5\nr_h: 0.5\nrho_crit: 0.2\n")
    assert info.value.line == 5


def test_parse_error_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config_text("experiment: btz\nL: [64\nl: 0.5\n")
    assert info.value.line is not None and info.value.line >= 2


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate") as info:
        parse_config_text("experiment: btz\nL: 64\nL: 128\nl: 0.5\nr_h: 0.5\n")
    assert info.value.line == 3


def test_wedge_requires_references():
    text = "experiment: wedge\nL: 128\nl: 0.5\nr_h: 0.5\nseparations: [4]\n"
    with pytest.raises(ConfigError, match="references"):
        parse_config_text(text)
    cfg = parse_config_text(text + "references: true\n")
    assert cfg.params["size"] == 16


def test_rho_grid_forms():
    a = parse_config_text("experiment: calibrate\nL: [8, 16]\n"
                          "rho: {start: 0.1, stop: 0.2, step: 0.05}\n")
    assert a.params["rho"] == pytest.approx([0.1, 0.15, 0.2])
    b = parse_config_text("experiment: calibrate\nL: [8]\nrho: [0.3, 0.1]\n")
    assert b.params["rho"] == [0.3, 0.1]
    with pytest.raises(ConfigError):
        parse_config_text("experiment: calibrate\nL: [8]\nrho: [1.3]\n")


def test_experiment_mismatch_and_quarters():
    with pytest.raises(ConfigError, match="calibrate"):
        parse_config_text("experiment: calibrate\nL: [8]\nrho: [0.2]\n", "btz")
    with pytest.raises(ConfigError, match="divisible"):
        parse_config_text("experiment: calibrate\nL: [10]\nrho: [0.2]\n")
    with pytest.raises(ConfigError, match="three"):
        parse_config_text("experiment: collapse\nL: [8, 16]\nrho: [0.2]\n")


def test_separation_bounds():
    with pytest.raises(ConfigError, match="exceeds"):
        parse_config_text("experiment: mi\nL: 64\nl: 0.5\nr_h: 0.5\nsize: 20\n"
                          "separations: [30]\n")


def test_critical_override():
    cfg = parse_config_text("experiment: calibrate\nL: [8]\nrho: [0.2]\n"
                            "critical: {rho_c: 0.21, nu: 1.2}\n")
    assert (cfg.critical.rho_c, cfg.critical.nu) == (0.21, 1.2)


def test_shipped_configs_parse():
    from pathlib import Path
    for path in sorted(Path(__file__).parents[1].joinpath("configs").glob("*.yaml")):
        assert parse_config(path).experiment in path.stem


def test_config_hash_is_content_hash():
    assert config_hash("a: 1\n") == config_hash("a: 1\n") != config_hash("a: 2\n")


def test_ads_needs_room_for_fit_window():
    with pytest.raises(ConfigError, match="40"):
        parse_config_text("experiment: ads\nL: 32\nl: [2]\n")
    assert parse_config_text("experiment: ads\nL: 48\nl: [2]\n").params["T"] == 192
