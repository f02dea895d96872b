"""
Unit tests for scenario configuration, catalog, export and plotting
"""

import json

import numpy as np
import pytest

from src.batch.catalog import CATALOG, catalog_json, catalog_text, validate_examples
from src.batch.config import (
    ALL_WITNESSES,
    ClosedFormRate,
    TabulatedRate,
    load_config,
    set_by_path,
    validate_config,
)
from src.batch.export import atomic_write_text, read_columns, write_summary_csv
from src.batch.plotting import render_svg, resolve_column
from src.batch.runner import build_model, select_route
from src.exceptions import ConfigError


@pytest.fixture
def scenario():
    """Minimal valid scenario document"""
    return {
        "name": "dephasing",
        "model": {"family": "dephasing_qubit", "gamma": 1.0},
        "seed": 3,
    }


def test_defaults(scenario):
    """Test grid, witness, sample and route defaults"""
    config = validate_config(scenario)
    assert config.grid.t_max == 5.0
    assert config.grid.points == 501
    assert config.witnesses == ALL_WITNESSES
    assert config.samples.blp == 200
    assert config.samples.hs_norm == 100
    assert config.samples.blp_order == 1
    assert config.route == "auto"
    assert config.tolerances.deriv == 1e-9
    assert config.output.plot_columns == ["f", "vol"]


def test_rate_specs(scenario):
    """Test the three ways of giving a rate"""
    scenario["model"] = {
        "family": "pauli",
        "gammas": [0.5, {"tag": "tanh", "amplitude": -1.0, "frequency": 1.0, "offset": 0.0}, {"csv": "rate.csv"}],
    }
    config = validate_config(scenario)
    gammas = config.model.gammas
    assert gammas[0] == 0.5
    assert isinstance(gammas[1], ClosedFormRate)
    assert isinstance(gammas[2], TabulatedRate)


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(colour="red"),
    lambda d: d["model"].update(extra=1),
    lambda d: d.update(grid={"t_max": 5.0, "points": 501, "dt": 0.01}),
    lambda d: d["model"].update(gamma={"tag": "sinh", "amplitude": 1.0, "frequency": 1.0, "offset": 0.0}),
    lambda d: d["model"].update(gamma={"tag": "sin", "amplitude": 1.0}),
])
def test_unknown_or_incomplete_keys_rejected(scenario, mutate):
    """Test extra keys and missing physics parameters"""
    mutate(scenario)
    with pytest.raises(ConfigError):
        validate_config(scenario)


@pytest.mark.parametrize("model", [
    {"family": "lindblad", "gamma": 1.0},
    {"family": "pauli", "gammas": [1.0, 1.0]},
    {"family": "weyl", "dim": 3, "gammas": [0.1] * 7},
    {"family": "dephasing_weyl", "dim": 4, "gammas": [0.1] * 4},
    {"family": "generalized_pauli", "dim": 4, "gammas": [0.1] * 5},
    {"family": "amplitude_damping", "bath": {"gamma_m": 1.0, "width": 0.0, "omega_c": 0.0, "detuning": 0.0}},
    {"family": "amplitude_damping", "bath": {"gamma_m": -1.0, "width": 1.0, "omega_c": 0.0, "detuning": 0.0}},
])
def test_invalid_models(scenario, model):
    """Test family, rate-count and bath validation"""
    scenario["model"] = model
    with pytest.raises(ConfigError):
        validate_config(scenario)


def test_seed_required_for_sampled_witnesses(scenario):
    """Test sampled witnesses need an explicit seed"""
    del scenario["seed"]
    with pytest.raises(ConfigError, match="seed is required"):
        validate_config(scenario)

    scenario["witnesses"] = ["volume", "cp_divisibility"]
    assert validate_config(scenario).seed is None


def test_duplicate_witnesses(scenario):
    """Test witness list must be unique"""
    scenario["witnesses"] = ["volume", "volume"]
    with pytest.raises(ConfigError, match="duplicates"):
        validate_config(scenario)


def test_grid_validation(scenario):
    """Test grids need at least three points and positive t_max"""
    scenario["grid"] = {"t_max": 5.0, "points": 2}
    with pytest.raises(ConfigError):
        validate_config(scenario)
    scenario["grid"] = {"t_max": 0.0, "points": 10}
    with pytest.raises(ConfigError):
        validate_config(scenario)


def test_load_config_errors(tmp_path):
    """Test missing and malformed files"""
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_set_by_path(scenario):
    """Test dotted paths into dicts and lists, leaving the source untouched"""
    scenario["model"] = {"family": "pauli", "gammas": [1.0, 1.0, 1.0]}
    updated = set_by_path(scenario, "model.gammas.2", -0.5)
    assert updated["model"]["gammas"] == [1.0, 1.0, -0.5]
    assert scenario["model"]["gammas"] == [1.0, 1.0, 1.0]

    assert set_by_path(scenario, "seed", 9)["seed"] == 9

    for path in ["grid", "model.rates", "model.gammas.5", "model.gammas.x", "seed.value"]:
        with pytest.raises(ConfigError, match="not found"):
            set_by_path(scenario, path, 1.0)


def test_catalog_examples_validate():
    """Test every catalog entry ships a valid example"""
    assert len(CATALOG) == 8
    assert len({entry.family for entry in CATALOG}) == 8
    validate_examples()
    for entry in CATALOG:
        config = validate_config(entry.example)
        assert config.model.family == entry.family
        model = build_model(config)
        assert select_route(config, model) in ("commutative", "maps")


def test_catalog_renderings():
    """Test JSON and text listings"""
    parsed = json.loads(catalog_json())
    assert [e["family"] for e in parsed] == [entry.family for entry in CATALOG]
    assert all(e["source"] for e in parsed)
    assert parsed[6]["source"] == "amplitude damping (Lorentzian bath), weak and strong coupling"
    text = catalog_text()
    for entry in CATALOG:
        assert entry.family in text
        assert f"worked example: {entry.source}" in text
    assert text.count("worked example:") == 8


def test_route_selection(scenario):
    """Test auto routing and impossible explicit routes"""
    config = validate_config(scenario)
    assert select_route(config, build_model(config)) == "commutative"

    scenario["route"] = "maps"
    config = validate_config(scenario)
    with pytest.raises(ConfigError, match="map family"):
        select_route(config, build_model(config))


def test_tabulated_rate_relative_path(tmp_path, scenario):
    """Test CSV rates resolve against the scenario directory"""
    (tmp_path / "rate.csv").write_text("t,gamma\n0,1\n10,1\n")
    scenario["model"] = {"family": "dephasing_qubit", "gamma": {"csv": "rate.csv"}}
    model = build_model(validate_config(scenario), tmp_path)
    assert model.generator.rate_values(2.0)[0] == pytest.approx(1.0)

    scenario["model"]["gamma"] = {"csv": "missing.csv"}
    with pytest.raises(ConfigError):
        build_model(validate_config(scenario), tmp_path)


def test_summary_csv_quotes_cells(tmp_path):
    """Test JSON values with commas stay in one cell"""
    path = write_summary_csv(["index", "value", "ok"], [[0, "[1.0, 2.0]", True], [1, None, 0.25]],
                             tmp_path / "summary.csv")
    assert path.read_text() == 'index,value,ok\n0,"[1.0, 2.0]",true\n1,,0.25\n'


def test_atomic_write_leaves_no_temporaries(tmp_path):
    """Test only the target file remains"""
    atomic_write_text(tmp_path / "out" / "a.txt", "hello")
    assert [p.name for p in (tmp_path / "out").iterdir()] == ["a.txt"]


def test_read_columns(tmp_path):
    """Test header names map to columns"""
    path = tmp_path / "traj.csv"
    path.write_text("t,f,vol\n0,1,1\n1,0.5,0.25\n")
    columns = read_columns(path)
    np.testing.assert_allclose(columns["vol"], [1.0, 0.25])
    assert list(columns) == ["t", "f", "vol"]


@pytest.mark.parametrize("content", ["", "t,f\n", "t,f\n0,1,2\n"])
def test_read_columns_errors(tmp_path, content):
    """Test empty tables and column mismatches"""
    path = tmp_path / "traj.csv"
    path.write_text(content)
    with pytest.raises(ConfigError):
        read_columns(path)


def test_read_columns_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        read_columns(tmp_path / "nope.csv")


def test_virtual_modulus_column():
    """Test lambda_abs_<k> is computed from the stored parts"""
    columns = {"t": np.array([0.0, 1.0]), "lambda_re_1": np.array([3.0, 0.0]), "lambda_im_1": np.array([4.0, 1.0])}
    np.testing.assert_allclose(resolve_column(columns, "lambda_abs_1"), [5.0, 1.0])
    with pytest.raises(ConfigError, match="not found"):
        resolve_column(columns, "lambda_abs_2")
    with pytest.raises(ConfigError, match="not found"):
        resolve_column(columns, "vol")


def test_render_svg_deterministic():
    """Test equal inputs give equal SVG text"""
    t = np.linspace(0.0, 1.0, 11)
    columns = {"t": t, "f": np.exp(-t), "vol": np.exp(-2 * t)}
    first = render_svg(columns, ["f", "vol"])
    second = render_svg(columns, ["f", "vol"])
    assert first == second
    assert first.lstrip().startswith("<?xml")
    assert "<svg" in first

    with pytest.raises(ConfigError):
        render_svg({"f": t}, ["f"])
    with pytest.raises(ConfigError):
        render_svg(columns, [])
