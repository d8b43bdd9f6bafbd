"""Tests for jcspectra.config module."""

from pathlib import Path
from typing import Any

import pytest

from jcspectra.config import (
    DEFAULT_MU,
    ExperimentConfig,
    ExperimentKind,
    Tolerances,
    format_model,
    geometric_grid,
    load_config,
    parse_config,
    parse_model,
    parse_v,
)
from jcspectra.errors import ConfigError
from jcspectra.sequences import ModelParams

CONFIG_DIR = Path(__file__).parent.parent / "configs"

THEOREM_TOML = """
[model]
gamma = 0.5
a1 = 0.5
v = [-0.25, 0.25]

[grid]
n_min = 128
n_max = 4096
factor = 2

[tolerances]
tol = 1e-9

[experiment]
kind = "asymptotics"
max_slope = -0.15

[output]
path = "out"
"""


def _parse(data: dict[str, Any]) -> ExperimentConfig:
    return parse_config(data, Path("/base"), "stem")


class TestGeometricGrid:
    """Test geometric grids."""

    def test_powers_of_two(self) -> None:
        """Test 2^7 .. 2^12."""
        assert geometric_grid(128, 4096, 2.0) == (128, 256, 512, 1024, 2048, 4096)

    def test_rounding_deduplicates(self) -> None:
        """Test that rounding collisions are removed."""
        grid = geometric_grid(1, 10, 1.2)
        assert list(grid) == sorted(set(grid))
        assert grid[0] == 1

    def test_invalid(self) -> None:
        """Test bad bounds and factors."""
        with pytest.raises(ConfigError):
            _ = geometric_grid(0, 10, 2.0)
        with pytest.raises(ConfigError):
            _ = geometric_grid(10, 5, 2.0)
        with pytest.raises(ConfigError, match="factor"):
            _ = geometric_grid(1, 10, 1.0)


class TestModelForms:
    """Test the key-value model form and v parsing."""

    def test_parse_v_forms(self) -> None:
        """Test string, list and scalar forms of v."""
        assert parse_v("0.1, -0.05,-0.05") == (0.1, -0.05, -0.05)
        assert parse_v([0.25, -0.25]) == (0.25, -0.25)
        assert parse_v(0) == (0.0,)

    def test_parse_v_errors(self) -> None:
        """Test unparseable tables."""
        with pytest.raises(ConfigError):
            _ = parse_v("a,b")
        with pytest.raises(ConfigError):
            _ = parse_v({"x": 1})

    def test_format_then_parse(self) -> None:
        """Test that the key-value form restores the model."""
        m = ModelParams(gamma=0.4, a1=0.7, v_table=(0.1, -0.05, -0.05), a1p=0.2)
        text = format_model(m)
        assert text.startswith("gamma=0.4 a1=0.7 a1p=0.2 v=0.1,")
        assert parse_model(text) == m

    def test_parse_model_errors(self) -> None:
        """Test missing keys and malformed tokens."""
        with pytest.raises(ConfigError, match="missing"):
            _ = parse_model("gamma=0.5")
        with pytest.raises(ConfigError, match="key=value"):
            _ = parse_model("gamma")
        with pytest.raises(ConfigError):
            _ = parse_model("gamma=0.9 a1=0.5")


class TestTolerances:
    """Test tolerance validation."""

    def test_defaults(self) -> None:
        """Test the default tolerances."""
        tol = Tolerances()
        assert tol.tol == 1e-9
        assert tol.slack == 0.15
        assert tol.c0 is None
        assert tol.nu == 2.0

    def test_non_positive(self) -> None:
        """Test that non-positive values are rejected."""
        with pytest.raises(ConfigError, match="slack"):
            _ = Tolerances(slack=0.0)
        with pytest.raises(ConfigError, match="c0"):
            _ = Tolerances(c0=-1.0)

    def test_quad_points(self) -> None:
        """Test the quadrature grid must be a power of two >= 64."""
        with pytest.raises(ConfigError, match="quad_points"):
            _ = Tolerances(quad_points=1000)


class TestParseConfig:
    """Test config parsing."""

    def test_full_config(self, tmp_path: Path) -> None:
        """Test a complete asymptotics config."""
        path = tmp_path / "theorem.toml"
        _ = path.write_text(THEOREM_TOML)
        cfg = load_config(path)
        assert cfg.kind == ExperimentKind.ASYMPTOTICS
        assert cfg.model == ModelParams.jaynes_cummings()
        assert cfg.grid == (128, 256, 512, 1024, 2048, 4096)
        assert cfg.max_slope == -0.15
        assert cfg.output_dir == tmp_path / "out"
        assert cfg.stem == "theorem"
        assert cfg.workers == 1
        assert cfg.mu == DEFAULT_MU
        assert cfg.fit_from is None
        assert cfg.trend is False

    def test_explicit_grid_and_stem(self) -> None:
        """Test grid values and an explicit output stem."""
        cfg = _parse(
            {
                "experiment": {"kind": "commutators"},
                "grid": {"values": [16, 64, 256]},
                "output": {"stem": "comm"},
            }
        )
        assert cfg.grid == (16, 64, 256)
        assert cfg.stem == "comm"
        assert cfg.model == ModelParams.jaynes_cummings()
        assert cfg.output_dir == Path("/base/.")

    def test_string_v(self) -> None:
        """Test the key-value string form of v inside TOML."""
        cfg = _parse(
            {
                "model": {"gamma": 0.4, "a1": 0.7, "v": "0.1,-0.05,-0.05"},
                "experiment": {"kind": "entries"},
                "grid": {"values": [64, 128, 256]},
            }
        )
        assert cfg.model.v_table == (0.1, -0.05, -0.05)

    def test_fit_from_and_trend(self) -> None:
        """Test the fitted n0 under [grid] and the trend flag under [experiment]."""
        cfg = _parse(
            {
                "experiment": {"kind": "asymptotics", "trend": True},
                "grid": {"values": [32, 64, 128, 256], "fit_from": 64},
            }
        )
        assert cfg.fit_from == 64
        assert cfg.trend is True

    def test_grid_free_kinds(self) -> None:
        """Test kinds that do not need a grid."""
        for kind in ("oscillatory", "solver", "validate"):
            assert _parse({"experiment": {"kind": kind}}).grid == ()

    @pytest.mark.parametrize(
        ("data", "match"),
        [
            ({"experiment": {"kind": "nonsense"}}, "kind"),
            ({"experiment": {}}, "kind"),
            ({"experiment": {"kind": "residual"}}, "grid"),
            ({"experiment": {"kind": "residual"}, "grid": {"values": [64, 32, 128]}}, "increasing"),
            ({"experiment": {"kind": "residual"}, "grid": {"values": [0, 1, 2]}}, "positive"),
            ({"experiment": {"kind": "residual"}, "grid": {"values": [1.5]}}, "integers"),
            ({"experiment": {"kind": "residual"}, "grid": {"n_min": 32}}, "n_max"),
            ({"experiment": {"kind": "oscillatory", "workers": 0}}, "workers"),
            ({"experiment": {"kind": "solver", "samples": 0}}, "samples"),
            ({"experiment": {"kind": "oscillatory", "mu": []}}, "mu"),
            ({"experiment": {"kind": "oscillatory", "mu": ["x"]}}, "mu"),
            ({"experiment": {"kind": "oscillatory"}, "model": {"gamma": 0.5}}, "a1"),
            ({"experiment": {"kind": "oscillatory"}, "model": {"gamma": 0.7, "a1": 1}}, "gamma"),
            ({"experiment": {"kind": "oscillatory"}, "model": "jc"}, "table"),
            ({"experiment": {"kind": "oscillatory"}, "tolerances": {"tol": "small"}}, "tol"),
            ({"experiment": {"kind": "oscillatory"}, "tolerances": {"tol": True}}, "tol"),
            (
                {
                    "experiment": {"kind": "residual"},
                    "grid": {"values": [32, 64, 128], "fit_from": 64},
                },
                "fit_from",
            ),
            ({"experiment": {"kind": "oscillatory", "trend": "yes"}}, "trend"),
        ],
    )
    def test_invalid(self, data: dict[str, Any], match: str) -> None:
        """Test that invalid configs raise ConfigError naming the problem."""
        with pytest.raises(ConfigError, match=match):
            _ = _parse(data)

    def test_bad_toml(self, tmp_path: Path) -> None:
        """Test that a TOML syntax error becomes a ConfigError."""
        path = tmp_path / "broken.toml"
        _ = path.write_text("[model\ngamma = ")
        with pytest.raises(ConfigError, match="broken.toml"):
            _ = load_config(path)

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test that a missing file raises OSError."""
        with pytest.raises(OSError):
            _ = load_config(tmp_path / "nope.toml")


class TestCheckedInConfigs:
    """Test every config under configs/ loads."""

    def test_all_configs_load(self) -> None:
        """Test each checked-in config parses and names a known kind."""
        paths = sorted(CONFIG_DIR.glob("*.toml"))
        assert paths
        kinds = {load_config(path).kind for path in paths}
        assert kinds == set(ExperimentKind)

    def test_theorem_config(self) -> None:
        """Test the Jaynes-Cummings rate config matches its criterion."""
        cfg = load_config(CONFIG_DIR / "01_theorem_jc.toml")
        assert cfg.grid == tuple(2**k for k in range(7, 13))
        assert cfg.max_slope == -0.15
        assert cfg.model == ModelParams.jaynes_cummings()
        assert cfg.trend is True

    def test_general_config_has_no_trend(self) -> None:
        """Test the general-model config checks its slope bound only."""
        cfg = load_config(CONFIG_DIR / "02_general.toml")
        assert cfg.max_slope == -0.1
        assert cfg.trend is False

    @pytest.mark.parametrize(
        ("name", "fit_from"),
        [("03_residual.toml", 128), ("04_localization.toml", 256), ("11_symbols.toml", 64)],
    )
    def test_fitted_n0(self, name: str, fit_from: int) -> None:
        """Test the configs that start their rate fits above the first grid point."""
        cfg = load_config(CONFIG_DIR / name)
        assert cfg.fit_from == fit_from
        assert cfg.grid[-1] <= 1600
