"""
config.py - Experiment configuration files

Configs are TOML files with the sections [model], [grid], [tolerances],
[experiment] and [output]. Every key is flat; the only list values are the
grid, the modulation table v and the mu sweep.

See configs/ for one file per checked property.
"""

import math
import tomllib
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any, cast

from jcspectra.errors import ConfigError
from jcspectra.sequences import ModelParams


class ExperimentKind(StrEnum):
    ASYMPTOTICS = "asymptotics"
    RESIDUAL = "residual"
    TRANSFER = "transfer"
    LOCALIZATION = "localization"
    CONJUGATION = "conjugation"
    TRACE = "trace"
    OSCILLATORY = "oscillatory"
    COMPOSITION = "composition"
    SOLVER = "solver"
    COMMUTATORS = "commutators"
    SYMBOLS = "symbols"
    ENTRIES = "entries"
    VALIDATE = "validate"


# Kinds that do not sweep over n.
GRID_FREE_KINDS = frozenset(
    {ExperimentKind.OSCILLATORY, ExperimentKind.SOLVER, ExperimentKind.VALIDATE}
)

DEFAULT_MU = (0.5, 1.0, 2.0, 5.0, 10.0, 50.0)


@dataclass(frozen=True)
class Tolerances:
    tol: float = 1e-9
    slack: float = 0.15
    c0: float | None = None
    nu: float = 2.0
    c_localization: float = 2.0
    t0: float = 1.0
    quad_points: int = 1024
    identity_tol: float | None = None

    def __post_init__(self) -> None:
        for name in ("tol", "slack", "nu", "c_localization", "t0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ConfigError(f"[tolerances] {name} must be positive, got {value}")
        for name in ("c0", "identity_tol"):
            value = getattr(self, name)
            if value is not None and not value > 0.0:
                raise ConfigError(f"[tolerances] {name} must be positive, got {value}")
        if self.quad_points < 64 or self.quad_points & (self.quad_points - 1):
            raise ConfigError(
                f"[tolerances] quad_points must be a power of two >= 64, got {self.quad_points}"
            )


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelParams
    kind: ExperimentKind
    grid: tuple[int, ...] = ()
    tolerances: Tolerances = field(default_factory=Tolerances)
    max_slope: float | None = None
    target_slope: float | None = None
    mu: tuple[float, ...] = DEFAULT_MU
    samples: int = 200
    seed: int = 0
    workers: int = 1
    c1: float | None = None
    fit_from: int | None = None
    trend: bool = False
    output_dir: Path = Path(".")
    stem: str = "experiment"

    def __post_init__(self) -> None:
        if not self.grid and self.kind not in GRID_FREE_KINDS:
            raise ConfigError(f"[grid] must not be empty for experiment kind '{self.kind}'")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:], strict=False)):
            raise ConfigError(f"[grid] must be strictly increasing, got {list(self.grid)}")
        if self.grid and self.grid[0] < 1:
            raise ConfigError(f"[grid] values must be positive, got {self.grid[0]}")
        if self.workers < 1:
            raise ConfigError(f"[experiment] workers must be >= 1, got {self.workers}")
        if self.samples < 1:
            raise ConfigError(f"[experiment] samples must be >= 1, got {self.samples}")
        if self.fit_from is not None:
            fitted = [n for n in self.grid if n >= self.fit_from]
            if len(fitted) < 3:
                raise ConfigError(
                    f"[grid] fit_from={self.fit_from} leaves {len(fitted)} grid point(s), need 3"
                )


def geometric_grid(n_min: int, n_max: int, factor: float) -> tuple[int, ...]:
    """n_min, n_min * factor, ... rounded to integers, de-duplicated, up to n_max."""
    if n_min < 1 or n_max < n_min:
        raise ConfigError(f"[grid] need 1 <= n_min <= n_max, got {n_min}, {n_max}")
    if not factor > 1.0:
        raise ConfigError(f"[grid] factor must exceed 1, got {factor}")
    values: list[int] = []
    step = 0
    while True:
        n = round(n_min * factor**step)
        if n > n_max:
            break
        if not values or n > values[-1]:
            values.append(n)
        step += 1
    return tuple(values)


def parse_v(value: Any) -> tuple[float, ...]:
    """The modulation table, either a TOML array or the string form "c1,c2,...,cN"."""
    if isinstance(value, str):
        parts = [p.strip() for p in value.split(",")]
        try:
            return tuple(float(p) for p in parts if p)
        except ValueError as e:
            raise ConfigError(f"[model] v: cannot parse '{value}'") from e
    if isinstance(value, list):
        try:
            return tuple(float(x) for x in cast(list[Any], value))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"[model] v: entries must be numbers, got {value}") from e
    if isinstance(value, int | float):
        return (float(value),)
    raise ConfigError(f"[model] v: unsupported value {value!r}")


def format_model(m: ModelParams) -> str:
    """Key-value form: gamma=..., a1=..., a1p=..., v=c1,c2,..."""
    table = ",".join(repr(x) for x in m.v_table)
    return f"gamma={m.gamma!r} a1={m.a1!r} a1p={m.a1p!r} v={table}"


def parse_model(text: str) -> ModelParams:
    fields: dict[str, str] = {}
    for token in text.split():
        key, sep, value = token.partition("=")
        if not sep:
            raise ConfigError(f"model: expected key=value, got '{token}'")
        fields[key] = value
    try:
        return ModelParams(
            gamma=float(fields["gamma"]),
            a1=float(fields["a1"]),
            v_table=parse_v(fields.get("v", "0")),
            a1p=float(fields.get("a1p", "0")),
        )
    except KeyError as e:
        raise ConfigError(f"model: missing key {e}") from e
    except ValueError as e:
        raise ConfigError(f"model: {e}") from e


def _section(data: dict[str, Any], name: str) -> dict[str, Any]:
    section = data.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"[{name}] must be a table")
    return cast(dict[str, Any], section)


def _number(section: dict[str, Any], section_name: str, key: str, default: Any) -> Any:
    value = section.get(key, default)
    if value is not None and (isinstance(value, bool) or not isinstance(value, int | float)):
        raise ConfigError(f"[{section_name}] {key} must be a number, got {value!r}")
    return value


def _flag(section: dict[str, Any], section_name: str, key: str) -> bool:
    value = section.get(key, False)
    if not isinstance(value, bool):
        raise ConfigError(f"[{section_name}] {key} must be true or false, got {value!r}")
    return value


def _parse_model(section: dict[str, Any]) -> ModelParams:
    if "gamma" not in section or "a1" not in section:
        raise ConfigError("[model] needs gamma and a1")
    try:
        return ModelParams(
            gamma=float(_number(section, "model", "gamma", None)),
            a1=float(_number(section, "model", "a1", None)),
            v_table=parse_v(section.get("v", 0.0)),
            a1p=float(_number(section, "model", "a1p", 0.0)),
        )
    except ValueError as e:
        raise ConfigError(f"[model] {e}") from e


def _parse_grid(section: dict[str, Any]) -> tuple[int, ...]:
    if "values" in section:
        values = section["values"]
        if not isinstance(values, list):
            raise ConfigError("[grid] values must be a list of integers")
        items = cast(list[Any], values)
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in items):
            raise ConfigError("[grid] values must be a list of integers")
        return tuple(int(v) for v in items)
    if "n_min" in section:
        if "n_max" not in section:
            raise ConfigError("[grid] n_min needs a matching n_max")
        return geometric_grid(
            int(_number(section, "grid", "n_min", None)),
            int(_number(section, "grid", "n_max", None)),
            float(_number(section, "grid", "factor", 2.0)),
        )
    return ()


def parse_config(data: dict[str, Any], base_dir: Path, stem: str) -> ExperimentConfig:
    """Build an ExperimentConfig from parsed TOML; output paths resolve against base_dir."""
    experiment = _section(data, "experiment")
    kind_name = experiment.get("kind")
    try:
        kind = ExperimentKind(kind_name)
    except ValueError as e:
        known = ", ".join(k.value for k in ExperimentKind)
        raise ConfigError(f"[experiment] kind must be one of {known}, got {kind_name!r}") from e

    model_section = _section(data, "model")
    model = _parse_model(model_section) if model_section else ModelParams.jaynes_cummings()

    tol_section = _section(data, "tolerances")
    tolerances = Tolerances(
        tol=float(_number(tol_section, "tolerances", "tol", 1e-9)),
        slack=float(_number(tol_section, "tolerances", "slack", 0.15)),
        c0=_number(tol_section, "tolerances", "c0", None),
        nu=float(_number(tol_section, "tolerances", "nu", 2.0)),
        c_localization=float(_number(tol_section, "tolerances", "c_localization", 2.0)),
        t0=float(_number(tol_section, "tolerances", "t0", 1.0)),
        quad_points=int(_number(tol_section, "tolerances", "quad_points", 1024)),
        identity_tol=_number(tol_section, "tolerances", "identity_tol", None),
    )

    mu = experiment.get("mu", list(DEFAULT_MU))
    if not isinstance(mu, list) or not mu:
        raise ConfigError("[experiment] mu must be a non-empty list of numbers")
    try:
        mu_values = tuple(float(x) for x in cast(list[Any], mu))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"[experiment] mu entries must be numbers, got {mu}") from e

    grid_section = _section(data, "grid")
    fit_from = _number(grid_section, "grid", "fit_from", None)

    output = _section(data, "output")
    output_dir = base_dir / str(output.get("path", "."))

    return ExperimentConfig(
        model=model,
        kind=kind,
        grid=_parse_grid(grid_section),
        tolerances=tolerances,
        max_slope=_number(experiment, "experiment", "max_slope", None),
        target_slope=_number(experiment, "experiment", "target_slope", None),
        mu=mu_values,
        samples=int(_number(experiment, "experiment", "samples", 200)),
        seed=int(_number(experiment, "experiment", "seed", 0)),
        workers=int(_number(experiment, "experiment", "workers", 1)),
        c1=_number(experiment, "experiment", "c1", None),
        fit_from=None if fit_from is None else int(fit_from),
        trend=_flag(experiment, "experiment", "trend"),
        output_dir=output_dir,
        stem=str(output.get("stem", stem)),
    )


def load_config(path: Path) -> ExperimentConfig:
    try:
        with path.open("rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from e
    return parse_config(data, path.parent, path.stem)
