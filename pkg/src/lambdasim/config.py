"""Run configuration: flat ``key=value`` files, flag overrides and manifests."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .analysis import QUANTITIES
from .errors import ConfigError
from .integrator import IntegratorSettings
from .model import GridSpec, PhysParams

MODES = ("adiabatic", "numeric", "compare", "sweep")
ENGINES = ("adiabatic", "numeric", "compare")

PARAM_KEYS = tuple(f.name for f in fields(PhysParams))
GRID_KEYS = tuple(f.name for f in fields(GridSpec))
SETTINGS_KEYS = tuple(f.name for f in fields(IntegratorSettings))
RUN_KEYS = (
    "mode",
    "out",
    "quantities",
    "export_every_t",
    "export_every_z",
    "sweep_param",
    "sweep_values",
    "sweep_engine",
    "jobs",
)
ALL_KEYS = PARAM_KEYS + GRID_KEYS + SETTINGS_KEYS + RUN_KEYS

_INT_KEYS = {"n_t", "n_z", "substeps", "export_every_t", "export_every_z", "jobs"}
_STR_KEYS = {"time_scheme", "z_scheme", "mode", "out", "sweep_param", "sweep_engine"}
_LIST_KEYS = {"quantities", "sweep_values"}


@dataclass(frozen=True)
class RunConfig:
    params: PhysParams = field(default_factory=PhysParams)
    grid: GridSpec = field(default_factory=GridSpec)
    settings: IntegratorSettings = field(default_factory=IntegratorSettings)
    mode: str = "adiabatic"
    out: str = "lambda_sim_out"
    quantities: Tuple[str, ...] = ("abs_a3", "probe", "coupling")
    export_every_t: int = 1
    export_every_z: int = 1
    sweep_param: str = ""
    sweep_values: Tuple[float, ...] = ()
    sweep_engine: str = "adiabatic"
    jobs: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode: must be one of {MODES}, got {self.mode!r}")
        if self.sweep_engine not in ENGINES:
            raise ConfigError(f"sweep_engine: must be one of {ENGINES}, got {self.sweep_engine!r}")
        for q in self.quantities:
            if q not in QUANTITIES:
                raise ConfigError(f"quantities: unknown quantity {q!r}; expected a subset of {QUANTITIES}")
        for name in ("export_every_t", "export_every_z", "jobs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name}: must be >= 1, got {getattr(self, name)}")
        if self.mode == "sweep":
            if self.sweep_param not in PARAM_KEYS:
                raise ConfigError(
                    f"sweep_param: must name a physical parameter {PARAM_KEYS}, got {self.sweep_param!r}"
                )
            if not self.sweep_values:
                raise ConfigError("sweep_values: at least one value is required in sweep mode")
        if not self.out:
            raise ConfigError("out: output directory must not be empty")


def _convert(key: str, raw: str):
    raw = raw.strip()
    if key in _LIST_KEYS:
        items = [item.strip() for item in raw.split(",") if item.strip()]
        if key == "sweep_values":
            try:
                return tuple(float(item) for item in items)
            except ValueError:
                raise ConfigError(f"{key}: expected a comma-separated list of numbers, got {raw!r}") from None
        return tuple(items)
    if key in _STR_KEYS:
        return raw
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a real number, got {raw!r}") from None


def read_pairs(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value
    return pairs


def _normalise(pairs: Union[Mapping[str, str], Iterable[str], None]) -> dict:
    if pairs is None:
        return {}
    if isinstance(pairs, Mapping):
        items = pairs.items()
    else:
        items = []
        for entry in pairs:
            if "=" not in entry:
                raise ConfigError(f"override {entry!r}: expected key=value")
            items.append(tuple(entry.split("=", 1)))
    return {str(k).strip().lstrip("-").replace("-", "_"): str(v) for k, v in items}


def parse_config(path: Optional[Union[str, os.PathLike]] = None,
                 overrides: Union[Mapping[str, str], Sequence[str], None] = None) -> RunConfig:
    """Build a validated :class:`RunConfig`; values in ``overrides`` win over the file.

    Unset keys take the defaults of the reference run.
    """
    raw = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file {str(p)!r} does not exist")
        raw.update(read_pairs(p.read_text(encoding="utf-8"), source=str(p)))
    raw.update(_normalise(overrides))

    values = {}
    for key, text in raw.items():
        if key not in ALL_KEYS:
            raise ConfigError(f"{key}: unknown key")
        values[key] = _convert(key, text)

    params = PhysParams(**{k: values[k] for k in PARAM_KEYS if k in values})
    grid = GridSpec(**{k: values[k] for k in GRID_KEYS if k in values})
    settings = IntegratorSettings(**{k: values[k] for k in SETTINGS_KEYS if k in values})
    run = {k: values[k] for k in RUN_KEYS if k in values}
    return RunConfig(params=params, grid=grid, settings=settings, **run)


def _fmt(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_manifest(config: RunConfig) -> str:
    """Every resolved setting as ``key=value`` lines in a fixed order."""
    lines = []
    for key in PARAM_KEYS:
        lines.append(f"{key}={_fmt(getattr(config.params, key))}")
    for key in GRID_KEYS:
        lines.append(f"{key}={_fmt(getattr(config.grid, key))}")
    for key in SETTINGS_KEYS:
        lines.append(f"{key}={_fmt(getattr(config.settings, key))}")
    for key in RUN_KEYS:
        lines.append(f"{key}={_fmt(getattr(config, key))}")
    return "\n".join(lines) + "\n"


def sweep_runs(config: RunConfig) -> List[RunConfig]:
    """One run descriptor per sweep value, each with its own output subdirectory."""
    if config.mode != "sweep":
        raise ConfigError(f"mode: sweep_runs needs mode 'sweep', got {config.mode!r}")
    runs = []
    for i, value in enumerate(config.sweep_values):
        params = config.params.replace(**{config.sweep_param: value})
        out = os.path.join(config.out, f"run_{i:03d}_{config.sweep_param}_{value!r}")
        runs.append(replace(config, params=params, mode=config.sweep_engine, out=out))
    return runs
