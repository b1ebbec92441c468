"""
Experiment configuration

Flat text format, one `key = value` per line:

    # comment
    experiment = fig6
    fig6_lambda_r_grid = 0.1, 0.2, 0.3
    c_alpha = auto

Keys carry their unit as a suffix (altitude_m, fc_ghz, eta_nlos_db). Precedence:
module defaults < `environment` preset < keys in the file < CLI overrides.
"""

import dataclasses
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from covsim.core.atg_channel import (
    DEFAULT_COVERAGE_RADIUS_M,
    ENVIRONMENT_PRESETS,
    ETA_LOS_SWEEP_DB,
    EnvironmentProfile,
    environment_preset,
)
from covsim.core.d2d_capacity import (
    DEFAULT_QUAD_TOLERANCE,
    RELAY_DENSITY_SWEEP,
    IntegrandVariant,
    CapacityParams,
)
from covsim.core.errors import ConfigError, ParameterError

logger = logging.getLogger(__name__)

EXPERIMENTS = ("fig3", "fig4", "fig5", "fig6", "altitude", "scenario")
HOP_RADIUS_CHOICES = ("r_d", "r_r")

_LINE_PATTERN = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")
_ECHO_PREFIX = "config: "


def _opt(kind: str, default: Any, *, choices: Optional[Tuple[str, ...]] = None, grid: bool = False):
    meta = {"kind": kind, "choices": choices, "grid": grid}
    if isinstance(default, list):
        return field(default_factory=lambda: list(default), metadata=meta)
    return field(default=default, metadata=meta)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = _opt("str", "fig3", choices=EXPERIMENTS)
    seed: int = _opt("int", 1)
    output_path: str = _opt("str", "-")
    quad_tol: float = _opt("float", DEFAULT_QUAD_TOLERANCE)
    workers: int = _opt("int", 1)

    # air-to-ground channel
    environment: str = _opt("str", "default", choices=tuple(sorted(ENVIRONMENT_PRESETS)))
    env_a: float = _opt("float", 10.0)
    env_b: float = _opt("float", 0.6)
    eta_los_db: float = _opt("float", 1.0)
    eta_nlos_db: float = _opt("float", 20.0)
    altitude_m: float = _opt("float", 100.0)
    fc_ghz: float = _opt("float", 2.8)

    fig3_fc_grid_ghz: List[float] = _opt("floats", [2.8, 3.5, 5.8], grid=True)
    fig3_distance_grid_m: List[float] = _opt("floats", [10.0 * k for k in range(1, 51)], grid=True)

    fig4_eta_los_grid_db: List[float] = _opt("floats", list(ETA_LOS_SWEEP_DB), grid=True)
    fig4_p_los_grid: List[float] = _opt("floats", [k / 20 for k in range(21)], grid=True)
    fig4_distance_m: float = _opt("float", 100.0)

    fig5_channel_grid: List[int] = _opt("ints", list(range(1, 11)), grid=True)
    fig5_offered_grid_erlang: List[float] = _opt("floats", [10.0, 15.0, 20.0], grid=True)
    fig5_include_accept: bool = _opt("bool", True)

    # D2D capacity
    lambda_d_per_m2: float = _opt("float", 3.3e-4)
    r_d_m: float = _opt("float", 50.0)
    alpha: float = _opt("float", 3.0)
    v_d_threshold: float = _opt("float", 1.0)
    p_relay_w: float = _opt("float", 1.0)
    p_d2d_w: float = _opt("float", 1.0)
    c_alpha: Optional[float] = _opt("opt_float", None)
    integrand_variant: str = _opt("str", "prefactor", choices=tuple(v.value for v in IntegrandVariant))
    fig6_lambda_r_grid: List[float] = _opt("floats", list(RELAY_DENSITY_SWEEP), grid=True)
    fig6_hop_grid: List[int] = _opt("ints", list(range(1, 11)), grid=True)
    fig6_compare_variants: bool = _opt("bool", False)

    # coverage vs altitude
    altitude_grid_m: List[float] = _opt("floats", [20.0 * k for k in range(1, 51)], grid=True)
    max_path_loss_db: float = _opt("float", 110.0)

    # scenario
    area_m: float = _opt("float", 1000.0)
    uav_x_m: float = _opt("float", 500.0)
    uav_y_m: float = _opt("float", 500.0)
    coverage_radius_m: float = _opt("float", DEFAULT_COVERAGE_RADIUS_M)
    edge_band_m: Optional[float] = _opt("opt_float", None)
    w_energy: float = _opt("float", 0.5)
    w_quality: float = _opt("float", 0.5)
    k_max: int = _opt("int", 5)
    n_max: int = _opt("int", 10)
    hop_radius: str = _opt("str", "r_d", choices=HOP_RADIUS_CHOICES)
    trials: int = _opt("int", 1)
    field_csv: str = _opt("str", "")

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            choices = f.metadata["choices"]
            if choices is not None and value not in choices:
                raise ConfigError(f.name, f"must be one of {', '.join(choices)}, got {value!r}")
            if f.metadata["grid"]:
                if not value:
                    raise ConfigError(f.name, "grid must not be empty")
                if any(b <= a for a, b in zip(value, value[1:])):
                    raise ConfigError(f.name, "grid must be strictly ascending")
        if self.seed < 0:
            raise ConfigError("seed", f"must be >= 0, got {self.seed}")
        if self.workers < 1:
            raise ConfigError("workers", f"must be >= 1, got {self.workers}")
        if self.trials < 1:
            raise ConfigError("trials", f"must be >= 1, got {self.trials}")
        if not self.quad_tol > 0:
            raise ConfigError("quad_tol", f"must be > 0, got {self.quad_tol}")

    @property
    def carrier_hz(self) -> float:
        return self.fc_ghz * 1e9

    def environment_profile(self) -> EnvironmentProfile:
        try:
            return EnvironmentProfile(self.env_a, self.env_b, self.eta_los_db, self.eta_nlos_db)
        except ParameterError as exc:
            raise ConfigError(_PROFILE_KEYS.get(exc.name, exc.name), str(exc)) from exc

    def capacity_params(self, lambda_r: float, n_hops: int = 1,
                        variant: Optional[IntegrandVariant] = None) -> CapacityParams:
        return CapacityParams(
            lambda_d=self.lambda_d_per_m2,
            lambda_r=lambda_r,
            r_d_m=self.r_d_m,
            n_hops=n_hops,
            alpha=self.alpha,
            v_d_threshold=self.v_d_threshold,
            p_relay_w=self.p_relay_w,
            p_d2d_w=self.p_d2d_w,
            c_alpha=self.c_alpha,
            variant=variant or IntegrandVariant(self.integrand_variant),
        )

    def resolved_edge_band_m(self) -> float:
        return self.edge_band_m if self.edge_band_m is not None else 0.1 * self.coverage_radius_m

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def echo(self) -> List[str]:
        """Every key in declaration order, formatted so parsing reproduces the config"""
        return [f"{f.name} = {_render(f.metadata['kind'], getattr(self, f.name))}"
                for f in dataclasses.fields(self)]


_PROFILE_KEYS = {"a": "env_a", "b": "env_b", "eta_los": "eta_los_db", "eta_nlos": "eta_nlos_db"}
_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def _render(kind: str, value: Any) -> str:
    if kind == "floats":
        return ", ".join(repr(float(v)) for v in value)
    if kind == "ints":
        return ", ".join(str(int(v)) for v in value)
    if kind == "bool":
        return "true" if value else "false"
    if kind == "opt_float":
        return "auto" if value is None else repr(float(value))
    if kind == "float":
        return repr(float(value))
    return str(value)


def _parse_float(key: str, text: str, line: Optional[int]) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(key, f"expected a number, got {text!r}", line) from None
    if not math.isfinite(value):
        raise ConfigError(key, f"must be finite, got {text!r}", line)
    return value


def _parse_int(key: str, text: str, line: Optional[int]) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {text!r}", line) from None


def _split_list(text: str) -> List[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def parse_value(key: str, text: str, line: Optional[int] = None) -> Any:
    if key not in _FIELDS:
        raise ConfigError(key, "unknown key", line)
    kind = _FIELDS[key].metadata["kind"]
    if kind == "float":
        return _parse_float(key, text, line)
    if kind == "opt_float":
        return None if text.lower() == "auto" else _parse_float(key, text, line)
    if kind == "int":
        return _parse_int(key, text, line)
    if kind == "bool":
        lowered = text.lower()
        if lowered not in ("true", "false"):
            raise ConfigError(key, f"expected true or false, got {text!r}", line)
        return lowered == "true"
    if kind == "floats":
        return [_parse_float(key, item, line) for item in _split_list(text)]
    if kind == "ints":
        return [_parse_int(key, item, line) for item in _split_list(text)]
    return text


def parse_config_text(text: str, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Parse `key = value` text on top of the defaults and the selected preset."""
    values: Dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        match = _LINE_PATTERN.match(line)
        if not match:
            raise ConfigError(line.strip(), "expected 'key = value'", lineno)
        key, value = match.group(1), match.group(2)
        if key in values:
            raise ConfigError(key, "given more than once", lineno)
        values[key] = parse_value(key, value, lineno)

    merged: Dict[str, Any] = {}
    if "environment" in values:
        try:
            profile = environment_preset(values["environment"])
        except ParameterError as exc:
            raise ConfigError("environment", str(exc)) from exc
        merged.update(env_a=profile.a, env_b=profile.b, eta_los_db=profile.eta_los,
                      eta_nlos_db=profile.eta_nlos)
    merged.update(values)
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})

    config = ExperimentConfig(**merged)
    config.environment_profile()
    logger.debug("📚 Parsed %d config keys", len(values))
    return config


def load_config(path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from exc
    config = parse_config_text(text, overrides)
    logger.info("📚 Loaded %s config from %s", config.experiment, path)
    return config


def echo_lines(config: ExperimentConfig) -> List[str]:
    return [_ECHO_PREFIX + line for line in config.echo()]


def parse_config_echo(provenance: Iterable[str]) -> ExperimentConfig:
    """Rebuild the config from the `config:` provenance lines of an output CSV."""
    body = [line[len(_ECHO_PREFIX):] for line in provenance if line.startswith(_ECHO_PREFIX)]
    if not body:
        raise ConfigError("provenance", "no config echo found")
    # the echo already has preset values resolved; re-applying the preset is a no-op
    return parse_config_text("\n".join(body))


def default_config_text(experiment: str) -> str:
    if experiment not in EXPERIMENTS:
        raise ConfigError("experiment", f"must be one of {', '.join(EXPERIMENTS)}, got {experiment!r}")
    config = ExperimentConfig(experiment=experiment)
    return "# covsim defaults\n" + "\n".join(config.echo()) + "\n"
