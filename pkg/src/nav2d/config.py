"""YAML run configuration.

One file mirrors the four parameter groups and the tick rate:

    rate: 10.0            # simulation tick rate, Hz
    robot:                # RobotParams fields
      wheel_radius: 0.04
      wheel_separation: 0.1
      max_wheel_speed: 30.0
    odom_noise:           # OdomNoise fields
      var_x: 0.0001
      var_y: 0.0001
      var_yaw: 0.01
    amcl:                 # AmclConfig fields; likelihood: nested block
      min_particles: 500
      update_min_d: 0.1
      update_min_a: 0.2
      alphas: [0.005, 0.005, 0.010, 0.005]
      beam_stride: 8
      resample_interval: 1
      likelihood:
        z_hit: 0.95
        z_rand: 0.05
        sigma_hit: 0.2
        max_obstacle_dist: 2.0
    planner:              # PlannerConfig fields
      min_vel_x: 0.1
      max_vel_x: 0.5

Every key is optional; omitted keys take the defaults above. Unknown
keys are rejected by name so typos cannot silently revert to defaults.
"""

import dataclasses
from dataclasses import dataclass, field

import yaml

from .core import RobotParams, ScanConfig
from .localization import AmclConfig, LikelihoodConfig
from .navigation import PlannerConfig
from .simulator import DEFAULT_TICK_RATE, OdomNoise


class ConfigError(ValueError):
    pass


# nested blocks and the types they build
_NESTED = {(AmclConfig, "likelihood"): LikelihoodConfig,
           (RobotParams, "lidar"): ScanConfig}


@dataclass
class StackConfig:
    """Everything a run needs: robot, noise, localization, planning, rate."""

    robot: RobotParams = field(default_factory=RobotParams)
    odom_noise: OdomNoise = field(default_factory=OdomNoise)
    amcl: AmclConfig = field(default_factory=AmclConfig)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    rate: float = DEFAULT_TICK_RATE

    @property
    def dt(self) -> float:
        return 1.0 / self.rate


def _build(cls, data: dict, where: str):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown key '{sorted(unknown)[0]}' in {where}")
    kwargs = dict(data)
    for (owner, key), sub_cls in _NESTED.items():
        if cls is owner and key in kwargs:
            if not isinstance(kwargs[key], dict):
                raise ConfigError(f"'{key}' in {where} must be a mapping")
            kwargs[key] = _build(sub_cls, kwargs[key], f"{where}.{key}")
    if "alphas" in kwargs:
        kwargs["alphas"] = tuple(kwargs["alphas"])
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad values in {where}: {e}") from e


_SECTIONS = {"robot": RobotParams, "odom_noise": OdomNoise,
             "amcl": AmclConfig, "planner": PlannerConfig}


def parse_config(data: dict) -> StackConfig:
    if data is None:
        return StackConfig()
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    unknown = set(data) - set(_SECTIONS) - {"rate"}
    if unknown:
        raise ConfigError(f"unknown section '{sorted(unknown)[0]}'")
    cfg = StackConfig()
    for name, cls in _SECTIONS.items():
        if name in data:
            block = data[name]
            if not isinstance(block, dict):
                raise ConfigError(f"section '{name}' must be a mapping")
            setattr(cfg, name, _build(cls, block, name))
    if "rate" in data:
        cfg.rate = float(data["rate"])
        if cfg.rate <= 0:
            raise ConfigError("rate must be > 0")
    return cfg


def load_config(path: str) -> StackConfig:
    with open(path) as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse {path}: {e}") from e
    return parse_config(data)
