"""Scenario configuration and its YAML file format."""
import hashlib
import json
from dataclasses import dataclass, field, replace, asdict
from typing import Optional

import numpy as np
import yaml

from .backstepping import DEFAULT_SINGULARITY_TOL, Gains
from .dynamics import PlantParams
from .errors import ConfigError
from .guidance import Trajectory
from .pid import PidGains

CONTROLLERS = ("backstepping", "pid")
HOLD_MODES = ("stage", "zoh")


@dataclass(frozen=True)
class DisturbanceProfile:
    """Ideal step of wind speed mapped to a constant drag force ``cd * v``."""
    t0: float = 25.0
    wind_speed: float = 6.0
    cd: float = 0.3
    direction: tuple = (1.0, 0.0, 0.0)

    def __post_init__(self):
        if self.t0 < 0 or self.wind_speed < 0 or self.cd < 0:
            raise ConfigError("disturbance t0, wind_speed and cd must be non-negative")
        d = np.asarray(self.direction, dtype=float)
        n = np.linalg.norm(d)
        if d.shape != (3,) or not n > 0:
            raise ConfigError("disturbance direction must be a non-zero 3-vector")
        object.__setattr__(self, "direction", tuple(float(x) for x in d / n))

    def to_dict(self):
        d = asdict(self)
        d["direction"] = list(self.direction)
        return d


@dataclass(frozen=True)
class PositionLoop:
    """PD outer loop turning x/y errors into roll/pitch references."""
    enabled: bool = True
    kp: float = 1.0
    kd: float = 1.5
    attitude_limit: float = 0.5
    feedforward: bool = False

    def __post_init__(self):
        if self.kp < 0 or self.kd < 0 or not self.attitude_limit > 0:
            raise ConfigError("position loop needs kp, kd >= 0 and attitude_limit > 0")


@dataclass(frozen=True)
class Clamp:
    enabled: bool = False
    u1_max: float = 80.0
    tau_max: float = 2.0

    def __post_init__(self):
        if not (self.u1_max > 0 and self.tau_max > 0):
            raise ConfigError("clamp limits must be positive")


@dataclass(frozen=True)
class ScenarioConfig:
    plant: PlantParams = field(default_factory=PlantParams)
    controller: str = "backstepping"
    gains: Gains = field(default_factory=Gains)
    pid: PidGains = field(default_factory=PidGains)
    trajectory: Trajectory = field(default_factory=Trajectory)
    position_loop: PositionLoop = field(default_factory=PositionLoop)
    disturbance: Optional[DisturbanceProfile] = None
    h: float = 1e-3
    horizon: float = 50.0
    initial_state: Optional[tuple] = None
    clamp: Clamp = field(default_factory=Clamp)
    singularity_tol: float = DEFAULT_SINGULARITY_TOL
    hold: str = "stage"

    def __post_init__(self):
        if self.controller not in CONTROLLERS:
            raise ConfigError(f"controller must be one of {CONTROLLERS}, got {self.controller!r}")
        if self.hold not in HOLD_MODES:
            raise ConfigError(f"hold must be one of {HOLD_MODES}")
        if not (0 < self.h <= 0.01):
            raise ConfigError(f"step h must lie in (0, 0.01], got {self.h!r}")
        if not self.horizon > 0:
            raise ConfigError("horizon must be positive")
        n = self.horizon / self.h
        if abs(n - round(n)) > 1e-6 * max(1.0, n):
            raise ConfigError(f"horizon {self.horizon} is not a whole number of steps of {self.h}")
        if not self.singularity_tol > 0:
            raise ConfigError("singularity_tol must be positive")
        if self.initial_state is not None:
            x0 = np.asarray(self.initial_state, dtype=float)
            if x0.shape != (12,) or not np.all(np.isfinite(x0)):
                raise ConfigError("initial_state must be 12 finite numbers")
            object.__setattr__(self, "initial_state", tuple(float(v) for v in x0))

    @property
    def n_steps(self):
        return int(round(self.horizon / self.h))

    def x0(self):
        if self.initial_state is None:
            return self.trajectory.initial_state()
        return np.array(self.initial_state)

    def with_(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return {
            "plant": self.plant.to_dict(),
            "controller": {
                "kind": self.controller,
                "backstepping": self.gains.to_dict(),
                "pid": self.pid.to_dict(),
                "singularity_tol": self.singularity_tol,
                "hold": self.hold,
                "clamp": asdict(self.clamp),
            },
            "guidance": {
                "trajectory": self.trajectory.to_dict(),
                "position_loop": asdict(self.position_loop),
            },
            "disturbance": None if self.disturbance is None else self.disturbance.to_dict(),
            "integration": {"h": self.h, "horizon": self.horizon},
            "initial_state": None if self.initial_state is None else list(self.initial_state),
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d or {})
        unknown = set(d) - {"plant", "controller", "guidance", "disturbance", "integration",
                            "initial_state"}
        if unknown:
            raise ConfigError(f"unknown scenario sections: {sorted(unknown)}")
        try:
            ctrl = dict(d.get("controller") or {})
            guid = dict(d.get("guidance") or {})
            integ = dict(d.get("integration") or {})
            kw = {}
            if "plant" in d:
                kw["plant"] = PlantParams(**_floats(d["plant"]))
            if "kind" in ctrl:
                kw["controller"] = ctrl["kind"]
            if "backstepping" in ctrl:
                kw["gains"] = Gains(**_floats(ctrl["backstepping"]))
            if "pid" in ctrl:
                kw["pid"] = PidGains.from_dict(ctrl["pid"])
            if "singularity_tol" in ctrl:
                kw["singularity_tol"] = float(ctrl["singularity_tol"])
            if "hold" in ctrl:
                kw["hold"] = ctrl["hold"]
            if "clamp" in ctrl:
                kw["clamp"] = Clamp(**ctrl["clamp"])
            if "trajectory" in guid:
                kw["trajectory"] = Trajectory.from_dict(guid["trajectory"])
            if "position_loop" in guid:
                kw["position_loop"] = PositionLoop(**guid["position_loop"])
            if d.get("disturbance") is not None:
                dist = dict(d["disturbance"])
                if "direction" in dist:
                    dist["direction"] = tuple(dist["direction"])
                kw["disturbance"] = DisturbanceProfile(**dist)
            if "h" in integ:
                kw["h"] = float(integ["h"])
            if "horizon" in integ:
                kw["horizon"] = float(integ["horizon"])
            if d.get("initial_state") is not None:
                kw["initial_state"] = _state_from(d["initial_state"])
            return cls(**kw)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _floats(d):
    return {k: float(v) for k, v in dict(d).items()}


def _state_from(value):
    from .dynamics import STATE_NAMES
    if isinstance(value, dict):
        unknown = set(value) - set(STATE_NAMES)
        if unknown:
            raise ConfigError(f"unknown state names: {sorted(unknown)}")
        return tuple(float(value.get(name, 0.0)) for name in STATE_NAMES)
    return tuple(float(v) for v in value)


def load_scenario(path) -> ScenarioConfig:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"scenario {path} is not valid YAML: {exc}") from None
    if data is not None and not isinstance(data, dict):
        raise ConfigError("scenario file must hold a mapping")
    return ScenarioConfig.from_dict(data)


def save_scenario(cfg: ScenarioConfig, path):
    with open(path, "w") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=False)


def wind_scenario(controller="backstepping", **changes) -> ScenarioConfig:
    """Spiral tracking with a 6 m/s wind step at t = 25 s over 50 s."""
    cfg = ScenarioConfig(
        controller=controller,
        trajectory=Trajectory(kind="spiral"),
        disturbance=DisturbanceProfile(),
        h=1e-3,
        horizon=50.0,
    )
    return replace(cfg, **changes) if changes else cfg


def hover_scenario(initial_state=None, point=(0.0, 0.0, 1.0, 0.0), horizon=10.0,
                   controller="backstepping", **changes) -> ScenarioConfig:
    """Attitude/altitude regulation at a fixed point, position loop off."""
    return ScenarioConfig(
        controller=controller,
        trajectory=Trajectory(kind="hover", point=tuple(point)),
        position_loop=PositionLoop(enabled=False),
        horizon=horizon,
        initial_state=None if initial_state is None else tuple(initial_state),
        **changes,
    )
