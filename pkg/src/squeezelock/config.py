"""Run configuration: nested dataclasses backed by a YAML document.

Units are fixed per field: W, Hz, m, s, dB. ``drift_rate`` is a fraction
per hour and ``lockloss_rate`` is events per hour.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .cavity import CavityParams
from .control import ControlConfig, ReadoutMode, ThermalCoupling
from .longrun import LockStateMachine, NoiseProcess, StabilizerLoop
from .opo import OpoParams, calibrate


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CalibrationPair:
    sqz_db: float = -9.3
    antisqz_db: float = 16.75


@dataclass(frozen=True)
class LockConfig:
    lockloss_rate: float = 8 / 20
    reacquisition_time: float = 15.0

    def __post_init__(self):
        LockStateMachine(self.lockloss_rate, self.reacquisition_time)


@dataclass(frozen=True)
class SpectrogramConfig:
    bin_duration: float = 900.0
    fft_segment: float = 60.0
    f_min: float = 10.0
    f_max: float = 10e3
    n_freq: int = 300
    pickup_lines: tuple = ((6000.0, -7.0),)
    pickup_halfwidth: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, "pickup_lines",
                           tuple((float(f), float(db)) for f, db in self.pickup_lines))
        if self.bin_duration < self.fft_segment:
            raise ValueError("bin_duration must be >= fft_segment")
        if not self.fft_segment > 0:
            raise ValueError("fft_segment must be positive")
        if not 0 < self.f_min < self.f_max:
            raise ValueError("need 0 < f_min < f_max")
        if self.n_freq < 2:
            raise ValueError("n_freq must be at least 2")


@dataclass(frozen=True)
class RunConfig:
    cavity: CavityParams = field(default_factory=CavityParams.from_power)
    opo: OpoParams | None = None
    calibration: CalibrationPair | None = field(default_factory=CalibrationPair)
    thermal: ThermalCoupling = field(default_factory=ThermalCoupling)
    control: ControlConfig = field(default_factory=ControlConfig)
    noise: NoiseProcess = field(default_factory=NoiseProcess)
    loop: StabilizerLoop = field(default_factory=StabilizerLoop)
    lock: LockConfig = field(default_factory=LockConfig)
    spectrogram: SpectrogramConfig = field(default_factory=SpectrogramConfig)
    duration: float = 20 * 3600.0
    dt: float = 1.0
    loop_block: float = 900.0
    out_dir: str | None = None

    def __post_init__(self):
        if (self.opo is None) == (self.calibration is None):
            raise ConfigError("supply exactly one of 'opo' or 'calibration'")
        if self.duration < 0:
            raise ConfigError("duration must be non-negative")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if not self.loop_block > 0:
            raise ConfigError("loop_block must be positive")

    @property
    def opo_params(self):
        """OPO parameters at the thermal set point."""
        if self.opo is not None:
            return self.opo
        cal = calibrate(self.calibration.sqz_db, self.calibration.antisqz_db).opo
        x = cal.pump_ratio
        p_th = self.thermal.set_point_power / x if x > 0 else float("inf")
        return OpoParams(x, cal.detection_efficiency, p_th)

    def with_seed(self, seed):
        return dataclasses.replace(self, noise=dataclasses.replace(self.noise, seed=int(seed)))

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)


_SECTIONS = {
    "opo": OpoParams,
    "calibration": CalibrationPair,
    "thermal": ThermalCoupling,
    "control": ControlConfig,
    "noise": NoiseProcess,
    "loop": StabilizerLoop,
    "lock": LockConfig,
    "spectrogram": SpectrogramConfig,
}
_SCALARS = ("duration", "dt", "loop_block", "out_dir")


def _build(cls, data, name):
    if not isinstance(data, dict):
        raise ConfigError(f"section '{name}' must be a mapping")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"section '{name}': unknown keys {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"section '{name}': {exc}") from exc


def _build_cavity(data):
    if not isinstance(data, dict):
        raise ConfigError("section 'cavity' must be a mapping")
    try:
        if "rho1" in data:
            return _build(CavityParams, data, "cavity")
        return CavityParams.from_power(**data)
    except TypeError as exc:
        raise ConfigError(f"section 'cavity': {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"section 'cavity': {exc}") from exc


def config_from_dict(data):
    data = dict(data or {})
    unknown = set(data) - set(_SECTIONS) - set(_SCALARS) - {"cavity"}
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    kw = {}
    if "cavity" in data:
        kw["cavity"] = _build_cavity(data["cavity"])
    for name, cls in _SECTIONS.items():
        if name in data:
            kw[name] = None if data[name] is None else _build(cls, data[name], name)
    # an explicit opo block replaces the default calibration pair
    if kw.get("opo") is not None and "calibration" not in data:
        kw["calibration"] = None
    for name in _SCALARS:
        if name in data:
            kw[name] = data[name]
    try:
        return RunConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def config_to_dict(cfg):
    out = {"cavity": cfg.cavity.as_dict()}
    for name in _SECTIONS:
        value = getattr(cfg, name)
        if value is None:
            out[name] = None
            continue
        d = dataclasses.asdict(value)
        for k, v in d.items():
            if isinstance(v, ReadoutMode):
                d[k] = v.value
            elif isinstance(v, tuple):
                d[k] = [list(item) for item in v]
        out[name] = d
    for name in _SCALARS:
        out[name] = getattr(cfg, name)
    return out


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    return config_from_dict(data)


def dump_config(cfg, path=None):
    text = yaml.safe_dump(config_to_dict(cfg), sort_keys=False)
    if path is not None:
        Path(path).write_text(text)
    return text
