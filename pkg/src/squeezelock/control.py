"""Pump power -> thermal detuning -> sideband phases -> ellipse and readout
rotation -> detected squeezing.

The four readout modes build on each other:

a  set-point variances, fixed readout, ellipse rotated by the change of the
   differential sideband phase
b  as a, with the parametric gain reduced by the detuned resonant buildup
c  as b, with the pump ratio following the actual pump power
d  as c, with the homodyne readout locked to the mean sideband phase
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .cavity import DEFAULT_CAVITY, airy_buildup, transmission_phase, unwrap_phase
from .opo import OpoParams, ThresholdError, _variances, to_decibel

SET_POINT_POWER = 34.5e-3  # W
DEFAULT_COEFFICIENT = 3e6 / (0.10 * SET_POINT_POWER)  # Hz/W
F_CCF = 15.2e6  # Hz


class LockPointLost(RuntimeError):
    """Error signal no longer reaches the electronic offset."""


class ReadoutMode(str, enum.Enum):
    FIXED_ANGLE = "a"
    DETUNED_OUTPUT = "b"
    PUMP_DEPENDENT_GAIN = "c"
    CO_ROTATING = "d"


@dataclass(frozen=True)
class ThermalCoupling:
    coefficient: float = DEFAULT_COEFFICIENT
    set_point_power: float = SET_POINT_POWER

    def __post_init__(self):
        if not np.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")
        if not self.set_point_power > 0:
            raise ValueError("set_point_power must be positive")


@dataclass(frozen=True)
class ControlConfig:
    f_ccf: float = F_CCF
    readout_mode: ReadoutMode = ReadoutMode.CO_ROTATING
    operating_point_offset: float = 0.0

    def __post_init__(self):
        if not self.f_ccf > 0:
            raise ValueError("f_ccf must be positive")
        if not abs(self.operating_point_offset) < 1:
            raise ValueError("operating_point_offset must lie in (-1, 1)")
        object.__setattr__(self, "readout_mode", ReadoutMode(self.readout_mode))


@dataclass(frozen=True)
class DetectedSqueezing:
    squeezing_db: float
    antisqueezing_db: float
    ellipse_angle: float
    readout_angle: float


DEFAULT_THERMAL = ThermalCoupling()
DEFAULT_CONTROL = ControlConfig()


def detuning_from_pump(delta_p, thermal=DEFAULT_THERMAL):
    """Cavity detuning (Hz) for a pump power deviation ``delta_p`` (W)."""
    delta_p = np.asarray(delta_p, dtype=float)
    if not np.all(np.isfinite(delta_p)):
        raise ValueError("delta_p must be finite")
    out = thermal.coefficient * delta_p
    return float(out) if out.ndim == 0 else out


def sideband_phase_pair(f_det, cfg=DEFAULT_CONTROL, cavity=DEFAULT_CAVITY):
    """Transmission phases of the upper and lower coherent-control sidebands.

    For array input the phases are unwrapped along the detuning axis.
    """
    f_det = np.asarray(f_det, dtype=float)
    plus = transmission_phase(f_det + cfg.f_ccf, cavity)
    minus = transmission_phase(f_det - cfg.f_ccf, cavity)
    if f_det.ndim == 0:
        return plus, minus
    return unwrap_phase(plus), unwrap_phase(minus)


def _differential_phase(f_det, cfg, cavity):
    plus, minus = sideband_phase_pair(f_det, cfg, cavity)
    return np.asarray(plus) - np.asarray(minus)


def ellipse_rotation(f_det, cfg=DEFAULT_CONTROL, cavity=DEFAULT_CAVITY):
    """Quadrature angle (rad) by which the squeezing ellipse turns when the
    cavity is detuned by ``f_det``: half the change of the differential
    sideband phase."""
    d = _differential_phase(f_det, cfg, cavity)
    d0 = _differential_phase(0.0, cfg, cavity)
    out = 0.5 * (d - d0)
    # the differential phase never leaves (-pi, pi] on the relevant span
    out = np.angle(np.exp(2j * out)) / 2
    return float(out) if out.ndim == 0 else out


def readout_corotation(f_det, cfg=DEFAULT_CONTROL, cavity=DEFAULT_CAVITY):
    """Rotation (rad) of the homodyne quadrature locked to the mean phase of
    the two transmitted sidebands."""
    plus, minus = sideband_phase_pair(f_det, cfg, cavity)
    out = 0.5 * (np.asarray(plus) + np.asarray(minus))
    return float(out) if out.ndim == 0 else out


def _operating_point_rotation(buildup_ratio, offset):
    ratio = np.asarray(buildup_ratio, dtype=float)
    arg = offset / ratio
    lost = np.abs(arg) > 1
    rot = np.arcsin(np.clip(arg, -1, 1)) - np.arcsin(offset)
    return rot, lost


def operating_point_rotation(buildup_ratio, cfg=DEFAULT_CONTROL):
    """Readout rotation caused by an error-signal magnitude change.

    The lock holds ``M sin(theta) = o``; with the magnitude scaled by
    ``buildup_ratio`` the lock point moves to ``arcsin(s / ratio)``.
    """
    if np.any(np.asarray(buildup_ratio) <= 0):
        raise ValueError("buildup_ratio must be positive")
    rot, lost = _operating_point_rotation(buildup_ratio, cfg.operating_point_offset)
    if np.any(lost):
        raise LockPointLost(
            f"offset {cfg.operating_point_offset} exceeds the reduced error-signal magnitude")
    return float(rot) if np.ndim(rot) == 0 else rot


def _chain(pump_power, mode, opo, cavity, thermal, cfg, kappa=0.0, strict=True):
    """Vectorized core. Returns (V'_a, V'_s, ellipse angle, readout angle, lost).

    With ``strict=False`` samples at or above threshold are flagged in ``lost``
    instead of raising.
    """
    mode = ReadoutMode(mode)
    p = np.asarray(pump_power, dtype=float)
    if np.any(p < 0):
        raise ValueError("pump_power must be non-negative")
    f_det = detuning_from_pump(p - thermal.set_point_power, thermal)
    f_det = np.asarray(f_det)
    theta_a = np.asarray(ellipse_rotation(f_det, cfg, cavity))

    x = np.full_like(p, opo.pump_ratio)
    above = np.zeros(p.shape, dtype=bool)
    if mode in (ReadoutMode.PUMP_DEPENDENT_GAIN, ReadoutMode.CO_ROTATING):
        # pump ratio follows P / P_th with P_th fixed by the set point
        x = opo.pump_ratio * p / thermal.set_point_power
        above = x >= 1
        if np.any(above):
            if strict:
                raise ThresholdError("pump power reaches the OPO threshold")
            x = np.minimum(x, 1 - 1e-9)
    buildup = np.asarray(airy_buildup(f_det, cavity))
    if mode != ReadoutMode.FIXED_ANGLE:
        x = x * buildup
    r_a, r_s = _variances(x, opo.detection_efficiency, kappa)

    readout = np.zeros_like(theta_a)
    lost = np.zeros(theta_a.shape, dtype=bool)
    if mode == ReadoutMode.CO_ROTATING:
        readout = np.asarray(readout_corotation(f_det, cfg, cavity))
        if cfg.operating_point_offset != 0:
            rot, lost = _operating_point_rotation(np.sqrt(buildup),
                                                  cfg.operating_point_offset)
            readout = readout + rot
    theta = theta_a - readout
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    va = r_a * c2 + r_s * s2
    vs = r_s * c2 + r_a * s2
    return va, vs, theta_a, readout, lost | np.broadcast_to(above, lost.shape)


def detected_squeezing(pump_power, mode=ReadoutMode.CO_ROTATING, opo=None,
                       cavity=DEFAULT_CAVITY, thermal=DEFAULT_THERMAL,
                       cfg=DEFAULT_CONTROL, kappa=0.0):
    """Squeezing seen by the diagnostic homodyne detector at ``pump_power``.

    ``opo.pump_ratio`` is the ratio at the thermal set point; in modes c and
    d it scales linearly with pump power.
    """
    if opo is None:
        raise ValueError("opo parameters are required")
    va, vs, th_a, th_ro, lost = _chain(pump_power, mode, opo, cavity, thermal, cfg, kappa)
    if np.any(lost):
        raise LockPointLost("homodyne lock point lost")
    return DetectedSqueezing(to_decibel(float(vs)), to_decibel(float(va)),
                             float(th_a), float(th_ro))


def squeezing_curve(pump_powers, mode, opo, cavity=DEFAULT_CAVITY,
                    thermal=DEFAULT_THERMAL, cfg=DEFAULT_CONTROL, kappa=0.0):
    """Detected squeezing in dB over an array of pump powers."""
    va, vs, _, _, lost = _chain(pump_powers, mode, opo, cavity, thermal, cfg, kappa)
    if np.any(lost):
        raise LockPointLost("homodyne lock point lost")
    return to_decibel(vs)


def resonance_curve(pump_powers, thermal=DEFAULT_THERMAL, cavity=DEFAULT_CAVITY):
    """Normalized alignment-beam transmission versus pump power.

    Returns an ``(N, 2)`` array of ``(P, transmission)`` rows.
    """
    p = np.atleast_1d(np.asarray(pump_powers, dtype=float))
    if p.size == 0:
        raise ValueError("pump_powers must not be empty")
    f_det = detuning_from_pump(p - thermal.set_point_power, thermal)
    return np.column_stack([p, airy_buildup(f_det, cavity)])
