"""Below-threshold OPO quadrature variances, homodyne readout mixing and
calibration against a measured squeezing/anti-squeezing pair.

Variances are linear and relative to shot noise (= 1); decibels appear only
at the I/O boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class CalibrationError(ValueError):
    """The requested squeezing/anti-squeezing pair has no physical (x, eta)."""


class ThresholdError(ValueError):
    """Pump at or above the OPO threshold."""


@dataclass(frozen=True)
class OpoParams:
    pump_ratio: float
    detection_efficiency: float
    threshold_power: float = 1.0

    def __post_init__(self):
        if not 0 <= self.pump_ratio < 1:
            raise ThresholdError(f"pump_ratio must lie in [0, 1), got {self.pump_ratio}")
        if not 0 <= self.detection_efficiency <= 1:
            raise ValueError(
                f"detection_efficiency must lie in [0, 1], got {self.detection_efficiency}")
        if not self.threshold_power > 0:
            raise ValueError("threshold_power must be positive")


@dataclass(frozen=True)
class SqueezingEllipse:
    v_squeezed: float
    v_antisqueezed: float
    angle: float = 0.0

    def __post_init__(self):
        if not 0 < self.v_squeezed <= 1 <= self.v_antisqueezed:
            raise ValueError("need 0 < V_s <= 1 <= V_a")
        if self.v_squeezed * self.v_antisqueezed < 1 - 1e-12:
            raise ValueError("V_a * V_s < 1 violates the uncertainty bound")


def to_decibel(variance):
    v = np.asarray(variance, dtype=float)
    if np.any(~(v > 0)):
        raise ValueError("variance must be positive")
    out = 10 * np.log10(v)
    return float(out) if out.ndim == 0 else out


def from_decibel(db):
    out = 10 ** (np.asarray(db, dtype=float) / 10)
    return float(out) if out.ndim == 0 else out


def _variances(x, eta, kappa):
    # array-friendly core; x, eta, kappa broadcast
    s = np.sqrt(x)
    k2 = 4 * np.asarray(kappa, dtype=float) ** 2
    r_a = 1 + eta * 4 * s / ((1 - s) ** 2 + k2)
    r_s = 1 - eta * 4 * s / ((1 + s) ** 2 + k2)
    return r_a, r_s


def quadrature_variances(opo, kappa=0.0):
    """Return ``(R_a, R_s)``: anti-squeezed and squeezed variances at
    normalized sideband frequency ``kappa``."""
    if np.any(np.asarray(kappa) < 0):
        raise ValueError("kappa must be non-negative")
    r_a, r_s = _variances(opo.pump_ratio, opo.detection_efficiency, kappa)
    if np.ndim(r_a) == 0:
        return float(r_a), float(r_s)
    return r_a, r_s


def rotate_readout(ellipse, theta):
    """Variances seen by a homodyne detector whose quadrature is rotated by
    ``theta`` from the ellipse axes. Returns ``(V'_a, V'_s)``."""
    c2 = np.cos(theta) ** 2
    s2 = np.sin(theta) ** 2
    va = ellipse.v_antisqueezed * c2 + ellipse.v_squeezed * s2
    vs = ellipse.v_squeezed * c2 + ellipse.v_antisqueezed * s2
    if np.ndim(va) == 0:
        return float(va), float(vs)
    return va, vs


_NO_PUMP_DB = 1e-9


@dataclass(frozen=True)
class Calibration:
    opo: OpoParams
    eta_constrained: bool = True


def calibrate(sqz_db, antisqz_db, threshold_power=1.0):
    """Invert the variance model at kappa = 0 for a measured pair.

    With a = R_a - 1 and b = 1 - R_s the efficiency follows in closed form,
    eta = a b / (a - b); the pump ratio then solves
    4 sqrt(x) / (1 - sqrt(x))^2 = a / eta.
    """
    if abs(sqz_db) <= _NO_PUMP_DB and abs(antisqz_db) <= _NO_PUMP_DB:
        return Calibration(OpoParams(0.0, 1.0, threshold_power), eta_constrained=False)
    if not sqz_db < 0 < antisqz_db:
        raise CalibrationError("need squeezing < 0 dB < anti-squeezing")
    r_s, r_a = from_decibel(sqz_db), from_decibel(antisqz_db)
    if r_a * r_s < 1:
        raise CalibrationError(
            f"R_a * R_s = {r_a * r_s:.6g} < 1: pair violates the uncertainty bound")
    a, b = r_a - 1, 1 - r_s
    eta = a * b / (a - b)
    if eta > 1 + 1e-12:
        raise CalibrationError(f"implied detection efficiency {eta:.6g} exceeds 1")
    eta = min(eta, 1.0)
    q = a / eta
    # q (1 - s)^2 = 4 s, take the root in (0, 1)
    s = ((q + 2) - 2 * math.sqrt(q + 1)) / q
    return Calibration(OpoParams(s * s, eta, threshold_power))
