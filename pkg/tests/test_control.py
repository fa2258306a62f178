import math

import numpy as np
import pytest

from squeezelock.cavity import airy_buildup, transmission_phase
from squeezelock.control import (DEFAULT_COEFFICIENT, ControlConfig, LockPointLost,
                                 ReadoutMode, ThermalCoupling, detected_squeezing,
                                 detuning_from_pump, ellipse_rotation,
                                 operating_point_rotation, readout_corotation,
                                 resonance_curve, sideband_phase_pair, squeezing_curve)
from squeezelock.opo import ThresholdError, quadrature_variances, to_decibel

P0 = 34.5e-3
FC = 15.2e6
# independent cmath evaluation of the transmission phase at the default cavity
THETA_A_3MHZ = -0.01203333102517501
THETA_LO_3MHZ = 0.0843406874315129
AIRY_3MHZ = 0.8148269827820745


def test_thermal_default_coefficient():
    assert DEFAULT_COEFFICIENT == pytest.approx(8.70e8, rel=1e-3)
    assert detuning_from_pump(0.0) == 0.0
    assert detuning_from_pump(0.1 * P0) == pytest.approx(3e6, rel=1e-12)
    assert detuning_from_pump(-0.1 * P0) == pytest.approx(-3e6, rel=1e-12)


def test_thermal_validation():
    with pytest.raises(ValueError):
        ThermalCoupling(set_point_power=0.0)
    with pytest.raises(ValueError):
        ThermalCoupling(coefficient=float("inf"))
    with pytest.raises(ValueError):
        detuning_from_pump(float("nan"))


def test_control_config_validation():
    with pytest.raises(ValueError):
        ControlConfig(f_ccf=0.0)
    with pytest.raises(ValueError):
        ControlConfig(operating_point_offset=1.0)
    assert ControlConfig(readout_mode="b").readout_mode is ReadoutMode.DETUNED_OUTPUT


def test_sideband_pair_at_lock():
    plus, minus = sideband_phase_pair(0.0)
    assert minus == pytest.approx(-plus, abs=1e-15)
    assert plus - minus == pytest.approx(2 * transmission_phase(FC), abs=1e-15)


def test_sideband_pair_unwrapped():
    f = np.linspace(-300e6, 300e6, 6001)
    plus, minus = sideband_phase_pair(f)
    assert np.max(np.abs(np.diff(plus))) < 0.1
    assert np.max(np.abs(np.diff(minus))) < 0.1


def test_ellipse_rotation_golden():
    assert ellipse_rotation(0.0) == 0.0
    assert ellipse_rotation(3e6) == pytest.approx(THETA_A_3MHZ, abs=1e-14)


def test_ellipse_rotation_is_even():
    # the differential sideband phase is symmetric about resonance
    f = np.linspace(-20e6, 20e6, 401)
    np.testing.assert_allclose(ellipse_rotation(-f), ellipse_rotation(f), atol=1e-13)


def test_ellipse_rotation_saturates_far_from_resonance():
    th = [ellipse_rotation(f) for f in (100e6, 150e6, 200e6)]
    assert np.ptp(th) < 0.05 * abs(th[0])
    assert abs(th[0]) > 10 * abs(ellipse_rotation(3e6))


def test_readout_corotation():
    assert readout_corotation(0.0) == pytest.approx(0.0, abs=1e-15)
    assert readout_corotation(3e6) == pytest.approx(THETA_LO_3MHZ, abs=1e-14)
    f = np.linspace(-5e6, 5e6, 101)
    np.testing.assert_allclose(readout_corotation(-f), -readout_corotation(f), atol=1e-13)


def test_operating_point_rotation():
    assert operating_point_rotation(0.7, ControlConfig(operating_point_offset=0.0)) == 0.0
    for s in (-0.6, 0.2, 0.9):
        assert operating_point_rotation(1.0, ControlConfig(operating_point_offset=s)) == 0.0
    got = operating_point_rotation(0.9, ControlConfig(operating_point_offset=0.5))
    assert got == pytest.approx(math.asin(0.5 / 0.9) - math.asin(0.5), rel=1e-14)
    with pytest.raises(LockPointLost):
        operating_point_rotation(0.4, ControlConfig(operating_point_offset=0.5))
    with pytest.raises(ValueError):
        operating_point_rotation(0.0)


@pytest.mark.parametrize("mode", list("abcd"))
def test_set_point_reproduces_calibration(mode, opo):
    d = detected_squeezing(P0, mode, opo)
    assert d.squeezing_db == pytest.approx(-9.3, abs=1e-9)
    assert d.antisqueezing_db == pytest.approx(16.75, abs=1e-9)
    r_a, r_s = quadrature_variances(opo)
    assert 10 ** (d.squeezing_db / 10) == pytest.approx(r_s, abs=1e-10)


def test_mode_a_formula(opo):
    d = detected_squeezing(1.1 * P0, "a", opo)
    r_a, r_s = quadrature_variances(opo)
    th = THETA_A_3MHZ
    assert d.squeezing_db == pytest.approx(
        to_decibel(r_s * math.cos(th) ** 2 + r_a * math.sin(th) ** 2), abs=1e-10)
    assert d.squeezing_db > -9.3


def test_mode_b_reduces_effective_pump(opo):
    d = detected_squeezing(1.1 * P0, "b", opo)
    from squeezelock.opo import OpoParams
    r_a, r_s = quadrature_variances(OpoParams(opo.pump_ratio * AIRY_3MHZ,
                                              opo.detection_efficiency))
    th = THETA_A_3MHZ
    assert d.squeezing_db == pytest.approx(
        to_decibel(r_s * math.cos(th) ** 2 + r_a * math.sin(th) ** 2), abs=1e-10)


def test_mode_c_follows_pump(opo):
    from squeezelock.opo import OpoParams
    d = detected_squeezing(0.9 * P0, "c", opo)
    r_a, r_s = quadrature_variances(OpoParams(0.9 * opo.pump_ratio * AIRY_3MHZ,
                                              opo.detection_efficiency))
    th = THETA_A_3MHZ
    assert d.squeezing_db == pytest.approx(
        to_decibel(r_s * math.cos(th) ** 2 + r_a * math.sin(th) ** 2), abs=1e-10)


def test_mode_d_uses_corotating_readout(opo):
    from squeezelock.opo import OpoParams
    d = detected_squeezing(1.1 * P0, "d", opo)
    assert d.readout_angle == pytest.approx(THETA_LO_3MHZ, abs=1e-13)
    r_a, r_s = quadrature_variances(OpoParams(1.1 * opo.pump_ratio * AIRY_3MHZ,
                                              opo.detection_efficiency))
    th = THETA_A_3MHZ - THETA_LO_3MHZ
    assert d.squeezing_db == pytest.approx(
        to_decibel(r_s * math.cos(th) ** 2 + r_a * math.sin(th) ** 2), abs=1e-10)


def test_mode_d_operating_point_offset(opo):
    cfg = ControlConfig(operating_point_offset=0.5)
    d = detected_squeezing(1.1 * P0, "d", opo, cfg=cfg)
    extra = math.asin(0.5 / math.sqrt(AIRY_3MHZ)) - math.asin(0.5)
    assert d.readout_angle == pytest.approx(THETA_LO_3MHZ + extra, abs=1e-12)
    with pytest.raises(LockPointLost):
        detected_squeezing(1.15 * P0, "d", opo, cfg=ControlConfig(operating_point_offset=0.9))


def test_threshold_propagates(opo):
    with pytest.raises(ThresholdError):
        detected_squeezing(P0 / opo.pump_ratio * 1.01, "c", opo)
    with pytest.raises(ValueError):
        detected_squeezing(-1.0, "a", opo)


def test_mode_a_even_and_monotone(opo):
    dp = np.linspace(0, 0.1 * P0, 101)
    up = squeezing_curve(P0 + dp, "a", opo)
    down = squeezing_curve(P0 - dp, "a", opo)
    np.testing.assert_allclose(up, down, atol=1e-12)
    assert np.all(np.diff(up[1:]) > 0)


def test_small_angle_bound(opo):
    r_a, r_s = quadrature_variances(opo)
    for p in np.linspace(0.9 * P0, 1.1 * P0, 41):
        th = ellipse_rotation(detuning_from_pump(p - P0))
        assert abs(th) < 0.05
        v = 10 ** (squeezing_curve(p, "a", opo) / 10)
        assert abs(v - r_s) <= (r_a - r_s) * th ** 2 + 1e-6


def test_odd_quantities_in_pump_offset():
    dp = np.linspace(0, 0.1 * P0, 51)
    np.testing.assert_allclose(detuning_from_pump(-dp), -detuning_from_pump(dp), atol=0)
    f = detuning_from_pump(dp)
    np.testing.assert_allclose(readout_corotation(-f), -readout_corotation(f), atol=1e-13)


def test_resonance_curve():
    p = np.linspace(0.8 * P0, 1.2 * P0, 401)
    curve = resonance_curve(p)
    assert curve.shape == (401, 2)
    i = np.argmax(curve[:, 1])
    assert curve[i, 0] == pytest.approx(P0)
    assert curve[i, 1] == 1.0
    assert np.all(np.diff(curve[: i + 1, 1]) > 0) and np.all(np.diff(curve[i:, 1]) < 0)
    lo, hi = resonance_curve([0.9 * P0, 1.1 * P0])[:, 1]
    assert lo == pytest.approx(hi, rel=1e-12)
    assert hi == pytest.approx(AIRY_3MHZ, rel=1e-12)
    assert hi == pytest.approx(airy_buildup(3e6), rel=1e-12)
    with pytest.raises(ValueError):
        resonance_curve([])
