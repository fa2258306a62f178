"""Simulation of a coherently controlled audio-band squeezed light source."""

from .cavity import (C, CavityParams, DEFAULT_CAVITY, airy_buildup, decay_rate, fwhm,
                     normalized_frequency, transmission_phase, unwrap_phase)
from .config import RunConfig, load_config, dump_config
from .control import (ControlConfig, DetectedSqueezing, LockPointLost, ReadoutMode,
                      ThermalCoupling, detected_squeezing, detuning_from_pump,
                      ellipse_rotation, operating_point_rotation, readout_corotation,
                      resonance_curve, sideband_phase_pair, squeezing_curve)
from .longrun import (LockState, LockStateMachine, NoiseProcess, RunStats, Spectrogram,
                      StabilizerLoop, lock_step, loop_residual, noise_step, run, run_seeds)
from .opo import (CalibrationError, OpoParams, SqueezingEllipse, ThresholdError, calibrate,
                  from_decibel, quadrature_variances, rotate_readout, to_decibel)

__version__ = "0.1.0"
