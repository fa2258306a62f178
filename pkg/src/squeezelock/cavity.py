"""Two-mirror cavity model: transmission phase, Airy buildup, linewidth.

All lengths are optical round-trip lengths (refractive index folded in).
Mirror power quantities ``T`` and ``L`` are treated as round-trip
logarithmic losses, so the field attenuation per round trip is
``exp(-(T_in + T_out + L) / 2)`` and the energy decay rate is exactly
``c * (T_in + T_out + L) / l``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

C = 2.99792458e8  # m/s


@dataclass(frozen=True)
class CavityParams:
    """Amplitude description of a two-mirror resonator.

    ``rho1``/``tau1`` belong to the input mirror (intracavity loss is
    lumped into its reflectivity), ``rho2``/``tau2`` to the output coupler.
    ``output_transmittance`` and ``intracavity_loss`` are kept for the
    decay-rate formula.
    """

    rho1: float
    rho2: float
    tau1: float
    tau2: float
    roundtrip_length: float
    intracavity_loss: float
    output_transmittance: float

    def __post_init__(self):
        self.validate()

    @classmethod
    def from_power(cls, output_transmittance=0.10, intracavity_loss=0.005,
                   roundtrip_length=0.4, input_transmittance=5e-4):
        """Build a cavity from quoted power figures (T_out, L, l, T_in)."""
        T_in, T_out, L = input_transmittance, output_transmittance, intracavity_loss
        for name, v in (("input_transmittance", T_in),
                        ("output_transmittance", T_out)):
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if not 0 <= L < 1:
            raise ValueError(f"intracavity_loss must lie in [0, 1), got {L}")
        rho1 = np.exp(-(T_in + L) / 2)
        tau1 = np.sqrt(-np.expm1(-T_in))
        rho2 = np.exp(-T_out / 2)
        tau2 = np.sqrt(-np.expm1(-T_out))
        return cls(float(rho1), float(rho2), float(tau1), float(tau2),
                   float(roundtrip_length), float(L), float(T_out))

    def validate(self):
        for name in ("rho1", "rho2", "tau1", "tau2"):
            v = getattr(self, name)
            if not (np.isfinite(v) and 0 < v < 1):
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        for i, (rho, tau) in enumerate(((self.rho1, self.tau1),
                                        (self.rho2, self.tau2)), start=1):
            if rho**2 + tau**2 > 1 + 1e-12:
                raise ValueError(f"mirror {i}: rho^2 + tau^2 = {rho**2 + tau**2} > 1")
        if not (np.isfinite(self.roundtrip_length) and self.roundtrip_length > 0):
            raise ValueError("roundtrip_length must be positive")
        if not 0 <= self.intracavity_loss < 1:
            raise ValueError("intracavity_loss must lie in [0, 1)")
        if not 0 < self.output_transmittance < 1:
            raise ValueError("output_transmittance must lie in (0, 1)")

    @property
    def rt_amplitude(self):
        """Round-trip field attenuation rho1*rho2."""
        return self.rho1 * self.rho2

    @property
    def fsr(self):
        """Free spectral range in Hz."""
        return C / self.roundtrip_length

    @property
    def finesse(self):
        r = self.rt_amplitude
        return np.pi * np.sqrt(r) / (1 - r)

    def as_dict(self):
        return {
            "rho1": self.rho1, "rho2": self.rho2,
            "tau1": self.tau1, "tau2": self.tau2,
            "roundtrip_length": self.roundtrip_length,
            "intracavity_loss": self.intracavity_loss,
            "output_transmittance": self.output_transmittance,
        }


DEFAULT_CAVITY = CavityParams.from_power()


def _check_finite(f):
    f = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(f)):
        raise ValueError("frequency must be finite")
    return f


def _scalar_or_array(x, like):
    return float(x) if np.ndim(like) == 0 else x


def _roundtrip_phase(f, cavity):
    return 2 * np.pi * f * cavity.roundtrip_length / C


def transmission_phase(f, cavity=DEFAULT_CAVITY):
    """Phase (rad, principal value) of the field transmitted through the cavity
    at offset ``f`` (Hz) from resonance.

    The propagation factor in the numerator is referenced to one round trip,
    which makes the result periodic with the free spectral range.
    """
    f = _check_finite(f)
    phi = _roundtrip_phase(f, cavity)
    t = (cavity.tau1 * cavity.tau2 * np.exp(1j * phi)
         / (1 - cavity.rt_amplitude * np.exp(1j * phi)))
    out = np.angle(t)
    # keep the principal interval (-pi, pi]
    out = np.where(out <= -np.pi, out + 2 * np.pi, out)
    return _scalar_or_array(out, f)


def airy_buildup(f, cavity=DEFAULT_CAVITY):
    """Intracavity power at offset ``f`` normalized to the on-resonance value."""
    f = _check_finite(f)
    r = cavity.rt_amplitude
    phi = _roundtrip_phase(f, cavity)
    out = (1 - r) ** 2 / np.abs(1 - r * np.exp(1j * phi)) ** 2
    return _scalar_or_array(out, f)


def decay_rate(cavity=DEFAULT_CAVITY):
    """gamma = c (T + L) / l in rad/s."""
    return C * (cavity.output_transmittance + cavity.intracavity_loss) / cavity.roundtrip_length


def normalized_frequency(f, cavity=DEFAULT_CAVITY):
    """kappa = 2 pi f / gamma."""
    f = _check_finite(f)
    return _scalar_or_array(2 * np.pi * f / decay_rate(cavity), f)


def fwhm(cavity=DEFAULT_CAVITY):
    """Exact full width at half maximum (Hz) of :func:`airy_buildup`."""
    r = cavity.rt_amplitude
    # |1 - r e^{i phi}|^2 = 2 (1 - r)^2  ->  cos(phi) = 1 - (1 - r)^2 / (2 r)
    phi_half = np.arccos(1 - (1 - r) ** 2 / (2 * r))
    return 2 * phi_half / (2 * np.pi) * cavity.fsr


def unwrap_phase(phase):
    """Remove 2 pi jumps from a phase curve sampled on an ordered grid."""
    return np.unwrap(np.asarray(phase, dtype=float))
