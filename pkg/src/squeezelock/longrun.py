"""Long-run operation: pump power noise, Mach-Zehnder power stabilizer,
lock-loss/reacquisition state machine, spectrogram and duty-cycle statistics.
"""

from __future__ import annotations

import enum
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cavity import normalized_frequency
from .control import _chain
from .opo import to_decibel

log = logging.getLogger(__name__)

HOUR = 3600.0


@dataclass(frozen=True)
class NoiseProcess:
    """Fractional pump power fluctuation: Ornstein-Uhlenbeck plus linear drift.

    ``drift_rate`` is a fraction per hour.
    """

    relative_sigma: float = 0.015
    correlation_time: float = 300.0
    drift_rate: float = 0.002
    seed: int = 0

    def __post_init__(self):
        if self.relative_sigma < 0:
            raise ValueError("relative_sigma must be non-negative")
        if not self.correlation_time > 0:
            raise ValueError("correlation_time must be positive")


@dataclass
class NoiseState:
    value: float
    t: float
    rng: np.random.Generator


def init_noise(process, rng=None):
    """Start the OU process in its stationary distribution."""
    if rng is None:
        rng = np.random.default_rng(process.seed)
    return NoiseState(process.relative_sigma * rng.standard_normal(), 0.0, rng)


def _ou_coeffs(process, dt):
    a = np.exp(-dt / process.correlation_time)
    b = process.relative_sigma * np.sqrt(-np.expm1(-2 * dt / process.correlation_time))
    return a, b


def noise_step(process, state, dt):
    """Advance ``state`` by ``dt`` and return the fractional pump deviation."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    a, b = _ou_coeffs(process, dt)
    state.value = a * state.value + b * state.rng.standard_normal()
    state.t += dt
    return state.value + process.drift_rate * state.t / HOUR


def noise_series(process, n, dt, rng=None):
    """``n`` consecutive :func:`noise_step` outputs from a fresh state."""
    state = init_noise(process, rng)
    a, b = _ou_coeffs(process, dt)
    xi = state.rng.standard_normal(n)
    ou = np.empty(n)
    v = state.value
    for i in range(n):
        v = a * v + b * xi[i]
        ou[i] = v
    t = dt * np.arange(1, n + 1)
    return ou + process.drift_rate * t / HOUR


@dataclass(frozen=True)
class StabilizerLoop:
    unity_gain_frequency: float = 1e3
    enabled: bool = True
    actuator_range: float = 0.5

    def __post_init__(self):
        if not self.unity_gain_frequency > 0:
            raise ValueError("unity_gain_frequency must be positive")
        if not self.actuator_range > 0:
            raise ValueError("actuator_range must be positive")


def loop_suppression(f, loop):
    """|1 / (1 + G)| for an integrator with |G(f)| = f_UG / f."""
    f = np.abs(np.asarray(f, dtype=float))
    if not loop.enabled:
        return np.ones_like(f)
    return f / (f + loop.unity_gain_frequency)


def loop_residual(deviation, dt, loop):
    """Apply the stabilizer to one block of deviation samples.

    Returns ``(residual, saturated)`` where ``saturated`` flags samples whose
    requested correction exceeded the actuator range; those corrections are
    clipped.
    """
    x = np.asarray(deviation, dtype=float)
    if not loop.enabled or x.size == 0:
        return x.copy(), np.zeros(x.shape, dtype=bool)
    spec = np.fft.rfft(x)
    f = np.fft.rfftfreq(x.size, dt)
    residual = np.fft.irfft(spec * loop_suppression(f, loop), n=x.size)
    correction = x - residual
    saturated = np.abs(correction) > loop.actuator_range
    if np.any(saturated):
        correction = np.clip(correction, -loop.actuator_range, loop.actuator_range)
        residual = x - correction
    return residual, saturated


class LockState(str, enum.Enum):
    LOCKED = "locked"
    UNLOCKED = "unlocked"
    ACQUIRING = "acquiring"


@dataclass
class LockStateMachine:
    """Lock losses arrive as a Poisson process (``lockloss_rate`` per hour);
    each one keeps the shutter closed for ``reacquisition_time`` seconds."""

    lockloss_rate: float = 8 / 20
    reacquisition_time: float = 15.0
    state: LockState = LockState.LOCKED
    remaining: float = 0.0
    n_locklosses: int = 0

    def __post_init__(self):
        if self.lockloss_rate < 0:
            raise ValueError("lockloss_rate must be non-negative")
        if self.reacquisition_time < 0:
            raise ValueError("reacquisition_time must be non-negative")
        self.state = LockState(self.state)


def lock_step(machine, dt, rng, saturation=False):
    """Advance the lock machine over one interval of length ``dt``.

    Returns the state that holds during the interval.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if machine.state is LockState.LOCKED:
        p_loss = -np.expm1(-machine.lockloss_rate / HOUR * dt)
        hit = rng.random() < p_loss
        if not (hit or saturation):
            return LockState.LOCKED
        machine.state = LockState.UNLOCKED
        machine.n_locklosses += 1
        machine.remaining = machine.reacquisition_time
    if machine.state is LockState.UNLOCKED:
        machine.state = LockState.ACQUIRING
    machine.remaining -= dt
    if machine.remaining <= 1e-9 * dt:
        machine.state = LockState.LOCKED
    return LockState.ACQUIRING


@dataclass
class Spectrogram:
    times: np.ndarray  # bin start, s
    frequencies: np.ndarray  # Hz
    values: np.ndarray  # dB, shape (len(times), len(frequencies))
    bin_duration: float = 900.0
    fft_segment: float = 60.0
    pickup_lines: list = field(default_factory=list)


@dataclass
class RunStats:
    duty_cycle: float
    n_locklosses: int
    longest_lock: float
    mean_squeezing_db: float

    def as_dict(self):
        return {"duty_cycle": self.duty_cycle, "n_locklosses": self.n_locklosses,
                "longest_lock": self.longest_lock,
                "mean_squeezing_db": self.mean_squeezing_db}


@dataclass
class RunResult:
    spectrogram: Spectrogram
    stats: RunStats
    times: np.ndarray
    raw_deviation: np.ndarray
    residual_deviation: np.ndarray
    squeezing_db: np.ndarray  # emitted level per sample
    locked: np.ndarray
    events: list  # (time s, event name)


def frequency_grid(spec_cfg):
    grid = np.geomspace(spec_cfg.f_min, spec_cfg.f_max, spec_cfg.n_freq)
    extra = [f for f, _ in spec_cfg.pickup_lines if spec_cfg.f_min <= f <= spec_cfg.f_max]
    return np.unique(np.concatenate([grid, extra]))


def _longest_run(mask):
    if not mask.any():
        return 0
    padded = np.concatenate([[0], mask.astype(np.int8), [0]])
    edges = np.flatnonzero(np.diff(padded))
    return int(np.max(edges[1::2] - edges[::2]))


def run(config):
    """Simulate ``config.duration`` seconds of stabilized operation."""
    dt = config.dt
    n = int(round(config.duration / dt))
    spec_cfg = config.spectrogram
    grid = frequency_grid(spec_cfg)
    opo = config.opo_params
    ss = np.random.SeedSequence(config.noise.seed)
    noise_rng, lock_rng = (np.random.default_rng(s) for s in ss.spawn(2))

    if n == 0:
        log.warning("zero-length run: empty spectrogram, duty cycle reported as 1")
        empty = Spectrogram(np.empty(0), grid, np.empty((0, grid.size)),
                            spec_cfg.bin_duration, spec_cfg.fft_segment,
                            list(spec_cfg.pickup_lines))
        return RunResult(empty, RunStats(1.0, 0, 0.0, 0.0), np.empty(0), np.empty(0),
                         np.empty(0), np.empty(0), np.empty(0, dtype=bool), [])

    times = dt * np.arange(n)
    raw = noise_series(config.noise, n, dt, noise_rng)

    block = max(1, int(round(config.loop_block / dt)))
    residual = np.empty(n)
    saturated = np.zeros(n, dtype=bool)
    for start in range(0, n, block):
        sl = slice(start, start + block)
        residual[sl], saturated[sl] = loop_residual(raw[sl], dt, config.loop)

    set_point = config.thermal.set_point_power
    pump = set_point * (1 + residual)
    mode = config.control.readout_mode
    _, vs, _, _, lost = _chain(pump, mode, opo, config.cavity, config.thermal,
                               config.control, strict=False)
    trigger = saturated | lost

    machine = LockStateMachine(config.lock.lockloss_rate, config.lock.reacquisition_time)
    locked = np.empty(n, dtype=bool)
    events = []
    prev = True
    for i in range(n):
        st = lock_step(machine, dt, lock_rng, bool(trigger[i]))
        locked[i] = st is LockState.LOCKED
        if prev and not locked[i]:
            events.append((float(times[i]), "saturation" if trigger[i] else "lockloss"))
        elif locked[i] and not prev:
            events.append((float(times[i]), "relock"))
        prev = locked[i]

    level = np.where(locked, to_decibel(vs), 0.0)

    # Each spectrogram bin is estimated from the first fft_segment seconds.
    kappa = np.atleast_1d(normalized_frequency(grid, config.cavity))[None, :]
    seg = max(1, int(round(spec_cfg.fft_segment / dt)))
    bins = max(1, int(round(spec_cfg.bin_duration / dt)))
    starts = np.arange(0, n - seg + 1, bins) if n >= seg else np.empty(0, dtype=int)
    values = np.empty((starts.size, grid.size))
    for k, s0 in enumerate(starts):
        sl = slice(s0, s0 + seg)
        _, v, _, _, _ = _chain(pump[sl, None], mode, opo, config.cavity,
                               config.thermal, config.control, kappa, strict=False)
        v = np.where(locked[sl, None], v, 1.0)
        values[k] = to_decibel(v.mean(axis=0))
    for f_line, cap_db in spec_cfg.pickup_lines:
        near = np.abs(grid - f_line) <= spec_cfg.pickup_halfwidth
        values[:, near] = np.maximum(values[:, near], cap_db)

    spectrogram = Spectrogram(times[starts], grid, values, spec_cfg.bin_duration,
                              spec_cfg.fft_segment, list(spec_cfg.pickup_lines))
    stats = RunStats(
        duty_cycle=float(locked.sum()) / n,
        n_locklosses=machine.n_locklosses,
        longest_lock=_longest_run(locked) * dt,
        mean_squeezing_db=float(level.mean()),
    )
    return RunResult(spectrogram, stats, times, raw, residual, level, locked, events)


def _run_stats(config):
    return run(config).stats


def run_seeds(config, seeds, max_workers=None):
    """Run ``config`` once per seed; results come back in seed order."""
    configs = [config.with_seed(s) for s in seeds]
    if max_workers == 1:
        return [_run_stats(c) for c in configs]
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(_run_stats, configs))
