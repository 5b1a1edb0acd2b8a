"""Time evolution of the dissipative Liouville equation under shaped pulses.

Two independent propagation paths are provided: an adaptive embedded
Runge-Kutta 4(5) integration of d|rho>/dt = G(f(t)) |rho>, and exact matrix
exponentials over piecewise-constant segments. They cross-validate each other
in the test suite.

Pulse-area convention: the "effective area" theta of a resonant pulse is
theta = d * integral A(t) dt, where d is the dipole of the driven control and
A(t) the lab-frame envelope. In the rotating frame the field value is A(t)/2,
which makes an area-pi pulse invert a closed two-level system exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .dynamics import ControlSystem, total_hamiltonian
from .errors import PhysicsError, PositivityError
from .liouville import Liouvillian
from .states import DensityMatrix, purity_deficit, renyi_entropy, validate

PULSE_SHAPES = ("constant", "gaussian")
FRAMES = ("lab", "rwa")


@dataclass(frozen=True)
class PulseSpec:
    """One shaped pulse driving one control field.

    Exactly one of ``amplitude`` (peak envelope value) and ``effective_area``
    must be given. Gaussian pulses default to center = T/2 and width = T/6,
    i.e. support truncated at 3 sigma on both sides.
    """

    shape: str
    duration: float
    field_index: int = 0
    carrier_frequency: float = 0.0
    amplitude: float | None = None
    effective_area: float | None = None
    center: float | None = None
    width: float | None = None
    frame: str = "rwa"

    def __post_init__(self):
        if self.shape not in PULSE_SHAPES:
            raise ValueError(f"unknown pulse shape {self.shape!r}")
        if self.frame not in FRAMES:
            raise ValueError(f"unknown frame {self.frame!r}")
        if not self.duration > 0:
            raise ValueError("pulse duration must be positive")
        if (self.amplitude is None) == (self.effective_area is None):
            raise ValueError("specify exactly one of amplitude and effective_area")
        if self.effective_area is not None and self.effective_area < 0:
            raise ValueError("effective_area must be nonnegative")
        if self.shape == "gaussian":
            if self.center is None:
                object.__setattr__(self, "center", self.duration / 2.0)
            if self.width is None:
                object.__setattr__(self, "width", self.duration / 6.0)
            if not self.width > 0:
                raise ValueError("gaussian width must be positive")


def envelope_integral(pulse: PulseSpec) -> float:
    """Integral over [0, T] of the unit-peak envelope."""
    if pulse.shape == "constant":
        return pulse.duration
    s = pulse.width * math.sqrt(2.0)
    return (
        pulse.width
        * math.sqrt(math.pi / 2.0)
        * (math.erf((pulse.duration - pulse.center) / s) + math.erf(pulse.center / s))
    )


def peak_amplitude(pulse: PulseSpec, dipole: float = 1.0) -> float:
    """Envelope peak A0; derived from the effective area when not set directly."""
    if pulse.amplitude is not None:
        return pulse.amplitude
    return pulse.effective_area / (dipole * envelope_integral(pulse))


def resolve_amplitude(pulse: PulseSpec, dipole: float = 1.0) -> PulseSpec:
    """Fix the envelope amplitude from the effective area for a given dipole."""
    if pulse.amplitude is not None:
        return pulse
    a0 = peak_amplitude(pulse, dipole)
    return replace(pulse, amplitude=a0, effective_area=None)


def _envelope(pulse: PulseSpec, t: float, dipole: float = 1.0) -> float:
    a0 = peak_amplitude(pulse, dipole)
    if pulse.shape == "constant":
        return a0
    return a0 * math.exp(-((t - pulse.center) ** 2) / (2.0 * pulse.width**2))


def sample_pulse(pulse: PulseSpec, t: float) -> float:
    """Field value at time t: A(t) cos(w_c t) in the lab frame, A(t)/2 in the RWA.

    Raises ValueError outside [0, T]. Area-specified pulses are interpreted
    with unit dipole; use resolve_amplitude for other dipole scales.
    """
    if t < 0.0 or t > pulse.duration:
        raise ValueError(f"t = {t!r} outside pulse support [0, {pulse.duration!r}]")
    env = _envelope(pulse, t)
    if pulse.frame == "lab":
        return env * math.cos(pulse.carrier_frequency * t)
    return env / 2.0


def _field_value(pulse: PulseSpec, t: float) -> float:
    if t < 0.0 or t > pulse.duration:
        return 0.0
    return sample_pulse(pulse, t)


def pulse_fields(pulses, num_controls: int):
    """Callable t -> field vector, summing every active pulse per control index."""
    for p in pulses:
        if not 0 <= p.field_index < num_controls:
            raise ValueError(f"pulse drives control {p.field_index}, system has {num_controls}")

    def fields(t: float) -> np.ndarray:
        f = np.zeros(num_controls)
        for p in pulses:
            f[p.field_index] += _field_value(p, t)
        return f

    return fields


@dataclass(frozen=True)
class IntegratorConfig:
    """Numerical settings for evolve.

    method "adaptive" uses embedded Runge-Kutta 4(5); "expm" steps with exact
    matrix exponentials of the generator frozen at substep midpoints (exact
    for piecewise-constant fields). Validation thresholds bound the allowed
    drift of trace, Hermiticity and positivity at every sample time.
    """

    method: str = "adaptive"
    rtol: float = 1e-9
    atol: float = 1e-9
    max_step: float | None = None
    trace_tol: float = 1e-8
    herm_tol: float = 1e-9
    positivity_tol: float = 1e-7

    def __post_init__(self):
        if self.method not in ("adaptive", "expm"):
            raise ValueError(f"unknown integrator method {self.method!r}")


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped states with derived purity/entropy observables."""

    times: np.ndarray
    states: tuple[DensityMatrix, ...]
    purity_deficits: np.ndarray
    renyi_entropies: np.ndarray
    populations: np.ndarray

    @classmethod
    def from_states(cls, times, states) -> "Trajectory":
        times = np.asarray(times, dtype=float)
        if np.any(np.diff(times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        states = tuple(states)
        deficits = np.array([purity_deficit(s) for s in states])
        entropies = np.array([renyi_entropy(s) for s in states])
        pops = np.array([s.populations() for s in states])
        for arr in (times, deficits, entropies, pops):
            arr.setflags(write=False)
        return cls(times, states, deficits, entropies, pops)

    @property
    def final_state(self) -> DensityMatrix:
        return self.states[-1]

    @property
    def final_time(self) -> float:
        return float(self.times[-1])


def _output_times(t_final: float, dt_out: float) -> np.ndarray:
    if not (t_final > 0 and dt_out > 0):
        raise ValueError("t_final and dt_out must be positive")
    n = int(math.floor(t_final / dt_out + 1e-9))
    times = dt_out * np.arange(n + 1)
    if times[-1] < t_final * (1.0 - 1e-12):
        times = np.append(times, t_final)
    else:
        times[-1] = t_final
    return times


def _check_samples(times, mats, integ: IntegratorConfig) -> list[DensityMatrix]:
    states = []
    for t, mat in zip(times, mats):
        rho = DensityMatrix(mat)
        report = validate(rho, tol=1.0)
        if report.trace_defect > integ.trace_tol or report.hermiticity_defect > integ.herm_tol:
            raise PositivityError(
                f"trace/Hermiticity drift beyond tolerance at t = {t:g} "
                f"(trace defect {report.trace_defect:g}, Hermiticity defect {report.hermiticity_defect:g})",
                time=float(t),
            )
        if report.min_eigenvalue < -integ.positivity_tol:
            raise PositivityError(
                f"positivity violation at t = {t:g} (min eigenvalue {report.min_eigenvalue:g})",
                time=float(t),
            )
        states.append(rho)
    return states


def evolve_fields(
    liou: Liouvillian,
    fields,
    rho0: DensityMatrix,
    t_final: float,
    dt_out: float,
    integ: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """Propagate |rho> under G(f(t)) with an arbitrary field callable."""
    if rho0.dim != liou.dim:
        raise ValueError(f"state dim {rho0.dim} != Liouvillian dim {liou.dim}")
    times = _output_times(t_final, dt_out)
    n = liou.dim
    drift = -1j * liou.l0 + liou.ld
    ctrls = tuple(-1j * lm for lm in liou.controls)
    y0 = rho0.entries.reshape(-1).astype(complex)

    if integ.method == "expm":
        mats = [y0.reshape(n, n)]
        y = y0
        for t_prev, t_next in zip(times[:-1], times[1:]):
            span = t_next - t_prev
            substeps = 1 if integ.max_step is None else max(1, int(math.ceil(span / integ.max_step)))
            h = span / substeps
            for k in range(substeps):
                t_mid = t_prev + (k + 0.5) * h
                gen = drift.copy()
                for fm, cm in zip(fields(t_mid), ctrls):
                    gen += fm * cm
                y = expm(gen * h) @ y
            mats.append(y.reshape(n, n))
    else:

        def rhs(t, y):
            out = drift @ y
            for fm, cm in zip(fields(t), ctrls):
                out += fm * (cm @ y)
            return out

        sol = solve_ivp(
            rhs,
            (0.0, float(times[-1])),
            y0,
            method="RK45",
            t_eval=times,
            rtol=integ.rtol,
            atol=integ.atol,
            max_step=integ.max_step or np.inf,
        )
        if not sol.success:
            raise PhysicsError(f"integration failed: {sol.message}")
        mats = [sol.y[:, k].reshape(n, n) for k in range(sol.y.shape[1])]

    states = _check_samples(times, mats, integ)
    return Trajectory.from_states(times, states)


def evolve(
    liou: Liouvillian,
    pulses,
    rho0: DensityMatrix,
    t_final: float,
    dt_out: float,
    integ: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """Propagate under a list of shaped pulses (see PulseSpec).

    The Liouvillian must already be expressed in the frame the pulses assume
    (lab-frame drift for "lab" pulses, rotating-frame drift for "rwa" ones).
    """
    fields = pulse_fields(pulses, liou.num_controls)
    return evolve_fields(liou, fields, rho0, t_final, dt_out, integ)


def evolve_unitary(
    sys: ControlSystem,
    segments,
    rho0: DensityMatrix,
    dt_out: float,
) -> Trajectory:
    """Closed-system evolution rho(t) = U rho0 U† over piecewise-constant fields.

    ``segments`` is a sequence of (duration, field_vector) pairs; each segment
    is propagated with the exact matrix exponential of its Hamiltonian.
    """
    segments = [(float(tau), np.asarray(f, dtype=float)) for tau, f in segments]
    if not segments or any(tau <= 0 for tau, _ in segments):
        raise ValueError("segments must be nonempty with positive durations")
    t_final = sum(tau for tau, _ in segments)
    times = _output_times(t_final, dt_out)
    u = np.eye(sys.dim, dtype=complex)
    mats = []
    seg_idx = 0
    seg_start = 0.0
    t_prev = 0.0
    hams = [total_hamiltonian(sys, f) for _, f in segments]
    for t in times:
        while seg_idx < len(segments) - 1 and t > seg_start + segments[seg_idx][0] + 1e-12:
            step = seg_start + segments[seg_idx][0] - t_prev
            if step > 0:
                u = expm(-1j * hams[seg_idx] * step) @ u
            t_prev = seg_start + segments[seg_idx][0]
            seg_start = t_prev
            seg_idx += 1
        step = t - t_prev
        if step > 0:
            u = expm(-1j * hams[seg_idx] * step) @ u
            t_prev = t
        mats.append(u @ rho0.entries @ u.conj().T)
    states = [DensityMatrix(m) for m in mats]
    return Trajectory.from_states(times, states)


def segment_fields(segments):
    """Step-function field callable matching evolve_unitary's segments."""
    segments = [(float(tau), np.asarray(f, dtype=float)) for tau, f in segments]
    edges = np.cumsum([tau for tau, _ in segments])

    def fields(t: float) -> np.ndarray:
        idx = int(np.searchsorted(edges, t, side="right"))
        idx = min(idx, len(segments) - 1)
        return segments[idx][1]

    return fields


def rotating_frame_two_level(sys: ControlSystem, carrier: float) -> ControlSystem:
    """Two-level system in the frame rotating at the carrier frequency.

    Shifts the upper level by the carrier; on resonance the drift reduces to
    a global phase. The rate-model dissipator is invariant under this frame
    change, so the same RateModel applies.
    """
    if sys.dim != 2:
        raise ValueError("rotating frame helper only supports two-level systems")
    h0 = sys.h0 - carrier * np.diag([0.0, 1.0])
    return ControlSystem(h0, sys.controls, sys.labels)
