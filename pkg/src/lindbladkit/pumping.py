"""Optical pumping of a degenerate multi-level system into a dark ground state.

The default scheme models a pair of three-fold degenerate manifolds: the
drive couples ground levels 2 and 3 to excited levels 5 and 6, level 1 is
dark, and spontaneous-emission channels funnel population into it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import ControlSystem, RateModel, induced_dephasing_floor
from .liouville import build_liouvillian
from .propagation import IntegratorConfig, PulseSpec, Trajectory, evolve
from .states import DensityMatrix


@dataclass(frozen=True)
class LevelScheme:
    """Level labels with driven couplings and spontaneous decay channels.

    Levels are labelled by integers; basis order is ground levels first, then
    excited levels. Couplings are (ground, excited, dipole) driven pairs;
    decays are (excited, ground, rate) spontaneous channels.
    """

    ground: tuple[int, ...]
    excited: tuple[int, ...]
    couplings: tuple[tuple[int, int, float], ...] = ()
    decays: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        ground = tuple(self.ground)
        excited = tuple(self.excited)
        labels = ground + excited
        if len(set(labels)) != len(labels):
            raise ValueError("level labels must be distinct")
        for g, e, dip in self.couplings:
            if g not in ground or e not in excited:
                raise ValueError(f"coupling ({g}, {e}) must pair a ground with an excited level")
            if dip == 0:
                raise ValueError(f"coupling ({g}, {e}) has zero dipole")
        for e, g, rate in self.decays:
            if e not in excited or g not in ground:
                raise ValueError(f"decay ({e}, {g}) must go from an excited to a ground level")
            if not rate > 0:
                raise ValueError(f"decay ({e}, {g}) rate must be positive")
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "excited", excited)
        object.__setattr__(self, "couplings", tuple(self.couplings))
        object.__setattr__(self, "decays", tuple(self.decays))

    @property
    def labels(self) -> tuple[int, ...]:
        return self.ground + self.excited

    @property
    def dim(self) -> int:
        return len(self.ground) + len(self.excited)

    def index(self, label: int) -> int:
        return self.labels.index(label)


def default_scheme(decay_rate: float = 1.0) -> LevelScheme:
    """Six-level scheme: drive couples 2-5 and 3-6; level 1 is dark.

    Decay branches follow Delta m = 0, +-1 selection rules for two J = 1
    manifolds with levels (1, 2, 3) and (4, 5, 6) at m = (-1, 0, +1):
    level 5 decays to 1, 2, 3 in equal parts, level 6 to 2 and 3, and level 4
    (never populated by the default drive) to 1 and 2. ``decay_rate`` is the
    total relaxation rate of each excited level; zero turns decay off.
    """
    couplings = ((2, 5, 1.0), (3, 6, 1.0))
    if decay_rate == 0.0:
        decays = ()
    else:
        g = decay_rate
        decays = (
            (5, 1, g / 3.0),
            (5, 2, g / 3.0),
            (5, 3, g / 3.0),
            (6, 2, g / 2.0),
            (6, 3, g / 2.0),
            (4, 1, g / 2.0),
            (4, 2, g / 2.0),
        )
    return LevelScheme((1, 2, 3), (4, 5, 6), couplings, decays)


def build_pumping_system(
    scheme: LevelScheme, rabi: float, detuning: float = 0.0
) -> tuple[ControlSystem, RateModel]:
    """Rotating-frame system and rate model for a constant-amplitude drive.

    Each driven pair is coupled with strength rabi/2 times its dipole, so a
    unit-dipole pair cycles population at the Rabi rate. The rate model holds
    the decay channels plus the decay-induced dephasing floor.
    """
    n = scheme.dim
    h0 = np.zeros((n, n), dtype=complex)
    for e in scheme.excited:
        h0[scheme.index(e), scheme.index(e)] = -detuning
    drive = np.zeros((n, n), dtype=complex)
    for g, e, dip in scheme.couplings:
        gi, ei = scheme.index(g), scheme.index(e)
        drive[gi, ei] += dip
        drive[ei, gi] += dip
    sys = ControlSystem(h0, (drive,), ("drive",))

    gamma = np.zeros((n, n))
    for e, g, rate in scheme.decays:
        gamma[scheme.index(g), scheme.index(e)] += rate
    model = RateModel(gamma, np.zeros((n, n)))
    big_gamma = induced_dephasing_floor(model)
    model = RateModel(gamma, big_gamma)
    # The drive field is applied at constant value rabi/2 by simulate_pumping.
    return sys, model


def uniform_ground_mixture(scheme: LevelScheme) -> DensityMatrix:
    """Equal statistical mixture of all ground levels."""
    n = scheme.dim
    mat = np.zeros((n, n), dtype=complex)
    for g in scheme.ground:
        mat[scheme.index(g), scheme.index(g)] = 1.0 / len(scheme.ground)
    return DensityMatrix(mat)


def simulate_pumping(
    scheme: LevelScheme,
    rabi: float,
    duration: float,
    rho0: DensityMatrix | None = None,
    dt_out: float | None = None,
    detuning: float = 0.0,
    integ: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """Drive the scheme with a constant resonant field and record the trajectory."""
    sys, model = build_pumping_system(scheme, rabi, detuning)
    liou = build_liouvillian(sys, model)
    if rho0 is None:
        rho0 = uniform_ground_mixture(scheme)
    if dt_out is None:
        dt_out = duration / 400.0
    pulse = PulseSpec("constant", duration, field_index=0, amplitude=rabi, frame="rwa")
    return evolve(liou, [pulse], rho0, duration, dt_out, integ)


def dark_state_check(scheme: LevelScheme) -> tuple[int, ...]:
    """Ground labels the drive never touches; population parked there stays."""
    driven = {g for g, _, _ in scheme.couplings}
    return tuple(g for g in scheme.ground if g not in driven)
