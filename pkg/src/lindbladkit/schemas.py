"""Pydantic models for run configurations and service responses.

A RunConfig is the single declarative description of a run. It arrives either
as JSON on the service endpoints or parsed from a flat key-value config file
(see the config module); both validate through the same models.

Unit conventions: two-level scenarios express times in vibrational periods
(2 pi / omega) and rates either in angular units or per period; the pumping
scenario uses raw model units throughout.
"""

from __future__ import annotations

import math
from typing import Literal

import numpy as np
from pydantic import ConfigDict, Field, model_validator
from pydantic import BaseModel as PydanticModel

from .states import DensityMatrix


class BaseModel(PydanticModel):
    """Shared base: unknown fields are rejected so config typos fail loudly."""

    model_config = ConfigDict(extra="forbid")


class TwoLevelParams(BaseModel):
    e1: float = 0.0
    e2: float = 1.0
    d1: float = 1.0
    d2: float = 1.0

    @model_validator(mode="after")
    def _ordered(self):
        if not self.e1 < self.e2:
            raise ValueError("requires e1 < e2")
        return self

    @property
    def omega(self) -> float:
        return self.e2 - self.e1

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega


class RatesParams(BaseModel):
    """Two-level rates; gamma_12 is decay |2> -> |1>, gamma_21 pumping |1> -> |2>."""

    gamma_12: float = Field(default=0.0, ge=0.0)
    gamma_21: float = Field(default=0.0, ge=0.0)
    dephasing: float = Field(default=0.0, ge=0.0)
    rate_unit: Literal["angular", "per_period"] = "angular"

    def angular(self, period: float) -> tuple[float, float, float]:
        scale = 1.0 / period if self.rate_unit == "per_period" else 1.0
        return self.gamma_12 * scale, self.gamma_21 * scale, self.dephasing * scale


class PulseParams(BaseModel):
    """One shaped pulse; times in vibrational periods, field index 1-based."""

    shape: Literal["constant", "gaussian"] = "gaussian"
    frame: Literal["rwa", "lab"] = "rwa"
    field: int = Field(default=1, ge=1)
    duration: float = Field(gt=0.0, description="pulse length in periods")
    area: float | None = Field(default=None, ge=0.0)
    amplitude: float | None = None
    center: float | None = Field(default=None, description="gaussian center in periods")
    width: float | None = Field(default=None, gt=0.0, description="gaussian sigma in periods")
    carrier: float | None = Field(default=None, description="carrier frequency; defaults to resonance")

    @model_validator(mode="after")
    def _one_strength(self):
        if (self.area is None) == (self.amplitude is None):
            raise ValueError("specify exactly one of area and amplitude")
        return self


class InitialState(BaseModel):
    """Initial state: a basis level, the maximally mixed state, explicit
    statevector amplitudes or density-matrix entries as flat (re, im) pairs."""

    kind: Literal["level", "maximally_mixed", "statevector", "matrix"] = "level"
    level: int = Field(default=1, ge=1)
    values: list[float] | None = None

    def build(self, dim: int) -> DensityMatrix:
        from . import states

        if self.kind == "level":
            if self.level > dim:
                raise ValueError(f"initial level {self.level} exceeds dimension {dim}")
            return states.basis_state(dim, self.level - 1)
        if self.kind == "maximally_mixed":
            return states.maximally_mixed(dim)
        if self.values is None:
            raise ValueError(f"initial state kind {self.kind!r} requires values")
        pairs = np.asarray(self.values, dtype=float)
        if pairs.size % 2 != 0:
            raise ValueError("values must be flat (re, im) pairs")
        z = pairs[0::2] + 1j * pairs[1::2]
        if self.kind == "statevector":
            if z.size != dim:
                raise ValueError(f"statevector needs {dim} amplitudes, got {z.size}")
            return states.from_statevector(z)
        if z.size != dim * dim:
            raise ValueError(f"matrix needs {dim * dim} entries, got {z.size}")
        return DensityMatrix(z.reshape(dim, dim))


class FreeParamSpec(BaseModel):
    name: Literal["area", "duration", "amplitude"]
    lower: float
    upper: float

    @model_validator(mode="after")
    def _feasible(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper) and self.lower < self.upper):
            raise ValueError(f"infeasible bounds for {self.name}")
        return self


class OptimizeParams(BaseModel):
    objective: Literal["max_entropy_final", "target_state_distance", "target_population"] = (
        "max_entropy_final"
    )
    target: list[float] | None = Field(
        default=None, description="target density matrix, flat (re, im) pairs"
    )
    target_level: int = Field(default=1, ge=1)
    free: list[FreeParamSpec]
    budget: int = Field(default=60, ge=1)
    naive_area: float = math.pi / 2.0

    @model_validator(mode="after")
    def _count(self):
        if not 1 <= len(self.free) <= 3:
            raise ValueError("between 1 and 3 free parameters are supported")
        if self.objective == "target_state_distance" and self.target is None:
            raise ValueError("target_state_distance requires a target")
        return self


class SchemeParams(BaseModel):
    """Level scheme, either the built-in default or explicit lists.

    Couplings are "ground:excited:dipole" triples, decays "excited:ground:rate".
    """

    preset: Literal["default", "custom"] = "default"
    decay_rate: float = Field(default=1.0, ge=0.0)
    ground: list[int] | None = None
    excited: list[int] | None = None
    couplings: list[str] | None = None
    decays: list[str] | None = None

    @model_validator(mode="after")
    def _custom_complete(self):
        if self.preset == "custom":
            if not (self.ground and self.excited and self.couplings is not None):
                raise ValueError("custom scheme requires ground, excited and couplings")
        return self


class DriveParams(BaseModel):
    rabi: float = Field(default=1.0, gt=0.0)
    detuning: float = 0.0
    duration: float = Field(gt=0.0)


class IntegratorParams(BaseModel):
    method: Literal["adaptive", "expm"] = "adaptive"
    rtol: float = Field(default=1e-9, gt=0.0)
    atol: float = Field(default=1e-9, gt=0.0)
    max_step: float | None = Field(default=None, gt=0.0, description="in periods for two-level runs")
    trace_tol: float = Field(default=1e-8, gt=0.0)
    herm_tol: float = Field(default=1e-9, gt=0.0)
    positivity_tol: float = Field(default=1e-7, gt=0.0)


class OutputParams(BaseModel):
    directory: str = "."
    prefix: str | None = None
    dt_out: float | None = Field(default=None, gt=0.0, description="sample spacing, periods for two-level")


class RunConfig(BaseModel):
    scenario: Literal["simulate", "optimize", "pump", "check"]
    seed: int = 0
    system: TwoLevelParams | None = None
    rates: RatesParams | None = None
    pulse: PulseParams | None = None
    initial: InitialState | None = None
    optimize: OptimizeParams | None = None
    scheme: SchemeParams | None = None
    drive: DriveParams | None = None
    integrator: IntegratorParams = IntegratorParams()
    output: OutputParams = OutputParams()

    @model_validator(mode="after")
    def _scenario_sections(self):
        need = {
            "simulate": ("system", "pulse"),
            "optimize": ("system", "pulse", "optimize"),
            "pump": ("drive",),
            "check": (),
        }[self.scenario]
        for section in need:
            if getattr(self, section) is None:
                raise ValueError(f"scenario {self.scenario!r} requires a [{section}] section")
        return self


class CheckItem(BaseModel):
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""


class RunResponse(BaseModel):
    scenario: str
    summary: dict
    files: dict[str, str] = Field(default_factory=dict, description="filename -> CSV text")


class CheckResponse(BaseModel):
    passed: bool
    checks: list[CheckItem]
    files: dict[str, str] = Field(default_factory=dict)


class ErrorPayload(BaseModel):
    kind: Literal["config", "physics"]
    message: str
