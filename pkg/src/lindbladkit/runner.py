"""Scenario execution: RunConfig in, summary plus CSV artifacts out.

This is the single engine behind both the HTTP service and the CLI. All
outputs are deterministic for a fixed config (the only randomness, in the
check suites, is seeded from the config).
"""

from __future__ import annotations

import math

import numpy as np

from . import csvio
from .config import parse_config_text
from .dynamics import (
    RateModel,
    TwoLevelSystem,
    complete_positivity_defect,
    dissipator_lindblad,
    dissipator_rates,
    rates_to_lindblad,
    standard_two_level,
)
from .errors import ConfigError
from .liouville import build_liouvillian, cancellation_residual, support_disjointness
from .optimize import (
    FreeParameter,
    Objective,
    evaluate_objective,
    minimize_recorded,
    naive_vs_optimized_report,
    apply_parameters,
    prepare_scenario,
    simulate_pulse,
)
from .propagation import (
    IntegratorConfig,
    PulseSpec,
    evolve,
    evolve_fields,
    resolve_amplitude,
)
from .pumping import (
    LevelScheme,
    dark_state_check,
    default_scheme,
    simulate_pumping,
    uniform_ground_mixture,
)
from .schemas import CheckItem, CheckResponse, RunConfig, RunResponse
from .states import DensityMatrix, basis_state, from_statevector, purity_deficit

DEFAULT_SAMPLES = 200


def _integrator(cfg: RunConfig, period: float = 1.0) -> IntegratorConfig:
    p = cfg.integrator
    return IntegratorConfig(
        method=p.method,
        rtol=p.rtol,
        atol=p.atol,
        max_step=p.max_step * period if p.max_step is not None else None,
        trace_tol=p.trace_tol,
        herm_tol=p.herm_tol,
        positivity_tol=p.positivity_tol,
    )


def _two_level(cfg: RunConfig):
    sp = cfg.system
    sys = standard_two_level(TwoLevelSystem(sp.e1, sp.e2, sp.d1, sp.d2))
    rates = cfg.rates.angular(sp.period) if cfg.rates else (0.0, 0.0, 0.0)
    model = RateModel.two_level(*rates)
    return sys, model


def _pulse_spec(cfg: RunConfig, raw_carrier_default: float) -> PulseSpec:
    p = cfg.pulse
    period = cfg.system.period
    if p.field > 2:
        raise ConfigError(f"pulse.field must be 1 or 2 for the two-level system, got {p.field}")
    carrier = p.carrier if p.carrier is not None else raw_carrier_default
    return PulseSpec(
        shape=p.shape,
        duration=p.duration * period,
        field_index=p.field - 1,
        carrier_frequency=carrier,
        amplitude=p.amplitude,
        effective_area=p.area,
        center=p.center * period if p.center is not None else None,
        width=p.width * period if p.width is not None else None,
        frame=p.frame,
    )


def _initial_state(cfg: RunConfig, dim: int) -> DensityMatrix:
    if cfg.initial is None:
        return basis_state(dim, 0)
    try:
        return cfg.initial.build(dim)
    except ValueError as err:
        raise ConfigError(f"initial: {err}") from err


def _summary_state(rho: DensityMatrix) -> dict:
    p2 = 1.0 - purity_deficit(rho)
    return {
        "final_purity": p2,
        "final_purity_deficit": purity_deficit(rho),
        "final_renyi_entropy": -math.log(min(max(p2, np.finfo(float).tiny), 1.0)),
        "final_populations": [float(x) for x in rho.populations()],
    }


def _prefix(cfg: RunConfig) -> str:
    return cfg.output.prefix or cfg.scenario


def run_simulate(cfg: RunConfig) -> RunResponse:
    sys, model = _two_level(cfg)
    period = cfg.system.period
    pulse = _pulse_spec(cfg, raw_carrier_default=cfg.system.omega)
    integ = _integrator(cfg, period)
    rho0 = _initial_state(cfg, 2)
    t_final = pulse.duration
    dt_out = (cfg.output.dt_out or pulse.duration / period / DEFAULT_SAMPLES) * period
    traj = simulate_pulse(sys, model, rho0, pulse, t_final, dt_out, integ)
    summary = {"final_time_periods": traj.final_time / period, **_summary_state(traj.final_state)}
    files = {f"{_prefix(cfg)}_trajectory.csv": csvio.trajectory_csv(traj, integ, time_unit=period)}
    return RunResponse(scenario="simulate", summary=summary, files=files)


def _target_state(values: list[float], dim: int) -> DensityMatrix:
    pairs = np.asarray(values, dtype=float)
    if pairs.size != 2 * dim * dim:
        raise ConfigError(f"optimize.target needs {2 * dim * dim} numbers (re, im pairs)")
    z = pairs[0::2] + 1j * pairs[1::2]
    return DensityMatrix(z.reshape(dim, dim))


def run_optimize(cfg: RunConfig) -> RunResponse:
    sys, model = _two_level(cfg)
    period = cfg.system.period
    template = _pulse_spec(cfg, raw_carrier_default=cfg.system.omega)
    integ = _integrator(cfg, period)
    rho0 = _initial_state(cfg, 2)
    op = cfg.optimize

    free = []
    horizon = template.duration
    for spec in op.free:
        scale = period if spec.name == "duration" else 1.0
        free.append(FreeParameter(spec.name, spec.lower * scale, spec.upper * scale))
        if spec.name == "duration":
            horizon = max(horizon, spec.upper * period)
    target = _target_state(op.target, 2) if op.target is not None else None
    obj = Objective(op.objective, horizon=horizon, target=target, level=op.target_level - 1)

    liou = prepare_scenario(sys, model, template)
    dipole = float(np.max(np.abs(sys.controls[template.field_index])))
    dt_out = (cfg.output.dt_out or horizon / period / DEFAULT_SAMPLES) * period

    def run_params(params: dict[str, float]):
        pulse = resolve_amplitude(apply_parameters(template, params), dipole)
        return evolve(liou, [pulse], rho0, horizon, dt_out, integ)

    result = minimize_recorded(lambda p: evaluate_objective(obj, run_params(p)), free, op.budget)

    best_traj = run_params(result.best_params)
    summary = {
        "best_params": {k: float(v) for k, v in result.best_params.items()},
        "best_value": result.best_value,
        "evaluations": result.evaluations,
        "budget_exhausted": result.budget_exhausted,
        **_summary_state(best_traj.final_state),
    }
    if "area" in result.best_params:
        summary["best_area_pi"] = result.best_params["area"] / math.pi

        def deficit_of_area(area: float) -> float:
            traj = run_params({**result.best_params, "area": area})
            return traj.purity_deficits[-1]

        report = naive_vs_optimized_report(deficit_of_area, result, naive_area=op.naive_area)
        summary["naive_area"] = report.naive_area
        summary["naive_purity_deficit"] = report.naive_deficit
        summary["optimized_purity_deficit"] = report.optimized_deficit

    prefix = _prefix(cfg)
    files = {
        f"{prefix}_history.csv": csvio.history_csv(result),
        f"{prefix}_optimum_trajectory.csv": csvio.trajectory_csv(best_traj, integ, time_unit=period),
        f"{prefix}_summary.csv": csvio.summary_csv(summary),
    }
    return RunResponse(scenario="optimize", summary=summary, files=files)


def _parse_triples(raw: list[str], what: str, value_type=float):
    triples = []
    for item in raw:
        parts = item.split(":")
        if len(parts) != 3:
            raise ConfigError(f"scheme.{what}: expected 'a:b:value', got {item!r}")
        try:
            triples.append((int(parts[0]), int(parts[1]), value_type(parts[2])))
        except ValueError as err:
            raise ConfigError(f"scheme.{what}: {err}") from err
    return tuple(triples)


def _scheme(cfg: RunConfig) -> LevelScheme:
    sp = cfg.scheme
    if sp is None or sp.preset == "default":
        return default_scheme(sp.decay_rate if sp else 1.0)
    try:
        return LevelScheme(
            ground=tuple(sp.ground),
            excited=tuple(sp.excited),
            couplings=_parse_triples(sp.couplings or [], "couplings"),
            decays=_parse_triples(sp.decays or [], "decays"),
        )
    except ValueError as err:
        raise ConfigError(f"scheme: {err}") from err


def run_pump(cfg: RunConfig) -> RunResponse:
    scheme = _scheme(cfg)
    drive = cfg.drive
    integ = _integrator(cfg)
    rho0 = cfg.initial.build(scheme.dim) if cfg.initial else uniform_ground_mixture(scheme)
    dt_out = cfg.output.dt_out or drive.duration / 400.0
    traj = simulate_pumping(
        scheme, drive.rabi, drive.duration, rho0=rho0, dt_out=dt_out,
        detuning=drive.detuning, integ=integ,
    )
    dark = dark_state_check(scheme)
    summary = {
        "dark_states": list(dark),
        "final_time": traj.final_time,
        **_summary_state(traj.final_state),
    }
    if dark:
        summary["final_dark_population"] = float(
            sum(traj.final_state.population(scheme.index(lab)) for lab in dark)
        )
    files = {
        f"{_prefix(cfg)}_populations.csv": csvio.populations_csv(
            traj, integ, scheme.labels, time_unit=1.0
        )
    }
    return RunResponse(scenario="pump", summary=summary, files=files)


def _random_cp_model(rng: np.random.Generator, scale: float) -> RateModel:
    g12, g21 = rng.uniform(0.0, scale, size=2)
    dephasing = 0.5 * (g12 + g21) + rng.uniform(0.0, scale)
    return RateModel.two_level(g12, g21, dephasing)


def _random_state(rng: np.random.Generator, dim: int = 2) -> DensityMatrix:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return DensityMatrix(rho / np.trace(rho))


def _expected_two_level_superops(omega: float, d1: float, d2: float, model: RateModel):
    """The four displayed 4x4 superoperator matrices, written out literally."""
    g21, g12 = model.gamma[1, 0], model.gamma[0, 1]
    big_g = model.big_gamma[0, 1]
    l0 = omega * np.diag([0.0, -1.0, 1.0, 0.0]).astype(complex)
    ld = np.array(
        [
            [-g21, 0.0, 0.0, g12],
            [0.0, -big_g, 0.0, 0.0],
            [0.0, 0.0, -big_g, 0.0],
            [g21, 0.0, 0.0, -g12],
        ],
        dtype=complex,
    )
    l1 = d1 * np.array(
        [
            [0.0, -1.0, 1.0, 0.0],
            [-1.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, -1.0],
            [0.0, 1.0, -1.0, 0.0],
        ],
        dtype=complex,
    )
    l2 = d2 * np.array(
        [
            [0.0, -1.0j, -1.0j, 0.0],
            [1.0j, 0.0, 0.0, -1.0j],
            [1.0j, 0.0, 0.0, -1.0j],
            [0.0, 1.0j, 1.0j, 0.0],
        ],
        dtype=complex,
    )
    return l0, l1, l2, ld


CHECK_INTEGRATOR = IntegratorConfig(rtol=1e-11, atol=1e-13)


def run_check(cfg: RunConfig | None = None) -> CheckResponse:
    """Built-in verification suites with measured defects.

    The conservation runs use pinned tight integrator settings; the point is
    to verify the physics invariants, not the user's numerics.
    """
    if cfg is not None and cfg.system is not None:
        sp = cfg.system
        sys = standard_two_level(TwoLevelSystem(sp.e1, sp.e2, sp.d1, sp.d2))
        omega, d1, d2 = sp.omega, sp.d1, sp.d2
        period = sp.period
        rates = cfg.rates.angular(period) if cfg.rates else (0.1, 0.05, 0.2)
    else:
        sys = standard_two_level(TwoLevelSystem(0.0, 1.0, 1.0, 1.0))
        omega, d1, d2 = 1.0, 1.0, 1.0
        period = 2.0 * math.pi
        rates = (0.1, 0.05, 0.2)
    model = RateModel.two_level(*rates)
    seed = cfg.seed if cfg is not None else 0
    rng = np.random.default_rng(seed)
    checks: list[CheckItem] = []

    # Rate-model vs Lindblad-operator dissipators on random CP-valid models.
    worst = 0.0
    for _ in range(DEFAULT_SAMPLES):
        m = _random_cp_model(rng, scale=1.0)
        rho = _random_state(rng)
        diff = dissipator_rates(m, rho) - dissipator_lindblad(rates_to_lindblad(m), rho)
        worst = max(worst, float(np.max(np.abs(diff))))
    checks.append(
        CheckItem(
            name="lindblad_equivalence",
            passed=worst < 1e-12,
            measured=worst,
            threshold=1e-12,
            detail=f"{DEFAULT_SAMPLES} random rate models and states",
        )
    )

    # Superoperator structure against the displayed two-level matrices.
    liou = build_liouvillian(sys, model)
    l0e, l1e, l2e, lde = _expected_two_level_superops(omega, d1, d2, model)
    defect = max(
        float(np.max(np.abs(a - b)))
        for a, b in ((liou.l0, l0e), (liou.controls[0], l1e), (liou.controls[1], l2e), (liou.ld, lde))
    )
    checks.append(
        CheckItem(
            name="superoperator_structure",
            passed=defect <= 1e-15 * max(1.0, omega),
            measured=defect,
            threshold=1e-15 * max(1.0, omega),
            detail="entrywise match of L0, L1, L2, LD",
        )
    )

    report = support_disjointness(liou)
    checks.append(
        CheckItem(
            name="support_disjointness",
            passed=report.disjoint,
            measured=float(len(report.overlapping_entries)),
            threshold=0.0,
            detail="control vs dissipative superoperator supports",
        )
    )

    cp_defect = complete_positivity_defect(model)
    checks.append(
        CheckItem(
            name="complete_positivity",
            passed=cp_defect <= 1e-12,
            measured=cp_defect,
            threshold=1e-12,
            detail="dephasing above the decay-induced floor",
        )
    )

    big_g = float(model.big_gamma[0, 1])
    if big_g > 0:
        rho2 = from_statevector([2**-0.5, 2**-0.5])
        residual = cancellation_residual(liou, rho2)
        checks.append(
            CheckItem(
                name="cancellation_residual",
                passed=bool(residual > 0.1 * big_g),
                measured=residual,
                threshold=0.1 * big_g,
                detail="least-squares field cancellation on the equal superposition",
            )
        )

    # Conservation suite on random open evolutions, T = 20 periods.
    t_final = 20.0 * period
    worst_trace = worst_herm = worst_neg = 0.0
    for _ in range(10):
        m = _random_cp_model(rng, scale=0.3 / period)
        liou_m = build_liouvillian(sys, m)
        fields = rng.uniform(-0.2, 0.2, size=2)
        rho0 = _random_state(rng)
        traj = evolve_fields(
            liou_m, lambda t, f=fields: f, rho0, t_final, t_final / 40, CHECK_INTEGRATOR
        )
        for s in traj.states:
            worst_trace = max(worst_trace, abs(float(np.trace(s.entries).real) - 1.0))
            worst_herm = max(worst_herm, float(np.max(np.abs(s.entries - s.entries.conj().T))))
            low = float(np.linalg.eigvalsh(0.5 * (s.entries + s.entries.conj().T))[0])
            worst_neg = max(worst_neg, max(0.0, -low))
    checks.append(
        CheckItem(name="conservation_trace", passed=worst_trace < 1e-8, measured=worst_trace, threshold=1e-8)
    )
    checks.append(
        CheckItem(name="conservation_hermiticity", passed=worst_herm < 1e-9, measured=worst_herm, threshold=1e-9)
    )
    checks.append(
        CheckItem(name="conservation_positivity", passed=worst_neg <= 1e-7, measured=worst_neg, threshold=1e-7)
    )

    # Closed-system purity conservation under a random constant drive.
    liou_closed = build_liouvillian(sys, RateModel.zeros(2))
    fields = rng.uniform(-0.2, 0.2, size=2)
    rho0 = _random_state(rng)
    traj = evolve_fields(
        liou_closed, lambda t: fields, rho0, t_final, t_final / 40, CHECK_INTEGRATOR
    )
    drift = float(np.max(np.abs(traj.purity_deficits - traj.purity_deficits[0])))
    checks.append(
        CheckItem(name="closed_purity_conservation", passed=drift < 1e-8, measured=drift, threshold=1e-8)
    )

    files = {
        "superop_l0.csv": csvio.matrix_csv(liou.l0, "L0"),
        "superop_l1.csv": csvio.matrix_csv(liou.controls[0], "L1"),
        "superop_l2.csv": csvio.matrix_csv(liou.controls[1], "L2"),
        "superop_ld.csv": csvio.matrix_csv(liou.ld, "LD"),
    }
    return CheckResponse(passed=all(c.passed for c in checks), checks=checks, files=files)


def execute(cfg: RunConfig):
    """Dispatch a RunConfig to its scenario runner."""
    if cfg.scenario == "simulate":
        return run_simulate(cfg)
    if cfg.scenario == "optimize":
        return run_optimize(cfg)
    if cfg.scenario == "pump":
        return run_pump(cfg)
    return run_check(cfg)


def execute_text(text: str, source: str = "<config>"):
    return execute(parse_config_text(text, source))
