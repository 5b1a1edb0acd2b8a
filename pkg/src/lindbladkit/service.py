"""HTTP service exposing the scenario runners.

POST a RunConfig as JSON to /simulate, /optimize, /pump or /check; responses
carry the run summary plus the CSV artifacts as text. Configuration problems
come back as 400 with kind "config", physics failures (complete-positivity
violations, positivity blow-ups) as 400 with kind "physics".
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .errors import ConfigError, PhysicsError
from .runner import run_check, run_optimize, run_pump, run_simulate
from .schemas import CheckResponse, RunConfig, RunResponse

app = FastAPI(title="lindbladkit service", version="0.1.0")


def _guard(fn, cfg):
    try:
        return fn(cfg)
    except ConfigError as err:
        raise HTTPException(status_code=400, detail={"kind": "config", "message": str(err)})
    except PhysicsError as err:
        raise HTTPException(status_code=400, detail={"kind": "physics", "message": str(err)})


def _expect_scenario(cfg: RunConfig, scenario: str):
    if cfg.scenario != scenario:
        raise HTTPException(
            status_code=400,
            detail={"kind": "config", "message": f"config declares scenario {cfg.scenario!r}, endpoint runs {scenario!r}"},
        )


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/simulate", response_model=RunResponse)
def simulate(cfg: RunConfig) -> RunResponse:
    _expect_scenario(cfg, "simulate")
    return _guard(run_simulate, cfg)


@app.post("/optimize", response_model=RunResponse)
def optimize(cfg: RunConfig) -> RunResponse:
    _expect_scenario(cfg, "optimize")
    return _guard(run_optimize, cfg)


@app.post("/pump", response_model=RunResponse)
def pump(cfg: RunConfig) -> RunResponse:
    _expect_scenario(cfg, "pump")
    return _guard(run_pump, cfg)


@app.post("/check", response_model=CheckResponse)
def check(cfg: RunConfig | None = None) -> CheckResponse:
    if cfg is not None:
        _expect_scenario(cfg, "check")
    return _guard(run_check, cfg)
