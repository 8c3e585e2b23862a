"""HTTP service exposing the experiment runner.

Endpoints mirror the CLI subcommands: POST ``/simulate`` runs a Monte Carlo
scenario config, POST ``/bounds`` reports the rate bounds, POST ``/density``
runs the quadrature-density convergence sweep and POST ``/mismatch`` the
off-grid tone sweep.  Request bodies are the pydantic config models from
``subnyq.schemas``; schema violations come back as 422 with field paths,
domain errors (infeasible parameter combinations) as 400.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import experiments, schemas


def create_app() -> FastAPI:
    app = FastAPI(
        title="subnyq",
        description="Sub-Nyquist sampling simulation service",
        version="0.1.0",
    )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(cfg: schemas.ExperimentConfig) -> schemas.SimulateResponse:
        if cfg.scenario in ("bounds", "density"):
            raise HTTPException(
                status_code=400,
                detail=f"scenario {cfg.scenario!r} has its own endpoint",
            )
        try:
            outcome = experiments.run_experiment(cfg)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return schemas.SimulateResponse(
            summary=schemas.SummaryPayload(**outcome.summary),
            trials_csv=outcome.csv_text(),
        )

    @app.post("/bounds", response_model=schemas.BoundsResponse)
    def bounds(cfg: schemas.BoundsExperiment) -> schemas.BoundsResponse:
        try:
            report = experiments.bounds_report(cfg.model, cfg.sampler)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return schemas.BoundsResponse(**report.as_dict())

    @app.post("/density", response_model=schemas.DensityResponse)
    def density(cfg: schemas.DensityExperiment) -> schemas.DensityResponse:
        try:
            outcome = experiments.run_experiment(cfg)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return schemas.DensityResponse(
            densities=outcome.summary["densities"],
            max_errors=outcome.summary["max_errors"],
            csv=outcome.csv_text(),
        )

    @app.post("/mismatch", response_model=schemas.MismatchResponse)
    def mismatch(req: schemas.MismatchRequest) -> schemas.MismatchResponse:
        try:
            rows = experiments.mismatch_sweep(req)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        fmt = experiments._FMT
        lines = ["delta,nmse"]
        lines.extend(f"{fmt(d)},{fmt(e)}" for d, e in rows)
        return schemas.MismatchResponse(
            deltas=[d for d, _ in rows],
            nmse=[e for _, e in rows],
            csv="\n".join(lines) + "\n",
        )

    return app


app = create_app()
