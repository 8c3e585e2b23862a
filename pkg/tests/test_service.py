"""Tests for the HTTP service endpoints."""

import asyncio

import httpx
import pytest

from subnyq.service import create_app


class SyncAsgiClient:
    """Synchronous facade over the ASGI app (the transport is async-only)."""

    def __init__(self, app):
        self._app = app

    def _request(self, method: str, url: str, **kw) -> httpx.Response:
        async def go():
            transport = httpx.ASGITransport(app=self._app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://test"
            ) as client:
                return await client.request(method, url, **kw)

        return asyncio.run(go())

    def get(self, url: str, **kw) -> httpx.Response:
        return self._request("GET", url, **kw)

    def post(self, url: str, **kw) -> httpx.Response:
        return self._request("POST", url, **kw)


@pytest.fixture(scope="module")
def client():
    yield SyncAsgiClient(create_app())


RD_CONFIG = {
    "scenario": "rd",
    "model": {"tone_grid_size": 64, "active_count": 3},
    "sampler": {"rate": 16},
    "trials": 3,
    "seed": 1,
}


class TestHealth:
    def test_ok(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok"}


class TestSimulate:
    def test_small_run(self, client):
        resp = client.post("/simulate", json=RD_CONFIG)
        assert resp.status_code == 200
        body = resp.json()
        assert body["summary"]["trials"] == 3
        assert body["summary"]["success_rate"] == 1.0
        header = body["trials_csv"].splitlines()[0]
        assert header == "trial,support_exact,support_jaccard,nmse,failure"
        assert len(body["trials_csv"].splitlines()) == 4

    def test_deterministic_across_calls(self, client):
        a = client.post("/simulate", json=RD_CONFIG).json()
        b = client.post("/simulate", json=RD_CONFIG).json()
        assert a["trials_csv"] == b["trials_csv"]

    def test_schema_violation_reports_field_path(self, client):
        bad = {**RD_CONFIG, "model": {"tone_grid_size": 64, "bogus": 2}}
        resp = client.post("/simulate", json=bad)
        assert resp.status_code == 422
        locs = [err["loc"] for err in resp.json()["detail"]]
        assert any("bogus" in loc for loc in locs)

    def test_report_scenarios_redirected(self, client):
        resp = client.post("/simulate", json={"scenario": "bounds"})
        assert resp.status_code == 400
        assert "endpoint" in resp.json()["detail"]

    def test_infeasible_instance_reported_as_trial_failures(self, client):
        # bands fill the range so tightly that the margin-respecting carrier
        # draw cannot place them: the run completes with tagged failure rows
        cfg = {
            "scenario": "mwc",
            "model": {"band_count": 8, "band_width": 2.0, "f_max": 8.0},
            "sampler": {"channels": 4, "chips_per_period": 15, "f_p": 1.0, "snapshots": 15},
            "trials": 2,
        }
        resp = client.post("/simulate", json=cfg)
        assert resp.status_code == 200
        body = resp.json()
        assert body["summary"]["success_rate"] == 0.0
        assert body["summary"]["failures"] == {"generate": 2}


class TestBounds:
    def test_reference_numbers(self, client):
        cfg = {
            "scenario": "bounds",
            "model": {"band_count": 6, "band_width": 50e6, "f_max": 5e9},
            "sampler": {"channels": 35, "chips_per_period": 195, "f_p": 51e6},
        }
        resp = client.post("/bounds", json=cfg)
        assert resp.status_code == 200
        body = resp.json()
        assert body["landau"] == pytest.approx(300e6)
        assert body["blind"] == pytest.approx(600e6)
        assert body["chosen_sampler_rate"] == pytest.approx(1.785e9)
        assert body["sampler_rate_sufficient"]


class TestDensity:
    def test_rows_and_csv(self, client):
        resp = client.post(
            "/density",
            json={"scenario": "density", "chips": 9, "densities": [1, 10, 100]},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["densities"] == [1, 10, 100]
        assert body["max_errors"][-1] <= 1e-6
        assert body["csv"].splitlines()[0] == "density,max_error"


class TestMismatch:
    def test_rows(self, client):
        resp = client.post("/mismatch", json={"deltas": [0.0, 0.25]})
        assert resp.status_code == 200
        body = resp.json()
        assert body["deltas"] == [0.0, 0.25]
        assert body["nmse"][0] <= 1e-6
        assert body["csv"].splitlines()[0] == "delta,nmse"

    def test_bad_delta_rejected(self, client):
        resp = client.post("/mismatch", json={"deltas": [0.9]})
        assert resp.status_code == 422
