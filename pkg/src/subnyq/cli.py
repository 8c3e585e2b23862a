"""Command-line workbench, a thin client of the simulation service.

By default every subcommand talks to an in-process instance of the FastAPI
app over an ASGI transport, so no server is needed; ``--server URL`` points
the same client at a remote instance instead.  Responses carry the CSV/JSON
payloads and the CLI writes them locally, which keeps output paths and
determinism on the caller's side.

Exit codes: 0 success, 1 config error, 2 runtime/recovery error, 3 I/O
error.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys

import httpx

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_IO = 3

_SCENARIOS = ("mwc", "pns", "rd", "fri")

_CSV_DOC = """\
output files and CSV columns:
  simulate   trials.csv: trial, support_exact, support_jaccard, nmse, failure
             (support columns: mwc = detected vs true slice set, rd = detected
             vs planted tone set, fri = delays matched within tolerance,
             pns = not applicable, fixed true/1.0; nmse: mwc/pns =
             reconstruction error, rd = coefficient error, fri = amplitude
             error) plus summary.json with the aggregate record.
  bounds     bounds.csv: nyquist, landau, blind, occupancy,
             chosen_sampler_rate, sampler_rate_sufficient.
  density    density.csv: density, max_error.
  mismatch   mismatch.csv: delta, nmse.
Floats are fixed 17-significant-digit scientific notation; identical configs
and seeds reproduce the files byte for byte.
"""


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to the config-error exit code."""

    def error(self, message):  # noqa: D102 - argparse hook
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


class ServiceClient:
    """Small HTTP client; in-process app by default, remote with a URL.

    The in-process path drives the ASGI app through httpx's async transport,
    so the CLI works standalone while speaking the exact service protocol.
    """

    def __init__(self, server: str | None = None):
        self._server = server

    def post(self, endpoint: str, payload: dict) -> dict:
        if self._server:
            with httpx.Client(base_url=self._server, timeout=600.0) as client:
                resp = client.post(endpoint, json=payload)
        else:
            resp = asyncio.run(self._post_in_process(endpoint, payload))
        if resp.status_code in (400, 422):
            raise ConfigError(_describe_error(resp))
        if resp.status_code != 200:
            raise RuntimeFailure(_describe_error(resp))
        return resp.json()

    @staticmethod
    async def _post_in_process(endpoint: str, payload: dict) -> httpx.Response:
        from .service import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://subnyq.local", timeout=600.0
        ) as client:
            return await client.post(endpoint, json=payload)


class ConfigError(Exception):
    pass


class RuntimeFailure(Exception):
    pass


def _describe_error(resp: httpx.Response) -> str:
    try:
        detail = resp.json().get("detail")
    except Exception:
        detail = resp.text
    if isinstance(detail, list):  # pydantic validation errors with field paths
        parts = []
        for item in detail:
            loc = ".".join(str(p) for p in item.get("loc", []))
            parts.append(f"{loc}: {item.get('msg', '')}")
        return "; ".join(parts)
    return str(detail)


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


def _write(out_dir: str, name: str, text: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, name), "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    if cfg.get("scenario", args.scenario) != args.scenario:
        raise ConfigError(
            f"config is for scenario {cfg.get('scenario')!r}, requested {args.scenario!r}"
        )
    cfg["scenario"] = args.scenario
    if args.trials is not None:
        cfg["trials"] = args.trials
    if args.seed is not None:
        cfg["seed"] = args.seed
    cfg.pop("out_dir", None)  # the client writes all outputs locally
    body = ServiceClient(args.server).post("/simulate", cfg)
    _write(args.out, "trials.csv", body["trials_csv"])
    _write(
        args.out,
        "summary.json",
        json.dumps(body["summary"], indent=2, sort_keys=True) + "\n",
    )
    print(json.dumps(body["summary"], indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_bounds(args) -> int:
    cfg = _load_config(args.config)
    cfg.setdefault("scenario", "bounds")
    if cfg["scenario"] != "bounds":
        cfg = {
            "scenario": "bounds",
            "model": cfg.get("model", {}),
            "sampler": cfg.get("sampler", {}),
        }
    cfg.pop("recovery", None)
    cfg.pop("out_dir", None)
    body = ServiceClient(args.server).post("/bounds", cfg)
    if args.out:
        cols = list(body.keys())
        from .experiments import _cell

        csv = ",".join(cols) + "\n" + ",".join(_cell(body[c]) for c in cols) + "\n"
        _write(args.out, "bounds.csv", csv)
    print(json.dumps(body, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_density(args) -> int:
    try:
        densities = [int(v) for v in args.densities.split(",") if v]
    except ValueError as exc:
        raise ConfigError(f"bad densities list: {exc}") from exc
    payload = {
        "scenario": "density",
        "pattern_seed": args.pattern_seed,
        "chips": args.chips,
        "densities": densities,
    }
    body = ServiceClient(args.server).post("/density", payload)
    if args.out:
        _write(args.out, "density.csv", body["csv"])
    print(body["csv"], end="")
    return EXIT_OK


def _cmd_mismatch(args) -> int:
    try:
        deltas = [float(v) for v in args.deltas.split(",") if v]
    except ValueError as exc:
        raise ConfigError(f"bad deltas list: {exc}") from exc
    payload: dict = {"deltas": deltas, "seed": args.seed}
    if args.config:
        base = _load_config(args.config)
        payload["model"] = base.get("model", {})
        payload["sampler"] = base.get("sampler", {})
    body = ServiceClient(args.server).post("/mismatch", payload)
    if args.out:
        _write(args.out, "mismatch.csv", body["csv"])
    print(body["csv"], end="")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="subnyq",
        description="Sub-Nyquist sampling workbench",
        epilog=_CSV_DOC,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_sim = sub.add_parser(
        "simulate",
        help="run a Monte Carlo scenario from a JSON config",
        epilog=_CSV_DOC,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p_sim.add_argument("scenario", choices=_SCENARIOS)
    p_sim.add_argument("--config", required=True, help="JSON config path")
    p_sim.add_argument("--trials", type=int, default=None)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--out", default=".", help="output directory")
    p_sim.add_argument("--server", default=None, help="remote service URL")
    p_sim.set_defaults(fn=_cmd_simulate)

    p_bounds = sub.add_parser("bounds", help="rate-bound report for a config")
    p_bounds.add_argument("--config", required=True)
    p_bounds.add_argument("--out", default=None)
    p_bounds.add_argument("--server", default=None)
    p_bounds.set_defaults(fn=_cmd_bounds)

    p_density = sub.add_parser(
        "density", help="sign-waveform coefficient convergence vs quadrature density"
    )
    p_density.add_argument("--pattern-seed", type=int, default=0)
    p_density.add_argument("--chips", type=int, default=9)
    p_density.add_argument("--densities", default="1,2,5,10,50,100")
    p_density.add_argument("--out", default=None)
    p_density.add_argument("--server", default=None)
    p_density.set_defaults(fn=_cmd_density)

    p_mis = sub.add_parser(
        "mismatch", help="off-grid tone sweep through the nominal tone pipeline"
    )
    p_mis.add_argument("--deltas", default="0,0.1,0.25,0.5")
    p_mis.add_argument("--seed", type=int, default=0)
    p_mis.add_argument("--config", default=None, help="optional rd config for model/sampler")
    p_mis.add_argument("--out", default=None)
    p_mis.add_argument("--server", default=None)
    p_mis.set_defaults(fn=_cmd_mismatch)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(fn=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits; --help is 0, usage errors 1
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RuntimeFailure as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except httpx.HTTPError as exc:
        print(f"service error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
