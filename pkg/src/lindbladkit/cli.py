"""Batch command-line client for the lindbladkit service.

The CLI parses a run-config file, posts it to the service (by default an
in-process instance; point --server at a remote one) and writes the returned
CSV artifacts to the output directory.

Exit codes: 0 success, 1 config error, 2 physics error, 3 check failure.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from pathlib import Path

import httpx

from .config import parse_config_file
from .errors import ConfigError
from .schemas import RunConfig

OUTPUT_DIR_ENV = "LINDBLADKIT_OUTPUT_DIR"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PHYSICS = 2
EXIT_CHECK_FAILED = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lindbladkit",
        description="Simulate and optimize coherently driven, dissipative quantum systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (
        ("simulate", True),
        ("optimize", True),
        ("pump", True),
        ("check", False),
    ):
        p = sub.add_parser(name, help=f"run the {name} scenario")
        if needs_config:
            p.add_argument("config", help="run-config file")
        else:
            p.add_argument("config", nargs="?", help="optional run-config file")
        p.add_argument("--server", help="base URL of a running service (default: in-process)")
        p.add_argument("--output-dir", help=f"override output directory (also {OUTPUT_DIR_ENV})")
    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


async def _post(server: str | None, endpoint: str, payload) -> httpx.Response:
    if server:
        async with httpx.AsyncClient(base_url=server, timeout=600.0) as client:
            return await client.post(endpoint, json=payload)
    from .service import app

    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(
        transport=transport, base_url="http://lindbladkit.internal", timeout=600.0
    ) as client:
        return await client.post(endpoint, json=payload)


def _error_exit(response: httpx.Response) -> int:
    try:
        detail = response.json().get("detail")
    except ValueError:
        detail = None
    if isinstance(detail, dict) and "kind" in detail:
        kind, message = detail["kind"], detail.get("message", "")
    else:
        kind, message = "config", json.dumps(detail) if detail is not None else response.text
    print(f"error ({kind}): {message}", file=sys.stderr)
    return EXIT_PHYSICS if kind == "physics" else EXIT_CONFIG


def _write_files(directory: Path, files: dict[str, str]):
    directory.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (directory / name).write_bytes(text.encode())
        print(f"wrote {directory / name}")


def _output_dir(args, cfg: RunConfig | None) -> Path:
    if args.output_dir:
        return Path(args.output_dir)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env)
    return Path(cfg.output.directory) if cfg is not None else Path(".")


def _print_summary(summary: dict):
    pops = summary.get("final_populations")
    line = (
        f"final purity={summary.get('final_purity'):.6f} "
        f"entropy={summary.get('final_renyi_entropy'):.6f}"
    )
    if pops is not None:
        line += " populations=" + ",".join(f"{p:.6f}" for p in pops)
    print(line)
    for key in ("best_params", "best_area_pi", "naive_purity_deficit", "optimized_purity_deficit",
                "evaluations", "dark_states"):
        if key in summary:
            print(f"{key}: {summary[key]}")


def _run_scenario(args) -> int:
    cfg = None
    if args.config is not None:
        try:
            cfg = parse_config_file(args.config)
        except ConfigError as err:
            print(f"error (config): {err}", file=sys.stderr)
            return EXIT_CONFIG
        if cfg.scenario != args.command:
            print(
                f"error (config): config declares scenario {cfg.scenario!r}, "
                f"command is {args.command!r}",
                file=sys.stderr,
            )
            return EXIT_CONFIG
    payload = cfg.model_dump(mode="json") if cfg is not None else None
    try:
        response = asyncio.run(_post(args.server, f"/{args.command}", payload))
    except httpx.HTTPError as err:
        print(f"error (config): cannot reach service: {err}", file=sys.stderr)
        return EXIT_CONFIG
    if response.status_code != 200:
        return _error_exit(response)
    body = response.json()
    out_dir = _output_dir(args, cfg)

    if args.command == "check":
        all_passed = body["passed"]
        for item in body["checks"]:
            status = "PASS" if item["passed"] else "FAIL"
            print(
                f"[{status}] {item['name']}: measured {item['measured']:.3e} "
                f"(threshold {item['threshold']:.3e}) {item.get('detail', '')}".rstrip()
            )
        _write_files(out_dir, body["files"])
        print("check:", "all passed" if all_passed else "FAILED")
        return EXIT_OK if all_passed else EXIT_CHECK_FAILED

    _write_files(out_dir, body["files"])
    _print_summary(body["summary"])
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("lindbladkit.service:app", host=args.host, port=args.port)
        return EXIT_OK
    return _run_scenario(args)


if __name__ == "__main__":
    sys.exit(main())
