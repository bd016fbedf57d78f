"""wfnet-verify command line client.

A thin client over the FastAPI service. By default the app is driven
in-process (no server needed); --server points it at a running instance
instead. Exit codes: 0 sound/valid, 1 I/O or parse error, 2 structurally
invalid, 3 weakly sound, 4 unsound, 5 unbounded, 6 inconclusive,
7 spin missing, 8 spin output unparseable.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from .netio import render_report_text
from .spin import SPIN_ENV_VAR

RESULT_EXIT_CODES = {
    "sound": 0,
    "weak_sound": 3,
    "unsound": 4,
    "unbounded": 5,
    "inconclusive": 6,
}


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import create_app

    return TestClient(create_app())


def _read_net(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    fmt = "pnml" if path.lower().endswith((".pnml", ".xml")) else "wfn"
    return {"source": text, "format": fmt}


def _fail_from_response(resp: httpx.Response) -> None:
    """Print the error detail and exit 1 (parse/net/options) or 2 (structure)."""
    try:
        detail = resp.json().get("detail", {})
    except ValueError:
        detail = {}
    if resp.status_code == 422 and "violations" in detail:
        for v in detail["violations"]:
            click.echo(f"condition {v['condition']}: {v['detail']}", err=True)
        click.echo("net is not a valid workflow net", err=True)
        sys.exit(2)
    message = detail.get("message") if isinstance(detail, dict) else None
    if isinstance(detail, dict) and "line" in detail:
        click.echo(f"error: line {detail['line']}: {message}", err=True)
    else:
        click.echo(f"error: {message or resp.text}", err=True)
    sys.exit(1)


@click.group()
@click.option(
    "--server",
    default=None,
    metavar="URL",
    help="Base URL of a running wfnet-verify service (default: in-process).",
)
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Verify workflow nets and emit Promela models for SPIN."""
    ctx.obj = server


@main.command()
@click.argument("net_file", type=click.Path())
@click.pass_obj
def validate(server: str | None, net_file: str) -> None:
    """Check the structural workflow-net conditions."""
    with _client(server) as client:
        resp = client.post("/validate", json=_read_net(net_file))
        if resp.status_code != 200:
            _fail_from_response(resp)
        body = resp.json()
    for warning in body["warnings"]:
        click.echo(f"warning: {warning}", err=True)
    if body["valid"]:
        click.echo(f"valid workflow net (source {body['source']}, sink {body['sink']})")
        sys.exit(0)
    for v in body["violations"]:
        click.echo(f"condition {v['condition']}: {v['detail']}")
    click.echo("net is not a valid workflow net")
    sys.exit(2)


@main.command()
@click.argument("net_file", type=click.Path())
@click.option("-k", "k", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--cap", type=click.IntRange(min=1), default=1_000_000, show_default=True)
@click.option(
    "--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True
)
@click.pass_obj
def check(server: str | None, net_file: str, k: int, cap: int, fmt: str) -> None:
    """Decide soundness (k instances; resources taken from the net file)."""
    payload = _read_net(net_file) | {"k": k, "cap": cap}
    with _client(server) as client:
        resp = client.post("/check", json=payload)
        if resp.status_code != 200:
            _fail_from_response(resp)
        report = resp.json()
    if fmt == "json":
        click.echo(json.dumps(report, indent=2))
    else:
        click.echo(render_report_text(report), nl=False)
    sys.exit(RESULT_EXIT_CODES[report["result"]])


@main.command()
@click.argument("net_file", type=click.Path())
@click.option("-k", "k", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--closure", is_flag=True, help="Emit the closure net (adds the loop transition).")
@click.option("--weighted", is_flag=True, help="Use the weighted remove/add macro family.")
@click.option(
    "--property",
    "properties",
    type=click.Choice(["termination", "proper", "no_dead"]),
    multiple=True,
    help="Property to emit; repeatable. Defaults to termination and proper.",
)
@click.option("-o", "--output", type=click.Path(), default=None, help="Output .pml path.")
@click.pass_obj
def emit(
    server: str | None,
    net_file: str,
    k: int,
    closure: bool,
    weighted: bool,
    properties: tuple[str, ...],
    output: str | None,
) -> None:
    """Generate the Promela model and LTL property definitions."""
    payload = _read_net(net_file) | {
        "k": k,
        "closure": closure,
        "weighted": weighted,
        "properties": list(properties) or ["termination", "proper"],
    }
    with _client(server) as client:
        resp = client.post("/emit", json=payload)
        if resp.status_code != 200:
            _fail_from_response(resp)
        body = resp.json()

    def maps(stream) -> None:
        pl = " ".join(f"{p}={i}" for p, i in body["place_index_map"].items())
        tr = " ".join(f"{t}={i}" for t, i in body["transition_index_map"].items())
        click.echo(f"PL: {pl}", file=stream)
        click.echo(f"TR: {tr}", file=stream)

    if output is not None:
        Path(output).write_bytes(body["model"].encode("utf-8"))
        click.echo(f"model written to {output}")
        maps(sys.stdout)
    else:
        click.echo(body["model"], nl=False)
        maps(sys.stderr)
    sys.exit(0)


@main.command("spin-check")
@click.argument("net_file", type=click.Path())
@click.option("-k", "k", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--cap", type=click.IntRange(min=1), default=1_000_000, show_default=True)
@click.option(
    "--property",
    "prop",
    type=click.Choice(["termination", "proper", "no_dead"]),
    default="proper",
    show_default=True,
)
@click.option(
    "--spin",
    "spin_path",
    default=None,
    metavar="PATH",
    help=f"spin binary (falls back to ${SPIN_ENV_VAR}, then PATH lookup).",
)
@click.pass_obj
def spin_check(
    server: str | None,
    net_file: str,
    k: int,
    cap: int,
    prop: str,
    spin_path: str | None,
) -> None:
    """Cross-check one property against an external SPIN run."""
    payload = _read_net(net_file) | {
        "k": k,
        "cap": cap,
        "property": prop,
        "spin_path": spin_path,
    }
    with _client(server) as client:
        resp = client.post("/spin-check", json=payload)
        if resp.status_code == 424:
            detail = resp.json().get("detail", {})
            click.echo(f"error: {detail.get('message', 'spin not found')}", err=True)
            sys.exit(7)
        if resp.status_code == 502:
            detail = resp.json().get("detail", {})
            click.echo(f"error: {detail.get('message', 'unparseable spin output')}", err=True)
            if detail.get("raw"):
                click.echo(detail["raw"], err=True)
            sys.exit(8)
        if resp.status_code != 200:
            _fail_from_response(resp)
        report = resp.json()
    click.echo(json.dumps(report, indent=2))
    if report["caveat"]:
        click.echo(f"note: {report['caveat']}", err=True)
    sys.exit(0)


if __name__ == "__main__":
    main()
