"""Command line front end.

`verify` is a thin client: it builds a request, sends it to the HTTP service
(in process by default, over the network with --server) and renders the
records it gets back.  Exit code 0 means every non-skipped check passed.
"""

from __future__ import annotations

import sys

import click

from .cache import TOOL_VERSION
from .realquad import DEFAULT_BIT_BUDGET
from .sweeps import SUITES, render

_VERSION = TOOL_VERSION.split("/", 1)[1]


def _post_verify(payload: dict, server: str | None):
    if server:
        import httpx

        return httpx.post(server.rstrip("/") + "/verify", json=payload, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    with TestClient(app) as client:
        return client.post("/verify", json=payload)


def _preflight_writable(path: str | None, label: str) -> None:
    if not path:
        return
    try:
        with open(path, "a", encoding="utf-8"):
            pass
    except OSError as exc:
        raise click.ClickException(f"{label} path {path!r} is not writable: {exc}")


@click.group()
@click.version_option(version=_VERSION, prog_name="qseven")
def main() -> None:
    """Certification sweeps over the prime family q = 7 mod 8."""


@click.command("verify")
@click.argument("suite", type=click.Choice([*SUITES, "all"]))
@click.option("--q-min", default=1, show_default=True, type=int, help="lower end of the prime range")
@click.option("--q-max", default=200, show_default=True, type=int, help="upper end of the prime range")
@click.option(
    "--residue",
    type=click.Choice(["7mod16", "15mod16", "7mod8"]),
    default="7mod8",
    show_default=True,
    help="residue class of the primes to sweep",
)
@click.option("--padic-prec", default=192, show_default=True, metavar="BITS", type=int)
@click.option("--float-prec", default=128, show_default=True, metavar="BITS", type=int)
@click.option("--jobs", default=1, show_default=True, type=int, help="worker processes")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "csv", "md"]),
    default="json",
    show_default=True,
    help="report format",
)
@click.option("--cache", "cache_path", type=click.Path(dir_okay=False), default=None, help="JSON-lines unit cache")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="write the report here instead of stdout")
@click.option("--timing/--no-timing", default=False, show_default=True, help="record wall times (off keeps reports reproducible)")
@click.option("--unit-budget", type=float, default=None, help="sliding-scan window budget before skipping a prime")
@click.option("--pell-bits", type=int, default=DEFAULT_BIT_BUDGET, show_default=True, help="coefficient bit budget for the real quadratic chain")
@click.option("--server", default=None, metavar="URL", help="base URL of a running service; default runs in process")
def verify(
    suite: str,
    q_min: int,
    q_max: int,
    residue: str,
    padic_prec: int,
    float_prec: int,
    jobs: int,
    fmt: str,
    cache_path: str | None,
    out: str | None,
    timing: bool,
    unit_budget: float | None,
    pell_bits: int,
    server: str | None,
) -> None:
    """Run SUITE (or all suites) over every prime in the configured family."""
    _preflight_writable(out, "output")
    _preflight_writable(cache_path, "cache")
    payload = {
        "q_min": q_min,
        "q_max": q_max,
        "residue": residue,
        "suites": list(SUITES) if suite == "all" else [suite],
        "padic_prec": padic_prec,
        "float_prec": float_prec,
        "jobs": jobs,
        "cache": cache_path,
        "timing": timing,
        "unit_budget": unit_budget,
        "pell_bits": pell_bits,
    }
    resp = _post_verify(payload, server)
    if resp.status_code != 200:
        raise click.ClickException(f"service returned {resp.status_code}: {resp.text}")
    body = resp.json()
    text = render(body["records"], fmt)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    counts = body["counts"]
    click.echo(
        f"{counts['ok']} ok, {counts['skip']} skipped, {counts['fail']} failed",
        err=True,
    )
    sys.exit(body["exit_code"])


@click.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8717, show_default=True, type=int)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


main.add_command(verify)
main.add_command(serve)
