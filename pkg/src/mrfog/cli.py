"""Operator command line: run the services, drive a fog node, benchmark.

All normal output is JSON on stdout; diagnostics go to stderr.  Exit codes:
0 success, 1 transport/server failure, 2 client error (4xx), 3 delivery
failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import requests

from . import bench as bench_mod
from . import cloud as cloud_mod
from . import gateway as gateway_mod
from .codec import CodecId

EXIT_OK = 0
EXIT_TRANSPORT = 1
EXIT_CLIENT = 2
EXIT_DELIVERY = 3


def _request(method: str, url: str, **kwargs) -> requests.Response:
    try:
        return requests.request(method, url, timeout=kwargs.pop("timeout", 600), **kwargs)
    except requests.RequestException as exc:
        click.echo(f"transport error: {exc}", err=True)
        sys.exit(EXIT_TRANSPORT)


def _finish(response: requests.Response, created: int = 200) -> None:
    """Print the response JSON and exit with the contract's code."""
    try:
        click.echo(json.dumps(response.json()))
    except ValueError:
        click.echo(response.text)
    if response.status_code in (created, 200, 201):
        sys.exit(EXIT_OK)
    if 400 <= response.status_code < 500:
        sys.exit(EXIT_CLIENT)
    sys.exit(EXIT_TRANSPORT)


@click.group()
def main() -> None:
    """Fog-node geospatial gateway tools."""


@main.command()
@click.option("--port", envvar="MRFOG_PORT", type=int, default=gateway_mod.DEFAULT_PORT, show_default=True)
@click.option("--data-dir", envvar="MRFOG_DATA_DIR", type=click.Path(path_type=Path), required=True)
@click.option("--cloud-url", envvar="MRFOG_CLOUD_URL", default=None)
@click.option("--codec", envvar="MRFOG_CODEC", type=click.Choice(["deflate", "none"]), default="deflate", show_default=True)
@click.option("--retries", envvar="MRFOG_RETRIES", type=int, default=3, show_default=True)
@click.option("--backoff-ms", envvar="MRFOG_BACKOFF_MS", type=int, default=200, show_default=True)
def serve(port, data_dir, cloud_url, codec, retries, backoff_ms) -> None:
    """Run the fog gateway until interrupted."""
    config = gateway_mod.GatewayConfig(
        data_dir=data_dir,
        port=port,
        cloud_url=cloud_url,
        default_codec=CodecId.from_label(codec),
        push_retry_limit=retries,
        push_backoff_ms=backoff_ms,
    )
    gateway_mod.serve(config)


@main.command()
@click.option("--port", envvar="MRCLOUD_PORT", type=int, default=cloud_mod.DEFAULT_PORT, show_default=True)
@click.option("--data-dir", envvar="MRCLOUD_DATA_DIR", type=click.Path(path_type=Path), required=True)
def cloud(port, data_dir) -> None:
    """Run the cloud receiver stub until interrupted."""
    cloud_mod.serve(data_dir, port)


@main.command()
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@click.option("--url", required=True, help="Fog node base URL.")
@click.option("--name", default=None, help="Layer name when the file has none.")
def ingest(file: Path, url: str, name: str | None) -> None:
    """POST a GeoJSON file to a fog node; prints the catalog entry."""
    target = url.rstrip("/") + "/layers"
    if name:
        target += f"?name={name}"
    response = _request("POST", target, data=file.read_bytes())
    _finish(response, created=201)


@main.command()
@click.argument("layer_a")
@click.argument("layer_b")
@click.option("--op", type=click.Choice(["intersection", "union", "difference"]), required=True)
@click.option("--url", required=True)
def overlay(layer_a: str, layer_b: str, op: str, url: str) -> None:
    """Run an overlay between two catalog layers at the fog node."""
    response = _request(
        "POST",
        url.rstrip("/") + "/overlay",
        json={"layer_a": layer_a, "layer_b": layer_b, "op": op},
    )
    _finish(response)


@main.command()
@click.argument("layer_id")
@click.option("--codec", type=click.Choice(["deflate", "none"]), default=None)
@click.option("--url", required=True)
@click.option("--destination", default=None, help="Override the node's cloud URL.")
def push(layer_id: str, codec: str | None, url: str, destination: str | None) -> None:
    """Push a layer to the cloud; exit 3 when delivery fails after retries."""
    body = {"layer_id": layer_id}
    if codec:
        body["codec"] = codec
    if destination:
        body["destination"] = destination
    response = _request("POST", url.rstrip("/") + "/push", json=body)
    if response.status_code == 200:
        metrics = response.json()
        click.echo(json.dumps(metrics))
        sys.exit(EXIT_OK if metrics.get("outcome") == "delivered" else EXIT_DELIVERY)
    _finish(response)


@main.command()
@click.option("--url", required=True)
def stats(url: str) -> None:
    """Print the fog node's aggregate metrics report."""
    _finish(_request("GET", url.rstrip("/") + "/metrics"))


@main.command()
@click.option("--url", required=True, help="Fog node base URL.")
@click.option("--cloud-url", required=True, help="Cloud stub base URL.")
@click.option("--payload", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--trials", type=int, default=5, show_default=True)
@click.option("--bandwidth-kbps", type=float, default=256.0, show_default=True)
def bench(url: str, cloud_url: str, payload: Path, trials: int, bandwidth_kbps: float) -> None:
    """Compare per-codec push latency through a throttled link."""
    try:
        result = bench_mod.run_bench(url, cloud_url, payload, trials, bandwidth_kbps)
    except (requests.RequestException, RuntimeError) as exc:
        click.echo(f"bench failed: {exc}", err=True)
        sys.exit(EXIT_TRANSPORT)
    click.echo(json.dumps(result))
    click.echo(bench_mod.format_table(result), err=True)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
