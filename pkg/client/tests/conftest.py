"""Launches real fog/cloud services through the mrfog CLI; the SDK under
test talks to them over HTTP only."""

import json
import signal
import subprocess
import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent.parent
FIXTURES = REPO / "fixtures"


def _start(args) -> tuple[subprocess.Popen, int]:
    process = subprocess.Popen(
        [sys.executable, "-m", "mrfog.cli", *args],
        stdout=subprocess.PIPE,
        stderr=subprocess.DEVNULL,
        text=True,
    )
    event = json.loads(process.stdout.readline())
    assert event["event"] == "listening"
    return process, event["port"]


@pytest.fixture(scope="session")
def services(tmp_path_factory):
    base = tmp_path_factory.mktemp("sdk")
    cloud, cloud_port = _start(["cloud", "--port", "0", "--data-dir", str(base / "cloud")])
    fog, fog_port = _start(
        [
            "serve",
            "--port", "0",
            "--data-dir", str(base / "fog"),
            "--cloud-url", f"http://127.0.0.1:{cloud_port}",
        ]
    )
    yield f"http://127.0.0.1:{fog_port}", f"http://127.0.0.1:{cloud_port}"
    for process in (fog, cloud):
        process.send_signal(signal.SIGINT)
        process.wait(timeout=10)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES
