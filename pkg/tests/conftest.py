import subprocess
import sys

import pytest


@pytest.fixture
def cli():
    """Run the CLI in a subprocess; returns CompletedProcess."""

    def run(*args):
        return subprocess.run(
            [sys.executable, "-m", "lrfusion.cli", *map(str, args)],
            capture_output=True,
            text=True,
        )

    return run


def parse_kv(stdout: str) -> dict:
    """Parse flat key=value stdout lines into a dict of strings."""
    out = {}
    for line in stdout.splitlines():
        if "=" in line:
            key, _, value = line.partition("=")
            out[key] = value
    return out
