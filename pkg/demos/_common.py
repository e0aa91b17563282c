"""Shared helper for the demo scripts: where to write images."""

import pathlib
import sys


def output_dir():
    """First command-line argument, or ``demo_output`` in the working directory."""
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
    out.mkdir(parents=True, exist_ok=True)
    return out
