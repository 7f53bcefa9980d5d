"""Run manifests: config echo, output checksums, runtime metrics.

Every CLI command writes ``manifest.txt`` next to its data files. All data
files are byte-deterministic for a fixed seed; the manifest's
``metrics.wall_clock_s`` line is the only nondeterministic content.
"""
from __future__ import annotations

import hashlib
from pathlib import Path

from . import __version__
from ._backend import BACKEND

__all__ = ["sha256_file", "write_manifest", "MANIFEST_NAME"]

MANIFEST_NAME = "manifest.txt"


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, command: str, seed: int, config_items,
                   outputs, metrics: dict, calibration: dict | None = None) -> Path:
    """Write the manifest and return its path.

    ``outputs`` are paths relative to ``out_dir``; each gets a sha256 line.
    """
    out_dir = Path(out_dir)
    lines = [
        f"manifest.artifact=cmjlab {__version__}",
        f"manifest.command={command}",
        f"manifest.backend={BACKEND}",
        f"manifest.seed={seed}",
    ]
    for key, value in config_items:
        lines.append(f"config.{key}={value}")
    for key in sorted(calibration or {}):
        lines.append(f"calibration.{key}={calibration[key]}")
    for key in sorted(metrics):
        lines.append(f"metrics.{key}={metrics[key]}")
    for rel in outputs:
        digest = sha256_file(out_dir / rel)
        lines.append(f"output.{rel}.sha256={digest}")
    path = out_dir / MANIFEST_NAME
    path.write_text("\n".join(lines) + "\n")
    return path
