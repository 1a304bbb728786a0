"""JSON summaries and the manifest written beside every command's outputs."""

import json
import os
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from .. import __version__
from ..config import output_path

MANIFEST_NAME = "manifest.json"


def write_json(path: str, data: Dict[str, Any]) -> str:
    """Sorted keys, no timestamps: reruns produce identical bytes."""
    Path(os.path.dirname(path) or ".").mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, sort_keys=True, indent=2)
        f.write("\n")
    return path


def build_manifest(
    command: str,
    seed: int,
    config: Dict[str, Any],
    outputs: Sequence[str],
    inputs: Optional[Sequence[str]] = None,
) -> Dict[str, Any]:
    return {
        "command": command,
        "seed": seed,
        "version": __version__,
        "config": config,
        "inputs": list(inputs or []),
        "outputs": sorted(os.path.basename(p) for p in outputs),
    }


def write_manifest(
    out_dir: str,
    command: str,
    seed: int,
    config: Dict[str, Any],
    outputs: Sequence[str],
    inputs: Optional[Sequence[str]] = None,
) -> str:
    """Echo the command, seed, version and full configuration next to the outputs."""
    return write_json(output_path(out_dir, MANIFEST_NAME), build_manifest(command, seed, config, outputs, inputs))
