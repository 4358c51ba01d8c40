"""Run manifests: full provenance for every artifact a command writes.

A manifest records the seed, the fully resolved configuration (defaults
included, nothing hidden), and content hashes of every input, so a run
can be reproduced or audited.  The ``created_at`` stamp is the only
field excluded from reproducibility comparisons.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path
from typing import Mapping, Optional


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def config_hash(config: Mapping) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_manifest(path, command: str, config: Mapping,
                   inputs: Optional[Mapping[str, str]] = None,
                   outputs: Optional[Mapping[str, str]] = None,
                   seed: Optional[int] = None) -> dict:
    """Write `<artifact>.manifest.json`; returns the manifest object."""
    manifest = {
        "command": command,
        "config": dict(config),
        "config_hash": config_hash(config),
        "inputs": {name: sha256_file(p) for name, p in (inputs or {}).items()},
        "outputs": {name: str(p) for name, p in (outputs or {}).items()},
        "seed": seed,
        "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2, default=str)
        fh.write("\n")
    return manifest
