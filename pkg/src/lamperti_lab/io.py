"""CSV and manifest writers.

CSV uses '.' decimals, ',' separators, LF line endings, and 17 significant
digits so floats round-trip exactly.  Manifests are JSON with sorted keys;
everything except wall_time_ms is deterministic for a fixed config and seed.
"""

from __future__ import annotations

import json

import numpy as np

__all__ = ["fmt_float", "write_table_csv", "write_ensemble_csv",
           "write_json", "write_flat_config"]


def fmt_float(x) -> str:
    return format(float(x), ".17g")


def write_table_csv(path, header, columns):
    """Write named columns (equal-length 1-D arrays) as CSV."""
    cols = [np.asarray(c) for c in columns]
    n = cols[0].size
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            fh.write(",".join(fmt_float(c[i]) for c in cols) + "\n")


def write_ensemble_csv(path, ensemble):
    """Path ensemble as CSV with header t,path_0,...,path_{M-1}."""
    t = ensemble.grid.points
    paths = ensemble.paths
    M = paths.shape[0]
    with open(path, "w", newline="\n") as fh:
        fh.write("t," + ",".join(f"path_{m}" for m in range(M)) + "\n")
        for i in range(t.size):
            fh.write(fmt_float(t[i]) + ","
                     + ",".join(fmt_float(paths[m, i]) for m in range(M)) + "\n")


def ensemble_manifest(ensemble) -> dict:
    """Sidecar manifest for a serialized ensemble."""
    model = ensemble.model
    p = model.params if model is not None else None
    return {
        "family": model.family.value if model is not None else None,
        "H": p.H if p else None,
        "K": p.K if p else None,
        "alpha": p.alpha if p else None,
        "seed": ensemble.master_seed,
        "n": int(len(ensemble.grid)),
        "M": int(ensemble.n_paths),
        "jitter_applied": ensemble.jitter,
    }


def write_json(path, obj):
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_flat_config(path, config: dict):
    """Flat `key = value` file mirroring the CLI flags."""
    with open(path, "w", newline="\n") as fh:
        for key in sorted(config):
            fh.write(f"{key} = {config[key]}\n")
