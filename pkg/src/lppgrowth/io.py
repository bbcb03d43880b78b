"""CSV and JSON writers; every data file is paired with a JSON manifest."""

from __future__ import annotations

import csv
import json
import math
import os
from pathlib import Path

import numpy as np

__all__ = [
    "SAMPLE_HEADER",
    "CDF_HEADER",
    "TW_HEADER",
    "CONVERGENCE_HEADER",
    "fmt",
    "write_csv",
    "read_csv",
    "write_json",
    "read_json",
    "write_samples",
    "write_cdf_table",
    "write_tw_table",
    "write_convergence",
    "sidecar_path",
]

SAMPLE_HEADER = ["sample_index", "raw", "rescaled"]
CDF_HEADER = ["t", "p", "err", "method"]
TW_HEADER = ["s", "F", "method", "est_err"]
CONVERGENCE_HEADER = ["N", "sup_dist", "grid_lo", "grid_hi"]


def fmt(v):
    """Shortest round-trip text for numbers; integers stay integral."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v.is_integer() and abs(v) < 2**53:
            return str(int(v))
        return repr(v)
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        obj = float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if hasattr(obj, "value") and not isinstance(obj, (int, float, str)):
        return obj.value
    return obj


def write_csv(path, header, rows):
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            vals = [row[h] for h in header] if isinstance(row, dict) else list(row)
            w.writerow([fmt(v) for v in vals])
    os.replace(tmp, path)
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_json(path, obj):
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"
    path.write_text(text)
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.stem + ".json")


def write_samples(path, batch, manifest=None):
    """Sample CSV ``sample_index,raw,rescaled`` plus a JSON sidecar with the affine map."""
    rows = ({"sample_index": i, "raw": r, "rescaled": s}
            for i, (r, s) in enumerate(zip(batch.raw, batch.rescaled)))
    write_csv(path, SAMPLE_HEADER, rows)
    meta = batch.metadata()
    if manifest:
        meta["manifest"] = manifest
    write_json(sidecar_path(path), meta)
    return Path(path)


def write_cdf_table(path, values):
    return write_csv(path, CDF_HEADER, (v.as_row() for v in values))


def write_tw_table(path, values):
    return write_csv(path, TW_HEADER, (v.as_row() for v in values))


def write_convergence(path, rows):
    return write_csv(path, CONVERGENCE_HEADER, rows)
