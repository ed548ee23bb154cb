"""Serialisation of waves and run outputs: CSV with 17 significant digits, or JSON."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .waves import PeriodicWave, WaveParams, _wave_from_samples


def fmt(value) -> str:
    """Round-trip exact text for a CSV cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    return str(value)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.write_text(csv_text(header, rows))
    return path


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def json_text(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json_text(obj))
    return path


# --- waves -------------------------------------------------------------------------

WAVE_COLUMNS = ("x", "h", "hprime")


def wave_rows(wave: PeriodicWave):
    return zip(wave.x.tolist(), wave.h.tolist(), wave.hprime.tolist())


def write_wave_csv(path, wave: PeriodicWave) -> Path:
    return write_csv(path, WAVE_COLUMNS, wave_rows(wave))


def wave_json(wave: PeriodicWave, **extra) -> dict:
    return {"params": wave.params.as_dict(), "N": wave.N, **extra}


def read_wave(csv_path, params_path) -> PeriodicWave:
    """Rebuild a wave from its CSV samples and the JSON parameter file."""
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
    meta = json.loads(Path(params_path).read_text())
    p = meta["params"]
    params = WaveParams(int(p["k"]), float(p["omega"]), float(p["B"]), float(p["L"]), p.get("kappa"))
    return _wave_from_samples(params, data[:, 0], data[:, 1], data[:, 2])
