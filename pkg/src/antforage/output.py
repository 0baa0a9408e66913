"""Snapshot and manifest writers: lossless CSV, 16-bit PGM previews, JSON manifest."""

from __future__ import annotations

import json
import math
from dataclasses import asdict
from pathlib import Path

import numpy as np

import antforage

PGM_MAX = 65535


def format_float(x: float) -> str:
    """Shortest round-trip decimal, with integral values written without '.0'."""
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


def write_field_csv(f: np.ndarray, path) -> None:
    """``ny`` lines of ``nx`` values; the first line is the bottom row ``j = 0``."""
    text = "".join(",".join(format_float(x) for x in row) + "\n" for row in np.asarray(f).tolist())
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write field CSV {path}: {exc}") from exc


def read_field_csv(path) -> np.ndarray:
    rows = Path(path).read_text().splitlines()
    return np.array([[float(x) for x in line.split(",")] for line in rows])


def quantize(f: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Map ``[lo, hi]`` onto ``0..65535``, clamping outside, rounding half up."""
    if not hi > lo:
        raise ValueError(f"need hi > lo, got lo={lo}, hi={hi}")
    s = np.clip((np.asarray(f, dtype=float) - lo) / (hi - lo), 0.0, 1.0)
    return np.floor(PGM_MAX * s + 0.5).astype(np.uint16)


def write_field_pgm(f: np.ndarray, path, lo: float, hi: float) -> None:
    """Binary 16-bit PGM (P5); the top image row is the top of the domain."""
    pix = quantize(f, lo, hi)[::-1]
    ny, nx = pix.shape
    try:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{nx} {ny}\n{PGM_MAX}\n".encode("ascii"))
            fh.write(pix.astype(">u2").tobytes())
    except OSError as exc:
        raise OSError(f"cannot write PGM {path}: {exc}") from exc


def read_pgm(path) -> np.ndarray:
    """Read a P5 image written by :func:`write_field_pgm` (image row order)."""
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path} is not a binary PGM")
    nx, ny, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(parts[4], dtype=dtype, count=nx * ny).reshape(ny, nx)


def auto_range(f: np.ndarray) -> tuple[float, float]:
    lo, hi = float(np.min(f)), float(np.max(f))
    if not hi > lo:
        hi = lo + 1.0
    return lo, hi


class SnapshotWriter:
    """Run observer writing CSV (all fields) and PGM (selected fields) snapshots.

    PGM scaling is fixed for the whole run: taken from the scenario when given,
    otherwise from the first snapshot of each field.
    """

    def __init__(self, scenario, out_dir, every: int | None = None):
        self.scenario = scenario
        self.out_dir = Path(out_dir)
        self.every = every or scenario.run.snapshot_every
        self.ranges = {name: scenario.snapshots.range_for(name) for name in scenario.snapshots.pgm}
        self.entries: list[dict] = []
        (self.out_dir / "snapshots").mkdir(parents=True, exist_ok=True)

    def __call__(self, state):
        files = {}
        tag = f"{state.step_index:08d}"
        for name, f in state.fields().items():
            rel = f"snapshots/{name}_{tag}.csv"
            write_field_csv(f, self.out_dir / rel)
            files[f"{name}_csv"] = rel
        for name in self.scenario.snapshots.pgm:
            f = state.fields()[name]
            if self.ranges[name] is None:
                self.ranges[name] = auto_range(f)
            lo, hi = self.ranges[name]
            rel = f"snapshots/{name}_{tag}.pgm"
            write_field_pgm(f, self.out_dir / rel, lo, hi)
            files[f"{name}_pgm"] = rel
        self.entries.append({"step": state.step_index, "t": state.t, "files": files,
                             "pgm_scaling": {k: list(self.ranges[k]) for k in self.scenario.snapshots.pgm}})


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def manifest_dict(report, scenario, snapshots=()) -> dict:
    events = report.events.as_dict() if report.events is not None else []
    return _jsonable({
        "tool": "antforage",
        "version": antforage.__version__,
        "scenario": asdict(scenario),
        "termination": report.termination,
        "error": report.error,
        "error_code": report.error_code,
        "error_step": report.error_step,
        "steps_requested": report.steps_requested,
        "steps_done": report.steps_done,
        "final_time": report.final_time,
        "wall_time": report.wall_time,
        "final_summary": report.final_summary,
        "events": events,
        "snapshots": list(snapshots),
        "timeseries": "timeseries.csv",
    })


def write_manifest(report, scenario, path, snapshots=()) -> None:
    try:
        with open(path, "w") as fh:
            json.dump(manifest_dict(report, scenario, snapshots), fh, indent=2, allow_nan=False)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write manifest {path}: {exc}") from exc
