"""File writers: magnitude CSV, 8-bit PGM images and JSON documents."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


def magnitude_image(values: np.ndarray) -> np.ndarray:
    """log10(1 + |v|) scaled to the image maximum, as uint8."""
    mag = np.log10(1.0 + np.abs(np.asarray(values)))
    top = mag.max(initial=0.0)
    if top <= 0:
        return np.zeros(mag.shape, dtype=np.uint8)
    return np.round(255.0 * mag / top).astype(np.uint8)


def write_pgm(path, values: np.ndarray) -> None:
    """Binary (P5) PGM; rows are the first array axis."""
    img = magnitude_image(values)
    rows, cols = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    cols, rows = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(rows, cols)


def write_magnitude_csv(path, values: np.ndarray) -> None:
    """One row per (kx, ky) / (x, y) cell with real, imag and magnitude."""
    values = np.asarray(values)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "col", "re", "im", "abs"])
        for (r, c), v in np.ndenumerate(values):
            w.writerow([r, c, repr(float(v.real)), repr(float(v.imag)), repr(float(abs(v)))])


def write_rows_csv(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
