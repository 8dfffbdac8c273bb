"""Plain-text writers: CSV tables, key-value reports, PGM images."""
from __future__ import annotations

import csv
import os

import numpy as np


def fmt(value) -> str:
    """Round-trippable, locale-independent text for a number."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def read_csv(path):
    """Return ``(header, rows)`` with every cell as a string."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader]


def write_columns(path, columns: dict) -> None:
    names = list(columns)
    arrays = [np.asarray(columns[k]) for k in names]
    write_csv(path, names, zip(*arrays))


def write_key_values(path, items) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in items:
            fh.write(f"{key} = {fmt(value)}\n")


def read_key_values(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def write_pgm(path, image, maxval: int = 65535) -> None:
    """Write a 2D array as a plain (ASCII) PGM, scaled to ``[0, maxval]``.

    Row 0 of ``image`` is written as the bottom row so that ``y`` increases
    upwards in viewers.
    """
    img = np.asarray(image, dtype=float)
    top = img.max() if img.size else 0.0
    scaled = np.zeros(img.shape, dtype=np.int64) if top <= 0 else \
        np.rint(np.clip(img / top, 0.0, 1.0) * maxval).astype(np.int64)
    h, w = scaled.shape
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"P2\n{w} {h}\n{maxval}\n")
        for row in scaled[::-1]:
            fh.write(" ".join(map(str, row)))
            fh.write("\n")


def read_pgm(path) -> np.ndarray:
    with open(path, encoding="ascii") as fh:
        tokens = [t for line in fh for t in line.split("#", 1)[0].split()]
    if tokens[0] != "P2":
        raise ValueError("only plain PGM (P2) is supported")
    w, h = int(tokens[1]), int(tokens[2])
    data = np.array(tokens[4:4 + w * h], dtype=np.int64).reshape(h, w)
    return data[::-1]


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return path
