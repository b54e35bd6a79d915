"""Frame interchange: 16-bit PGM with JSON sidecars, PPM colour images and CSV
matrices."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .errors import DomainError
from .sensor import Frame

TOOL_NAME = "lwirms"
MAXVAL = 65535


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def write_sidecar(path, command: str, inputs: dict, seed: Optional[int] = None,
                  **extra) -> Path:
    meta = {"tool": TOOL_NAME, "version": __version__, "command": command,
            "inputs": inputs, "seed": seed}
    meta.update(extra)
    out = sidecar_path(path)
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return out


def read_sidecar(path) -> Optional[dict]:
    side = sidecar_path(path)
    if not side.exists():
        return None
    with open(side, encoding="utf-8") as fh:
        return json.load(fh)


def quantize(data: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Map floats onto 0..65535; returns ``(codes, scale, offset)``.

    ``value = offset + scale * code`` recovers the data to within ``scale / 2``.
    """
    lo, hi = float(data.min()), float(data.max())
    scale = (hi - lo) / MAXVAL if hi > lo else 1.0
    codes = np.rint((data - lo) / scale)
    return np.clip(codes, 0, MAXVAL).astype(">u2"), scale, lo


def write_pgm(path, data: np.ndarray, maxval: int = MAXVAL) -> None:
    data = np.asarray(data)
    h, w = data.shape
    dtype = ">u2" if maxval > 255 else "u1"
    header = f"P5\n{w} {h}\n{maxval}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.astype(dtype).tobytes())


def _read_header(fh, magic: bytes) -> tuple[int, int, int]:
    tokens = []
    while len(tokens) < 4:
        line = fh.readline()
        if not line:
            raise DomainError("truncated PNM header")
        line = line.split(b"#", 1)[0]
        tokens.extend(line.split())
    if tokens[0] != magic:
        raise DomainError(f"expected {magic.decode()} file, found {tokens[0]!r}")
    return int(tokens[1]), int(tokens[2]), int(tokens[3])


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        w, h, maxval = _read_header(fh, b"P5")
        dtype = ">u2" if maxval > 255 else "u1"
        raw = np.frombuffer(fh.read(), dtype=dtype)
    if raw.size != w * h:
        raise DomainError(f"{path}: expected {w * h} samples, found {raw.size}")
    return raw.reshape(h, w).astype(np.int64)


def write_ppm(path, rgb: np.ndarray) -> None:
    """8-bit binary PPM from an ``h x w x 3`` float image in [0, 1]."""
    rgb = np.asarray(rgb, dtype=float)
    h, w, _ = rgb.shape
    codes = np.clip(np.rint(rgb * 255), 0, 255).astype("u1")
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(codes.tobytes())


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        w, h, _ = _read_header(fh, b"P6")
        raw = np.frombuffer(fh.read(), dtype="u1")
    return raw.reshape(h, w, 3)


def save_frame(path, frame: Frame, command: str, inputs: dict,
               seed: Optional[int] = None, **extra) -> None:
    """Write a frame as PGM (quantised, scale/offset in the sidecar) or CSV."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        write_matrix_csv(path, frame.data)
        write_sidecar(path, command, inputs, seed, width=frame.width,
                      height=frame.height, **extra)
        return
    codes, scale, offset = quantize(frame.data)
    write_pgm(path, codes)
    write_sidecar(path, command, inputs, seed, width=frame.width,
                  height=frame.height, scale=scale, offset=offset, **extra)


def load_frame(path) -> Frame:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return Frame(read_matrix_csv(path))
    codes = read_pgm(path)
    meta = read_sidecar(path) or {}
    scale = float(meta.get("scale", 1.0))
    offset = float(meta.get("offset", 0.0))
    return Frame(offset + scale * codes)


def write_matrix_csv(path, data: np.ndarray) -> None:
    np.savetxt(path, np.asarray(data, dtype=float), delimiter=",", fmt="%.17g")


def read_matrix_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def write_mask_pgm(path, mask: np.ndarray) -> None:
    """Boolean mask as an 8-bit PGM with maxval 1."""
    write_pgm(path, np.asarray(mask).astype("u1"), maxval=1)
