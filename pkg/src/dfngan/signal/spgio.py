"""SPG1 binary spectrogram files with a JSON sidecar.

Layout (little-endian): ``b"SPG1"``, u32 rows, u32 cols, u8 kind tag,
u8 has-imag flag, u32 sample rate, u32 hop, u32 frame length, then
row-major float64 real parts followed by the imaginary parts when flagged.
The sidecar ``<file>.meta.json`` mirrors the header and adds the CWT
scale axis.
"""

import json
import struct
from pathlib import Path

import numpy as np

from ..exceptions import CorruptHeader
from .spectrogram import SpecKind, Spectrogram

MAGIC = b"SPG1"
_HEADER = struct.Struct("<4sIIBBIII")


def sidecar_path(path):
    return Path(str(path) + ".meta.json")


def write_spg(path, spec, sidecar=True):
    rows, cols = spec.shape
    has_imag = bool(np.any(spec.im))
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, rows, cols, int(spec.kind), int(has_imag),
                              spec.sample_rate, spec.hop_samples, spec.frame_len_samples))
        fh.write(np.ascontiguousarray(spec.re, dtype="<f8").tobytes())
        if has_imag:
            fh.write(np.ascontiguousarray(spec.im, dtype="<f8").tobytes())
    if sidecar:
        meta = {
            "magic": MAGIC.decode(),
            "rows": rows,
            "cols": cols,
            "kind": SpecKind(spec.kind).name.lower(),
            "kind_tag": int(spec.kind),
            "has_imag": has_imag,
            "sample_rate": spec.sample_rate,
            "hop": spec.hop_samples,
            "frame_len": spec.frame_len_samples,
            "scale_axis": [float(f) for f in spec.scale_axis],
        }
        sidecar_path(path).write_text(json.dumps(meta, indent=2) + "\n")


def read_spg(path):
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CorruptHeader(f"{path}: shorter than the SPG1 header")
    magic, rows, cols, tag, has_imag, sr, hop, frame = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CorruptHeader(f"{path}: bad magic {magic!r}")
    try:
        kind = SpecKind(tag)
    except ValueError as exc:
        raise CorruptHeader(f"{path}: unknown kind tag {tag}") from exc
    count = rows * cols
    need = _HEADER.size + 8 * count * (2 if has_imag else 1)
    if len(data) != need:
        raise CorruptHeader(f"{path}: expected {need} bytes, found {len(data)}")
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).astype(np.float64)
    re = body[:count].reshape(rows, cols)
    im = body[count:].reshape(rows, cols) if has_imag else np.zeros((rows, cols))
    scale_axis = ()
    side = sidecar_path(path)
    if side.exists():
        scale_axis = tuple(json.loads(side.read_text()).get("scale_axis", ()))
    return Spectrogram(re, im, kind, frame, hop, sr, scale_axis)
