"""
PKGN1 parameter checkpoints

Layout: the 5-byte magic b"PKGN1", a little-endian uint32 manifest length,
the UTF-8 JSON manifest, then every parameter's float32 payload (little
endian, row-major) in manifest order.
"""

import json
import logging
import struct
from pathlib import Path
from typing import Any, Dict, Mapping, Tuple, Union

import numpy as np

from pkgnet.errors import CheckpointError

logger = logging.getLogger(__name__)

MAGIC = b"PKGN1"
_LENGTH = struct.Struct("<I")


def save_checkpoint(
    path: Union[str, Path],
    params: Mapping[str, np.ndarray],
    config: Dict[str, Any] = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    manifest = {
        "config": config or {},
        "parameters": [{"name": name, "shape": list(np.shape(value))} for name, value in params.items()],
    }
    encoded = json.dumps(manifest, sort_keys=True).encode("utf-8")
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_LENGTH.pack(len(encoded)))
        fh.write(encoded)
        for value in params.values():
            fh.write(np.ascontiguousarray(value, dtype="<f4").tobytes())
    tmp.replace(path)
    logger.info(f"Wrote checkpoint {path} ({len(manifest['parameters'])} parameters)")
    return path


def load_checkpoint(path: Union[str, Path]) -> Tuple[Dict[str, np.ndarray], Dict[str, Any]]:
    """Return (parameters, config) from a PKGN1 file"""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"Cannot read checkpoint {path}: {e}")

    if raw[:len(MAGIC)] != MAGIC:
        raise CheckpointError(f"{path} is not a PKGN1 checkpoint (bad magic header)")
    offset = len(MAGIC)
    try:
        (length,) = _LENGTH.unpack_from(raw, offset)
        offset += _LENGTH.size
        manifest = json.loads(raw[offset:offset + length].decode("utf-8"))
    except (struct.error, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{path} has a corrupt manifest: {e}")
    offset += length

    params: Dict[str, np.ndarray] = {}
    for entry in manifest["parameters"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape, dtype=np.int64))
        end = offset + 4 * count
        if end > len(raw):
            raise CheckpointError(f"{path} is truncated inside parameter {entry['name']}")
        params[entry["name"]] = np.frombuffer(raw, dtype="<f4", count=count, offset=offset) \
            .astype(np.float32).reshape(shape)
        offset = end
    if offset != len(raw):
        raise CheckpointError(f"{path} has {len(raw) - offset} trailing bytes")
    return params, manifest["config"]
