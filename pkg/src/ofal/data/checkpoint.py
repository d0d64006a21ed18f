"""Single-file checkpoint container.

Layout:

    bytes 0..3    magic ``OFCP``
    bytes 4..7    format version, u32 little-endian
    bytes 8..15   header length H, u64 little-endian
    bytes 16..    header: UTF-8 JSON with
                    meta            free-form JSON-serializable dict
                    sections        [{name, dtype, shape, offset, nbytes}, ...]
                    payload_nbytes  total payload size
                    payload_sha256  hex digest of the payload
    then          payload: the section arrays, little-endian, contiguous

Portability over compactness: every array is stored with an explicit numpy
dtype string and shape, and the digest catches partial writes.
"""

import hashlib
import json
import os

import numpy as np

from ..errors import CorruptCheckpoint, IncompatibleCheckpoint

MAGIC = b"OFCP"
CHECKPOINT_VERSION = 1


def _le_dtype(arr: np.ndarray) -> np.dtype:
    dt = arr.dtype
    if dt.byteorder == ">":
        return dt.newbyteorder("<")
    return dt


def save_container(path, meta: dict, arrays: dict) -> None:
    """Write meta + named arrays atomically (tmp file then rename)."""
    sections = []
    blobs = []
    offset = 0
    for name, arr in arrays.items():
        arr = np.ascontiguousarray(arr)
        arr = arr.astype(_le_dtype(arr), copy=False)
        blob = arr.tobytes()
        sections.append(
            {
                "name": name,
                "dtype": arr.dtype.str,
                "shape": list(arr.shape),
                "offset": offset,
                "nbytes": len(blob),
            }
        )
        blobs.append(blob)
        offset += len(blob)
    payload = b"".join(blobs)
    header = json.dumps(
        {
            "meta": meta,
            "sections": sections,
            "payload_nbytes": len(payload),
            "payload_sha256": hashlib.sha256(payload).hexdigest(),
        },
        sort_keys=True,
    ).encode()

    tmp = str(path) + ".tmp"
    with open(tmp, "wb") as f:
        f.write(MAGIC)
        f.write(CHECKPOINT_VERSION.to_bytes(4, "little"))
        f.write(len(header).to_bytes(8, "little"))
        f.write(header)
        f.write(payload)
    os.replace(tmp, path)


def load_container(path):
    """Read a container back as (meta, arrays). Validates version and digest."""
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 16 or data[:4] != MAGIC:
        raise CorruptCheckpoint(f"{path}: not a checkpoint container")
    version = int.from_bytes(data[4:8], "little")
    if version != CHECKPOINT_VERSION:
        raise IncompatibleCheckpoint(
            f"{path}: format version {version}, supported {CHECKPOINT_VERSION}"
        )
    hlen = int.from_bytes(data[8:16], "little")
    if len(data) < 16 + hlen:
        raise CorruptCheckpoint(f"{path}: truncated header")
    try:
        header = json.loads(data[16 : 16 + hlen].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CorruptCheckpoint(f"{path}: unreadable header ({e})") from None
    payload = data[16 + hlen :]
    if len(payload) != header["payload_nbytes"]:
        raise CorruptCheckpoint(
            f"{path}: payload holds {len(payload)} bytes, "
            f"header declares {header['payload_nbytes']}"
        )
    if hashlib.sha256(payload).hexdigest() != header["payload_sha256"]:
        raise CorruptCheckpoint(f"{path}: payload digest mismatch")
    arrays = {}
    for sec in header["sections"]:
        start, end = sec["offset"], sec["offset"] + sec["nbytes"]
        arr = np.frombuffer(payload[start:end], dtype=np.dtype(sec["dtype"]))
        arrays[sec["name"]] = arr.reshape(sec["shape"]).copy()
    return header["meta"], arrays
